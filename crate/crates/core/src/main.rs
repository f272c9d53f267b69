fn main() {
    std::process::exit(crash_rules::cli::main_with_args(std::env::args_os()));
}
