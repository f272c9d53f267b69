//! Regenerates the bundled fixtures:
//! `cargo run --example gen_fixtures -- crates/core/fixtures`

use std::path::PathBuf;

use crash_rules::pipeline::PipelineConfig;
use crash_rules::synth::planted_fixture;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("sgo_synthetic.csv"), planted_fixture(7).csv)?;
    let mut config = PipelineConfig::default().to_json_pretty();
    config.push('\n');
    std::fs::write(dir.join("sgo_config.json"), config)?;
    Ok(())
}
