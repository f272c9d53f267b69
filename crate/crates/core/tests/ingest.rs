mod common;

use common::{policy_config, temp_csv, POLICY_CSV};
use crash_rules::ingest::{dedupe, default_bins, load_csv, prepare, read_csv, IngestConfig, IngestError, UNKNOWN};
use crash_rules::synth::{planted_fixture, HEADER};
use proptest::prelude::*;

fn column<'a>(t: &'a crash_rules::ingest::FeatureTable, name: &str) -> Vec<&'a str> {
    t.column(t.column_index(name).unwrap_or_else(|| panic!("no column {name}")))
        .collect()
}

#[test]
fn missing_policy_and_dedupe() {
    let (_dir, path) = temp_csv(POLICY_CSV);
    let t = prepare(&path, &policy_config()).unwrap();
    // first R1 kept, Snow duplicate dropped
    assert_eq!(t.ids, ["R1", "R2", "R3", "R4", "R5"]);
    assert_eq!(t.provenance.duplicate_rows, 1);
    // Lighting is 3 of 5 missing
    assert!(t.column_index("Lighting").is_none());
    let dropped = &t.provenance.missing.dropped;
    assert_eq!(dropped.len(), 1);
    assert_eq!(dropped[0].column, "Lighting");
    assert_eq!(dropped[0].missing_fraction, 0.6);
    assert_eq!(column(&t, "Weather"), ["Clear", UNKNOWN, "Rain", "Clear", "Cloudy"]);
    // mileage mode 45000 lands in 30k–60k; speed values all tie so the smallest (5) wins
    assert_eq!(
        column(&t, "Mileage Bin"),
        ["30k–60k", "30k–60k", "10k–30k", "30k–60k", "60k+"]
    );
    assert_eq!(
        column(&t, "Speed Bin"),
        ["0-10 mph", "0-10 mph", "11-60 mph", "61+ mph", "0-10 mph"]
    );
    let imputed: Vec<(&str, usize, &str)> = t
        .provenance
        .missing
        .imputed
        .iter()
        .map(|i| (i.column.as_str(), i.cells, i.value.as_str()))
        .collect();
    assert!(imputed.contains(&("Weather", 1, UNKNOWN)), "{imputed:?}");
    assert!(imputed.contains(&("Mileage", 1, "45000")), "{imputed:?}");
    assert!(imputed.contains(&("SV Precrash Speed (mph)", 1, "5")), "{imputed:?}");
    // temporal split; missing hour imputed with the mode
    assert_eq!(column(&t, "Year"), ["2022", "2022", "2022", "2022", "2022"]);
    assert_eq!(column(&t, "Month"), ["March", "March", "April", "March", "March"]);
    assert_eq!(column(&t, "Day"), ["15", "16", "01", "15", "15"]);
    assert_eq!(column(&t, "Hour"), ["20", "00", "08", "08", "08"]);
    for row in &t.rows {
        assert!(row.iter().all(|c| !c.is_empty()));
    }
}

#[test]
fn column_arithmetic() {
    let (_dir, path) = temp_csv(POLICY_CSV);
    let t = prepare(&path, &policy_config()).unwrap();
    let p = &t.provenance;
    assert_eq!(
        t.n_columns(),
        p.kept_columns + p.engineered_columns.len() - p.missing.dropped.len(),
        "{p:?}"
    );
}

#[test]
fn loader_errors() {
    let cfg = policy_config();
    let dup = "Report ID,Weather,Weather\nR1,a,b\n";
    assert!(matches!(read_csv(dup.as_bytes(), &cfg), Err(IngestError::DuplicateHeader(h)) if h == "Weather"));
    let unknown = "Report ID,Weather,Colour\nR1,a,b\n";
    assert!(matches!(read_csv(unknown.as_bytes(), &cfg), Err(IngestError::UnknownColumn(c)) if c == "Colour"));
    let ragged = "Report ID,Weather\nR1,a\nR2,b,c\n";
    assert!(matches!(
        read_csv(ragged.as_bytes(), &cfg),
        Err(IngestError::Csv { line: 3, .. })
    ));
    let no_id = "Report ID,Weather\nR1,a\n,b\n";
    assert!(matches!(
        read_csv(no_id.as_bytes(), &cfg),
        Err(IngestError::MissingReportId { line: 3 })
    ));
    assert!(matches!(
        load_csv("/definitely/not/here.csv", &cfg),
        Err(IngestError::Io { .. })
    ));
}

#[test]
fn sentinel_cells_are_missing() {
    let cfg = policy_config();
    let t = read_csv("Report ID,Weather\nR1,\nR2,N/A\nR3,Rain\n".as_bytes(), &cfg).unwrap();
    let w = t.column_index("Weather").unwrap();
    assert!(t.records[0].cells[w].is_missing());
    assert!(t.records[1].cells[w].is_missing());
    assert!(!t.records[2].cells[w].is_missing());
}

#[test]
fn planted_fixture_provenance() {
    let fx = planted_fixture(7);
    let (_dir, path) = temp_csv(&fx.csv);
    let t = prepare(&path, &IngestConfig::sgo_default()).unwrap();
    let p = &t.provenance;
    assert_eq!(p.raw_rows, fx.truth.raw_rows);
    assert_eq!(p.duplicate_rows, fx.truth.duplicate_rows);
    assert_eq!(p.excluded_rows, fx.truth.level3_rows);
    assert_eq!(t.n_rows(), fx.truth.sizes.iter().sum::<usize>());
    assert!(t.column_index("CP Pre-Crash Movement").is_none());
    for gone in [
        "VIN",
        "Investigating Officer",
        "Address",
        "Narrative",
        "Incident Date",
        "Incident Time",
        "Report ID",
    ] {
        assert!(t.column_index(gone).is_none(), "{gone} survived");
    }
    for engineered in [
        "Year",
        "Month",
        "Day",
        "Hour",
        "Automation Level",
        "Speed Bin",
        "Mileage Bin",
        "Speed Limit Bin",
    ] {
        assert!(t.column_index(engineered).is_some(), "{engineered} missing");
    }
    assert!(!column(&t, "Automation Level").contains(&"Level 3"));
    assert_eq!(HEADER.len(), IngestConfig::sgo_default().columns.len());
}

proptest! {
    #[test]
    fn dedupe_is_idempotent_and_first_wins(ids in proptest::collection::vec(0u8..6, 1..30)) {
        let mut csv = String::from("Report ID,Weather\n");
        for (i, id) in ids.iter().enumerate() {
            csv.push_str(&format!("R{id},w{i}\n"));
        }
        let raw = read_csv(csv.as_bytes(), &policy_config()).unwrap();
        let once = dedupe(raw);
        let twice = dedupe(once.clone());
        prop_assert_eq!(&once, &twice);
        let mut seen = std::collections::BTreeSet::new();
        let firsts: Vec<String> = ids.iter().enumerate().filter(|(_, id)| seen.insert(**id)).map(|(i, _)| format!("w{i}")).collect();
        let w = once.column_index("Weather").unwrap();
        let got: Vec<String> = once.records.iter().map(|r| r.cells[w].as_text().unwrap().to_string()).collect();
        prop_assert_eq!(got, firsts);
    }

    #[test]
    fn every_value_lands_in_exactly_one_bin(v in 0.0f64..500_000.0) {
        for b in default_bins() {
            let labels = b.labels();
            let i = b.bin_index(v);
            prop_assert!(i < labels.len());
            // inclusive upper edges: v sits in bin i iff edge[i-1] < v <= edge[i]
            if i < b.edges.len() {
                prop_assert!(v <= b.edges[i]);
            }
            if i > 0 {
                prop_assert!(v > b.edges[i - 1]);
            }
        }
    }

    #[test]
    fn no_missing_cells_after_ingest(seed in 0u64..50) {
        let fx = planted_fixture(seed);
        let (_dir, path) = temp_csv(&fx.csv);
        let t = prepare(&path, &IngestConfig::sgo_default()).unwrap();
        prop_assert!(t.rows.iter().flatten().all(|c| !c.trim().is_empty()));
    }
}
