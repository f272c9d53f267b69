//! Synthetic SGO-shaped crash reports with planted cluster structure and
//! planted association rules.
//!
//! Row quotas inside each cluster are fixed and only their placement is
//! random, so every planted rule's support, confidence and lift are exact
//! ratios known up front. The columns match [`IngestConfig::sgo_default`].
//!
//! [`IngestConfig::sgo_default`]: crate::ingest::IngestConfig::sgo_default

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const HEADER: [&str; 27] = [
    "Report ID",
    "Reporting Entity",
    "Make",
    "VIN",
    "Investigating Officer",
    "Address",
    "ADS/ADAS Version",
    "Automation System",
    "Incident Date",
    "Incident Time",
    "City",
    "State",
    "Roadway Type",
    "Roadway Surface",
    "Roadway Description",
    "Weather",
    "Lighting",
    "Crash With",
    "SV Pre-Crash Movement",
    "CP Pre-Crash Movement",
    "SV Contact Area",
    "SV Any Air Bags Deployed?",
    "Highest Injury Severity Alleged",
    "SV Precrash Speed (mph)",
    "Posted Speed Limit (mph)",
    "Mileage",
    "Narrative",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlantedRule {
    pub cluster: usize,
    pub antecedent: Vec<String>,
    pub consequent: Vec<String>,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundTruth {
    /// Planted cluster of every report that survives cleaning.
    pub cluster_of: BTreeMap<String, usize>,
    pub sizes: Vec<usize>,
    pub planted: Vec<PlantedRule>,
    pub raw_rows: usize,
    pub duplicate_rows: usize,
    pub level3_rows: usize,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub csv: String,
    pub truth: GroundTruth,
}

type Row = BTreeMap<&'static str, String>;

fn pick<'a, R: Rng>(rng: &mut R, options: &[&'a str]) -> &'a str {
    options.choose(rng).expect("non-empty options")
}

fn date(year: u32, months: &[u32], days: std::ops::RangeInclusive<u32>, rng: &mut impl Rng) -> String {
    format!("{year}-{:02}-{:02}", months.choose(rng).unwrap(), rng.gen_range(days))
}

fn time(hours: std::ops::RangeInclusive<u32>, rng: &mut impl Rng) -> String {
    format!("{:02}:{:02}", rng.gen_range(hours), rng.gen_range(0..60))
}

fn set(row: &mut Row, key: &'static str, value: impl Into<String>) {
    row.insert(key, value.into());
}

fn junk(row: &mut Row, rng: &mut impl Rng) {
    set(row, "VIN", format!("VIN{:08}", rng.gen_range(0..100_000_000u32)));
    set(
        row,
        "Investigating Officer",
        pick(rng, &["Officer A", "Officer B", "Officer C"]),
    );
    set(row, "Address", format!("{} Main St", rng.gen_range(1..999)));
}

/// `order[i]` is the planted slot of local row `i`.
fn slots(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

fn highway_adas(n: usize, rng: &mut impl Rng) -> Vec<Row> {
    let weather = slots(n, rng);
    let crash = slots(n, rng);
    (0..n)
        .map(|i| {
            let mut r = Row::new();
            junk(&mut r, rng);
            set(&mut r, "Reporting Entity", "Tesla, Inc.");
            set(&mut r, "Make", "Tesla");
            set(
                &mut r,
                "ADS/ADAS Version",
                pick(rng, &["Autopilot", "FSD Beta", "Level 2"]),
            );
            set(&mut r, "Automation System", "ADAS");
            set(&mut r, "Incident Date", date(2022, &[6, 7], 1..=5, rng));
            set(&mut r, "Incident Time", time(7..=9, rng));
            set(&mut r, "City", pick(rng, &["Austin", "Houston"]));
            set(&mut r, "State", "TX");
            set(&mut r, "Roadway Type", "Highway / Freeway");
            let desc = if i % 20 == 7 {
                ""
            } else {
                pick(rng, &["No Unusual Conditions", "No Unusual Conditions", "Work Zone"])
            };
            set(&mut r, "Roadway Description", desc);
            let (w, s) = match weather[i] {
                0..=15 => ("Rain", "Wet"),
                16..=19 => ("Cloudy", "Wet"),
                _ => (pick(rng, &["Clear", "Cloudy"]), "Dry"),
            };
            set(&mut r, "Weather", w);
            set(&mut r, "Roadway Surface", s);
            set(&mut r, "Lighting", pick(rng, &["Daylight", "Dawn / Dusk"]));
            let (with, bags) = match crash[i] {
                0..=14 => ("Other Fixed Object", "Yes"),
                15..=19 => ("Other Fixed Object", "No"),
                20..=34 => (pick(rng, &["Passenger Car", "SUV"]), "Yes"),
                _ => (pick(rng, &["Passenger Car", "SUV"]), "No"),
            };
            set(&mut r, "Crash With", with);
            set(&mut r, "SV Any Air Bags Deployed?", bags);
            set(
                &mut r,
                "SV Pre-Crash Movement",
                pick(rng, &["Proceeding Straight", "Changing Lanes"]),
            );
            set(&mut r, "SV Contact Area", pick(rng, &["Front", "Front Left"]));
            set(
                &mut r,
                "Highest Injury Severity Alleged",
                pick(rng, &["No Injuries Reported", "Minor"]),
            );
            set(&mut r, "SV Precrash Speed (mph)", rng.gen_range(62..=75).to_string());
            set(&mut r, "Posted Speed Limit (mph)", pick(rng, &["65", "70"]));
            let miles = if i % 10 == 9 {
                String::new()
            } else {
                rng.gen_range(20_000..=55_000).to_string()
            };
            set(&mut r, "Mileage", miles);
            set(
                &mut r,
                "Narrative",
                "The subject vehicle was traveling on the freeway when the crash occurred.",
            );
            r
        })
        .collect()
}

fn intersection_ads(n: usize, rng: &mut impl Rng) -> Vec<Row> {
    let weather = slots(n, rng);
    let light = slots(n, rng);
    (0..n)
        .map(|i| {
            let mut r = Row::new();
            junk(&mut r, rng);
            set(&mut r, "Reporting Entity", "Waymo LLC");
            set(&mut r, "Make", "Jaguar");
            set(&mut r, "ADS/ADAS Version", "5th Gen");
            set(&mut r, "Automation System", "ADS");
            set(&mut r, "Incident Date", date(2024, &[3, 5], 12..=16, rng));
            set(&mut r, "Incident Time", time(13..=16, rng));
            set(&mut r, "City", "San Francisco");
            set(&mut r, "State", "CA");
            set(&mut r, "Roadway Type", "Intersection");
            set(&mut r, "Roadway Description", "No Unusual Conditions");
            let (w, s) = match weather[i] {
                0..=6 => ("Rain", "Wet"),
                _ => (pick(rng, &["Clear", "Cloudy"]), "Dry"),
            };
            set(&mut r, "Weather", w);
            set(&mut r, "Roadway Surface", s);
            let (lighting, movement) = match light[i] {
                0..=11 => ("Dark - Lighted", "Stopped"),
                12..=13 => ("Dark - Lighted", "Proceeding Straight"),
                14..=29 => ("Daylight", "Stopped"),
                _ => ("Daylight", pick(rng, &["Proceeding Straight", "Making Left Turn"])),
            };
            set(&mut r, "Lighting", lighting);
            set(&mut r, "SV Pre-Crash Movement", movement);
            set(&mut r, "Crash With", pick(rng, &["Passenger Car", "SUV"]));
            set(&mut r, "SV Contact Area", "Rear");
            set(&mut r, "SV Any Air Bags Deployed?", "No");
            set(
                &mut r,
                "Highest Injury Severity Alleged",
                pick(rng, &["No Injuries Reported", "Minor"]),
            );
            set(&mut r, "SV Precrash Speed (mph)", rng.gen_range(0..=8).to_string());
            set(&mut r, "Posted Speed Limit (mph)", "25");
            set(&mut r, "Mileage", rng.gen_range(2_000..=9_000).to_string());
            set(
                &mut r,
                "Narrative",
                "The driverless vehicle was waiting at the intersection when it was struck.",
            );
            r
        })
        .collect()
}

fn street_adas(n: usize, rng: &mut impl Rng) -> Vec<Row> {
    let weather = slots(n, rng);
    let light = slots(n, rng);
    (0..n)
        .map(|i| {
            let mut r = Row::new();
            junk(&mut r, rng);
            set(&mut r, "Reporting Entity", "General Motors");
            set(&mut r, "Make", "Chevrolet");
            set(&mut r, "ADS/ADAS Version", "Super Cruise");
            set(&mut r, "Automation System", "ADAS");
            set(&mut r, "Incident Date", date(2023, &[10, 11], 24..=28, rng));
            set(&mut r, "Incident Time", time(20..=23, rng));
            set(&mut r, "City", "Phoenix");
            set(&mut r, "State", "AZ");
            set(&mut r, "Roadway Type", "Street");
            set(&mut r, "Roadway Description", "No Unusual Conditions");
            let (w, s) = match weather[i] {
                0..=1 => ("Rain", "Wet"),
                _ => ("Clear", "Dry"),
            };
            set(&mut r, "Weather", w);
            set(&mut r, "Roadway Surface", s);
            let (lighting, severity) = match light[i] {
                0..=11 => ("Dark - Not Lighted", "Minor"),
                12..=14 => ("Dark - Not Lighted", "No Injuries Reported"),
                15..=22 => ("Dark - Lighted", "Minor"),
                _ => ("Dark - Lighted", "No Injuries Reported"),
            };
            set(&mut r, "Lighting", lighting);
            set(&mut r, "Highest Injury Severity Alleged", severity);
            set(&mut r, "Crash With", pick(rng, &["Passenger Car", "Pickup Truck"]));
            set(
                &mut r,
                "SV Pre-Crash Movement",
                pick(rng, &["Proceeding Straight", "Making Right Turn"]),
            );
            set(&mut r, "SV Contact Area", pick(rng, &["Front", "Right"]));
            set(&mut r, "SV Any Air Bags Deployed?", pick(rng, &["Yes", "No"]));
            set(&mut r, "SV Precrash Speed (mph)", rng.gen_range(15..=45).to_string());
            set(&mut r, "Posted Speed Limit (mph)", pick(rng, &["35", "45"]));
            set(&mut r, "Mileage", rng.gen_range(30_000..=80_000).to_string());
            set(
                &mut r,
                "Narrative",
                "The subject vehicle was traveling on a city street at night.",
            );
            r
        })
        .collect()
}

fn level3(n: usize, rng: &mut impl Rng) -> Vec<Row> {
    let mut rows = intersection_ads(n, rng);
    for r in &mut rows {
        set(r, "ADS/ADAS Version", "Level 3 pilot");
    }
    rows
}

fn rule(cluster: usize, a: &[&str], c: &[&str], both: usize, ante: usize, cons: usize, n: usize) -> PlantedRule {
    let support = both as f64 / n as f64;
    let confidence = both as f64 / ante as f64;
    PlantedRule {
        cluster,
        antecedent: a.iter().map(|s| s.to_string()).collect(),
        consequent: c.iter().map(|s| s.to_string()).collect(),
        support,
        confidence,
        lift: confidence / (cons as f64 / n as f64),
    }
}

/// Three planted clusters (80 highway ADAS, 70 intersection ADS, 50 night
/// street ADAS rows) plus 4 Level 3 rows and 6 duplicate report ids.
pub fn planted_fixture(seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = vec![80, 70, 50];
    let mut tagged: Vec<(Option<usize>, Row)> = Vec::new();
    tagged.extend(highway_adas(sizes[0], &mut rng).into_iter().map(|r| (Some(0), r)));
    tagged.extend(intersection_ads(sizes[1], &mut rng).into_iter().map(|r| (Some(1), r)));
    tagged.extend(street_adas(sizes[2], &mut rng).into_iter().map(|r| (Some(2), r)));
    // CP Pre-Crash Movement: 3 of every 5 rows per cluster missing (60%)
    let mut local = [0usize; 3];
    for (c, row) in &mut tagged {
        let c = c.expect("planted");
        let v = if local[c] % 5 < 3 {
            ""
        } else {
            pick(&mut rng, &["Proceeding Straight", "Stopped"])
        };
        local[c] += 1;
        set(row, "CP Pre-Crash Movement", v);
    }
    let level3_rows = 4;
    for mut r in level3(level3_rows, &mut rng) {
        set(&mut r, "CP Pre-Crash Movement", "");
        tagged.push((None, r));
    }
    tagged.shuffle(&mut rng);
    for (i, (_, row)) in tagged.iter_mut().enumerate() {
        set(row, "Report ID", format!("SGO-{:05}", 10_000 + i));
    }

    let mut cluster_of = BTreeMap::new();
    for (c, row) in &tagged {
        if let Some(c) = c {
            cluster_of.insert(row["Report ID"].clone(), *c);
        }
    }

    let duplicate_rows = 6;
    let mut dups: Vec<Row> = tagged.iter().take(duplicate_rows).map(|(_, r)| r.clone()).collect();
    for d in &mut dups {
        set(d, "Weather", "Snow");
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).unwrap();
    for row in tagged.iter().map(|(_, r)| r).chain(&dups) {
        w.write_record(HEADER.iter().map(|h| row[h].as_str())).unwrap();
    }
    let csv = String::from_utf8(w.into_inner().unwrap()).unwrap();

    let planted = vec![
        rule(0, &["Weather=Rain"], &["Roadway Surface=Wet"], 16, 16, 20, 80),
        rule(
            0,
            &["Roadway Type=Highway / Freeway", "Weather=Rain"],
            &["Roadway Surface=Wet"],
            16,
            16,
            20,
            80,
        ),
        rule(
            0,
            &["Crash With=Other Fixed Object"],
            &["SV Any Air Bags Deployed?=Yes"],
            15,
            20,
            30,
            80,
        ),
        rule(1, &["Weather=Rain"], &["Roadway Surface=Wet"], 7, 7, 7, 70),
        rule(
            1,
            &["Lighting=Dark - Lighted"],
            &["SV Pre-Crash Movement=Stopped"],
            12,
            14,
            28,
            70,
        ),
        rule(2, &["Weather=Rain"], &["Roadway Surface=Wet"], 2, 2, 2, 50),
        rule(
            2,
            &["Lighting=Dark - Not Lighted"],
            &["Highest Injury Severity Alleged=Minor"],
            12,
            15,
            20,
            50,
        ),
    ];

    Fixture {
        csv,
        truth: GroundTruth {
            cluster_of,
            sizes,
            planted,
            raw_rows: tagged.len() + duplicate_rows,
            duplicate_rows,
            level3_rows,
        },
    }
}

/// `rows` identical reports differing only in report id.
pub fn uniform_fixture(rows: usize) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER).unwrap();
    for i in 0..rows {
        let id = format!("U-{i:04}");
        let row: Vec<&str> = HEADER
            .iter()
            .map(|&h| match h {
                "Report ID" => id.as_str(),
                "Reporting Entity" => "Tesla, Inc.",
                "Make" => "Tesla",
                "ADS/ADAS Version" => "Level 2",
                "Automation System" => "ADAS",
                "Incident Date" => "2022-03-15",
                "Incident Time" => "20:35",
                "SV Precrash Speed (mph)" => "45",
                "Posted Speed Limit (mph)" => "65",
                "Mileage" => "45000",
                _ => "Clear",
            })
            .collect();
        w.write_record(row).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
