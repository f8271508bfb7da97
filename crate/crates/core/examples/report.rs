//! Full JSON report for every bundled rule, written next to each other in a
//! directory.
//!
//!     cargo run --example report -- /tmp/reports

use hulltool::report::{full_report, Options};
use hulltool::ruleset::parse_rule;

fn main() -> hulltool::Result<()> {
    let out = std::env::args().nth(1);
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/rules");
    let mut paths: Vec<_> = std::fs::read_dir(dir)?.filter_map(|e| e.ok()).map(|e| e.path()).collect();
    paths.sort();
    for p in paths {
        let rule = parse_rule(&std::fs::read_to_string(&p)?)?;
        let report = full_report(&rule, &Options::default())?;
        let name = p.file_stem().unwrap().to_string_lossy().into_owned();
        match &out {
            Some(d) => {
                std::fs::create_dir_all(d)?;
                std::fs::write(format!("{d}/{name}.json"), serde_json::to_string_pretty(&report)?)?;
                println!("wrote {d}/{name}.json");
            }
            None => print!("{}", report.to_text()),
        }
    }
    Ok(())
}
