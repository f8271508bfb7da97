//! Exact invariant measure in the Perron field, its consistency across
//! levels, and the Hilbert-metric ergodicity certificate.

use hulltool::collar::border_forcing;
use hulltool::efs::build_efs;
use hulltool::measure::{invariant_measure, unique_ergodicity, MeasureOutcome};
use hulltool::ruleset::{parse_rule, DEFAULT_BUDGET};

fn main() -> hulltool::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/rules/fibonacci.json").into());
    let rule = parse_rule(&std::fs::read_to_string(path)?)?;
    let efs = build_efs(&border_forcing(&rule, DEFAULT_BUDGET)?)?;

    let m = match invariant_measure(&efs)? {
        MeasureOutcome::Unique(m) => m,
        MeasureOutcome::Rays { rays, .. } => {
            println!("{} extremal rays, no unique measure", rays.len());
            return Ok(());
        }
    };
    println!("theta = {} ≈ {}", m.theta, m.theta.to_decimal(10));
    for (label, mu) in m.labels.iter().zip(&m.mu0) {
        println!("  mu0({label}) = {mu} ≈ {}", mu.to_decimal(10));
    }
    for n in 0..4 {
        println!("level {n}: mass {}", m.mass(n));
    }

    let cert = unique_ergodicity(&efs)?;
    println!("uniquely ergodic: {:?}", cert.verdict);
    println!("diameters: {:?}", cert.diameters);
    Ok(())
}
