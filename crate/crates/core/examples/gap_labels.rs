//! Frequency module truncations and membership queries.
//!
//!     cargo run --example gap_labels -- rules/fibonacci.json "3 - lambda" "1/2"

use hulltool::collar::border_forcing;
use hulltool::efs::build_efs;
use hulltool::gaplabels::{contains, parse_expression, FrequencyModule};
use hulltool::measure::{invariant_measure, MeasureOutcome};
use hulltool::ruleset::{parse_rule, DEFAULT_BUDGET};

fn main() -> hulltool::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/rules/period_doubling.json").into());
    let queries: Vec<String> = args.collect();
    let rule = parse_rule(&std::fs::read_to_string(path)?)?;
    let efs = build_efs(&border_forcing(&rule, DEFAULT_BUDGET)?)?;
    let MeasureOutcome::Unique(m) = invariant_measure(&efs)? else {
        println!("no unique measure");
        return Ok(());
    };

    let depth = 4;
    let module = FrequencyModule::new(&m, efs.forget(), depth);
    for k in 0..=depth {
        println!("depth {k}: collared {}   letters {}", module.truncations[k], module.letter_truncations[k]);
    }
    println!("stabilized: {}", module.stabilized());

    let queries = if queries.is_empty() { vec!["1/12".to_string(), "1/5".to_string()] } else { queries };
    for q in queries {
        let x = parse_expression(&q, &m.field)?;
        let r = contains(&module, &x, depth)?;
        println!("{q}: member {} {:?}", r.member(), r.coefficients);
    }
    Ok(())
}
