//! Count tiles in large inflated patches and compare with the exact weights.

use hulltool::arith::rat;
use hulltool::collar::border_forcing;
use hulltool::efs::build_efs;
use hulltool::gaplabels::letter_weights;
use hulltool::measure::{invariant_measure, transverse_weights, MeasureOutcome, WeightSystem};
use hulltool::oracle::{empirical_frequencies, verify_against};
use hulltool::ruleset::{parse_rule, DEFAULT_BUDGET};

fn main() -> hulltool::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/rules/thue_morse.json").into());
    let rule = parse_rule(&std::fs::read_to_string(path)?)?;
    let tower = border_forcing(&rule, DEFAULT_BUDGET)?;
    let efs = build_efs(&tower)?;
    let MeasureOutcome::Unique(m) = invariant_measure(&efs)? else { return Ok(()) };
    let tol = rat(1, 1000);
    let depth = if rule.dimension() == 1 { 16 } else { 6 };

    let letters = empirical_frequencies(&rule, depth, &[], DEFAULT_BUDGET)?;
    let exact = WeightSystem::new(0, letter_weights(&m, efs.forget(), 0));
    let c = verify_against(&rule.labels(), &exact, &letters, &tol)?;
    println!("letters over {} cells, max deviation {:.2e}", letters.cells, c.max_deviation);
    for row in &c.labels {
        println!("  {:<4} exact {:.6} counted {:.6}", row.label, row.exact, row.empirical);
    }

    let collared = empirical_frequencies(&rule, depth, &tower.styles(), DEFAULT_BUDGET)?;
    let c = verify_against(&m.labels, &transverse_weights(&m, 0), &collared, &tol)?;
    println!("collared over {} cells, max deviation {:.2e}, within 1e-3: {}", collared.cells, c.max_deviation, c.pass);
    Ok(())
}
