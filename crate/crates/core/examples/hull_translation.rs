//! Points of the hull as nested cell positions, moved by translation.

use hulltool::arith::rat;
use hulltool::collar::border_forcing;
use hulltool::efs::build_efs;
use hulltool::ruleset::{parse_rule, DEFAULT_BUDGET};

fn main() -> hulltool::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/rules/fibonacci.json").into());
    let rule = parse_rule(&std::fs::read_to_string(path)?)?;
    let efs = build_efs(&border_forcing(&rule, DEFAULT_BUDGET)?)?;
    let d = efs.dimension();

    let depth = 5;
    let start: Vec<_> = (0..d).map(|axis| efs.extent(0, axis, depth).scale(&rat(1, 3))).collect();
    let x = efs.hull_point(depth, 0, start)?;
    println!("start: {:?}", x.cells);
    for step in [rat(1, 2), rat(3, 2), rat(-7, 4), rat(40, 1)] {
        let v = vec![step.clone(); d];
        match efs.translate_point(&x, &v) {
            Ok(y) => println!("move {step}: cells {:?}, level-0 position {}", y.cells, y.coords[0][0].to_decimal(6)),
            Err(e) => println!("move {step}: {e}"),
        }
    }
    Ok(())
}
