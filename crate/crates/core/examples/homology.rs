//! Integer homology and cohomology of the approximant complexes.

use hulltool::collar::border_forcing;
use hulltool::complex::build_b0;
use hulltool::efs::build_efs;
use hulltool::homology::{cohomology_group, homology_group};
use hulltool::ruleset::{parse_rule, DEFAULT_BUDGET};

fn main() -> hulltool::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/rules/chair.json").into());
    let rule = parse_rule(&std::fs::read_to_string(path)?)?;
    let raw = build_b0(&rule)?;
    let efs = build_efs(&border_forcing(&rule, DEFAULT_BUDGET)?)?;
    for (name, x) in [("uncollared", &raw), ("collared", efs.complex())] {
        for i in 0..=x.dimension() {
            let h = homology_group(x, i);
            let c = cohomology_group(x, i);
            println!("{name:>10}  H_{i}: rank {} torsion {:?}   H^{i}: rank {} torsion {:?}", h.rank, h.torsion, c.rank, c.torsion);
        }
    }
    Ok(())
}
