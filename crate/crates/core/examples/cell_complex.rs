//! Build the cell complex of the collared tiles and print its boundary
//! matrices.

use hulltool::collar::border_forcing;
use hulltool::efs::build_efs;
use hulltool::ruleset::{parse_rule, DEFAULT_BUDGET};

fn main() -> hulltool::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/rules/thue_morse.json").into());
    let rule = parse_rule(&std::fs::read_to_string(path)?)?;
    let efs = build_efs(&border_forcing(&rule, DEFAULT_BUDGET)?)?;
    let x = efs.complex();
    println!("cells per dimension: {:?}, euler characteristic {}", x.cell_counts(), x.euler_characteristic());
    for i in 1..=x.dimension() {
        let m = x.boundary_matrix(i)?;
        println!("boundary {i} ({} x {}):", m.rows(), m.cols());
        for r in 0..m.rows() {
            let row: Vec<String> = m.row(r).iter().map(|v| format!("{v:>2}")).collect();
            println!("  {}", row.join(" "));
        }
    }
    println!("pushforward on top cells:");
    let a = efs.pushforward();
    for r in 0..a.rows() {
        let row: Vec<String> = a.row(r).iter().map(|v| v.to_string()).collect();
        println!("  {:<10} {}", efs.labels()[r], row.join(" "));
    }
    Ok(())
}
