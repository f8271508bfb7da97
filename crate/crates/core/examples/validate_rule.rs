//! Parse a rule file and print its substitution matrix and primitivity.
//!
//!     cargo run --example validate_rule -- rules/chair.json

use hulltool::ruleset::{abelianization, is_primitive, parse_rule, periodicity_probe};

fn main() -> hulltool::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/rules/fibonacci.json").into());
    let rule = parse_rule(&std::fs::read_to_string(path)?)?;
    println!("dimension {}, tiles {}", rule.dimension(), rule.labels().join(" "));
    let a = abelianization(&rule);
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|x| x.to_string()).collect();
        println!("  {} | {}", rule.label(i), row.join(" "));
    }
    match is_primitive(&a) {
        Some(k) => println!("primitive: A^{k} > 0"),
        None => println!("not primitive"),
    }
    let probe = periodicity_probe(&rule, 4096);
    println!("looks periodic: {}", probe.looks_periodic());
    Ok(())
}
