//! Force the border: collar until the self-map is flat, then show the
//! collared alphabet and what each collared tile forgets to.

use hulltool::collar::{border_forcing, check_flattening};
use hulltool::complex::build_b0;
use hulltool::ruleset::{parse_rule, DEFAULT_BUDGET};

fn main() -> hulltool::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/rules/fibonacci.json").into());
    let rule = parse_rule(&std::fs::read_to_string(path)?)?;

    let raw = check_flattening(&rule, &build_b0(&rule)?);
    println!("uncollared flat: {}", raw.flat);
    if let Some(w) = &raw.witness {
        println!("  witness: {w:?}");
    }

    let tower = border_forcing(&rule, DEFAULT_BUDGET)?;
    let styles: Vec<&str> = tower.styles().iter().map(|s| s.name()).collect();
    println!("collaring rounds: {}", styles.join(", "));
    let collared = tower.rule();
    for (t, base) in tower.forget().iter().enumerate() {
        println!("  {} -> {}", collared.label(t), rule.label(*base));
    }
    Ok(())
}
