//! Brute-force frequency counts on large inflated patches, used to check the
//! exact Perron–Frobenius data. The collared census relabels cells directly
//! from their neighbours in the patch and shares no code with the collaring
//! module beyond the label format.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::{rat_to_f64, AlgebraicNumber};
use crate::collar::CollarStyle;
use crate::error::{Error, Result};
use crate::measure::WeightSystem;
use crate::ruleset::{box_positions, expand, Patch, SubstitutionRule};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrequencyTable {
    pub depth: usize,
    /// Collar styles applied, in order; empty for plain letters.
    pub styles: Vec<String>,
    /// Cells counted (boundary cells excluded in collared mode).
    pub cells: u64,
    pub labels: Vec<String>,
    pub counts: Vec<u64>,
}

impl FrequencyTable {
    pub fn frequency(&self, i: usize) -> BigRational {
        BigRational::new(BigInt::from(self.counts[i]), BigInt::from(self.cells))
    }

    pub fn frequency_of(&self, label: &str) -> BigRational {
        self.labels.iter().position(|l| l == label).map_or_else(BigRational::zero, |i| self.frequency(i))
    }
}

/// Row-major offsets of the 3^d neighbourhood kept by a style, centre excluded.
fn recorded_offsets(d: usize, style: CollarStyle) -> Vec<Vec<i64>> {
    box_positions(&vec![3; d])
        .map(|p| p.iter().map(|&x| x as i64 - 1).collect::<Vec<i64>>())
        .filter(|o| {
            let off = o.iter().filter(|&&x| x != 0).count();
            off > 0 && (style == CollarStyle::Corner || off == 1)
        })
        .collect()
}

/// One collaring round: every cell not on the boundary gets the label
/// `core[neighbours]`; the patch shrinks by one cell on each side.
fn collar_round(shape: &[usize], labels: &[String], style: CollarStyle) -> (Vec<usize>, Vec<String>) {
    let d = shape.len();
    let offsets = recorded_offsets(d, style);
    let grid = Patch::new(shape.to_vec(), (0..labels.len()).collect());
    let inner: Vec<usize> = shape.iter().map(|&n| n.saturating_sub(2)).collect();
    let mut out = Vec::with_capacity(inner.iter().product());
    for pos in box_positions(&inner) {
        let centre: Vec<usize> = pos.iter().map(|p| p + 1).collect();
        let ns: Vec<&str> = offsets
            .iter()
            .map(|o| {
                let q: Vec<usize> = centre.iter().zip(o).map(|(&c, &x)| (c as i64 + x) as usize).collect();
                labels[grid.get(&q)].as_str()
            })
            .collect();
        out.push(format!("{}[{}]", labels[grid.get(&centre)], ns.join(",")));
    }
    (inner, out)
}

/// Counts over `σᵏ(t)` for every prototile `t`, aggregated without weights.
/// With `styles` non-empty each patch is relabelled by that sequence of
/// collaring rounds first.
pub fn empirical_frequencies(rule: &SubstitutionRule, k: usize, styles: &[CollarStyle], budget: u64) -> Result<FrequencyTable> {
    let d = rule.dimension();
    let mut tally: BTreeMap<String, u64> = BTreeMap::new();
    let mut total = 0u64;
    let mut spent = 0u64;
    for t in 0..rule.len() {
        let p = expand(rule, &Patch::single(d, t), k, budget.saturating_sub(spent))?;
        spent += p.len() as u64;
        let mut shape = p.shape().to_vec();
        let mut labels: Vec<String> = p.cells().iter().map(|&c| rule.label(c).to_string()).collect();
        for &s in styles {
            (shape, labels) = collar_round(&shape, &labels, s);
        }
        total += labels.len() as u64;
        for l in labels {
            *tally.entry(l).or_insert(0) += 1;
        }
    }
    if total == 0 {
        return Err(Error::DimensionMismatch(format!("depth {k} leaves no interior cells after {} collaring rounds", styles.len())));
    }
    let (labels, counts) = if styles.is_empty() {
        let labels = rule.labels();
        let counts = labels.iter().map(|l| tally.get(l).copied().unwrap_or(0)).collect();
        (labels, counts)
    } else {
        tally.into_iter().unzip()
    };
    Ok(FrequencyTable { depth: k, styles: styles.iter().map(|s| s.name().to_string()).collect(), cells: total, labels, counts })
}

#[derive(Clone, Debug, Serialize)]
pub struct LabelDeviation {
    pub label: String,
    pub exact: f64,
    pub empirical: f64,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleComparison {
    pub tolerance: f64,
    pub max_deviation: f64,
    pub pass: bool,
    pub labels: Vec<LabelDeviation>,
}

/// Normalised exact weights against empirical frequencies, label by label;
/// each deviation is compared with `tol` exactly.
pub fn verify_against(labels: &[String], exact: &WeightSystem, empirical: &FrequencyTable, tol: &BigRational) -> Result<OracleComparison> {
    if labels.len() != exact.weights.len() {
        return Err(Error::AlphabetMismatch("labels and weights differ in length".into()));
    }
    if let Some(extra) = empirical.labels.iter().find(|l| !labels.contains(l)) {
        return Err(Error::AlphabetMismatch(format!("empirical label {extra} has no exact weight")));
    }
    let field = exact.weights[0].field().clone();
    let total = exact.weights.iter().fold(AlgebraicNumber::zero(&field), |acc, w| &acc + w);
    let inv = total.inv().ok_or_else(|| Error::Algebra("weights sum to zero".into()))?;
    let tol_alg = AlgebraicNumber::from_rational(&field, tol.clone());
    let mut rows = Vec::with_capacity(labels.len());
    for (l, w) in labels.iter().zip(&exact.weights) {
        let e = w * &inv;
        let f = empirical.frequency_of(l);
        let diff = &e - &AlgebraicNumber::from_rational(&field, f.clone());
        let abs = if diff.is_negative() { -diff } else { diff };
        rows.push(LabelDeviation {
            label: l.clone(),
            exact: e.to_f64(),
            empirical: rat_to_f64(&f),
            deviation: abs.to_f64(),
            pass: abs < tol_alg,
        });
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let pass = rows.iter().all(|r| r.pass);
    Ok(OracleComparison { tolerance: rat_to_f64(tol), max_deviation, pass, labels: rows })
}

/// Largest `|fᵢ − gᵢ|` between two tables over the union of their labels.
pub fn table_distance(a: &FrequencyTable, b: &FrequencyTable) -> BigRational {
    a.labels
        .iter()
        .chain(&b.labels)
        .map(|l| (a.frequency_of(l) - b.frequency_of(l)).abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::ruleset::{abelianization, parse_rule, DEFAULT_BUDGET};

    const TM: &str = r#"{"dimension":1,"tiles":[{"label":"a"},{"label":"b"}],"images":{"a":"ab","b":"ba"}}"#;

    #[test]
    fn thue_morse_is_balanced() {
        let r = parse_rule(TM).unwrap();
        let t = empirical_frequencies(&r, 10, &[], DEFAULT_BUDGET).unwrap();
        assert_eq!(t.cells, 2048);
        assert_eq!(t.frequency(0), rat(1, 2));
        assert_eq!(t.frequency(1), rat(1, 2));
    }

    #[test]
    fn solenoid_is_trivial() {
        let r = parse_rule(r#"{"dimension":1,"tiles":[{"label":"a"}],"images":{"a":"aa"}}"#).unwrap();
        for k in [0, 3, 7] {
            assert_eq!(empirical_frequencies(&r, k, &[], DEFAULT_BUDGET).unwrap().frequency(0), int(1));
        }
    }

    #[test]
    fn single_seed_counts_match_matrix_columns() {
        let r = parse_rule(r#"{"dimension":1,"tiles":[{"label":"a"},{"label":"b"}],"images":{"a":"ab","b":"a"}}"#).unwrap();
        let a = abelianization(&r).pow(7);
        for t in 0..2 {
            let p = expand(&r, &Patch::single(1, t), 7, DEFAULT_BUDGET).unwrap();
            let c = p.counts(2);
            for i in 0..2 {
                assert_eq!(BigInt::from(c[i]), *a.get(i, t));
            }
        }
    }

    #[test]
    fn collared_census_of_a_short_word() {
        let r = parse_rule(r#"{"dimension":1,"tiles":[{"label":"a"},{"label":"b"}],"images":{"a":"ab","b":"a"}}"#).unwrap();
        // σ⁴(a) = abaababa and σ⁴(b) = abaab lose their end cells.
        let t = empirical_frequencies(&r, 4, &[CollarStyle::Face], DEFAULT_BUDGET).unwrap();
        assert!(t.labels.iter().all(|l| ["a[a,b]", "a[b,a]", "a[b,b]", "b[a,a]"].contains(&l.as_str())));
        assert_eq!(t.cells, 6 + 3);
    }

    #[test]
    fn budget_is_enforced() {
        let r = parse_rule(TM).unwrap();
        assert!(matches!(empirical_frequencies(&r, 30, &[], 1000), Err(Error::Budget { .. })));
    }
}
