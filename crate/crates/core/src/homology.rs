//! Integer homology and cohomology of cell complexes via Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::arith::normal_form::{hermite_normal_form, smith_normal_form};
use crate::arith::IntMatrix;
use crate::complex::CellComplex;

pub use crate::arith::normal_form::{Hnf, Snf};

/// `ℤ^rank ⊕ ⊕ ℤ/tᵢ` in invariant-factor form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FgAbelianGroup {
    pub rank: usize,
    #[serde(serialize_with = "crate::arith::serialize_bigints")]
    pub torsion: Vec<BigInt>,
}

impl FgAbelianGroup {
    pub fn free(rank: usize) -> Self {
        Self { rank, torsion: Vec::new() }
    }

    /// Cokernel of an integer map presented by `m` (target = rows).
    pub fn cokernel(m: &IntMatrix) -> Self {
        let snf = smith_normal_form(m);
        let inv = snf.invariant_factors();
        let torsion: Vec<BigInt> = inv.iter().filter(|d| !d.is_one()).cloned().collect();
        Self { rank: m.rows() - inv.len(), torsion }
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn rank_of(m: Option<&IntMatrix>) -> usize {
    m.map_or(0, |m| smith_normal_form(m).rank())
}

/// `ker ∂ᵢ / im ∂ᵢ₊₁`.
pub fn homology_group(x: &CellComplex, i: usize) -> FgAbelianGroup {
    let d = x.dimension();
    assert!(i <= d, "degree {i} above dimension {d}");
    let n = x.cells(i).len();
    let rank_out = rank_of(if i >= 1 { x.boundary_matrix(i).ok() } else { None });
    let incoming = if i < d { Some(x.boundary_matrix(i + 1).unwrap()) } else { None };
    let (rank_in, torsion) = match incoming {
        Some(m) => {
            let snf = smith_normal_form(m);
            let inv = snf.invariant_factors();
            (inv.len(), inv.into_iter().filter(|t| !t.is_one()).collect())
        }
        None => (0, Vec::new()),
    };
    FgAbelianGroup { rank: n - rank_out - rank_in, torsion }
}

/// `ker δⁱ / im δⁱ⁻¹` with δ the transposed boundaries.
pub fn cohomology_group(x: &CellComplex, i: usize) -> FgAbelianGroup {
    let d = x.dimension();
    assert!(i <= d, "degree {i} above dimension {d}");
    let n = x.cells(i).len();
    let rank_out = if i < d { rank_of(Some(&x.coboundary_matrix(i).unwrap())) } else { 0 };
    let (rank_in, torsion) = if i >= 1 {
        let snf = smith_normal_form(&x.coboundary_matrix(i - 1).unwrap());
        let inv = snf.invariant_factors();
        (inv.len(), inv.into_iter().filter(|t| !t.is_one()).collect())
    } else {
        (0, Vec::new())
    };
    FgAbelianGroup { rank: n - rank_out - rank_in, torsion }
}

/// Integer basis of `ker ∂_d` (top-dimensional cycles), in Hermite form.
pub fn cycle_space_basis(x: &CellComplex) -> Vec<Vec<BigInt>> {
    let d = x.dimension();
    let n = x.cells(d).len();
    let m = x.boundary_matrix(d).unwrap();
    let kernel = if m.rows() == 0 {
        IntMatrix::identity(n).to_rows()
    } else {
        smith_normal_form(m).kernel_basis()
    };
    if kernel.is_empty() {
        return kernel;
    }
    let h = hermite_normal_form(&IntMatrix::from_big_rows(kernel, n));
    h.h.to_rows()
}

/// Σ (−1)ⁱ rank Hᵢ, which must equal the cell-count Euler characteristic.
pub fn homological_euler_characteristic(x: &CellComplex) -> i64 {
    (0..=x.dimension())
        .map(|i| {
            let r = homology_group(x, i).rank as i64;
            if i % 2 == 0 { r } else { -r }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_b0;
    use crate::ruleset::parse_rule;
    use num_traits::Zero;

    #[test]
    fn wedge_and_torus() {
        let fib = parse_rule(r#"{"dimension":1,"tiles":[{"label":"a"},{"label":"b"}],"images":{"a":"ab","b":"a"}}"#).unwrap();
        let x = build_b0(&fib).unwrap();
        assert_eq!(homology_group(&x, 1), FgAbelianGroup::free(2));
        assert_eq!(homology_group(&x, 0), FgAbelianGroup::free(1));
        assert_eq!(cohomology_group(&x, 1), FgAbelianGroup::free(2));
        let basis = cycle_space_basis(&x);
        assert_eq!(basis, vec![vec![BigInt::from(1), BigInt::zero()], vec![BigInt::zero(), BigInt::from(1)]]);

        let torus = parse_rule(
            r#"{"dimension":2,"expansion":[2,2],"tiles":[{"label":"a"}],"images":{"a":[["a","a"],["a","a"]]}}"#,
        )
        .unwrap();
        let t = build_b0(&torus).unwrap();
        assert_eq!(homology_group(&t, 2), FgAbelianGroup::free(1));
        assert_eq!(homology_group(&t, 1), FgAbelianGroup::free(2));
        assert_eq!(cohomology_group(&t, 2), FgAbelianGroup::free(1));
        assert_eq!(cycle_space_basis(&t).len(), 1);
        assert_eq!(homological_euler_characteristic(&t), t.euler_characteristic());
    }

    #[test]
    fn torsion_appears_in_cokernels() {
        // ℝP² cell structure: one cell per dimension, ∂₂ = 2, ∂₁ = 0.
        let x = CellComplex::from_boundaries(
            vec!["s".into()],
            vec![crate::arith::int(1)],
            vec![vec!["v".into()], vec!["e".into()], vec!["s".into()]],
            vec![IntMatrix::zeros(1, 1), IntMatrix::from_rows(&[vec![2]])],
        )
        .unwrap();
        assert_eq!(homology_group(&x, 1), FgAbelianGroup { rank: 0, torsion: vec![BigInt::from(2)] });
        assert_eq!(homology_group(&x, 2), FgAbelianGroup::free(0));
        assert_eq!(cohomology_group(&x, 2), FgAbelianGroup { rank: 0, torsion: vec![BigInt::from(2)] });
        assert_eq!(cohomology_group(&x, 1), FgAbelianGroup::free(0));
        assert!(cycle_space_basis(&x).is_empty());
        assert_eq!(x.euler_characteristic(), 1);
        assert_eq!(homological_euler_characteristic(&x), 1);
        assert_eq!(FgAbelianGroup::cokernel(&IntMatrix::from_rows(&[vec![2]])).to_string(), "Z/2");
    }
}
