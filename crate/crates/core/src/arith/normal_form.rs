//! Smith and Hermite normal forms over ℤ with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// `u * m * v == s` with `u`, `v` unimodular and `s` diagonal, its diagonal
/// entries non-negative and forming a divisibility chain.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Non-zero diagonal entries `s1 | s2 | …`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s.get(i, i).clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }

    /// Integer basis of the right kernel: the trailing columns of `v`.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        (self.rank()..self.v.cols()).map(|j| self.v.column(j)).collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    for t in 0..rows.min(cols) {
        // Smallest non-zero entry of the trailing block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = s.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let p = s.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..rows {
                if !s.get(i, t).is_zero() {
                    let q = -s.get(i, t).div_floor(&p);
                    s.add_row_multiple(i, t, &q);
                    u.add_row_multiple(i, t, &q);
                    dirty |= !s.get(i, t).is_zero();
                }
            }
            for j in t + 1..cols {
                if !s.get(t, j).is_zero() {
                    let q = -s.get(t, j).div_floor(&p);
                    s.add_col_multiple(j, t, &q);
                    v.add_col_multiple(j, t, &q);
                    dirty |= !s.get(t, j).is_zero();
                }
            }
            if dirty {
                // A remainder smaller than the pivot appeared; promote it.
                let mut best = (t, t);
                for i in t + 1..rows {
                    let x = s.get(i, t);
                    if !x.is_zero() && x.abs() < s.get(best.0, best.1).abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    let x = s.get(t, j);
                    if !x.is_zero() && x.abs() < s.get(best.0, best.1).abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    s.swap_rows(t, best.0);
                    u.swap_rows(t, best.0);
                } else if best.1 != t {
                    s.swap_cols(t, best.1);
                    v.swap_cols(t, best.1);
                }
                continue;
            }
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !s.get(i, j).is_multiple_of(&p));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    s.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { u, s, v }
}

/// Row-style Hermite normal form: `transform * m` has the non-zero rows of
/// `h` on top followed by zero rows.
#[derive(Clone, Debug)]
pub struct Hnf {
    /// Echelon rows, positive pivots, entries above each pivot reduced into
    /// `[0, pivot)`.
    pub h: IntMatrix,
    pub pivots: Vec<usize>,
    pub transform: IntMatrix,
}

impl Hnf {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Integer coefficients `c` with `c · h = x`, if `x` lies in the row
    /// lattice.
    pub fn solve(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut rest = x.to_vec();
        let mut coeffs = Vec::with_capacity(self.rank());
        for (i, &pc) in self.pivots.iter().enumerate() {
            let piv = self.h.get(i, pc);
            if !rest[pc].is_multiple_of(piv) {
                return None;
            }
            let c = &rest[pc] / piv;
            for (j, r) in rest.iter_mut().enumerate() {
                *r -= &c * self.h.get(i, j);
            }
            coeffs.push(c);
        }
        rest.iter().all(Zero::is_zero).then_some(coeffs)
    }

    /// Coefficients over the original generator rows.
    pub fn solve_generators(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = self.solve(x)?;
        let k = self.transform.cols();
        Some(
            (0..k)
                .map(|j| c.iter().enumerate().map(|(i, ci)| ci * self.transform.get(i, j)).sum())
                .collect(),
        )
    }
}

pub fn hermite_normal_form(m: &IntMatrix) -> Hnf {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut t = IntMatrix::identity(rows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows {
                let x = a.get(i, c);
                if !x.is_zero() && best.is_none_or(|b| x.abs() < a.get(b, c).abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            a.swap_rows(r, b);
            t.swap_rows(r, b);
            let mut clean = true;
            for i in r + 1..rows {
                if !a.get(i, c).is_zero() {
                    let q = -a.get(i, c).div_floor(a.get(r, c));
                    a.add_row_multiple(i, r, &q);
                    t.add_row_multiple(i, r, &q);
                    clean &= a.get(i, c).is_zero();
                }
            }
            if clean {
                break;
            }
        }
        if a.get(r, c).is_zero() {
            continue;
        }
        if a.get(r, c).is_negative() {
            a.negate_row(r);
            t.negate_row(r);
        }
        for i in 0..r {
            let q = -a.get(i, c).div_floor(a.get(r, c));
            a.add_row_multiple(i, r, &q);
            t.add_row_multiple(i, r, &q);
        }
        pivots.push(c);
        r += 1;
    }
    let h = IntMatrix::from_big_rows((0..r).map(|i| a.row(i).to_vec()).collect(), cols);
    Hnf { h, pivots, transform: t }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag(s: &Snf) -> Vec<i64> {
        (0..s.s.rows().min(s.s.cols()))
            .map(|i| i64::try_from(s.s.get(i, i)).unwrap())
            .collect()
    }

    #[test]
    fn snf_examples() {
        let s = smith_normal_form(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 0]]));
        assert_eq!(diag(&s), vec![2, 0]);
        let s = smith_normal_form(&IntMatrix::from_rows(&[vec![1, 1], vec![1, 0]]));
        assert_eq!(diag(&s), vec![1, 1]);
        let s = smith_normal_form(&IntMatrix::zeros(2, 3));
        assert!(s.s.is_zero());
    }

    #[test]
    fn snf_divisibility_chain() {
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(diag(&smith_normal_form(&m)), vec![1, 6]);
        let m = IntMatrix::from_rows(&[vec![4, 6, 0], vec![6, 4, 2]]);
        let s = smith_normal_form(&m);
        assert_eq!(&s.u.mul(&m).mul(&s.v), &s.s);
        assert_eq!(diag(&s), vec![2, 2]);
    }

    #[test]
    fn hnf_membership() {
        let g = IntMatrix::from_rows(&[vec![4], vec![2], vec![1]]);
        let h = hermite_normal_form(&g);
        assert_eq!(h.h, IntMatrix::from_rows(&[vec![1]]));
        let c = h.solve_generators(&[BigInt::from(5)]).unwrap();
        let back: BigInt = c.iter().zip([4, 2, 1]).map(|(a, b)| a * b).sum();
        assert_eq!(back, BigInt::from(5));
    }

    proptest! {
        #[test]
        fn snf_reconstructs(entries in prop::collection::vec(-9i64..10, 12), cols in 1usize..5) {
            let rows = entries.len() / cols;
            let m = IntMatrix::from_rows(&entries.chunks(cols).take(rows).map(<[i64]>::to_vec).collect::<Vec<_>>());
            let s = smith_normal_form(&m);
            prop_assert_eq!(&s.u.mul(&m).mul(&s.v), &s.s);
            prop_assert_eq!(s.u.determinant().abs(), BigInt::one());
            prop_assert_eq!(s.v.determinant().abs(), BigInt::one());
            let d = s.invariant_factors();
            for w in d.windows(2) {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
            for i in 0..s.s.rows() {
                for j in 0..s.s.cols() {
                    if i != j { prop_assert!(s.s.get(i, j).is_zero()); }
                }
            }
            for k in s.kernel_basis() {
                prop_assert!(m.mul_vec(&k).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn hnf_is_canonical_and_spans(entries in prop::collection::vec(-9i64..10, 12), cols in 1usize..5) {
            let rows = entries.len() / cols;
            let g = IntMatrix::from_rows(&entries.chunks(cols).take(rows).map(<[i64]>::to_vec).collect::<Vec<_>>());
            let h = hermite_normal_form(&g);
            prop_assert_eq!(h.transform.determinant().abs(), BigInt::one());
            let prod = h.transform.mul(&g);
            for i in 0..h.rank() {
                prop_assert_eq!(prod.row(i), h.h.row(i));
            }
            for i in h.rank()..prod.rows() {
                prop_assert!(prod.row(i).iter().all(Zero::is_zero));
            }
            for i in 0..g.rows() {
                let c = h.solve_generators(g.row(i));
                prop_assert!(c.is_some());
            }
        }
    }
}
