//! Real number fields ℚ(θ) given by a monic irreducible polynomial and an
//! isolating interval that picks out one real root.
//!
//! Elements are polynomials in θ of degree below the field degree. Equality is
//! structural; order and sign go through interval refinement of θ with exact
//! rational evaluation, never through floating point alone.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{int, rat_to_decimal, rat_to_f64, Interval, QPoly};
use crate::error::{Error, Result};

/// ℚ(θ) for a real algebraic θ.
#[derive(Debug)]
pub struct NumberField {
    min_poly: QPoly,
    root: Interval,
}

const INITIAL_BITS: usize = 96;

impl NumberField {
    /// Field generated by the real root of `min_poly` inside `isolating`.
    /// The polynomial must be irreducible over ℚ; the interval must contain
    /// exactly one of its real roots.
    pub fn new(min_poly: QPoly, isolating: Interval) -> Result<Arc<Self>> {
        let min_poly = min_poly.monic();
        let deg = min_poly.degree().unwrap_or(0);
        if deg == 0 {
            return Err(Error::Algebra("minimal polynomial must have positive degree".into()));
        }
        let count = if isolating.lo == isolating.hi {
            usize::from(min_poly.eval(&isolating.lo).is_zero())
        } else {
            min_poly.count_roots(&isolating.lo, &isolating.hi)
                + usize::from(min_poly.eval(&isolating.lo).is_zero())
        };
        if count != 1 {
            return Err(Error::Algebra(format!(
                "interval [{}, {}] holds {count} roots of {min_poly}",
                isolating.lo, isolating.hi
            )));
        }
        let root = if deg == 1 {
            Interval::point(-min_poly.coeff(0))
        } else {
            let w = BigRational::new(BigInt::one(), BigInt::one() << INITIAL_BITS);
            min_poly.refine_root(&isolating, &w)
        };
        Ok(Arc::new(Self { min_poly, root }))
    }

    /// ℚ itself, presented with generator `r`.
    pub fn rational(r: BigRational) -> Arc<Self> {
        let min_poly = QPoly::new(vec![-r.clone(), BigRational::one()]);
        Arc::new(Self { min_poly, root: Interval::point(r) })
    }

    pub fn degree(&self) -> usize {
        self.min_poly.degree().unwrap_or(1)
    }

    pub fn min_poly(&self) -> &QPoly {
        &self.min_poly
    }

    pub fn root_interval(&self) -> &Interval {
        &self.root
    }

    /// An isolating interval of θ no wider than `width`.
    pub fn refined_root(&self, width: &BigRational) -> Interval {
        self.min_poly.refine_root(&self.root, width)
    }

    pub fn generator_f64(&self) -> f64 {
        rat_to_f64(&self.root.midpoint())
    }

    pub fn same_as(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.min_poly == other.min_poly
                && self.root.lo <= other.root.hi
                && other.root.lo <= self.root.hi)
    }
}

/// Element of a [`NumberField`].
#[derive(Clone)]
pub struct AlgebraicNumber {
    field: Arc<NumberField>,
    coeffs: Vec<BigRational>,
}

impl AlgebraicNumber {
    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self { field: field.clone(), coeffs: vec![BigRational::zero(); field.degree()] }
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_rational(field, BigRational::one())
    }

    pub fn from_rational(field: &Arc<NumberField>, r: BigRational) -> Self {
        let mut z = Self::zero(field);
        z.coeffs[0] = r;
        z
    }

    pub fn from_int(field: &Arc<NumberField>, n: i64) -> Self {
        Self::from_rational(field, int(n))
    }

    /// θ itself.
    pub fn generator(field: &Arc<NumberField>) -> Self {
        Self::from_poly(field, &QPoly::x())
    }

    /// Reduces an arbitrary polynomial in θ.
    pub fn from_poly(field: &Arc<NumberField>, p: &QPoly) -> Self {
        let r = p.rem(&field.min_poly);
        let mut coeffs = r.coeffs().to_vec();
        coeffs.resize(field.degree(), BigRational::zero());
        Self { field: field.clone(), coeffs }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    /// Coefficients over the power basis 1, θ, …, θ^(n-1).
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn poly(&self) -> QPoly {
        QPoly::new(self.coeffs.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(Zero::is_zero)
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    fn check_field(&self, other: &Self) {
        assert!(
            self.field.same_as(&other.field),
            "arithmetic between different number fields"
        );
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.field.degree() == 1 {
            return Some(Self::from_rational(&self.field, self.coeffs[0].recip()));
        }
        let (g, s, _) = self.poly().ext_gcd(&self.field.min_poly);
        debug_assert!(g.degree() == Some(0));
        Some(Self::from_poly(&self.field, &s))
    }

    pub fn pow(&self, e: i64) -> Self {
        let mut base = if e < 0 { self.inv().expect("negative power of zero") } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Interval enclosing the real value, of width at most `width`.
    pub fn enclosure(&self, width: &BigRational) -> Interval {
        let p = self.poly();
        let mut iv = self.field.root.clone();
        loop {
            let enc = p.eval_interval(&iv);
            if enc.width() <= *width {
                return enc;
            }
            let target = iv.width() / int(1 << 16);
            iv = self.field.min_poly.refine_root(&iv, &target);
        }
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let p = self.poly();
        let mut iv = self.field.root.clone();
        loop {
            let enc = p.eval_interval(&iv);
            if enc.lo.is_positive() {
                return 1;
            }
            if enc.hi.is_negative() {
                return -1;
            }
            // θ is irrational here (degree-1 roots are exact points), and a
            // non-zero element of degree < n cannot vanish at θ, so refinement
            // terminates.
            let target = iv.width() / int(1 << 16);
            iv = self.field.min_poly.refine_root(&iv, &target);
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn to_f64(&self) -> f64 {
        let enc = self.enclosure(&BigRational::new(BigInt::one(), BigInt::one() << 64));
        rat_to_f64(&enc.midpoint())
    }

    /// Decimal rendering with `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let w = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(digits as u32 + 2));
        let enc = self.enclosure(&w);
        rat_to_decimal(&enc.midpoint(), digits)
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (≈{})", self.to_f64())
    }
}

impl fmt::Display for AlgebraicNumber {
    /// Polynomial in θ, written with `λ`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.poly().to_string().replace('x', "λ");
        write!(f, "{s}")
    }
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_as(&other.field) && self.coeffs == other.coeffs
    }
}

impl Eq for AlgebraicNumber {}

impl Hash for AlgebraicNumber {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for AlgebraicNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AlgebraicNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl Add for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn add(self, rhs: Self) -> AlgebraicNumber {
        self.check_field(rhs);
        AlgebraicNumber {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn sub(self, rhs: Self) -> AlgebraicNumber {
        self.check_field(rhs);
        AlgebraicNumber {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn mul(self, rhs: Self) -> AlgebraicNumber {
        self.check_field(rhs);
        if self.field.degree() == 1 {
            return AlgebraicNumber::from_rational(&self.field, &self.coeffs[0] * &rhs.coeffs[0]);
        }
        AlgebraicNumber::from_poly(&self.field, &self.poly().mul(&rhs.poly()))
    }
}

impl Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        AlgebraicNumber { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, rhs: Self) -> AlgebraicNumber {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        -&self
    }
}

/// Sum of a slice; `None` only for an empty slice.
pub fn sum(values: &[AlgebraicNumber]) -> Option<AlgebraicNumber> {
    let (first, rest) = values.split_first()?;
    Some(rest.iter().fold(first.clone(), |acc, v| &acc + v))
}

/// Dot product of equally long vectors.
pub fn dot(a: &[AlgebraicNumber], b: &[AlgebraicNumber]) -> AlgebraicNumber {
    assert_eq!(a.len(), b.len());
    assert!(!a.is_empty());
    let mut acc = AlgebraicNumber::zero(a[0].field());
    for (x, y) in a.iter().zip(b) {
        acc = &acc + &(x * y);
    }
    acc
}

/// Basis of the right null space of a matrix over a number field, one vector
/// per free column, with that free coordinate set to one.
pub fn nullspace(rows: &[Vec<AlgebraicNumber>], field: &Arc<NumberField>) -> Vec<Vec<AlgebraicNumber>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<AlgebraicNumber>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].inv().unwrap();
        for j in c..ncols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..ncols {
                    let t = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|fc| {
            let mut v = vec![AlgebraicNumber::zero(field); ncols];
            v[fc] = AlgebraicNumber::one(field);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -&m[i][fc];
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn golden() -> Arc<NumberField> {
        NumberField::new(QPoly::from_ints(&[-1, -1, 1]), Interval::new(rat(3, 2), rat(2, 1))).unwrap()
    }

    #[test]
    fn golden_ratio_identities() {
        let f = golden();
        let l = AlgebraicNumber::generator(&f);
        let one = AlgebraicNumber::one(&f);
        // λ² = λ + 1
        assert_eq!(&l * &l, &l + &one);
        // 1/λ = λ − 1
        assert_eq!(l.inv().unwrap(), &l - &one);
        assert!((l.to_f64() - 1.618_033_988_749_895).abs() < 1e-15);
        assert_eq!(l.to_decimal(5), "1.61803");
    }

    #[test]
    fn signs_need_refinement() {
        let f = golden();
        let l = AlgebraicNumber::generator(&f);
        // 987/610 < λ < 1597/987 (consecutive Fibonacci ratios)
        let a = &l - &AlgebraicNumber::from_rational(&f, rat(1597, 987));
        let b = &l - &AlgebraicNumber::from_rational(&f, rat(987, 610));
        assert_eq!(a.signum(), -1);
        assert_eq!(b.signum(), 1);
        assert!(AlgebraicNumber::from_int(&f, 2) > l);
    }

    #[test]
    fn wrong_interval_is_rejected() {
        assert!(NumberField::new(QPoly::from_ints(&[-1, -1, 1]), Interval::new(rat(-2, 1), rat(2, 1))).is_err());
        assert!(NumberField::new(QPoly::from_ints(&[-1, -1, 1]), Interval::new(rat(2, 1), rat(3, 1))).is_err());
    }

    #[test]
    fn rational_field_behaves_like_q() {
        let q = NumberField::rational(rat(2, 1));
        let g = AlgebraicNumber::generator(&q);
        assert_eq!(g.to_rational(), Some(rat(2, 1)));
        assert_eq!(g.pow(-3).to_rational(), Some(rat(1, 8)));
    }

    #[test]
    fn nullspace_of_golden_eigenproblem() {
        let f = golden();
        let l = AlgebraicNumber::generator(&f);
        let one = AlgebraicNumber::one(&f);
        let zero = AlgebraicNumber::zero(&f);
        // A − λI for A = [[1,1],[1,0]]
        let rows = vec![vec![&one - &l, one.clone()], vec![one.clone(), &zero - &l]];
        let ns = nullspace(&rows, &f);
        assert_eq!(ns.len(), 1);
        // v ∝ (λ, 1)
        assert_eq!(ns[0][1], one);
        assert_eq!(ns[0][0], l);
    }
}
