//! Dense univariate polynomials over ℚ and ℤ.
//!
//! Coefficients are stored in ascending degree order with no trailing zeros,
//! so the zero polynomial is the empty vector.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{rat, Interval};

/// Polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c, 1)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let lead = self.leading();
        Self::new(self.coeffs.iter().map(|c| c / &lead).collect())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.leading().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Horner evaluation in interval arithmetic; the result encloses the range
    /// of the polynomial over `x`.
    pub fn eval_interval(&self, x: &Interval) -> Interval {
        let mut acc = Interval::point(BigRational::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add_scalar(c);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + super::rat_to_f64(c);
        }
        acc
    }

    /// The square-free part `p / gcd(p, p')`, made monic.
    pub fn squarefree(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Sturm sequence of a square-free polynomial.
    pub fn sturm_sequence(&self) -> Vec<QPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        seq
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_roots(&self, a: &BigRational, b: &BigRational) -> usize {
        let seq = self.squarefree().sturm_sequence();
        let va = sign_changes(&seq, a);
        let vb = sign_changes(&seq, b);
        va.saturating_sub(vb)
    }

    /// Cauchy bound: every complex root has modulus strictly below this.
    pub fn root_bound(&self) -> BigRational {
        let lead = self.leading().abs();
        let mut m = BigRational::zero();
        for c in &self.coeffs[..self.coeffs.len().saturating_sub(1)] {
            let r = c.abs() / &lead;
            if r > m {
                m = r;
            }
        }
        m + BigRational::one()
    }

    /// Isolating intervals for every distinct real root, in increasing order.
    /// Degenerate intervals `lo == hi` mark exact rational roots; otherwise the
    /// polynomial changes sign strictly between the endpoints.
    pub fn real_roots(&self) -> Vec<Interval> {
        let p = self.squarefree();
        if p.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let seq = p.sturm_sequence();
        let bound = p.root_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-bound.clone(), bound)];
        while let Some((a, b)) = stack.pop() {
            let n = sign_changes(&seq, &a) - sign_changes(&seq, &b);
            if n == 0 {
                continue;
            }
            if n == 1 {
                if p.eval(&b).is_zero() {
                    out.push(Interval::point(b));
                } else {
                    out.push(Interval::new(a, b));
                }
                continue;
            }
            let mid = (&a + &b) / rat(2, 1);
            stack.push((a, mid.clone()));
            stack.push((mid, b));
        }
        out.sort_by(|x, y| x.hi.cmp(&y.hi).then_with(|| x.lo.cmp(&y.lo)));
        out
    }

    /// Shrinks an isolating interval of a simple root until its width is at
    /// most `width`.
    pub fn refine_root(&self, iv: &Interval, width: &BigRational) -> Interval {
        let mut iv = iv.clone();
        if iv.lo == iv.hi {
            return iv;
        }
        let mut s_lo = self.eval(&iv.lo).signum();
        if s_lo.is_zero() {
            return Interval::point(iv.lo);
        }
        while iv.width() > *width {
            let mid = iv.midpoint();
            let s = self.eval(&mid).signum();
            if s.is_zero() {
                return Interval::point(mid);
            }
            if s == s_lo {
                iv.lo = mid;
                s_lo = s;
            } else {
                iv.hi = mid;
            }
        }
        iv
    }

    /// Primitive integer polynomial with the same roots and positive leading
    /// coefficient.
    pub fn to_primitive_integer(&self) -> ZPoly {
        if self.is_zero() {
            return ZPoly::zero();
        }
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let mut z = ZPoly::new(ints);
        z = z.primitive_part();
        if z.leading().is_negative() {
            z = z.neg();
        }
        z
    }
}

fn sign_changes(seq: &[QPoly], x: &BigRational) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = a.is_one();
            match i {
                0 => write!(f, "{a}")?,
                1 if unit => write!(f, "x")?,
                1 => write!(f, "{a}*x")?,
                _ if unit => write!(f, "x^{i}")?,
                _ => write!(f, "{a}*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ZPoly {
    coeffs: Vec<BigInt>,
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn primitive_part(&self) -> Self {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return self.clone();
        }
        Self::new(self.coeffs.iter().map(|x| x / &c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Exact quotient by a monic divisor, or `None` if it does not divide.
    pub fn div_exact_monic(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.degree()?;
        debug_assert!(divisor.is_monic());
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return if rem.is_empty() { Some(Self::zero()) } else { None };
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone();
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        if rem[..dd].iter().all(Zero::is_zero) {
            Some(Self::new(quot))
        } else {
            None
        }
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    fn reduce_mod(&self, m: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.mod_floor(m)).collect())
    }

    fn symmetric_mod(&self, m: &BigInt) -> Self {
        let half = m / 2;
        Self::new(
            self.coeffs
                .iter()
                .map(|c| {
                    let r = c.mod_floor(m);
                    if r > half {
                        r - m
                    } else {
                        r
                    }
                })
                .collect(),
        )
    }

    fn to_fp(&self, p: u64) -> FpPoly {
        let pb = BigInt::from(p);
        FpPoly::new(
            self.coeffs
                .iter()
                .map(|c| {
                    let r = c.mod_floor(&pb);
                    r.try_into().expect("residue fits in u64")
                })
                .collect(),
            p,
        )
    }

    fn from_fp(f: &FpPoly) -> Self {
        Self::new(f.c.iter().map(|&v| BigInt::from(v)).collect())
    }

    fn norm2_ceil(&self) -> BigInt {
        let sq: BigInt = self.coeffs.iter().map(|c| c * c).sum();
        sq.sqrt() + 1
    }

    /// Irreducible factors over ℚ of a monic integer polynomial, each monic,
    /// without multiplicity (factors of the square-free part), sorted by
    /// degree and then coefficients.
    pub fn factor_monic(&self) -> Vec<ZPoly> {
        assert!(self.is_monic(), "factor_monic expects a monic polynomial");
        let sf = self.to_qpoly().squarefree().to_primitive_integer();
        let mut out = Vec::new();
        // Pull out rational (hence integer) roots first; cheap and keeps the
        // Hensel stage small.
        let mut rest = sf;
        let mut x_factor = false;
        while rest.coeffs.first().is_some_and(Zero::is_zero) {
            rest = Self::new(rest.coeffs[1..].to_vec());
            x_factor = true;
        }
        if x_factor {
            out.push(Self::from_ints(&[0, 1]));
        }
        out.extend(factor_squarefree_monic(&rest));
        out.sort_by(|a, b| {
            a.degree()
                .cmp(&b.degree())
                .then_with(|| a.coeffs.cmp(&b.coeffs))
        });
        out
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_qpoly())
    }
}

/// Polynomial over the prime field F_p, p < 2^31.
#[derive(Clone, Debug, PartialEq, Eq)]
struct FpPoly {
    c: Vec<u64>,
    p: u64,
}

impl FpPoly {
    fn new(mut c: Vec<u64>, p: u64) -> Self {
        for v in &mut c {
            *v %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        Self { c, p }
    }

    fn constant(v: u64, p: u64) -> Self {
        Self::new(vec![v], p)
    }

    fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn inv(a: u64, p: u64) -> u64 {
        pow_mod(a, p - 2, p)
    }

    fn monic(&self) -> Self {
        match self.c.last() {
            None => self.clone(),
            Some(&l) => {
                let inv = Self::inv(l, self.p);
                Self::new(self.c.iter().map(|&v| v * inv % self.p).collect(), self.p)
            }
        }
    }

    fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&0) + o.c.get(i).unwrap_or(&0))
                .collect(),
            self.p,
        )
    }

    fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let p = self.p;
        Self::new(
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&0) + p - o.c.get(i).unwrap_or(&0))
                .collect(),
            p,
        )
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(Vec::new(), self.p);
        }
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % self.p;
            }
        }
        Self::new(out, self.p)
    }

    fn div_rem(&self, d: &Self) -> (Self, Self) {
        let p = self.p;
        let dd = d.degree().expect("division by zero polynomial mod p");
        let inv = Self::inv(*d.c.last().unwrap(), p);
        let mut rem = self.c.clone();
        if rem.len() <= dd {
            return (Self::new(Vec::new(), p), self.clone());
        }
        let mut q = vec![0u64; rem.len() - dd];
        for k in (0..q.len()).rev() {
            let c = rem[k + dd] * inv % p;
            if c != 0 {
                for (j, &dv) in d.c.iter().enumerate() {
                    rem[k + j] = (rem[k + j] + p - c * dv % p) % p;
                }
            }
            q[k] = c;
        }
        rem.truncate(dd);
        (Self::new(q, p), Self::new(rem, p))
    }

    fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*o = g`, g monic.
    fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::constant(1, p), Self::new(Vec::new(), p));
        let (mut t0, mut t1) = (Self::new(Vec::new(), p), Self::constant(1, p));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = Self::inv(*r0.c.last().unwrap(), p);
        let sc = Self::constant(inv, p);
        (r0.mul(&sc), s0.mul(&sc), t0.mul(&sc))
    }

    fn derivative(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &v)| (i as u64 % self.p) * v % self.p)
                .collect(),
            self.p,
        )
    }

    fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::constant(1, self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}

const SMALL_PRIMES: [u64; 24] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Berlekamp factorisation of a monic square-free polynomial over F_p.
fn berlekamp(f: &FpPoly) -> Vec<FpPoly> {
    let p = f.p;
    let n = f.degree().unwrap();
    if n <= 1 {
        return vec![f.clone()];
    }
    // Row i of Q holds x^(i p) mod f.
    let x = FpPoly::new(vec![0, 1], p);
    let xp = x.pow_mod(p, f);
    let mut rows = Vec::with_capacity(n);
    let mut cur = FpPoly::constant(1, p);
    for _ in 0..n {
        let mut row = cur.c.clone();
        row.resize(n, 0);
        rows.push(row);
        cur = cur.mul(&xp).rem(f);
    }
    // Solve v (Q - I) = 0, i.e. (Q - I)^T v = 0.
    let mut m: Vec<Vec<u64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let v = rows[i][j];
                    if i == j {
                        (v + p - 1) % p
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let basis = nullspace_mod_p(&mut m, p);
    let r = basis.len();
    if r == 1 {
        return vec![f.clone()];
    }
    let mut factors = vec![f.clone()];
    for v in &basis {
        if factors.len() == r {
            break;
        }
        let g = FpPoly::new(v.clone(), p);
        if g.degree().unwrap_or(0) == 0 {
            continue;
        }
        let mut next = Vec::new();
        for h in factors {
            if h.degree() == Some(1) {
                next.push(h);
                continue;
            }
            for s in 0..p {
                let d = h.gcd(&g.sub(&FpPoly::constant(s, p)));
                if d.degree().unwrap_or(0) >= 1 {
                    next.push(d);
                }
            }
        }
        factors = next;
    }
    factors
}

/// Right null space of `m` over F_p (row-reduced in place).
fn nullspace_mod_p(m: &mut [Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = FpPoly::inv(m[r][c], p);
        for v in m[r].iter_mut() {
            *v = *v * inv % p;
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = (m[i][j] + p - f * m[r][j] % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; cols];
            v[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[i][fc]) % p;
            }
            v
        })
        .collect()
}

/// Lifts `f ≡ u w (mod p)` to `f ≡ U W (mod p^e)` with U, W monic.
fn hensel_two(f: &ZPoly, u: &FpPoly, w: &FpPoly, p: u64, e: u32) -> (ZPoly, ZPoly) {
    let (_, s, t) = u.ext_gcd(w);
    let pb = BigInt::from(p);
    let mut big_u = ZPoly::from_fp(u);
    let mut big_w = ZPoly::from_fp(w);
    let mut pk = pb.clone();
    for _ in 1..e {
        let next = &pk * &pb;
        let prod = big_u.mul(&big_w);
        let n = f.coeffs.len().max(prod.coeffs.len());
        let diff: Vec<BigInt> = (0..n)
            .map(|i| {
                let a = f.coeffs.get(i).cloned().unwrap_or_default();
                let b = prod.coeffs.get(i).cloned().unwrap_or_default();
                (a - b).mod_floor(&next) / &pk
            })
            .collect();
        let ebar = ZPoly::new(diff).to_fp(p);
        let (q, r) = s.mul(&ebar).div_rem(w);
        let du = t.mul(&ebar).add(&q.mul(u));
        let lift = |base: &ZPoly, d: &FpPoly| {
            let n = base.coeffs.len().max(d.c.len());
            ZPoly::new(
                (0..n)
                    .map(|i| {
                        let a = base.coeffs.get(i).cloned().unwrap_or_default();
                        let b = BigInt::from(*d.c.get(i).unwrap_or(&0));
                        (a + &pk * b).mod_floor(&next)
                    })
                    .collect(),
            )
        };
        big_u = lift(&big_u, &du);
        big_w = lift(&big_w, &r);
        pk = next;
    }
    (big_u, big_w)
}

fn hensel_multi(f: &ZPoly, factors: &[FpPoly], p: u64, e: u32, modulus: &BigInt) -> Vec<ZPoly> {
    if factors.len() == 1 {
        return vec![f.reduce_mod(modulus)];
    }
    let k = factors.len() / 2;
    let prod = |fs: &[FpPoly]| {
        fs.iter()
            .fold(FpPoly::constant(1, p), |acc, g| acc.mul(g))
    };
    let u = prod(&factors[..k]);
    let w = prod(&factors[k..]);
    let (big_u, big_w) = hensel_two(f, &u, &w, p, e);
    let mut out = hensel_multi(&big_u, &factors[..k], p, e, modulus);
    out.extend(hensel_multi(&big_w, &factors[k..], p, e, modulus));
    out
}

fn factor_squarefree_monic(f: &ZPoly) -> Vec<ZPoly> {
    let Some(n) = f.degree() else {
        return Vec::new();
    };
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![f.clone()];
    }
    let p = SMALL_PRIMES
        .iter()
        .copied()
        .find(|&p| {
            let fp = f.to_fp(p);
            fp.degree() == Some(n) && fp.gcd(&fp.derivative()).degree() == Some(0)
        })
        .expect("a small prime keeps the polynomial square-free");
    let modular = berlekamp(&f.to_fp(p).monic());
    if modular.len() == 1 {
        return vec![f.clone()];
    }
    // Mignotte: every factor has coefficients bounded by 2^n ||f||_2.
    let bound = (BigInt::one() << n) * f.norm2_ceil();
    let target = bound * 2 + 1;
    let pb = BigInt::from(p);
    let mut e = 1u32;
    let mut modulus = pb.clone();
    while modulus <= target {
        modulus *= &pb;
        e += 1;
    }
    let lifted = hensel_multi(f, &modular, p, e, &modulus);
    recombine(f.clone(), lifted, &modulus)
}

fn recombine(mut f: ZPoly, mut pool: Vec<ZPoly>, modulus: &BigInt) -> Vec<ZPoly> {
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= pool.len() {
        let mut found = None;
        for subset in combinations(pool.len(), size) {
            let cand = subset
                .iter()
                .fold(ZPoly::from_ints(&[1]), |acc, &i| acc.mul(&pool[i]).reduce_mod(modulus))
                .symmetric_mod(modulus);
            let c0 = cand.coeffs.first().cloned().unwrap_or_default();
            let f0 = f.coeffs.first().cloned().unwrap_or_default();
            if !c0.is_zero() && !(&f0 % &c0).is_zero() {
                continue;
            }
            if let Some(q) = f.div_exact_monic(&cand) {
                found = Some((subset, cand, q));
                break;
            }
        }
        match found {
            Some((subset, cand, q)) => {
                out.push(cand);
                f = q;
                for &i in subset.iter().rev() {
                    pool.remove(i);
                }
            }
            None => size += 1,
        }
    }
    if f.degree().unwrap_or(0) > 0 {
        out.push(f);
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(c: &[i64]) -> ZPoly {
        ZPoly::from_ints(c)
    }

    fn product(fs: &[ZPoly]) -> ZPoly {
        fs.iter().fold(z(&[1]), |a, b| a.mul(b))
    }

    #[test]
    fn combinations_enumerates_all() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(5, 1).len(), 5);
    }

    #[test]
    fn golden_polynomial_is_irreducible() {
        let f = z(&[-1, -1, 1]);
        assert_eq!(f.factor_monic(), vec![f.clone()]);
    }

    #[test]
    fn fibonacci_square_char_poly_splits() {
        // (x^2 - x - 1)(x - 2)(x + 3)
        let parts = [z(&[-1, -1, 1]), z(&[-2, 1]), z(&[3, 1])];
        let f = product(&parts);
        let got = f.factor_monic();
        assert_eq!(got.len(), 3);
        assert_eq!(product(&got), f);
    }

    #[test]
    fn swinnerton_dyer_like_quartic_stays_whole() {
        // x^4 - 10x^2 + 1 is irreducible over Q but splits mod every prime.
        let f = z(&[1, 0, -10, 0, 1]);
        assert_eq!(f.factor_monic(), vec![f.clone()]);
    }

    #[test]
    fn repeated_and_zero_roots() {
        // x^2 (x-1)^3 (x^2+1)
        let f = product(&[z(&[0, 1]), z(&[0, 1]), z(&[-1, 1]), z(&[-1, 1]), z(&[-1, 1]), z(&[1, 0, 1])]);
        let got = f.factor_monic();
        assert_eq!(got, vec![z(&[-1, 1]), z(&[0, 1]), z(&[1, 0, 1])]);
    }

    #[test]
    fn cyclotomic_products() {
        // x^6 - 1 = (x-1)(x+1)(x^2+x+1)(x^2-x+1)
        let got = z(&[-1, 0, 0, 0, 0, 0, 1]).factor_monic();
        assert_eq!(got.len(), 4);
        assert_eq!(product(&got), z(&[-1, 0, 0, 0, 0, 0, 1]));
    }

    #[test]
    fn real_roots_of_golden_polynomial() {
        let f = QPoly::from_ints(&[-1, -1, 1]);
        let roots = f.real_roots();
        assert_eq!(roots.len(), 2);
        let top = f.refine_root(&roots[1], &rat(1, 1 << 20));
        assert!(top.lo >= rat(16, 10) && top.hi <= rat(17, 10));
    }

    #[test]
    fn rational_roots_are_exact() {
        let f = QPoly::from_ints(&[0, -1, 1]); // x(x-1)
        let roots = f.real_roots();
        assert_eq!(roots.len(), 2);
        for r in roots {
            let r = f.refine_root(&r, &rat(1, 1 << 30));
            assert!(f.eval_interval(&r).contains_zero());
        }
    }

    #[test]
    fn ext_gcd_identity() {
        let a = QPoly::from_ints(&[1, 2, 1]);
        let b = QPoly::from_ints(&[-1, -1, 1]);
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(g, QPoly::one());
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }
}
