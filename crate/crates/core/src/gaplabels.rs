//! The ℤ-module of cylinder weights, truncated by depth, with Hermite bases
//! and membership certificates.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::normal_form::{hermite_normal_form, Hnf};
use crate::arith::{parse_rational, AlgebraicNumber, IntMatrix, NumberField};
use crate::efs::{pair_raw, LimitElement};
use crate::error::{Error, Result};
use crate::measure::InvariantMeasure;

/// `μᵗ(C_{level,cell})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub level: usize,
    pub cell: usize,
    pub label: String,
    pub value: AlgebraicNumber,
}

/// Generators sorted by (level, cell).
pub fn gap_label_generators(m: &InvariantMeasure, k_max: usize) -> Vec<Generator> {
    let mut out = Vec::new();
    for k in 0..=k_max {
        for (i, value) in m.level(k).into_iter().enumerate() {
            out.push(Generator { level: k, cell: i, label: m.labels[i].clone(), value });
        }
    }
    out
}

/// A finitely generated subgroup of ℚ(θ), stored as `(1/denominator)·L` with
/// `L` an integer lattice in power-basis coordinates.
#[derive(Clone, Debug)]
pub struct Lattice {
    field: Arc<NumberField>,
    pub denominator: BigInt,
    /// Hermite basis rows of `L`.
    pub rows: Vec<Vec<BigInt>>,
    hnf: Hnf,
}

fn coords(x: &AlgebraicNumber, n: usize) -> Vec<BigRational> {
    let mut c = x.coeffs().to_vec();
    c.resize(n, BigRational::zero());
    c
}

/// Hermite basis of the ℤ-span of `gens` after clearing denominators.
pub fn module_basis(field: &Arc<NumberField>, gens: &[AlgebraicNumber]) -> Lattice {
    let n = field.degree();
    let mut den = BigInt::one();
    for g in gens {
        for c in coords(g, n) {
            den = den.lcm(c.denom());
        }
    }
    let rows: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|g| coords(g, n).iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect())
        .collect();
    let hnf = hermite_normal_form(&IntMatrix::from_big_rows(rows, n));
    let basis = (0..hnf.rank()).map(|i| hnf.h.row(i).to_vec()).collect();
    Lattice { field: field.clone(), denominator: den, rows: basis, hnf }
}

impl Lattice {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Basis elements as field elements.
    pub fn basis(&self) -> Vec<AlgebraicNumber> {
        self.rows
            .iter()
            .map(|r| {
                let c: Vec<BigRational> = r.iter().map(|x| BigRational::new(x.clone(), self.denominator.clone())).collect();
                AlgebraicNumber::from_poly(&self.field, &crate::arith::QPoly::new(c))
            })
            .collect()
    }

    /// Integer coefficients over the original generators summing to `x`.
    pub fn certificate(&self, x: &AlgebraicNumber) -> Option<Vec<BigInt>> {
        let den = BigRational::from_integer(self.denominator.clone());
        let mut y = Vec::with_capacity(self.field.degree());
        for c in coords(x, self.field.degree()) {
            let s = c * &den;
            if !s.is_integer() {
                return None;
            }
            y.push(s.to_integer());
        }
        if y.iter().all(Zero::is_zero) {
            return Some(vec![BigInt::zero(); self.hnf.transform.cols()]);
        }
        self.hnf.solve_generators(&y)
    }

    pub fn contains(&self, x: &AlgebraicNumber) -> bool {
        self.certificate(x).is_some()
    }

    pub fn is_subset_of(&self, other: &Lattice) -> bool {
        self.basis().iter().all(|b| other.contains(b))
    }

    pub fn scaled(&self, s: &AlgebraicNumber) -> Lattice {
        let gens: Vec<AlgebraicNumber> = self.basis().iter().map(|b| b * s).collect();
        module_basis(&self.field, &gens)
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let basis = self.basis();
        match basis.as_slice() {
            [] => write!(f, "0"),
            [b] if b.is_rational() => {
                let r = b.to_rational().unwrap();
                if r.is_one() {
                    write!(f, "Z")
                } else if r.numer().is_one() {
                    write!(f, "(1/{})Z", r.denom())
                } else {
                    write!(f, "({r})Z")
                }
            }
            _ => {
                let parts: Vec<String> = basis.iter().map(|b| format!("Z·({b})")).collect();
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

/// Generators up to a depth with the lattice of every truncation.
#[derive(Clone, Debug)]
pub struct FrequencyModule {
    pub field: Arc<NumberField>,
    pub theta: AlgebraicNumber,
    pub depth: usize,
    pub generators: Vec<Generator>,
    /// `truncations[k]` is spanned by the generators of levels `0..=k`.
    pub truncations: Vec<Lattice>,
    /// The same for the coarser cylinders of uncollared supertiles, whose
    /// weights sum the collared ones over each core.
    pub letter_truncations: Vec<Lattice>,
}

/// Weights of level-`k` uncollared cylinders.
pub fn letter_weights(m: &InvariantMeasure, forget: &[usize], k: usize) -> Vec<AlgebraicNumber> {
    let letters = forget.iter().max().map_or(0, |&x| x + 1);
    let mut out = vec![AlgebraicNumber::zero(&m.field); letters];
    for (c, w) in m.level(k).iter().enumerate() {
        out[forget[c]] = &out[forget[c]] + w;
    }
    out
}

impl FrequencyModule {
    /// `forget` sends each cell of the measure to its uncollared tile.
    pub fn new(m: &InvariantMeasure, forget: &[usize], depth: usize) -> Self {
        let generators = gap_label_generators(m, depth);
        let per_level = m.labels.len();
        let truncations = (0..=depth)
            .map(|k| {
                let vals: Vec<AlgebraicNumber> = generators[..(k + 1) * per_level].iter().map(|g| g.value.clone()).collect();
                module_basis(&m.field, &vals)
            })
            .collect();
        let mut letters = Vec::new();
        let letter_truncations = (0..=depth)
            .map(|k| {
                letters.extend(letter_weights(m, forget, k));
                module_basis(&m.field, &letters)
            })
            .collect();
        Self { field: m.field.clone(), theta: m.theta.clone(), depth, generators, truncations, letter_truncations }
    }

    pub fn lattice(&self, k: usize) -> &Lattice {
        &self.truncations[k.min(self.depth)]
    }

    /// θ · span(depth) = span(depth − 1).
    pub fn stabilized(&self) -> bool {
        self.depth >= 1 && self.truncations[self.depth].scaled(&self.theta) == self.truncations[self.depth - 1]
    }
}

/// A membership answer with its witness: integer coefficients on the
/// generators of levels `0..=depth` (same order as the generator list).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub depth: usize,
    pub coefficients: Option<Vec<BigInt>>,
}

impl Membership {
    pub fn member(&self) -> bool {
        self.coefficients.is_some()
    }
}

/// Exact membership of `x` in the depth-`k_max` truncation. A negative
/// answer only speaks for this depth.
pub fn contains(module: &FrequencyModule, x: &AlgebraicNumber, k_max: usize) -> Result<Membership> {
    if k_max > module.depth {
        return Err(Error::DimensionMismatch(format!("module computed to depth {}, asked for {k_max}", module.depth)));
    }
    Ok(Membership { depth: k_max, coefficients: module.lattice(k_max).certificate(x) })
}

/// `⟨μ_level | v⟩` for a top cohomology class representative.
pub fn pair_cocycle(m: &InvariantMeasure, e: &LimitElement) -> Result<AlgebraicNumber> {
    if e.vector.len() != m.labels.len() {
        return Err(Error::DimensionMismatch("class vector length".into()));
    }
    Ok(pair_raw(&m.level(e.level), &e.vector))
}

/// Parses a polynomial in the field generator with rational coefficients:
/// numbers (`3`, `1/3`, `0.25`), the generator (`lambda`, `λ`, `l`,
/// `theta`, `θ`), `+ - * /`, `^` with an integer exponent, parentheses.
pub fn parse_expression(s: &str, field: &Arc<NumberField>) -> Result<AlgebraicNumber> {
    let tokens = tokenize(s)?;
    let mut p = Parser { tokens, pos: 0, field };
    let v = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Expression(format!("unexpected {:?}", p.tokens[p.pos])));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(String),
    Gen,
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(Token::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_alphabetic() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            match word.as_str() {
                "lambda" | "λ" | "l" | "theta" | "θ" => out.push(Token::Gen),
                _ => return Err(Error::Expression(format!("unknown symbol {word:?}"))),
            }
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Expression(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    field: &'a Arc<NumberField>,
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<AlgebraicNumber> {
        let mut acc = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<AlgebraicNumber> {
        let mut acc = self.unary()?;
        loop {
            match self.peek_op() {
                Some('*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some('/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    let inv = d.inv().ok_or_else(|| Error::Expression("division by zero".into()))?;
                    acc = &acc * &inv;
                }
                // Implicit product such as `3λ` or `2(1 + λ)`.
                None if matches!(self.tokens.get(self.pos), Some(Token::Gen)) => acc = &acc * &self.unary()?,
                Some('(') => acc = &acc * &self.unary()?,
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<AlgebraicNumber> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<AlgebraicNumber> {
        let base = self.atom()?;
        if self.peek_op() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek_op() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let e: i64 = match self.tokens.get(self.pos) {
            Some(Token::Num(s)) => s.parse().map_err(|_| Error::Expression(format!("bad exponent {s:?}")))?,
            other => return Err(Error::Expression(format!("expected an exponent, found {other:?}"))),
        };
        self.pos += 1;
        if base.is_zero() && neg {
            return Err(Error::Expression("division by zero".into()));
        }
        Ok(base.pow(if neg { -e } else { e }))
    }

    fn atom(&mut self) -> Result<AlgebraicNumber> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Token::Num(s)) => {
                let r = parse_rational(&s).ok_or_else(|| Error::Expression(format!("bad number {s:?}")))?;
                Ok(AlgebraicNumber::from_rational(self.field, r))
            }
            Some(Token::Gen) => Ok(AlgebraicNumber::generator(self.field)),
            Some(Token::Op('(')) => {
                let v = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Expression("missing ')'".into()));
                }
                self.pos += 1;
                Ok(v)
            }
            other => Err(Error::Expression(format!("unexpected {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat, QPoly};
    use crate::arith::Interval;

    fn q() -> Arc<NumberField> {
        NumberField::rational(int(1))
    }

    fn golden() -> Arc<NumberField> {
        NumberField::new(QPoly::from_ints(&[-1, -1, 1]), Interval::new(rat(3, 2), int(2))).unwrap()
    }

    fn r(f: &Arc<NumberField>, n: i64, d: i64) -> AlgebraicNumber {
        AlgebraicNumber::from_rational(f, rat(n, d))
    }

    #[test]
    fn dyadic_chain() {
        let f = q();
        let l = module_basis(&f, &[r(&f, 1, 1), r(&f, 1, 2), r(&f, 1, 4)]);
        assert_eq!(l.rank(), 1);
        assert_eq!(l.basis(), vec![r(&f, 1, 4)]);
        assert_eq!(l.to_string(), "(1/4)Z");
        assert!(l.contains(&r(&f, 3, 4)));
        assert!(!l.contains(&r(&f, 1, 8)));
        let l = module_basis(&f, &[r(&f, 2, 3), r(&f, 1, 3)]);
        assert_eq!(l.basis(), vec![r(&f, 1, 3)]);
    }

    #[test]
    fn golden_lattice_certificates() {
        let f = golden();
        let lam = AlgebraicNumber::generator(&f);
        let gens = vec![lam.pow(-1), lam.pow(-2), lam.pow(-3)];
        let l = module_basis(&f, &gens);
        assert_eq!(l.rank(), 2);
        let x = &AlgebraicNumber::from_int(&f, 3) - &lam;
        let c = l.certificate(&x).unwrap();
        let back = gens.iter().zip(&c).fold(AlgebraicNumber::zero(&f), |acc, (g, k)| &acc + &g.scale(&BigRational::from_integer(k.clone())));
        assert_eq!(back, x);
        assert!(!l.contains(&lam.scale(&rat(1, 2))));
    }

    #[test]
    fn expressions() {
        let f = golden();
        let lam = AlgebraicNumber::generator(&f);
        assert_eq!(parse_expression("3 - λ", &f).unwrap(), &AlgebraicNumber::from_int(&f, 3) - &lam);
        assert_eq!(parse_expression("lambda^2 - lambda", &f).unwrap(), AlgebraicNumber::one(&f));
        assert_eq!(parse_expression("1/l", &f).unwrap(), &lam - &AlgebraicNumber::one(&f));
        assert_eq!(parse_expression("2(1+l)^-1", &f).unwrap(), lam.pow(-2).scale(&int(2)));
        assert_eq!(parse_expression("-0.5*theta", &f).unwrap(), lam.scale(&rat(-1, 2)));
        assert!(matches!(parse_expression("x+1", &f), Err(Error::Expression(_))));
        assert!(matches!(parse_expression("(1", &f), Err(Error::Expression(_))));
        assert!(matches!(parse_expression("1/(l-l)", &f), Err(Error::Expression(_))));
        let f = q();
        assert_eq!(parse_expression("1/3", &f).unwrap(), r(&f, 1, 3));
    }
}
