//! Perron–Frobenius data in ℚ(θ), invariant measures as compatible weight
//! systems, and the Hilbert-metric certificate of unique ergodicity.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::field::{dot, nullspace, sum};
use crate::arith::{rat_to_f64, AlgebraicNumber, IntMatrix, NumberField, ZPoly};
use crate::complex::{kirchhoff_residual, CellComplex};
use crate::efs::Efs;
use crate::error::{Error, Result};
use crate::homology::homology_group;
use crate::ruleset::is_primitive;

/// The field generated by the spectral radius of a non-negative matrix.
#[derive(Clone, Debug)]
pub struct PerronRoot {
    pub field: Arc<NumberField>,
    pub theta: AlgebraicNumber,
    /// Irreducible factor of the characteristic polynomial vanishing at θ.
    pub min_poly: ZPoly,
    pub char_poly: ZPoly,
}

/// Locates the spectral radius: the largest real root of the characteristic
/// polynomial, carried by the irreducible factor that isolates it.
pub fn perron_root(a: &IntMatrix) -> Result<PerronRoot> {
    if !a.is_square() || a.rows() == 0 || !a.is_nonnegative() {
        return Err(Error::Algebra("expected a non-empty square non-negative matrix".into()));
    }
    let char_poly = a.char_poly();
    let roots = char_poly.to_qpoly().real_roots();
    let top = roots.last().cloned().ok_or_else(|| Error::Algebra("no real eigenvalue".into()))?;
    let factors = char_poly.factor_monic();
    let min_poly = factors
        .into_iter()
        .find(|f| {
            let q = f.to_qpoly();
            if top.lo == top.hi {
                q.eval(&top.lo).is_zero()
            } else {
                q.count_roots(&top.lo, &top.hi) > 0
            }
        })
        .expect("some factor vanishes at the spectral radius");
    let field = NumberField::new(min_poly.to_qpoly(), top)?;
    let theta = AlgebraicNumber::generator(&field);
    if !theta.is_positive() {
        return Err(Error::Algebra("spectral radius is zero".into()));
    }
    Ok(PerronRoot { field, theta, min_poly, char_poly })
}

fn shifted_rows(a: &IntMatrix, theta: &AlgebraicNumber) -> Vec<Vec<AlgebraicNumber>> {
    let f = theta.field();
    (0..a.rows())
        .map(|i| {
            (0..a.cols())
                .map(|j| {
                    let e = AlgebraicNumber::from_rational(f, BigRational::from_integer(a.get(i, j).clone()));
                    if i == j { &e - theta } else { e }
                })
                .collect()
        })
        .collect()
}

/// A θ-eigenvector of `a` with every entry > 0 and entries summing to one.
pub fn positive_eigenvector(a: &IntMatrix, theta: &AlgebraicNumber) -> Result<Vec<AlgebraicNumber>> {
    let ns = nullspace(&shifted_rows(a, theta), theta.field());
    if ns.len() != 1 {
        return Err(Error::Algebra(format!("θ-eigenspace has dimension {}, expected 1", ns.len())));
    }
    let v = &ns[0];
    let total = sum(v).expect("non-empty vector");
    let inv = total.inv().ok_or_else(|| Error::Algebra("eigenvector entries sum to zero".into()))?;
    let v: Vec<AlgebraicNumber> = v.iter().map(|x| x * &inv).collect();
    if v.iter().any(|x| !x.is_positive()) {
        return Err(Error::Algebra("eigenvector is not strictly positive".into()));
    }
    Ok(v)
}

#[derive(Clone, Debug)]
pub struct PerronData {
    pub root: PerronRoot,
    /// `A v = θ v`, entries summing to one.
    pub right: Vec<AlgebraicNumber>,
    /// `ℓ A = θ ℓ`, entries summing to one.
    pub left: Vec<AlgebraicNumber>,
    pub exponent: u32,
}

pub fn perron_data(a: &IntMatrix) -> Result<PerronData> {
    let exponent = is_primitive(a).ok_or_else(|| Error::NotPrimitive("matrix has no positive power".into()))?;
    let root = perron_root(a)?;
    let right = positive_eigenvector(a, &root.theta)?;
    let left = positive_eigenvector(&a.transpose(), &root.theta)?;
    Ok(PerronData { root, right, left, exponent })
}

/// Weights on the top cells of one level.
#[derive(Clone, Debug)]
pub struct WeightSystem {
    pub level: usize,
    pub weights: Vec<AlgebraicNumber>,
    pub nonnegative: bool,
    pub positive: bool,
}

impl WeightSystem {
    pub fn new(level: usize, weights: Vec<AlgebraicNumber>) -> Self {
        let nonnegative = weights.iter().all(|w| !w.is_negative());
        let positive = weights.iter().all(AlgebraicNumber::is_positive);
        Self { level, weights, nonnegative, positive }
    }
}

/// The unique invariant probability measure of a primitive sequence,
/// recorded by its level-0 weights; level `n` is `θ⁻ⁿ` times these.
#[derive(Clone, Debug)]
pub struct InvariantMeasure {
    pub field: Arc<NumberField>,
    pub theta: AlgebraicNumber,
    pub min_poly: ZPoly,
    pub labels: Vec<String>,
    pub volumes: Vec<AlgebraicNumber>,
    pub mu0: Vec<AlgebraicNumber>,
}

impl InvariantMeasure {
    /// μₙ = θ⁻ⁿ μ₀.
    pub fn level(&self, n: usize) -> Vec<AlgebraicNumber> {
        let s = self.theta.pow(-(n as i64));
        self.mu0.iter().map(|x| x * &s).collect()
    }

    /// Volumes of the level-`n` cells.
    pub fn level_volumes(&self, n: usize) -> Vec<AlgebraicNumber> {
        let s = self.theta.pow(n as i64);
        self.volumes.iter().map(|x| x * &s).collect()
    }

    /// Σᵢ μₙ,ᵢ · vol(Fₙ,ᵢ).
    pub fn mass(&self, n: usize) -> AlgebraicNumber {
        dot(&self.level(n), &self.level_volumes(n))
    }
}

/// μᵗ(C_{n,i}) for every cell at level `n`.
pub fn transverse_weights(m: &InvariantMeasure, n: usize) -> WeightSystem {
    WeightSystem::new(n, m.level(n))
}

#[derive(Clone, Debug)]
pub enum MeasureOutcome {
    Unique(InvariantMeasure),
    /// Non-primitive input: one non-negative θ-eigenvector per distinguished
    /// basic class, at most `bound` of them.
    Rays { theta: AlgebraicNumber, rays: Vec<Vec<AlgebraicNumber>>, bound: usize },
}

pub fn invariant_measure(efs: &Efs) -> Result<MeasureOutcome> {
    let a = efs.pushforward();
    if is_primitive(a).is_none() {
        let root = perron_root(a)?;
        let classes = distinguished_classes(a, &root)?;
        let bound = homology_group(efs.complex(), efs.complex().dimension()).rank;
        let mut rays = Vec::new();
        for class in &classes {
            if let Some(v) = class_ray(a, &root.theta, class) {
                rays.push(v);
            }
        }
        rays.truncate(bound.max(1));
        return Ok(MeasureOutcome::Rays { theta: root.theta, rays, bound });
    }
    let g = efs.geometry();
    let v = positive_eigenvector(a, &g.theta)?;
    let mass = dot(&v, &g.volumes);
    let inv = mass.inv().expect("positive mass");
    let mu0: Vec<AlgebraicNumber> = v.iter().map(|x| x * &inv).collect();
    Ok(MeasureOutcome::Unique(InvariantMeasure {
        field: g.field.clone(),
        theta: g.theta.clone(),
        min_poly: g.min_poly.clone(),
        labels: efs.labels().to_vec(),
        volumes: g.volumes.clone(),
        mu0,
    }))
}

/// Strongly connected components of the graph `j → i` whenever `A[i][j] > 0`,
/// in index order of their smallest member.
pub fn classes(a: &IntMatrix) -> Vec<Vec<usize>> {
    let n = a.rows();
    let reach: Vec<BTreeSet<usize>> = (0..n)
        .map(|s| {
            let mut seen = BTreeSet::from([s]);
            let mut stack = vec![s];
            while let Some(j) = stack.pop() {
                for i in 0..n {
                    if a.get(i, j).is_positive() && seen.insert(i) {
                        stack.push(i);
                    }
                }
            }
            seen
        })
        .collect();
    let mut done = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if done[s] {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&t| reach[s].contains(&t) && reach[t].contains(&s)).collect();
        for &t in &class {
            done[t] = true;
        }
        out.push(class);
    }
    out
}

fn sub_matrix(a: &IntMatrix, idx: &[usize]) -> IntMatrix {
    IntMatrix::from_big_rows(
        idx.iter().map(|&i| idx.iter().map(|&j| a.get(i, j).clone()).collect()).collect(),
        idx.len(),
    )
}

/// Classes whose own spectral radius is θ and which no other such class
/// reaches.
pub fn distinguished_classes(a: &IntMatrix, root: &PerronRoot) -> Result<Vec<Vec<usize>>> {
    let cls = classes(a);
    let basic: Vec<&Vec<usize>> = cls
        .iter()
        .filter(|c| {
            let sub = sub_matrix(a, c);
            let cp = sub.char_poly();
            cp.to_qpoly().rem(&root.min_poly.to_qpoly()).is_zero()
        })
        .collect();
    let reaches = |from: &[usize], to: &[usize]| {
        let mut seen: BTreeSet<usize> = from.iter().copied().collect();
        let mut stack: Vec<usize> = from.to_vec();
        while let Some(j) = stack.pop() {
            for i in 0..a.rows() {
                if a.get(i, j).is_positive() && seen.insert(i) {
                    stack.push(i);
                }
            }
        }
        to.iter().any(|t| seen.contains(t))
    };
    Ok(basic
        .iter()
        .filter(|c| !basic.iter().any(|o| o != *c && reaches(o, c)))
        .map(|c| (*c).clone())
        .collect())
}

fn class_ray(a: &IntMatrix, theta: &AlgebraicNumber, class: &[usize]) -> Option<Vec<AlgebraicNumber>> {
    let n = a.rows();
    let mut support: BTreeSet<usize> = class.iter().copied().collect();
    let mut stack = class.to_vec();
    while let Some(j) = stack.pop() {
        for i in 0..n {
            if a.get(i, j).is_positive() && support.insert(i) {
                stack.push(i);
            }
        }
    }
    let idx: Vec<usize> = support.into_iter().collect();
    let sub = sub_matrix(a, &idx);
    let ns = nullspace(&shifted_rows(&sub, theta), theta.field());
    let pos = idx.iter().position(|i| *i == class[0])?;
    let v = ns.into_iter().find(|v| !v[pos].is_zero())?;
    let s = if v[pos].is_negative() { AlgebraicNumber::from_int(theta.field(), -1) } else { AlgebraicNumber::one(theta.field()) };
    let mut out = vec![AlgebraicNumber::zero(theta.field()); n];
    for (k, &i) in idx.iter().enumerate() {
        out[i] = &v[k] * &s;
    }
    out.iter().all(|x| !x.is_negative()).then_some(out)
}

/// Hilbert projective distance between positive vectors, exponentiated:
/// `max(xᵢ/yᵢ) · max(yⱼ/xⱼ)`. Its logarithm is the distance.
pub fn hilbert_ratio(x: &[BigInt], y: &[BigInt]) -> BigRational {
    assert_eq!(x.len(), y.len());
    let mut up = None::<BigRational>;
    let mut down = None::<BigRational>;
    for (a, b) in x.iter().zip(y) {
        let r = BigRational::new(a.clone(), b.clone());
        let s = BigRational::new(b.clone(), a.clone());
        if up.as_ref().is_none_or(|u| r > *u) {
            up = Some(r);
        }
        if down.as_ref().is_none_or(|d| s > *d) {
            down = Some(s);
        }
    }
    up.unwrap_or_else(BigRational::one) * down.unwrap_or_else(BigRational::one)
}

/// Distance through the segment picture: with the boundary points of the
/// cone on the line through x and y at distances `l` before x and `r` after
/// y, and `m = |xy|`, the distance is `ln((m+l)(m+r) / (l·r))`.
pub fn hyp_segment(l: f64, m: f64, r: f64) -> f64 {
    ((m + l) * (m + r) / (l * r)).ln()
}

/// Exact cross-ratio `(m+l)(m+r)/(l·r)` for positive vectors, computed from
/// the points where the line through them leaves the positive orthant.
pub fn segment_ratio(x: &[BigRational], y: &[BigRational]) -> BigRational {
    let mut t_lo: Option<BigRational> = None;
    let mut t_hi: Option<BigRational> = None;
    for (a, b) in x.iter().zip(y) {
        let delta = b - a;
        if delta.is_positive() {
            let t = -(a / &delta);
            if t_lo.as_ref().is_none_or(|c| t > *c) {
                t_lo = Some(t);
            }
        } else if delta.is_negative() {
            let t = a / -&delta;
            if t_hi.as_ref().is_none_or(|c| t < *c) {
                t_hi = Some(t);
            }
        }
    }
    match (t_lo, t_hi) {
        (Some(lo), Some(hi)) => {
            // l = −lo·m, r = (hi − 1)·m.
            let one = BigRational::one();
            (&one - &lo) * &hi / (-lo * (hi - one))
        }
        _ => BigRational::one(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    UniquelyErgodic,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct ErgodicityCertificate {
    pub verdict: Verdict,
    /// Power of A★ used as the contracting map.
    pub exponent: Option<u32>,
    /// `exp(Dₙ)` for n = 1..=6 where Dₙ is the Hilbert diameter of the image
    /// of the positive cone under the n-th power of the contracting map.
    pub ratios: Vec<BigRational>,
    pub diameters: Vec<f64>,
    pub strictly_decreasing: bool,
    pub extremal_rays: usize,
    /// rank H_d, the cap on the number of ergodic measures.
    pub ray_bound: usize,
}

pub const CERTIFICATE_STEPS: usize = 6;

/// Hilbert diameters of `Pⁿ(cone)` for the positive power `P` of `a`.
pub fn hilbert_certificate(a: &IntMatrix, ray_bound: usize) -> Result<ErgodicityCertificate> {
    let Some(k) = is_primitive(a) else {
        let root = perron_root(a)?;
        let rays = distinguished_classes(a, &root)?.len();
        return Ok(ErgodicityCertificate {
            verdict: Verdict::Unknown,
            exponent: None,
            ratios: Vec::new(),
            diameters: Vec::new(),
            strictly_decreasing: false,
            extremal_rays: rays.min(ray_bound.max(1)),
            ray_bound,
        });
    };
    let p = a.pow(k);
    let mut power = p.clone();
    let mut ratios = Vec::new();
    for _ in 0..CERTIFICATE_STEPS {
        let cols: Vec<Vec<BigInt>> = (0..power.cols()).map(|j| power.column(j)).collect();
        let mut best = BigRational::one();
        for i in 0..cols.len() {
            for j in i + 1..cols.len() {
                let r = hilbert_ratio(&cols[i], &cols[j]);
                if r > best {
                    best = r;
                }
            }
        }
        ratios.push(best);
        power = power.mul(&p);
    }
    let one = BigRational::one();
    let strictly_decreasing = ratios.windows(2).all(|w| w[1] < w[0] || (w[0] == one && w[1] == one));
    let diameters = ratios.iter().map(|r| rat_to_f64(r).ln()).collect();
    Ok(ErgodicityCertificate {
        verdict: if strictly_decreasing { Verdict::UniquelyErgodic } else { Verdict::Unknown },
        exponent: Some(k),
        ratios,
        diameters,
        strictly_decreasing,
        extremal_rays: 1,
        ray_bound,
    })
}

pub fn unique_ergodicity(efs: &Efs) -> Result<ErgodicityCertificate> {
    let bound = homology_group(efs.complex(), efs.complex().dimension()).rank;
    hilbert_certificate(efs.pushforward(), bound)
}

/// Kirchhoff residual of a level's weights, all entries zero for a cycle.
pub fn residual_is_zero(x: &CellComplex, w: &[AlgebraicNumber]) -> Result<bool> {
    Ok(kirchhoff_residual(x, w, &x.side_data())?.iter().all(AlgebraicNumber::is_zero))
}
