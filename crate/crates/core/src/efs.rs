//! The stationary expanding flattening sequence of a collared rule: one
//! complex, one cellular self-map, the induced maps on top chains and
//! cochains, the direct limit of top cohomology and truncated hull points.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::field::dot;
use crate::arith::normal_form::{hermite_normal_form, Hnf};
use crate::arith::{AlgebraicNumber, IntMatrix, NumberField, ZPoly};
use crate::collar::Tower;
use crate::complex::CellComplex;
use crate::error::{Error, Result};
use crate::homology::cycle_space_basis;
use crate::measure::{perron_data, perron_root, residual_is_zero, InvariantMeasure, WeightSystem};
use crate::ruleset::{abelianization, is_primitive, SubstitutionRule};

/// Exact sizes of the cells of level 0 and how they scale with the level.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub field: Arc<NumberField>,
    /// Volume scale between consecutive levels.
    pub theta: AlgebraicNumber,
    pub min_poly: ZPoly,
    /// Per-axis length scale between consecutive levels; empty when the
    /// sequence carries no tile shapes.
    pub scale: Vec<AlgebraicNumber>,
    /// Level-0 side lengths, per top cell and axis.
    pub extents: Vec<Vec<AlgebraicNumber>>,
    pub volumes: Vec<AlgebraicNumber>,
}

#[derive(Clone, Debug)]
pub struct Efs {
    complex: CellComplex,
    labels: Vec<String>,
    rule: Option<SubstitutionRule>,
    forget: Vec<usize>,
    pushforward: IntMatrix,
    pullback: IntMatrix,
    geometry: Geometry,
}

/// Assembles the sequence from a flat collaring.
pub fn build_efs(tower: &Tower) -> Result<Efs> {
    if !tower.flattening.flat {
        let w = tower.flattening.witness.as_ref();
        return Err(Error::Flattening(w.map_or_else(String::new, |w| format!("branch cell {}", w.cell))));
    }
    let rule = tower.rule().clone();
    let a = abelianization(&rule);
    if is_primitive(&a).is_none() {
        return Err(Error::NotPrimitive("collared substitution matrix".into()));
    }
    let base = perron_data(&abelianization(&tower.base))?;
    let theta = base.root.theta.clone();
    let field = base.root.field.clone();
    if (&theta - &AlgebraicNumber::one(&field)).signum() <= 0 {
        return Err(Error::Algebra("substitution does not expand (spectral radius 1)".into()));
    }
    let forget = tower.forget();
    let d = rule.dimension();
    let (scale, extents) = match rule.expansion() {
        None => {
            // Natural lengths: left eigenvector, scaled to unit mean tile
            // length under the tile frequencies.
            let mean = dot(&base.right, &base.left);
            let inv = mean.inv().expect("positive");
            let lengths: Vec<AlgebraicNumber> = base.left.iter().map(|x| x * &inv).collect();
            (vec![theta.clone()], forget.iter().map(|&b| vec![lengths[b].clone()]).collect::<Vec<_>>())
        }
        Some(k) => {
            let scale: Vec<AlgebraicNumber> = k.iter().map(|&k| AlgebraicNumber::from_int(&field, k as i64)).collect();
            let prod = scale.iter().fold(AlgebraicNumber::one(&field), |acc, s| &acc * s);
            if prod != theta {
                return Err(Error::Algebra("block volume differs from the spectral radius".into()));
            }
            (scale, vec![vec![AlgebraicNumber::one(&field); d]; rule.len()])
        }
    };
    let volumes: Vec<AlgebraicNumber> =
        extents.iter().map(|e| e.iter().fold(AlgebraicNumber::one(&field), |acc, x| &acc * x)).collect();
    let geometry = Geometry { field, theta, min_poly: base.root.min_poly.clone(), scale, extents, volumes };
    Efs::assemble(tower.complex.clone(), Some(rule), forget, a, geometry)
}

impl Efs {
    fn assemble(
        complex: CellComplex,
        rule: Option<SubstitutionRule>,
        forget: Vec<usize>,
        pushforward: IntMatrix,
        geometry: Geometry,
    ) -> Result<Self> {
        let d = complex.dimension();
        let n = complex.cells(d).len();
        if pushforward.rows() != n || pushforward.cols() != n {
            return Err(Error::DimensionMismatch("pushforward does not act on top chains".into()));
        }
        // Volume bookkeeping: Σᵢ A★ᵢⱼ vol(Fᵢ) = θ vol(Fⱼ).
        for j in 0..n {
            let mut acc = AlgebraicNumber::zero(&geometry.field);
            for i in 0..n {
                let c = BigRational::from_integer(pushforward.get(i, j).clone());
                acc = &acc + &geometry.volumes[i].scale(&c);
            }
            if acc != &geometry.theta * &geometry.volumes[j] {
                return Err(Error::Algebra(format!("inflation of cell {j} does not scale volume by θ")));
            }
        }
        let boundary = complex.boundary_matrix(d)?;
        for z in cycle_space_basis(&complex) {
            let image = pushforward.mul_vec(&z);
            if boundary.mul_vec(&image).iter().any(|x| !x.is_zero()) {
                return Err(Error::Algebra("pushforward does not preserve top cycles".into()));
            }
        }
        let labels = complex.top_labels().to_vec();
        let pullback = pushforward.transpose();
        Ok(Self { complex, labels, rule, forget, pushforward, pullback, geometry })
    }

    /// A stationary sequence from an explicit complex and self-map, with
    /// cell volumes taken from the complex and θ the spectral radius.
    pub fn stationary(complex: CellComplex, pushforward: IntMatrix) -> Result<Self> {
        let root = perron_root(&pushforward)?;
        let field = root.field.clone();
        let volumes: Vec<AlgebraicNumber> =
            complex.volumes().iter().map(|v| AlgebraicNumber::from_rational(&field, v.clone())).collect();
        let extents = if complex.dimension() == 1 { volumes.iter().map(|v| vec![v.clone()]).collect() } else { Vec::new() };
        let scale = if complex.dimension() == 1 { vec![root.theta.clone()] } else { Vec::new() };
        let n = volumes.len();
        let geometry = Geometry { field, theta: root.theta, min_poly: root.min_poly, scale, extents, volumes };
        Self::assemble(complex, None, (0..n).collect(), pushforward, geometry)
    }

    pub fn complex(&self) -> &CellComplex {
        &self.complex
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rule(&self) -> Option<&SubstitutionRule> {
        self.rule.as_ref()
    }

    /// Collared cell to base prototile.
    pub fn forget(&self) -> &[usize] {
        &self.forget
    }

    /// A★: entry (i, j) counts copies of cell i in the inflation of cell j.
    pub fn pushforward(&self) -> &IntMatrix {
        &self.pushforward
    }

    /// A* = A★ᵀ on top cochains.
    pub fn pullback(&self) -> &IntMatrix {
        &self.pullback
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn dimension(&self) -> usize {
        self.complex.dimension()
    }

    /// Side length of cell `t` along `axis` at level `n`.
    pub fn extent(&self, t: usize, axis: usize, n: usize) -> AlgebraicNumber {
        &self.geometry.extents[t][axis] * &self.geometry.scale[axis].pow(n as i64)
    }

    /// Smallest side of any level-`n` cell: every level-`n` cell, with its
    /// collar, determines the patch within this distance of itself.
    pub fn forced_radius(&self, n: usize) -> AlgebraicNumber {
        let mut best: Option<AlgebraicNumber> = None;
        for t in 0..self.geometry.extents.len() {
            for a in 0..self.geometry.scale.len() {
                let e = self.extent(t, a, n);
                if best.as_ref().is_none_or(|b| e < *b) {
                    best = Some(e);
                }
            }
        }
        best.unwrap_or_else(|| AlgebraicNumber::zero(&self.geometry.field))
    }

    /// Pushes level-(n+1) weights down to level n.
    pub fn push_weights(&self, w: &WeightSystem) -> Result<WeightSystem> {
        if w.level == 0 {
            return Err(Error::DimensionMismatch("level-0 weights have no image".into()));
        }
        Ok(WeightSystem::new(w.level - 1, mat_vec_alg(&self.pushforward, &w.weights)))
    }

    /// Pulls a level-n cochain back to level n+1.
    pub fn pull_cochain(&self, c: &Cochain) -> Cochain {
        Cochain { level: c.level + 1, values: self.pullback.mul_vec(&c.values) }
    }

    pub fn coboundary(&self, b: &[BigInt], level: usize) -> Result<Cochain> {
        let d = self.dimension();
        let delta = self.complex.coboundary_matrix(d - 1)?;
        if b.len() != delta.cols() {
            return Err(Error::DimensionMismatch("cochain length".into()));
        }
        Ok(Cochain { level, values: delta.mul_vec(b) })
    }
}

pub(crate) fn mat_vec_alg(m: &IntMatrix, v: &[AlgebraicNumber]) -> Vec<AlgebraicNumber> {
    let f = v[0].field().clone();
    (0..m.rows())
        .map(|i| {
            let mut acc = AlgebraicNumber::zero(&f);
            for (j, x) in v.iter().enumerate() {
                let c = m.get(i, j);
                if !c.is_zero() {
                    acc = &acc + &x.scale(&BigRational::from_integer(c.clone()));
                }
            }
            acc
        })
        .collect()
}

/// Integer top cochain at a level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub level: usize,
    pub values: Vec<BigInt>,
}

/// ⟨w | c⟩ = Σᵢ cᵢ wᵢ for a top cycle `w` and cochain `c` of the same level.
pub fn pairing(efs: &Efs, w: &WeightSystem, c: &Cochain) -> Result<AlgebraicNumber> {
    if w.level != c.level {
        return Err(Error::DimensionMismatch(format!("weights at level {}, cochain at level {}", w.level, c.level)));
    }
    let n = efs.complex().cells(efs.dimension()).len();
    if w.weights.len() != n || c.values.len() != n {
        return Err(Error::DimensionMismatch("vector lengths differ from the top cell count".into()));
    }
    if !residual_is_zero(efs.complex(), &w.weights)? {
        return Err(Error::Algebra("weights do not satisfy the switching rules".into()));
    }
    Ok(pair_raw(&w.weights, &c.values))
}

pub(crate) fn pair_raw(w: &[AlgebraicNumber], c: &[BigInt]) -> AlgebraicNumber {
    let f = w[0].field().clone();
    w.iter().zip(c).fold(AlgebraicNumber::zero(&f), |acc, (x, k)| &acc + &x.scale(&BigRational::from_integer(k.clone())))
}

/// `lim (ℤᵖ, A*)` modulo coboundaries: the top cohomology of the hull.
#[derive(Clone, Debug)]
pub struct DirectLimit {
    pullback: IntMatrix,
    coboundaries: Hnf,
    cells: usize,
}

/// `(level, v)`, identified with `(level + 1, A* v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitElement {
    pub level: usize,
    pub vector: Vec<BigInt>,
}

impl DirectLimit {
    pub fn new(efs: &Efs) -> Self {
        let d = efs.dimension();
        let boundary = efs.complex().boundary_matrix(d).expect("top boundary exists");
        Self {
            pullback: efs.pullback().clone(),
            coboundaries: hermite_normal_form(boundary),
            cells: efs.pullback().rows(),
        }
    }

    pub fn element(&self, level: usize, vector: Vec<BigInt>) -> Result<LimitElement> {
        if vector.len() != self.cells {
            return Err(Error::DimensionMismatch(format!("expected {} entries", self.cells)));
        }
        Ok(LimitElement { level, vector })
    }

    /// Representative of `e` at a deeper level.
    pub fn push_to(&self, e: &LimitElement, level: usize) -> LimitElement {
        assert!(level >= e.level);
        let mut v = e.vector.clone();
        for _ in e.level..level {
            v = self.pullback.mul_vec(&v);
        }
        LimitElement { level, vector: v }
    }

    /// Coboundary test at a single level.
    pub fn is_coboundary(&self, v: &[BigInt]) -> bool {
        v.iter().all(Zero::is_zero) || self.coboundaries.solve(v).is_some()
    }

    /// Whether the two classes agree after pushing both to a common level and
    /// at most `cells + 4` further levels.
    pub fn equals(&self, a: &LimitElement, b: &LimitElement) -> bool {
        let m = a.level.max(b.level);
        let (pa, pb) = (self.push_to(a, m), self.push_to(b, m));
        let mut diff: Vec<BigInt> = pa.vector.iter().zip(&pb.vector).map(|(x, y)| x - y).collect();
        for _ in 0..=self.cells + 4 {
            if self.is_coboundary(&diff) {
                return true;
            }
            diff = self.pullback.mul_vec(&diff);
        }
        false
    }

    /// ⟨μ_level | v⟩, the same for every representative.
    pub fn pair_with_measure(&self, e: &LimitElement, m: &InvariantMeasure) -> AlgebraicNumber {
        pair_raw(&m.level(e.level), &e.vector)
    }
}

/// A point of the hull known through levels `0..=depth`: at each level a
/// cell and a position in it (lower corner = 0), each projecting onto the
/// one below.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullPoint {
    pub cells: Vec<usize>,
    pub coords: Vec<Vec<AlgebraicNumber>>,
}

impl HullPoint {
    pub fn depth(&self) -> usize {
        self.cells.len() - 1
    }
}

impl Efs {
    fn require_shapes(&self) -> Result<&SubstitutionRule> {
        match (&self.rule, self.geometry.scale.is_empty()) {
            (Some(r), false) => Ok(r),
            _ => Err(Error::DimensionMismatch("this sequence carries no tile geometry".into())),
        }
    }

    fn inside(&self, t: usize, level: usize, y: &[AlgebraicNumber]) -> bool {
        y.iter().enumerate().all(|(a, x)| !x.is_negative() && *x < self.extent(t, a, level))
    }

    /// Which sub-cell of level-(n+1) cell `j` contains the position `y`.
    fn project(&self, rule: &SubstitutionRule, j: usize, n: usize, y: &[AlgebraicNumber]) -> (usize, Vec<AlgebraicNumber>) {
        let img = rule.image(j);
        let f = &self.geometry.field;
        match rule.expansion() {
            None => {
                let mut acc = AlgebraicNumber::zero(f);
                for &t in img.cells() {
                    let next = &acc + &self.extent(t, 0, n);
                    if y[0] < next {
                        return (t, vec![&y[0] - &acc]);
                    }
                    acc = next;
                }
                unreachable!("position lies inside the cell")
            }
            Some(k) => {
                let mut pos = vec![0usize; k.len()];
                let mut local = Vec::with_capacity(k.len());
                for a in 0..k.len() {
                    let side = self.geometry.scale[a].pow(n as i64);
                    let mut acc = AlgebraicNumber::zero(f);
                    let mut p = 0;
                    while p + 1 < k[a] && y[a] >= &acc + &side {
                        acc = &acc + &side;
                        p += 1;
                    }
                    pos[a] = p;
                    local.push(&y[a] - &acc);
                }
                (img.get(&pos), local)
            }
        }
    }

    fn descend(&self, rule: &SubstitutionRule, cell: usize, y: Vec<AlgebraicNumber>, depth: usize) -> HullPoint {
        let mut cells = vec![0; depth + 1];
        let mut coords = vec![Vec::new(); depth + 1];
        cells[depth] = cell;
        coords[depth] = y;
        for n in (0..depth).rev() {
            let (t, z) = self.project(rule, cells[n + 1], n, &coords[n + 1]);
            cells[n] = t;
            coords[n] = z;
        }
        HullPoint { cells, coords }
    }

    /// The truncated point with the given deepest datum.
    pub fn hull_point(&self, depth: usize, cell: usize, coords: Vec<AlgebraicNumber>) -> Result<HullPoint> {
        let rule = self.require_shapes()?;
        if cell >= rule.len() || coords.len() != self.dimension() {
            return Err(Error::DimensionMismatch("cell or coordinate count".into()));
        }
        if !self.inside(cell, depth, &coords) {
            return Err(Error::DimensionMismatch("position outside the cell".into()));
        }
        Ok(self.descend(rule, cell, coords, depth))
    }

    /// Every level's datum is the projection of the one above.
    pub fn is_consistent(&self, x: &HullPoint) -> bool {
        let Ok(rule) = self.require_shapes() else { return false };
        let d = x.depth();
        self.inside(x.cells[d], d, &x.coords[d])
            && (0..d).all(|n| self.project(rule, x.cells[n + 1], n, &x.coords[n + 1]) == (x.cells[n], x.coords[n].clone()))
    }

    /// Translates by `v`. The move happens inside the deepest cell, which is
    /// a box; when the end point stays in it, every lower level follows by
    /// projection and no crossing at any level is ambiguous. Otherwise the
    /// datum needed to cross lives above the truncation.
    pub fn translate_point(&self, x: &HullPoint, v: &[BigRational]) -> Result<HullPoint> {
        let rule = self.require_shapes()?;
        if v.len() != self.dimension() {
            return Err(Error::DimensionMismatch("translation vector".into()));
        }
        let depth = x.depth();
        let top = x.cells[depth];
        let y: Vec<AlgebraicNumber> = x.coords[depth].iter().zip(v).map(|(c, s)| c + &AlgebraicNumber::from_rational(&self.geometry.field, s.clone())).collect();
        if !self.inside(top, depth, &y) {
            return Err(Error::Ambiguity { depth });
        }
        Ok(self.descend(rule, top, y, depth))
    }

    /// Half the smallest in-radius among level-0 cells.
    pub fn step_cap(&self) -> AlgebraicNumber {
        self.forced_radius(0).scale(&BigRational::new(BigInt::one(), BigInt::from(4)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::collar::border_forcing;
    use crate::measure::{invariant_measure, MeasureOutcome};
    use crate::ruleset::{parse_rule, DEFAULT_BUDGET};

    fn fib() -> Efs {
        let r = parse_rule(r#"{"dimension":1,"tiles":[{"label":"a"},{"label":"b"}],"images":{"a":"ab","b":"a"}}"#).unwrap();
        build_efs(&border_forcing(&r, DEFAULT_BUDGET).unwrap()).unwrap()
    }

    #[test]
    fn fibonacci_sequence_is_primitive() {
        let e = fib();
        assert_eq!(e.pushforward().rows(), 4);
        assert!(is_primitive(e.pushforward()).is_some());
        let mut prev = e.forced_radius(0);
        for n in 1..=4 {
            let r = e.forced_radius(n);
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn solenoid_sequence() {
        let r = parse_rule(r#"{"dimension":1,"tiles":[{"label":"a"}],"images":{"a":"aa"}}"#).unwrap();
        let e = build_efs(&border_forcing(&r, DEFAULT_BUDGET).unwrap()).unwrap();
        assert_eq!(e.pushforward(), &IntMatrix::from_rows(&[vec![2]]));
        assert_eq!(e.geometry().theta.to_rational(), Some(int(2)));
    }

    #[test]
    fn direct_limit_relation() {
        let e = fib();
        let dl = DirectLimit::new(&e);
        let v: Vec<BigInt> = [1, -2, 0, 3].iter().map(|&x| BigInt::from(x)).collect();
        let a = dl.element(0, v.clone()).unwrap();
        let b = dl.element(1, e.pullback().mul_vec(&v)).unwrap();
        assert!(dl.equals(&a, &b));
        let MeasureOutcome::Unique(m) = invariant_measure(&e).unwrap() else { panic!() };
        assert_eq!(dl.pair_with_measure(&a, &m), dl.pair_with_measure(&b, &m));
        let c = dl.element(0, vec![BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::zero()]).unwrap();
        assert!(!dl.equals(&a, &c) || dl.pair_with_measure(&a, &m) == dl.pair_with_measure(&c, &m));
    }

    #[test]
    fn translation_within_the_deepest_cell() {
        let e = fib();
        let f = e.geometry().field.clone();
        let x = e.hull_point(2, 0, vec![AlgebraicNumber::from_rational(&f, rat(1, 10))]).unwrap();
        assert!(e.is_consistent(&x));
        assert_eq!(e.translate_point(&x, &[int(0)]).unwrap(), x);
        let far = e.translate_point(&x, &[int(100)]);
        assert!(matches!(far, Err(Error::Ambiguity { depth: 2 })));
    }

    #[test]
    fn crossing_a_branch_vertex_follows_the_level_one_cell() {
        let e = fib();
        let rule = e.rule().unwrap().clone();
        let f = e.geometry().field.clone();
        // Level-1 cell whose inflation has two tiles: the vertex between them
        // is a branch point at level 0, resolved by the level-1 datum.
        let j = (0..rule.len()).find(|&j| rule.image(j).len() == 2).unwrap();
        let first = rule.image(j).cells()[0];
        let second = rule.image(j).cells()[1];
        let len0 = e.extent(first, 0, 0);
        let eps = AlgebraicNumber::from_rational(&f, rat(1, 100));
        let x = e.hull_point(1, j, vec![&len0 - &eps]).unwrap();
        assert_eq!(x.cells[0], first);
        let y = e.translate_point(&x, &[rat(1, 50)]).unwrap();
        assert_eq!(y.cells[1], j);
        assert_eq!(y.cells[0], second);
        assert_eq!(y.coords[0][0], eps);
    }
}
