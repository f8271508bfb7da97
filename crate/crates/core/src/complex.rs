//! Branched cell complexes built from legal face contacts.
//!
//! Every prototile is a unit box whose faces are words over `{0, 1, *}`, one
//! letter per axis (`*` = the axis runs along the face). A face of tile `p`
//! with letter `1` on axis `a` is glued to the matching face of `q` with
//! letter `0` whenever `(p, q)` is a legal contact along `a`; cells are the
//! classes of the resulting equivalence on (tile, face) germs.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith::{AlgebraicNumber, IntMatrix};
use crate::error::{Error, Result};
use crate::ruleset::{legal_patches, require_primitive, LegalPatches, SubstitutionRule, DEFAULT_BUDGET};

/// Position of a face along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Low,
    High,
    Free,
}

impl Side {
    fn symbol(self) -> char {
        match self {
            Side::Low => '0',
            Side::High => '1',
            Side::Free => '*',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face(pub Vec<Side>);

impl Face {
    pub fn full(d: usize) -> Self {
        Face(vec![Side::Free; d])
    }

    /// All `3^d` faces of the unit cube, in lexicographic order.
    pub fn all(d: usize) -> Vec<Face> {
        let mut out = vec![Face(Vec::new())];
        for _ in 0..d {
            out = out
                .into_iter()
                .flat_map(|f| {
                    [Side::Low, Side::High, Side::Free].into_iter().map(move |s| {
                        let mut v = f.0.clone();
                        v.push(s);
                        Face(v)
                    })
                })
                .collect();
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.0.iter().filter(|&&s| s == Side::Free).count()
    }

    pub fn free_axes(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&a| self.0[a] == Side::Free).collect()
    }

    pub fn with(&self, axis: usize, side: Side) -> Face {
        let mut v = self.0.clone();
        v[axis] = side;
        Face(v)
    }

    fn code(&self) -> usize {
        self.0.iter().fold(0, |acc, s| acc * 3 + *s as usize)
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

/// A face of a particular prototile.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Germ {
    pub tile: usize,
    pub face: Face,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub id: String,
    /// Sorted; the first germ is the representative.
    pub germs: Vec<Germ>,
}

/// Incident top-cell germs of one codimension-one cell, split by the sign of
/// their boundary incidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sides {
    pub plus: Vec<Germ>,
    pub minus: Vec<Germ>,
}

pub type SideData = Vec<Sides>;

#[derive(Clone, Debug)]
pub struct CellComplex {
    dimension: usize,
    labels: Vec<String>,
    volumes: Vec<BigRational>,
    cells: Vec<Vec<Cell>>,
    /// `boundaries[i - 1]` is ∂ᵢ, rows indexed by (i−1)-cells.
    boundaries: Vec<IntMatrix>,
    germ_index: BTreeMap<Germ, (usize, usize)>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// The uncollared complex of a primitive rule.
pub fn build_b0(rule: &SubstitutionRule) -> Result<CellComplex> {
    require_primitive(rule)?;
    let legal = legal_patches(rule, DEFAULT_BUDGET)?;
    Ok(build_complex(rule, &legal))
}

/// Quotient complex for any rule given its legal patches.
pub fn build_complex(rule: &SubstitutionRule, legal: &LegalPatches) -> CellComplex {
    let d = rule.dimension();
    let faces = Face::all(d);
    let nf = faces.len();
    let key = |t: usize, f: &Face| t * nf + f.code();
    let mut uf = UnionFind((0..rule.len() * nf).collect());
    for (a, pairs) in legal.adjacencies(d).iter().enumerate() {
        for &(p, q) in pairs {
            for f in faces.iter().filter(|f| f.0[a] == Side::High) {
                uf.union(key(p, f), key(q, &f.with(a, Side::Low)));
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<Germ>> = BTreeMap::new();
    for t in 0..rule.len() {
        for f in &faces {
            classes.entry(uf.find(key(t, f))).or_default().push(Germ { tile: t, face: f.clone() });
        }
    }
    let mut by_dim: Vec<Vec<Cell>> = vec![Vec::new(); d + 1];
    for (_, mut germs) in classes {
        germs.sort();
        let rep = &germs[0];
        let k = rep.face.dim();
        let id = if k == d {
            rule.label(rep.tile).to_string()
        } else {
            format!("{}:{}", rule.label(rep.tile), rep.face)
        };
        by_dim[k].push(Cell { id, germs });
    }
    for cells in &mut by_dim {
        cells.sort_by(|x, y| x.germs[0].cmp(&y.germs[0]));
    }
    let labels = rule.labels();
    let volumes = rule.tiles().iter().map(|t| t.volume()).collect();
    CellComplex::assemble(d, labels, volumes, by_dim)
}

impl CellComplex {
    fn assemble(d: usize, labels: Vec<String>, volumes: Vec<BigRational>, cells: Vec<Vec<Cell>>) -> Self {
        let mut germ_index = BTreeMap::new();
        for (k, cs) in cells.iter().enumerate() {
            for (i, c) in cs.iter().enumerate() {
                for g in &c.germs {
                    germ_index.insert(g.clone(), (k, i));
                }
            }
        }
        let mut boundaries = Vec::new();
        for k in 1..=d {
            let mut m = IntMatrix::zeros(cells[k - 1].len(), cells[k].len());
            for (j, c) in cells[k].iter().enumerate() {
                let rep = &c.germs[0];
                for (pos, a) in rep.face.free_axes().into_iter().enumerate() {
                    let sign = if pos % 2 == 0 { 1 } else { -1 };
                    for (side, s) in [(Side::High, sign), (Side::Low, -sign)] {
                        let g = Germ { tile: rep.tile, face: rep.face.with(a, side) };
                        let (_, i) = germ_index[&g];
                        m.add_to(i, j, s);
                    }
                }
            }
            boundaries.push(m);
        }
        Self { dimension: d, labels, volumes, cells, boundaries, germ_index }
    }

    /// Assembles a complex from explicit boundary matrices; checks ∂∂ = 0.
    pub fn from_boundaries(
        labels: Vec<String>,
        volumes: Vec<BigRational>,
        ids: Vec<Vec<String>>,
        boundaries: Vec<IntMatrix>,
    ) -> Result<Self> {
        let d = ids.len().checked_sub(1).ok_or_else(|| Error::DimensionMismatch("no cells".into()))?;
        if boundaries.len() != d || labels.len() != ids[d].len() || volumes.len() != ids[d].len() {
            return Err(Error::DimensionMismatch("cell lists and boundary matrices disagree".into()));
        }
        for k in 1..=d {
            let m = &boundaries[k - 1];
            if m.rows() != ids[k - 1].len() || m.cols() != ids[k].len() {
                return Err(Error::DimensionMismatch(format!("∂{k} has the wrong shape")));
            }
            if k >= 2 && !boundaries[k - 2].mul(m).is_zero() {
                return Err(Error::DimensionMismatch(format!("∂{}∘∂{k} is not zero", k - 1)));
            }
        }
        let cells = ids
            .into_iter()
            .map(|v| v.into_iter().map(|id| Cell { id, germs: Vec::new() }).collect())
            .collect();
        Ok(Self { dimension: d, labels, volumes, cells, boundaries, germ_index: BTreeMap::new() })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn cells(&self, i: usize) -> &[Cell] {
        &self.cells[i]
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn top_labels(&self) -> &[String] {
        &self.labels
    }

    pub fn volumes(&self) -> &[BigRational] {
        &self.volumes
    }

    /// Dimension and index of the cell containing a germ.
    pub fn cell_of(&self, g: &Germ) -> Option<(usize, usize)> {
        self.germ_index.get(g).copied()
    }

    pub fn boundary_matrix(&self, i: usize) -> Result<&IntMatrix> {
        if i == 0 || i > self.dimension {
            return Err(Error::DimensionMismatch(format!("boundary ∂{i} of a {}-complex", self.dimension)));
        }
        Ok(&self.boundaries[i - 1])
    }

    /// Coboundary δⁱ : Cⁱ → Cⁱ⁺¹ = ∂ᵢ₊₁ᵀ.
    pub fn coboundary_matrix(&self, i: usize) -> Result<IntMatrix> {
        Ok(self.boundary_matrix(i + 1)?.transpose())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().enumerate().map(|(k, c)| if k % 2 == 0 { c.len() as i64 } else { -(c.len() as i64) }).sum()
    }

    pub fn side_data(&self) -> SideData {
        let d = self.dimension;
        let mut out: SideData = vec![Sides { plus: Vec::new(), minus: Vec::new() }; self.cells[d - 1].len()];
        if self.germ_index.is_empty() {
            // Explicit complexes carry no germs; fall back on matrix entries.
            let m = &self.boundaries[d - 1];
            for (i, j, v) in m.triplets() {
                let n: i64 = i64::try_from(&v).unwrap_or(0);
                let g = Germ { tile: j, face: Face::full(d) };
                for _ in 0..n.unsigned_abs() {
                    if n > 0 { out[i].plus.push(g.clone()) } else { out[i].minus.push(g.clone()) }
                }
            }
            return out;
        }
        for t in 0..self.labels.len() {
            for a in 0..d {
                let sign = if a % 2 == 0 { 1 } else { -1 };
                for (side, s) in [(Side::High, sign), (Side::Low, -sign)] {
                    let g = Germ { tile: t, face: Face::full(d).with(a, side) };
                    let (_, i) = self.germ_index[&g];
                    if s > 0 { out[i].plus.push(g) } else { out[i].minus.push(g) }
                }
            }
        }
        out
    }
}

/// Coefficients usable as weights on top cells.
pub trait Weight: Clone {
    fn zero_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn sign(&self) -> i8;
}

impl Weight for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn sign(&self) -> i8 {
        if self.is_positive() { 1 } else if self.is_negative() { -1 } else { 0 }
    }
}

impl Weight for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn sign(&self) -> i8 {
        if self.is_positive() { 1 } else if self.is_negative() { -1 } else { 0 }
    }
}

impl Weight for AlgebraicNumber {
    fn zero_like(&self) -> Self {
        AlgebraicNumber::zero(self.field())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn sign(&self) -> i8 {
        self.signum()
    }
}

/// Plus-side sum minus minus-side sum at every codimension-one cell.
pub fn kirchhoff_residual<W: Weight>(x: &CellComplex, w: &[W], sides: &SideData) -> Result<Vec<W>> {
    let d = x.dimension();
    if w.len() != x.cells(d).len() {
        return Err(Error::DimensionMismatch(format!(
            "weight vector has {} entries, complex has {} top cells",
            w.len(),
            x.cells(d).len()
        )));
    }
    if sides.len() != x.cells(d - 1).len() {
        return Err(Error::DimensionMismatch("side data does not match the complex".into()));
    }
    let Some(z) = w.first().map(Weight::zero_like) else {
        return Ok(Vec::new());
    };
    Ok(sides
        .iter()
        .map(|s| {
            let plus = s.plus.iter().fold(z.clone(), |acc, g| acc.add(&w[g.tile]));
            s.minus.iter().fold(plus, |acc, g| acc.sub(&w[g.tile]))
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightClass {
    /// Zero residual and non-negative entries.
    WeightSystem,
    /// Zero residual but some entry negative.
    CycleNotWeight,
    NotACycle,
}

pub fn classify_weights<W: Weight>(x: &CellComplex, w: &[W]) -> Result<WeightClass> {
    let r = kirchhoff_residual(x, w, &x.side_data())?;
    Ok(if r.iter().any(|v| v.sign() != 0) {
        WeightClass::NotACycle
    } else if w.iter().any(|v| v.sign() < 0) {
        WeightClass::CycleNotWeight
    } else {
        WeightClass::WeightSystem
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::ruleset::parse_rule;

    fn rule(doc: &str) -> SubstitutionRule {
        parse_rule(doc).unwrap()
    }

    const FIB: &str = r#"{"dimension":1,"tiles":[{"label":"a"},{"label":"b"}],"images":{"a":"ab","b":"a"}}"#;
    const TORUS: &str = r#"{"dimension":2,"expansion":[2,2],"tiles":[{"label":"a"}],"images":{"a":[["a","a"],["a","a"]]}}"#;

    #[test]
    fn fibonacci_is_a_wedge_of_circles() {
        let x = build_b0(&rule(FIB)).unwrap();
        assert_eq!(x.cell_counts(), vec![1, 2]);
        assert!(x.boundary_matrix(1).unwrap().is_zero());
        assert_eq!(x.cells(0)[0].id, "a:0");
        let sides = x.side_data();
        assert_eq!(sides[0].plus.len(), 2);
        assert_eq!(sides[0].minus.len(), 2);
        let w = vec![int(2), int(3)];
        assert!(kirchhoff_residual(&x, &w, &sides).unwrap()[0].is_zero());
        assert_eq!(classify_weights(&x, &[int(1), int(-1)]).unwrap(), WeightClass::CycleNotWeight);
    }

    #[test]
    fn solenoid_is_a_circle() {
        let x = build_b0(&rule(r#"{"dimension":1,"tiles":[{"label":"a"}],"images":{"a":"aa"}}"#)).unwrap();
        assert_eq!(x.cell_counts(), vec![1, 1]);
    }

    #[test]
    fn self_glued_square_is_a_torus() {
        let x = build_b0(&rule(TORUS)).unwrap();
        assert_eq!(x.cell_counts(), vec![1, 2, 1]);
        assert!(x.boundary_matrix(2).unwrap().is_zero());
        assert!(x.boundary_matrix(1).unwrap().is_zero());
        assert!(x.boundary_matrix(3).is_err());
    }

    #[test]
    fn two_dimensional_boundaries_compose_to_zero() {
        let tm2 = rule(
            r#"{"dimension":2,"expansion":[2,2],"tiles":[{"label":"a"},{"label":"b"}],
            "images":{"a":[["a","b"],["b","a"]],"b":[["b","a"],["a","b"]]}}"#,
        );
        let x = build_b0(&tm2).unwrap();
        assert_eq!(x.cell_counts()[2], 2);
        let d1 = x.boundary_matrix(1).unwrap();
        let d2 = x.boundary_matrix(2).unwrap();
        assert!(d1.mul(d2).is_zero());
    }

    #[test]
    fn residual_rejects_wrong_length() {
        let x = build_b0(&rule(FIB)).unwrap();
        assert!(kirchhoff_residual(&x, &[int(1)], &x.side_data()).is_err());
    }

    #[test]
    fn explicit_complexes_are_checked() {
        let circles = CellComplex::from_boundaries(
            vec!["p".into(), "q".into()],
            vec![int(1), int(1)],
            vec![vec!["u".into(), "v".into()], vec!["p".into(), "q".into()]],
            vec![IntMatrix::zeros(2, 2)],
        )
        .unwrap();
        assert_eq!(circles.side_data().len(), 2);
        let bad = CellComplex::from_boundaries(
            vec!["s".into()],
            vec![int(1)],
            vec![vec!["v".into()], vec!["e".into()], vec!["s".into()]],
            vec![IntMatrix::from_rows(&[vec![1]]), IntMatrix::from_rows(&[vec![1]])],
        );
        assert!(bad.is_err());
    }
}
