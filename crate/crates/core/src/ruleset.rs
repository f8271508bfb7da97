//! Substitution rules on labelled boxes: parsing, inflation, abelianization
//! and the finite census of legal patches.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde_json::{Map, Value};

use crate::arith::{parse_rational, rat_to_string, IntMatrix};
use crate::error::{Error, Result};

/// Default cap on the number of cells any single inflation may produce.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Inflations allowed before the legal-patch census is declared unstable.
pub const STABILISATION_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prototile {
    pub label: String,
    pub dims: Vec<BigRational>,
}

impl Prototile {
    pub fn volume(&self) -> BigRational {
        self.dims.iter().fold(BigRational::one(), |acc, x| acc * x)
    }
}

/// A box of tile indices. Cells are stored row-major: the last axis varies
/// fastest, so a nested array `[i0][i1]…` maps directly onto `cells`. The
/// patch origin is its lower corner.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Patch {
    shape: Vec<usize>,
    cells: Vec<usize>,
}

impl Patch {
    pub fn new(shape: Vec<usize>, cells: Vec<usize>) -> Self {
        assert_eq!(shape.iter().product::<usize>(), cells.len(), "patch shape does not match cell count");
        Self { shape, cells }
    }

    pub fn word(cells: Vec<usize>) -> Self {
        Self { shape: vec![cells.len()], cells }
    }

    pub fn single(dimension: usize, tile: usize) -> Self {
        Self { shape: vec![1; dimension], cells: vec![tile] }
    }

    pub fn dimension(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index(&self, pos: &[usize]) -> usize {
        pos.iter().zip(&self.shape).fold(0, |acc, (&p, &s)| {
            debug_assert!(p < s);
            acc * s + p
        })
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.shape.len()];
        for a in (0..self.shape.len()).rev() {
            out[a] = idx % self.shape[a];
            idx /= self.shape[a];
        }
        out
    }

    pub fn get(&self, pos: &[usize]) -> usize {
        self.cells[self.index(pos)]
    }

    /// Sub-box starting at `origin` with the given shape.
    pub fn window(&self, origin: &[usize], shape: &[usize]) -> Patch {
        let mut cells = Vec::with_capacity(shape.iter().product());
        for pos in box_positions(shape) {
            let abs: Vec<usize> = pos.iter().zip(origin).map(|(p, o)| p + o).collect();
            cells.push(self.get(&abs));
        }
        Patch::new(shape.to_vec(), cells)
    }

    /// Occurrences of each of the `alphabet` tiles.
    pub fn counts(&self, alphabet: usize) -> Vec<u64> {
        let mut c = vec![0u64; alphabet];
        for &t in &self.cells {
            c[t] += 1;
        }
        c
    }

    /// All sub-boxes whose sides are at most `max_side`, in a fixed order.
    pub fn sub_windows(&self, max_side: usize) -> Vec<Patch> {
        let shapes: Vec<Vec<usize>> = box_positions(&vec![max_side; self.dimension()])
            .map(|s| s.iter().map(|x| x + 1).collect::<Vec<_>>())
            .filter(|s: &Vec<usize>| s.iter().zip(&self.shape).all(|(a, b)| a <= b))
            .collect();
        let mut out = Vec::new();
        for shape in &shapes {
            let span: Vec<usize> = self.shape.iter().zip(shape).map(|(n, s)| n - s + 1).collect();
            for origin in box_positions(&span) {
                out.push(self.window(&origin, shape));
            }
        }
        out
    }
}

/// Iterates over all positions of a box, row-major.
pub fn box_positions(shape: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = shape.iter().product();
    (0..total).map(move |mut idx| {
        let mut out = vec![0; shape.len()];
        for a in (0..shape.len()).rev() {
            out[a] = idx % shape[a];
            idx /= shape[a];
        }
        out
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionRule {
    pub name: Option<String>,
    dimension: usize,
    tiles: Vec<Prototile>,
    /// Block shape of every image when `dimension >= 2`.
    expansion: Option<Vec<usize>>,
    images: Vec<Patch>,
}

impl SubstitutionRule {
    /// Builds a rule from already-indexed images, validating shapes.
    pub fn new(
        dimension: usize,
        tiles: Vec<Prototile>,
        expansion: Option<Vec<usize>>,
        images: Vec<Patch>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Schema("dimension must be at least 1".into()));
        }
        if tiles.is_empty() {
            return Err(Error::Schema("no prototiles declared".into()));
        }
        if images.len() != tiles.len() {
            return Err(Error::Schema("every prototile needs exactly one image".into()));
        }
        let mut seen = HashSet::new();
        for t in &tiles {
            if !seen.insert(t.label.as_str()) {
                return Err(Error::DuplicateLabel(t.label.clone()));
            }
            if t.label.is_empty() || t.label.chars().any(char::is_whitespace) {
                return Err(Error::Schema(format!("label {:?} must be non-empty without whitespace", t.label)));
            }
            if t.dims.len() != dimension {
                return Err(Error::Schema(format!("{:?} needs {dimension} side lengths", t.label)));
            }
            if t.dims.iter().any(|x| !x.is_positive()) {
                return Err(Error::NonPositiveDimension(t.label.clone()));
            }
            if dimension >= 2 && t.dims.iter().any(|x| !x.is_one()) {
                return Err(Error::Schema(format!(
                    "{:?}: only unit cubes are supported in dimension {dimension}",
                    t.label
                )));
            }
        }
        match (&expansion, dimension) {
            (None, 1) => {}
            (Some(k), d) if d >= 2 => {
                if k.len() != d || k.contains(&0) {
                    return Err(Error::Schema("expansion must list one positive factor per axis".into()));
                }
            }
            (Some(_), _) => return Err(Error::Schema("expansion is only used when dimension >= 2".into())),
            (None, _) => return Err(Error::Schema("dimension >= 2 requires an expansion vector".into())),
        }
        for (t, img) in tiles.iter().zip(&images) {
            if img.is_empty() {
                return Err(Error::Schema(format!("empty image for {:?}", t.label)));
            }
            if img.dimension() != dimension {
                return Err(Error::RaggedImage(t.label.clone()));
            }
            if let Some(k) = &expansion {
                if img.shape() != k.as_slice() {
                    return Err(Error::RaggedImage(t.label.clone()));
                }
            }
            if img.cells().iter().any(|&c| c >= tiles.len()) {
                return Err(Error::Schema(format!("image of {:?} refers to an unknown tile index", t.label)));
            }
        }
        Ok(Self { name: None, dimension, tiles, expansion, images })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn tiles(&self) -> &[Prototile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.tiles[i].label
    }

    pub fn labels(&self) -> Vec<String> {
        self.tiles.iter().map(|t| t.label.clone()).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.tiles.iter().position(|t| t.label == label)
    }

    pub fn expansion(&self) -> Option<&[usize]> {
        self.expansion.as_deref()
    }

    pub fn image(&self, i: usize) -> &Patch {
        &self.images[i]
    }

    pub fn images(&self) -> &[Patch] {
        &self.images
    }

    /// Same rule with prototiles reordered: new tile `i` is old tile `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let tiles = perm.iter().map(|&o| self.tiles[o].clone()).collect();
        let images = perm
            .iter()
            .map(|&o| {
                let img = &self.images[o];
                Patch::new(img.shape().to_vec(), img.cells().iter().map(|&c| inv[c]).collect())
            })
            .collect();
        Self { name: self.name.clone(), dimension: self.dimension, tiles, expansion: self.expansion.clone(), images }
    }

    /// Renders a patch as a word (d = 1) or nested label arrays.
    pub fn patch_to_json(&self, p: &Patch) -> Value {
        if p.dimension() == 1 {
            let single = self.tiles.iter().all(|t| t.label.chars().count() == 1);
            let sep = if single { "" } else { " " };
            let words: Vec<&str> = p.cells().iter().map(|&c| self.label(c)).collect();
            return Value::String(words.join(sep));
        }
        fn nest(rule: &SubstitutionRule, p: &Patch, prefix: &mut Vec<usize>) -> Value {
            let a = prefix.len();
            if a == p.dimension() {
                return Value::String(rule.label(p.get(prefix)).to_string());
            }
            let mut items = Vec::new();
            for i in 0..p.shape()[a] {
                prefix.push(i);
                items.push(nest(rule, p, prefix));
                prefix.pop();
            }
            Value::Array(items)
        }
        nest(self, p, &mut Vec::new())
    }

    /// Serialises back to the rule-file format.
    pub fn to_json(&self) -> Value {
        let mut doc = Map::new();
        if let Some(n) = &self.name {
            doc.insert("name".into(), Value::String(n.clone()));
        }
        doc.insert("dimension".into(), Value::from(self.dimension));
        let tiles = self
            .tiles
            .iter()
            .map(|t| {
                let mut m = Map::new();
                m.insert("label".into(), Value::String(t.label.clone()));
                m.insert("dims".into(), Value::Array(t.dims.iter().map(|x| Value::String(rat_to_string(x))).collect()));
                Value::Object(m)
            })
            .collect();
        doc.insert("tiles".into(), Value::Array(tiles));
        if let Some(k) = &self.expansion {
            doc.insert("expansion".into(), Value::Array(k.iter().map(|&x| Value::from(x)).collect()));
        }
        let mut images = Map::new();
        for (t, img) in self.tiles.iter().zip(&self.images) {
            images.insert(t.label.clone(), self.patch_to_json(img));
        }
        doc.insert("images".into(), Value::Object(images));
        Value::Object(doc)
    }

    /// Parses a word (d = 1) or nested array into a patch over this alphabet.
    pub fn parse_patch(&self, v: &Value) -> Result<Patch> {
        let index: HashMap<&str, usize> = self.tiles.iter().enumerate().map(|(i, t)| (t.label.as_str(), i)).collect();
        parse_image(v, self.dimension, &index, "seed")
    }
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

/// Parses and validates a rule document.
pub fn parse_rule(document: &str) -> Result<SubstitutionRule> {
    let v: Value = serde_json::from_str(document).map_err(|e| schema(format!("not valid JSON: {e}")))?;
    let obj = v.as_object().ok_or_else(|| schema("top level must be an object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "name" | "description" | "dimension" | "tiles" | "expansion" | "images") {
            return Err(schema(format!("unknown field {key:?}")));
        }
    }
    let dimension = obj
        .get("dimension")
        .and_then(Value::as_u64)
        .ok_or_else(|| schema("\"dimension\" must be a positive integer"))? as usize;
    if dimension == 0 {
        return Err(schema("\"dimension\" must be a positive integer"));
    }
    let tiles_v = obj.get("tiles").and_then(Value::as_array).ok_or_else(|| schema("\"tiles\" must be an array"))?;
    let mut tiles = Vec::new();
    for t in tiles_v {
        let t = t.as_object().ok_or_else(|| schema("each tile must be an object"))?;
        let label = t
            .get("label")
            .and_then(Value::as_str)
            .ok_or_else(|| schema("tile without a string \"label\""))?
            .to_string();
        let dims = match t.get("dims") {
            None => vec![BigRational::one(); dimension],
            Some(Value::Array(ds)) => {
                let mut out = Vec::new();
                for x in ds {
                    let r = match x {
                        Value::String(s) => parse_rational(s),
                        Value::Number(n) => n.as_i64().map(|i| BigRational::from_integer(BigInt::from(i))),
                        _ => None,
                    }
                    .ok_or_else(|| schema(format!("bad side length {x} for {label:?}")))?;
                    out.push(r);
                }
                out
            }
            Some(_) => return Err(schema(format!("\"dims\" of {label:?} must be an array"))),
        };
        tiles.push(Prototile { label, dims });
    }
    let expansion = match obj.get("expansion") {
        None => None,
        Some(Value::Array(ks)) => Some(
            ks.iter()
                .map(|k| k.as_u64().filter(|&k| k > 0).map(|k| k as usize))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| schema("\"expansion\" entries must be positive integers"))?,
        ),
        Some(_) => return Err(schema("\"expansion\" must be an array")),
    };
    let images_v = obj.get("images").and_then(Value::as_object).ok_or_else(|| schema("\"images\" must be an object"))?;
    let index: HashMap<&str, usize> = tiles.iter().enumerate().map(|(i, t)| (t.label.as_str(), i)).collect();
    for key in images_v.keys() {
        if !index.contains_key(key.as_str()) {
            return Err(schema(format!("image given for undeclared tile {key:?}")));
        }
    }
    let mut images = Vec::new();
    for t in &tiles {
        let img = images_v.get(&t.label).ok_or_else(|| schema(format!("no image for {:?}", t.label)))?;
        images.push(parse_image(img, dimension, &index, &t.label)?);
    }
    let mut rule = SubstitutionRule::new(dimension, tiles, expansion, images)?;
    rule.name = obj.get("name").and_then(Value::as_str).map(str::to_string);
    Ok(rule)
}

fn parse_image(v: &Value, dimension: usize, index: &HashMap<&str, usize>, owner: &str) -> Result<Patch> {
    let lookup = |s: &str| {
        index
            .get(s)
            .copied()
            .ok_or_else(|| Error::UndeclaredLabel { label: s.to_string(), image_of: owner.to_string() })
    };
    if dimension == 1 {
        let s = v.as_str().ok_or_else(|| schema(format!("image of {owner:?} must be a string")))?;
        let single = index.keys().all(|l| l.chars().count() == 1);
        let cells = if single && !s.contains(char::is_whitespace) {
            s.chars().map(|c| lookup(&c.to_string())).collect::<Result<Vec<_>>>()?
        } else {
            s.split_whitespace().map(lookup).collect::<Result<Vec<_>>>()?
        };
        return Ok(Patch::word(cells));
    }
    let mut shape: Vec<Option<usize>> = vec![None; dimension];
    let mut cells = Vec::new();
    fn walk(
        v: &Value,
        depth: usize,
        shape: &mut [Option<usize>],
        cells: &mut Vec<usize>,
        lookup: &dyn Fn(&str) -> Result<usize>,
        owner: &str,
    ) -> Result<()> {
        if depth == shape.len() {
            let s = v.as_str().ok_or_else(|| Error::RaggedImage(owner.to_string()))?;
            cells.push(lookup(s)?);
            return Ok(());
        }
        let arr = v.as_array().ok_or_else(|| Error::RaggedImage(owner.to_string()))?;
        match shape[depth] {
            None => shape[depth] = Some(arr.len()),
            Some(n) if n != arr.len() => return Err(Error::RaggedImage(owner.to_string())),
            Some(_) => {}
        }
        for item in arr {
            walk(item, depth + 1, shape, cells, lookup, owner)?;
        }
        Ok(())
    }
    walk(v, 0, &mut shape, &mut cells, &lookup, owner)?;
    let shape: Vec<usize> = shape.into_iter().map(|s| s.unwrap_or(0)).collect();
    if shape.contains(&0) {
        return Err(schema(format!("empty image for {owner:?}")));
    }
    Ok(Patch::new(shape, cells))
}

/// `A[i][j]` = number of copies of tile `i` in the image of tile `j`.
pub fn abelianization(rule: &SubstitutionRule) -> IntMatrix {
    let p = rule.len();
    let mut a = IntMatrix::zeros(p, p);
    for (j, img) in rule.images().iter().enumerate() {
        for &i in img.cells() {
            a.add_to(i, j, 1);
        }
    }
    a
}

/// Smallest `k <= 2p²` with `A^k` entrywise positive.
pub fn is_primitive(a: &IntMatrix) -> Option<u32> {
    assert!(a.is_square());
    let p = a.rows();
    if p == 0 {
        return None;
    }
    let pattern: Vec<Vec<bool>> = (0..p).map(|i| (0..p).map(|j| a.get(i, j).is_positive()).collect()).collect();
    let mut cur = pattern.clone();
    for k in 1..=(2 * p * p) as u32 {
        if cur.iter().flatten().all(|&x| x) {
            return Some(k);
        }
        let mut next = vec![vec![false; p]; p];
        for i in 0..p {
            for m in 0..p {
                if cur[i][m] {
                    for j in 0..p {
                        next[i][j] |= pattern[m][j];
                    }
                }
            }
        }
        cur = next;
    }
    None
}

/// Number of cells `σᵏ(seed)` would have.
pub fn expanded_size(rule: &SubstitutionRule, seed: &Patch, k: usize) -> u128 {
    let mut sizes = vec![1u128; rule.len()];
    for _ in 0..k {
        sizes = rule
            .images()
            .iter()
            .map(|img| img.cells().iter().fold(0u128, |acc, &c| acc.saturating_add(sizes[c])))
            .collect();
    }
    seed.cells().iter().fold(0u128, |acc, &c| acc.saturating_add(sizes[c]))
}

/// One inflation step.
pub fn inflate(rule: &SubstitutionRule, p: &Patch) -> Patch {
    match rule.expansion() {
        None => Patch::word(p.cells().iter().flat_map(|&c| rule.image(c).cells().iter().copied()).collect()),
        Some(k) => {
            let shape: Vec<usize> = p.shape().iter().zip(k).map(|(s, k)| s * k).collect();
            let mut cells = vec![0; shape.iter().product()];
            let out = Patch::new(shape.clone(), vec![0; cells.len()]);
            for (idx, &t) in p.cells().iter().enumerate() {
                let base = p.coords(idx);
                let img = rule.image(t);
                for (j, &c) in img.cells().iter().enumerate() {
                    let off = img.coords(j);
                    let pos: Vec<usize> = base.iter().zip(&off).zip(k).map(|((b, o), k)| b * k + o).collect();
                    cells[out.index(&pos)] = c;
                }
            }
            Patch::new(shape, cells)
        }
    }
}

/// `σᵏ(seed)`, refusing to build more than `budget` cells.
pub fn expand(rule: &SubstitutionRule, seed: &Patch, k: usize, budget: u64) -> Result<Patch> {
    if seed.dimension() != rule.dimension() {
        return Err(Error::DimensionMismatch(format!(
            "seed has dimension {}, rule has {}",
            seed.dimension(),
            rule.dimension()
        )));
    }
    let needed = expanded_size(rule, seed, k);
    if needed > budget as u128 {
        return Err(Error::Budget { needed, budget });
    }
    let mut p = seed.clone();
    for _ in 0..k {
        p = inflate(rule, &p);
    }
    Ok(p)
}

/// Every patch with sides at most 3 that occurs in some `σⁿ(t)`.
#[derive(Clone, Debug)]
pub struct LegalPatches {
    pub windows: BTreeSet<Patch>,
    /// Inflation rounds until one more round added nothing.
    pub rounds: usize,
}

impl LegalPatches {
    pub fn of_shape<'a>(&'a self, shape: &'a [usize]) -> impl Iterator<Item = &'a Patch> + 'a {
        self.windows.iter().filter(move |w| w.shape() == shape)
    }

    /// Ordered face-to-face pairs along each axis.
    pub fn adjacencies(&self, dimension: usize) -> Vec<BTreeSet<(usize, usize)>> {
        (0..dimension)
            .map(|a| {
                let mut shape = vec![1; dimension];
                shape[a] = 2;
                self.of_shape(&shape).map(|w| (w.cells()[0], w.cells()[1])).collect()
            })
            .collect()
    }

    /// Full 3×…×3 neighbourhoods.
    pub fn neighbourhoods(&self, dimension: usize) -> Vec<&Patch> {
        let shape = vec![3; dimension];
        self.windows.iter().filter(|w| w.shape() == shape.as_slice()).collect()
    }
}

/// Closure of the single tiles under "inflate, then cut out every sub-box of
/// side at most 3". Any such box of `σⁿ⁺¹(t)` lies in the inflation of a box
/// of side at most 3 of `σⁿ(t)`, so the fixed point is exactly the legal set.
pub fn legal_patches(rule: &SubstitutionRule, budget: u64) -> Result<LegalPatches> {
    let d = rule.dimension();
    let mut windows: BTreeSet<Patch> = (0..rule.len()).map(|t| Patch::single(d, t)).collect();
    let mut frontier: Vec<Patch> = windows.iter().cloned().collect();
    let mut cells_seen: u128 = 0;
    for round in 1..=STABILISATION_CAP {
        let mut fresh = Vec::new();
        for w in &frontier {
            let img = inflate(rule, w);
            cells_seen += img.len() as u128;
            if cells_seen > budget as u128 {
                return Err(Error::Budget { needed: cells_seen, budget });
            }
            for sub in img.sub_windows(3) {
                if !windows.contains(&sub) {
                    windows.insert(sub.clone());
                    fresh.push(sub);
                }
            }
        }
        if fresh.is_empty() {
            return Ok(LegalPatches { windows, rounds: round });
        }
        frontier = fresh;
    }
    Err(Error::NotStabilised(STABILISATION_CAP))
}

/// Legal face-to-face contacts per axis; requires a primitive rule.
pub fn legal_adjacencies(rule: &SubstitutionRule) -> Result<Vec<BTreeSet<(usize, usize)>>> {
    require_primitive(rule)?;
    Ok(legal_patches(rule, DEFAULT_BUDGET)?.adjacencies(rule.dimension()))
}

pub fn require_primitive(rule: &SubstitutionRule) -> Result<u32> {
    let a = abelianization(rule);
    is_primitive(&a).ok_or_else(|| {
        let reach: Vec<String> = (0..rule.len())
            .map(|j| {
                let mut seen = BTreeSet::from([j]);
                let mut stack = vec![j];
                while let Some(x) = stack.pop() {
                    for i in 0..rule.len() {
                        if a.get(i, x).is_positive() && seen.insert(i) {
                            stack.push(i);
                        }
                    }
                }
                let names: Vec<&str> = seen.iter().map(|&i| rule.label(i)).collect();
                format!("{} reaches {{{}}}", rule.label(j), names.join(","))
            })
            .collect();
        Error::NotPrimitive(format!("no power of the substitution matrix is positive ({})", reach.join("; ")))
    })
}

/// Cheap periodicity probe: the smallest shift under which a long inflated
/// patch agrees with itself along some axis, if small compared to its size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicityProbe {
    pub inspected_cells: usize,
    /// Per axis, the smallest self-overlap shift found, if below a quarter
    /// of the extent.
    pub short_periods: Vec<Option<usize>>,
}

impl PeriodicityProbe {
    pub fn looks_periodic(&self) -> bool {
        self.short_periods.iter().any(Option::is_some)
    }
}

pub fn periodicity_probe(rule: &SubstitutionRule, target_cells: u64) -> PeriodicityProbe {
    let seed = Patch::single(rule.dimension(), 0);
    let mut k = 0;
    while expanded_size(rule, &seed, k + 1) <= target_cells as u128 && k < 64 {
        if expanded_size(rule, &seed, k + 1) == expanded_size(rule, &seed, k) {
            break;
        }
        k += 1;
    }
    let p = expand(rule, &seed, k, target_cells).expect("size checked");
    let short_periods = (0..rule.dimension())
        .map(|a| {
            let n = p.shape()[a];
            (1..=n / 4).find(|&s| {
                (0..p.len()).all(|idx| {
                    let mut c = p.coords(idx);
                    if c[a] + s >= n {
                        return true;
                    }
                    let here = p.cells()[idx];
                    c[a] += s;
                    p.get(&c) == here
                })
            })
        })
        .collect();
    PeriodicityProbe { inspected_cells: p.len(), short_periods }
}

/// Label census of a patch, keyed by label.
pub fn label_counts(rule: &SubstitutionRule, p: &Patch) -> BTreeMap<String, u64> {
    p.counts(rule.len()).into_iter().enumerate().map(|(i, c)| (rule.label(i).to_string(), c)).collect()
}
