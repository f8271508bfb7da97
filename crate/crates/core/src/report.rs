//! Serializable summaries of every stage, and the consolidated report.
//! Every collection is ordered, so equal inputs give byte-identical JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::Value;

use crate::arith::{rat_to_decimal, rat_to_string, AlgebraicNumber, IntMatrix, Interval, NumberField, ZPoly};
use crate::collar::{border_forcing, check_flattening, FlatteningReport, Tower};
use crate::complex::{build_b0, CellComplex};
use crate::efs::{build_efs, Efs};
use crate::error::Result;
use crate::gaplabels::{contains, parse_expression, FrequencyModule, Lattice};
use crate::homology::{cohomology_group, cycle_space_basis, homology_group, FgAbelianGroup};
use crate::measure::{
    invariant_measure, perron_data, residual_is_zero, transverse_weights, unique_ergodicity, InvariantMeasure,
    MeasureOutcome, Verdict,
};
use crate::oracle::{empirical_frequencies, verify_against, FrequencyTable, OracleComparison};
use crate::ruleset::{abelianization, is_primitive, periodicity_probe, SubstitutionRule, DEFAULT_BUDGET};

/// Tolerance used by the report's oracle comparison.
pub const ORACLE_TOLERANCE: (i64, i64) = (1, 1000);

#[derive(Clone, Debug)]
pub struct Options {
    /// Truncation depth for measures and gap labels.
    pub depth: usize,
    /// Oracle inflation depth; by default 20 in dimension 1 and 8 above.
    pub inflate: Option<usize>,
    /// Fractional digits of decimal renderings.
    pub precision: usize,
    pub budget: u64,
    /// Membership queries for the gap-label module.
    pub contains: Vec<String>,
}

impl Default for Options {
    fn default() -> Self {
        Self { depth: 3, inflate: None, precision: 12, budget: DEFAULT_BUDGET, contains: Vec::new() }
    }
}

impl Options {
    pub fn inflation_depth(&self, dimension: usize) -> usize {
        self.inflate.unwrap_or(if dimension == 1 { 20 } else { 8 })
    }
}

fn int_json(x: &BigInt) -> Value {
    x.to_i64().map_or_else(|| Value::String(x.to_string()), Value::from)
}

fn matrix_json(m: &IntMatrix) -> Vec<Vec<Value>> {
    m.to_rows().iter().map(|r| r.iter().map(int_json).collect()).collect()
}

/// Power-basis coefficients as exact strings plus a decimal rendering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exact {
    pub coeffs: Vec<String>,
    pub decimal: String,
}

pub fn exact(x: &AlgebraicNumber, precision: usize) -> Exact {
    let n = x.field().degree();
    let mut coeffs: Vec<String> = x.coeffs().iter().map(rat_to_string).collect();
    coeffs.resize(n, "0".into());
    Exact { coeffs, decimal: x.to_decimal(precision) }
}

fn exact_all(xs: &[AlgebraicNumber], precision: usize) -> Vec<Exact> {
    xs.iter().map(|x| exact(x, precision)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldData {
    /// Ascending integer coefficients.
    pub min_poly: Vec<Value>,
    pub char_poly: Vec<Value>,
    pub degree: usize,
    pub isolating_interval: [String; 2],
    pub theta: Exact,
}

/// An isolating interval with `precision`-digit decimal endpoints, widened
/// outward from the stored one; the exact endpoints are kept if rounding
/// would capture a second root.
fn decimal_isolation(field: &NumberField, precision: usize) -> Interval {
    let iv = field.root_interval();
    let scale = BigRational::from_integer(BigInt::from(10u32).pow(precision as u32));
    let lo = (&iv.lo * &scale).floor() / &scale;
    let hi = (&iv.hi * &scale).ceil() / &scale;
    let p = field.min_poly();
    let roots = p.count_roots(&lo, &hi) + usize::from(p.eval(&lo).is_zero());
    if roots == 1 {
        Interval::new(lo, hi)
    } else {
        iv.clone()
    }
}

fn poly_json(p: &ZPoly) -> Vec<Value> {
    p.coeffs().iter().map(int_json).collect()
}

fn field_data(field: &NumberField, theta: &AlgebraicNumber, min_poly: &ZPoly, char_poly: &ZPoly, precision: usize) -> FieldData {
    let iv = decimal_isolation(field, precision);
    FieldData {
        min_poly: poly_json(min_poly),
        char_poly: poly_json(char_poly),
        degree: field.degree(),
        isolating_interval: [rat_to_decimal(&iv.lo, precision), rat_to_decimal(&iv.hi, precision)],
        theta: exact(theta, precision),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleSection {
    pub name: Option<String>,
    pub dimension: usize,
    pub labels: Vec<String>,
    pub expansion: Option<Vec<usize>>,
    /// Entry (i, j): copies of tile i in the image of tile j.
    pub substitution_matrix: Vec<Vec<Value>>,
    pub primitive: bool,
    pub primitivity_exponent: Option<u32>,
    pub probe_cells: usize,
    pub short_periods: Vec<Option<usize>>,
}

pub fn rule_section(rule: &SubstitutionRule) -> RuleSection {
    let a = abelianization(rule);
    let exponent = is_primitive(&a);
    let probe = periodicity_probe(rule, 100_000);
    RuleSection {
        name: rule.name.clone(),
        dimension: rule.dimension(),
        labels: rule.labels(),
        expansion: rule.expansion().map(<[usize]>::to_vec),
        substitution_matrix: matrix_json(&a),
        primitive: exponent.is_some(),
        primitivity_exponent: exponent,
        probe_cells: probe.inspected_cells,
        short_periods: probe.short_periods,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexSummary {
    pub cell_counts: Vec<usize>,
    pub euler_characteristic: i64,
    pub boundary_squares_vanish: bool,
    /// Cell ids per dimension.
    pub cells: Vec<Vec<String>>,
    /// Non-zero entries `[row, column, value]` of ∂ᵢ for i = 1..=d.
    pub boundaries: Vec<Vec<(usize, usize, Value)>>,
}

pub fn complex_summary(x: &CellComplex) -> ComplexSummary {
    let d = x.dimension();
    let mut vanish = true;
    let mut boundaries = Vec::new();
    for i in 1..=d {
        let b = x.boundary_matrix(i).expect("degree in range");
        if i >= 2 {
            vanish &= x.boundary_matrix(i - 1).expect("degree in range").mul(b).is_zero();
        }
        boundaries.push(b.triplets().into_iter().map(|(r, c, v)| (r, c, int_json(&v))).collect());
    }
    ComplexSummary {
        cell_counts: x.cell_counts(),
        euler_characteristic: x.euler_characteristic(),
        boundary_squares_vanish: vanish,
        cells: (0..=d).map(|i| x.cells(i).iter().map(|c| c.id.clone()).collect()).collect(),
        boundaries,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexSection {
    pub uncollared: ComplexSummary,
    pub collared: ComplexSummary,
}

#[derive(Clone, Debug, Serialize)]
pub struct Flatness {
    pub flat: bool,
    pub cells_checked: usize,
    /// Branch cell, face, and two germs `(label, image)` on different sheets.
    pub witness: Option<Value>,
}

fn flatness(r: &FlatteningReport) -> Flatness {
    Flatness {
        flat: r.flat,
        cells_checked: r.cells_checked,
        witness: r.witness.as_ref().map(|w| {
            serde_json::json!({
                "cell": w.cell,
                "face": w.face,
                "first": {"tile": w.first.0, "image": w.first.1},
                "second": {"tile": w.second.0, "image": w.second.1},
            })
        }),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CollarSection {
    pub styles: Vec<String>,
    pub diagnostics: Vec<String>,
    pub legal_rounds: usize,
    pub labels: Vec<String>,
    /// Base label of each collared tile.
    pub forget: Vec<String>,
    pub images: BTreeMap<String, Value>,
    pub uncollared: Flatness,
    pub collared: Flatness,
}

pub fn collar_section(tower: &Tower) -> Result<CollarSection> {
    let rule = tower.rule();
    let base = &tower.base;
    let forget = tower.forget();
    let b0 = build_b0(base)?;
    Ok(CollarSection {
        styles: tower.styles().iter().map(|s| s.name().to_string()).collect(),
        diagnostics: tower.diagnostics.clone(),
        legal_rounds: tower.legal.rounds,
        labels: rule.labels(),
        forget: forget.iter().map(|&b| base.label(b).to_string()).collect(),
        images: (0..rule.len()).map(|i| (rule.label(i).to_string(), rule.patch_to_json(rule.image(i)))).collect(),
        uncollared: flatness(&check_flattening(base, &b0)),
        collared: flatness(&tower.flattening),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Group {
    pub rank: usize,
    pub torsion: Vec<Value>,
    pub display: String,
}

fn group(g: &FgAbelianGroup) -> Group {
    Group { rank: g.rank, torsion: g.torsion.iter().map(int_json).collect(), display: g.to_string() }
}

#[derive(Clone, Debug, Serialize)]
pub struct Degree {
    pub degree: usize,
    pub homology: Group,
    pub cohomology: Group,
}

fn degrees(x: &CellComplex) -> Vec<Degree> {
    (0..=x.dimension())
        .map(|i| Degree { degree: i, homology: group(&homology_group(x, i)), cohomology: group(&cohomology_group(x, i)) })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologySection {
    pub uncollared: Vec<Degree>,
    pub collared: Vec<Degree>,
    /// Hermite basis of the top cycles of the collared complex.
    pub top_cycle_basis: Vec<Vec<Value>>,
}

pub fn homology_section(uncollared: &CellComplex, collared: &CellComplex) -> HomologySection {
    HomologySection {
        uncollared: degrees(uncollared),
        collared: degrees(collared),
        top_cycle_basis: cycle_space_basis(collared).iter().map(|r| r.iter().map(int_json).collect()).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LabelledValue {
    pub label: String,
    pub value: Exact,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelCheck {
    pub level: usize,
    pub mass: Exact,
    pub kirchhoff_zero: bool,
    pub positive: bool,
    /// A★ μ_{n+1} = μ_n.
    pub compatible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub verdict: String,
    pub exponent: Option<u32>,
    pub diameters: Vec<f64>,
    pub strictly_decreasing: bool,
    pub extremal_rays: usize,
    pub ray_bound: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureSection {
    pub field: FieldData,
    /// Perron data of the uncollared substitution matrix.
    pub letter_frequencies: Vec<LabelledValue>,
    pub letter_volumes: Vec<LabelledValue>,
    pub unique: bool,
    pub volumes: Vec<LabelledValue>,
    pub mu0: Vec<LabelledValue>,
    pub levels: Vec<LevelCheck>,
    /// Extremal rays when the collared matrix is not primitive.
    pub rays: Vec<Vec<Exact>>,
    pub ergodicity: Certificate,
}

fn labelled(labels: &[String], xs: &[AlgebraicNumber], precision: usize) -> Vec<LabelledValue> {
    labels.iter().zip(xs).map(|(l, x)| LabelledValue { label: l.clone(), value: exact(x, precision) }).collect()
}

pub fn measure_section(base: &SubstitutionRule, efs: &Efs, outcome: &MeasureOutcome, opts: &Options) -> Result<MeasureSection> {
    let p = opts.precision;
    let pd = perron_data(&abelianization(base))?;
    let g = efs.geometry();
    let labels = efs.labels();
    let cert = unique_ergodicity(efs)?;
    let ergodicity = Certificate {
        verdict: match cert.verdict {
            Verdict::UniquelyErgodic => "TRUE".into(),
            Verdict::Unknown => "UNKNOWN".into(),
        },
        exponent: cert.exponent,
        diameters: cert.diameters.clone(),
        strictly_decreasing: cert.strictly_decreasing,
        extremal_rays: cert.extremal_rays,
        ray_bound: cert.ray_bound,
    };
    let lengths: Vec<AlgebraicNumber> = match base.expansion() {
        None => {
            let mean = crate::arith::field::dot(&pd.right, &pd.left);
            let inv = mean.inv().expect("positive");
            pd.left.iter().map(|x| x * &inv).collect()
        }
        Some(_) => base.tiles().iter().map(|t| AlgebraicNumber::from_rational(&pd.root.field, t.volume())).collect(),
    };
    let mut section = MeasureSection {
        field: field_data(&g.field, &g.theta, &g.min_poly, &pd.root.char_poly, p),
        letter_frequencies: labelled(&base.labels(), &pd.right, p),
        letter_volumes: labelled(&base.labels(), &lengths, p),
        unique: false,
        volumes: labelled(labels, &g.volumes, p),
        mu0: Vec::new(),
        levels: Vec::new(),
        rays: Vec::new(),
        ergodicity,
    };
    match outcome {
        MeasureOutcome::Unique(m) => {
            section.unique = true;
            section.mu0 = labelled(labels, &m.mu0, p);
            section.levels = level_checks(efs, m, opts.depth, p)?;
        }
        MeasureOutcome::Rays { rays, .. } => {
            section.rays = rays.iter().map(|r| exact_all(r, p)).collect();
        }
    }
    Ok(section)
}

fn level_checks(efs: &Efs, m: &InvariantMeasure, depth: usize, precision: usize) -> Result<Vec<LevelCheck>> {
    let mut out = Vec::new();
    for n in 0..=depth {
        let w = transverse_weights(m, n);
        let pushed = crate::efs::mat_vec_alg(efs.pushforward(), &m.level(n + 1));
        out.push(LevelCheck {
            level: n,
            mass: exact(&m.mass(n), precision),
            kirchhoff_zero: residual_is_zero(efs.complex(), &w.weights)?,
            positive: w.positive,
            compatible: pushed == w.weights,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorEntry {
    pub level: usize,
    pub cell: usize,
    pub label: String,
    pub value: Exact,
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeEntry {
    pub depth: usize,
    pub rank: usize,
    pub denominator: Value,
    pub basis: Vec<Exact>,
    pub description: String,
}

fn lattice_entry(depth: usize, l: &Lattice, precision: usize) -> LatticeEntry {
    LatticeEntry {
        depth,
        rank: l.rank(),
        denominator: int_json(&l.denominator),
        basis: exact_all(&l.basis(), precision),
        description: l.to_string(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Query {
    pub expression: String,
    pub value: Exact,
    pub depth: usize,
    pub member: bool,
    /// Integer coefficients on the generators, in generator order.
    pub certificate: Option<Vec<Value>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapLabelSection {
    pub theta: Exact,
    pub min_poly: Vec<Value>,
    pub depth: usize,
    pub generators_per_level: Vec<usize>,
    pub generators: Vec<GeneratorEntry>,
    pub truncations: Vec<LatticeEntry>,
    pub letter_truncations: Vec<LatticeEntry>,
    pub stabilized: bool,
    pub description: String,
    pub queries: Vec<Query>,
}

pub fn gap_label_section(efs: &Efs, m: &InvariantMeasure, opts: &Options) -> Result<GapLabelSection> {
    let p = opts.precision;
    let module = FrequencyModule::new(m, efs.forget(), opts.depth);
    let mut queries = Vec::new();
    for q in &opts.contains {
        let x = parse_expression(q, &module.field)?;
        let mem = contains(&module, &x, opts.depth)?;
        queries.push(Query {
            expression: q.clone(),
            value: exact(&x, p),
            depth: opts.depth,
            member: mem.member(),
            certificate: mem.coefficients.map(|c| c.iter().map(int_json).collect()),
        });
    }
    let top = module.lattice(opts.depth);
    Ok(GapLabelSection {
        theta: exact(&module.theta, p),
        min_poly: poly_json(&m.min_poly),
        depth: opts.depth,
        generators_per_level: vec![m.labels.len(); opts.depth + 1],
        generators: module
            .generators
            .iter()
            .map(|g| GeneratorEntry { level: g.level, cell: g.cell, label: g.label.clone(), value: exact(&g.value, p) })
            .collect(),
        truncations: module.truncations.iter().enumerate().map(|(k, l)| lattice_entry(k, l, p)).collect(),
        letter_truncations: module.letter_truncations.iter().enumerate().map(|(k, l)| lattice_entry(k, l, p)).collect(),
        stabilized: module.stabilized(),
        description: format!("depth-{} truncation {} (rank {}, stabilized: {})", opts.depth, top, top.rank(), module.stabilized()),
        queries,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleSection {
    pub depth: usize,
    pub collared: FrequencyTable,
    pub collared_comparison: OracleComparison,
    pub letters: FrequencyTable,
    pub letter_comparison: OracleComparison,
}

pub fn oracle_section(tower: &Tower, efs: &Efs, m: &InvariantMeasure, opts: &Options) -> Result<OracleSection> {
    let base = &tower.base;
    let k = opts.inflation_depth(base.dimension());
    let tol = BigRational::new(BigInt::from(ORACLE_TOLERANCE.0), BigInt::from(ORACLE_TOLERANCE.1));
    let collared = empirical_frequencies(base, k, &tower.styles(), opts.budget)?;
    let collared_comparison = verify_against(&m.labels, &transverse_weights(m, 0), &collared, &tol)?;
    let letters = empirical_frequencies(base, k, &[], opts.budget)?;
    let lw = crate::gaplabels::letter_weights(m, efs.forget(), 0);
    let letter_comparison = verify_against(&base.labels(), &crate::measure::WeightSystem::new(0, lw), &letters, &tol)?;
    Ok(OracleSection { depth: k, collared, collared_comparison, letters, letter_comparison })
}

/// Everything computed for one rule.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub depth: usize,
    pub rule: RuleSection,
    pub collar: CollarSection,
    pub complex: ComplexSection,
    pub homology: HomologySection,
    pub measure: MeasureSection,
    pub gap_labels: Option<GapLabelSection>,
    pub oracle: Option<OracleSection>,
}

/// The pipeline shared by the subcommands: collaring, complex, sequence and
/// measure.
pub struct Pipeline {
    pub tower: Tower,
    pub uncollared: CellComplex,
    pub efs: Efs,
    pub outcome: MeasureOutcome,
}

impl Pipeline {
    pub fn run(rule: &SubstitutionRule, budget: u64) -> Result<Self> {
        let tower = border_forcing(rule, budget)?;
        let uncollared = build_b0(rule)?;
        let efs = build_efs(&tower)?;
        let outcome = invariant_measure(&efs)?;
        Ok(Self { tower, uncollared, efs, outcome })
    }

    pub fn measure(&self) -> Option<&InvariantMeasure> {
        match &self.outcome {
            MeasureOutcome::Unique(m) => Some(m),
            MeasureOutcome::Rays { .. } => None,
        }
    }
}

pub fn full_report(rule: &SubstitutionRule, opts: &Options) -> Result<Report> {
    let pipe = Pipeline::run(rule, opts.budget)?;
    let measure = measure_section(rule, &pipe.efs, &pipe.outcome, opts)?;
    let (gap_labels, oracle) = match pipe.measure() {
        Some(m) => (Some(gap_label_section(&pipe.efs, m, opts)?), Some(oracle_section(&pipe.tower, &pipe.efs, m, opts)?)),
        None => (None, None),
    };
    Ok(Report {
        tool: "hulltool".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        depth: opts.depth,
        rule: rule_section(rule),
        collar: collar_section(&pipe.tower)?,
        complex: ComplexSection { uncollared: complex_summary(&pipe.uncollared), collared: complex_summary(pipe.efs.complex()) },
        homology: homology_section(&pipe.uncollared, pipe.efs.complex()),
        measure,
        gap_labels,
        oracle,
    })
}

fn groups_line(ds: &[Degree], cohomology: bool) -> String {
    ds.iter()
        .map(|d| {
            let g = if cohomology { &d.cohomology } else { &d.homology };
            format!("{}{}={}", if cohomology { "H^" } else { "H_" }, d.degree, g.display)
        })
        .collect::<Vec<_>>()
        .join(", ")
}

impl Report {
    /// Short human-readable summary.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let r = &self.rule;
        let _ = writeln!(s, "rule {} (dimension {}, tiles {})", r.name.as_deref().unwrap_or("<unnamed>"), r.dimension, r.labels.join(" "));
        let _ = writeln!(s, "primitive: {} (exponent {:?})", r.primitive, r.primitivity_exponent);
        let c = &self.collar;
        let _ = writeln!(s, "collaring: {} -> {} tiles, flat: {}", c.styles.join("+"), c.labels.len(), c.collared.flat);
        let _ = writeln!(s, "complex cells: uncollared {:?}, collared {:?}", self.complex.uncollared.cell_counts, self.complex.collared.cell_counts);
        let _ = writeln!(s, "uncollared: {}", groups_line(&self.homology.uncollared, false));
        let _ = writeln!(s, "collared:   {}", groups_line(&self.homology.collared, false));
        let _ = writeln!(s, "            {}", groups_line(&self.homology.collared, true));
        s.push_str(&self.measure.to_text());
        if let Some(g) = &self.gap_labels {
            s.push_str(&g.to_text());
        }
        if let Some(o) = &self.oracle {
            s.push_str(&o.to_text());
        }
        s
    }
}

impl MeasureSection {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "theta = {} (min poly {})", self.field.theta.decimal, serde_json::to_string(&self.field.min_poly).unwrap_or_default());
        for lv in &self.mu0 {
            let _ = writeln!(s, "  mu0[{}] = {}", lv.label, lv.value.decimal);
        }
        let e = &self.ergodicity;
        let _ = writeln!(s, "uniquely ergodic: {} (diameters {:?})", e.verdict, e.diameters);
        s
    }
}

impl GapLabelSection {
    pub fn to_text(&self) -> String {
        let mut s = format!("gap labels: {}\n", self.description);
        for q in &self.queries {
            let _ = writeln!(s, "  contains {:?}: {}", q.expression, q.member);
        }
        s
    }
}

impl OracleSection {
    pub fn to_text(&self) -> String {
        format!(
            "oracle at depth {}: collared max deviation {:.3e} ({}), letters {:.3e} ({})\n",
            self.depth,
            self.collared_comparison.max_deviation,
            if self.collared_comparison.pass { "pass" } else { "FAIL" },
            self.letter_comparison.max_deviation,
            if self.letter_comparison.pass { "pass" } else { "FAIL" },
        )
    }
}

/// Input of a scripted orbit walk. The start is given at the deepest level:
/// a collared tile and a position inside its level-`depth` supertile, each
/// coordinate an expression in the field generator.
#[derive(Clone, Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkSpec {
    pub depth: usize,
    pub cell: String,
    pub position: Vec<String>,
    /// Translation vectors with rational entries, applied in order.
    pub steps: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointSection {
    /// Cell labels from level 0 up to the deepest level.
    pub cells: Vec<String>,
    pub position: Vec<Exact>,
    pub top_position: Vec<Exact>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WalkStep {
    pub vector: Vec<String>,
    /// `None` when the move leaves the deepest cell; the walk then stays put.
    pub point: Option<PointSection>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WalkSection {
    pub depth: usize,
    pub start: PointSection,
    pub steps: Vec<WalkStep>,
}

fn point_section(efs: &Efs, x: &crate::efs::HullPoint, precision: usize) -> PointSection {
    PointSection {
        cells: x.cells.iter().map(|&c| efs.labels()[c].clone()).collect(),
        position: exact_all(&x.coords[0], precision),
        top_position: exact_all(&x.coords[x.depth()], precision),
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let f = NumberField::rational(BigRational::zero());
    parse_expression(s, &f)?
        .to_rational()
        .ok_or_else(|| crate::error::Error::Expression(format!("{s} is not rational")))
}

pub fn walk_section(efs: &Efs, spec: &WalkSpec, precision: usize) -> Result<WalkSection> {
    let field = &efs.geometry().field;
    let cell = efs
        .labels()
        .iter()
        .position(|l| *l == spec.cell)
        .ok_or_else(|| crate::error::Error::AlphabetMismatch(format!("walk cell {} is not a collared tile", spec.cell)))?;
    let coords = spec.position.iter().map(|s| parse_expression(s, field)).collect::<Result<Vec<_>>>()?;
    let mut x = efs.hull_point(spec.depth, cell, coords)?;
    let start = point_section(efs, &x, precision);
    let mut steps = Vec::with_capacity(spec.steps.len());
    for v in &spec.steps {
        let vector = v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        let shown = vector.iter().map(rat_to_string).collect();
        match efs.translate_point(&x, &vector) {
            Ok(y) => {
                steps.push(WalkStep { vector: shown, point: Some(point_section(efs, &y, precision)), error: None });
                x = y;
            }
            Err(e @ crate::error::Error::Ambiguity { .. }) => {
                steps.push(WalkStep { vector: shown, point: None, error: Some(e.to_string()) })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(WalkSection { depth: spec.depth, start, steps })
}

impl WalkSection {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let show = |p: &PointSection| {
            let pos: Vec<&str> = p.position.iter().map(|e| e.decimal.as_str()).collect();
            format!("{} at ({})", p.cells.join(" < "), pos.join(", "))
        };
        let _ = writeln!(s, "start: {}", show(&self.start));
        for st in &self.steps {
            match (&st.point, &st.error) {
                (Some(p), _) => {
                    let _ = writeln!(s, "+({}): {}", st.vector.join(", "), show(p));
                }
                (None, e) => {
                    let _ = writeln!(s, "+({}): {}", st.vector.join(", "), e.as_deref().unwrap_or("undefined"));
                }
            }
        }
        s
    }
}
