//! Collared refinements: each tile remembers its neighbours, so that the
//! induced substitution maps every branch locus onto a single sheet.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::complex::{build_complex, CellComplex, Face, Germ, Side};
use crate::error::{Error, Result};
use crate::ruleset::{
    box_positions, legal_patches, require_primitive, LegalPatches, Patch, Prototile, SubstitutionRule,
};

/// Maximum number of collaring rounds before giving up.
pub const MAX_ROUNDS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CollarStyle {
    /// Neighbours across (d−1)-faces only.
    Face,
    /// The full 3×…×3 neighbourhood.
    Corner,
}

impl CollarStyle {
    pub fn name(self) -> &'static str {
        match self {
            CollarStyle::Face => "face",
            CollarStyle::Corner => "corner",
        }
    }

    /// Window offsets recorded by this style, as row-major indices into the
    /// 3^d neighbourhood (the centre included).
    fn mask(self, d: usize) -> Vec<usize> {
        let shape = vec![3; d];
        box_positions(&shape)
            .enumerate()
            .filter(|(_, pos)| {
                let off = pos.iter().filter(|&&p| p != 1).count();
                match self {
                    CollarStyle::Face => off <= 1,
                    CollarStyle::Corner => true,
                }
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// A tile together with the labels around it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CollaredTile {
    pub core: usize,
    /// Row-major 3^d neighbourhood; `None` where the style records nothing.
    pub corona: Vec<Option<usize>>,
}

impl CollaredTile {
    pub fn label(&self, base: &SubstitutionRule) -> String {
        let d = base.dimension();
        let centre = (3usize.pow(d as u32) - 1) / 2;
        let ns: Vec<&str> = self
            .corona
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != centre)
            .filter_map(|(_, t)| t.map(|t| base.label(t)))
            .collect();
        format!("{}[{}]", base.label(self.core), ns.join(","))
    }
}

#[derive(Clone, Debug)]
pub struct CollaredRule {
    pub style: CollarStyle,
    pub tiles: Vec<CollaredTile>,
    /// Substitution on the collared alphabet.
    pub rule: SubstitutionRule,
    /// Collared tile index to base tile index.
    pub forget: Vec<usize>,
}

/// Collared tiles occurring in legal neighbourhoods, sorted.
pub fn enumerate_collared(base: &SubstitutionRule, legal: &LegalPatches, style: CollarStyle) -> Vec<CollaredTile> {
    let d = base.dimension();
    let mask = style.mask(d);
    let centre = (3usize.pow(d as u32) - 1) / 2;
    let set: BTreeSet<CollaredTile> = legal
        .neighbourhoods(d)
        .into_iter()
        .map(|w| {
            let mut corona = vec![None; w.len()];
            for &i in &mask {
                corona[i] = Some(w.cells()[i]);
            }
            CollaredTile { core: w.cells()[centre], corona }
        })
        .collect();
    set.into_iter().collect()
}

/// Tile at offset `x` from the lower corner of the centre block inside the
/// inflation of a neighbourhood, when the neighbourhood records it.
fn inflated_lookup(base: &SubstitutionRule, corona: &[Option<usize>], x: &[i64]) -> Option<usize> {
    let d = base.dimension();
    let centre = corona[(3usize.pow(d as u32) - 1) / 2]?;
    let mut block = vec![0usize; d];
    let mut inner = vec![0usize; d];
    match base.expansion() {
        None => {
            let n = base.image(centre).len() as i64;
            let x = x[0];
            if x < 0 {
                let left = corona[0]?;
                let m = base.image(left).len() as i64;
                if x < -m {
                    return None;
                }
                block[0] = 0;
                inner[0] = (m + x) as usize;
            } else if x >= n {
                let right = corona[2]?;
                let m = base.image(right).len() as i64;
                if x - n >= m {
                    return None;
                }
                block[0] = 2;
                inner[0] = (x - n) as usize;
            } else {
                block[0] = 1;
                inner[0] = x as usize;
            }
        }
        Some(k) => {
            for a in 0..d {
                let k = k[a] as i64;
                let b = x[a].div_euclid(k);
                if !(-1..=1).contains(&b) {
                    return None;
                }
                block[a] = (b + 1) as usize;
                inner[a] = x[a].rem_euclid(k) as usize;
            }
        }
    }
    let window = Patch::new(vec![3; d], vec![0; 3usize.pow(d as u32)]);
    let t = corona[window.index(&block)]?;
    Some(base.image(t).get(&inner))
}

/// Collared label of every cell of the inflated centre block.
fn collared_image(
    base: &SubstitutionRule,
    corona: &[Option<usize>],
    mask: &[usize],
    index: &HashMap<CollaredTile, usize>,
    owner: &str,
) -> Result<Patch> {
    let d = base.dimension();
    let core = corona[(3usize.pow(d as u32) - 1) / 2].expect("centre is always recorded");
    let img = base.image(core);
    let window = Patch::new(vec![3; d], vec![0; 3usize.pow(d as u32)]);
    let mut cells = Vec::with_capacity(img.len());
    for idx in 0..img.len() {
        let p = img.coords(idx);
        let mut ncorona = vec![None; window.len()];
        for &m in mask {
            let off = window.coords(m);
            let x: Vec<i64> = p.iter().zip(&off).map(|(&p, &o)| p as i64 + o as i64 - 1).collect();
            let t = inflated_lookup(base, corona, &x).ok_or_else(|| {
                Error::WellDefinedness(format!("the collar of {owner} does not determine its inflated surroundings"))
            })?;
            ncorona[m] = Some(t);
        }
        let ct = CollaredTile { core: img.cells()[idx], corona: ncorona };
        let j = index.get(&ct).copied().ok_or_else(|| {
            Error::WellDefinedness(format!(
                "the inflation of {owner} contains the collared tile {}, which never occurs",
                ct.label(base)
            ))
        })?;
        cells.push(j);
    }
    Ok(Patch::new(img.shape().to_vec(), cells))
}

/// The substitution induced on collared tiles.
pub fn collared_rule(base: &SubstitutionRule, legal: &LegalPatches, style: CollarStyle) -> Result<CollaredRule> {
    let d = base.dimension();
    let tiles = enumerate_collared(base, legal, style);
    if tiles.is_empty() {
        return Err(Error::WellDefinedness("no complete neighbourhood occurs".into()));
    }
    let mask = style.mask(d);
    let index: HashMap<CollaredTile, usize> = tiles.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let labels: Vec<String> = tiles.iter().map(|t| t.label(base)).collect();
    let mut images = Vec::with_capacity(tiles.len());
    for (t, label) in tiles.iter().zip(&labels) {
        images.push(collared_image(base, &t.corona, &mask, &index, label)?);
    }
    // Every full neighbourhood extending a collared tile must give the same
    // image; the image is read from the collar alone, so this re-derives it
    // from each extension and compares.
    let centre = (3usize.pow(d as u32) - 1) / 2;
    for w in legal.neighbourhoods(d) {
        let full: Vec<Option<usize>> = w.cells().iter().map(|&c| Some(c)).collect();
        let mut corona = vec![None; w.len()];
        for &i in &mask {
            corona[i] = full[i];
        }
        let ct = CollaredTile { core: w.cells()[centre], corona };
        let j = index[&ct];
        let again = collared_image(base, &full, &mask, &index, &labels[j])?;
        if again != images[j] {
            return Err(Error::WellDefinedness(format!(
                "two legal surroundings of {} inflate to different collared patches",
                labels[j]
            )));
        }
    }
    let protos = tiles
        .iter()
        .zip(&labels)
        .map(|(t, l)| Prototile { label: l.clone(), dims: base.tiles()[t.core].dims.clone() })
        .collect();
    let rule = SubstitutionRule::new(d, protos, base.expansion().map(<[usize]>::to_vec), images)?;
    let forget = tiles.iter().map(|t| t.core).collect();
    Ok(CollaredRule { style, tiles, rule, forget })
}

impl CollaredRule {
    /// forget ∘ σ_collared = σ ∘ forget, checked tile by tile.
    pub fn commutes_with_forgetting(&self, base: &SubstitutionRule) -> bool {
        (0..self.rule.len()).all(|i| {
            let img = self.rule.image(i);
            let down: Vec<usize> = img.cells().iter().map(|&c| self.forget[c]).collect();
            base.image(self.forget[i]).cells() == down.as_slice()
        })
    }
}

/// Two germs of one branch cell whose inflations land on different sheets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatteningWitness {
    pub cell: String,
    pub face: String,
    pub first: (String, String),
    pub second: (String, String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatteningReport {
    pub flat: bool,
    pub witness: Option<FlatteningWitness>,
    pub cells_checked: usize,
}

/// Whether the self-map of the complex induced by `rule` sends the star of
/// every lower-dimensional cell into a single sheet: all germs of a cell
/// lying on the same side must inflate to the same tile at each position
/// along the face.
pub fn check_flattening(rule: &SubstitutionRule, complex: &CellComplex) -> FlatteningReport {
    let d = rule.dimension();
    let mut checked = 0;
    for k in 0..d {
        for cell in complex.cells(k) {
            checked += 1;
            let mut seen: BTreeMap<(Face, Vec<usize>), (usize, usize)> = BTreeMap::new();
            for Germ { tile, face } in &cell.germs {
                let img = rule.image(*tile);
                for idx in 0..img.len() {
                    let q = img.coords(idx);
                    let on_face = (0..d).all(|a| match face.0[a] {
                        Side::Low => q[a] == 0,
                        Side::High => q[a] + 1 == img.shape()[a],
                        Side::Free => true,
                    });
                    if !on_face {
                        continue;
                    }
                    let sub: Vec<usize> = face.free_axes().iter().map(|&a| q[a]).collect();
                    let target = img.cells()[idx];
                    match seen.get(&(face.clone(), sub.clone())) {
                        Some(&(t0, img0)) if img0 != target => {
                            return FlatteningReport {
                                flat: false,
                                witness: Some(FlatteningWitness {
                                    cell: cell.id.clone(),
                                    face: face.to_string(),
                                    first: (rule.label(t0).to_string(), rule.label(img0).to_string()),
                                    second: (rule.label(*tile).to_string(), rule.label(target).to_string()),
                                }),
                                cells_checked: checked,
                            };
                        }
                        Some(_) => {}
                        None => {
                            seen.insert((face.clone(), sub), (*tile, target));
                        }
                    }
                }
            }
        }
    }
    FlatteningReport { flat: true, witness: None, cells_checked: checked }
}

/// Result of collaring until the flattening condition holds.
#[derive(Clone, Debug)]
pub struct Tower {
    pub base: SubstitutionRule,
    pub rounds: Vec<CollaredRule>,
    /// One line per attempt, in order.
    pub diagnostics: Vec<String>,
    pub legal: LegalPatches,
    pub complex: CellComplex,
    pub flattening: FlatteningReport,
}

impl Tower {
    /// The collared rule the sequence is built from.
    pub fn rule(&self) -> &SubstitutionRule {
        self.rounds.last().map_or(&self.base, |r| &r.rule)
    }

    /// Composite map from the final alphabet to base tiles.
    pub fn forget(&self) -> Vec<usize> {
        let mut map: Vec<usize> = (0..self.rule().len()).collect();
        for r in self.rounds.iter().rev() {
            map = map.into_iter().map(|i| r.forget[i]).collect();
        }
        map
    }

    pub fn styles(&self) -> Vec<CollarStyle> {
        self.rounds.iter().map(|r| r.style).collect()
    }
}

/// Collars a primitive rule (face coronas first, corner coronas when the
/// dimension allows it) until its induced self-map flattens.
pub fn border_forcing(base: &SubstitutionRule, budget: u64) -> Result<Tower> {
    require_primitive(base)?;
    let d = base.dimension();
    let styles: &[CollarStyle] = if d == 1 { &[CollarStyle::Face] } else { &[CollarStyle::Face, CollarStyle::Corner] };
    let mut rounds: Vec<CollaredRule> = Vec::new();
    let mut diagnostics = Vec::new();
    let mut current = base.clone();
    let mut current_legal = legal_patches(&current, budget)?;
    for round in 1..=MAX_ROUNDS {
        let mut last = None;
        for &style in styles {
            let attempt = collared_rule(&current, &current_legal, style);
            let c = match attempt {
                Ok(c) => c,
                Err(e @ Error::WellDefinedness(_)) => {
                    diagnostics.push(format!("round {round}, {} collars: {e}", style.name()));
                    continue;
                }
                Err(e) => return Err(e),
            };
            let legal = legal_patches(&c.rule, budget)?;
            let complex = build_complex(&c.rule, &legal);
            let report = check_flattening(&c.rule, &complex);
            let sizes = complex.cell_counts();
            if report.flat {
                diagnostics.push(format!(
                    "round {round}, {} collars: {} tiles, cells {:?}, flat",
                    style.name(),
                    c.rule.len(),
                    sizes
                ));
                rounds.push(c);
                return Ok(Tower { base: base.clone(), rounds, diagnostics, legal, complex, flattening: report });
            }
            let w = report.witness.as_ref().expect("non-flat report has a witness");
            diagnostics.push(format!(
                "round {round}, {} collars: {} tiles, not flat at {} (face {}: {} -> {}, {} -> {})",
                style.name(),
                c.rule.len(),
                w.cell,
                w.face,
                w.first.0,
                w.first.1,
                w.second.0,
                w.second.1
            ));
            last = Some((c, legal));
        }
        let Some((c, legal)) = last else {
            return Err(Error::WellDefinedness(diagnostics.join("; ")));
        };
        current = c.rule.clone();
        current_legal = legal;
        rounds.push(c);
    }
    Err(Error::Flattening(format!("no flat collaring within {MAX_ROUNDS} rounds: {}", diagnostics.join("; "))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ruleset::{parse_rule, DEFAULT_BUDGET};

    const FIB: &str = r#"{"dimension":1,"tiles":[{"label":"a"},{"label":"b"}],"images":{"a":"ab","b":"a"}}"#;

    #[test]
    fn fibonacci_collars_once() {
        let base = parse_rule(FIB).unwrap();
        let legal = legal_patches(&base, DEFAULT_BUDGET).unwrap();
        let c = collared_rule(&base, &legal, CollarStyle::Face).unwrap();
        let labels = c.rule.labels();
        assert_eq!(labels, vec!["a[a,b]", "a[b,a]", "a[b,b]", "b[a,a]"]);
        assert!(c.commutes_with_forgetting(&base));
        let img = |l: &str| {
            let i = c.rule.index_of(l).unwrap();
            c.rule.image(i).cells().iter().map(|&j| labels[j].clone()).collect::<Vec<_>>()
        };
        assert_eq!(img("b[a,a]"), vec!["a[b,a]"]);
        assert_eq!(img("a[a,b]"), vec!["a[b,b]", "b[a,a]"]);

        let b0 = build_complex(&base, &legal);
        let raw = check_flattening(&base, &b0);
        assert!(!raw.flat);
        let w = raw.witness.unwrap();
        assert_ne!(w.first.1, w.second.1);

        let tower = border_forcing(&base, DEFAULT_BUDGET).unwrap();
        assert_eq!(tower.rounds.len(), 1);
        assert!(tower.flattening.flat);
        assert_eq!(tower.complex.cell_counts(), vec![3, 4]);
        assert_eq!(tower.forget(), vec![0, 0, 0, 1]);
    }

    #[test]
    fn single_tile_rule_is_its_own_collaring() {
        let base = parse_rule(r#"{"dimension":1,"tiles":[{"label":"a"}],"images":{"a":"aa"}}"#).unwrap();
        let tower = border_forcing(&base, DEFAULT_BUDGET).unwrap();
        assert_eq!(tower.rule().len(), 1);
        assert_eq!(tower.rule().image(0).cells(), &[0, 0]);
        let b0 = build_complex(&base, &legal_patches(&base, DEFAULT_BUDGET).unwrap());
        assert!(check_flattening(&base, &b0).flat);
    }
}
