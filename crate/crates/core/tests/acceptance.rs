//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use hulltool::arith::normal_form::smith_normal_form;
use hulltool::arith::{int, rat, AlgebraicNumber, IntMatrix};
use hulltool::collar::{border_forcing, check_flattening, Tower};
use hulltool::complex::{build_b0, kirchhoff_residual, CellComplex};
use hulltool::efs::{build_efs, pairing, Cochain, Efs};
use hulltool::gaplabels::{module_basis, FrequencyModule, Lattice};
use hulltool::homology::cycle_space_basis;
use hulltool::measure::{
    invariant_measure, residual_is_zero, transverse_weights, unique_ergodicity, InvariantMeasure, MeasureOutcome,
    Verdict, WeightSystem,
};
use hulltool::oracle::{empirical_frequencies, verify_against};
use hulltool::ruleset::{parse_rule, SubstitutionRule, DEFAULT_BUDGET};
use hulltool::Error;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RULES: [&str; 6] = ["fibonacci", "thue_morse", "period_doubling", "solenoid", "chair", "thue_morse_2d"];

struct Loaded {
    name: &'static str,
    rule: SubstitutionRule,
    tower: Tower,
    efs: Efs,
    measure: InvariantMeasure,
}

fn rules_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("rules")
}

fn load(name: &'static str) -> Loaded {
    let text = std::fs::read_to_string(rules_dir().join(format!("{name}.json"))).unwrap();
    let rule = parse_rule(&text).unwrap();
    let tower = border_forcing(&rule, DEFAULT_BUDGET).unwrap();
    let efs = build_efs(&tower).unwrap();
    let MeasureOutcome::Unique(measure) = invariant_measure(&efs).unwrap() else { panic!("{name}: measure not unique") };
    Loaded { name, rule, tower, efs, measure }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(n: usize, title: &str, o: &Outcome, elapsed: Duration) -> bool {
    println!("[{}] {n:>2} {title}: {} ({:.2?})", if o.pass { "PASS" } else { "FAIL" }, o.detail, elapsed);
    o.pass
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn c1_chain_complex(all: &[Loaded]) -> Outcome {
    let mut ok = true;
    let mut checked = 0;
    for l in all {
        let b0 = build_b0(&l.rule).unwrap();
        let mut complexes: Vec<&CellComplex> = vec![&b0];
        // The sequence is stationary: every level carries the same complex
        // and the same cellular map, so levels 0..3 are checked through the
        // powers of A★ preserving top cycles.
        for _ in 0..=3 {
            complexes.push(l.efs.complex());
        }
        for x in complexes {
            for i in 2..=x.dimension() {
                let prod = x.boundary_matrix(i - 1).unwrap().mul(x.boundary_matrix(i).unwrap());
                ok &= prod.is_zero();
                checked += 1;
            }
        }
        let top = l.efs.complex().boundary_matrix(l.efs.dimension()).unwrap();
        let mut power = IntMatrix::identity(l.efs.pushforward().rows());
        for _ in 0..=3 {
            for z in cycle_space_basis(l.efs.complex()) {
                ok &= top.mul_vec(&power.mul_vec(&z)).iter().all(Zero::is_zero);
            }
            power = l.efs.pushforward().mul(&power);
        }
    }
    Outcome { pass: ok, detail: format!("{checked} products ∂∂ over 6 rules, levels 0..3, all zero: {ok}") }
}

/// Matrix of the Kirchhoff residual map on integer weights.
fn residual_matrix(x: &CellComplex) -> IntMatrix {
    let d = x.dimension();
    let n = x.cells(d).len();
    let sides = x.side_data();
    let mut cols = Vec::new();
    for j in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[j] = BigInt::one();
        cols.push(kirchhoff_residual(x, &e, &sides).unwrap());
    }
    let rows = cols[0].len();
    IntMatrix::from_big_rows((0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect(), n)
}

fn c2_weights_are_cycles(all: &[Loaded]) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for l in all {
        let b0 = build_b0(&l.rule).unwrap();
        for x in [&b0, l.efs.complex()] {
            let d = x.dimension();
            let r = residual_matrix(x);
            let boundary = x.boundary_matrix(d).unwrap();
            let cycles = cycle_space_basis(x);
            let zero_residual = smith_normal_form(&r).kernel_basis();
            // Z ⊆ W: every cycle has zero residual; W ⊆ Z: every zero-residual
            // vector is a cycle. Equal subspaces meet the cone in equal sets.
            let z_in_w = cycles.iter().all(|z| r.mul_vec(z).iter().all(Zero::is_zero));
            let w_in_z = zero_residual.iter().all(|w| boundary.mul_vec(w).iter().all(Zero::is_zero));
            ok &= z_in_w && w_in_z && cycles.len() == zero_residual.len();
        }
        ok &= residual_is_zero(l.efs.complex(), &l.measure.mu0).unwrap();
        notes.push(format!("{}:{}", l.name, cycle_space_basis(l.efs.complex()).len()));
    }
    Outcome { pass: ok, detail: format!("ker residual = ker ∂_d on 12 complexes; collared cycle ranks {}", notes.join(" ")) }
}

fn c3_measure(all: &[Loaded]) -> Outcome {
    let mut ok = true;
    for l in all {
        let m = &l.measure;
        for n in 0..=8 {
            let lhs = hulltool_mat_vec(l.efs.pushforward(), &m.level(n + 1));
            ok &= lhs == m.level(n);
            ok &= m.level(n).iter().all(AlgebraicNumber::is_positive);
            ok &= m.mass(n) == AlgebraicNumber::one(&m.field);
        }
    }
    Outcome { pass: ok, detail: "A★μ_{n+1} = μ_n, μ_n > 0, mass 1 for n = 0..8 on 6 rules, exact".into() }
}

fn hulltool_mat_vec(m: &IntMatrix, v: &[AlgebraicNumber]) -> Vec<AlgebraicNumber> {
    let f = v[0].field().clone();
    (0..m.rows())
        .map(|i| {
            v.iter().enumerate().fold(AlgebraicNumber::zero(&f), |acc, (j, x)| {
                &acc + &x.scale(&BigRational::from_integer(m.get(i, j).clone()))
            })
        })
        .collect()
}

fn c4_pairing(all: &[Loaded]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut ok = true;
    let mut count = 0;
    for l in all {
        let x = l.efs.complex();
        let d = x.dimension();
        let n = x.cells(d).len();
        let lower = x.cells(d - 1).len();
        let basis = cycle_space_basis(x);
        let f = l.measure.field.clone();
        for _ in 0..200 {
            let mut z = vec![BigInt::zero(); n];
            for b in &basis {
                let k = BigInt::from(rng.gen_range(-5i64..=5));
                for (zi, bi) in z.iter_mut().zip(b) {
                    *zi += &k * bi;
                }
            }
            let w = WeightSystem::new(1, z.iter().map(|k| AlgebraicNumber::from_rational(&f, BigRational::from_integer(k.clone()))).collect());
            let c = Cochain { level: 0, values: big(&(0..n).map(|_| rng.gen_range(-9..=9)).collect::<Vec<_>>()) };
            let lhs = pairing(&l.efs, &l.efs.push_weights(&w).unwrap(), &c).unwrap();
            let rhs = pairing(&l.efs, &w, &l.efs.pull_cochain(&c)).unwrap();
            let b = big(&(0..lower).map(|_| rng.gen_range(-9..=9)).collect::<Vec<_>>());
            let db = l.efs.coboundary(&b, 1).unwrap();
            let c1 = l.efs.pull_cochain(&c);
            let shifted = Cochain { level: 1, values: c1.values.iter().zip(&db.values).map(|(a, b)| a + b).collect() };
            let moved = pairing(&l.efs, &w, &shifted).unwrap();
            ok &= lhs == rhs && moved == rhs;
            count += 1;
        }
    }
    Outcome { pass: ok, detail: format!("{count} random instances (200 per rule), exact") }
}

fn reducible_control() -> Efs {
    let x = CellComplex::from_boundaries(
        vec!["p".into(), "q".into()],
        vec![int(1), int(1)],
        vec![vec!["u".into(), "v".into()], vec!["p".into(), "q".into()]],
        vec![IntMatrix::zeros(2, 2)],
    )
    .unwrap();
    Efs::stationary(x, IntMatrix::from_rows(&[vec![2, 0], vec![0, 2]])).unwrap()
}

fn c5_ergodicity(all: &[Loaded]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for l in all.iter().filter(|l| l.name != "thue_morse_2d") {
        let c = unique_ergodicity(&l.efs).unwrap();
        let t = c.verdict == Verdict::UniquelyErgodic && c.strictly_decreasing && c.diameters.len() == 6;
        ok &= t;
        let shape = if c.diameters.iter().all(|&x| x == 0.0) { "all 0 (one-dimensional cone)".to_string() } else { format!("{:.3}→{:.1e}", c.diameters[0], c.diameters[5]) };
        parts.push(format!("{} TRUE={} {}", l.name, t, shape));
    }
    let control = reducible_control();
    let c = unique_ergodicity(&control).unwrap();
    let rays = match invariant_measure(&control).unwrap() {
        MeasureOutcome::Rays { rays, .. } => rays.len(),
        MeasureOutcome::Unique(_) => 0,
    };
    let control_ok = c.verdict == Verdict::Unknown && c.extremal_rays == 2 && rays == 2;
    ok &= control_ok;
    parts.push(format!("diag(2,2) UNKNOWN with {} rays", c.extremal_rays));
    Outcome { pass: ok, detail: parts.join("; ") }
}

/// Independent oracle for rational θ: solve (A − θI)v = 0 by rational
/// elimination, normalise to sum 1, and return the generator g of the
/// ℤ-span of the entries, so that span = gℤ.
fn rational_span_generator(a: &IntMatrix, theta: i64) -> BigRational {
    let n = a.rows();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from_integer(a.get(i, j) - if i == j { BigInt::from(theta) } else { BigInt::zero() })).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..n).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free = (0..n).find(|c| !pivots.contains(c)).expect("one-dimensional eigenspace");
    let mut v = vec![BigRational::zero(); n];
    v[free] = BigRational::one();
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = -m[row][free].clone();
    }
    let total: BigRational = v.iter().sum();
    let v: Vec<BigRational> = v.iter().map(|x| x / &total).collect();
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(&(x * BigRational::from_integer(den.clone())).to_integer()));
    BigRational::new(g, den)
}

fn same_lattice(l: &Lattice, expected: &[AlgebraicNumber]) -> bool {
    let e = module_basis(&expected[0].field().clone(), expected);
    e.basis().iter().all(|b| l.contains(b)) && l.basis().iter().all(|b| e.contains(b))
}

fn c6_gap_labels(all: &[Loaded]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let get = |n: &str| all.iter().find(|l| l.name == n).unwrap();

    let sol = get("solenoid");
    let f = sol.measure.field.clone();
    let module = FrequencyModule::new(&sol.measure, sol.efs.forget(), 3);
    let eighth = AlgebraicNumber::from_rational(&f, rat(1, 8));
    let s_ok = same_lattice(module.lattice(3), std::slice::from_ref(&eighth));
    ok &= s_ok;
    parts.push(format!("solenoid depth 3 = (1/8)Z: {s_ok}"));

    let pd = get("period_doubling");
    let f = pd.measure.field.clone();
    let module = FrequencyModule::new(&pd.measure, pd.efs.forget(), 4);
    // Golden generators, computed by the rational oracle and frozen: the
    // collared level-0 weights span (1/6)Z, the letter weights (1/3)Z.
    let collared_g0 = rational_span_generator(pd.efs.pushforward(), 2);
    let letter_g0 = rational_span_generator(&hulltool::ruleset::abelianization(&pd.rule), 2);
    ok &= collared_g0 == rat(1, 6) && letter_g0 == rat(1, 3);
    let mut pd_ok = true;
    for k in 0..=4 {
        let two_k = BigRational::from_integer(BigInt::from(1u64 << k));
        let letters = AlgebraicNumber::from_rational(&f, &letter_g0 / &two_k);
        let collared = AlgebraicNumber::from_rational(&f, &collared_g0 / &two_k);
        pd_ok &= same_lattice(&module.letter_truncations[k], &[letters]);
        pd_ok &= same_lattice(&module.truncations[k], &[collared]);
    }
    ok &= pd_ok;
    parts.push(format!("period-doubling depth k: letter cylinders (1/(3·2^k))Z, collared (1/(3·2^(k+1)))Z for k=0..4: {pd_ok}"));

    let fib = get("fibonacci");
    let f = fib.measure.field.clone();
    let module = FrequencyModule::new(&fib.measure, fib.efs.forget(), 2);
    let lam = AlgebraicNumber::generator(&f);
    let expected = [AlgebraicNumber::one(&f), lam.pow(-1), lam.pow(-2)];
    let f_ok = same_lattice(module.lattice(2), &expected) && same_lattice(&module.letter_truncations[2], &expected);
    ok &= f_ok;
    parts.push(format!("Fibonacci depth 2 = span{{1, λ⁻¹, λ⁻²}}: {f_ok}"));
    Outcome { pass: ok, detail: parts.join("; ") }
}

fn c7_oracle(all: &[Loaded]) -> Outcome {
    let tol = rat(1, 1000);
    let mut ok = true;
    let mut letters = Vec::new();
    let mut collared = Vec::new();
    for l in all {
        let k = if l.rule.dimension() == 1 { 20 } else { 8 };
        let lt = empirical_frequencies(&l.rule, k, &[], DEFAULT_BUDGET).unwrap();
        let lw = WeightSystem::new(0, hulltool::gaplabels::letter_weights(&l.measure, l.efs.forget(), 0));
        let c = verify_against(&l.rule.labels(), &lw, &lt, &tol).unwrap();
        ok &= c.pass;
        letters.push(format!("{} {:.1e}", l.name, c.max_deviation));
        let ct = empirical_frequencies(&l.rule, k, &l.tower.styles(), DEFAULT_BUDGET).unwrap();
        let cc = verify_against(&l.measure.labels, &transverse_weights(&l.measure, 0), &ct, &tol).unwrap();
        collared.push(format!("{} {:.2e}{}", l.name, cc.max_deviation, if cc.pass { "" } else { " (over 1e-3)" }));
    }
    Outcome {
        pass: ok,
        detail: format!(
            "letter cylinders at depth 20/8, tol 1e-3, max deviation: {}; collared cylinders (reported): {}",
            letters.join(", "),
            collared.join(", ")
        ),
    }
}

fn c8_flattening(all: &[Loaded]) -> Outcome {
    let get = |n: &str| all.iter().find(|l| l.name == n).unwrap();
    let fib = get("fibonacci");
    let tm = get("thue_morse");
    let fib_flat = check_flattening(fib.tower.rule(), fib.efs.complex()).flat;
    let tm_flat = check_flattening(tm.tower.rule(), tm.efs.complex()).flat;
    let raw = check_flattening(&fib.rule, &build_b0(&fib.rule).unwrap());
    let witness = raw.witness.as_ref().map(|w| {
        (w.first.1 != w.second.1, format!("cell {} face {}: {}→{} vs {}→{}", w.cell, w.face, w.first.0, w.first.1, w.second.0, w.second.1))
    });
    let wok = witness.as_ref().is_some_and(|w| w.0);
    Outcome {
        pass: fib_flat && tm_flat && !raw.flat && wok,
        detail: format!(
            "collared Fibonacci flat {fib_flat}, collared Thue–Morse flat {tm_flat}, uncollared Fibonacci flat {} with witness [{}]",
            raw.flat,
            witness.map(|w| w.1).unwrap_or_default()
        ),
    }
}

fn c9_translation(all: &[Loaded]) -> Outcome {
    let fib = all.iter().find(|l| l.name == "fibonacci").unwrap();
    let e = &fib.efs;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut agree, mut both_fail, mut excursions, mut bad) = (0, 0, 0, 0);
    let depth = 4;
    let n = e.rule().unwrap().len();
    for _ in 0..500 {
        let cell = rng.gen_range(0..n);
        let frac = rat(rng.gen_range(0..1000), 1000);
        let y = e.extent(cell, 0, depth).scale(&frac);
        let x = e.hull_point(depth, cell, vec![y]).unwrap();
        let u = rat(rng.gen_range(-400..=400), 100);
        let v = rat(rng.gen_range(-400..=400), 100);
        let direct = e.translate_point(&x, &[&u + &v]);
        let composite = e.translate_point(&x, &[u]).and_then(|y| e.translate_point(&y, &[v]));
        match (direct, composite) {
            (Ok(a), Ok(b)) if a == b && e.is_consistent(&a) => agree += 1,
            (Err(Error::Ambiguity { .. }), Err(Error::Ambiguity { .. })) => both_fail += 1,
            // The intermediate point left the truncation while the end point
            // did not: the composite is undefined, the direct move is not.
            (Ok(_), Err(Error::Ambiguity { .. })) => excursions += 1,
            _ => bad += 1,
        }
    }
    Outcome {
        pass: bad == 0 && agree > 0 && both_fail > 0,
        detail: format!("500 triples at depth 4: {agree} equal, {both_fail} both ambiguous, {excursions} intermediate excursions, {bad} violations"),
    }
}

fn c10_determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_hulltool");
    let mut ok = true;
    for name in RULES {
        let path = rules_dir().join(format!("{name}.json"));
        let run = || Command::new(exe).arg("report").arg(&path).output().unwrap();
        let (a, b) = (run(), run());
        ok &= a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    }
    Outcome { pass: ok, detail: "two consecutive `report` runs per bundled rule, byte-identical".into() }
}

fn main() {
    let start = Instant::now();
    let all: Vec<Loaded> = RULES.iter().map(|&n| load(n)).collect();
    println!("acceptance: pipeline for 6 rules built in {:.2?}", start.elapsed());
    let mut pass = true;
    let timed = |f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        (o, t.elapsed())
    };
    type Criterion<'a> = (usize, &'a str, Option<u64>, &'a dyn Fn() -> Outcome);
    let limits: [Criterion; 10] = [
        (1, "chain-complex soundness", Some(5), &|| c1_chain_complex(&all)),
        (2, "weight systems are non-negative top cycles", None, &|| c2_weights_are_cycles(&all)),
        (3, "measure consistency", Some(10), &|| c3_measure(&all)),
        (4, "pairing adjointness and coboundary invariance", None, &|| c4_pairing(&all)),
        (5, "unique ergodicity certificate", None, &|| c5_ergodicity(&all)),
        (6, "gap-label goldens", Some(10), &|| c6_gap_labels(&all)),
        (7, "oracle agreement", Some(30), &|| c7_oracle(&all)),
        (8, "flattening / forcing the border", None, &|| c8_flattening(&all)),
        (9, "hull translation action law", None, &|| c9_translation(&all)),
        (10, "determinism", None, &c10_determinism),
    ];
    for (n, title, limit, f) in limits {
        let (mut o, t) = timed(f);
        if let Some(s) = limit {
            if t > Duration::from_secs(s) {
                o.pass = false;
                o.detail.push_str(&format!("; over the {s} s limit"));
            }
        }
        pass &= report(n, title, &o, t);
    }
    println!("acceptance: {} in {:.2?}", if pass { "all criteria pass" } else { "FAILURES" }, start.elapsed());
    if !pass {
        std::process::exit(1);
    }
}
