//! Acceptance suite: one line per criterion, `PASS` or `FAIL` with detail.
//!
//! Criterion 8 asks for two things that cannot both hold. The entries of the
//! Gauss factors on the simple-root pattern give currents that pass every
//! consistency check. The entries off that pattern (composite roots such as
//! `alpha_1 + alpha_2`) are nonzero from rank two on. Both readings are
//! printed; the process fails only if an outcome differs from that analysis.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use qaffine::drinfeld::{self, check_drinfeld_relations, extract_currents, BlockSeries, Extraction};
use qaffine::evalrep::{selfcheck, EvalRep, InvariantVec};
use qaffine::lops::EvalL;
use qaffine::matseries::QSeries;
use qaffine::qadm::{cache, parse_checks, run, RunConfig};
use qaffine::qfield::QScalar;
use qaffine::report::{CheckOutcome, Status};
use qaffine::rootdata::{AffineType, Family};
use qaffine::rsolver::{solve_theta, weight_vectors, RArtifact, YbeVariant};

const MINIMAL: [(Family, usize); 7] = [
    (Family::A1, 1),
    (Family::B1, 3),
    (Family::C1, 2),
    (Family::D1, 4),
    (Family::A2even, 2),
    (Family::A2odd, 3),
    (Family::D2, 2),
];

const UNTWISTED: [(Family, usize); 4] = [(Family::A1, 1), (Family::C1, 2), (Family::B1, 3), (Family::D1, 4)];

type Solved = (EvalRep, RArtifact);
type SolvedCells = Mutex<HashMap<(Family, usize, i64), Arc<OnceLock<Solved>>>>;

fn solved(f: Family, l: usize, k: i64) -> Arc<OnceLock<Solved>> {
    static CELLS: OnceLock<SolvedCells> = OnceLock::new();
    let cell = CELLS.get_or_init(Default::default).lock().unwrap().entry((f, l, k)).or_default().clone();
    cell.get_or_init(|| {
        let rep = EvalRep::build(AffineType::new(f, l).unwrap()).unwrap();
        let art = solve_theta(&rep, k).unwrap_or_else(|e| panic!("solve {f:?}{l} K={k}: {e}"));
        (rep, art)
    });
    cell
}

fn name(f: Family, l: usize) -> String {
    AffineType::new(f, l).unwrap().to_string()
}

/// Order used for the structural and classical comparisons.
fn structure_order(f: Family) -> i64 {
    match f {
        Family::A1 | Family::C1 | Family::B1 => 3,
        _ => 2,
    }
}

struct Line {
    criterion: &'static str,
    ok: bool,
    detail: String,
}

impl Line {
    fn new(criterion: &'static str, ok: bool, detail: impl Into<String>) -> Self {
        Line { criterion, ok, detail: detail.into() }
    }
}

fn failures(results: &[(String, CheckOutcome)]) -> Vec<String> {
    results.iter().filter(|(_, o)| !o.passed()).map(|(t, o)| format!("{t} {}: {} (order {})", o.name, o.detail, o.certified_order)).collect()
}

fn summary(ok: bool, timing: &[(String, Duration)], fails: Vec<String>) -> String {
    let times: Vec<String> = timing.iter().map(|(t, d)| format!("{t} {:.2}s", d.as_secs_f64())).collect();
    if ok {
        times.join(", ")
    } else {
        fails.join("; ")
    }
}

fn criterion_1() -> Line {
    let mut timing = vec![];
    let mut fails = vec![];
    for (f, l) in MINIMAL {
        let t0 = Instant::now();
        let rep = EvalRep::build(AffineType::new(f, l).unwrap()).unwrap();
        let sc = selfcheck(&rep);
        let dt = t0.elapsed();
        if !sc.ok() {
            fails.push(format!("{}: {}", name(f, l), sc.failures.join(",")));
        }
        if dt > Duration::from_secs(10) {
            fails.push(format!("{} took {dt:?}", name(f, l)));
        }
        timing.push((name(f, l), dt));
    }
    let ok = fails.is_empty();
    Line::new("1", ok, summary(ok, &timing, fails))
}

fn criterion_2() -> Line {
    let mut fails = vec![];
    let mut count = 0;
    for (f, l) in MINIMAL {
        let cell = solved(f, l, 1);
        let (rep, art) = cell.get().unwrap();
        for i in 0..=l {
            let qi = rep.ctx.q_pow(rep.datum.d[i]);
            let coef = qi.sub(&qi.inv().unwrap()).neg();
            let expect = rep.e[i].kron(&rep.f[i]).scale(&coef);
            let mut mu = vec![0i64; l + 1];
            mu[i] = 1;
            count += 1;
            if art.theta.get(&mu) != Some(&expect) {
                fails.push(format!("{} node {i}", name(f, l)));
            }
        }
    }
    let ok = fails.is_empty();
    Line::new("2", ok, if ok { format!("{count} simple roots over 7 types") } else { fails.join("; ") })
}

fn criterion_3_4() -> (Line, Line) {
    let mut timing = vec![];
    let mut structure = vec![];
    let mut classical = vec![];
    let cases = [(Family::A1, 1), (Family::A1, 2), (Family::C1, 2), (Family::B1, 3), (Family::D1, 4), (Family::A2even, 2), (Family::A2odd, 3), (Family::D2, 2)];
    let mut slow = vec![];
    for (f, l) in cases {
        let k = structure_order(f);
        let t0 = Instant::now();
        let cell = solved(f, l, k);
        let (rep, art) = cell.get().unwrap();
        let s = CheckOutcome::combine("structure", vec![art.check_integral_powers(), art.check_structure(&rep.datum)]);
        let dt = t0.elapsed();
        if dt > Duration::from_secs(300) {
            slow.push(format!("{} took {dt:?}", name(f, l)));
        }
        timing.push((format!("{} K={k}", name(f, l)), dt));
        structure.push((name(f, l), s));
        classical.push((name(f, l), art.check_classical(rep)));
    }
    let mut f3 = failures(&structure);
    f3.extend(slow);
    let ok3 = f3.is_empty();
    let f4 = failures(&classical);
    let ok4 = f4.is_empty();
    let orders: Vec<String> = classical.iter().map(|(t, o)| format!("{t} order {}", o.certified_order)).collect();
    (Line::new("3", ok3, summary(ok3, &timing, f3)), Line::new("4", ok4, if ok4 { orders.join(", ") } else { f4.join("; ") }))
}

fn criterion_5() -> Line {
    let mut fails = vec![];
    let mut notes = vec![];
    for (f, l, order) in [(Family::A1, 1, 2), (Family::C1, 2, 2), (Family::B1, 3, 1), (Family::D1, 4, 1)] {
        let cell = solved(f, l, structure_order(f));
        let (_, art) = cell.get().unwrap();
        let mut picked = vec![];
        for _ in 0..2 {
            let mut a = art.clone();
            let o = a.select_ybe(order);
            if !o.passed() || o.certified_order < order {
                fails.push(format!("{}: {} at order {}", name(f, l), o.detail, o.certified_order));
            }
            picked.push(a.ybe);
        }
        if picked[0] != picked[1] || picked[0].is_none() {
            fails.push(format!("{}: unstable variant {picked:?}", name(f, l)));
        }
        let v = picked[0].map(|v: YbeVariant| v.to_string()).unwrap_or_default();
        notes.push(format!("{} order {order} variant={v}", name(f, l)));
    }
    let ok = fails.is_empty();
    Line::new("5", ok, if ok { notes.join(", ") } else { fails.join("; ") })
}

fn criterion_6() -> Line {
    let mut results = vec![];
    let cases = [
        (Family::A1, 1, 2),
        (Family::C1, 2, 2),
        (Family::A1, 2, 1),
        (Family::B1, 3, 1),
        (Family::D1, 4, 1),
        (Family::A2even, 2, 1),
        (Family::A2odd, 3, 1),
        (Family::D2, 2, 1),
    ];
    for (f, l, need) in cases {
        let cell = solved(f, l, structure_order(f));
        let (rep, art) = cell.get().unwrap();
        let inv = InvariantVec::build(rep).unwrap();
        let lop = EvalL::build(art, rep).unwrap();
        let mut outs = vec![lop.check_rll(art, need), lop.check_w_relation(&inv, need)];
        if f == Family::A1 {
            outs.push(lop.check_qdet(rep, &inv, need));
        }
        if f == Family::D2 {
            outs.push(lop.check_g_relation(rep));
        }
        for mut o in outs {
            if o.passed() && o.certified_order < need {
                o = CheckOutcome::fail(&o.name, o.certified_order, format!("certified below {need}"));
            }
            results.push((name(f, l), o));
        }
    }
    let fails = failures(&results);
    let ok = fails.is_empty();
    let names: Vec<String> = results.iter().map(|(t, o)| format!("{t} {}@{}", o.name, o.certified_order)).collect();
    Line::new("6", ok, if ok { names.join(", ") } else { fails.join("; ") })
}

fn drinfeld_order(f: Family) -> i64 {
    if f == Family::A1 {
        2
    } else {
        1
    }
}

fn extraction(f: Family, l: usize, k: i64) -> (EvalRep, EvalL, Extraction) {
    let cell = solved(f, l, k);
    let (rep, art) = cell.get().unwrap();
    let lop = EvalL::build(art, rep).unwrap();
    let ex = extract_currents(&lop, rep).unwrap_or_else(|e| panic!("extraction {}: {e}", name(f, l)));
    (rep.clone(), lop, ex)
}

fn criterion_7() -> Line {
    let mut results = vec![];
    for (f, l) in UNTWISTED {
        let cell = solved(f, l, drinfeld_order(f));
        let (rep, art) = cell.get().unwrap();
        let lop = EvalL::build(art, rep).unwrap();
        for plus in [true, false] {
            let blocks = BlockSeries::from_series(lop.series(plus), rep.n);
            let o = match drinfeld::gauss_decompose(&blocks) {
                Ok(g) => g.check(&blocks, if plus { "L+" } else { "L-" }),
                Err(e) => CheckOutcome::fail("gauss", -1, e.to_string()),
            };
            results.push((name(f, l), o));
        }
    }
    let fails = failures(&results);
    let ok = fails.is_empty();
    let names: Vec<String> = results.iter().map(|(t, o)| format!("{t} {}@{}", o.name, o.certified_order)).collect();
    Line::new("7", ok, if ok { names.join(", ") } else { fails.join("; ") })
}

/// Root coordinates of a weight difference over the finite simple roots, by
/// exact elimination against the finite part of the symmetrized Cartan matrix.
fn root_coordinates(rep: &EvalRep, diff: &[i64]) -> Option<Vec<BigRational>> {
    let d = &rep.datum;
    let l = d.rank();
    let mut m: Vec<Vec<BigRational>> = (1..=l)
        .map(|j| {
            let mut row: Vec<BigRational> = (1..=l).map(|k| BigRational::from_integer((d.d[j] * d.cartan[j][k]).into())).collect();
            row.push(BigRational::from_integer(diff[j].into()));
            row
        })
        .collect();
    for c in 0..l {
        let p = (c..l).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..l {
            if r != c && !m[r][c].is_zero() {
                let factor = m[r][c].clone();
                for j in 0..=l {
                    let v = &m[c][j] * &factor;
                    m[r][j] = &m[r][j] - v;
                }
            }
        }
    }
    let coords: Vec<BigRational> = m.iter().map(|row| row[l].clone()).collect();
    let zeroth: BigRational = (1..=l).map(|k| BigRational::from_integer((d.d[0] * d.cartan[0][k]).into()) * &coords[k - 1]).sum();
    (zeroth == BigRational::from_integer(diff[0].into())).then_some(coords)
}

fn diag_ratio(d: &[QSeries], a: usize, b: usize, left: bool) -> QSeries {
    if left {
        d[a].inv().unwrap().mul(&d[b]).unwrap()
    } else {
        d[a].mul(&d[b].inv().unwrap()).unwrap()
    }
}

/// `f(z) -> f(c z)` on a plus series, `f(1/u) -> f(c/u)` on a minus series.
fn at_scaled(s: &QSeries, plus: bool, c: &QScalar) -> QSeries {
    if plus {
        s.rescale(c).unwrap()
    } else {
        s.rescale(&c.inv().unwrap()).unwrap()
    }
}

fn criterion_8() -> (Line, Line) {
    let mut literal = vec![];
    let mut analysis_errors = vec![];
    let mut paper = vec![];
    for (f, l) in UNTWISTED {
        let k = if f == Family::D1 { 2 } else { drinfeld_order(f) };
        let (rep, _, ex) = extraction(f, l, k);
        let off = drinfeld::check_off_pattern(&ex, &rep.datum);
        if !off.passed() {
            literal.push(format!("{} {}", name(f, l), off.detail));
        }
        let pi = weight_vectors(&rep.datum);
        for (sign, g) in [("+", &ex.plus), ("-", &ex.minus)] {
            for (upper, factor) in [(true, &g.upper), (false, &g.lower)] {
                for a in 0..rep.n {
                    for b in 0..rep.n {
                        if a == b || factor.get(a, b).is_zero() {
                            continue;
                        }
                        let diff: Vec<i64> = pi[a].iter().zip(&pi[b]).map(|(x, y)| if upper { x - y } else { y - x }).collect();
                        if diff.iter().all(|&x| x == 0) {
                            continue;
                        }
                        let Some(c) = root_coordinates(&rep, &diff) else {
                            analysis_errors.push(format!("{} L{sign} entry ({},{}) has no root coordinates", name(f, l), a + 1, b + 1));
                            continue;
                        };
                        let height: BigRational = c.iter().sum();
                        if height == BigRational::one() {
                            continue;
                        }
                        let two = BigRational::from_integer(2.into());
                        if !(c.iter().all(|x| x.is_integer() && !x.is_negative()) && height >= two) {
                            analysis_errors.push(format!("{} L{sign} entry ({},{}) is not at a composite positive root", name(f, l), a + 1, b + 1));
                        }
                    }
                }
            }
        }
        let cur = &ex.currents;
        let pc = drinfeld::check_phi_constants(cur, &rep);
        if !pc.passed() {
            paper.push(format!("{} phi constants: {}", name(f, l), pc.detail));
        }
        let ctx = rep.ctx;
        let n = rep.n;
        for (plus, g) in [(true, &ex.plus), (false, &ex.minus)] {
            let d = &g.diag;
            if f == Family::D1 {
                let first = diag_ratio(d, l - 2, l, false);
                let second = diag_ratio(d, l - 1, l + 1, false);
                if first != second {
                    paper.push(format!("{} double ratio differs at order {:?}", name(f, l), first.first_difference(&second)));
                }
            }
            if f == Family::B1 {
                let datum = &rep.datum;
                let h0 = datum.d[0] * datum.h_dual / 2;
                for i in 1..=l {
                    let (sp, sm) = if i == l {
                        (ctx.q_pow(datum.d[l]), ctx.q_pow(-datum.d[l]))
                    } else {
                        let e = datum.d[i] * i as i64 - h0;
                        (ctx.q_pow(e), ctx.q_pow(-e))
                    };
                    let eps_plus = at_scaled(&diag_ratio(d, i - 1, i, false), plus, &sp.inv().unwrap());
                    let eps_minus = at_scaled(&diag_ratio(d, n - i, n - i - 1, true), plus, &sm.inv().unwrap());
                    if eps_plus != eps_minus {
                        paper.push(format!("{} node {i}: strands differ at order {:?}", name(f, l), eps_plus.first_difference(&eps_minus)));
                    }
                }
            }
        }
    }
    let expected_literal = ["C_2^(1)", "B_3^(1)", "D_4^(1)"];
    for t in expected_literal {
        if !literal.iter().any(|s| s.starts_with(t)) {
            analysis_errors.push(format!("{t}: off-pattern entries were expected"));
        }
    }
    if literal.iter().any(|s| s.starts_with("A_1^(1)")) {
        analysis_errors.push("A_1^(1) has no composite roots yet failed".into());
    }
    let lit = Line::new(
        "8",
        false,
        format!("off-pattern entries of L^u - 1, L^l - 1 vanish: {}; every such entry sits at a composite positive root", literal.join("; ")),
    );
    let ok = paper.is_empty();
    let congruence = Line::new(
        "8",
        ok,
        if ok {
            "congruence on the simple-root pattern: readings agree, D_4 double ratio agrees, B_3 strands agree, phi- constant = k_i".to_string()
        } else {
            paper.join("; ")
        },
    );
    if !analysis_errors.is_empty() {
        return (Line::new("8", false, analysis_errors.join("; ")), congruence);
    }
    (lit, congruence)
}

fn criterion_9() -> Line {
    let t0 = Instant::now();
    let mut results = vec![];
    let cases = [(Family::A1, 1, 2), (Family::C1, 2, 1), (Family::B1, 3, 1), (Family::D1, 4, 1), (Family::A1, 2, 1)];
    for (f, l, need) in cases {
        let (rep, _, ex) = extraction(f, l, need);
        for o in check_drinfeld_relations(&ex.currents, &rep) {
            let serre_here = f == Family::A1 && l == 2;
            if o.name == "drinfeld_e" && !serre_here {
                continue;
            }
            let o = if o.passed() && o.certified_order < need {
                CheckOutcome::fail(&o.name, o.certified_order, format!("certified below {need}"))
            } else {
                o
            };
            results.push((name(f, l), o));
        }
    }
    let dt = t0.elapsed();
    let mut fails = failures(&results);
    if dt > Duration::from_secs(1800) {
        fails.push(format!("suite took {dt:?}"));
    }
    let ok = fails.is_empty();
    Line::new("9", ok, if ok { format!("(a)-(d) on A_1, C_2, B_3, D_4; (e) on A_2; {:.2}s", dt.as_secs_f64()) } else { fails.join("; ") })
}

fn criterion_10() -> Line {
    let dirs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    let ty = AffineType::new(Family::C1, 2).unwrap();
    let mut reports = vec![];
    let mut bytes = vec![];
    for (i, dir) in dirs.iter().enumerate() {
        let mut c = RunConfig::new(ty, 2, parse_checks("all", Family::C1).unwrap());
        c.cache_dir = Some(dir.path().to_path_buf());
        c.jobs = 1 + 3 * i;
        reports.push(run(&c).unwrap().lines());
        bytes.push(std::fs::read(c.cache_file().unwrap()).unwrap());
        reports.push(run(&c).unwrap().lines());
        bytes.push(std::fs::read(c.cache_file().unwrap()).unwrap());
    }
    let path = dirs[0].path().join(qaffine::qadm::cache_name(ty, 2));
    let reloaded = cache::to_string(&cache::load(&path).unwrap()).unwrap().into_bytes();
    let mut fails = vec![];
    if reports.windows(2).any(|w| w[0] != w[1]) {
        fails.push("reports differ between runs".to_string());
    }
    if bytes.windows(2).any(|w| w[0] != w[1]) {
        fails.push("cache bytes differ between runs".to_string());
    }
    if reloaded != bytes[0] {
        fails.push("save(load(cache)) changed bytes".to_string());
    }
    let ok = fails.is_empty();
    Line::new("10", ok, if ok { format!("4 runs of C_2^(1) K=2, {} report lines, {} cache bytes", reports[0].len(), bytes[0].len()) } else { fails.join("; ") })
}

fn main() {
    let t0 = Instant::now();
    let (c3, c4) = criterion_3_4();
    let (c8_literal, c8_congruence) = criterion_8();
    let lines = vec![criterion_1(), criterion_2(), c3, c4, criterion_5(), criterion_6(), criterion_7(), c8_literal, c8_congruence, criterion_9(), criterion_10()];
    let mut unexpected = 0;
    for (idx, line) in lines.iter().enumerate() {
        let status = if line.ok { Status::Pass } else { Status::Fail };
        println!("CRITERION {:>2} {status} {}", line.criterion, line.detail);
        let expected_failure = idx == 7 && line.detail.starts_with("off-pattern entries");
        if !line.ok && !expected_failure {
            unexpected += 1;
        }
    }
    println!("acceptance finished in {:.1}s", t0.elapsed().as_secs_f64());
    if unexpected > 0 {
        eprintln!("{unexpected} criterion line(s) failed unexpectedly");
        std::process::exit(1);
    }
}
