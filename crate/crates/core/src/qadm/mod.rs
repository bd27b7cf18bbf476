//! Run configuration, check scheduling and the report line grammar behind
//! the `qadm` command.

pub mod cache;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::drinfeld::{self, BlockSeries};
use crate::error::{Error, Result};
use crate::evalrep::{selfcheck, EvalRep, InvariantVec};
use crate::lops::EvalL;
use crate::report::{CheckOutcome, Status};
use crate::rootdata::{AffineType, Family};
use crate::rsolver::{solve_theta, RArtifact, YbeVariant};

/// Environment variable naming the default cache directory.
pub const CACHE_DIR_ENV: &str = "QADM_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Selfcheck,
    Solve,
    Structure,
    Classical,
    Ybe,
    Rll,
    Wrel,
    Qdet,
    Gauss,
    Drinfeld,
}

impl Check {
    pub const ALL: [Check; 10] = [
        Check::Selfcheck,
        Check::Solve,
        Check::Structure,
        Check::Classical,
        Check::Ybe,
        Check::Rll,
        Check::Wrel,
        Check::Qdet,
        Check::Gauss,
        Check::Drinfeld,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Selfcheck => "selfcheck",
            Check::Solve => "solve",
            Check::Structure => "structure",
            Check::Classical => "classical",
            Check::Ybe => "ybe",
            Check::Rll => "rll",
            Check::Wrel => "wrel",
            Check::Qdet => "qdet",
            Check::Gauss => "gauss",
            Check::Drinfeld => "drinfeld",
        }
    }

    /// Whether the check applies to `family` at all.
    pub fn applies(self, family: Family) -> bool {
        match self {
            Check::Qdet => family == Family::A1,
            Check::Drinfeld => !family.is_twisted(),
            _ => true,
        }
    }
}

impl FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown check `{s}`")))
    }
}

/// `all`, or a comma-separated list of check names.
pub fn parse_checks(s: &str, family: Family) -> Result<Vec<Check>> {
    if s.trim() == "all" {
        return Ok(Check::ALL.into_iter().filter(|c| c.applies(family)).collect());
    }
    let mut out: Vec<Check> = s.split(',').map(str::parse).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub ty: AffineType,
    pub k: i64,
    pub checks: Vec<Check>,
    /// Solved artifacts are looked up here and stored after the run.
    pub cache_dir: Option<PathBuf>,
    /// Extra location for the artifact cache file.
    pub out: Option<PathBuf>,
    pub jobs: usize,
    /// Total order of the Yang-Baxter check; defaults to `min(K, 2)`.
    pub ybe_order: Option<i64>,
}

impl RunConfig {
    pub fn new(ty: AffineType, k: i64, checks: Vec<Check>) -> Self {
        RunConfig { ty, k, checks, cache_dir: None, out: None, jobs: 1, ybe_order: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::OutOfRange(format!("truncation order must be at least 1, got {}", self.k)));
        }
        if self.checks.contains(&Check::Qdet) && self.ty.family != Family::A1 {
            return Err(Error::InvalidType("the quantum determinant check is defined for family A only".into()));
        }
        if self.jobs == 0 {
            return Err(Error::OutOfRange("--jobs must be positive".into()));
        }
        Ok(())
    }

    pub fn cache_file(&self) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|d| d.join(cache_name(self.ty, self.k)))
    }
}

pub fn cache_name(ty: AffineType, k: i64) -> String {
    format!("{}{}-K{}.qaf", ty.family.tag(), ty.rank, k)
}

/// Ordered report lines of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub ty: AffineType,
    pub k: i64,
    pub outcomes: Vec<CheckOutcome>,
}

impl Report {
    pub fn line(&self, o: &CheckOutcome) -> String {
        let mut s = format!(
            "CHECK {} type={}{} K={} certified_order={} status={}",
            o.name,
            self.ty.family.tag(),
            self.ty.rank,
            self.k,
            o.certified_order,
            o.status
        );
        if !o.detail.is_empty() {
            s.push(' ');
            s.push_str(&o.detail.replace('\n', " "));
        }
        s
    }

    pub fn lines(&self) -> Vec<String> {
        self.outcomes.iter().map(|o| self.line(o)).collect()
    }

    pub fn failed(&self) -> bool {
        self.outcomes.iter().any(|o| o.status == Status::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed())
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.lines() {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

struct Shared<'a> {
    rep: &'a EvalRep,
    inv: &'a InvariantVec,
    art: &'a RArtifact,
    lop: std::result::Result<&'a EvalL, String>,
    k: i64,
    ybe_order: i64,
}

fn with_lop(s: &Shared, name: &str, f: impl FnOnce(&EvalL) -> Vec<CheckOutcome>) -> Vec<CheckOutcome> {
    match s.lop {
        Ok(l) => f(l),
        Err(ref e) => vec![CheckOutcome::fail(name, -1, format!("L operators: {e}"))],
    }
}

fn gauss_lines(lop: &EvalL, n: usize) -> Vec<CheckOutcome> {
    [(true, "gauss_plus"), (false, "gauss_minus")]
        .into_iter()
        .map(|(plus, name)| {
            let blocks = BlockSeries::from_series(lop.series(plus), n);
            match drinfeld::gauss_decompose(&blocks) {
                Ok(g) => g.check(&blocks, name),
                Err(e) => CheckOutcome::fail(name, -1, e.to_string()),
            }
        })
        .collect()
}

fn drinfeld_lines(lop: &EvalL, rep: &EvalRep) -> Vec<CheckOutcome> {
    let ex = match drinfeld::extract_currents(lop, rep) {
        Ok(ex) => ex,
        Err(e) => return vec![CheckOutcome::fail("drinfeld_extract", -1, e.to_string())],
    };
    let cur = &ex.currents;
    let mut out = vec![
        CheckOutcome::pass("drinfeld_extract", cur.k, "alternative readings agree"),
        drinfeld::check_phi_constants(cur, rep),
        cur.check_support(),
        cur.check_h_roundtrip(rep),
        drinfeld::check_off_pattern(&ex, &rep.datum),
    ];
    out.extend(drinfeld::check_drinfeld_relations(cur, rep));
    out
}

/// Report lines of one check, plus the Yang-Baxter variant when it selected one.
type CheckResult = (Vec<CheckOutcome>, Option<YbeVariant>);

fn run_check(c: Check, s: &Shared) -> CheckResult {
    let out = match c {
        Check::Selfcheck | Check::Solve => unreachable!("handled by the coordinator"),
        Check::Structure => vec![CheckOutcome::combine("structure", vec![s.art.check_integral_powers(), s.art.check_structure(&s.rep.datum)])],
        Check::Classical => vec![s.art.check_classical(s.rep)],
        Check::Ybe => {
            let mut art = s.art.clone();
            let o = art.select_ybe(s.ybe_order);
            return (vec![o], art.ybe);
        }
        Check::Rll => with_lop(s, "rll", |l| {
            vec![
                CheckOutcome::combine("l_constants", vec![l.check_triangular(), l.check_anchor_blocks(s.rep), l.check_diagonal_constants(s.rep)]),
                l.check_rll(s.art, s.k),
            ]
        }),
        Check::Wrel => with_lop(s, "wrel", |l| {
            let mut v = vec![l.check_w_relation(s.inv, s.k)];
            if s.rep.ty().family == Family::D2 {
                v.push(l.check_g_relation(s.rep));
            }
            v
        }),
        Check::Qdet => with_lop(s, "qdet", |l| vec![l.check_qdet(s.rep, s.inv, s.k)]),
        Check::Gauss => with_lop(s, "gauss", |l| gauss_lines(l, s.rep.n)),
        Check::Drinfeld => with_lop(s, "drinfeld", |l| drinfeld_lines(l, s.rep)),
    };
    (out, None)
}

fn skipped(checks: &[Check], why: &str) -> Vec<CheckOutcome> {
    checks.iter().map(|c| CheckOutcome::skipped(c.name(), why)).collect()
}

fn load_cached(path: &Path, ty: AffineType, k: i64) -> Option<RArtifact> {
    if !path.exists() {
        return None;
    }
    match cache::load(path) {
        Ok(a) if a.ty == ty && a.k == k => Some(a),
        Ok(_) => {
            eprintln!("qadm: ignoring {}: different type or order", path.display());
            None
        }
        Err(e) => {
            eprintln!("qadm: ignoring {}: {e}", path.display());
            None
        }
    }
}

/// Runs the requested checks in dependency order. Errors are reserved for
/// invalid configurations and cache writes; check failures are report lines.
pub fn run(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let ty = config.ty;
    let k = config.k;
    let mut report = Report { ty, k, outcomes: vec![] };
    let downstream: Vec<Check> = config.checks.iter().copied().filter(|c| *c > Check::Solve).collect();

    let (twisted_drinfeld, downstream): (Vec<Check>, Vec<Check>) =
        downstream.into_iter().partition(|c| *c == Check::Drinfeld && ty.family.is_twisted());

    let rep = EvalRep::build(ty)?;
    let sc = selfcheck(&rep);
    let inv = InvariantVec::build(&rep);
    let sc_outcome = match (&inv, sc.ok()) {
        (Ok(_), true) => CheckOutcome::pass("selfcheck", 0, format!("{} relations", sc.passed.len())),
        (Err(e), _) => CheckOutcome::fail("selfcheck", -1, format!("invariant vector: {e}")),
        (Ok(_), false) => CheckOutcome::fail("selfcheck", -1, sc.failures.join(", ")),
    };
    let sc_ok = sc_outcome.passed();
    if config.checks.contains(&Check::Selfcheck) || !sc_ok {
        report.outcomes.push(sc_outcome);
    }
    let need_solve = config.checks.contains(&Check::Solve) || !downstream.is_empty();
    let finish = |mut report: Report| {
        for c in &twisted_drinfeld {
            let err = Error::OutOfScope(format!("Drinfeld currents are defined for untwisted types only, not {ty}"));
            report.outcomes.push(CheckOutcome::fail(c.name(), -1, err.to_string()));
        }
        report
    };
    if !sc_ok {
        let mut rest = vec![];
        if need_solve {
            rest.push(Check::Solve);
        }
        rest.extend(&downstream);
        report.outcomes.extend(skipped(&rest, "requires selfcheck"));
        return Ok(finish(report));
    }
    if !need_solve {
        return Ok(finish(report));
    }
    let inv = inv.expect("selfcheck passed");

    let cache_file = config.cache_file();
    let loaded = cache_file.as_deref().and_then(|p| load_cached(p, ty, k));
    let from_cache = loaded.is_some();
    let mut art = match loaded.map(Ok).unwrap_or_else(|| solve_theta(&rep, k)) {
        Ok(a) => a,
        Err(e) => {
            report.outcomes.push(CheckOutcome::fail("solve", -1, e.to_string()));
            report.outcomes.extend(skipped(&downstream, "requires solve"));
            return Ok(finish(report));
        }
    };
    report.outcomes.push(CheckOutcome::pass("solve", k, format!("psi={} weights={}", art.psi, art.theta.len())));

    let lop = EvalL::build(&art, &rep);
    let shared = Shared {
        rep: &rep,
        inv: &inv,
        art: &art,
        lop: lop.as_ref().map_err(|e| e.to_string()),
        k,
        ybe_order: config.ybe_order.unwrap_or(k.min(2)),
    };
    let results: Vec<Mutex<Option<CheckResult>>> = downstream.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..config.jobs.min(downstream.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&c) = downstream.get(i) else { break };
                let r = run_check(c, &shared);
                *results[i].lock().expect("worker panicked") = Some(r);
            });
        }
    });
    let mut ybe = None;
    for slot in results {
        let (lines, v) = slot.into_inner().expect("worker panicked").expect("every check ran");
        ybe = ybe.or(v);
        report.outcomes.extend(lines);
    }
    let changed = ybe.is_some() && ybe != art.ybe;
    if ybe.is_some() {
        art.ybe = ybe;
    }
    if let Some(p) = &cache_file {
        if !from_cache || changed {
            cache::save(p, &art)?;
        }
    }
    if let Some(p) = &config.out {
        cache::save(p, &art)?;
    }
    Ok(finish(report))
}
