//! Gauss decomposition of the evaluated L operators, the Drinfeld currents
//! read off from its factors, and the level-zero Drinfeld relations.
//!
//! Untwisted types only. Currents are defined by the extraction formulas;
//! no braid group action is reconstructed.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::evalrep::EvalRep;
use crate::linalg::QMat;
use crate::lops::EvalL;
use crate::matseries::{MatSeries, QSeries};
use crate::qfield::QScalar;
use crate::report::CheckOutcome;
use crate::rootdata::{Family, RootDatum};

/// `n x n` matrix of operator-valued series.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSeries {
    pub entries: Vec<Vec<QSeries>>,
}

impl BlockSeries {
    /// Splits an operator series on `V (x) V_quantum` into blocks.
    pub fn from_series(s: &QSeries, n: usize) -> Self {
        let nq = s.dim() / n;
        let entries = (0..n)
            .map(|i| (0..n).map(|j| MatSeries::from_coeffs(nq, 0, s.trunc(), s.terms().map(|(t, c)| (t, sub_block(c, nq, i, j))))).collect())
            .collect();
        BlockSeries { entries }
    }

    pub fn to_series(&self) -> QSeries {
        let n = self.size();
        let nq = self.entries[0][0].dim();
        let trunc = self.entries.iter().flatten().map(|s| s.trunc()).min().unwrap_or(0);
        let mut out = MatSeries::zero(n * nq, 0, trunc);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                for (t, c) in s.terms() {
                    let mut m = QMat::zero(n * nq);
                    for (a, b, v) in c.entries() {
                        m.set(i * nq + a, j * nq + b, v.clone());
                    }
                    out.add_to(t, &m);
                }
            }
        }
        out
    }

    pub fn identity(n: usize, nq: usize, trunc: i64) -> Self {
        let entries = (0..n)
            .map(|i| (0..n).map(|j| if i == j { MatSeries::identity(nq, trunc) } else { MatSeries::zero(nq, 0, trunc) }).collect())
            .collect();
        BlockSeries { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &QSeries {
        &self.entries[i][j]
    }
}

/// Block `(i, j)` of size `nq` of an operator on `C^n (x) C^nq`.
fn sub_block(m: &QMat, nq: usize, i: usize, j: usize) -> QMat {
    let mut b = QMat::zero(nq);
    for a in 0..nq {
        for (c, v) in m.row(i * nq + a).range(j * nq..(j + 1) * nq) {
            b.set(a, c - j * nq, v.clone());
        }
    }
    b
}

/// `L = upper * diag * lower`, unitriangular outer factors.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussFactors {
    pub upper: BlockSeries,
    pub diag: Vec<QSeries>,
    pub lower: BlockSeries,
}

fn mul3(a: &QSeries, b: &QSeries, c: &QSeries) -> Result<QSeries> {
    if a.is_zero() || c.is_zero() {
        return Ok(MatSeries::zero(a.dim(), 0, a.trunc().min(b.trunc()).min(c.trunc())));
    }
    a.mul(b)?.mul(c)
}

/// Bottom-right-first elimination: the last pivot is `L_NN`, the upper
/// factor uses right division and the lower factor left division.
pub fn gauss_decompose(a: &BlockSeries) -> Result<GaussFactors> {
    let n = a.size();
    let nq = a.entries[0][0].dim();
    let trunc = a.entries.iter().flatten().map(|s| s.trunc()).min().unwrap_or(0);
    let mut work = a.clone();
    let mut upper = BlockSeries::identity(n, nq, trunc);
    let mut lower = BlockSeries::identity(n, nq, trunc);
    let mut diag = vec![MatSeries::zero(nq, 0, trunc); n];
    for k in (0..n).rev() {
        let d = work.entries[k][k].clone();
        let dinv = d.inv().map_err(|e| Error::NotInvertible(format!("pivot block {}: {e}", k + 1)))?;
        for i in 0..k {
            if !work.entries[i][k].is_zero() {
                upper.entries[i][k] = work.entries[i][k].mul(&dinv)?;
            }
            if !work.entries[k][i].is_zero() {
                lower.entries[k][i] = dinv.mul(&work.entries[k][i])?;
            }
        }
        for i in 0..k {
            if work.entries[i][k].is_zero() {
                continue;
            }
            for j in 0..k {
                if work.entries[k][j].is_zero() {
                    continue;
                }
                let corr = mul3(&work.entries[i][k], &dinv, &work.entries[k][j])?;
                work.entries[i][j] = work.entries[i][j].sub(&corr)?;
            }
        }
        diag[k] = d;
    }
    Ok(GaussFactors { upper, diag, lower })
}

impl GaussFactors {
    pub fn recompose(&self) -> Result<BlockSeries> {
        let n = self.diag.len();
        let nq = self.diag[0].dim();
        let trunc = self.diag.iter().map(|s| s.trunc()).min().unwrap_or(0);
        let mut out = BlockSeries { entries: vec![vec![MatSeries::zero(nq, 0, trunc); n]; n] };
        for i in 0..n {
            for j in 0..n {
                let mut acc = MatSeries::zero(nq, 0, trunc);
                for k in i.max(j)..n {
                    acc = acc.add(&mul3(self.upper.get(i, k), &self.diag[k], self.lower.get(k, j))?)?;
                }
                out.entries[i][j] = acc;
            }
        }
        Ok(out)
    }

    /// Outer factors are unitriangular and the product reproduces `l`.
    pub fn check(&self, l: &BlockSeries, name: &str) -> CheckOutcome {
        let n = self.diag.len();
        let trunc = self.diag.iter().map(|s| s.trunc()).min().unwrap_or(0);
        for i in 0..n {
            for j in 0..n {
                let (u, lo) = (self.upper.get(i, j), self.lower.get(i, j));
                let bad = match i.cmp(&j) {
                    std::cmp::Ordering::Equal => !(u.truncate(trunc) == MatSeries::identity(u.dim(), trunc) && lo.truncate(trunc) == MatSeries::identity(u.dim(), trunc)),
                    std::cmp::Ordering::Less => !lo.is_zero(),
                    std::cmp::Ordering::Greater => !u.is_zero(),
                };
                if bad {
                    return CheckOutcome::fail(name, -1, format!("factor shape at block ({},{})", i + 1, j + 1));
                }
            }
        }
        let back = match self.recompose() {
            Ok(b) => b,
            Err(e) => return CheckOutcome::fail(name, -1, e.to_string()),
        };
        for i in 0..n {
            for j in 0..n {
                if let Some(t) = back.get(i, j).first_difference(l.get(i, j)) {
                    return CheckOutcome::fail(name, t - 1, format!("recomposition differs at block ({},{}), order {t}", i + 1, j + 1));
                }
            }
        }
        match gauss_decompose(&back) {
            Ok(again) if again == *self => CheckOutcome::pass(name, trunc, ""),
            Ok(_) => CheckOutcome::fail(name, -1, "decomposing the recomposition changed the factors"),
            Err(e) => CheckOutcome::fail(name, -1, e.to_string()),
        }
    }
}

/// Images of the Drinfeld currents on the quantum space; index `i - 1` for node `i`.
///
/// `e_plus`, `f_plus`, `phi_plus` are series in `z`; the minus currents are
/// series in `1/z`.
#[derive(Clone, Debug, PartialEq)]
pub struct Currents {
    pub k: i64,
    pub e_plus: Vec<QSeries>,
    pub e_minus: Vec<QSeries>,
    pub f_plus: Vec<QSeries>,
    pub f_minus: Vec<QSeries>,
    pub phi_plus: Vec<QSeries>,
    pub phi_minus: Vec<QSeries>,
    /// `h_{i,r}` keyed by `(i, r)`, `r != 0`.
    pub h: BTreeMap<(usize, i64), QMat>,
}

/// Both Gauss decompositions and the currents read off from them.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub plus: GaussFactors,
    pub minus: GaussFactors,
    pub currents: Currents,
}

/// Spectral shift for a piece of node `i` on strand `eps`.
fn shift(rep: &EvalRep, i: usize, eps: i64) -> QScalar {
    let datum = &rep.datum;
    let l = datum.rank();
    let ctx = rep.ctx;
    let di = datum.d[i];
    match datum.ty.family {
        Family::A1 => ctx.q_pow(i as i64),
        Family::B1 if i == l => ctx.q_pow(eps * di),
        Family::C1 | Family::D1 if i == l => QScalar::one(),
        _ => {
            let h0 = datum.d[0] * datum.h_dual;
            assert!(h0 % 2 == 0, "q_0^(h/2) is an integral power of q");
            ctx.q_pow(eps * (di * i as i64 - h0 / 2))
        }
    }
}

/// `(row, col, coefficient, shift)` for every matrix unit carrying the
/// current of node `i`, from `e` pieces (`raise`) or `f` pieces.
fn positions(rep: &EvalRep, i: usize, raise: bool) -> Vec<(usize, usize, QScalar, QScalar)> {
    let (whole, split) = if raise { (&rep.e[i], &rep.e_pm[i]) } else { (&rep.f[i], &rep.f_pm[i]) };
    let pieces: Vec<(QMat, i64)> = match split {
        Some((p, m)) => vec![(p.clone(), 1), (m.clone(), -1)],
        None => vec![(whole.clone(), 1)],
    };
    let mut out = vec![];
    for (m, eps) in pieces {
        let s = shift(rep, i, eps);
        for (a, b, v) in m.entries() {
            out.push((a, b, v.clone(), s.clone()));
        }
    }
    out
}

/// `f(z) -> f(z / s)`, with minus series stored in `1/z`.
fn unshift(s: &QSeries, plus: bool, by: &QScalar) -> Result<QSeries> {
    if plus {
        s.rescale(&by.inv()?)
    } else {
        s.rescale(by)
    }
}

/// The two (or one) diagonal ratios that define `phi_i`, as
/// `(numerator index, denominator index, power, shift)` with 0-based indices:
/// `D_a^p D_b^{-p}` evaluated at `z / shift`.
fn phi_ratios(rep: &EvalRep, i: usize) -> Vec<(usize, usize, i64, QScalar)> {
    let datum = &rep.datum;
    let l = datum.rank();
    let n = rep.n;
    let eps_idx = |eps: i64, k: usize| if eps > 0 { k - 1 } else { n - k };
    match datum.ty.family {
        Family::A1 => vec![(i - 1, i, 1, shift(rep, i, 1))],
        Family::C1 if i == l => vec![(l - 1, l, 1, QScalar::one())],
        Family::D1 if i == l => vec![(l - 2, l, 1, QScalar::one()), (l - 1, l + 1, 1, QScalar::one())],
        _ => [1, -1].iter().map(|&eps| (eps_idx(eps, i), eps_idx(eps, i + 1), eps, shift(rep, i, eps))).collect(),
    }
}

fn ratio(d: &[QSeries], a: usize, b: usize, p: i64) -> Result<QSeries> {
    if p > 0 {
        d[a].mul(&d[b].inv()?)
    } else {
        d[a].inv()?.mul(&d[b])
    }
}

fn qdiff(rep: &EvalRep, i: usize) -> QScalar {
    rep.ctx.q_diff(rep.datum.d[i] as u32)
}

/// Extracts currents from both Gauss decompositions. Every alternative
/// reading (both strands, both diagonal ratios) must agree exactly.
pub fn extract_currents(lop: &EvalL, rep: &EvalRep) -> Result<Extraction> {
    let datum = &rep.datum;
    if datum.ty.family.is_twisted() {
        return Err(Error::OutOfScope(format!("Drinfeld currents are defined for untwisted types only, not {}", datum.ty)));
    }
    let n = rep.n;
    let l = datum.rank();
    let plus = gauss_decompose(&BlockSeries::from_series(&lop.plus, n))?;
    let minus = gauss_decompose(&BlockSeries::from_series(&lop.minus, n))?;
    let mut cur = Currents { k: lop.k, e_plus: vec![], e_minus: vec![], f_plus: vec![], f_minus: vec![], phi_plus: vec![], phi_minus: vec![], h: BTreeMap::new() };
    for i in 1..=l {
        let qd = qdiff(rep, i);
        for (is_plus, g) in [(true, &plus), (false, &minus)] {
            let sign = if is_plus { QScalar::from_int(-1) } else { QScalar::one() };
            let read = |raise: bool| -> Result<QSeries> {
                let factor = if raise { &g.upper } else { &g.lower };
                let mut found: Option<QSeries> = None;
                for (a, b, c, s) in positions(rep, i, raise) {
                    let entry = factor.get(a, b).scale(&sign.div(&qd.mul(&c))?);
                    let cand = unshift(&entry, is_plus, &s)?;
                    match &found {
                        None => found = Some(cand),
                        Some(prev) if *prev == cand => {}
                        Some(prev) => {
                            let t = prev.first_difference(&cand).unwrap_or(-1);
                            let which = if raise { "f" } else { "e" };
                            return Err(Error::Structure(format!("{which}_{i} readings disagree at order {t} (position {},{})", a + 1, b + 1)));
                        }
                    }
                }
                found.ok_or_else(|| Error::Structure(format!("node {i} has no generator entries")))
            };
            let f = read(true)?;
            let e = read(false)?;
            let mut phi: Option<QSeries> = None;
            for (a, b, p, s) in phi_ratios(rep, i) {
                let cand = unshift(&ratio(&g.diag, a, b, p)?, is_plus, &s)?;
                match &phi {
                    None => phi = Some(cand),
                    Some(prev) if *prev == cand => {}
                    Some(prev) => {
                        let t = prev.first_difference(&cand).unwrap_or(-1);
                        return Err(Error::Structure(format!("phi_{i} diagonal ratios disagree at order {t}")));
                    }
                }
            }
            let phi = phi.expect("at least one ratio");
            if is_plus {
                cur.f_plus.push(f);
                cur.e_plus.push(e);
                cur.phi_plus.push(phi);
            } else {
                cur.f_minus.push(f);
                cur.e_minus.push(e);
                cur.phi_minus.push(phi);
            }
        }
    }
    extract_h(&mut cur, rep)?;
    Ok(Extraction { plus, minus, currents: cur })
}

/// `h_{i,-r} = -[z^r] log(phi+_0^{-1} phi+(z)) / (q_i - q_i^{-1})` and
/// `h_{i,r} = [z^{-r}] log(phi-_0^{-1} phi-(z)) / (q_i - q_i^{-1})`.
pub fn extract_h(cur: &mut Currents, rep: &EvalRep) -> Result<()> {
    for i in 1..=rep.rank() {
        let qd = qdiff(rep, i);
        for (plus, phi) in [(true, &cur.phi_plus[i - 1]), (false, &cur.phi_minus[i - 1])] {
            let c0inv = phi.coeff(0).inverse()?;
            let log = phi.mul_left(&c0inv).log_unipotent()?;
            for (r, c) in log.terms() {
                if r == 0 {
                    continue;
                }
                let (idx, scale) = if plus { (-r, qd.neg().inv()?) } else { (r, qd.inv()?) };
                cur.h.insert((i, idx), c.scale(&scale));
            }
        }
    }
    Ok(())
}

impl Currents {
    pub fn rank(&self) -> usize {
        self.e_plus.len()
    }

    fn dim(&self) -> usize {
        self.e_plus[0].dim()
    }

    /// `x^(+)_{i,k}`, for `|k| <= K`.
    pub fn x_plus(&self, i: usize, k: i64) -> Option<QMat> {
        if k < 0 {
            (-k <= self.k).then(|| self.e_plus[i - 1].coeff(-k))
        } else {
            (k <= self.k).then(|| self.e_minus[i - 1].coeff(k))
        }
    }

    pub fn x_minus(&self, i: usize, k: i64) -> Option<QMat> {
        if k <= 0 {
            (-k <= self.k).then(|| self.f_plus[i - 1].coeff(-k))
        } else {
            (k <= self.k).then(|| self.f_minus[i - 1].coeff(k))
        }
    }

    pub fn x(&self, plus: bool, i: usize, k: i64) -> Option<QMat> {
        if plus {
            self.x_plus(i, k)
        } else {
            self.x_minus(i, k)
        }
    }

    /// `phi+_{i,p}` (zero for `p > 0`) and `phi-_{i,p}` (zero for `p < 0`).
    pub fn phi(&self, plus: bool, i: usize, p: i64) -> Option<QMat> {
        if p.abs() > self.k {
            return None;
        }
        Some(match (plus, p) {
            (true, p) if p <= 0 => self.phi_plus[i - 1].coeff(-p),
            (false, p) if p >= 0 => self.phi_minus[i - 1].coeff(p),
            _ => QMat::zero(self.dim()),
        })
    }

    /// Powers of the spectral variable allowed by the mode conventions.
    pub fn check_support(&self) -> CheckOutcome {
        for i in 0..self.rank() {
            if self.e_plus[i].coeff_ref(0).is_some() || self.f_minus[i].coeff_ref(0).is_some() {
                return CheckOutcome::fail("current_support", -1, format!("node {} has a constant term in a strict current", i + 1));
            }
        }
        CheckOutcome::pass("current_support", self.k, "")
    }

    /// Rebuilds `phi` from `k_i` and the extracted `h` and compares.
    pub fn check_h_roundtrip(&self, rep: &EvalRep) -> CheckOutcome {
        for i in 1..=self.rank() {
            let qd = qdiff(rep, i);
            for plus in [true, false] {
                let phi = if plus { &self.phi_plus[i - 1] } else { &self.phi_minus[i - 1] };
                let mut x = MatSeries::zero(self.dim(), 0, self.k);
                for r in 1..=self.k {
                    let (idx, sc) = if plus { (-r, qd.neg()) } else { (r, qd.clone()) };
                    if let Some(h) = self.h.get(&(i, idx)) {
                        x.set(r, h.scale(&sc));
                    }
                }
                let rebuilt = match x.exp() {
                    Ok(e) => e.mul_left(&phi.coeff(0)),
                    Err(e) => return CheckOutcome::fail("h_roundtrip", -1, e.to_string()),
                };
                if let Some(t) = rebuilt.first_difference(phi) {
                    return CheckOutcome::fail("h_roundtrip", t - 1, format!("node {i}, order {t}"));
                }
            }
        }
        CheckOutcome::pass("h_roundtrip", self.k, "")
    }
}

/// Every entry of `L^u - 1` and `L^l - 1` whose weight difference is not a
/// simple root (resp. its negative) vanishes. This is stricter than the
/// congruence the extraction rests on, which only constrains the entries on
/// the simple-root pattern; it is reported separately.
pub fn check_off_pattern(ex: &Extraction, datum: &RootDatum) -> CheckOutcome {
    let n = datum.dim();
    let l = datum.rank();
    let pi = crate::rsolver::weight_vectors(datum);
    let simple: Vec<Vec<i64>> = (1..=l).map(|k| (0..=l).map(|j| datum.d[j] * datum.cartan[j][k]).collect()).collect();
    for (name, g) in [("L+", &ex.plus), ("L-", &ex.minus)] {
        for (upper, factor) in [(true, &g.upper), (false, &g.lower)] {
            for a in 0..n {
                for b in 0..n {
                    if a == b || factor.get(a, b).is_zero() {
                        continue;
                    }
                    let mut d: Vec<i64> = pi[a].iter().zip(&pi[b]).map(|(x, y)| x - y).collect();
                    if !upper {
                        d.iter_mut().for_each(|x| *x = -*x);
                    }
                    if d.iter().all(|&x| x == 0) || simple.contains(&d) {
                        continue;
                    }
                    let part = if upper { "u" } else { "l" };
                    return CheckOutcome::fail("off_pattern", -1, format!("{name},{part} entry ({},{}) is nonzero", a + 1, b + 1));
                }
            }
        }
    }
    CheckOutcome::pass("off_pattern", ex.currents.k, "")
}

/// `phi-_{i,0} = k_i` and `phi+_{i,0} = k_i^{-1}` on the quantum space.
pub fn check_phi_constants(cur: &Currents, rep: &EvalRep) -> CheckOutcome {
    for i in 1..=cur.rank() {
        if cur.phi_minus[i - 1].coeff(0) != rep.k_i(i) || cur.phi_plus[i - 1].coeff(0) != rep.k_i_inv(i) {
            return CheckOutcome::fail("phi_constants", -1, format!("node {i}"));
        }
    }
    CheckOutcome::pass("phi_constants", 0, "")
}

fn qnum(rep: &EvalRep, n: i64, i: usize) -> QScalar {
    let qi = rep.ctx.q_pow(rep.datum.d[i]);
    qi.pow(n).sub(&qi.pow(-n)).div(&qi.sub(&qi.inv().expect("q != 0"))).expect("q_i != q_i^{-1}")
}

fn first_entry(m: &QMat) -> String {
    m.entries().next().map(|(a, b, _)| format!("entry ({},{})", a + 1, b + 1)).unwrap_or_default()
}

/// Relations (a)-(e) of the Drinfeld realization at `C = 1`, for every
/// index combination whose modes are all available.
pub fn check_drinfeld_relations(cur: &Currents, rep: &EvalRep) -> Vec<CheckOutcome> {
    let k = cur.k;
    let l = cur.rank();
    let datum = &rep.datum;
    let a = |i: usize, j: usize| datum.cartan[i][j];
    let qpow = |e: i64| rep.ctx.q_pow(e);
    let modes: Vec<i64> = (-k..=k).collect();
    let hs: Vec<i64> = modes.iter().copied().filter(|&r| r != 0).collect();
    let mut out = vec![];

    let mut fail: Option<String> = None;
    'a: for i in 1..=l {
        for j in 1..=l {
            for &r in &hs {
                for &s in &hs {
                    let (Some(x), Some(y)) = (cur.h.get(&(i, r)), cur.h.get(&(j, s))) else { continue };
                    let c = x.commutator(y);
                    if !c.is_zero() {
                        fail = Some(format!("[h_{i},{r}, h_{j},{s}] {}", first_entry(&c)));
                        break 'a;
                    }
                }
            }
        }
    }
    out.push(outcome("drinfeld_a", k, fail));

    let mut fail = None;
    'b: for i in 1..=l {
        for j in 1..=l {
            for &r in &hs {
                let Some(h) = cur.h.get(&(i, r)) else { continue };
                let coef = qnum(rep, r * a(i, j), i).div(&QScalar::from_int(r)).expect("r != 0");
                for plus in [true, false] {
                    for &m in &modes {
                        let (Some(x), Some(y)) = (cur.x(plus, j, m), cur.x(plus, j, r + m)) else { continue };
                        let c = if plus { coef.clone() } else { coef.neg() };
                        let res = h.commutator(&x).sub(&y.scale(&c));
                        if !res.is_zero() {
                            let s = if plus { "+" } else { "-" };
                            fail = Some(format!("[h_{i},{r}, x{s}_{j},{m}] {}", first_entry(&res)));
                            break 'b;
                        }
                    }
                }
            }
        }
    }
    out.push(outcome("drinfeld_b", k, fail));

    let mut fail = None;
    'c: for i in 1..=l {
        for j in 1..=l {
            for &m in &modes {
                for &nn in &modes {
                    let (Some(x), Some(y)) = (cur.x_plus(i, m), cur.x_minus(j, nn)) else { continue };
                    let rhs = if i == j {
                        let (Some(pm), Some(pp)) = (cur.phi(false, i, m + nn), cur.phi(true, i, m + nn)) else { continue };
                        pm.sub(&pp).scale(&qdiff(rep, i).inv().expect("q_i != q_i^{-1}"))
                    } else {
                        QMat::zero(x.dim())
                    };
                    let res = x.commutator(&y).sub(&rhs);
                    if !res.is_zero() {
                        fail = Some(format!("[x+_{i},{m}, x-_{j},{nn}] {}", first_entry(&res)));
                        break 'c;
                    }
                }
            }
        }
    }
    out.push(outcome("drinfeld_c", k, fail));

    let mut fail = None;
    'd: for i in 1..=l {
        for j in 1..=l {
            let b = datum.d[i] * a(i, j);
            for plus in [true, false] {
                let qq = if plus { qpow(b) } else { qpow(-b) };
                for &m in &modes {
                    for &nn in &modes {
                        let get = |ii, kk| cur.x(plus, ii, kk);
                        let (Some(xi1), Some(xj), Some(xi), Some(xj1)) = (get(i, m + 1), get(j, nn), get(i, m), get(j, nn + 1)) else { continue };
                        let lhs = xi1.mul(&xj).sub(&xj.mul(&xi1).scale(&qq));
                        let rhs = xi.mul(&xj1).scale(&qq).sub(&xj1.mul(&xi));
                        let res = lhs.sub(&rhs);
                        if !res.is_zero() {
                            let s = if plus { "+" } else { "-" };
                            fail = Some(format!("x{s} quadratic i={i} j={j} m={m} n={nn} {}", first_entry(&res)));
                            break 'd;
                        }
                    }
                }
            }
        }
    }
    out.push(outcome("drinfeld_d", k, fail));

    let mut fail = None;
    let mut tested = 0;
    'e: for i in 1..=l {
        for j in 1..=l {
            if i == j || a(i, j) == 0 {
                continue;
            }
            let r = (1 - a(i, j)) as usize;
            for plus in [true, false] {
                for ms in tuples(&modes, r) {
                    for &nn in &modes {
                        let mut res = QMat::zero(cur.dim());
                        let mut ok = true;
                        for perm in permutations(r) {
                            for s in 0..=r {
                                let coef = rep.ctx.qbinom(r as i64, s as i64, datum.d[i] as u32).expect("valid binomial");
                                let coef = if s % 2 == 1 { coef.neg() } else { coef };
                                let mut prod = QMat::identity(cur.dim());
                                for (pos, &p) in perm.iter().enumerate() {
                                    if pos == s {
                                        match cur.x(plus, j, nn) {
                                            Some(x) => prod = prod.mul(&x),
                                            None => ok = false,
                                        }
                                    }
                                    match cur.x(plus, i, ms[p]) {
                                        Some(x) => prod = prod.mul(&x),
                                        None => ok = false,
                                    }
                                }
                                if s == r {
                                    match cur.x(plus, j, nn) {
                                        Some(x) => prod = prod.mul(&x),
                                        None => ok = false,
                                    }
                                }
                                res = res.add(&prod.scale(&coef));
                            }
                        }
                        if !ok {
                            continue;
                        }
                        tested += 1;
                        if !res.is_zero() {
                            let s = if plus { "+" } else { "-" };
                            fail = Some(format!("Serre x{s} i={i} j={j} m={ms:?} n={nn} {}", first_entry(&res)));
                            break 'e;
                        }
                    }
                }
            }
        }
    }
    let mut e = outcome("drinfeld_e", k, fail);
    if tested == 0 && e.passed() {
        e = CheckOutcome::skipped("drinfeld_e", "no adjacent pair of nodes");
    }
    out.push(e);
    out
}

fn outcome(name: &str, k: i64, fail: Option<String>) -> CheckOutcome {
    match fail {
        None => CheckOutcome::pass(name, k, ""),
        Some(why) => CheckOutcome::fail(name, -1, why),
    }
}

fn tuples(modes: &[i64], r: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..r {
        out = out.into_iter().flat_map(|t| modes.iter().map(move |&m| [t.clone(), vec![m]].concat())).collect();
    }
    out
}

fn permutations(r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for p in permutations(r - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, r - 1);
            out.push(q);
        }
    }
    out
}
