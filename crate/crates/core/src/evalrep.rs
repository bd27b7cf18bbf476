//! Vector evaluation representations, spectral twists and the invariant
//! vector of the tensor power, with exact self-checks of every relation.

use crate::error::{Error, Result};
use crate::linalg::{QMat, SparseVec};
use crate::qfield::{QContext, QScalar};
use crate::rootdata::{AffineType, Family, LatticeVec, RootDatum};

#[derive(Clone, Debug)]
pub struct EvalRep {
    pub datum: RootDatum,
    pub ctx: QContext,
    pub n: usize,
    pub e: Vec<QMat>,
    pub f: Vec<QMat>,
    /// `(e_i^+, e_i^-)` where the generator splits into two strands.
    pub e_pm: Vec<Option<(QMat, QMat)>>,
    pub f_pm: Vec<Option<(QMat, QMat)>>,
}

/// Matrix unit `E_{ij}` (1-based) scaled by `c`.
fn unit(n: usize, i: usize, j: usize, c: QScalar) -> QMat {
    let mut m = QMat::zero(n);
    m.set(i - 1, j - 1, c);
    m
}

fn one() -> QScalar {
    QScalar::one()
}

fn minus_one() -> QScalar {
    QScalar::from_int(-1)
}

struct Gens {
    e: Vec<QMat>,
    f: Vec<QMat>,
    e_pm: Vec<Option<(QMat, QMat)>>,
    f_pm: Vec<Option<(QMat, QMat)>>,
}

impl Gens {
    fn new(l: usize, n: usize) -> Self {
        Gens { e: vec![QMat::zero(n); l + 1], f: vec![QMat::zero(n); l + 1], e_pm: vec![None; l + 1], f_pm: vec![None; l + 1] }
    }

    fn split(&mut self, i: usize, ep: QMat, em: QMat, fp: QMat, fm: QMat) {
        self.e[i] = ep.add(&em);
        self.f[i] = fp.add(&fm);
        self.e_pm[i] = Some((ep, em));
        self.f_pm[i] = Some((fp, fm));
    }

    /// Strands `E_{i,i+1}` and `-E_{nb-i, nb+1-i}` shared by B, C, D.
    fn classical_chain(&mut self, l: usize, n: usize, nb: usize) {
        for i in 1..l {
            let ep = unit(n, i, i + 1, one());
            let em = unit(n, nb - i, nb + 1 - i, minus_one());
            let (fp, fm) = (ep.transpose(), em.transpose());
            self.split(i, ep, em, fp, fm);
        }
    }

    /// Short node of `B_l` inside an `n`-dimensional space, with `x = 1`, `y = [2]`.
    fn b_node(&mut self, l: usize, n: usize, two: &QScalar) {
        let ep = unit(n, l, l + 1, one());
        let em = unit(n, l + 1, l + 2, minus_one());
        let fp = unit(n, l + 1, l, two.clone());
        let fm = unit(n, l + 2, l + 1, two.neg());
        self.split(l, ep, em, fp, fm);
    }

    fn conjugate_by_signs(&mut self, signs: &[i64], nodes: std::ops::RangeInclusive<usize>) {
        let conj = |m: &QMat| -> QMat {
            let mut out = QMat::zero(m.dim());
            for (i, j, v) in m.entries() {
                let s = signs[i] * signs[j];
                out.set(i, j, if s < 0 { v.neg() } else { v.clone() });
            }
            out
        };
        for i in nodes {
            self.e[i] = conj(&self.e[i]);
            self.f[i] = conj(&self.f[i]);
            if let Some((a, b)) = &self.e_pm[i] {
                self.e_pm[i] = Some((conj(a), conj(b)));
            }
            if let Some((a, b)) = &self.f_pm[i] {
                self.f_pm[i] = Some((conj(a), conj(b)));
            }
        }
    }
}

impl EvalRep {
    pub fn build(t: AffineType) -> Result<Self> {
        let datum = RootDatum::build(t)?;
        let ctx = datum.ctx();
        let l = t.rank;
        let n = datum.dim();
        let mut g = Gens::new(l, n);
        let two = |i: usize| ctx.qint(2, datum.d[i] as u32);
        match t.family {
            Family::A1 => {
                for i in 1..=l {
                    g.e[i] = unit(n, i, i + 1, one());
                }
                g.e[0] = unit(n, n, 1, one());
            }
            Family::B1 => {
                g.classical_chain(l, n, n);
                g.b_node(l, n, &two(l));
                g.e[0] = unit(n, n - 1, 1, one()).add(&unit(n, n, 2, minus_one()));
            }
            Family::C1 => {
                g.classical_chain(l, n, n);
                g.e[l] = unit(n, l, l + 1, one());
                g.e[0] = unit(n, n, 1, one());
            }
            Family::D1 => {
                g.classical_chain(l, n, n);
                g.e[l] = unit(n, l - 1, l + 1, one()).add(&unit(n, l, l + 2, minus_one()));
                g.e[0] = unit(n, n - 1, 1, one()).add(&unit(n, n, 2, minus_one()));
            }
            Family::A2even => {
                g.classical_chain(l, n, n);
                g.b_node(l, n, &two(l));
                let signs: Vec<i64> = (1..=n).map(|k| if k <= l + 1 { 1 } else if (k - l - 1) % 2 == 1 { -1 } else { 1 }).collect();
                g.conjugate_by_signs(&signs, 1..=l);
                g.e[0] = unit(n, n, 1, one());
            }
            Family::A2odd => {
                g.classical_chain(l, n, n);
                g.e[l] = unit(n, l, l + 1, one());
                let signs: Vec<i64> = (1..=n).map(|k| if k <= l + 1 { 1 } else if (k - l - 1) % 2 == 1 { -1 } else { 1 }).collect();
                g.conjugate_by_signs(&signs, 1..=l);
                g.e[0] = unit(n, n - 1, 1, one()).add(&unit(n, n, 2, one()));
            }
            Family::D2 => {
                let nb = n - 1;
                g.classical_chain(l, n, nb);
                g.b_node(l, n, &two(l));
                g.e[0] = unit(n, n, 1, one()).add(&unit(n, n - 1, n, one()));
                g.f[0] = unit(n, 1, n, one()).add(&unit(n, n, n - 1, one())).scale(&two(0));
            }
        }
        // Remaining lowering operators are plain transposes.
        for i in 0..=l {
            if g.f[i].is_zero() {
                g.f[i] = g.e[i].transpose();
            }
        }
        Ok(EvalRep { datum, ctx, n, e: g.e, f: g.f, e_pm: g.e_pm, f_pm: g.f_pm })
    }

    pub fn ty(&self) -> AffineType {
        self.datum.ty
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    /// Diagonal action of `k_lambda`: entries `q^{(lambda|eta_j)}`.
    pub fn k(&self, lambda: &LatticeVec) -> Result<QMat> {
        let d = self
            .datum
            .eta()
            .iter()
            .map(|eta| self.ctx.q_pow_rat(&self.datum.pairing(lambda, eta)))
            .collect::<Result<Vec<_>>>()?;
        Ok(QMat::diag(d))
    }

    /// `k_i = k_{alpha_i}`.
    pub fn k_i(&self, i: usize) -> QMat {
        self.k(&self.datum.alpha(i)).expect("root pairings are integral")
    }

    pub fn k_i_inv(&self, i: usize) -> QMat {
        self.k(&self.datum.alpha(i).neg()).expect("root pairings are integral")
    }

    /// `q_i = q^{d_i}`.
    pub fn q_i(&self, i: usize) -> QScalar {
        self.ctx.q_pow(self.datum.d[i])
    }

    /// `rho o tau_a`: scales `e_0` by `a` and `f_0` by `a^{-1}`.
    pub fn twist(&self, a: &QScalar) -> Result<EvalRep> {
        let ainv = a.inv()?;
        let mut r = self.clone();
        r.e[0] = r.e[0].scale(a);
        r.f[0] = r.f[0].scale(&ainv);
        Ok(r)
    }

    /// `G = diag(1, ..., 1, -1)`, defined for `D_{l+1}^(2)` only.
    pub fn g_matrix(&self) -> Option<QMat> {
        (self.ty().family == Family::D2).then(|| {
            let mut d = vec![QScalar::one(); self.n];
            d[self.n - 1] = QScalar::from_int(-1);
            QMat::diag(d)
        })
    }

    /// `f_i = c_i * transpose(e_i)`; `c_i` is `[2]_i` on nodes built with `y = [2]`.
    pub fn transpose_factor(&self, i: usize) -> QScalar {
        let l = self.rank();
        let two = self.ctx.qint(2, self.datum.d[i] as u32);
        match self.ty().family {
            Family::B1 | Family::A2even if i == l => two,
            Family::D2 if i == l || i == 0 => two,
            _ => QScalar::one(),
        }
    }
}

/// Invariant vector `w` in the `M`-fold tensor power with evaluation points.
#[derive(Clone, Debug)]
pub struct InvariantVec {
    pub m: usize,
    pub points: Vec<QScalar>,
    /// Flat index: site 0 is the most significant digit.
    pub w: SparseVec<QScalar>,
    pub j: Option<QMat>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn inversions(p: &[usize]) -> usize {
    (0..p.len()).map(|i| (i + 1..p.len()).filter(|&j| p[i] > p[j]).count()).sum()
}

impl InvariantVec {
    pub fn build(rep: &EvalRep) -> Result<Self> {
        let datum = &rep.datum;
        let ctx = rep.ctx;
        let n = rep.n;
        let l = datum.rank() as i64;
        let points: Vec<QScalar> = datum
            .eval_points()?
            .into_iter()
            .map(|(sign, e)| QScalar::s_pow(e).mul(&QScalar::from_int(sign)))
            .collect();
        if datum.ty.family == Family::A1 {
            let mut w = SparseVec::new();
            let mq = ctx.q().neg();
            for p in permutations(n) {
                let idx = p.iter().fold(0, |acc, &d| acc * n + d);
                w.insert(idx, mq.pow(inversions(&p) as i64));
            }
            return Ok(InvariantVec { m: n, points, w, j: None });
        }
        let q = |e: i64| ctx.q_pow(e);
        let sgn = |neg: bool, x: QScalar| if neg { x.neg() } else { x };
        let u: Vec<QScalar> = match datum.ty.family {
            Family::B1 | Family::D2 => {
                let mut u: Vec<QScalar> = (1..=l).map(|i| q(-(2 * (l - i) + 1))).collect();
                u.push(q(1));
                u.extend((1..=l).map(|k| q(2 * k - 1)));
                if datum.ty.family == Family::D2 {
                    u.push(q(1).neg());
                }
                u
            }
            Family::C1 => (1..=l).map(|i| q(-(l + 1 - i)).neg()).chain((1..=l).map(q)).collect(),
            Family::D1 => (1..=l).map(|i| q(-(l - i))).chain((1..=l).map(|k| q(k - 1))).collect(),
            Family::A2even => {
                let mut u: Vec<QScalar> = (1..=l).map(|i| sgn((l - i + 1) % 2 == 1, q(-(2 * (l - i) + 1)))).collect();
                u.push(q(1));
                u.extend((1..=l).map(|k| sgn(k % 2 == 1, q(2 * k - 1))));
                u
            }
            Family::A2odd => (1..=l)
                .map(|i| sgn((l - i + 1) % 2 == 1, q(-(l + 1 - i))))
                .chain((1..=l).map(|k| sgn((k - 1) % 2 == 1, q(k))))
                .collect(),
            Family::A1 => unreachable!(),
        };
        assert_eq!(u.len(), n);
        let mut j = QMat::zero(n);
        if datum.ty.family == Family::D2 {
            for i in 1..n {
                j.set(i - 1, n - i - 1, u[i - 1].clone());
            }
            j.set(n - 1, n - 1, u[n - 1].clone());
        } else {
            for i in 1..=n {
                j.set(i - 1, n - i, u[i - 1].clone());
            }
        }
        let w = j.entries().map(|(a, b, v)| (a * n + b, v.clone())).collect();
        Ok(InvariantVec { m: 2, points, w, j: Some(j) })
    }

    /// `w` at `q = 1`.
    pub fn classical(&self) -> Result<SparseVec<crate::qfield::BigRat>> {
        let mut out = SparseVec::new();
        for (k, v) in &self.w {
            let x = crate::qfield::at_one(v)?;
            if !crate::qfield::rat_is_zero(&x) {
                out.insert(*k, x);
            }
        }
        Ok(out)
    }
}

/// Outcome of [`selfcheck`]: names of checks that passed and descriptions of failures.
#[derive(Clone, Debug, Default)]
pub struct SelfCheck {
    pub passed: Vec<String>,
    pub failures: Vec<String>,
}

impl SelfCheck {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, name: String, ok: bool) {
        if ok {
            self.passed.push(name);
        } else {
            self.failures.push(name);
        }
    }
}

/// `x^{(r)} = x^r / [r]_i!`.
fn divided_power(x: &QMat, r: u32, ctx: &QContext, di: u32) -> QMat {
    let mut p = QMat::identity(x.dim());
    for _ in 0..r {
        p = p.mul(x);
    }
    p.scale(&ctx.qfact(r, di).inv().unwrap())
}

fn serre(x: &[QMat], i: usize, j: usize, aij: i64, ctx: &QContext, di: u32) -> QMat {
    let top = (1 - aij) as u32;
    let mut acc = QMat::zero(x[i].dim());
    for r in 0..=top {
        let t = divided_power(&x[i], r, ctx, di).mul(&x[j]).mul(&divided_power(&x[i], top - r, ctx, di));
        acc = if r % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

fn kron_chain(parts: &[QMat]) -> QMat {
    let mut acc = parts[0].clone();
    for p in &parts[1..] {
        acc = acc.kron(p);
    }
    acc
}

/// Iterated coproducts on the `M`-fold tensor product of twisted copies.
pub fn coproduct_e(reps: &[EvalRep], i: usize) -> QMat {
    let m = reps.len();
    let n = reps[0].n;
    let mut acc = QMat::zero(n.pow(m as u32));
    for k in 0..m {
        let parts: Vec<QMat> = (0..m)
            .map(|s| match s.cmp(&k) {
                std::cmp::Ordering::Less => reps[s].k_i(i),
                std::cmp::Ordering::Equal => reps[s].e[i].clone(),
                std::cmp::Ordering::Greater => QMat::identity(n),
            })
            .collect();
        acc = acc.add(&kron_chain(&parts));
    }
    acc
}

pub fn coproduct_f(reps: &[EvalRep], i: usize) -> QMat {
    let m = reps.len();
    let n = reps[0].n;
    let mut acc = QMat::zero(n.pow(m as u32));
    for k in 0..m {
        let parts: Vec<QMat> = (0..m)
            .map(|s| match s.cmp(&k) {
                std::cmp::Ordering::Less => QMat::identity(n),
                std::cmp::Ordering::Equal => reps[s].f[i].clone(),
                std::cmp::Ordering::Greater => reps[s].k_i_inv(i),
            })
            .collect();
        acc = acc.add(&kron_chain(&parts));
    }
    acc
}

/// Verifies the defining relations on the stored matrices, and that `w`
/// spans a trivial subrepresentation of the twisted tensor power.
pub fn selfcheck(rep: &EvalRep) -> SelfCheck {
    let mut out = SelfCheck::default();
    let l = rep.rank();
    let ctx = rep.ctx;
    let datum = &rep.datum;
    let cartan = &datum.cartan;

    for i in 0..=l {
        for j in 0..=l {
            let ki = rep.k_i(i);
            let kinv = rep.k_i_inv(i);
            let c = ctx.q_pow(datum.d[i] * cartan[i][j]);
            let okw = ki.mul(&rep.e[j]).mul(&kinv) == rep.e[j].scale(&c)
                && ki.mul(&rep.f[j]).mul(&kinv) == rep.f[j].scale(&c.inv().unwrap());
            out.record(format!("weight({i},{j})"), okw);
            let lhs = rep.e[i].commutator(&rep.f[j]);
            let rhs = if i == j {
                ki.sub(&kinv).scale(&ctx.q_diff(datum.d[i] as u32).inv().unwrap())
            } else {
                QMat::zero(rep.n)
            };
            out.record(format!("commutator({i},{j})"), lhs == rhs);
            if i != j {
                let di = datum.d[i] as u32;
                out.record(format!("serre_e({i},{j})"), serre(&rep.e, i, j, cartan[i][j], &ctx, di).is_zero());
                out.record(format!("serre_f({i},{j})"), serre(&rep.f, i, j, cartan[i][j], &ctx, di).is_zero());
            }
        }
        let t = rep.transpose_factor(i);
        out.record(format!("transpose({i})"), rep.f[i] == rep.e[i].transpose().scale(&t));
    }
    out.record("k_delta".into(), rep.k(&datum.delta()).map(|k| k.is_identity()).unwrap_or(false));

    if rep.ty().family == Family::D2 {
        let last = rep.n - 1;
        let avoids = (1..=l).all(|i| {
            [&rep.e[i], &rep.f[i]].iter().all(|m| m.entries().all(|(a, b, _)| a != last && b != last))
        });
        out.record("block_structure".into(), avoids);
    }

    match InvariantVec::build(rep) {
        Ok(inv) => {
            let reps: Vec<EvalRep> = inv.points.iter().map(|a| rep.twist(a).unwrap()).collect();
            for i in 0..=l {
                out.record(format!("w_annihilated_e({i})"), coproduct_e(&reps, i).apply(&inv.w).is_empty());
                out.record(format!("w_annihilated_f({i})"), coproduct_f(&reps, i).apply(&inv.w).is_empty());
                let kk = kron_chain(&vec![rep.k_i(i); inv.m]);
                out.record(format!("w_weight_zero({i})"), kk.apply(&inv.w) == inv.w);
            }
        }
        Err(e) => out.failures.push(format!("invariant_vector: {e}")),
    }
    out
}

/// Convenience used by the CLI and tests.
pub fn build_all(t: AffineType) -> Result<(EvalRep, InvariantVec)> {
    let rep = EvalRep::build(t)?;
    let inv = InvariantVec::build(&rep)?;
    if inv.w.is_empty() {
        return Err(Error::Structure("invariant vector vanishes".into()));
    }
    Ok((rep, inv))
}
