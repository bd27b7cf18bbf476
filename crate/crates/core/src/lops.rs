//! L operators with a second evaluation module as the quantum space, and
//! exact checks of the defining relations at level zero.
//!
//! Both spectral parameters collapse to `zeta = z/w`. `plus` is a power
//! series in `zeta`; `minus` is stored as a power series in `u = 1/zeta`.
//! The central element acts as 1, so the mixed relation is only tested at
//! that value.

use crate::error::{Error, Result};
use crate::evalrep::{EvalRep, InvariantVec};
use crate::linalg::{embed, QMat, SparseVec};
use crate::matseries::{BiSeries, MatSeries, QSeries};
use crate::qfield::QScalar;
use crate::report::CheckOutcome;
use crate::rootdata::Family;
use crate::rsolver::{anchor, that, w_chain, weight_vectors, RArtifact};

#[derive(Clone, Debug)]
pub struct EvalL {
    pub n: usize,
    pub k: i64,
    pub plus: QSeries,
    /// Series in `1/zeta`.
    pub minus: QSeries,
    /// `sum E_ii (x) rho(k_{eta_i})`.
    pub that: QMat,
}

/// Exchanges the two tensor factors of an operator on `V (x) V`.
pub fn flip(m: &QMat, n: usize) -> QMat {
    let p: Vec<usize> = (0..n * n).map(|i| (i % n) * n + i / n).collect();
    m.permute(&p)
}

/// `N x N` block `(i, j)` (0-based) of an operator on `V (x) V_quantum`.
pub fn block(m: &QMat, n: usize, i: usize, j: usize) -> QMat {
    let mut b = QMat::zero(n);
    for a in 0..n {
        for (c, v) in m.row(i * n + a).range(j * n..(j + 1) * n) {
            b.set(a, c - j * n, v.clone());
        }
    }
    b
}

impl EvalL {
    pub fn build(art: &RArtifact, rep: &EvalRep) -> Result<Self> {
        let n = art.n;
        let that = that(rep)?;
        let calr = art.calr();
        let plus = calr.mul_right(&that.inverse()?);
        let minus = calr.map_coeffs(|c| flip(c, n)).inv()?.mul_left(&that);
        let l = EvalL { n, k: art.k, plus, minus, that };
        let tri = l.check_triangular();
        if !tri.passed() {
            return Err(Error::Structure(tri.detail));
        }
        Ok(l)
    }

    pub fn series(&self, plus: bool) -> &QSeries {
        if plus {
            &self.plus
        } else {
            &self.minus
        }
    }

    /// `L^{+-}_{ij}` as an operator-valued series on the quantum space.
    pub fn entry(&self, plus: bool, i: usize, j: usize) -> QSeries {
        let s = self.series(plus);
        MatSeries::from_coeffs(self.n, 0, s.trunc(), s.terms().map(|(t, c)| (t, block(c, self.n, i, j))))
    }

    /// Constant terms: `plus` block upper triangular, `minus` block lower
    /// triangular, diagonal blocks invertible.
    pub fn check_triangular(&self) -> CheckOutcome {
        let n = self.n;
        for (plus, name) in [(true, "L+"), (false, "L-")] {
            let c0 = self.series(plus).coeff(0);
            for (r, c, _) in c0.entries() {
                let (i, j) = (r / n, c / n);
                if (plus && i > j) || (!plus && i < j) {
                    return CheckOutcome::fail("triangular", -1, format!("{name}[0] block ({},{}) nonzero", i + 1, j + 1));
                }
            }
            for i in 0..n {
                if block(&c0, n, i, i).inverse().is_err() {
                    return CheckOutcome::fail("triangular", -1, format!("{name}[0] diagonal block {} singular", i + 1));
                }
            }
        }
        CheckOutcome::pass("triangular", 0, "")
    }

    /// The weight-`alpha_i` part of `plus` at the order of `alpha_i` is
    /// `-(q_i - q_i^{-1}) e_i (x) f_i` times `That^{-1}`.
    pub fn check_anchor_blocks(&self, rep: &EvalRep) -> CheckOutcome {
        let n = self.n;
        let pi = weight_vectors(&rep.datum);
        let tinv = match self.that.inverse() {
            Ok(t) => t,
            Err(e) => return CheckOutcome::fail("anchor_blocks", -1, e.to_string()),
        };
        for i in 0..=rep.rank() {
            let order = if i == 0 { 1 } else { 0 };
            if order > self.k {
                continue;
            }
            let target: Vec<i64> = (0..=rep.rank()).map(|j| rep.datum.d[j] * rep.datum.cartan[j][i]).collect();
            let mut part = QMat::zero(n * n);
            for (r, c, v) in self.plus.coeff(order).entries() {
                let d: Vec<i64> = pi[r / n].iter().zip(&pi[c / n]).map(|(a, b)| a - b).collect();
                if d == target {
                    part.set(r, c, v.clone());
                }
            }
            if part != anchor(rep, i).mul(&tinv) {
                return CheckOutcome::fail("anchor_blocks", -1, format!("node {i}"));
            }
        }
        CheckOutcome::pass("anchor_blocks", self.k, "")
    }

    /// `L+_ii[0] L-_ii[0] = 1`, `L_ii[0] = 1` when `eta_i = 0`, and products
    /// of diagonal constants over relations among the weights.
    pub fn check_diagonal_constants(&self, rep: &EvalRep) -> CheckOutcome {
        let n = self.n;
        let datum = &rep.datum;
        let (p0, m0) = (self.plus.coeff(0), self.minus.coeff(0));
        let id = QMat::identity(n);
        let mut rels: Vec<Vec<usize>> = vec![];
        if datum.ty.family == Family::A1 {
            rels.push((0..n).collect());
        } else {
            for i in 0..n {
                if let Some(j) = (0..n).find(|&j| j != i && datum.eta()[i].add(&datum.eta()[j]).is_zero()) {
                    if i < j {
                        rels.push(vec![i, j]);
                    }
                }
            }
        }
        for i in 0..n {
            let (a, b) = (block(&p0, n, i, i), block(&m0, n, i, i));
            if a.mul(&b) != id {
                return CheckOutcome::fail("diagonal_constants", -1, format!("L+_{0}{0}[0] L-_{0}{0}[0] != 1", i + 1));
            }
            if datum.eta()[i].is_zero() && (a != id || b != id) {
                return CheckOutcome::fail("diagonal_constants", -1, format!("L_{0}{0}[0] != 1 at zero weight", i + 1));
            }
        }
        for rel in rels {
            for c in [&p0, &m0] {
                let prod = rel.iter().fold(id.clone(), |acc, &i| acc.mul(&block(c, n, i, i)));
                if prod != id {
                    return CheckOutcome::fail("diagonal_constants", -1, format!("product over {rel:?} != 1"));
                }
            }
        }
        CheckOutcome::pass("diagonal_constants", 0, "")
    }

    /// The three RLL relations on `V (x) V (x) V_quantum` through total order `order`.
    pub fn check_rll(&self, art: &RArtifact, order: i64) -> CheckOutcome {
        let order = order.min(self.k);
        let parts = vec![
            self.rll_one(art, "rll++", order, true, true),
            self.rll_one(art, "rll--", order, false, false),
            self.rll_one(art, "rll+-", order, true, false),
        ];
        let mut out = CheckOutcome::combine("rll", parts);
        if out.passed() {
            out.detail = "central element at 1; coproduct compatibility not checked directly".into();
        }
        out
    }

    fn rll_one(&self, art: &RArtifact, name: &str, order: i64, first_plus: bool, second_plus: bool) -> CheckOutcome {
        match self.rll_difference(art, order, first_plus, second_plus) {
            Ok(None) => CheckOutcome::pass(name, order, ""),
            Ok(Some((a, b))) => CheckOutcome::fail(name, a + b - 1, format!("residual at x^{a} y^{b}")),
            Err(e) => CheckOutcome::fail(name, -1, e.to_string()),
        }
    }

    /// `R12(z/w) L1(z) L2(w)` against `L2(w) L1(z) R12(z/w)`, in variables
    /// chosen so that every factor is a power series:
    /// `++`: `(x, y) = (z/w, w)`; `--`: `(z/w, 1/z)`; `+-`: `(z, 1/w)`.
    fn rll_difference(&self, art: &RArtifact, order: i64, first_plus: bool, second_plus: bool) -> Result<Option<(i64, i64)>> {
        let n = self.n;
        let id = QMat::identity(n);
        let r = art.r_series();
        let ((ra, rb), (l1a, l1b), (l2a, l2b)) = match (first_plus, second_plus) {
            (true, true) => ((1, 0), (1, 1), (0, 1)),
            (false, false) => ((1, 0), (0, 1), (1, 1)),
            (true, false) => ((1, 1), (1, 0), (0, 1)),
            (false, true) => return Err(Error::OutOfRange("relation L-(z) L+(w) is not one of the defining relations".into())),
        };
        let r12 = BiSeries::substitute(&r.map_coeffs(|c| c.kron(&id)), ra, rb, order)?;
        let l1 = BiSeries::substitute(&self.series(first_plus).map_coeffs(|c| embed(c, n, &[0, 2], 3)), l1a, l1b, order)?;
        let l2 = BiSeries::substitute(&self.series(second_plus).map_coeffs(|c| id.kron(c)), l2a, l2b, order)?;
        let lhs = r12.mul(&l1)?.mul(&l2)?;
        let rhs = l2.mul(&l1)?.mul(&r12)?;
        Ok(lhs.first_difference(&rhs))
    }

    /// `L_1(a_1 z) ... L_M(a_M z) (w (x) 1) = w (x) 1` for both signs.
    pub fn check_w_relation(&self, inv: &InvariantVec, order: i64) -> CheckOutcome {
        self.check_w_relation_at(&inv.w, &inv.points, order)
    }

    pub fn check_w_relation_at(&self, w: &SparseVec<QScalar>, points: &[QScalar], order: i64) -> CheckOutcome {
        let order = order.min(self.k);
        let inv_points: Vec<QScalar> = match points.iter().map(|a| a.inv()).collect::<Result<_>>() {
            Ok(p) => p,
            Err(e) => return CheckOutcome::fail("wrel", -1, e.to_string()),
        };
        for (plus, pts) in [(true, points), (false, &inv_points[..])] {
            let s = self.series(plus);
            let lco: Vec<QMat> = (0..=order).map(|t| s.coeff(t)).collect();
            for j in 0..self.n {
                let chain = w_chain(&lco, w, pts, self.n, j);
                for (t, v) in chain.iter().enumerate() {
                    let expect: SparseVec<QScalar> = if t == 0 { w.iter().map(|(i, x)| (i * self.n + j, x.clone())).collect() } else { SparseVec::new() };
                    if *v != expect {
                        let sign = if plus { "+" } else { "-" };
                        return CheckOutcome::fail("wrel", t as i64 - 1, format!("L{sign} residual at order {t}, quantum basis vector {}", j + 1));
                    }
                }
            }
        }
        CheckOutcome::pass("wrel", order, "")
    }

    /// Type A: `sum_g (-q)^{l(g)} L_{1 g(1)}(a_1 z) ... L_{N g(N)}(a_N z) = 1`.
    pub fn check_qdet(&self, rep: &EvalRep, inv: &InvariantVec, order: i64) -> CheckOutcome {
        if rep.ty().family != Family::A1 {
            return CheckOutcome::skipped("qdet", "type A only");
        }
        let order = order.min(self.k);
        let n = self.n;
        let mq = rep.ctx.q().neg();
        for plus in [true, false] {
            let mut total = MatSeries::zero(n, 0, order);
            for (perm, len) in permutations(n) {
                let mut prod = MatSeries::identity(n, order);
                for (row, &col) in perm.iter().enumerate() {
                    let a = if plus { inv.points[row].clone() } else { inv.points[row].inv().expect("nonzero point") };
                    let e = match self.entry(plus, row, col).truncate(order).rescale(&a) {
                        Ok(e) => e,
                        Err(err) => return CheckOutcome::fail("qdet", -1, err.to_string()),
                    };
                    prod = prod.mul(&e).expect("same dimension");
                }
                total = total.add(&prod.scale(&mq.pow(len as i64))).expect("same dimension");
            }
            if let Some(t) = total.first_difference(&MatSeries::identity(n, order)) {
                let sign = if plus { "+" } else { "-" };
                return CheckOutcome::fail("qdet", t - 1, format!("L{sign} quantum determinant differs at order {t}"));
            }
        }
        CheckOutcome::pass("qdet", order, "")
    }

    /// `D_{l+1}^(2)`: `(G (x) 1) L(z) (G^{-1} (x) 1) = L(-z)`.
    pub fn check_g_relation(&self, rep: &EvalRep) -> CheckOutcome {
        let Some(g) = rep.g_matrix() else {
            return CheckOutcome::skipped("grel", "defined for D_{l+1}^(2) only");
        };
        let id = QMat::identity(self.n);
        let gg = g.kron(&id);
        let ginv = g.inverse().expect("G is an involution").kron(&id);
        for plus in [true, false] {
            for (t, c) in self.series(plus).terms() {
                let lhs = gg.mul(c).mul(&ginv);
                let rhs = if t % 2 == 0 { c.clone() } else { c.neg() };
                if lhs != rhs {
                    return CheckOutcome::fail("grel", t - 1, format!("order {t}"));
                }
            }
        }
        CheckOutcome::pass("grel", self.k, "")
    }
}

/// Permutations of `0..n` with their inversion counts.
fn permutations(n: usize) -> Vec<(Vec<usize>, usize)> {
    fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, usize)>) {
        if left.is_empty() {
            let inv = (0..prefix.len()).map(|i| (i + 1..prefix.len()).filter(|&j| prefix[i] > prefix[j]).count()).sum();
            out.push((prefix.clone(), inv));
            return;
        }
        for k in 0..left.len() {
            let x = left.remove(k);
            prefix.push(x);
            rec(prefix, left, out);
            prefix.pop();
            left.insert(k, x);
        }
    }
    let mut out = vec![];
    rec(&mut vec![], &mut (0..n).collect(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::AffineType;
    use crate::rsolver::solve_theta;

    fn setup(f: Family, l: usize, k: i64) -> (EvalRep, InvariantVec, RArtifact, EvalL) {
        let rep = EvalRep::build(AffineType::new(f, l).unwrap()).unwrap();
        let inv = InvariantVec::build(&rep).unwrap();
        let art = solve_theta(&rep, k).unwrap();
        let lop = EvalL::build(&art, &rep).unwrap();
        (rep, inv, art, lop)
    }

    #[test]
    fn a1_plus_constant_term() {
        let (rep, _, _, lop) = setup(Family::A1, 1, 1);
        let expect = QMat::identity(4).add(&anchor(&rep, 1)).mul(&lop.that.inverse().unwrap());
        assert_eq!(lop.plus.coeff(0), expect);
        let flipped = lop.plus.coeff(0).mul(&lop.that).permute(&(0..4).map(|i| (i % 2) * 2 + i / 2).collect::<Vec<_>>());
        assert!(flipped.mul(&lop.that.inverse().unwrap().mul(&lop.minus.coeff(0))).is_identity());
    }

    #[test]
    fn a1_relations() {
        let (rep, inv, art, lop) = setup(Family::A1, 1, 2);
        assert!(lop.check_anchor_blocks(&rep).passed());
        assert!(lop.check_diagonal_constants(&rep).passed());
        let r = lop.check_rll(&art, 2);
        assert!(r.passed(), "{r:?}");
        let w = lop.check_w_relation(&inv, 2);
        assert!(w.passed(), "{w:?}");
        let d = lop.check_qdet(&rep, &inv, 2);
        assert!(d.passed(), "{d:?}");
    }

    #[test]
    fn wrong_point_breaks_w_relation() {
        let (rep, inv, _, lop) = setup(Family::A1, 1, 2);
        let bad = vec![inv.points[0].clone(), rep.ctx.q_pow(-4)];
        let out = lop.check_w_relation_at(&inv.w, &bad, 2);
        assert!(!out.passed());
        assert_eq!(out.certified_order, 0);
    }

    #[test]
    fn d2_g_relation() {
        let (rep, inv, art, lop) = setup(Family::D2, 2, 2);
        assert!(lop.check_g_relation(&rep).passed());
        assert!(lop.check_w_relation(&inv, 2).passed());
        assert!(lop.check_rll(&art, 1).passed());
    }
}
