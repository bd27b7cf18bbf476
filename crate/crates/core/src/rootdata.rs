//! Affine root and lattice data: Cartan matrices, marks, symmetrizers, the
//! invariant form on `h*`, and the weights of the vector representation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::LinearSystem;
use crate::qfield::{rat, BigRat, QContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `A_l^(1)`
    A1,
    /// `B_l^(1)`
    B1,
    /// `C_l^(1)`
    C1,
    /// `D_l^(1)`
    D1,
    /// `A_{2l}^(2)`, nodes in reverse Kac order so that `a_0 = 1`.
    A2even,
    /// `A_{2l-1}^(2)`
    A2odd,
    /// `D_{l+1}^(2)`
    D2,
}

impl Family {
    pub const ALL: [Family; 7] = [Family::A1, Family::B1, Family::C1, Family::D1, Family::A2even, Family::A2odd, Family::D2];

    pub fn min_rank(self) -> usize {
        match self {
            Family::A1 | Family::A2even => 1,
            Family::C1 | Family::D2 => 2,
            Family::B1 | Family::A2odd => 3,
            Family::D1 => 4,
        }
    }

    pub fn is_twisted(self) -> bool {
        matches!(self, Family::A2even | Family::A2odd | Family::D2)
    }

    /// Short name used on the command line.
    pub fn tag(self) -> &'static str {
        match self {
            Family::A1 => "A",
            Family::B1 => "B",
            Family::C1 => "C",
            Family::D1 => "D",
            Family::A2even => "A2even",
            Family::A2odd => "A2odd",
            Family::D2 => "D2",
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidType(format!("unknown family `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineType {
    pub family: Family,
    pub rank: usize,
}

impl AffineType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        if rank < family.min_rank() {
            return Err(Error::InvalidType(format!(
                "{} requires rank >= {}, got {rank}",
                family.tag(),
                family.min_rank()
            )));
        }
        Ok(AffineType { family, rank })
    }
}

impl fmt::Display for AffineType {
    /// Conventional name, e.g. `A_{4}^(2)` for `A2even` of rank 2.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = self.rank;
        match self.family {
            Family::A1 => write!(f, "A_{l}^(1)"),
            Family::B1 => write!(f, "B_{l}^(1)"),
            Family::C1 => write!(f, "C_{l}^(1)"),
            Family::D1 => write!(f, "D_{l}^(1)"),
            Family::A2even => write!(f, "A_{}^(2)", 2 * l),
            Family::A2odd => write!(f, "A_{}^(2)", 2 * l - 1),
            Family::D2 => write!(f, "D_{}^(2)", l + 1),
        }
    }
}

/// Element of `h*` in the basis `(alpha_0, ..., alpha_l, Lambda_0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVec(pub Vec<BigRat>);

impl LatticeVec {
    pub fn zero(l: usize) -> Self {
        LatticeVec(vec![BigRat::zero(); l + 2])
    }

    pub fn alpha(l: usize, i: usize) -> Self {
        let mut v = Self::zero(l);
        v.0[i] = BigRat::one();
        v
    }

    pub fn lambda0(l: usize) -> Self {
        Self::basis(l, l + 1)
    }

    /// `k`-th basis vector; `k = l + 1` is `Lambda_0`.
    pub fn basis(l: usize, k: usize) -> Self {
        let mut v = Self::zero(l);
        v.0[k] = BigRat::one();
        v
    }

    /// Element of `Q` with the given integer coefficients on `alpha_0..alpha_l`.
    pub fn from_root_coords(m: &[i64]) -> Self {
        let mut v = Self::zero(m.len() - 1);
        for (i, &c) in m.iter().enumerate() {
            v.0[i] = rat(c, 1);
        }
        v
    }

    pub fn add(&self, o: &Self) -> Self {
        LatticeVec(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        LatticeVec(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &BigRat) -> Self {
        LatticeVec(self.0.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> Self {
        LatticeVec(self.0.iter().map(|a| -a).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    fn rank(&self) -> usize {
        self.0.len() - 2
    }

    pub fn in_q(&self) -> bool {
        self.0[self.rank() + 1].is_zero() && self.0[..=self.rank()].iter().all(|c| c.is_integer())
    }

    pub fn in_q_plus(&self) -> bool {
        self.in_q() && self.0[..=self.rank()].iter().all(|c| !c.is_negative())
    }

    /// Integer coefficients on `alpha_0..alpha_l`, if in `Q`.
    pub fn root_coords(&self) -> Option<Vec<i64>> {
        if !self.in_q() {
            return None;
        }
        self.0[..=self.rank()].iter().map(|c| c.to_integer().to_i64()).collect()
    }

    pub fn height(&self) -> Option<i64> {
        self.root_coords().map(|m| m.iter().sum())
    }
}

impl fmt::Display for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    pub ty: AffineType,
    pub cartan: Vec<Vec<i64>>,
    pub marks: Vec<i64>,
    pub comarks: Vec<i64>,
    pub h_dual: i64,
    pub d: Vec<i64>,
    pub p: i64,
    pub sigma: i64,
    /// Substrate exponent: `q = s^D`.
    pub dd: u32,
    omega1: LatticeVec,
    eta: Vec<LatticeVec>,
}

fn cartan_matrix(t: AffineType) -> Vec<Vec<i64>> {
    let l = t.rank;
    let mut a = vec![vec![0i64; l + 1]; l + 1];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize, aij: i64, aji: i64| {
        a[i][j] = aij;
        a[j][i] = aji;
    };
    match t.family {
        Family::A1 => {
            if l == 1 {
                link(0, 1, -2, -2);
            } else {
                for i in 0..=l {
                    link(i, (i + 1) % (l + 1), -1, -1);
                }
            }
        }
        Family::B1 => {
            link(0, 2, -1, -1);
            for i in 1..l - 1 {
                link(i, i + 1, -1, -1);
            }
            link(l - 1, l, -1, -2);
        }
        Family::C1 => {
            link(0, 1, -1, -2);
            for i in 1..l - 1 {
                link(i, i + 1, -1, -1);
            }
            link(l - 1, l, -2, -1);
        }
        Family::D1 => {
            link(0, 2, -1, -1);
            for i in 1..l - 2 {
                link(i, i + 1, -1, -1);
            }
            link(l - 2, l - 1, -1, -1);
            link(l - 2, l, -1, -1);
        }
        Family::A2even => {
            if l == 1 {
                link(0, 1, -1, -4);
            } else {
                link(0, 1, -1, -2);
                for i in 1..l - 1 {
                    link(i, i + 1, -1, -1);
                }
                link(l - 1, l, -1, -2);
            }
        }
        Family::A2odd => {
            link(0, 2, -1, -1);
            for i in 1..l - 1 {
                link(i, i + 1, -1, -1);
            }
            link(l - 1, l, -2, -1);
        }
        Family::D2 => {
            link(0, 1, -2, -1);
            for i in 1..l - 1 {
                link(i, i + 1, -1, -1);
            }
            link(l - 1, l, -1, -2);
        }
    }
    a
}

/// Rescales a rational vector to coprime integers with positive first entry.
fn primitive_integers(v: &[BigRat]) -> Vec<i64> {
    let l = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v.iter().map(|c| (c * BigRat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let sign = if ints.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) { -1 } else { 1 };
    ints.iter().map(|c| (c / &g).to_i64().unwrap() * sign).collect()
}

/// One-dimensional null space of an integer matrix, as primitive integers.
fn null_vector(a: &[Vec<i64>]) -> Result<Vec<i64>> {
    let n = a[0].len();
    let mut sys = LinearSystem::<BigRat>::new(n);
    for row in a {
        let r: BTreeMap<usize, BigRat> = row.iter().enumerate().filter(|(_, &x)| x != 0).map(|(j, &x)| (j, rat(x, 1))).collect();
        sys.push(r, BigRat::zero());
    }
    let sol = sys.solve().expect("homogeneous system is consistent");
    if sol.kernel.len() != 1 {
        return Err(Error::Structure(format!("Cartan matrix has corank {}", sol.kernel.len())));
    }
    Ok(primitive_integers(&sol.kernel[0]))
}

fn symmetrizers(a: &[Vec<i64>]) -> Result<Vec<i64>> {
    let n = a.len();
    let mut d: Vec<Option<BigRat>> = vec![None; n];
    d[0] = Some(BigRat::one());
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if i != j && a[i][j] != 0 {
                let dj = d[i].clone().unwrap() * rat(a[i][j], a[j][i]);
                match &d[j] {
                    None => {
                        d[j] = Some(dj);
                        stack.push(j);
                    }
                    Some(x) if *x != dj => return Err(Error::Structure("Cartan matrix is not symmetrizable".into())),
                    _ => {}
                }
            }
        }
    }
    let d: Vec<BigRat> = d.into_iter().map(|x| x.expect("connected diagram")).collect();
    Ok(primitive_integers(&d))
}

impl RootDatum {
    pub fn build(t: AffineType) -> Result<Self> {
        let t = AffineType::new(t.family, t.rank)?;
        let l = t.rank;
        let cartan = cartan_matrix(t);
        let marks = null_vector(&cartan)?;
        let transposed: Vec<Vec<i64>> = (0..=l).map(|j| (0..=l).map(|i| cartan[i][j]).collect()).collect();
        let comarks = null_vector(&transposed)?;
        let d = symmetrizers(&cartan)?;
        let h_dual = comarks.iter().sum();
        let p = if t.family == Family::A2even && l == 1 { 2 } else { 1 };
        let sigma = if matches!(t.family, Family::A2even | Family::A2odd) { -1 } else { 1 };
        let mut datum = RootDatum {
            ty: t,
            cartan,
            marks,
            comarks,
            h_dual,
            d,
            p,
            sigma,
            dd: 1,
            omega1: LatticeVec::zero(l),
            eta: vec![],
        };
        datum.omega1 = datum.solve_omega(1)?;
        datum.eta = datum.build_eta();
        datum.dd = datum.compute_dd();
        Ok(datum)
    }

    pub fn rank(&self) -> usize {
        self.ty.rank
    }

    pub fn ctx(&self) -> QContext {
        QContext::new(self.dd)
    }

    /// Gram matrix entry for basis vectors.
    fn gram(&self, i: usize, j: usize) -> i64 {
        let l = self.rank();
        match (i, j) {
            (i, j) if i <= l && j <= l => self.d[i] * self.cartan[i][j],
            (i, j) if i <= l => if i == 0 && j == l + 1 { self.d[0] } else { 0 },
            (i, 0) if i == l + 1 => self.d[0],
            (_, j) if j <= l => 0,
            _ => 0,
        }
    }

    pub fn pairing(&self, x: &LatticeVec, y: &LatticeVec) -> BigRat {
        let n = self.rank() + 2;
        let mut acc = BigRat::zero();
        for i in 0..n {
            if x.0[i].is_zero() {
                continue;
            }
            for j in 0..n {
                let g = self.gram(i, j);
                if g != 0 && !y.0[j].is_zero() {
                    acc += &x.0[i] * &y.0[j] * rat(g, 1);
                }
            }
        }
        acc
    }

    pub fn alpha(&self, i: usize) -> LatticeVec {
        LatticeVec::alpha(self.rank(), i)
    }

    pub fn delta(&self) -> LatticeVec {
        LatticeVec::from_root_coords(&self.marks)
    }

    pub fn lambda0(&self) -> LatticeVec {
        LatticeVec::lambda0(self.rank())
    }

    /// Fundamental weight `omega_i`, `1 <= i <= l`.
    pub fn omega(&self, i: usize) -> Result<LatticeVec> {
        if i == 1 {
            return Ok(self.omega1.clone());
        }
        self.solve_omega(i)
    }

    fn solve_omega(&self, i: usize) -> Result<LatticeVec> {
        let l = self.rank();
        if i == 0 || i > l {
            return Err(Error::OutOfRange(format!("omega_{i}")));
        }
        let n = l + 2;
        let mut sys = LinearSystem::<BigRat>::new(n);
        let row_of = |v: &LatticeVec| -> BTreeMap<usize, BigRat> {
            (0..n)
                .map(|k| (k, self.pairing(v, &LatticeVec::basis(l, k))))
                .filter(|(_, c)| !c.is_zero())
                .collect()
        };
        for j in 1..=l {
            let aj = self.alpha(j).scale(&rat(1, self.d[j]));
            sys.push(row_of(&aj), if i == j { BigRat::one() } else { BigRat::zero() });
        }
        sys.push(row_of(&self.delta()), BigRat::zero());
        sys.push(row_of(&self.lambda0()), BigRat::zero());
        let sol = sys.solve().ok_or_else(|| Error::Structure("fundamental weight system inconsistent".into()))?;
        if !sol.kernel.is_empty() {
            return Err(Error::Structure("degenerate form on h*".into()));
        }
        Ok(LatticeVec(sol.particular))
    }

    /// `epsilon_i = p omega_1 - (alpha_1 + ... + alpha_{i-1})`.
    pub fn epsilon(&self, i: usize) -> LatticeVec {
        let mut v = self.omega1.scale(&rat(self.p, 1));
        for k in 1..i {
            v = v.sub(&self.alpha(k));
        }
        v
    }

    fn build_eta(&self) -> Vec<LatticeVec> {
        let l = self.rank();
        let eps: Vec<LatticeVec> = (1..=l).map(|i| self.epsilon(i)).collect();
        let zero = LatticeVec::zero(l);
        let neg_rev = || eps.iter().rev().map(|e| e.neg());
        match self.ty.family {
            Family::A1 => {
                let mut v = eps.clone();
                v.push(eps.iter().fold(zero.clone(), |a, e| a.sub(e)));
                v
            }
            Family::B1 | Family::A2even => eps.iter().cloned().chain([zero.clone()]).chain(neg_rev()).collect(),
            Family::C1 | Family::A2odd | Family::D1 => eps.iter().cloned().chain(neg_rev()).collect(),
            Family::D2 => eps.iter().cloned().chain([zero.clone()]).chain(neg_rev()).chain([zero.clone()]).collect(),
        }
    }

    /// Weights `eta_1..eta_N` of the basis vectors of the vector representation.
    pub fn eta(&self) -> &[LatticeVec] {
        &self.eta
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    fn compute_dd(&self) -> u32 {
        let mut lcm = BigInt::one();
        for a in &self.eta {
            for b in &self.eta {
                lcm = lcm.lcm(self.pairing(a, b).denom());
            }
        }
        lcm.to_u32().expect("small substrate exponent")
    }

    /// `(eta_i | eta_j)` for 0-based indices.
    pub fn eta_pairing(&self, i: usize, j: usize) -> BigRat {
        self.pairing(&self.eta[i], &self.eta[j])
    }

    /// Integer vector `((alpha_j | lambda))_j`, which determines the action of
    /// `U'` Cartan elements on a vector of weight `lambda`.
    pub fn pairing_vector(&self, lambda: &LatticeVec) -> Vec<BigRat> {
        (0..=self.rank()).map(|j| self.pairing(&self.alpha(j), lambda)).collect()
    }

    pub fn in_sigma(&self, v: &LatticeVec) -> bool {
        let l = self.rank();
        v.0[..=l].iter().all(|c| c.is_integer()) && (&v.0[l + 1] * rat(self.d[0], 1)).is_integer()
    }

    pub fn in_gamma(&self, v: &LatticeVec) -> bool {
        let pw = self.omega1.scale(&rat(self.p, 1));
        let order = pw.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom())).to_i64().unwrap();
        (0..order).any(|n| self.in_sigma(&v.sub(&pw.scale(&rat(n, 1)))))
    }

    /// Evaluation points for the invariant vector: `(M, [a_1..a_M])` as
    /// integer powers of `s`, together with their signs.
    pub fn eval_points(&self) -> Result<Vec<(i64, i64)>> {
        let ctx = self.ctx();
        if self.ty.family == Family::A1 {
            return Ok((0..=self.rank() as i64).map(|i| (1, -2 * i * ctx.d as i64)).collect());
        }
        let e = rat(-self.d[0] * self.h_dual, self.comarks[0]);
        let scaled = e * rat(ctx.d as i64, 1);
        if !scaled.is_integer() {
            return Err(Error::FractionalPower(scaled.to_string()));
        }
        Ok(vec![(1, 0), (self.sigma, scaled.to_integer().to_i64().unwrap())])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn datum(f: Family, l: usize) -> RootDatum {
        RootDatum::build(AffineType::new(f, l).unwrap()).unwrap()
    }

    #[test]
    fn a1_rank1() {
        let d = datum(Family::A1, 1);
        assert_eq!(d.cartan, vec![vec![2, -2], vec![-2, 2]]);
        assert_eq!(d.marks, vec![1, 1]);
        assert_eq!(d.comarks, vec![1, 1]);
        assert_eq!(d.h_dual, 2);
        assert_eq!(d.d, vec![1, 1]);
        assert_eq!(d.pairing(&d.alpha(1), &d.alpha(1)), rat(2, 1));
        let w = d.omega(1).unwrap();
        assert_eq!(d.pairing(&w, &w), rat(1, 2));
        assert_eq!(d.pairing(&d.lambda0(), &d.lambda0()), rat(0, 1));
        assert_eq!(d.dd, 2);
    }

    #[test]
    fn dual_coxeter_numbers() {
        for l in 1..6 {
            assert_eq!(datum(Family::A1, l).h_dual, l as i64 + 1);
        }
        assert_eq!(datum(Family::B1, 3).h_dual, 5);
        assert_eq!(datum(Family::C1, 3).h_dual, 4);
        assert_eq!(datum(Family::D1, 4).h_dual, 6);
        assert_eq!(datum(Family::A2even, 1).h_dual, 3);
        assert_eq!(datum(Family::A2even, 2).h_dual, 5);
        assert_eq!(datum(Family::A2odd, 3).h_dual, 6);
        assert_eq!(datum(Family::D2, 2).h_dual, 4);
    }

    #[test]
    fn normalization_of_node_zero() {
        for f in Family::ALL {
            for l in f.min_rank()..f.min_rank() + 3 {
                let d = datum(f, l);
                assert_eq!(d.marks[0], 1, "{f:?}{l}");
                assert_eq!(d.comarks[0], if f == Family::A2even { 2 } else { 1 }, "{f:?}{l}");
            }
        }
    }

    #[test]
    fn rank_bounds() {
        assert!(AffineType::new(Family::B1, 2).is_err());
        assert!(AffineType::new(Family::D1, 3).is_err());
        assert!(AffineType::new(Family::A2odd, 2).is_err());
        assert!(AffineType::new(Family::A2even, 1).is_ok());
    }

    #[test]
    fn weight_lists() {
        let d = datum(Family::C1, 2);
        let e1 = d.epsilon(1);
        let e2 = d.epsilon(2);
        assert_eq!(d.eta(), &[e1.clone(), e2.clone(), e2.neg(), e1.neg()]);
        let d = datum(Family::D2, 2);
        assert_eq!(d.dim(), 6);
        assert!(d.eta()[2].is_zero() && d.eta()[5].is_zero());
        let d = datum(Family::A1, 1);
        assert_eq!(d.eta()[0], d.omega(1).unwrap());
        assert_eq!(d.eta()[1], d.omega(1).unwrap().neg());
    }

    #[test]
    fn substrate_exponents() {
        for l in 1..5 {
            assert_eq!(datum(Family::A1, l).dd, l as u32 + 1);
        }
        for f in [Family::B1, Family::C1, Family::D1, Family::A2even, Family::A2odd, Family::D2] {
            assert_eq!(datum(f, f.min_rank()).dd, 1, "{f:?}");
        }
    }

    #[test]
    fn eval_points() {
        let d = datum(Family::B1, 3);
        assert_eq!(d.eval_points().unwrap(), vec![(1, 0), (1, -10)]);
        let d = datum(Family::A2even, 1);
        assert_eq!(d.eval_points().unwrap(), vec![(1, 0), (-1, -6)]);
    }

    #[test]
    fn lattice_membership() {
        let d = datum(Family::A1, 2);
        let w = d.omega(1).unwrap();
        assert!(!d.in_sigma(&w));
        assert!(d.in_gamma(&w));
        assert!(d.in_gamma(&d.alpha(0).add(&w.scale(&rat(2, 1)))));
        assert!(!d.in_gamma(&w.scale(&rat(1, 2))));
        assert!(d.alpha(1).in_q_plus());
        assert!(!d.alpha(1).neg().in_q_plus());
    }
}
