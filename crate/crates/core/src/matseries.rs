//! Truncated matrix-valued power and Laurent series in one spectral
//! variable, plus a two-variable wrapper for Yang-Baxter type identities.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{Field, SparseMat};
use crate::qfield::QScalar;

/// `sum_{low <= n <= trunc} c_n z^n` with `dim x dim` matrix coefficients.
///
/// Orders above `trunc` are unknown, not zero; every operation propagates
/// the order up to which its result is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct MatSeries<F> {
    dim: usize,
    low: i64,
    trunc: i64,
    coeffs: BTreeMap<i64, SparseMat<F>>,
}

pub type QSeries = MatSeries<QScalar>;

impl<F: Field> MatSeries<F> {
    pub fn zero(dim: usize, low: i64, trunc: i64) -> Self {
        MatSeries { dim, low, trunc, coeffs: BTreeMap::new() }
    }

    pub fn constant(m: SparseMat<F>, trunc: i64) -> Self {
        let mut s = Self::zero(m.dim(), 0, trunc);
        s.set(0, m);
        s
    }

    pub fn identity(dim: usize, trunc: i64) -> Self {
        Self::constant(SparseMat::identity(dim), trunc)
    }

    pub fn from_coeffs<I: IntoIterator<Item = (i64, SparseMat<F>)>>(dim: usize, low: i64, trunc: i64, it: I) -> Self {
        let mut s = Self::zero(dim, low, trunc);
        for (n, m) in it {
            s.add_to(n, &m);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn coeff(&self, n: i64) -> SparseMat<F> {
        self.coeffs.get(&n).cloned().unwrap_or_else(|| SparseMat::zero(self.dim))
    }

    pub fn coeff_ref(&self, n: i64) -> Option<&SparseMat<F>> {
        self.coeffs.get(&n)
    }

    /// Nonzero coefficients in increasing order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &SparseMat<F>)> {
        self.coeffs.iter().map(|(n, m)| (*n, m))
    }

    pub fn set(&mut self, n: i64, m: SparseMat<F>) {
        assert!(n >= self.low, "order {n} below low order {}", self.low);
        if n > self.trunc {
            return;
        }
        if m.is_zero() {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, m);
        }
    }

    pub fn add_to(&mut self, n: i64, m: &SparseMat<F>) {
        let c = self.coeff(n).add(m);
        self.set(n, c);
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Drops orders above `k`.
    pub fn truncate(&self, k: i64) -> Self {
        let trunc = k.min(self.trunc);
        MatSeries {
            dim: self.dim,
            low: self.low.min(trunc),
            trunc,
            coeffs: self.coeffs.range(..=trunc).map(|(n, m)| (*n, m.clone())).collect(),
        }
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch(format!("series of size {} and {}", self.dim, o.dim)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut s = Self::zero(self.dim, self.low.min(o.low), self.trunc.min(o.trunc));
        for (n, m) in self.coeffs.iter().chain(o.coeffs.iter()) {
            if *n <= s.trunc {
                s.add_to(*n, m);
            }
        }
        Ok(s)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|m| m.neg())
    }

    pub fn scale(&self, c: &F) -> Self {
        self.map_coeffs(|m| m.scale(c))
    }

    /// Applies a linear map to every coefficient; the dimension may change.
    pub fn map_coeffs(&self, f: impl Fn(&SparseMat<F>) -> SparseMat<F>) -> Self {
        let dim = f(&SparseMat::zero(self.dim)).dim();
        let coeffs = self.coeffs.iter().map(|(n, m)| (*n, f(m))).filter(|(_, m)| !m.is_zero()).collect();
        MatSeries { dim, low: self.low, trunc: self.trunc, coeffs }
    }

    /// Cauchy product. Exact through order `min(K_a + low_b, K_b + low_a)`.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let trunc = (self.trunc + o.low).min(o.trunc + self.low);
        let mut s = Self::zero(self.dim, self.low + o.low, trunc.max(self.low + o.low - 1));
        for (i, a) in &self.coeffs {
            for (j, b) in o.coeffs.range(..=trunc - i) {
                s.add_to(i + j, &a.mul(b));
            }
        }
        s.trunc = trunc;
        Ok(s)
    }

    pub fn mul_left(&self, m: &SparseMat<F>) -> Self {
        self.map_coeffs(|c| m.mul(c))
    }

    pub fn mul_right(&self, m: &SparseMat<F>) -> Self {
        self.map_coeffs(|c| c.mul(m))
    }

    /// Inverse of a power series with invertible constant term.
    pub fn inv(&self) -> Result<Self> {
        if self.low < 0 && self.coeffs.range(..0).next().is_some() {
            return Err(Error::NotInvertible("series has negative-order terms".into()));
        }
        let a0inv = self
            .coeff(0)
            .inverse()
            .map_err(|e| Error::NotInvertible(format!("constant term: {e}")))?;
        let mut b = Self::zero(self.dim, 0, self.trunc);
        b.set(0, a0inv.clone());
        for n in 1..=self.trunc {
            let mut acc = SparseMat::zero(self.dim);
            for (k, ak) in self.coeffs.range(1..=n) {
                if let Some(bk) = b.coeffs.get(&(n - k)) {
                    acc = acc.add(&ak.mul(bk));
                }
            }
            b.set(n, a0inv.mul(&acc).neg());
        }
        Ok(b)
    }

    fn without_constant_identity(&self) -> Result<Self> {
        if !self.coeff(0).is_identity() || self.coeffs.range(..0).next().is_some() {
            return Err(Error::Structure("series is not unipotent".into()));
        }
        let mut x = self.clone();
        x.coeffs.remove(&0);
        x.low = x.low.max(0);
        Ok(x)
    }

    /// `log(1 + X) = X - X^2/2 + ...` for a series with constant term `1`.
    pub fn log_unipotent(&self) -> Result<Self> {
        let x = self.without_constant_identity()?;
        let mut acc = Self::zero(self.dim, 0, self.trunc);
        let mut pow = x.clone();
        for k in 1..=self.trunc.max(0) {
            let c = F::from_i64(if k % 2 == 1 { 1 } else { -1 }).mul(&F::from_i64(k).inv().unwrap());
            acc = acc.add(&pow.scale(&c))?;
            pow = pow.mul(&x)?;
            pow.trunc = self.trunc;
            if pow.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    /// `exp(X)` for a series with no constant or negative-order terms.
    pub fn exp(&self) -> Result<Self> {
        if self.coeffs.range(..=0).next().is_some() {
            return Err(Error::Structure("exp needs a series without constant term".into()));
        }
        let mut acc = Self::identity(self.dim, self.trunc);
        let mut term = Self::identity(self.dim, self.trunc);
        for k in 1..=self.trunc.max(0) {
            term = term.mul(self)?.scale(&F::from_i64(k).inv().unwrap());
            term.trunc = self.trunc;
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Substitution `z -> c z`.
    pub fn rescale(&self, c: &F) -> Result<Self> {
        let cinv = c.inv().ok_or(Error::DivisionByZero)?;
        let mut s = self.clone();
        for (n, m) in s.coeffs.iter_mut() {
            let base = if *n >= 0 { c } else { &cinv };
            let mut f = F::one();
            for _ in 0..n.unsigned_abs() {
                f = f.mul(base);
            }
            *m = m.scale(&f);
        }
        Ok(s)
    }

    /// First order at which the two series differ, within common truncation.
    pub fn first_difference(&self, o: &Self) -> Option<i64> {
        let k = self.trunc.min(o.trunc);
        let lo = self.low.min(o.low);
        (lo..=k).find(|&n| self.coeff_ref(n) != o.coeff_ref(n))
    }
}

/// Two-variable series `sum c_{a,b} x^a y^b`, `a, b >= 0`, truncated at total degree `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<F> {
    dim: usize,
    trunc: i64,
    coeffs: BTreeMap<(i64, i64), SparseMat<F>>,
}

impl<F: Field> BiSeries<F> {
    pub fn zero(dim: usize, trunc: i64) -> Self {
        BiSeries { dim, trunc, coeffs: BTreeMap::new() }
    }

    /// `s(x^a y^b)`; requires `a + b > 0` or a constant series.
    pub fn substitute(s: &MatSeries<F>, a: i64, b: i64, trunc: i64) -> Result<Self> {
        let mut out = Self::zero(s.dim(), trunc);
        for (n, m) in s.terms() {
            let (ea, eb) = (n * a, n * b);
            if ea < 0 || eb < 0 {
                return Err(Error::Structure(format!("substitution produces negative exponent at order {n}")));
            }
            if ea + eb <= trunc {
                out.add_to((ea, eb), m);
            }
        }
        let exact = if a + b == 0 { i64::MAX } else { (s.trunc() + 1) * (a + b) - 1 };
        if exact < trunc {
            out.trunc = exact;
            out.coeffs.retain(|k, _| k.0 + k.1 <= exact);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn coeffs(&self) -> &BTreeMap<(i64, i64), SparseMat<F>> {
        &self.coeffs
    }

    pub fn add_to(&mut self, k: (i64, i64), m: &SparseMat<F>) {
        if k.0 + k.1 > self.trunc {
            return;
        }
        let c = self.coeffs.get(&k).cloned().unwrap_or_else(|| SparseMat::zero(self.dim)).add(m);
        if c.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&SparseMat<F>) -> SparseMat<F>) -> Self {
        let dim = f(&SparseMat::zero(self.dim)).dim();
        let coeffs = self.coeffs.iter().map(|(k, m)| (*k, f(m))).filter(|(_, m)| !m.is_zero()).collect();
        BiSeries { dim, trunc: self.trunc, coeffs }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch(format!("bivariate series of size {} and {}", self.dim, o.dim)));
        }
        let mut s = Self::zero(self.dim, self.trunc.min(o.trunc));
        for ((a1, b1), m1) in &self.coeffs {
            for ((a2, b2), m2) in &o.coeffs {
                if a1 + b1 + a2 + b2 <= s.trunc {
                    s.add_to((a1 + a2, b1 + b2), &m1.mul(m2));
                }
            }
        }
        Ok(s)
    }

    /// Lowest total degree, then lexicographically first, at which the series differ.
    pub fn first_difference(&self, o: &Self) -> Option<(i64, i64)> {
        let mut keys: Vec<(i64, i64)> = self.coeffs.keys().chain(o.coeffs.keys()).copied().collect();
        keys.sort_by_key(|k| (k.0 + k.1, k.0));
        keys.dedup();
        let k = self.trunc.min(o.trunc);
        keys.into_iter().filter(|t| t.0 + t.1 <= k).find(|t| self.coeffs.get(t) != o.coeffs.get(t))
    }
}
