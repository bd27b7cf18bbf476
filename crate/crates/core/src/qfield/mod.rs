//! Exact coefficient field `Q(s)` with `q = s^D`, plus q-integers.

mod poly;
mod scalar;

pub use poly::Poly;
pub use scalar::QScalar;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational.
pub type BigRat = BigRational;

/// Fixes the substrate exponent `D`, so that every rational power of `q`
/// that occurs for a given algebra is an integral power of `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QContext {
    pub d: u32,
}

impl QContext {
    pub fn new(d: u32) -> Self {
        assert!(d > 0);
        QContext { d }
    }

    /// `q^e` for rational `e`; fails unless `D*e` is an integer.
    pub fn q_pow_rat(&self, e: &BigRat) -> Result<QScalar> {
        let scaled = e * BigRat::from_integer(BigInt::from(self.d));
        if !scaled.is_integer() {
            return Err(Error::FractionalPower(e.to_string()));
        }
        let k: i64 = scaled.to_integer().try_into().map_err(|_| Error::FractionalPower(e.to_string()))?;
        Ok(QScalar::s_pow(k))
    }

    pub fn q_pow(&self, e: i64) -> QScalar {
        QScalar::s_pow(e * self.d as i64)
    }

    pub fn q(&self) -> QScalar {
        self.q_pow(1)
    }

    /// `q_i - q_i^{-1}` for `q_i = q^{d_i}`.
    pub fn q_diff(&self, di: u32) -> QScalar {
        let k = (di * self.d) as i64;
        QScalar::laurent([(k, 1), (-k, -1)])
    }

    /// `[n]_i = (q_i^n - q_i^{-n}) / (q_i - q_i^{-1})`, as a Laurent polynomial.
    pub fn qint(&self, n: i64, di: u32) -> QScalar {
        if n == 0 {
            return QScalar::zero();
        }
        let step = (2 * di * self.d) as i64;
        let m = n.abs();
        let top = (m - 1) * (di * self.d) as i64;
        let v = QScalar::laurent((0..m).map(|j| (top - j * step, 1)));
        if n < 0 {
            v.neg()
        } else {
            v
        }
    }

    /// `[n]_i!`.
    pub fn qfact(&self, n: u32, di: u32) -> QScalar {
        (1..=n as i64).fold(QScalar::one(), |acc, k| acc.mul(&self.qint(k, di)))
    }

    /// `[n]_i! / ([k]_i! [n-k]_i!)`.
    pub fn qbinom(&self, n: i64, k: i64, di: u32) -> Result<QScalar> {
        if k < 0 || k > n {
            return Err(Error::OutOfRange(format!("q-binomial ({n} choose {k})")));
        }
        let num = self.qfact(n as u32, di);
        let den = self.qfact(k as u32, di).mul(&self.qfact((n - k) as u32, di));
        num.div(&den)
    }
}

/// Specializes at `s = 1`, the classical limit `q -> 1`.
pub fn at_one(a: &QScalar) -> Result<BigRat> {
    a.specialize(&BigRat::one())
}

pub fn rat(n: i64, d: i64) -> BigRat {
    BigRat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_is_zero(r: &BigRat) -> bool {
    r.is_zero()
}
