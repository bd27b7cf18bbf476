//! Sparse exact matrices and linear solves over a generic field.

mod solve;
mod sparse;

pub use solve::{LinearSystem, Solution};
pub use sparse::{apply_at_sites, embed, SparseMat, SparseVec};

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::qfield::QScalar;

/// Matrix over `Q(s)`.
pub type QMat = SparseMat<QScalar>;

/// Exact field arithmetic used by the matrix and solver layers.
pub trait Field: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn from_i64(n: i64) -> Self;
    /// Relative cost of an element, used to prefer cheap pivots.
    fn size(&self) -> usize {
        1
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Field for QScalar {
    fn zero() -> Self {
        QScalar::zero()
    }
    fn one() -> Self {
        QScalar::one()
    }
    fn is_zero(&self) -> bool {
        QScalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        QScalar::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        QScalar::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        QScalar::mul(self, o)
    }
    fn neg(&self) -> Self {
        QScalar::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        QScalar::inv(self).ok()
    }
    fn from_i64(n: i64) -> Self {
        QScalar::from_int(n)
    }
    fn size(&self) -> usize {
        QScalar::size(self)
    }
    fn is_one(&self) -> bool {
        QScalar::is_one(self)
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
}
