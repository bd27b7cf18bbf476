use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::Poly;
use crate::error::{Error, Result};

/// Element of `Q(s)` in canonical form.
///
/// `num` and `den` are integer polynomials with no common polynomial factor,
/// jointly content-free, and `den` has a positive leading coefficient. Zero is
/// `0/1`. Canonical form makes structural equality coincide with equality in
/// the field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QScalar {
    num: Poly,
    den: Poly,
}

impl QScalar {
    pub fn zero() -> Self {
        QScalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        QScalar { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int<T: Into<BigInt>>(n: T) -> Self {
        let n = n.into();
        QScalar { num: Poly::monomial(n, 0), den: Poly::one() }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::from_parts(Poly::monomial(r.numer().clone(), 0), Poly::monomial(r.denom().clone(), 0))
    }

    /// `s^e` for any integer `e`.
    pub fn s_pow(e: i64) -> Self {
        if e >= 0 {
            QScalar { num: Poly::monomial(BigInt::one(), e as u32), den: Poly::one() }
        } else {
            QScalar { num: Poly::one(), den: Poly::monomial(BigInt::one(), (-e) as u32) }
        }
    }

    /// Laurent polynomial `sum c_e s^e`.
    pub fn laurent<I: IntoIterator<Item = (i64, i64)>>(terms: I) -> Self {
        let terms: Vec<(i64, i64)> = terms.into_iter().collect();
        let lo = terms.iter().map(|t| t.0).min().unwrap_or(0).min(0);
        let num = Poly::from_terms(terms.iter().map(|&(e, c)| ((e - lo) as u32, BigInt::from(c))));
        Self::from_parts(num, Poly::monomial(BigInt::one(), (-lo) as u32))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Laurent-monomial denominators take a gcd-free path.
    pub fn is_laurent(&self) -> bool {
        self.den.is_monomial()
    }

    /// Builds a canonical quotient. Panics if `den` is zero.
    pub fn from_parts(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "QScalar with zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let shift = num.min_exp().unwrap().min(den.min_exp().unwrap());
        let (mut num, mut den) = (num.shift_down(shift), den.shift_down(shift));
        if !num.is_monomial() && !den.is_monomial() {
            let g = num.gcd(&den);
            if g.degree().unwrap_or(0) > 0 {
                num = num.exact_div(&g).expect("gcd divides numerator");
                den = den.exact_div(&g).expect("gcd divides denominator");
            }
        }
        let c = num.content().gcd(&den.content());
        let c = if den.lc().unwrap().is_negative() { -c } else { c };
        if !c.is_one() {
            num = num.div_int(&c);
            den = den.div_int(&c);
        }
        QScalar { num, den }
    }

    pub fn neg(&self) -> Self {
        QScalar { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::from_parts(self.num.add(&other.num), self.den.clone());
        }
        if self.is_laurent() && other.is_laurent() {
            return laurent_combine(self, other, false);
        }
        Self::from_parts(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.neg();
        }
        if self.den == other.den {
            return Self::from_parts(self.num.sub(&other.num), self.den.clone());
        }
        if self.is_laurent() && other.is_laurent() {
            return laurent_combine(self, other, true);
        }
        Self::from_parts(
            self.num.mul(&other.den).sub(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        if !self.is_laurent() || !other.is_laurent() {
            // Cross-cancel before multiplying to keep the gcd small.
            let g1 = self.num.gcd(&other.den);
            let g2 = other.num.gcd(&self.den);
            let n1 = self.num.exact_div(&g1).unwrap();
            let d2 = other.den.exact_div(&g1).unwrap();
            let n2 = other.num.exact_div(&g2).unwrap();
            let d1 = self.den.exact_div(&g2).unwrap();
            return Self::from_parts(n1.mul(&n2), d1.mul(&d2));
        }
        Self::from_parts(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_parts(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv().expect("negative power of zero") } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Exact evaluation at `s = s0`.
    pub fn specialize(&self, s0: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(s0);
        if d.is_zero() {
            return Err(Error::Pole { at: s0.to_string() });
        }
        Ok(self.num.eval(s0) / d)
    }

    /// True when the value lies in `Q(s^d)`.
    pub fn in_subfield(&self, d: u32) -> bool {
        self.num.exponents_divisible_by(d) && self.den.exponents_divisible_by(d)
    }

    /// Total number of stored coefficients, a cost measure for pivoting.
    pub fn size(&self) -> usize {
        self.num.terms().len() + self.den.terms().len()
    }
}

fn laurent_combine(a: &QScalar, b: &QScalar, subtract: bool) -> QScalar {
    let (ea, ca) = &a.den.terms()[0];
    let (eb, cb) = &b.den.terms()[0];
    let l = ca.lcm(cb);
    let e = (*ea).max(*eb);
    let na = a.num.scale(&(&l / ca)).shift_up(e - ea);
    let nb = b.num.scale(&(&l / cb)).shift_up(e - eb);
    let num = if subtract { na.sub(&nb) } else { na.add(&nb) };
    QScalar::from_parts(num, Poly::monomial(l, e))
}

impl Default for QScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for QScalar {
    /// `<num>/<den>`, the canonical string used by the cache and reports.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for QScalar {
    type Err = Error;

    /// Accepts only canonical strings, so `parse(x.to_string()) == x`
    /// and no non-canonical spelling survives a load.
    fn from_str(s: &str) -> Result<Self> {
        let (n, d) = s.split_once('/').ok_or_else(|| Error::Parse(format!("missing `/` in `{s}`")))?;
        let num: Poly = n.parse().map_err(Error::Parse)?;
        let den: Poly = d.parse().map_err(Error::Parse)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        let v = QScalar::from_parts(num.clone(), den.clone());
        if v.num != num || v.den != den {
            return Err(Error::Parse(format!("non-canonical scalar `{s}`")));
        }
        Ok(v)
    }
}

impl std::ops::Add for &QScalar {
    type Output = QScalar;
    fn add(self, rhs: Self) -> QScalar {
        QScalar::add(self, rhs)
    }
}

impl std::ops::Sub for &QScalar {
    type Output = QScalar;
    fn sub(self, rhs: Self) -> QScalar {
        QScalar::sub(self, rhs)
    }
}

impl std::ops::Mul for &QScalar {
    type Output = QScalar;
    fn mul(self, rhs: Self) -> QScalar {
        QScalar::mul(self, rhs)
    }
}

impl std::ops::Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> QScalar {
        QScalar::s_pow(1)
    }

    #[test]
    fn add_s_s() {
        assert_eq!(s().add(&s()), QScalar::laurent([(1, 2)]));
    }

    #[test]
    fn cancel_to_one() {
        let sm1 = s().sub(&QScalar::one());
        let inv = QScalar::one().div(&sm1).unwrap();
        assert_eq!(inv.mul(&sm1), QScalar::one());
    }

    #[test]
    fn div_difference_of_squares() {
        let a = s().mul(&s()).sub(&QScalar::one());
        let b = s().sub(&QScalar::one());
        assert_eq!(a.div(&b).unwrap(), s().add(&QScalar::one()));
    }

    #[test]
    fn division_by_zero_is_error() {
        assert!(matches!(s().div(&QScalar::zero()), Err(Error::DivisionByZero)));
    }

    #[test]
    fn specialize_removable_and_pole() {
        let a = s().mul(&s()).sub(&QScalar::one()).div(&s().sub(&QScalar::one())).unwrap();
        assert_eq!(a.specialize(&BigRational::one()).unwrap(), BigRational::from_integer(2.into()));
        let p = QScalar::one().div(&s().sub(&QScalar::one())).unwrap();
        assert!(matches!(p.specialize(&BigRational::one()), Err(Error::Pole { .. })));
    }

    #[test]
    fn canonical_string_round_trip() {
        let a = QScalar::laurent([(-2, 3), (1, -1)]).div(&QScalar::laurent([(0, 2), (2, 4)])).unwrap();
        let t = a.to_string();
        assert_eq!(t.parse::<QScalar>().unwrap(), a);
        assert!("2 + 2*s^1/2".parse::<QScalar>().is_err());
    }

    #[test]
    fn negative_denominators_normalize() {
        let a = QScalar::from_parts(Poly::one(), Poly::monomial(BigInt::from(-2), 0));
        assert_eq!(a.to_string(), "-1/2");
    }
}
