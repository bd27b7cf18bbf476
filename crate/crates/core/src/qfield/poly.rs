//! Sparse univariate polynomials in `s` with integer coefficients.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial stored as `(exponent, coefficient)` pairs, strictly ascending
/// in exponent, with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(u32, BigInt)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(BigInt::one(), 0)
    }

    pub fn monomial(c: BigInt, e: u32) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(e, c)] }
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, BigInt)>>(it: I) -> Self {
        let mut v: Vec<(u32, BigInt)> = it.into_iter().collect();
        v.sort_by_key(|t| t.0);
        let mut out: Vec<(u32, BigInt)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        Poly { terms: out }
    }

    /// Dense coefficient vector, index = exponent.
    pub fn from_dense(coeffs: Vec<BigInt>) -> Self {
        Poly {
            terms: coeffs
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (e as u32, c))
                .collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.degree().map_or(0, |d| d as usize + 1)];
        for (e, c) in &self.terms {
            v[*e as usize] = c.clone();
        }
        v
    }

    pub fn terms(&self) -> &[(u32, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.last().map(|t| t.0)
    }

    pub fn min_exp(&self) -> Option<u32> {
        self.terms.first().map(|t| t.0)
    }

    pub fn lc(&self) -> Option<&BigInt> {
        self.terms.last().map(|t| &t.1)
    }

    pub fn coeff(&self, e: u32) -> BigInt {
        match self.terms.binary_search_by_key(&e, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn neg(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        merge(&self.terms, &other.terms, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        merge(&self.terms, &other.terms, true)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if other.is_monomial() {
            let (e, c) = &other.terms[0];
            return self.scale(c).shift_up(*e);
        }
        if self.is_monomial() {
            return other.mul(self);
        }
        let deg = (self.degree().unwrap() + other.degree().unwrap()) as usize;
        let lo = (self.min_exp().unwrap() + other.min_exp().unwrap()) as usize;
        let mut acc = vec![BigInt::zero(); deg - lo + 1];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                acc[(*ea + *eb) as usize - lo] += ca * cb;
            }
        }
        Poly {
            terms: acc
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| ((i + lo) as u32, c))
                .collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        if k.is_one() {
            return self.clone();
        }
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    /// Exact division of every coefficient by `k`.
    pub fn div_int(&self, k: &BigInt) -> Self {
        if k.is_one() {
            return self.clone();
        }
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, c / k)).collect(),
        }
    }

    pub fn shift_up(&self, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        Poly {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// Divides by `s^k`; caller guarantees `k <= min_exp`.
    pub fn shift_down(&self, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        Poly {
            terms: self.terms.iter().map(|(e, c)| (e - k, c.clone())).collect(),
        }
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.lc().unwrap().is_negative() {
            c = -c;
        }
        self.div_int(&c)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        // Horner over the sparse terms, descending.
        let mut acc = BigRational::zero();
        let mut prev: Option<u32> = None;
        for (e, c) in self.terms.iter().rev() {
            if let Some(p) = prev {
                acc *= pow_rat(x, p - e);
            }
            acc += BigRational::from_integer(c.clone());
            prev = Some(*e);
        }
        if let Some(p) = prev {
            acc *= pow_rat(x, p);
        }
        acc
    }

    /// True when every exponent is divisible by `d`.
    pub fn exponents_divisible_by(&self, d: u32) -> bool {
        self.terms.iter().all(|(e, _)| e % d == 0)
    }

    /// Exact quotient `self / g` in `Z[s]`, or `None` if `g` does not divide.
    pub fn exact_div(&self, g: &Poly) -> Option<Poly> {
        let gd = g.to_dense();
        let mut r = self.to_dense();
        let dg = gd.len() - 1;
        if r.len() < gd.len() {
            return if self.is_zero() { Some(Poly::zero()) } else { None };
        }
        let lcg = &gd[dg];
        let mut q = vec![BigInt::zero(); r.len() - dg];
        for i in (0..q.len()).rev() {
            let top = &r[i + dg];
            if top.is_zero() {
                continue;
            }
            let (quo, rem) = top.div_rem(lcg);
            if !rem.is_zero() {
                return None;
            }
            for (j, gj) in gd.iter().enumerate() {
                if !gj.is_zero() {
                    r[i + j] -= &quo * gj;
                }
            }
            q[i] = quo;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Poly::from_dense(q))
    }

    /// Primitive gcd with positive leading coefficient, computed by the
    /// subresultant polynomial remainder sequence.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.primitive_part();
        }
        if other.is_zero() {
            return self.primitive_part();
        }
        let shift = self.min_exp().unwrap().min(other.min_exp().unwrap());
        let a = self.shift_down(self.min_exp().unwrap());
        let b = other.shift_down(other.min_exp().unwrap());
        let g = subresultant_gcd(a.to_dense(), b.to_dense());
        Poly::from_dense(g).primitive_part().shift_up(shift)
    }
}

fn pow_rat(x: &BigRational, k: u32) -> BigRational {
    num_traits::pow(x.clone(), k as usize)
}

fn merge(a: &[(u32, BigInt)], b: &[(u32, BigInt)], negate_b: bool) -> Poly {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match ord {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                let c = if negate_b { -&b[j].1 } else { b[j].1.clone() };
                out.push((b[j].0, c));
                j += 1;
            }
            Ordering::Equal => {
                let c = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    Poly { terms: out }
}

fn trim(v: &mut Vec<BigInt>) {
    while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn dense_is_zero(v: &[BigInt]) -> bool {
    v.iter().all(|c| c.is_zero())
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lcb = &b[db];
    if r.len() < b.len() {
        return r;
    }
    let total = r.len() - db;
    let mut steps = 0;
    while r.len() >= b.len() && !dense_is_zero(&r) {
        let dr = r.len() - 1;
        let lead = r[dr].clone();
        for c in r.iter_mut() {
            *c *= lcb;
        }
        let off = dr - db;
        for (j, bj) in b.iter().enumerate() {
            r[off + j] -= &lead * bj;
        }
        r.pop();
        steps += 1;
        if r.is_empty() {
            r.push(BigInt::zero());
        }
        trim(&mut r);
    }
    if steps < total {
        let k = num_traits::pow(lcb.clone(), total - steps);
        for c in r.iter_mut() {
            *c *= &k;
        }
    }
    r
}

fn subresultant_gcd(a: Vec<BigInt>, b: Vec<BigInt>) -> Vec<BigInt> {
    let (mut a, mut b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    trim(&mut a);
    trim(&mut b);
    if b.len() == 1 {
        return if dense_is_zero(&b) { a } else { vec![BigInt::one()] };
    }
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let delta = (a.len() - b.len()) as u32;
        let r = pseudo_rem(&a, &b);
        if dense_is_zero(&r) {
            return b;
        }
        if r.len() == 1 {
            return vec![BigInt::one()];
        }
        let denom = &g * num_traits::pow(h.clone(), delta as usize);
        let next: Vec<BigInt> = r.iter().map(|c| c / &denom).collect();
        a = b;
        b = next;
        g = a.last().unwrap().clone();
        if delta == 0 {
            // h unchanged
        } else {
            let gd = num_traits::pow(g.clone(), delta as usize);
            let hd = num_traits::pow(h.clone(), (delta - 1) as usize);
            h = gd / hd;
        }
    }
}

impl fmt::Display for Poly {
    /// Ascending exponents, `c0 + c1*s^1 + ...`; the zero polynomial prints `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *e == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*s^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Poly {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(Poly::zero());
        }
        let mut terms = Vec::new();
        for part in s.split(" + ") {
            let part = part.trim();
            let (c, e) = match part.split_once("*s^") {
                Some((c, e)) => (c, e.parse::<u32>().map_err(|e| e.to_string())?),
                None => (part, 0),
            };
            let c: BigInt = c.parse().map_err(|_| format!("bad coefficient `{c}`"))?;
            if c.is_zero() {
                return Err(format!("zero coefficient in `{s}`"));
            }
            terms.push((e, c));
        }
        if terms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(format!("exponents not strictly ascending in `{s}`"));
        }
        Ok(Poly { terms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_dense(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (s-1)(s+2) and (s-1)(s^2+1)
        let a = p(&[-2, 1, 1]);
        let b = p(&[-1, 1, -1, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
    }

    #[test]
    fn gcd_coprime_is_one() {
        assert_eq!(p(&[1, 0, 1]).gcd(&p(&[1, 1])), Poly::one());
    }

    #[test]
    fn gcd_with_powers_of_s() {
        let a = p(&[0, 0, 2, 2]); // 2 s^2 (1+s)
        let b = p(&[0, 3, 3]); // 3 s (1+s)
        assert_eq!(a.gcd(&b), p(&[0, 1, 1]));
    }

    #[test]
    fn exact_division() {
        let a = p(&[-1, 0, 1]);
        assert_eq!(a.exact_div(&p(&[-1, 1])), Some(p(&[1, 1])));
        assert_eq!(a.exact_div(&p(&[2, 1])), None);
    }

    #[test]
    fn display_round_trip() {
        let a = p(&[-3, 0, 7, 0, 1]);
        let s = a.to_string();
        assert_eq!(s, "-3 + 7*s^2 + 1*s^4");
        assert_eq!(s.parse::<Poly>().unwrap(), a);
    }
}
