use std::collections::BTreeMap;

use super::Field;
use crate::error::{Error, Result};

pub type SparseVec<F> = BTreeMap<usize, F>;

/// Square sparse matrix, row-major, zero entries never stored.
#[derive(Clone, PartialEq, Debug)]
pub struct SparseMat<F> {
    n: usize,
    rows: Vec<BTreeMap<usize, F>>,
}

impl<F: Field> SparseMat<F> {
    pub fn zero(n: usize) -> Self {
        SparseMat { n, rows: vec![BTreeMap::new(); n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.rows[i].insert(i, F::one());
        }
        m
    }

    /// Matrix unit `E_{ij}`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(n);
        m.set(i, j, F::one());
        m
    }

    pub fn diag(d: Vec<F>) -> Self {
        let mut m = Self::zero(d.len());
        for (i, v) in d.into_iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn from_entries<I: IntoIterator<Item = (usize, usize, F)>>(n: usize, it: I) -> Self {
        let mut m = Self::zero(n);
        for (i, j, v) in it {
            m.add_at(i, j, &v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        self.rows[i].get(&j).cloned().unwrap_or_else(F::zero)
    }

    pub fn get_ref(&self, i: usize, j: usize) -> Option<&F> {
        self.rows[i].get(&j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        if v.is_zero() {
            self.rows[i].remove(&j);
        } else {
            self.rows[i].insert(j, v);
        }
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &F) {
        if v.is_zero() {
            return;
        }
        let row = &mut self.rows[i];
        match row.get_mut(&j) {
            Some(x) => {
                let s = x.add(v);
                if s.is_zero() {
                    row.remove(&j);
                } else {
                    *x = s;
                }
            }
            None => {
                row.insert(j, v.clone());
            }
        }
    }

    pub fn row(&self, i: usize) -> &BTreeMap<usize, F> {
        &self.rows[i]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &F)> {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, r)| r.len() == 1 && r.get(&i).is_some_and(|v| v.is_one()))
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(i, j, _)| i == j)
    }

    fn check_dim(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::DimensionMismatch(format!("{} vs {}", self.n, o.n)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_dim(o).expect("matrix add");
        let mut m = self.clone();
        for (i, j, v) in o.entries() {
            m.add_at(i, j, v);
        }
        m
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check_dim(o).expect("matrix sub");
        let mut m = self.clone();
        for (i, j, v) in o.entries() {
            m.add_at(i, j, &v.neg());
        }
        m
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        if c.is_one() {
            return self.clone();
        }
        let mut m = Self::zero(self.n);
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in r {
                m.rows[i].insert(*j, v.mul(c));
            }
        }
        m
    }

    pub fn neg(&self) -> Self {
        let mut m = self.clone();
        for r in m.rows.iter_mut() {
            for v in r.values_mut() {
                *v = v.neg();
            }
        }
        m
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check_dim(o)?;
        let mut m = Self::zero(self.n);
        for (i, r) in self.rows.iter().enumerate() {
            if r.is_empty() {
                continue;
            }
            let mut acc: BTreeMap<usize, F> = BTreeMap::new();
            for (k, a) in r {
                for (j, b) in &o.rows[*k] {
                    let p = a.mul(b);
                    match acc.get_mut(j) {
                        Some(x) => *x = x.add(&p),
                        None => {
                            acc.insert(*j, p);
                        }
                    }
                }
            }
            acc.retain(|_, v| !v.is_zero());
            m.rows[i] = acc;
        }
        Ok(m)
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("matrix mul")
    }

    /// `[self, o] = self*o - o*self`.
    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero(self.n);
        for (i, j, v) in self.entries() {
            m.rows[j].insert(i, v.clone());
        }
        m
    }

    /// Kronecker product; row index of `a ⊗ b` is `i_a * dim(b) + i_b`.
    pub fn kron(&self, o: &Self) -> Self {
        let nb = o.n;
        let mut m = Self::zero(self.n * nb);
        for (i, j, a) in self.entries() {
            for (k, l, b) in o.entries() {
                m.rows[i * nb + k].insert(j * nb + l, a.mul(b));
            }
        }
        m
    }

    pub fn apply(&self, v: &SparseVec<F>) -> SparseVec<F> {
        let mut out = SparseVec::new();
        for (i, r) in self.rows.iter().enumerate() {
            let mut acc = F::zero();
            for (j, a) in r {
                if let Some(x) = v.get(j) {
                    acc = acc.add(&a.mul(x));
                }
            }
            if !acc.is_zero() {
                out.insert(i, acc);
            }
        }
        out
    }

    pub fn map<G: Field, E>(&self, f: impl Fn(&F) -> std::result::Result<G, E>) -> std::result::Result<SparseMat<G>, E> {
        let mut m = SparseMat::<G>::zero(self.n);
        for (i, j, v) in self.entries() {
            m.set(i, j, f(v)?);
        }
        Ok(m)
    }

    /// Conjugation by a permutation of basis indices: entry `(i,j)` moves to `(p[i], p[j])`.
    pub fn permute(&self, p: &[usize]) -> Self {
        let mut m = Self::zero(self.n);
        for (i, j, v) in self.entries() {
            m.rows[p[i]].insert(p[j], v.clone());
        }
        m
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a: Vec<BTreeMap<usize, F>> = self.rows.clone();
        let mut b: Vec<BTreeMap<usize, F>> = (0..n).map(|i| BTreeMap::from([(i, F::one())])).collect();
        for col in 0..n {
            let piv = (col..n)
                .filter(|&r| a[r].contains_key(&col))
                .min_by_key(|&r| a[r][&col].size())
                .ok_or_else(|| Error::NotInvertible(format!("singular matrix at column {col}")))?;
            a.swap(col, piv);
            b.swap(col, piv);
            let inv = a[col][&col].inv().unwrap();
            scale_row(&mut a[col], &inv);
            scale_row(&mut b[col], &inv);
            for r in 0..n {
                if r == col {
                    continue;
                }
                if let Some(f) = a[r].get(&col).cloned() {
                    let (pa, pb) = (a[col].clone(), b[col].clone());
                    axpy_row(&mut a[r], &f.neg(), &pa);
                    axpy_row(&mut b[r], &f.neg(), &pb);
                }
            }
        }
        Ok(SparseMat { n, rows: b })
    }
}

fn scale_row<F: Field>(r: &mut BTreeMap<usize, F>, c: &F) {
    for v in r.values_mut() {
        *v = v.mul(c);
    }
}

/// `r += c * p`.
pub(crate) fn axpy_row<F: Field>(r: &mut BTreeMap<usize, F>, c: &F, p: &BTreeMap<usize, F>) {
    for (j, v) in p {
        let t = c.mul(v);
        match r.get_mut(j) {
            Some(x) => {
                let s = x.add(&t);
                if s.is_zero() {
                    r.remove(j);
                } else {
                    *x = s;
                }
            }
            None => {
                if !t.is_zero() {
                    r.insert(*j, t);
                }
            }
        }
    }
}

/// Lifts `op`, acting on the tensor product of the listed `sites` (in that
/// order) of a chain of `nsites` copies of a `local`-dimensional space, to
/// the whole chain. Site 0 is the most significant digit of the flat index.
pub fn embed<F: Field>(op: &SparseMat<F>, local: usize, sites: &[usize], nsites: usize) -> SparseMat<F> {
    let total = local.pow(nsites as u32);
    assert_eq!(op.dim(), local.pow(sites.len() as u32));
    let stride = |s: usize| local.pow((nsites - 1 - s) as u32);
    let mut m = SparseMat::zero(total);
    for big in 0..total {
        let mut r = 0;
        for &s in sites {
            r = r * local + (big / stride(s)) % local;
        }
        let mut base = big;
        for &s in sites {
            base -= ((big / stride(s)) % local) * stride(s);
        }
        for (c, v) in op.row(r) {
            let mut col = base;
            let mut rem = *c;
            for &s in sites.iter().rev() {
                col += (rem % local) * stride(s);
                rem /= local;
            }
            m.rows[big].insert(col, v.clone());
        }
    }
    m
}

/// Applies `op` on the listed `sites` of a chain vector, identity elsewhere;
/// same index conventions as [`embed`], without materializing the lift.
pub fn apply_at_sites<F: Field>(op: &SparseMat<F>, local: usize, sites: &[usize], nsites: usize, v: &SparseVec<F>) -> SparseVec<F> {
    let op_t = op.transpose();
    let stride = |s: usize| local.pow((nsites - 1 - s) as u32);
    let mut out = SparseVec::new();
    for (&big, x) in v {
        let mut c = 0;
        let mut base = big;
        for &s in sites {
            let dgt = (big / stride(s)) % local;
            c = c * local + dgt;
            base -= dgt * stride(s);
        }
        for (r, a) in op_t.row(c) {
            let mut idx = base;
            let mut rem = *r;
            for &s in sites.iter().rev() {
                idx += (rem % local) * stride(s);
                rem /= local;
            }
            let t = a.mul(x);
            match out.get_mut(&idx) {
                Some(y) => *y = Field::add(&*y, &t),
                None => {
                    out.insert(idx, t);
                }
            }
        }
    }
    out.retain(|_, y| !y.is_zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::rat;
    use num_rational::BigRational;

    type M = SparseMat<BigRational>;

    #[test]
    fn unit_products() {
        let e12 = M::unit(2, 0, 1);
        let e21 = M::unit(2, 1, 0);
        assert_eq!(e12.mul(&e21), M::unit(2, 0, 0));
        assert_eq!(e12.commutator(&e21), M::diag(vec![rat(1, 1), rat(-1, 1)]));
    }

    #[test]
    fn embed_matches_kron() {
        let a = M::from_entries(2, [(0, 1, rat(2, 1)), (1, 1, rat(3, 1))]);
        let b = M::from_entries(2, [(1, 0, rat(5, 1))]);
        let ab = a.kron(&b);
        let i2 = M::identity(2);
        assert_eq!(embed(&ab, 2, &[0, 1], 3), ab.kron(&i2));
        assert_eq!(embed(&ab, 2, &[1, 2], 3), i2.kron(&ab));
        let lifted = embed(&ab, 2, &[0, 2], 3);
        let direct = a.kron(&i2.kron(&b));
        assert_eq!(lifted, direct);
        // reversed site order swaps the roles
        assert_eq!(embed(&ab, 2, &[2, 0], 3), b.kron(&i2.kron(&a)));
        let v: SparseVec<BigRational> = (0..8).map(|k| (k, rat(k as i64 + 1, 1))).collect();
        for sites in [[0usize, 1], [0, 2], [2, 0], [1, 2]] {
            assert_eq!(apply_at_sites(&ab, 2, &sites, 3, &v), embed(&ab, 2, &sites, 3).apply(&v));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let a = M::from_entries(3, [(0, 0, rat(2, 1)), (0, 2, rat(1, 1)), (1, 1, rat(1, 3)), (2, 0, rat(1, 1)), (2, 2, rat(1, 1))]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(M::unit(2, 0, 1).inverse().is_err());
    }
}
