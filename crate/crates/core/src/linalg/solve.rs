use std::collections::BTreeMap;

use super::sparse::axpy_row;
use super::Field;

/// Incremental reduced-row-echelon solver for sparse systems `A x = b`.
///
/// Rows are reduced as they are pushed, so an inconsistent equation is
/// detected at the moment it is added.
#[derive(Clone, Debug)]
pub struct LinearSystem<F> {
    nvars: usize,
    /// pivot column -> (row with 1 at the pivot, rhs)
    pivots: BTreeMap<usize, (BTreeMap<usize, F>, F)>,
    inconsistent: Option<usize>,
    pushed: usize,
}

/// Solution set: `particular + span(kernel)`.
#[derive(Clone, Debug)]
pub struct Solution<F> {
    pub particular: Vec<F>,
    pub kernel: Vec<Vec<F>>,
}

impl<F: Field> LinearSystem<F> {
    pub fn new(nvars: usize) -> Self {
        LinearSystem { nvars, pivots: BTreeMap::new(), inconsistent: None, pushed: 0 }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Index (in push order) of the first equation found inconsistent.
    pub fn inconsistent(&self) -> Option<usize> {
        self.inconsistent
    }

    /// Adds `sum_j row[j] x_j = rhs`.
    pub fn push(&mut self, mut row: BTreeMap<usize, F>, mut rhs: F) {
        let idx = self.pushed;
        self.pushed += 1;
        row.retain(|_, v| !v.is_zero());
        let cols: Vec<usize> = row.keys().copied().filter(|c| self.pivots.contains_key(c)).collect();
        for c in cols {
            if let Some(f) = row.get(&c).cloned() {
                let (prow, prhs) = &self.pivots[&c];
                let nf = f.neg();
                axpy_row(&mut row, &nf, prow);
                rhs = rhs.add(&nf.mul(prhs));
            }
        }
        if row.is_empty() {
            if !rhs.is_zero() && self.inconsistent.is_none() {
                self.inconsistent = Some(idx);
            }
            return;
        }
        let (&pc, _) = row.iter().min_by_key(|(_, v)| v.size()).unwrap();
        let inv = row[&pc].inv().expect("nonzero pivot");
        for v in row.values_mut() {
            *v = v.mul(&inv);
        }
        rhs = rhs.mul(&inv);
        for (prow, prhs) in self.pivots.values_mut() {
            if let Some(f) = prow.get(&pc).cloned() {
                let nf = f.neg();
                axpy_row(prow, &nf, &row);
                *prhs = prhs.add(&nf.mul(&rhs));
            }
        }
        self.pivots.insert(pc, (row, rhs));
    }

    pub fn free_vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|c| !self.pivots.contains_key(c)).collect()
    }

    /// `None` when inconsistent.
    pub fn solve(&self) -> Option<Solution<F>> {
        if self.inconsistent.is_some() {
            return None;
        }
        let mut particular = vec![F::zero(); self.nvars];
        for (&c, (_, rhs)) in &self.pivots {
            particular[c] = rhs.clone();
        }
        let kernel = self
            .free_vars()
            .into_iter()
            .map(|f| {
                let mut v = vec![F::zero(); self.nvars];
                v[f] = F::one();
                for (&c, (row, _)) in &self.pivots {
                    if let Some(x) = row.get(&f) {
                        v[c] = x.neg();
                    }
                }
                v
            })
            .collect();
        Some(Solution { particular, kernel })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::rat;
    use num_rational::BigRational;

    fn row(e: &[(usize, i64)]) -> BTreeMap<usize, BigRational> {
        e.iter().map(|&(c, v)| (c, rat(v, 1))).collect()
    }

    #[test]
    fn unique_solution() {
        let mut s = LinearSystem::new(2);
        s.push(row(&[(0, 1), (1, 1)]), rat(3, 1));
        s.push(row(&[(0, 1), (1, -1)]), rat(1, 1));
        s.push(row(&[(0, 2), (1, 2)]), rat(6, 1));
        let sol = s.solve().unwrap();
        assert_eq!(sol.particular, vec![rat(2, 1), rat(1, 1)]);
        assert!(sol.kernel.is_empty());
    }

    #[test]
    fn kernel_and_inconsistency() {
        let mut s = LinearSystem::new(3);
        s.push(row(&[(0, 1), (2, -1)]), rat(0, 1));
        let sol = s.solve().unwrap();
        assert_eq!(sol.kernel.len(), 2);
        s.push(row(&[(0, 2), (2, -2)]), rat(1, 1));
        assert_eq!(s.inconsistent(), Some(1));
        assert!(s.solve().is_none());
    }
}
