//! Row-list sparse matrices for products of embedded operators.
//!
//! Embedded charges and projectors have a handful of non-zeros per row, so
//! the gYBE triple products at 729 or 2187 dimensions stay cheap here while
//! dense products would not.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{checked_dim, DenseOperator, ONE, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct SparseOp {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseOp {
    /// `op` placed on sites `start..start+m` (1-based) of `total` sites.
    pub(crate) fn embedded(op: &DenseOperator, start: usize, total: usize) -> Result<Self> {
        let (d, m) = (op.local_dim(), op.sites());
        if start < 1 || start + m - 1 > total {
            return Err(Error::Range {
                start,
                end: start + m - 1,
                total,
            });
        }
        let dim = checked_dim(d, total)?;
        let left = d.pow((start - 1) as u32);
        let mid = op.dim();
        let right = d.pow((total - start + 1 - m) as u32);
        let local: Vec<Vec<(usize, Complex64)>> = (0..mid)
            .map(|i| {
                op.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != ZERO)
                    .map(|(j, v)| (j, *v))
                    .collect()
            })
            .collect();
        let mut rows = Vec::with_capacity(dim);
        for a in 0..left {
            for row in &local {
                for b in 0..right {
                    rows.push(
                        row.iter()
                            .map(|&(j, v)| ((a * mid + j) * right + b, v))
                            .collect(),
                    );
                }
            }
        }
        Ok(Self { dim, rows })
    }

    /// `I + a self`.
    pub(crate) fn identity_plus(&self, a: Complex64) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut out: Vec<(usize, Complex64)> =
                    row.iter().map(|&(j, v)| (j, v * a)).collect();
                match out.binary_search_by_key(&i, |e| e.0) {
                    Ok(p) => out[p].1 += ONE,
                    Err(p) => out.insert(p, (i, ONE)),
                }
                out
            })
            .collect();
        Self {
            dim: self.dim,
            rows,
        }
    }

    pub(crate) fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut acc = vec![ZERO; self.dim];
        let mut hit = vec![false; self.dim];
        let mut touched = Vec::new();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                for &(k, a) in row {
                    for &(j, b) in &other.rows[k] {
                        if !hit[j] {
                            hit[j] = true;
                            touched.push(j);
                        }
                        acc[j] += a * b;
                    }
                }
                touched.sort_unstable();
                let out = touched
                    .iter()
                    .filter(|&&j| acc[j] != ZERO)
                    .map(|&j| (j, acc[j]))
                    .collect();
                for &j in &touched {
                    acc[j] = ZERO;
                    hit[j] = false;
                }
                touched.clear();
                out
            })
            .collect();
        Self {
            dim: self.dim,
            rows,
        }
    }

    fn combine(&self, other: &Self, s: Complex64) -> Self {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let ka = a.get(i).map_or(usize::MAX, |e| e.0);
                    let kb = b.get(j).map_or(usize::MAX, |e| e.0);
                    if ka < kb {
                        out.push(a[i]);
                        i += 1;
                    } else if kb < ka {
                        out.push((kb, b[j].1 * s));
                        j += 1;
                    } else {
                        out.push((ka, a[i].1 + b[j].1 * s));
                        i += 1;
                        j += 1;
                    }
                }
                out
            })
            .collect();
        Self {
            dim: self.dim,
            rows,
        }
    }

    pub(crate) fn add(&self, other: &Self) -> Self {
        self.combine(other, ONE)
    }

    pub(crate) fn sub(&self, other: &Self) -> Self {
        self.combine(other, -ONE)
    }

    pub(crate) fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&(j, v)| (j, v * s)).collect())
                .collect(),
        }
    }

    pub(crate) fn norm(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|(_, v)| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub(crate) fn distance(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }

    /// Frobenius inner product `<self, other> = tr(self† other)`.
    pub(crate) fn inner(&self, other: &Self) -> Complex64 {
        let mut acc = ZERO;
        for (a, b) in self.rows.iter().zip(&other.rows) {
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].0.cmp(&b[j].0) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        acc += a[i].1.conj() * b[j].1;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        acc
    }

    #[cfg(test)]
    pub(crate) fn to_dense(&self, local_dim: usize, sites: usize) -> DenseOperator {
        let mut entries = vec![ZERO; self.dim * self.dim];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                entries[i * self.dim + j] = v;
            }
        }
        DenseOperator::new(local_dim, sites, entries).expect("consistent shape")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sis::susy_suite;
    use crate::tensor::{embed, frobenius_distance};
    use proptest::prelude::*;

    fn random_op(d: usize, m: usize, seed: &[f64]) -> DenseOperator {
        let n = d.pow(m as u32);
        DenseOperator::from_fn(d, m, |i, j| {
            let k = (i * n + j) % seed.len();
            if (i + 2 * j) % 3 == 0 {
                ZERO
            } else {
                Complex64::new(seed[k], seed[(k + 1) % seed.len()])
            }
        })
        .unwrap()
    }

    #[test]
    fn embedding_matches_dense() {
        let s = susy_suite(3).unwrap();
        let op = s.q.kron(&s.w).unwrap();
        for start in 1..=3 {
            let sp = SparseOp::embedded(&op, start, 4).unwrap();
            let dense = embed(&op, start, 4).unwrap();
            assert_eq!(sp.to_dense(3, 4), dense);
        }
        assert!(SparseOp::embedded(&op, 4, 4).is_err());
    }

    proptest! {
        #[test]
        fn products_match_dense(seed in prop::collection::vec(-1.0f64..1.0, 7), a in -2.0f64..2.0) {
            let op = random_op(2, 2, &seed);
            let d1 = embed(&op, 1, 3).unwrap();
            let d2 = embed(&op, 2, 3).unwrap();
            let s1 = SparseOp::embedded(&op, 1, 3).unwrap();
            let s2 = SparseOp::embedded(&op, 2, 3).unwrap();
            let ca = Complex64::new(a, 0.5);
            let dense = &(&d1 * &d2) + &d2.scale(ca);
            let sparse = s1.matmul(&s2).add(&s2.scale(ca));
            prop_assert!(frobenius_distance(&sparse.to_dense(2, 3), &dense).unwrap() < 1e-12);
            let id = DenseOperator::identity(2, 3).unwrap();
            let r = &id + &d1.scale(ca);
            prop_assert!(frobenius_distance(&s1.identity_plus(ca).to_dense(2, 3), &r).unwrap() < 1e-12);
            prop_assert!((s1.inner(&s2) - d1.inner(&d2).unwrap()).norm() < 1e-12);
            prop_assert!((s1.sub(&s2).norm() - frobenius_distance(&d1, &d2).unwrap()).abs() < 1e-12);
        }
    }
}
