//! Dense complex linear algebra on small tensor-product spaces.
//!
//! Every operator acts on `N` sites of local dimension `d`, so its side is
//! `d^N`. Basis order is big-endian: the leftmost site is the most
//! significant digit, which makes `kron(A, B)` act as `A` on the left
//! factor and `B` on the right one.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest Hilbert-space dimension any operator or state may have.
pub const MAX_DIM: usize = 4096;

/// Default tolerance for residual checks (Frobenius norm).
pub const DEFAULT_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Returns `d^n`, failing when it would exceed [`MAX_DIM`].
pub fn checked_dim(local_dim: usize, sites: usize) -> Result<usize> {
    if local_dim < 1 {
        return Err(Error::InvalidDimension(format!(
            "local dimension {local_dim}"
        )));
    }
    let mut dim = 1usize;
    for _ in 0..sites {
        dim = dim.saturating_mul(local_dim);
        if dim > MAX_DIM {
            return Err(Error::DimensionGuard {
                dim,
                limit: MAX_DIM,
            });
        }
    }
    Ok(dim)
}

/// Square complex matrix on `sites` copies of `C^local_dim`.
#[derive(Clone, PartialEq)]
pub struct DenseOperator {
    local_dim: usize,
    sites: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseOperator {
    /// Builds an operator from row-major entries.
    pub fn new(local_dim: usize, sites: usize, entries: Vec<Complex64>) -> Result<Self> {
        let dim = checked_dim(local_dim, sites)?;
        if entries.len() != dim * dim {
            return Err(Error::ShapeMismatch {
                left: format!("{dim}x{dim}"),
                right: format!("{} entries", entries.len()),
            });
        }
        Ok(Self {
            local_dim,
            sites,
            dim,
            data: entries,
        })
    }

    /// Builds an operator from real row-major entries.
    pub fn from_real(local_dim: usize, sites: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            local_dim,
            sites,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_fn(
        local_dim: usize,
        sites: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        let dim = checked_dim(local_dim, sites)?;
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Ok(Self {
            local_dim,
            sites,
            dim,
            data,
        })
    }

    pub fn zeros(local_dim: usize, sites: usize) -> Result<Self> {
        let dim = checked_dim(local_dim, sites)?;
        Ok(Self {
            local_dim,
            sites,
            dim,
            data: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(local_dim: usize, sites: usize) -> Result<Self> {
        let mut out = Self::zeros(local_dim, sites)?;
        for i in 0..out.dim {
            out.data[i * out.dim + i] = ONE;
        }
        Ok(out)
    }

    /// Matrix unit `|row><col|` on `sites` sites.
    pub fn unit(local_dim: usize, sites: usize, row: usize, col: usize) -> Result<Self> {
        let mut out = Self::zeros(local_dim, sites)?;
        if row >= out.dim || col >= out.dim {
            return Err(Error::Range {
                start: row.max(col),
                end: row.max(col),
                total: out.dim,
            });
        }
        out.data[row * out.dim + col] = ONE;
        Ok(out)
    }

    /// Outer product `|ket><bra|`.
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Result<Self> {
        ket.check_same_space(bra)?;
        Self::from_fn(ket.local_dim(), ket.sites(), |r, c| {
            ket.amplitudes()[r] * bra.amplitudes()[c].conj()
        })
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Side length `d^N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn shape_label(&self) -> String {
        format!("d={} N={}", self.local_dim, self.sites)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.local_dim != other.local_dim || self.sites != other.sites {
            return Err(Error::ShapeMismatch {
                left: self.shape_label(),
                right: other.shape_label(),
            });
        }
        Ok(())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        self.with_data(data)
    }

    fn with_data(&self, data: Vec<Complex64>) -> Self {
        Self {
            local_dim: self.local_dim,
            sites: self.sites,
            dim: self.dim,
            data,
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                data[c * n + r] = self.data[r * n + c];
            }
        }
        self.with_data(data)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.with_data(self.data.iter().map(|&x| x * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.with_data(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.with_data(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    /// Matrix product. Zero entries of the left factor are skipped, so
    /// products of embedded (mostly identity) operators stay cheap.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(self.with_data(data))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.local_dim != other.local_dim {
            return Err(Error::LocalDimMismatch {
                left: self.local_dim,
                right: other.local_dim,
            });
        }
        let sites = self.sites + other.sites;
        let dim = checked_dim(self.local_dim, sites)?;
        let (na, nb) = (self.dim, other.dim);
        let mut data = vec![ZERO; dim * dim];
        for ar in 0..na {
            for ac in 0..na {
                let a = self.data[ar * na + ac];
                if a == ZERO {
                    continue;
                }
                for br in 0..nb {
                    let row = ar * nb + br;
                    for bc in 0..nb {
                        data[row * dim + ac * nb + bc] = a * other.data[br * nb + bc];
                    }
                }
            }
        }
        Ok(Self {
            local_dim: self.local_dim,
            sites,
            dim,
            data,
        })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius inner product `tr(self† other)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        frobenius_distance(self, &self.adjoint()).is_ok_and(|r| r <= tol)
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.local_dim() != self.local_dim || state.sites() != self.sites {
            return Err(Error::ShapeMismatch {
                left: self.shape_label(),
                right: format!("state d={} N={}", state.local_dim(), state.sites()),
            });
        }
        let amps = state.amplitudes();
        let out = (0..self.dim)
            .map(|r| self.row(r).iter().zip(amps).map(|(a, x)| a * x).sum())
            .collect();
        StateVector::new(self.local_dim, self.sites, out)
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.try_sub(&other.matmul(self)?)
    }

    /// `self * other + other * self`
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.try_add(&other.matmul(self)?)
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, exp: u32) -> Self {
        let mut out = Self::identity(self.local_dim, self.sites).expect("shape already validated");
        for _ in 0..exp {
            out = out.matmul(self).expect("same shape");
        }
        out
    }

    /// Indices `(row, col, value)` of entries with modulus above `tol`.
    pub fn nonzeros(&self, tol: f64) -> Vec<(usize, usize, Complex64)> {
        let n = self.dim;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > tol)
            .map(|(i, &z)| (i / n, i % n, z))
            .collect()
    }

    /// Rank of the operator, counting singular values above `tol` times the largest.
    pub fn rank(&self, tol: f64) -> usize {
        let m = nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.data);
        let sv = m.singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        if max == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > tol * max).count()
    }
}

impl fmt::Debug for DenseOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseOperator(d={}, N={})", self.local_dim, self.sites)?;
        for r in 0..self.dim {
            let row: Vec<String> = self
                .row(r)
                .iter()
                .map(|z| {
                    if z.im == 0.0 {
                        format!("{:.4}", z.re)
                    } else {
                        format!("{:.4}{:+.4}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// Operator sugar for internal algebra; shapes are validated by the
// fallible methods, so these panic on mismatch.
impl Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        self.matmul(rhs)
            .expect("operator shape mismatch in product")
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        self.try_add(rhs).expect("operator shape mismatch in sum")
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        self.try_sub(rhs)
            .expect("operator shape mismatch in difference")
    }
}

impl Neg for &DenseOperator {
    type Output = DenseOperator;
    fn neg(self) -> DenseOperator {
        self.scale_real(-1.0)
    }
}

impl Mul<Complex64> for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: Complex64) -> DenseOperator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: f64) -> DenseOperator {
        self.scale_real(rhs)
    }
}

/// Kronecker product of two operators with the same local dimension.
pub fn kron(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    a.kron(b)
}

/// Kronecker product of a non-empty list of single- or multi-site factors.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a DenseOperator>) -> Result<DenseOperator> {
    let mut iter = factors.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidDimension("empty tensor product".into()))?;
    iter.try_fold(first.clone(), |acc, f| acc.kron(f))
}

/// Places an `m`-site operator on sites `start..start+m` (1-based) of `total`
/// sites, with identities elsewhere.
pub fn embed(op: &DenseOperator, start: usize, total: usize) -> Result<DenseOperator> {
    let m = op.sites();
    let end = start + m - 1;
    if start < 1 || end > total {
        return Err(Error::Range { start, end, total });
    }
    let d = op.local_dim();
    checked_dim(d, total)?;
    let left = DenseOperator::identity(d, start - 1)?;
    let right = DenseOperator::identity(d, total - end)?;
    let mut out = if start > 1 {
        left.kron(op)?
    } else {
        op.clone()
    };
    if total > end {
        out = out.kron(&right)?;
    }
    Ok(out)
}

/// Swap operator `P(x ⊗ y) = y ⊗ x` on two sites of dimension `d`.
pub fn permutation_op(d: usize) -> Result<DenseOperator> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "permutation needs d >= 2, got {d}"
        )));
    }
    DenseOperator::from_fn(d, 2, |r, c| {
        let (x, y) = (c / d, c % d);
        if r == y * d + x {
            ONE
        } else {
            ZERO
        }
    })
}

/// Frobenius norm of `a - b`.
pub fn frobenius_distance(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    a.check_same_shape(b)?;
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for DenseOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorJson {
            d: self.local_dim,
            n: self.sites,
            entries: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DenseOperator {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = OperatorJson::deserialize(de)?;
        let entries = raw
            .entries
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        DenseOperator::new(raw.d, raw.n, entries).map_err(serde::de::Error::custom)
    }
}

/// Pure state on `sites` qudits, big-endian basis order.
#[derive(Clone, PartialEq, Debug)]
pub struct StateVector {
    local_dim: usize,
    sites: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(local_dim: usize, sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = checked_dim(local_dim, sites)?;
        if amplitudes.len() != dim {
            return Err(Error::ShapeMismatch {
                left: format!("{dim} amplitudes"),
                right: format!("{}", amplitudes.len()),
            });
        }
        Ok(Self {
            local_dim,
            sites,
            amplitudes,
        })
    }

    pub fn zeros(local_dim: usize, sites: usize) -> Result<Self> {
        let dim = checked_dim(local_dim, sites)?;
        Self::new(local_dim, sites, vec![ZERO; dim])
    }

    pub fn basis(local_dim: usize, sites: usize, index: usize) -> Result<Self> {
        let mut s = Self::zeros(local_dim, sites)?;
        if index >= s.amplitudes.len() {
            return Err(Error::Range {
                start: index,
                end: index,
                total: s.amplitudes.len(),
            });
        }
        s.amplitudes[index] = ONE;
        Ok(s)
    }

    /// Basis ket from a base-`d` label such as `"011"`.
    pub fn from_label(label: &str, local_dim: usize) -> Result<Self> {
        let index = label_to_index(label, local_dim)?;
        Self::basis(local_dim, label.chars().count(), index)
    }

    /// Superposition `sum c_k |label_k>`; not normalized.
    pub fn from_terms(local_dim: usize, terms: &[(&str, Complex64)]) -> Result<Self> {
        let sites = terms
            .first()
            .map(|(l, _)| l.chars().count())
            .ok_or_else(|| Error::Parse("empty state".into()))?;
        let mut s = Self::zeros(local_dim, sites)?;
        for (label, c) in terms {
            if label.chars().count() != sites {
                return Err(Error::Parse(format!("label {label} has the wrong length")));
            }
            s.amplitudes[label_to_index(label, local_dim)?] += c;
        }
        Ok(s)
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, label: &str) -> Result<Complex64> {
        Ok(self.amplitudes[label_to_index(label, self.local_dim)?])
    }

    pub fn label(&self, index: usize) -> String {
        index_to_label(index, self.local_dim, self.sites)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Unnormalized { norm: 0.0 });
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|&z| z * s).collect(),
            ..self.clone()
        }
    }

    pub(crate) fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.local_dim != other.local_dim || self.sites != other.sites {
            return Err(Error::ShapeMismatch {
                left: format!("d={} N={}", self.local_dim, self.sites),
                right: format!("d={} N={}", other.local_dim, other.sites),
            });
        }
        Ok(())
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_space(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.local_dim != other.local_dim {
            return Err(Error::LocalDimMismatch {
                left: self.local_dim,
                right: other.local_dim,
            });
        }
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        Self::new(self.local_dim, self.sites + other.sites, amps)
    }

    /// Basis indices with modulus above `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.amplitudes[i].norm() > tol)
            .collect()
    }
}

pub fn label_to_index(label: &str, local_dim: usize) -> Result<usize> {
    if label.is_empty() {
        return Err(Error::Parse("empty basis label".into()));
    }
    label.chars().try_fold(0usize, |acc, ch| {
        let digit = ch
            .to_digit(36)
            .filter(|&v| (v as usize) < local_dim)
            .ok_or_else(|| Error::Parse(format!("invalid digit {ch:?} for d={local_dim}")))?;
        Ok(acc * local_dim + digit as usize)
    })
}

pub fn index_to_label(mut index: usize, local_dim: usize, sites: usize) -> String {
    let mut digits = vec!['0'; sites];
    for slot in digits.iter_mut().rev() {
        *slot = std::char::from_digit((index % local_dim) as u32, 36).unwrap_or('?');
        index /= local_dim;
    }
    digits.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> DenseOperator {
        DenseOperator::from_real(2, 1, &[0.0, 1.0, 0.0, 0.0]).unwrap()
    }

    fn sx() -> DenseOperator {
        DenseOperator::from_real(2, 1, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = DenseOperator::identity(2, 1).unwrap();
        let i4 = DenseOperator::identity(2, 2).unwrap();
        assert_eq!(kron(&i2, &i2).unwrap(), i4);
    }

    #[test]
    fn kron_q_q_single_corner_entry() {
        // index-arithmetic oracle: (A⊗B)[(a r, b r), (a c, b c)] = A[ar,ac] B[br,bc]
        let a = q();
        let out = kron(&a, &a).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expect = a.get(r / 2, c / 2) * a.get(r % 2, c % 2);
                assert_eq!(out.get(r, c), expect);
            }
        }
        assert_eq!(out.nonzeros(0.0), vec![(0, 3, ONE)]);
    }

    #[test]
    fn sigma_x_on_left_site_flips_msb() {
        let op = kron(&sx(), &DenseOperator::identity(2, 1).unwrap()).unwrap();
        let out = op
            .apply(&StateVector::from_label("00", 2).unwrap())
            .unwrap();
        assert_eq!(out, StateVector::from_label("10", 2).unwrap());
    }

    #[test]
    fn kron_rejects_mixed_local_dims() {
        let a = DenseOperator::identity(2, 1).unwrap();
        let b = DenseOperator::identity(3, 1).unwrap();
        assert!(matches!(kron(&a, &b), Err(Error::LocalDimMismatch { .. })));
    }

    #[test]
    fn embed_examples() {
        let q3 = embed(&q(), 2, 3).unwrap();
        let zero = q3
            .apply(&StateVector::from_label("000", 2).unwrap())
            .unwrap();
        assert_eq!(zero.norm(), 0.0);
        let out = q3
            .apply(&StateVector::from_label("010", 2).unwrap())
            .unwrap();
        assert_eq!(out, StateVector::from_label("000", 2).unwrap());
        // basis-by-basis: q on site 2 lowers |x1y> to |x0y>
        for idx in 0..8 {
            let out = q3.apply(&StateVector::basis(2, 3, idx).unwrap()).unwrap();
            if idx & 0b010 != 0 {
                assert_eq!(out, StateVector::basis(2, 3, idx & !0b010).unwrap());
            } else {
                assert_eq!(out.norm(), 0.0);
            }
        }
        let x = sx();
        let i = DenseOperator::identity(2, 1).unwrap();
        assert_eq!(embed(&x, 1, 2).unwrap(), kron(&x, &i).unwrap());
    }

    #[test]
    fn embed_out_of_range() {
        assert!(matches!(embed(&q(), 3, 2), Err(Error::Range { .. })));
        assert!(matches!(embed(&q(), 0, 2), Err(Error::Range { .. })));
    }

    #[test]
    fn permutation_swaps_and_squares_to_identity() {
        let p = permutation_op(2).unwrap();
        let out = p.apply(&StateVector::from_label("01", 2).unwrap()).unwrap();
        assert_eq!(out, StateVector::from_label("10", 2).unwrap());
        for d in 2..5 {
            let p = permutation_op(d).unwrap();
            let i = DenseOperator::identity(d, 2).unwrap();
            assert_eq!(frobenius_distance(&(&p * &p), &i).unwrap(), 0.0);
            let p1 = embed(&p, 1, 3).unwrap();
            let p2 = embed(&p, 2, 3).unwrap();
            let lhs = &(&p1 * &p2) * &p1;
            let rhs = &(&p2 * &p1) * &p2;
            assert_eq!(frobenius_distance(&lhs, &rhs).unwrap(), 0.0);
        }
        assert!(permutation_op(1).is_err());
    }

    #[test]
    fn frobenius_distance_examples() {
        let i = DenseOperator::identity(2, 1).unwrap();
        let z = DenseOperator::zeros(2, 1).unwrap();
        assert_eq!(frobenius_distance(&i, &i).unwrap(), 0.0);
        assert!((frobenius_distance(&i, &z).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let big = DenseOperator::identity(2, 2).unwrap();
        assert!(frobenius_distance(&i, &big).is_err());
    }

    #[test]
    fn dimension_guard() {
        assert!(DenseOperator::identity(2, 12).is_ok());
        assert!(matches!(
            DenseOperator::identity(2, 13),
            Err(Error::DimensionGuard { .. })
        ));
    }

    #[test]
    fn labels_round_trip() {
        assert_eq!(label_to_index("011", 2).unwrap(), 3);
        assert_eq!(label_to_index("21", 3).unwrap(), 7);
        assert_eq!(index_to_label(7, 3, 2), "21");
        assert!(label_to_index("012", 2).is_err());
    }

    #[test]
    fn json_shape() {
        let op = q();
        let text = serde_json::to_string(&op).unwrap();
        assert_eq!(
            text,
            r#"{"d":2,"N":1,"entries":[[0.0,0.0],[1.0,0.0],[0.0,0.0],[0.0,0.0]]}"#
        );
        let back: DenseOperator = serde_json::from_str(&text).unwrap();
        assert_eq!(back, op);
        assert!(serde_json::from_str::<DenseOperator>(r#"{"d":2,"N":1,"entries":[]}"#).is_err());
    }
}
