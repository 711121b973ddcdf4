//! Entangled states generated by R-matrices and their SLOCC classes.
//!
//! Qubit states on two and three sites are classified exactly by local
//! ranks and the three-tangle. Larger states get a descriptor made of the
//! local ranks and the list of bipartitions across which they factorize.
//! Qudit states whose single-site supports are at most two-dimensional are
//! first mapped onto effective qubits.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baxter::RMatrixFun;
use crate::error::{Error, Result};
use crate::tensor::{checked_dim, DenseOperator, StateVector, ONE, ZERO};

/// Relative threshold on reduced-density eigenvalues.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

const NORM_TOL: f64 = 1e-8;
const DET_EPS: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn require_normalized(state: &StateVector) -> Result<()> {
    if state.is_normalized(NORM_TOL) {
        Ok(())
    } else {
        Err(Error::Unnormalized { norm: state.norm() })
    }
}

/// Output of [`apply_r`]: the raw image and its normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedState {
    pub raw: StateVector,
    pub state: StateVector,
}

/// Applies the square operator `op` to sites `start..start+m` (1-based).
pub fn apply_local(op: &DenseOperator, state: &StateVector, start: usize) -> Result<StateVector> {
    let (d, n, m) = (state.local_dim(), state.sites(), op.sites());
    if op.local_dim() != d {
        return Err(Error::LocalDimMismatch {
            left: op.local_dim(),
            right: d,
        });
    }
    if start < 1 || start + m - 1 > n {
        return Err(Error::Range {
            start,
            end: start + m - 1,
            total: n,
        });
    }
    let mid = op.dim();
    let right = d.pow((n + 1 - start - m) as u32);
    let left = d.pow((start - 1) as u32);
    let amps = state.amplitudes();
    let mut out = vec![ZERO; amps.len()];
    let mut window = vec![ZERO; mid];
    for a in 0..left {
        for b in 0..right {
            for (j, w) in window.iter_mut().enumerate() {
                *w = amps[(a * mid + j) * right + b];
            }
            for i in 0..mid {
                out[(a * mid + i) * right + b] =
                    op.row(i).iter().zip(&window).map(|(x, y)| x * y).sum();
            }
        }
    }
    StateVector::new(d, n, out)
}

/// `R(u)` placed at `position` (1-based) acting on `input`.
pub fn apply_r(
    r: &RMatrixFun,
    u: Complex64,
    input: &StateVector,
    position: usize,
    total: usize,
) -> Result<GeneratedState> {
    if input.sites() != total {
        return Err(Error::ShapeMismatch {
            left: format!("{total} sites"),
            right: format!("state on {} sites", input.sites()),
        });
    }
    let raw = apply_local(&r.eval(u)?, input, position)?;
    let state = raw.normalized()?;
    Ok(GeneratedState { raw, state })
}

/// Amplitudes viewed as a `left x d x right` tensor around `site`.
fn split(state: &StateVector, site: usize) -> Result<(usize, usize, usize)> {
    let (d, n) = (state.local_dim(), state.sites());
    if site < 1 || site > n {
        return Err(Error::IndexOutOfRange {
            index: site,
            order: n,
        });
    }
    Ok((d.pow((site - 1) as u32), d, d.pow((n - site) as u32)))
}

/// Single-site reduced density matrix at `site` (1-based).
pub fn reduced_density(state: &StateVector, site: usize) -> Result<DenseOperator> {
    require_normalized(state)?;
    let (left, d, right) = split(state, site)?;
    let amps = state.amplitudes();
    let mut rho = vec![ZERO; d * d];
    for a in 0..left {
        for b in 0..right {
            for x in 0..d {
                let px = amps[(a * d + x) * right + b];
                if px == ZERO {
                    continue;
                }
                for y in 0..d {
                    rho[x * d + y] += px * amps[(a * d + y) * right + b].conj();
                }
            }
        }
    }
    DenseOperator::new(d, 1, rho)
}

fn hermitian_eigen(rho: &DenseOperator) -> SymmetricEigen<Complex64, nalgebra::Dyn> {
    let n = rho.dim();
    DMatrix::from_row_slice(n, n, rho.entries()).symmetric_eigen()
}

fn count_above(values: impl IntoIterator<Item = f64>, tol: f64) -> usize {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return 0;
    }
    values.iter().filter(|&&v| v > tol * max).count()
}

/// Rank of every single-site reduced density.
pub fn local_ranks(state: &StateVector, tol: f64) -> Result<Vec<usize>> {
    (1..=state.sites())
        .map(|site| {
            let rho = reduced_density(state, site)?;
            Ok(count_above(
                hermitian_eigen(&rho).eigenvalues.iter().copied(),
                tol,
            ))
        })
        .collect()
}

/// Schmidt rank across the cut `sites | rest`; `mask` bit `k` selects site `k + 1`.
fn cut_rank(state: &StateVector, mask: usize, tol: f64) -> usize {
    let (d, n) = (state.local_dim(), state.sites());
    let inside: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
    let outside: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 0).collect();
    let rows = d.pow(inside.len() as u32);
    let cols = d.pow(outside.len() as u32);
    let mut digits = vec![0usize; n];
    let mut mat = DMatrix::<Complex64>::zeros(rows, cols);
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        let mut rest = idx;
        for k in (0..n).rev() {
            digits[k] = rest % d;
            rest /= d;
        }
        let r = inside.iter().fold(0, |acc, &k| acc * d + digits[k]);
        let col = outside.iter().fold(0, |acc, &k| acc * d + digits[k]);
        mat[(r, col)] = *amp;
    }
    count_above(mat.singular_values().iter().copied(), tol)
}

fn site_letters(n: usize, mask: usize) -> String {
    (0..n)
        .filter(|k| mask >> k & 1 == 1)
        .map(|k| site_name(k))
        .collect()
}

fn site_name(k: usize) -> String {
    if k < 26 {
        ((b'A' + k as u8) as char).to_string()
    } else {
        format!("S{}", k + 1)
    }
}

/// Bipartitions with Schmidt rank one, written like `AB|CD`. The part
/// holding site A is always on the left.
pub fn separable_cuts(state: &StateVector, tol: f64) -> Result<Vec<String>> {
    require_normalized(state)?;
    let n = state.sites();
    let full = (1usize << n) - 1;
    let masks: Vec<usize> = (1..full).filter(|m| m & 1 == 1).collect();
    Ok(masks
        .into_par_iter()
        .filter(|&m| cut_rank(state, m, tol) == 1)
        .map(|m| format!("{}|{}", site_letters(n, m), site_letters(n, full & !m)))
        .collect())
}

/// `τ = 4 |Hdet(a)|` for a normalized three-qubit state.
pub fn three_tangle(state: &StateVector) -> Result<f64> {
    if state.local_dim() != 2 || state.sites() != 3 {
        return Err(Error::ShapeMismatch {
            left: "three qubits".into(),
            right: format!("d={} N={}", state.local_dim(), state.sites()),
        });
    }
    require_normalized(state)?;
    let a = |i: usize| state.amplitudes()[i];
    let (a0, a1, a2, a3, a4, a5, a6, a7) = (a(0), a(1), a(2), a(3), a(4), a(5), a(6), a(7));
    let squares = a0 * a0 * a7 * a7 + a1 * a1 * a6 * a6 + a2 * a2 * a5 * a5 + a4 * a4 * a3 * a3;
    let pairs = a0 * a7 * a3 * a4
        + a0 * a7 * a5 * a2
        + a0 * a7 * a6 * a1
        + a3 * a4 * a5 * a2
        + a3 * a4 * a6 * a1
        + a5 * a2 * a6 * a1;
    let quads = a0 * a6 * a5 * a3 + a7 * a1 * a2 * a4;
    let hdet = squares - 2.0 * pairs + 4.0 * quads;
    Ok(4.0 * hdet.norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SloccClass {
    #[serde(rename = "product")]
    Product,
    #[serde(rename = "bell")]
    Bell,
    #[serde(rename = "A-B-C")]
    ABC,
    #[serde(rename = "AB-C")]
    ABxC,
    #[serde(rename = "A-BC")]
    AxBC,
    #[serde(rename = "AC-B")]
    ACxB,
    #[serde(rename = "GHZ")]
    Ghz,
    #[serde(rename = "W")]
    W,
    /// Four or more sites: only ranks and separable cuts are reported.
    #[serde(rename = "rank-signature")]
    RankSignature,
    #[serde(rename = "unclassified")]
    Unclassified,
}

impl SloccClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SloccClass::Product => "product",
            SloccClass::Bell => "bell",
            SloccClass::ABC => "A-B-C",
            SloccClass::ABxC => "AB-C",
            SloccClass::AxBC => "A-BC",
            SloccClass::ACxB => "AC-B",
            SloccClass::Ghz => "GHZ",
            SloccClass::W => "W",
            SloccClass::RankSignature => "rank-signature",
            SloccClass::Unclassified => "unclassified",
        }
    }

    pub fn is_biseparable(&self) -> bool {
        matches!(self, SloccClass::ABxC | SloccClass::AxBC | SloccClass::ACxB)
    }
}

impl fmt::Display for SloccClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SloccLabel {
    pub n: usize,
    /// Local dimension of the input state.
    pub d: usize,
    pub class: SloccClass,
    /// Local ranks of the classified (possibly reduced) state.
    pub ranks: Vec<usize>,
    /// Three-tangle, for three-qubit states only.
    pub tangle: Option<f64>,
    pub separable_cuts: Vec<String>,
    /// `true` when a qudit state was mapped to effective qubits first.
    pub reduced: bool,
    /// What produced the state, when known.
    pub provenance: Option<String>,
}

impl SloccLabel {
    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = Some(provenance.into());
        self
    }
}

/// Maps every site onto a two-dimensional space containing its reduced
/// support. Sites supported inside `span{|1>,|2>}` use that pair as the
/// qubit basis, otherwise the support eigenvectors are used. Returns `None`
/// when some site has support of dimension three or more.
pub fn effective_qubits(state: &StateVector, tol: f64) -> Result<Option<StateVector>> {
    require_normalized(state)?;
    let (d, n) = (state.local_dim(), state.sites());
    if d == 2 {
        return Ok(Some(state.clone()));
    }
    let mut maps = Vec::with_capacity(n);
    for site in 1..=n {
        let rho = reduced_density(state, site)?;
        let max_diag = (0..d).map(|i| rho.get(i, i).re).fold(0.0, f64::max);
        let outside_12 = (0..d)
            .filter(|&i| i != 1 && i != 2)
            .map(|i| rho.get(i, i).re)
            .sum::<f64>();
        if outside_12 <= tol * max_diag {
            let mut v = vec![ZERO; 2 * d];
            v[1] = ONE;
            v[d + 2] = ONE;
            maps.push(v);
            continue;
        }
        let eig = hermitian_eigen(&rho);
        let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let mut support: Vec<Vec<Complex64>> = (0..d)
            .filter(|&i| eig.eigenvalues[i] > tol * max)
            .map(|i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect();
        if support.len() > 2 {
            return Ok(None);
        }
        if support.len() == 1 {
            support.push(orthogonal_unit(&support[0]));
        }
        maps.push(
            support
                .iter()
                .flat_map(|v| v.iter().map(|z| z.conj()))
                .collect(),
        );
    }
    let mut amps = state.amplitudes().to_vec();
    let mut dims = vec![d; n];
    for (k, map) in maps.iter().enumerate() {
        let left: usize = dims[..k].iter().product();
        let right: usize = dims[k + 1..].iter().product();
        let mut next = vec![ZERO; left * 2 * right];
        for a in 0..left {
            for b in 0..right {
                for x in 0..2 {
                    next[(a * 2 + x) * right + b] = (0..d)
                        .map(|y| map[x * d + y] * amps[(a * d + y) * right + b])
                        .sum();
                }
            }
        }
        amps = next;
        dims[k] = 2;
    }
    Ok(Some(StateVector::new(2, n, amps)?.normalized()?))
}

/// Unit vector orthogonal to the unit vector `v`, by Gram-Schmidt on the
/// standard basis.
fn orthogonal_unit(v: &[Complex64]) -> Vec<Complex64> {
    let d = v.len();
    let mut best: Option<Vec<Complex64>> = None;
    let mut best_norm = 0.0;
    for i in 0..d {
        let overlap = v[i].conj();
        let mut e: Vec<Complex64> = v.iter().map(|z| -z * overlap).collect();
        e[i] += ONE;
        let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > best_norm {
            best_norm = norm;
            best = Some(e.iter().map(|z| z / norm).collect());
        }
    }
    best.expect("dimension is at least two")
}

/// SLOCC label of `state`; `tol` is the relative rank threshold and the
/// tangle threshold separating GHZ from W.
pub fn classify(state: &StateVector, tol: f64) -> Result<SloccLabel> {
    require_normalized(state)?;
    let (d, n) = (state.local_dim(), state.sites());
    let reduced = effective_qubits(state, tol)?;
    let Some(qubits) = reduced else {
        return Ok(SloccLabel {
            n,
            d,
            class: SloccClass::Unclassified,
            ranks: local_ranks(state, tol)?,
            tangle: None,
            separable_cuts: separable_cuts(state, tol)?,
            reduced: false,
            provenance: None,
        });
    };
    let ranks = local_ranks(&qubits, tol)?;
    let cuts = if n >= 2 {
        separable_cuts(&qubits, tol)?
    } else {
        Vec::new()
    };
    let mut tangle = None;
    let class = match n {
        1 => SloccClass::Product,
        2 => {
            if ranks == [2, 2] {
                SloccClass::Bell
            } else {
                SloccClass::Product
            }
        }
        3 => {
            let t = three_tangle(&qubits)?;
            tangle = Some(t);
            match ranks.as_slice() {
                [1, 1, 1] => SloccClass::ABC,
                [1, 2, 2] => SloccClass::AxBC,
                [2, 1, 2] => SloccClass::ACxB,
                [2, 2, 1] => SloccClass::ABxC,
                [2, 2, 2] if t > tol => SloccClass::Ghz,
                [2, 2, 2] => SloccClass::W,
                _ => SloccClass::Unclassified,
            }
        }
        _ => SloccClass::RankSignature,
    };
    Ok(SloccLabel {
        n,
        d,
        class,
        ranks,
        tangle,
        separable_cuts: cuts,
        reduced: d != 2,
        provenance: None,
    })
}

pub fn classify_batch(states: &[StateVector], tol: f64) -> Vec<Result<SloccLabel>> {
    states.par_iter().map(|s| classify(s, tol)).collect()
}

/// `U = (1/√N) Σ_k χ_k` with `χ_k = (Π_{j<k} σᶻ_j) σˣ_k`.
pub fn w_unitary(n: usize) -> Result<DenseOperator> {
    if n == 0 {
        return Err(Error::InvalidDimension(
            "W unitary needs at least one site".into(),
        ));
    }
    let dim = checked_dim(2, n)?;
    let scale = 1.0 / (n as f64).sqrt();
    let mut entries = vec![ZERO; dim * dim];
    for x in 0..dim {
        for k in 1..=n {
            let flipped = x ^ (1 << (n - k));
            let parity = (x >> (n - k + 1)).count_ones();
            let sign = if parity % 2 == 0 { scale } else { -scale };
            entries[flipped * dim + x] += c(sign);
        }
    }
    DenseOperator::new(2, n, entries)
}

/// Invertible local operator `L_1 ⊗ ... ⊗ L_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct IloMatrix {
    factors: Vec<DenseOperator>,
}

impl IloMatrix {
    pub fn new(factors: Vec<DenseOperator>) -> Result<Self> {
        let Some(first) = factors.first() else {
            return Err(Error::InvalidDimension(
                "ILO needs at least one factor".into(),
            ));
        };
        let d = first.local_dim();
        for (k, f) in factors.iter().enumerate() {
            if f.sites() != 1 || f.local_dim() != d {
                return Err(Error::ShapeMismatch {
                    left: format!("single-site factor with d={d}"),
                    right: format!("factor {} with d={} N={}", k + 1, f.local_dim(), f.sites()),
                });
            }
            let det = DMatrix::from_row_slice(d, d, f.entries()).determinant();
            if det.norm() < DET_EPS {
                return Err(Error::SingularFactor { site: k + 1 });
            }
        }
        Ok(Self { factors })
    }

    pub fn identity(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![DenseOperator::identity(d, 1)?; n])
    }

    pub fn factors(&self) -> &[DenseOperator] {
        &self.factors
    }

    pub fn sites(&self) -> usize {
        self.factors.len()
    }
}

/// `(L_1 ⊗ ... ⊗ L_N)|state>`, normalized.
pub fn ilo_apply(state: &StateVector, ilo: &IloMatrix) -> Result<StateVector> {
    if ilo.sites() != state.sites() {
        return Err(Error::ShapeMismatch {
            left: format!("ILO on {} sites", ilo.sites()),
            right: format!("state on {} sites", state.sites()),
        });
    }
    let mut out = state.clone();
    for (k, f) in ilo.factors.iter().enumerate() {
        out = apply_local(f, &out, k + 1)?;
    }
    out.normalized()
}

/// Bell states `ψ1..ψ4`: `(|00>-|11>)`, `(|01>-|10>)`, `(|01>+|10>)`,
/// `(|00>+|11>)`, each over `√2`.
pub fn bell_state(k: usize) -> Result<StateVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let terms: [(&str, f64); 2] = match k {
        1 => [("00", h), ("11", -h)],
        2 => [("01", h), ("10", -h)],
        3 => [("01", h), ("10", h)],
        4 => [("00", h), ("11", h)],
        _ => return Err(Error::IndexOutOfRange { index: k, order: 4 }),
    };
    let terms: Vec<(&str, Complex64)> = terms.iter().map(|&(l, a)| (l, c(a))).collect();
    StateVector::from_terms(2, &terms)
}

/// `(|φ> ± |φ̄>)/√2`, with `φ̄` the bitwise complement of the qubit label `phi`.
pub fn ghz_state(phi: &str, plus: bool) -> Result<StateVector> {
    let bar: String = phi
        .chars()
        .map(|ch| match ch {
            '0' => Ok('1'),
            '1' => Ok('0'),
            _ => Err(Error::Parse(format!(
                "GHZ seed {phi:?} is not a qubit label"
            ))),
        })
        .collect::<Result<_>>()?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::from_terms(2, &[(phi, c(h)), (&bar, c(if plus { h } else { -h }))])
}

/// The eight standard three-qubit W states `w1..w8`.
pub fn w_state(k: usize) -> Result<StateVector> {
    let terms: [(&str, f64); 3] = match k {
        1 => [("100", 1.0), ("010", 1.0), ("001", 1.0)],
        2 => [("101", 1.0), ("011", 1.0), ("000", 1.0)],
        3 => [("110", 1.0), ("000", 1.0), ("011", -1.0)],
        4 => [("000", 1.0), ("110", -1.0), ("101", -1.0)],
        5 => [("111", 1.0), ("001", 1.0), ("010", -1.0)],
        6 => [("001", 1.0), ("111", -1.0), ("100", -1.0)],
        7 => [("010", 1.0), ("100", -1.0), ("111", 1.0)],
        8 => [("011", 1.0), ("101", -1.0), ("110", 1.0)],
        _ => return Err(Error::IndexOutOfRange { index: k, order: 8 }),
    };
    let s = 1.0 / 3f64.sqrt();
    let terms: Vec<(&str, Complex64)> = terms.iter().map(|&(l, a)| (l, c(a * s))).collect();
    StateVector::from_terms(2, &terms)
}

/// `N`-qubit W state `(1/√N) Σ_r |0..1_r..0>`.
pub fn w_state_n(n: usize) -> Result<StateVector> {
    let dim = checked_dim(2, n)?;
    let s = c(1.0 / (n as f64).sqrt());
    let mut amps = vec![ZERO; dim];
    for r in 0..n {
        amps[1 << r] = s;
    }
    StateVector::new(2, n, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baxter::baxterize_nilpotent;
    use crate::sis::susy_suite;
    use crate::tensor::{frobenius_distance, kron_all};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn ket(label: &str) -> StateVector {
        StateVector::from_label(label, 2).unwrap()
    }

    fn state(d: usize, terms: &[(&str, f64)]) -> StateVector {
        let t: Vec<(&str, Complex64)> = terms.iter().map(|&(l, a)| (l, c(a))).collect();
        StateVector::from_terms(d, &t)
            .unwrap()
            .normalized()
            .unwrap()
    }

    /// Partial trace by summing over explicit index tuples.
    fn rho_oracle(s: &StateVector, site: usize) -> Vec<Vec<Complex64>> {
        let (d, n) = (s.local_dim(), s.sites());
        let mut rho = vec![vec![ZERO; d]; d];
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let li: Vec<char> = s.label(i).chars().collect();
                let lj: Vec<char> = s.label(j).chars().collect();
                let same_rest = (0..n).all(|k| k == site - 1 || li[k] == lj[k]);
                if same_rest {
                    let x = li[site - 1].to_digit(10).unwrap() as usize;
                    let y = lj[site - 1].to_digit(10).unwrap() as usize;
                    rho[x][y] += s.amplitudes()[i] * s.amplitudes()[j].conj();
                }
            }
        }
        rho
    }

    /// `τ = 2 |Σ a a a a ε ε ε ε ε ε|` with the k-indices contracted across pairs.
    fn tangle_oracle(s: &StateVector) -> f64 {
        let eps = |a: usize, b: usize| -> f64 {
            match (a, b) {
                (0, 1) => 1.0,
                (1, 0) => -1.0,
                _ => 0.0,
            }
        };
        let a = |i: usize, j: usize, k: usize| s.amplitudes()[i * 4 + j * 2 + k];
        let mut acc = ZERO;
        let r = 0..2usize;
        for i1 in r.clone() {
            for i2 in r.clone() {
                for i3 in r.clone() {
                    for i4 in r.clone() {
                        for j1 in r.clone() {
                            for j2 in r.clone() {
                                for j3 in r.clone() {
                                    for j4 in r.clone() {
                                        for k1 in r.clone() {
                                            for k2 in r.clone() {
                                                for k3 in r.clone() {
                                                    for k4 in r.clone() {
                                                        let e = eps(i1, i2)
                                                            * eps(i3, i4)
                                                            * eps(j1, j2)
                                                            * eps(j3, j4)
                                                            * eps(k1, k3)
                                                            * eps(k2, k4);
                                                        if e != 0.0 {
                                                            acc += a(i1, j1, k1)
                                                                * a(i2, j2, k2)
                                                                * a(i3, j3, k3)
                                                                * a(i4, j4, k4)
                                                                * e;
                                                        }
                                                    }
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        2.0 * acc.norm()
    }

    #[test]
    fn reduced_densities_match_oracle() {
        let cases = [
            (bell_state(4).unwrap(), 1, [[0.5, 0.0], [0.0, 0.5]]),
            (ket("000"), 2, [[1.0, 0.0], [0.0, 0.0]]),
            (
                state(2, &[("000", 1.0), ("011", 1.0)]),
                1,
                [[1.0, 0.0], [0.0, 0.0]],
            ),
        ];
        for (s, site, expected) in cases {
            let rho = reduced_density(&s, site).unwrap();
            let oracle = rho_oracle(&s, site);
            for x in 0..2 {
                for y in 0..2 {
                    assert!((rho.get(x, y) - oracle[x][y]).norm() < 1e-14);
                    assert!((rho.get(x, y) - c(expected[x][y])).norm() < 1e-14);
                }
            }
        }
        let w = w_state(3).unwrap();
        for site in 1..=3 {
            let rho = reduced_density(&w, site).unwrap();
            assert!(rho.is_hermitian(1e-14));
            assert!((rho.trace() - ONE).norm() < 1e-14);
        }
        assert!(matches!(
            reduced_density(&ket("000").scale(c(2.0)), 1),
            Err(Error::Unnormalized { .. })
        ));
    }

    #[test]
    fn local_rank_examples() {
        let tol = DEFAULT_RANK_TOL;
        assert_eq!(local_ranks(&ket("000"), tol).unwrap(), [1, 1, 1]);
        assert_eq!(
            local_ranks(&ghz_state("000", true).unwrap(), tol).unwrap(),
            [2, 2, 2]
        );
        assert_eq!(
            local_ranks(&state(2, &[("000", 1.0), ("011", 1.0)]), tol).unwrap(),
            [1, 2, 2]
        );
    }

    #[test]
    fn tangle_examples_and_oracle() {
        let ghz = ghz_state("000", true).unwrap();
        assert!((three_tangle(&ghz).unwrap() - 1.0).abs() < 1e-14);
        assert!((tangle_oracle(&ghz) - 1.0).abs() < 1e-14);
        for k in 1..=8 {
            let w = w_state(k).unwrap();
            assert!(three_tangle(&w).unwrap() < 1e-14, "w{k}");
            assert!(tangle_oracle(&w) < 1e-14);
        }
        let product = ket("0").kron(&state(2, &[("0", 1.0), ("1", 2.0)])).unwrap();
        let product = product.kron(&state(2, &[("0", 0.3), ("1", -1.0)])).unwrap();
        assert!(three_tangle(&product).unwrap() < 1e-14);
        assert!(three_tangle(&bell_state(1).unwrap()).is_err());
        for phi in ["000", "100", "010", "001"] {
            for plus in [true, false] {
                let s = ghz_state(phi, plus).unwrap();
                assert!((three_tangle(&s).unwrap() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let s = susy_suite(2).unwrap();
        let q = s.q.kron(&s.q).unwrap();
        let r = baxterize_nilpotent(&q, 1.0).unwrap();
        let out = apply_r(&r, Complex64::new(0.0, FRAC_PI_2), &ket("11"), 1, 2).unwrap();
        assert_eq!(
            classify(&out.state, DEFAULT_RANK_TOL).unwrap().class,
            SloccClass::Bell
        );
        let unchanged = apply_r(&r, c(0.7), &ket("01"), 1, 2).unwrap();
        assert_eq!(unchanged.raw, ket("01"));

        let abc = state(2, &[("000", 1.0), ("011", 1.0)]);
        assert_eq!(
            classify(&abc, DEFAULT_RANK_TOL).unwrap().class,
            SloccClass::AxBC
        );
        let acb = state(2, &[("000", 1.0), ("101", 1.0)]);
        assert_eq!(
            classify(&acb, DEFAULT_RANK_TOL).unwrap().class,
            SloccClass::ACxB
        );
        let abc2 = state(2, &[("000", 1.0), ("110", 1.0)]);
        let label = classify(&abc2, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(label.class, SloccClass::ABxC);
        assert_eq!(label.separable_cuts, ["AB|C"]);
        assert_eq!(
            classify(&ket("010"), DEFAULT_RANK_TOL).unwrap().class,
            SloccClass::ABC
        );
        assert_eq!(
            classify(&ket("01"), DEFAULT_RANK_TOL).unwrap().class,
            SloccClass::Product
        );
        let ghz = classify(&ghz_state("000", true).unwrap(), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(ghz.class, SloccClass::Ghz);
        for k in 1..=8 {
            assert_eq!(
                classify(&w_state(k).unwrap(), DEFAULT_RANK_TOL)
                    .unwrap()
                    .class,
                SloccClass::W
            );
        }
        let four = classify(&w_state_n(4).unwrap(), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(four.class, SloccClass::RankSignature);
        assert_eq!(four.ranks, [2, 2, 2, 2]);
        assert!(four.separable_cuts.is_empty());
        let json = serde_json::to_value(&ghz).unwrap();
        assert_eq!(json["class"], "GHZ");
        assert_eq!(serde_json::from_value::<SloccLabel>(json).unwrap(), ghz);
    }

    #[test]
    fn qutrit_states_reduce_to_qubits() {
        let t = FRAC_1_SQRT_2;
        // |11> + (e^{iu}-1)/2 |~1~1> lives on span{|1>,|2>} at each site.
        let e = Complex64::new(0.0, FRAC_PI_2).exp() - 1.0;
        let mut amps = vec![ZERO; 9];
        amps[4] = ONE;
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            amps[i * 3 + j] += e * 0.5 * t * t;
        }
        let s = StateVector::new(3, 2, amps).unwrap().normalized().unwrap();
        let label = classify(&s, DEFAULT_RANK_TOL).unwrap();
        assert!(label.reduced);
        assert_eq!(label.class, SloccClass::Bell);
        let qubits = effective_qubits(&s, DEFAULT_RANK_TOL).unwrap().unwrap();
        assert!((qubits.amplitudes()[0].norm() - s.amplitudes()[4].norm()).abs() < 1e-12);

        let with_zero = StateVector::from_terms(3, &[("120", c(t)), ("210", c(t))]).unwrap();
        assert_eq!(
            classify(&with_zero, DEFAULT_RANK_TOL).unwrap().class,
            SloccClass::ABxC
        );
        let qutrit_ghz = StateVector::from_terms(
            3,
            &[("00", c(0.5)), ("11", c(0.5)), ("22", c(FRAC_1_SQRT_2))],
        )
        .unwrap();
        let label = classify(&qutrit_ghz, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(label.class, SloccClass::Unclassified);
        assert_eq!(label.ranks, [3, 3]);
    }

    #[test]
    fn w_unitary_properties() {
        for n in 1..=5 {
            let u = w_unitary(n).unwrap();
            let id = DenseOperator::identity(2, n).unwrap();
            assert!(frobenius_distance(&(&u * &u), &id).unwrap() < 1e-12);
            assert!(frobenius_distance(&u.adjoint(), &u).unwrap() < 1e-12);
            let out = u.apply(&StateVector::basis(2, n, 0).unwrap()).unwrap();
            assert!(out.distance(&w_state_n(n).unwrap()).unwrap() < 1e-12);
        }
        let sx = DenseOperator::from_real(2, 1, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(w_unitary(1).unwrap(), sx);
        assert!(w_unitary(0).is_err());
    }

    #[test]
    fn ilo_examples() {
        let sx = DenseOperator::from_real(2, 1, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let id = DenseOperator::identity(2, 1).unwrap();
        let flip_b = IloMatrix::new(vec![id.clone(), sx]).unwrap();
        let out = ilo_apply(&bell_state(1).unwrap(), &flip_b).unwrap();
        assert!(out.distance(&bell_state(2).unwrap()).unwrap() < 1e-14);

        let (al, be, ga) = (0.4, -1.3, 2.2);
        let diag = |x: f64| DenseOperator::from_real(2, 1, &[1.0, 0.0, 0.0, x]).unwrap();
        let ilo = IloMatrix::new(vec![diag(al), diag(be), diag(ga)]).unwrap();
        let out = ilo_apply(&w_state(1).unwrap(), &ilo).unwrap();
        let expected = state(2, &[("100", al), ("010", be), ("001", ga)]);
        assert!(out.distance(&expected).unwrap() < 1e-14);
        // The unnormalized image carries the √3 factor exactly.
        let raw = kron_all([&diag(al), &diag(be), &diag(ga)]).unwrap();
        let raw = raw
            .apply(&w_state(1).unwrap().scale(c(3f64.sqrt())))
            .unwrap();
        assert!((raw.amplitude("010").unwrap() - c(be)).norm() < 1e-14);

        let w = w_state(2).unwrap();
        assert_eq!(
            ilo_apply(&w, &IloMatrix::identity(2, 3).unwrap()).unwrap(),
            w
        );
        let singular = DenseOperator::from_real(2, 1, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(
            IloMatrix::new(vec![id.clone(), singular]),
            Err(Error::SingularFactor { site: 2 })
        ));
        assert!(ilo_apply(&w, &IloMatrix::identity(2, 2).unwrap()).is_err());
    }

    fn reference_states() -> Vec<StateVector> {
        let mut out = vec![
            bell_state(1).unwrap(),
            ket("01"),
            ket("000"),
            ghz_state("000", true).unwrap(),
            w_state(1).unwrap(),
            state(2, &[("000", 1.0), ("011", 1.0)]),
            state(2, &[("000", 1.0), ("101", 1.0)]),
            state(2, &[("000", 1.0), ("110", 1.0)]),
        ];
        out.push(w_state(5).unwrap());
        out
    }

    fn factor(v: &[f64]) -> DenseOperator {
        let e: Vec<Complex64> = (0..4)
            .map(|i| Complex64::new(v[2 * i], v[2 * i + 1]))
            .collect();
        DenseOperator::new(2, 1, e).unwrap()
    }

    fn well_conditioned(v: &[f64]) -> bool {
        let f = factor(v);
        let det = f.get(0, 0) * f.get(1, 1) - f.get(0, 1) * f.get(1, 0);
        det.norm() > 0.2
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn classification_is_ilo_invariant(
            raw in prop::collection::vec(
                prop::collection::vec(-1.5f64..1.5, 8).prop_filter("invertible", |v| well_conditioned(v)),
                3,
            )
        ) {
            for s in reference_states() {
                let n = s.sites();
                let ilo = IloMatrix::new(raw[..n].iter().map(|v| factor(v)).collect()).unwrap();
                let before = classify(&s, DEFAULT_RANK_TOL).unwrap();
                let after = classify(&ilo_apply(&s, &ilo).unwrap(), DEFAULT_RANK_TOL).unwrap();
                prop_assert_eq!(before.class, after.class);
            }
        }

        #[test]
        fn tangle_is_unitary_invariant(angles in prop::collection::vec(-3.2f64..3.2, 9)) {
            let unitary = |a: f64, b: f64, g: f64| {
                let (ca, sa) = (a.cos(), a.sin());
                let p = Complex64::from_polar(1.0, b);
                let q = Complex64::from_polar(1.0, g);
                DenseOperator::new(2, 1, vec![c(ca) * p, c(-sa) * q, c(sa) * q.conj(), c(ca) * p.conj()]).unwrap()
            };
            let ilo = IloMatrix::new(angles.chunks(3).map(|a| unitary(a[0], a[1], a[2])).collect()).unwrap();
            for s in [ghz_state("010", false).unwrap(), w_state(4).unwrap(), state(2, &[("000", 1.0), ("111", 0.5), ("011", 0.3)])] {
                let moved = ilo_apply(&s, &ilo).unwrap();
                prop_assert!((three_tangle(&moved).unwrap() - three_tangle(&s).unwrap()).abs() < 1e-10);
                prop_assert!((three_tangle(&moved).unwrap() - tangle_oracle(&moved)).abs() < 1e-10);
            }
        }

        #[test]
        fn ranks_follow_site_permutations(
            amps in prop::collection::vec(-1.0f64..1.0, 16),
            product in any::<bool>(),
            perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
        ) {
            let base: Vec<Complex64> = amps.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
            let s = if product {
                let a = StateVector::new(2, 1, base[..2].to_vec()).unwrap();
                let b = StateVector::new(2, 2, base[2..6].to_vec()).unwrap();
                let rest = StateVector::new(2, 1, base[6..8].to_vec()).unwrap();
                a.kron(&b).unwrap().kron(&rest).unwrap()
            } else {
                let mut full = base.clone();
                full.extend(base.iter().rev().map(|z| z * 0.5));
                StateVector::new(2, 4, full).unwrap()
            };
            prop_assume!(s.norm() > 1e-3);
            let s = s.normalized().unwrap();
            let permuted: Vec<Complex64> = (0..16usize)
                .map(|idx| {
                    let bits: Vec<usize> = (0..4).map(|k| idx >> (3 - k) & 1).collect();
                    let src = (0..4).fold(0, |acc, k| acc | bits[k] << (3 - perm[k]));
                    s.amplitudes()[src]
                })
                .collect();
            let p = StateVector::new(2, 4, permuted).unwrap();
            let r = local_ranks(&s, DEFAULT_RANK_TOL).unwrap();
            let rp = local_ranks(&p, DEFAULT_RANK_TOL).unwrap();
            for k in 0..4 {
                prop_assert_eq!(rp[k], r[perm[k]]);
            }
        }
    }
}
