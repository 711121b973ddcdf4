//! Numerical verification of operator identities.
//!
//! Every check produces a [`VerificationReport`]. Randomized checks draw
//! their spectral parameters from a ChaCha8 stream seeded by the caller, so
//! a report is a pure function of its inputs and seed.

mod sparse;
mod sweep;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use sweep::{catalog_gybe_point, catalog_gybe_sweep, SweepOptions};

use crate::baxter::{RMatrixFun, SpectralProfile};
use crate::error::{Error, Result};
use crate::sis::susy_suite;
use crate::tensor::{
    checked_dim, frobenius_distance, kron_all, DenseOperator, DEFAULT_TOL, MAX_DIM,
};
use sparse::SparseOp;

/// `(d, m, l)`: local dimension, window size and identity padding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GybeShape {
    pub d: usize,
    pub m: usize,
    pub l: usize,
}

impl GybeShape {
    pub fn new(d: usize, m: usize, l: usize) -> Result<Self> {
        if d < 2 || m < 2 || l < 1 {
            return Err(Error::InvalidDimension(format!(
                "shape (d,m,l) = ({d},{m},{l}) needs d >= 2, m >= 2, l >= 1"
            )));
        }
        Ok(Self { d, m, l })
    }

    /// Sites of the verification space.
    pub fn sites(&self) -> usize {
        self.m + self.l
    }

    /// Dimension of the verification space, rejecting shapes past the guard.
    pub fn space_dim(&self) -> Result<usize> {
        checked_dim(self.d, self.sites())
    }

    fn check_operand(&self, op: &DenseOperator) -> Result<()> {
        if op.local_dim() != self.d || op.sites() != self.m {
            return Err(Error::ShapeMismatch {
                left: op.shape_label(),
                right: format!("d={} N={}", self.d, self.m),
            });
        }
        Ok(())
    }
}

impl fmt::Display for GybeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.d, self.m, self.l)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    ExpectedFail,
    UnexpectedPass,
}

impl Verdict {
    /// Whether the verdict counts as success for exit status purposes.
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Pass | Verdict::ExpectedFail)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::ExpectedFail => "expected-fail",
            Verdict::UnexpectedPass => "unexpected-pass",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub relation_id: String,
    /// What was checked, usually a charge spec or operator name.
    pub subject: String,
    pub shape: GybeShape,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Parameters at which the largest residual occurred.
    pub witness: BTreeMap<String, f64>,
    /// Family or relation label the check belongs to.
    pub reference: String,
    /// Sampling domain of randomized checks; empty for exact ones.
    pub sampling: String,
    /// `true` when the check is meant to exceed the tolerance.
    pub expect_failure: bool,
    /// Modelling choices the result depends on.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Note attached to checks whose supercharge at `d > 3` uses the uniform
/// weights of [`crate::sis::supercharge`].
pub const UNIFORM_WEIGHTS_NOTE: &str = "uniform supercharge weights for d > 3";

fn verdict_for(residual: f64, tolerance: f64, expect_failure: bool) -> Verdict {
    let within = residual <= tolerance;
    match (within, expect_failure) {
        (true, false) => Verdict::Pass,
        (false, false) => Verdict::Fail,
        (false, true) => Verdict::ExpectedFail,
        (true, true) => Verdict::UnexpectedPass,
    }
}

/// Orders residuals so that NaN counts as the worst.
fn residual_key(r: f64) -> f64 {
    if r.is_nan() {
        f64::INFINITY
    } else {
        r
    }
}

fn witness_key(w: &BTreeMap<String, f64>) -> Vec<(&str, u64)> {
    w.iter().map(|(k, v)| (k.as_str(), v.to_bits())).collect()
}

impl VerificationReport {
    pub fn new(
        relation_id: impl Into<String>,
        shape: GybeShape,
        samples: usize,
        max_residual: f64,
        witness: BTreeMap<String, f64>,
    ) -> Self {
        let relation_id = relation_id.into();
        Self {
            reference: relation_id.clone(),
            relation_id,
            subject: String::new(),
            shape,
            samples,
            max_residual,
            tolerance: DEFAULT_TOL,
            verdict: verdict_for(max_residual, DEFAULT_TOL, false),
            witness,
            sampling: String::new(),
            expect_failure: false,
            notes: Vec::new(),
        }
    }

    fn refresh(mut self) -> Self {
        self.verdict = verdict_for(self.max_residual, self.tolerance, self.expect_failure);
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.refresh()
    }

    pub fn with_subject(mut self, subject: impl Into<String>) -> Self {
        self.subject = subject.into();
        self
    }

    pub fn with_reference(mut self, reference: impl Into<String>) -> Self {
        self.reference = reference.into();
        self
    }

    pub fn with_sampling(mut self, sampling: impl Into<String>) -> Self {
        self.sampling = sampling.into();
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        if !self.notes.contains(&note) {
            self.notes.push(note);
        }
        self
    }

    /// Adds [`UNIFORM_WEIGHTS_NOTE`] when the local dimension exceeds 3.
    pub fn flag_uniform_weights(self) -> Self {
        if self.shape.d > 3 {
            self.with_note(UNIFORM_WEIGHTS_NOTE)
        } else {
            self
        }
    }

    /// Marks the check as one that must exceed the tolerance.
    pub fn expecting_failure(mut self) -> Self {
        self.expect_failure = true;
        self.refresh()
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_ok()
    }

    /// Combines two runs of the same check. Sample counts add up and the
    /// larger residual wins; equal residuals are broken by comparing the
    /// witnesses, so the result does not depend on argument order.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        let same = self.relation_id == other.relation_id
            && self.subject == other.subject
            && self.shape == other.shape
            && self.tolerance.to_bits() == other.tolerance.to_bits()
            && self.reference == other.reference
            && self.sampling == other.sampling
            && self.expect_failure == other.expect_failure
            && self.notes == other.notes;
        if !same {
            return Err(Error::Inapplicable {
                relation: "merge".into(),
                reason: format!(
                    "reports differ: {} {} {} vs {} {} {}",
                    self.relation_id,
                    self.subject,
                    self.shape,
                    other.relation_id,
                    other.subject,
                    other.shape
                ),
            });
        }
        let (a, b) = (
            residual_key(self.max_residual),
            residual_key(other.max_residual),
        );
        let winner = match a.total_cmp(&b) {
            std::cmp::Ordering::Greater => self,
            std::cmp::Ordering::Less => other,
            std::cmp::Ordering::Equal => {
                if witness_key(&self.witness) <= witness_key(&other.witness) {
                    self
                } else {
                    other
                }
            }
        };
        let mut out = winner.clone();
        out.samples = self.samples + other.samples;
        Ok(out.refresh())
    }
}

/// Relation templates checked on embedded operands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Gybe,
    Braid,
    FarCommutativity,
    Commute,
    TripleZero,
    Ql,
    Nbraid,
    CommutingProjector,
    Nilpotent,
    Idempotent,
    ExtraspecialSquare,
    ExtraspecialCube,
    Anticommute,
    BraidProportional,
    Sissusy,
    Witten,
    SusyAlgebra,
    Unitarity,
    Periodicity,
    Nybe,
}

impl Relation {
    pub const ALL: [Relation; 20] = [
        Relation::Gybe,
        Relation::Braid,
        Relation::FarCommutativity,
        Relation::Commute,
        Relation::TripleZero,
        Relation::Ql,
        Relation::Nbraid,
        Relation::CommutingProjector,
        Relation::Nilpotent,
        Relation::Idempotent,
        Relation::ExtraspecialSquare,
        Relation::ExtraspecialCube,
        Relation::Anticommute,
        Relation::BraidProportional,
        Relation::Sissusy,
        Relation::Witten,
        Relation::SusyAlgebra,
        Relation::Unitarity,
        Relation::Periodicity,
        Relation::Nybe,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Relation::Gybe => "gybe",
            Relation::Braid => "braid",
            Relation::FarCommutativity => "far_commutativity",
            Relation::Commute => "commute",
            Relation::TripleZero => "triple_zero",
            Relation::Ql => "ql",
            Relation::Nbraid => "nbraid",
            Relation::CommutingProjector => "commuting_projector",
            Relation::Nilpotent => "nilpotent",
            Relation::Idempotent => "idempotent",
            Relation::ExtraspecialSquare => "extraspecial_square",
            Relation::ExtraspecialCube => "extraspecial_cube",
            Relation::Anticommute => "anticommute",
            Relation::BraidProportional => "braid_proportional",
            Relation::Sissusy => "sissusy",
            Relation::Witten => "witten",
            Relation::SusyAlgebra => "susy_algebra",
            Relation::Unitarity => "unitarity",
            Relation::Periodicity => "periodicity",
            Relation::Nybe => "nybe",
        }
    }

    /// Number of operands taken by [`relation_residual`].
    pub fn arity(&self) -> usize {
        match self {
            Relation::Sissusy | Relation::Witten | Relation::SusyAlgebra => 0,
            Relation::BraidProportional => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "_");
        Relation::ALL
            .into_iter()
            .find(|r| r.as_str() == key)
            .ok_or_else(|| Error::Parse(format!("unknown relation {s:?}")))
    }
}

fn witness(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn susy_subset(d: usize, names: &[&str]) -> Result<f64> {
    let suite = susy_suite(d)?;
    Ok(suite
        .relation_residuals()
        .into_iter()
        .filter(|(n, _)| names.contains(n))
        .map(|(_, r)| r)
        .fold(0.0, f64::max))
}

/// Evaluates a relation template on embedded operands.
///
/// One-operand templates place the operand at sites `1` and `1 + l` of an
/// `m + l` site chain. `braid_proportional` takes `[R, x]` and fits
/// `R1 R2 R1` and `R2 R1 R2` to multiples of `x1 + x2`; the fitted
/// constants are reported in the witness.
pub fn relation_residual(
    relation: Relation,
    operands: &[DenseOperator],
    shape: GybeShape,
) -> Result<VerificationReport> {
    if operands.len() != relation.arity() {
        return Err(Error::Inapplicable {
            relation: relation.to_string(),
            reason: format!(
                "takes {} operands, got {}",
                relation.arity(),
                operands.len()
            ),
        });
    }
    for op in operands {
        shape.check_operand(op)?;
    }
    let report = |residual: f64, w: BTreeMap<String, f64>| {
        Ok(VerificationReport::new(
            relation.as_str(),
            shape,
            1,
            residual,
            w,
        ))
    };
    let (m, l, n) = (shape.m, shape.l, shape.sites());
    let pair = |op: &DenseOperator| -> Result<(SparseOp, SparseOp)> {
        shape.space_dim()?;
        Ok((
            SparseOp::embedded(op, 1, n)?,
            SparseOp::embedded(op, 1 + l, n)?,
        ))
    };
    let inapplicable = |reason: &str| {
        Err(Error::Inapplicable {
            relation: relation.to_string(),
            reason: reason.into(),
        })
    };
    match relation {
        Relation::Braid | Relation::Ql => {
            let (a1, a2) = pair(&operands[0])?;
            let lhs = a1.matmul(&a2).matmul(&a1);
            let rhs = a2.matmul(&a1).matmul(&a2);
            report(lhs.distance(&rhs), BTreeMap::new())
        }
        Relation::FarCommutativity | Relation::Commute | Relation::Anticommute => {
            if relation == Relation::FarCommutativity && l < m {
                return inapplicable("supports overlap for l < m");
            }
            if relation == Relation::Anticommute && l >= m {
                return inapplicable("supports are disjoint for l >= m");
            }
            let (a1, a2) = pair(&operands[0])?;
            let (p, q) = (a1.matmul(&a2), a2.matmul(&a1));
            let r = if relation == Relation::Anticommute {
                p.add(&q).norm()
            } else {
                p.distance(&q)
            };
            report(r, BTreeMap::new())
        }
        Relation::TripleZero => {
            let (a1, a2) = pair(&operands[0])?;
            let r1 = a1.matmul(&a2).matmul(&a1).norm();
            let r2 = a2.matmul(&a1).matmul(&a2).norm();
            report(r1.max(r2), witness(&[("lhs", r1), ("rhs", r2)]))
        }
        Relation::Nbraid => {
            let (a1, a2) = pair(&operands[0])?;
            let prod = a2.matmul(&a1);
            let sum = a1.add(&a2);
            report(
                prod.matmul(&sum).distance(&sum.matmul(&prod)),
                BTreeMap::new(),
            )
        }
        Relation::CommutingProjector => {
            let (b1, b2) = pair(&operands[0])?;
            let b12 = b1.matmul(&b2);
            let r1 = b12.matmul(&b1).distance(&b12);
            let r2 = b2.matmul(&b1).matmul(&b2).distance(&b12);
            report(r1.max(r2), BTreeMap::new())
        }
        Relation::Nilpotent => {
            let a = &operands[0];
            report((a * a).frobenius_norm(), BTreeMap::new())
        }
        Relation::Idempotent => {
            let a = &operands[0];
            report(frobenius_distance(&(a * a), a)?, BTreeMap::new())
        }
        Relation::ExtraspecialSquare | Relation::ExtraspecialCube => {
            let x = &operands[0];
            let x2 = x * x;
            let r = if relation == Relation::ExtraspecialSquare {
                let suite = susy_suite(shape.d)?;
                let hs = kron_all(std::iter::repeat_n(&suite.h, m))?;
                frobenius_distance(&x2, &-&hs)?
            } else {
                (&(&x2 * x) + x).frobenius_norm()
            };
            report(r, BTreeMap::new())
        }
        Relation::BraidProportional => {
            let (r1, r2) = pair(&operands[0])?;
            let (x1, x2) = pair(&operands[1])?;
            let target = x1.add(&x2);
            let tt = target.inner(&target);
            if tt.norm() == 0.0 {
                return inapplicable("x1 + x2 vanishes");
            }
            let lhs = r1.matmul(&r2).matmul(&r1);
            let rhs = r2.matmul(&r1).matmul(&r2);
            let l1 = target.inner(&lhs) / tt;
            let l2 = target.inner(&rhs) / tt;
            let fit = lhs
                .distance(&target.scale(l1))
                .max(rhs.distance(&target.scale(l2)))
                .max((l1 - l2).norm());
            report(
                fit,
                witness(&[
                    ("lambda_lhs_re", l1.re),
                    ("lambda_lhs_im", l1.im),
                    ("lambda_rhs_re", l2.re),
                    ("lambda_rhs_im", l2.im),
                ]),
            )
        }
        Relation::Sissusy => report(
            susy_subset(
                shape.d,
                &[
                    "h^2=h", "b^2=b", "f^2=f", "bq=q", "qf=q", "qd b=qd", "f qd=qd", "bf=0", "fb=0",
                ],
            )?,
            BTreeMap::new(),
        )
        .map(VerificationReport::flag_uniform_weights),
        Relation::Witten => report(
            susy_subset(
                shape.d,
                &[
                    "w^2=1", "{q,w}=0", "{qd,w}=0", "wq=-q", "qw=q", "qd w=-qd", "w qd=qd",
                ],
            )?,
            BTreeMap::new(),
        )
        .map(VerificationReport::flag_uniform_weights),
        Relation::SusyAlgebra => report(
            susy_subset(
                shape.d,
                &["q^2=0", "qd^2=0", "{q,qd}=h", "[h,q]=0", "[h,qd]=0"],
            )?,
            BTreeMap::new(),
        )
        .map(VerificationReport::flag_uniform_weights),
        Relation::Gybe | Relation::Unitarity | Relation::Periodicity | Relation::Nybe => {
            inapplicable("needs an R-matrix function and samples")
        }
    }
}

const LINEAR_RANGE: f64 = 2.0;
const TWO_PARAM_RANGE: f64 = 0.5;

fn worst<T: Send>(items: Vec<(f64, T)>) -> (f64, T) {
    // The first index among equal residuals wins so the result does not
    // depend on scheduling.
    items
        .into_iter()
        .enumerate()
        .max_by(|(i, (a, _)), (j, (b, _))| {
            residual_key(*a).total_cmp(&residual_key(*b)).then(j.cmp(i))
        })
        .map(|(_, x)| x)
        .expect("at least one sample")
}

fn check_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidDimension(
            "at least one sample is required".into(),
        ));
    }
    Ok(())
}

fn shape_of_generator(r: &RMatrixFun, l: usize) -> Result<GybeShape> {
    let g = r.generator();
    GybeShape::new(g.local_dim(), g.sites(), l)
}

/// Residual of the spectral-parameter gYBE
/// `R1(u) R2(u+v) R1(v) = R2(v) R1(u+v) R2(u)`, with `R1 = R ⊗ I^l` and
/// `R2 = I^l ⊗ R`.
///
/// Linear profiles draw real `u, v` uniformly from `[-2, 2]`; exponential
/// profiles draw `u = it`, `v = is` with `t, s` uniform in `[0, 2π]`.
pub fn gybe_residual(
    r: &RMatrixFun,
    shape: GybeShape,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    check_samples(samples)?;
    shape.check_operand(r.generator())?;
    if r.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: r.arity(),
        });
    }
    let dim = shape.space_dim()?;
    if dim > MAX_DIM {
        return Err(Error::DimensionGuard {
            dim,
            limit: MAX_DIM,
        });
    }
    let imaginary = matches!(r.profile(), SpectralProfile::ExpProjector { .. });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<(f64, f64)> = (0..samples)
        .map(|_| {
            if imaginary {
                (
                    rng.random_range(0.0..2.0 * PI),
                    rng.random_range(0.0..2.0 * PI),
                )
            } else {
                (
                    rng.random_range(-LINEAR_RANGE..LINEAR_RANGE),
                    rng.random_range(-LINEAR_RANGE..LINEAR_RANGE),
                )
            }
        })
        .collect();
    let n = shape.sites();
    let g1 = SparseOp::embedded(r.generator(), 1, n)?;
    let g2 = SparseOp::embedded(r.generator(), 1 + shape.l, n)?;
    let lift = |x: f64| {
        if imaginary {
            Complex64::new(0.0, x)
        } else {
            Complex64::new(x, 0.0)
        }
    };
    let profile = r.profile();
    let results: Vec<(f64, (f64, f64))> = params
        .par_iter()
        .map(|&(p, q)| {
            let (u, v) = (lift(p), lift(q));
            let a_u = profile.a(u).expect("one-parameter profile");
            let a_v = profile.a(v).expect("one-parameter profile");
            let a_uv = profile.a(u + v).expect("one-parameter profile");
            let lhs = g1
                .identity_plus(a_u)
                .matmul(&g2.identity_plus(a_uv))
                .matmul(&g1.identity_plus(a_v));
            let rhs = g2
                .identity_plus(a_v)
                .matmul(&g1.identity_plus(a_uv))
                .matmul(&g2.identity_plus(a_u));
            (lhs.distance(&rhs), (p, q))
        })
        .collect();
    let (residual, (p, q)) = worst(results);
    let (keys, sampling) = if imaginary {
        (("t", "s"), "u=it, v=is; t,s uniform in [0, 2pi]")
    } else {
        (("u", "v"), "u,v uniform real in [-2, 2]")
    };
    Ok(VerificationReport::new(
        Relation::Gybe.as_str(),
        shape,
        samples,
        residual,
        witness(&[(keys.0, p), (keys.1, q)]),
    )
    .with_sampling(sampling))
}

/// `max_t ||R(it)† R(it) - I||` together with the reversed product, over
/// `t` uniform in `[0, 2π]`.
///
/// `R(it)†` is the adjoint of the evaluated matrix, which for real `c` is
/// the function adjoint `R†(-u)` at `u = it`.
pub fn unitarity_residual(r: &RMatrixFun, samples: usize, seed: u64) -> Result<VerificationReport> {
    check_samples(samples)?;
    if r.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: r.arity(),
        });
    }
    let shape = shape_of_generator(r, 1)?;
    let g = r.generator();
    let identity = DenseOperator::identity(g.local_dim(), g.sites())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ts: Vec<f64> = (0..samples)
        .map(|_| rng.random_range(0.0..2.0 * PI))
        .collect();
    let results = ts
        .iter()
        .map(|&t| -> Result<(f64, f64)> {
            let rt = r.eval_imag(t)?;
            let rd = rt.adjoint();
            let a = frobenius_distance(&(&rd * &rt), &identity)?;
            let b = frobenius_distance(&(&rt * &rd), &identity)?;
            Ok((a.max(b), t))
        })
        .collect::<Result<Vec<_>>>()?;
    let (residual, t) = worst(results);
    Ok(VerificationReport::new(
        Relation::Unitarity.as_str(),
        shape,
        samples,
        residual,
        witness(&[("t", t)]),
    )
    .with_sampling("t uniform in [0, 2pi]"))
}

/// Times `0.1, 0.7, 2.3` followed by `samples` draws uniform in `[0, 2π]`.
pub fn periodicity_times(samples: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ts = vec![0.1, 0.7, 2.3];
    ts.extend((0..samples).map(|_| rng.random_range(0.0..2.0 * PI)));
    ts
}

/// `max_t ||R(i(t+T)) - R(it)||` with `T = 2π/c`, together with
/// `||R(iT) - I||`.
pub fn periodicity_residual(r: &RMatrixFun, ts: &[f64]) -> Result<VerificationReport> {
    let SpectralProfile::ExpProjector { c, .. } = r.profile() else {
        return Err(Error::KindMismatch {
            expected: "exp profile".into(),
            got: r.profile().to_string(),
        });
    };
    if c == 0.0 {
        return Err(Error::Inapplicable {
            relation: Relation::Periodicity.to_string(),
            reason: "c = 0 has no period".into(),
        });
    }
    let period = 2.0 * PI / c.abs();
    let shape = shape_of_generator(r, 1)?;
    let g = r.generator();
    let identity = DenseOperator::identity(g.local_dim(), g.sites())?;
    let mut results = vec![(
        frobenius_distance(&r.eval_imag(period)?, &identity)?,
        period,
    )];
    for &t in ts {
        let shifted = r.eval_imag(t + period)?;
        results.push((frobenius_distance(&shifted, &r.eval_imag(t)?)?, t));
    }
    let samples = results.len();
    let (residual, t) = worst(results);
    Ok(VerificationReport::new(
        Relation::Periodicity.as_str(),
        shape,
        samples,
        residual,
        witness(&[("t", t), ("period", period)]),
    ))
}

/// Residual of `Ř1(x,y) Ř2(x,z) Ř1(y,z) = Ř2(y,z) Ř1(x,z) Ř2(x,y)` with
/// the copies shifted by one site, `x, y, z` uniform in `[-0.5, 0.5]`.
pub fn nybe_residual(r: &RMatrixFun, samples: usize, seed: u64) -> Result<VerificationReport> {
    check_samples(samples)?;
    if r.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            got: r.arity(),
        });
    }
    let shape = shape_of_generator(r, 1)?;
    shape.space_dim()?;
    let n = shape.sites();
    let g1 = SparseOp::embedded(r.generator(), 1, n)?;
    let g2 = SparseOp::embedded(r.generator(), 2, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let triples: Vec<[f64; 3]> = (0..samples)
        .map(|_| std::array::from_fn(|_| rng.random_range(-TWO_PARAM_RANGE..TWO_PARAM_RANGE)))
        .collect();
    let profile = r.profile();
    let results = triples
        .par_iter()
        .map(|&[x, y, z]| -> Result<(f64, [f64; 3])> {
            let c = |v: f64| Complex64::new(v, 0.0);
            let a = |p: f64, q: f64| profile.a2(c(p), c(q));
            let lhs = g1
                .identity_plus(a(x, y)?)
                .matmul(&g2.identity_plus(a(x, z)?))
                .matmul(&g1.identity_plus(a(y, z)?));
            let rhs = g2
                .identity_plus(a(y, z)?)
                .matmul(&g1.identity_plus(a(x, z)?))
                .matmul(&g2.identity_plus(a(x, y)?));
            Ok((lhs.distance(&rhs), [x, y, z]))
        })
        .collect::<Result<Vec<_>>>()?;
    let (residual, [x, y, z]) = worst(results);
    Ok(VerificationReport::new(
        Relation::Nybe.as_str(),
        shape,
        samples,
        residual,
        witness(&[("x", x), ("y", y), ("z", z)]),
    )
    .with_sampling("x,y,z uniform real in [-0.5, 0.5]"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn susy_reports_flag_uniform_weights_above_qutrits() {
        for d in 2..=6 {
            let r = relation_residual(Relation::SusyAlgebra, &[], GybeShape::new(d, 2, 1).unwrap())
                .unwrap();
            assert!(r.passed());
            assert_eq!(
                r.notes.iter().any(|n| n == UNIFORM_WEIGHTS_NOTE),
                d > 3,
                "d={d}"
            );
        }
    }
    use crate::baxter::{
        baxterize_charge, baxterize_nilpotent, baxterize_permutation, baxterize_two_param,
        bell_matrix, TwoParamKind,
    };
    use crate::catalog::{build, extraspecial_generator, ChargeOperator, Sector};
    use crate::tensor::embed;

    fn charge(s: &str) -> ChargeOperator {
        build(&s.parse().unwrap()).unwrap()
    }

    fn shape(d: usize, m: usize, l: usize) -> GybeShape {
        GybeShape::new(d, m, l).unwrap()
    }

    /// Dense reference for the gYBE at one parameter pair.
    fn dense_gybe(r: &RMatrixFun, l: usize, u: Complex64, v: Complex64) -> f64 {
        let m = r.generator().sites();
        let n = m + l;
        let e = |op: &DenseOperator, s: usize| embed(op, s, n).unwrap();
        let (ru, rv, ruv) = (
            r.eval(u).unwrap(),
            r.eval(v).unwrap(),
            r.eval(u + v).unwrap(),
        );
        let lhs = &(&e(&ru, 1) * &e(&ruv, 1 + l)) * &e(&rv, 1);
        let rhs = &(&e(&rv, 1 + l) * &e(&ruv, 1)) * &e(&ru, 1 + l);
        frobenius_distance(&lhs, &rhs).unwrap()
    }

    #[test]
    fn gybe_examples() {
        let r = baxterize_nilpotent(&charge("schoices.3@d2m2").q, 1.0).unwrap();
        let rep = gybe_residual(&r, shape(2, 2, 1), 16, 1).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{rep:?}");
        assert_eq!(rep.samples, 16);

        let zero = baxterize_nilpotent(&charge("schoices.3@d2m2").q, 0.0).unwrap();
        assert_eq!(
            gybe_residual(&zero, shape(2, 2, 1), 4, 1)
                .unwrap()
                .max_residual,
            0.0
        );

        let uq1 = baxterize_charge(&charge("uq1@d2m2"), Sector::Default, 1.0).unwrap();
        let rep = gybe_residual(&uq1, shape(2, 2, 2), 16, 3).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
        assert!(rep.witness.contains_key("t"));

        assert!(gybe_residual(&uq1, shape(3, 2, 2), 4, 3).is_err());
        assert!(matches!(
            gybe_residual(&uq1, shape(2, 2, 11), 1, 0),
            Err(Error::DimensionGuard { .. })
        ));
    }

    #[test]
    fn sparse_gybe_agrees_with_dense() {
        let r = baxterize_charge(&charge("uq1@d2m2"), Sector::Default, 1.0).unwrap();
        // l = 1 overlaps the supports, so the residual is a genuine number
        let rep = gybe_residual(&r, shape(2, 2, 1), 1, 11).unwrap();
        let t = rep.witness["t"];
        let s = rep.witness["s"];
        let dense = dense_gybe(&r, 1, Complex64::new(0.0, t), Complex64::new(0.0, s));
        assert!(dense > 1e-3);
        assert!((rep.max_residual - dense).abs() < 1e-12);
    }

    #[test]
    fn gybe_is_deterministic() {
        let r = baxterize_nilpotent(&charge("qw.1@d2m3").q, 1.0).unwrap();
        let a = gybe_residual(&r, shape(2, 3, 1), 8, 42).unwrap();
        let b = gybe_residual(&r, shape(2, 3, 1), 8, 42).unwrap();
        assert_eq!(a, b);
        let c = gybe_residual(&r, shape(2, 3, 1), 8, 43).unwrap();
        assert_ne!(a.witness, c.witness);
    }

    #[test]
    fn permutation_solves_braided_ybe() {
        for d in 2..=3 {
            let r = baxterize_permutation(d, 0.8).unwrap();
            let rep = gybe_residual(&r, shape(d, 2, 1), 16, 5).unwrap();
            assert!(rep.max_residual < 1e-10, "{rep:?}");
        }
    }

    #[test]
    fn relation_examples() {
        let ghz = charge("qghz.1@d2m3").q;
        let rep = relation_residual(Relation::TripleZero, &[ghz], shape(2, 3, 1)).unwrap();
        assert_eq!(rep.max_residual, 0.0);

        let (b, _) = charge("uq3@d2m3").projectors();
        let rep = relation_residual(Relation::CommutingProjector, &[b], shape(2, 3, 3)).unwrap();
        assert!(rep.max_residual < 1e-12);

        let h = charge("lowl.qq@d2m2").hamiltonian();
        let rep = relation_residual(Relation::Nbraid, &[h], shape(2, 2, 1)).unwrap();
        assert!(rep.max_residual < 1e-12);

        for d in 2..=6 {
            for rel in [Relation::Sissusy, Relation::Witten, Relation::SusyAlgebra] {
                assert!(
                    relation_residual(rel, &[], shape(d, 2, 1))
                        .unwrap()
                        .max_residual
                        < 1e-12
                );
            }
        }
    }

    #[test]
    fn relation_errors() {
        let q = charge("schoices.3@d2m2").q;
        assert!(matches!(
            relation_residual(Relation::FarCommutativity, &[q.clone()], shape(2, 2, 1)),
            Err(Error::Inapplicable { .. })
        ));
        assert!(matches!(
            relation_residual(Relation::Braid, &[q.clone()], shape(2, 3, 1)),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(relation_residual(Relation::Braid, &[], shape(2, 2, 1)).is_err());
        assert!(relation_residual(Relation::Gybe, &[q], shape(2, 2, 1)).is_err());
        assert!("nosuch".parse::<Relation>().is_err());
        for rel in Relation::ALL {
            assert_eq!(rel.as_str().parse::<Relation>().unwrap(), rel);
        }
    }

    #[test]
    fn bell_braid_and_proportionality() {
        let r = bell_matrix();
        let x = extraspecial_generator(2, 2).unwrap();
        let s = shape(2, 2, 1);
        assert!(
            relation_residual(Relation::Braid, &[r.clone()], s)
                .unwrap()
                .max_residual
                < 1e-12
        );
        let rep = relation_residual(Relation::BraidProportional, &[r, x], s).unwrap();
        assert!(rep.max_residual < 1e-12);
        assert!((rep.witness["lambda_lhs_re"] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn unitarity_examples() {
        let uq1 = baxterize_charge(&charge("uq1@d2m2"), Sector::Default, 1.0).unwrap();
        assert_eq!(
            unitarity_residual(&uq1, 8, 2).unwrap().verdict,
            Verdict::Pass
        );

        let nil = baxterize_nilpotent(&charge("schoices.3@d2m2").q, 1.0).unwrap();
        let rep = unitarity_residual(&nil, 8, 2).unwrap().expecting_failure();
        assert_eq!(rep.verdict, Verdict::ExpectedFail);
        assert!(rep.passed());
        let at_one = nil.eval_imag(1.0).unwrap();
        let id = DenseOperator::identity(2, 2).unwrap();
        assert!(frobenius_distance(&(&at_one.adjoint() * &at_one), &id).unwrap() > 0.1);

        let trivial = baxterize_nilpotent(&charge("schoices.3@d2m2").q, 0.0).unwrap();
        assert_eq!(
            unitarity_residual(&trivial, 4, 2).unwrap().max_residual,
            0.0
        );
    }

    #[test]
    fn periodicity_examples() {
        let g = charge("uq1@d2m2").generator(Sector::Bosonic).unwrap();
        let r = crate::baxter::baxterize_projector(&g.op, 1.0, 1.0).unwrap();
        let rep = periodicity_residual(&r, &[0.1, 0.7, 2.3]).unwrap();
        assert!(rep.max_residual < 1e-10);
        assert!((rep.witness["period"] - 2.0 * PI).abs() < 1e-15);
        let r2 = crate::baxter::baxterize_projector(&g.op, 1.0, 2.0).unwrap();
        let rep = periodicity_residual(&r2, &[0.1]).unwrap();
        assert!((rep.witness["period"] - PI).abs() < 1e-15);
        assert!(rep.max_residual < 1e-10);
        let nil = baxterize_nilpotent(&charge("schoices.3@d2m2").q, 1.0).unwrap();
        assert!(matches!(
            periodicity_residual(&nil, &[0.1]),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn nybe_examples() {
        let qq =
            baxterize_two_param(&charge("schoices.3@d2m2").q, TwoParamKind::Nilpotent).unwrap();
        assert!(nybe_residual(&qq, 8, 9).unwrap().max_residual < 1e-10);
        let ext = baxterize_two_param(
            &extraspecial_generator(2, 2).unwrap(),
            TwoParamKind::Extraspecial,
        )
        .unwrap();
        assert!(nybe_residual(&ext, 8, 9).unwrap().max_residual < 1e-10);
        let nil = baxterize_nilpotent(&charge("schoices.3@d2m2").q, 1.0).unwrap();
        assert!(matches!(
            nybe_residual(&nil, 8, 9),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn merge_is_order_independent() {
        let r = baxterize_nilpotent(&charge("qw.1@d2m3").q, 1.0).unwrap();
        let parts: Vec<_> = (0..4)
            .map(|s| {
                gybe_residual(&r, shape(2, 3, 1), 4, s)
                    .unwrap()
                    .with_subject("qw.1")
            })
            .collect();
        let fwd = parts
            .iter()
            .skip(1)
            .fold(parts[0].clone(), |acc, p| acc.merge(p).unwrap());
        let rev = parts
            .iter()
            .rev()
            .skip(1)
            .fold(parts[3].clone(), |acc, p| acc.merge(p).unwrap());
        assert_eq!(fwd, rev);
        assert_eq!(fwd.samples, 16);
        let other = parts[0].clone().with_subject("other");
        assert!(parts[0].merge(&other).is_err());
    }

    #[test]
    fn report_json_schema() {
        let r = baxterize_nilpotent(&charge("schoices.3@d2m2").q, 1.0).unwrap();
        let rep = gybe_residual(&r, shape(2, 2, 1), 2, 0).unwrap();
        let v: serde_json::Value = serde_json::to_value(&rep).unwrap();
        for key in [
            "relation_id",
            "shape",
            "samples",
            "max_residual",
            "tolerance",
            "verdict",
            "witness",
            "reference",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["shape"], serde_json::json!({"d": 2, "m": 2, "l": 1}));
        assert_eq!(v["verdict"], "pass");
        let back: VerificationReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, rep);
    }
    #[test]
    fn qutrit_braid_operator_is_not_invertible() {
        let suite = susy_suite(3).unwrap();
        let hh = suite.h.kron(&suite.h).unwrap();
        let b = (&hh + &extraspecial_generator(2, 3).unwrap()).scale_real(0.5);
        let report = relation_residual(
            Relation::Braid,
            &[b.clone()],
            GybeShape::new(3, 2, 1).unwrap(),
        )
        .unwrap();
        assert!(report.max_residual < 1e-12, "{report:?}");
        assert!(b.rank(1e-10) < b.dim());
    }
}
