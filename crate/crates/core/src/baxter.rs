//! Spectral-parameter-dependent R-matrices `R = I + a(u) E`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::catalog::{extraspecial_generator, ChargeOperator, Sector};
use crate::error::{Error, Result};
use crate::tensor::{embed, frobenius_distance, permutation_op, DenseOperator, DEFAULT_TOL};

/// Denominators smaller than this are treated as poles.
const POLE_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoParamKind {
    /// `1 + (x-y) Q`
    Nilpotent,
    /// `1 + (x-y)/(1-x) H`
    Projector,
    /// `1 + (x-y)/(2-x-y) m`
    Extraspecial,
}

/// Scalar coefficient `a` of the generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralProfile {
    /// `a(u) = c u`
    Linear {
        c: f64,
    },
    /// `a(u) = (e^{cu} - 1)/k`
    ExpProjector {
        c: f64,
        k: f64,
    },
    TwoParam(TwoParamKind),
}

impl SpectralProfile {
    pub fn arity(&self) -> usize {
        match self {
            SpectralProfile::TwoParam(_) => 2,
            _ => 1,
        }
    }

    /// `a(u)` for one-parameter profiles.
    pub fn a(&self, u: Complex64) -> Result<Complex64> {
        match *self {
            SpectralProfile::Linear { c } => Ok(u * c),
            SpectralProfile::ExpProjector { c, k } => Ok(((u * c).exp() - 1.0) / k),
            SpectralProfile::TwoParam(_) => Err(Error::ArityMismatch {
                expected: 2,
                got: 1,
            }),
        }
    }

    /// `a(x, y)` for two-parameter profiles.
    pub fn a2(&self, x: Complex64, y: Complex64) -> Result<Complex64> {
        let pole = |den: Complex64, what: &str| -> Result<Complex64> {
            if den.norm() < POLE_EPS {
                Err(Error::Pole(format!("{what} at x = {x}, y = {y}")))
            } else {
                Ok((x - y) / den)
            }
        };
        match self {
            SpectralProfile::TwoParam(TwoParamKind::Nilpotent) => Ok(x - y),
            SpectralProfile::TwoParam(TwoParamKind::Projector) => pole(1.0 - x, "x = 1"),
            SpectralProfile::TwoParam(TwoParamKind::Extraspecial) => pole(2.0 - x - y, "x + y = 2"),
            _ => Err(Error::ArityMismatch {
                expected: 1,
                got: 2,
            }),
        }
    }
}

impl fmt::Display for SpectralProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralProfile::Linear { c } => write!(f, "linear{{c={c}}}"),
            SpectralProfile::ExpProjector { c, k } => write!(f, "exp{{c={c},k={k}}}"),
            SpectralProfile::TwoParam(TwoParamKind::Nilpotent) => write!(f, "2p-nil"),
            SpectralProfile::TwoParam(TwoParamKind::Projector) => write!(f, "2p-proj"),
            SpectralProfile::TwoParam(TwoParamKind::Extraspecial) => write!(f, "2p-ext"),
        }
    }
}

impl FromStr for SpectralProfile {
    type Err = Error;

    /// Accepts `linear{c=..}`, `exp{c=..,k=..}`, `2p-nil`, `2p-proj`,
    /// `2p-ext`; braces are optional and missing parameters default to 1.
    fn from_str(s: &str) -> Result<Self> {
        let (name, body) = match s.split_once('{') {
            Some((n, rest)) => (
                n,
                rest.strip_suffix('}')
                    .ok_or_else(|| Error::Parse(format!("unterminated profile {s:?}")))?,
            ),
            None => (s, ""),
        };
        let (mut c, mut k) = (1.0, 1.0);
        for item in body.split(',').filter(|t| !t.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in {s:?}")))?;
            let value: f64 = value
                .parse()
                .map_err(|_| Error::Parse(format!("bad number {value:?} in {s:?}")))?;
            match (name, key) {
                ("linear" | "exp", "c") => c = value,
                ("exp", "k") => k = value,
                _ => {
                    return Err(Error::Parse(format!(
                        "unexpected parameter {key:?} in {s:?}"
                    )))
                }
            }
        }
        if !c.is_finite() || !k.is_finite() || k <= 0.0 {
            return Err(Error::Parse(format!(
                "profile parameters out of range in {s:?}"
            )));
        }
        Ok(match name {
            "linear" => SpectralProfile::Linear { c },
            "exp" => SpectralProfile::ExpProjector { c, k },
            "2p-nil" => SpectralProfile::TwoParam(TwoParamKind::Nilpotent),
            "2p-proj" => SpectralProfile::TwoParam(TwoParamKind::Projector),
            "2p-ext" => SpectralProfile::TwoParam(TwoParamKind::Extraspecial),
            _ => return Err(Error::Parse(format!("unknown profile {name:?}"))),
        })
    }
}

impl Serialize for SpectralProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SpectralProfile {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// `R = I + a E` as a function of its spectral parameter(s).
#[derive(Clone, Debug)]
pub struct RMatrixFun {
    generator: DenseOperator,
    profile: SpectralProfile,
}

impl RMatrixFun {
    /// Pairs a generator with a profile without structural checks.
    pub fn new(generator: DenseOperator, profile: SpectralProfile) -> Self {
        Self { generator, profile }
    }

    pub fn generator(&self) -> &DenseOperator {
        &self.generator
    }

    pub fn profile(&self) -> SpectralProfile {
        self.profile
    }

    pub fn arity(&self) -> usize {
        self.profile.arity()
    }

    /// `I + a E` for a given coefficient.
    pub fn with_coefficient(&self, a: Complex64) -> DenseOperator {
        let g = &self.generator;
        let identity = DenseOperator::identity(g.local_dim(), g.sites()).expect("shape is valid");
        &identity + &g.scale(a)
    }

    pub fn eval(&self, u: Complex64) -> Result<DenseOperator> {
        Ok(self.with_coefficient(self.profile.a(u)?))
    }

    pub fn eval_real(&self, u: f64) -> Result<DenseOperator> {
        self.eval(Complex64::new(u, 0.0))
    }

    /// `R(it)` on the imaginary axis.
    pub fn eval_imag(&self, t: f64) -> Result<DenseOperator> {
        self.eval(Complex64::new(0.0, t))
    }

    pub fn eval2(&self, x: Complex64, y: Complex64) -> Result<DenseOperator> {
        Ok(self.with_coefficient(self.profile.a2(x, y)?))
    }
}

fn nilpotency_residual(q: &DenseOperator) -> f64 {
    (q * q).frobenius_norm()
}

fn scale_residual(e: &DenseOperator, k: f64) -> f64 {
    frobenius_distance(&(e * e), &e.scale_real(k)).expect("same shape")
}

/// `R(u) = I + c u Q` for `Q^2 = 0`.
pub fn baxterize_nilpotent(q: &DenseOperator, c: f64) -> Result<RMatrixFun> {
    let residual = nilpotency_residual(q);
    if residual > DEFAULT_TOL {
        return Err(Error::NotNilpotent { residual });
    }
    Ok(RMatrixFun::new(q.clone(), SpectralProfile::Linear { c }))
}

/// `R(u) = I + (e^{cu}-1)/k E` for `E^2 = k E`.
pub fn baxterize_projector(e: &DenseOperator, k: f64, c: f64) -> Result<RMatrixFun> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::NotIdempotent {
            k,
            residual: f64::NAN,
        });
    }
    let residual = scale_residual(e, k);
    if residual > DEFAULT_TOL * (1.0 + k) {
        return Err(Error::NotIdempotent { k, residual });
    }
    Ok(RMatrixFun::new(
        e.clone(),
        SpectralProfile::ExpProjector { c, k },
    ))
}

/// `R(u) = I + c u P` with `P` the swap on two `d`-dimensional sites.
pub fn baxterize_permutation(d: usize, c: f64) -> Result<RMatrixFun> {
    Ok(RMatrixFun::new(
        permutation_op(d)?,
        SpectralProfile::Linear { c },
    ))
}

/// R-matrix from a catalog charge in the requested sector.
pub fn baxterize_charge(charge: &ChargeOperator, sector: Sector, c: f64) -> Result<RMatrixFun> {
    let g = charge.generator(sector)?;
    match g.scale {
        None => baxterize_nilpotent(&g.op, c),
        Some(k) => baxterize_projector(&g.op, k, c),
    }
}

/// `(I + x)/sqrt 2` with `x = i σ^y ⊗ σ^x`.
pub fn bell_matrix() -> DenseOperator {
    let x = extraspecial_generator(2, 2).expect("fixed shape");
    let identity = DenseOperator::identity(2, 2).expect("fixed shape");
    (&identity + &x).scale_real(std::f64::consts::FRAC_1_SQRT_2)
}

/// Residual of `[σ_2 σ_1, σ_1 + σ_2]` with the copies shifted by one site.
pub fn nbraid_residual(sigma: &DenseOperator) -> Result<f64> {
    let n = sigma.sites() + 1;
    let s1 = embed(sigma, 1, n)?;
    let s2 = embed(sigma, 2, n)?;
    let prod = &s2 * &s1;
    let sum = &s1 + &s2;
    Ok(prod.commutator(&sum)?.frobenius_norm())
}

/// Two-parameter R-matrix after checking the generator's relations.
///
/// Nilpotent and projector generators must satisfy the nbraid relation.
/// The extraspecial generator does not (`[m2 m1, m1 + m2] = 2(m1 - m2)`), so
/// for that kind `m^2 = -1` and nearest-neighbour anticommutation are
/// checked instead.
pub fn baxterize_two_param(gen: &DenseOperator, kind: TwoParamKind) -> Result<RMatrixFun> {
    let fail = |relation: &str, residual: f64| -> Result<RMatrixFun> {
        Err(Error::StructuralCondition {
            relation: relation.into(),
            residual,
        })
    };
    match kind {
        TwoParamKind::Nilpotent | TwoParamKind::Projector => {
            let r = nbraid_residual(gen)?;
            if r > DEFAULT_TOL {
                return fail("nbraid", r);
            }
            let (relation, r) = if kind == TwoParamKind::Nilpotent {
                ("nilpotent", nilpotency_residual(gen))
            } else {
                ("idempotent", scale_residual(gen, 1.0))
            };
            if r > DEFAULT_TOL {
                return fail(relation, r);
            }
        }
        TwoParamKind::Extraspecial => {
            let identity = DenseOperator::identity(gen.local_dim(), gen.sites())?;
            let r = frobenius_distance(&(gen * gen), &-&identity)?;
            if r > DEFAULT_TOL {
                return fail("extraspecial_square", r);
            }
            let n = gen.sites() + 1;
            let m1 = embed(gen, 1, n)?;
            let m2 = embed(gen, 2, n)?;
            let r = m1.anticommutator(&m2)?.frobenius_norm();
            if r > DEFAULT_TOL {
                return fail("anticommute", r);
            }
        }
    }
    Ok(RMatrixFun::new(
        gen.clone(),
        SpectralProfile::TwoParam(kind),
    ))
}
