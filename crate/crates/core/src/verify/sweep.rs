//! gYBE sweeps over catalog entries.

use rayon::prelude::*;

use super::{gybe_residual, GybeShape, VerificationReport};
use crate::baxter::baxterize_charge;
use crate::catalog::{build, sweep_points, ChargeSpec, Sector};
use crate::error::Result;
use crate::tensor::DEFAULT_TOL;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Spectral constant `c` of the Baxterized R-matrix.
    pub c: f64,
}

impl SweepOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            tol: DEFAULT_TOL,
            c: 1.0,
        }
    }
}

/// gYBE report for one catalog entry at local dimension `d` and padding `l`.
pub fn catalog_gybe_point(
    spec: &ChargeSpec,
    d: usize,
    l: usize,
    opts: &SweepOptions,
) -> Result<VerificationReport> {
    let spec = spec.at_dim(d)?;
    let charge = build(&spec)?;
    let r = baxterize_charge(&charge, Sector::Default, opts.c)?;
    let shape = GybeShape::new(d, spec.m, l)?;
    Ok(gybe_residual(&r, shape, opts.samples, opts.seed)?
        .with_subject(spec.to_string())
        .with_reference(spec.family.base())
        .with_tolerance(opts.tol)
        .flag_uniform_weights())
}

/// One gYBE report per spec and `(d, l)` point of [`sweep_points`], in
/// input order. Every point reuses `opts.seed`, so a report does not
/// depend on which other specs are in the sweep.
pub fn catalog_gybe_sweep(
    specs: &[ChargeSpec],
    opts: &SweepOptions,
) -> Result<Vec<VerificationReport>> {
    let jobs: Vec<(&ChargeSpec, usize, usize)> = specs
        .iter()
        .flat_map(|s| sweep_points(s).into_iter().map(move |(d, l)| (s, d, l)))
        .collect();
    jobs.par_iter()
        .map(|&(s, d, l)| catalog_gybe_point(s, d, l, opts))
        .collect()
}
