//! Workloads shared by the `kernels` benchmarks.

use gybe_core::baxter::{baxterize_charge, baxterize_two_param, RMatrixFun, TwoParamKind};
use gybe_core::catalog::{build, ChargeSpec, Sector};
use gybe_core::slocc::w_state_n;
use gybe_core::verify::GybeShape;
use gybe_core::{Result, StateVector};

/// Baxterized catalog charge and the shape it is checked on.
pub fn gybe_workload(spec: &str, l: usize) -> Result<(RMatrixFun, GybeShape)> {
    let spec: ChargeSpec = spec.parse()?;
    let r = baxterize_charge(&build(&spec)?, Sector::Default, 1.0)?;
    Ok((r, GybeShape::new(spec.d, spec.m, l)?))
}

/// Two-parameter nilpotent R-matrix of a catalog charge.
pub fn nybe_workload(spec: &str) -> Result<RMatrixFun> {
    let spec: ChargeSpec = spec.parse()?;
    baxterize_two_param(&build(&spec)?.q, TwoParamKind::Nilpotent)
}

/// Normalized `n`-qubit W state.
pub fn w_workload(n: usize) -> Result<StateVector> {
    w_state_n(n)
}
