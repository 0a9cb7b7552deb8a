//! Parameterized Hamiltonians `R ↦ H(R)` and their closed-form tensors.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{QgtError, Result};
use crate::linalg::{eigh, eigh2, HermitianOperator, RealMatrix, SpectralDecomposition};

pub mod bcs;
mod bloch;
mod dirac;
mod random;
mod ssh;

pub use bcs::{
    bcs_critical_temperature, bcs_qgt_analytic, bcs_solve, BcsModel, BcsSolution, LatticeGrid,
};
pub use bloch::BlochSphereModel;
pub use dirac::{dirac_qgt_analytic, DiracModel};
pub use random::RandomModel;
pub use ssh::{ssh_qgt_analytic, SshModel};

/// Closed-form tensor components at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticQgt {
    pub g_fr: RealMatrix,
    pub g_fs: RealMatrix,
    pub omega: RealMatrix,
}

/// A smooth family of Hermitian Hamiltonians over `k` real parameters.
pub trait ParamModel: Sync {
    fn name(&self) -> &str;

    fn param_names(&self) -> &[&'static str];

    fn n_params(&self) -> usize {
        self.param_names().len()
    }

    /// Hilbert-space dimension N.
    fn n_levels(&self) -> usize;

    fn hamiltonian(&self, r: &[f64]) -> Result<HermitianOperator>;

    fn spectrum(&self, r: &[f64]) -> Result<SpectralDecomposition> {
        eigh(&self.hamiltonian(r)?)
    }

    /// `∂E_n/∂R^μ` indexed `[level][param]`, when the model knows them in closed form.
    fn energy_derivatives(&self, _r: &[f64]) -> Option<Result<Vec<Vec<f64>>>> {
        None
    }

    /// Closed-form `g^FR`, `g^FS`, `Ω` at temperature `t`; `t = 0` is the ground-state limit.
    fn analytic_qgt(&self, _r: &[f64], _t: f64) -> Option<Result<AnalyticQgt>> {
        None
    }
}

pub(crate) fn check_point(model: &(impl ParamModel + ?Sized), r: &[f64]) -> Result<()> {
    if r.len() != model.n_params() {
        return Err(QgtError::Dimension(alloc::format!(
            "{} expects {} parameters, got {}",
            model.name(),
            model.n_params(),
            r.len()
        )));
    }
    Ok(())
}

/// Spectrum of `d·σ`, reporting a gap closing at `r`.
pub(crate) fn bloch_spectrum(d: [f64; 3], r: &[f64]) -> Result<SpectralDecomposition> {
    eigh2(d).map_err(|e| match e {
        QgtError::Degenerate { gap, .. } => QgtError::Degenerate {
            point: r.to_vec(),
            gap,
        },
        other => other,
    })
}

/// `∂E_∓ = ∓ d̂·∂d` for a two-band model given the Jacobian rows `∂_μ d`.
pub(crate) fn bloch_energy_derivatives(
    d: [f64; 3],
    jacobian: &[[f64; 3]],
    r: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if !(norm > 0.0) {
        return Err(QgtError::Degenerate {
            point: r.to_vec(),
            gap: 0.0,
        });
    }
    let dnorm: Vec<f64> = jacobian
        .iter()
        .map(|row| (d[0] * row[0] + d[1] * row[1] + d[2] * row[2]) / norm)
        .collect();
    Ok(alloc::vec![dnorm.iter().map(|x| -x).collect(), dnorm])
}

/// `sech²(x)` without overflow.
pub(crate) fn sech2(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// `β² sech²(βd)` with the `T → 0` limit (zero) at `t = 0`.
pub(crate) fn thermal_sech2(d: f64, t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        sech2(d / t) / (t * t)
    }
}

/// `tanh(βd)` with the `T → 0` limit at `t = 0`.
pub(crate) fn thermal_tanh(d: f64, t: f64) -> f64 {
    if t == 0.0 {
        d.signum()
    } else {
        (d / t).tanh()
    }
}

pub(crate) fn check_temperature(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(QgtError::Domain(alloc::format!(
            "temperature must be non-negative, got {t}"
        )))
    }
}
