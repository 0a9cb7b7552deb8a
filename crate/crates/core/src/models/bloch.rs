use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{
    bloch_spectrum, check_point, check_temperature, thermal_tanh, AnalyticQgt, ParamModel,
};
use crate::error::{QgtError, Result};
use crate::linalg::{HermitianOperator, RealMatrix, SpectralDecomposition};

/// Spin-½ in a field of fixed magnitude, `H = B d̂(θ, φ)·σ`.
///
/// The spectrum `±B` does not depend on the parameters, so thermal weights
/// are constant over the whole sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochSphereModel {
    pub field: f64,
}

impl BlochSphereModel {
    pub fn new(field: f64) -> Result<Self> {
        if !(field > 0.0) {
            return Err(QgtError::Domain("field magnitude must be positive".into()));
        }
        Ok(Self { field })
    }

    pub fn d_vector(&self, r: &[f64]) -> [f64; 3] {
        let (theta, phi) = (r[0], r[1]);
        [
            self.field * theta.sin() * phi.cos(),
            self.field * theta.sin() * phi.sin(),
            self.field * theta.cos(),
        ]
    }
}

impl ParamModel for BlochSphereModel {
    fn name(&self) -> &str {
        "bloch"
    }

    fn param_names(&self) -> &[&'static str] {
        &["theta", "phi"]
    }

    fn n_levels(&self) -> usize {
        2
    }

    fn hamiltonian(&self, r: &[f64]) -> Result<HermitianOperator> {
        check_point(self, r)?;
        Ok(HermitianOperator::from_bloch(self.d_vector(r)))
    }

    fn spectrum(&self, r: &[f64]) -> Result<SpectralDecomposition> {
        check_point(self, r)?;
        bloch_spectrum(self.d_vector(r), r)
    }

    fn energy_derivatives(&self, r: &[f64]) -> Option<Result<Vec<Vec<f64>>>> {
        Some(check_point(self, r).map(|_| vec![vec![0.0; 2]; 2]))
    }

    /// `g^FR = 0`, `g^FS = diag(1, sin²θ)/4`, `Ω_θφ = tanh(βB) sin θ / 4`.
    fn analytic_qgt(&self, r: &[f64], t: f64) -> Option<Result<AnalyticQgt>> {
        if let Err(e) = check_point(self, r).and_then(|_| check_temperature(t)) {
            return Some(Err(e));
        }
        let s = r[0].sin();
        let w = thermal_tanh(self.field, t) * s / 4.0;
        Some(Ok(AnalyticQgt {
            g_fr: RealMatrix::zeros(2),
            g_fs: RealMatrix::from_fn(2, |i, j| match (i, j) {
                (0, 0) => 0.25,
                (1, 1) => 0.25 * s * s,
                _ => 0.0,
            }),
            omega: RealMatrix::from_fn(2, |i, j| match (i, j) {
                (0, 1) => w,
                (1, 0) => -w,
                _ => 0.0,
            }),
        }))
    }
}
