use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{
    bloch_energy_derivatives, bloch_spectrum, check_point, check_temperature, thermal_sech2,
    thermal_tanh, AnalyticQgt, ParamModel,
};
use crate::error::{QgtError, Result};
use crate::linalg::{HermitianOperator, RealMatrix, SpectralDecomposition};

/// Massive 2D Dirac fermion, `d(k) = (k_x, k_y, m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracModel {
    pub mass: f64,
}

impl DiracModel {
    pub fn new(mass: f64) -> Self {
        Self { mass }
    }

    pub fn d_vector(&self, r: &[f64]) -> [f64; 3] {
        [r[0], r[1], self.mass]
    }
}

impl ParamModel for DiracModel {
    fn name(&self) -> &str {
        "dirac"
    }

    fn param_names(&self) -> &[&'static str] {
        &["kx", "ky"]
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
        if let Err(e) = check_point(self, r) {
            return Some(Err(e));
        }
        let jac = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        Some(bloch_energy_derivatives(self.d_vector(r), &jac, r))
    }

    fn analytic_qgt(&self, r: &[f64], t: f64) -> Option<Result<AnalyticQgt>> {
        if let Err(e) = check_point(self, r) {
            return Some(Err(e));
        }
        Some(dirac_qgt_analytic(r[0], r[1], self.mass, t))
    }
}

/// Closed-form Dirac tensor.
///
/// `g^FR_ij = β²/(4d²) sech²(βd) d_i d_j`,
/// `g^FS_11 = (d₁²d₃² + d²d₂²) / (4d⁴(d² − d₃²))` (and 1 ↔ 2),
/// `g^FS_12 = −d₁d₂ / (4d⁴)`, `Ω₁₂ = tanh(βd) d₃ / (4d³)`.
///
/// The diagonal Fubini-Study forms are 0/0 at `k = 0`; the oracle declines
/// there and the numeric projector path is authoritative.
pub fn dirac_qgt_analytic(kx: f64, ky: f64, m: f64, t: f64) -> Result<AnalyticQgt> {
    check_temperature(t)?;
    let (d1, d2, d3) = (kx, ky, m);
    let d_sq = d1 * d1 + d2 * d2 + d3 * d3;
    let d = d_sq.sqrt();
    if !(d > 0.0) {
        return Err(QgtError::Degenerate {
            point: alloc::vec![kx, ky],
            gap: 0.0,
        });
    }
    let planar = d_sq - d3 * d3;
    if !(planar > 0.0) {
        return Err(QgtError::Domain(
            "analytic-form-singular: Dirac g^FS_ii forms are 0/0 at k = 0".into(),
        ));
    }
    let comps = [d1, d2];
    let fr_scale = thermal_sech2(d, t) / (4.0 * d_sq);
    let g_fr = RealMatrix::from_fn(2, |i, j| fr_scale * comps[i] * comps[j]);

    let d4 = d_sq * d_sq;
    let fs11 = (d1 * d1 * d3 * d3 + d_sq * d2 * d2) / (4.0 * d4 * planar);
    let fs22 = (d2 * d2 * d3 * d3 + d_sq * d1 * d1) / (4.0 * d4 * planar);
    let fs12 = -d1 * d2 / (4.0 * d4);
    let g_fs = RealMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => fs11,
        (1, 1) => fs22,
        _ => fs12,
    });

    let w = thermal_tanh(d, t) * d3 / (4.0 * d_sq * d);
    let omega = RealMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 1) => w,
        (1, 0) => -w,
        _ => 0.0,
    });
    Ok(AnalyticQgt { g_fr, g_fs, omega })
}
