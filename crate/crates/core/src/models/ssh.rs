use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{
    bloch_energy_derivatives, bloch_spectrum, check_point, check_temperature, thermal_sech2,
    AnalyticQgt, ParamModel,
};
use crate::error::{QgtError, Result};
use crate::linalg::{HermitianOperator, RealMatrix, SpectralDecomposition};

/// Su-Schrieffer-Heeger chain in momentum space, `d(k) = (−J₁ − J₂ cos k, J₂ sin k, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SshModel {
    pub j1: f64,
    pub j2: f64,
}

impl SshModel {
    pub fn new(j1: f64, j2: f64) -> Result<Self> {
        if !(j1 > 0.0 && j2 > 0.0) {
            return Err(QgtError::Domain(alloc::format!(
                "SSH hoppings must be positive, got J1={j1}, J2={j2}"
            )));
        }
        Ok(Self { j1, j2 })
    }

    pub fn ratio(&self) -> f64 {
        self.j1 / self.j2
    }

    pub fn d_vector(&self, k: f64) -> [f64; 3] {
        [-self.j1 - self.j2 * k.cos(), self.j2 * k.sin(), 0.0]
    }

    /// `R̃ = √(1 + r² + 2r cos k)`, so that `E_± = ±J₂ R̃`.
    pub fn reduced_gap(&self, k: f64) -> f64 {
        let r = self.ratio();
        (1.0 + r * r + 2.0 * r * k.cos()).max(0.0).sqrt()
    }
}

impl ParamModel for SshModel {
    fn name(&self) -> &str {
        "ssh"
    }

    fn param_names(&self) -> &[&'static str] {
        &["k"]
    }

    fn n_levels(&self) -> usize {
        2
    }

    fn hamiltonian(&self, r: &[f64]) -> Result<HermitianOperator> {
        check_point(self, r)?;
        Ok(HermitianOperator::from_bloch(self.d_vector(r[0])))
    }

    fn spectrum(&self, r: &[f64]) -> Result<SpectralDecomposition> {
        check_point(self, r)?;
        bloch_spectrum(self.d_vector(r[0]), r)
    }

    fn energy_derivatives(&self, r: &[f64]) -> Option<Result<Vec<Vec<f64>>>> {
        if let Err(e) = check_point(self, r) {
            return Some(Err(e));
        }
        let k = r[0];
        let jac = [[self.j2 * k.sin(), self.j2 * k.cos(), 0.0]];
        Some(bloch_energy_derivatives(self.d_vector(k), &jac, r))
    }

    fn analytic_qgt(&self, r: &[f64], t: f64) -> Option<Result<AnalyticQgt>> {
        if let Err(e) = check_point(self, r) {
            return Some(Err(e));
        }
        Some(
            ssh_qgt_analytic(r[0], self.ratio(), self.j2, t).map(|(fr, fs)| AnalyticQgt {
                g_fr: RealMatrix::from_fn(1, |_, _| fr),
                g_fs: RealMatrix::from_fn(1, |_, _| fs),
                omega: RealMatrix::zeros(1),
            }),
        )
    }
}

/// Closed-form `(g^FR_kk, g^FS_kk)` of the thermal SSH state.
///
/// `g^FR_kk = sech²(βJ₂R̃) β² J₂² r² sin²k / (4R̃²)`, `g^FS_kk = (r cos k + 1)² / (4R̃⁴)`;
/// the Fubini-Study part does not depend on temperature. `t = 0` gives the ground-state limit.
pub fn ssh_qgt_analytic(k: f64, r: f64, j2: f64, t: f64) -> Result<(f64, f64)> {
    check_temperature(t)?;
    let rt2 = 1.0 + r * r + 2.0 * r * k.cos();
    if !(rt2 > 0.0) {
        return Err(QgtError::Degenerate {
            point: alloc::vec![k],
            gap: 0.0,
        });
    }
    let rt = rt2.sqrt();
    let s = k.sin();
    let g_fr = thermal_sech2(j2 * rt, t) * j2 * j2 * r * r * s * s / (4.0 * rt2);
    let c = r * k.cos() + 1.0;
    let g_fs = c * c / (4.0 * rt2 * rt2);
    Ok((g_fr, g_fs))
}
