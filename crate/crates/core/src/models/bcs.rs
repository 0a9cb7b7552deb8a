//! Mean-field 3D attractive-Hubbard superfluid and its `(Δ, μ)` self-consistency.
//!
//! Gap equation `1/U = ⟨tanh(E/2T)/(2E)⟩`, number equation
//! `n = ⟨1 − (ε/E) tanh(E/2T)⟩`, with `E = √(Δ² + ε²)`,
//! `ε = −2t(cos k_x + cos k_y + cos k_z) − μ` and `⟨·⟩` the average over the `L³` grid.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{
    bloch_energy_derivatives, bloch_spectrum, check_point, check_temperature, thermal_sech2,
    AnalyticQgt, ParamModel,
};
use crate::error::{QgtError, Result};
use crate::linalg::{HermitianOperator, RealMatrix, SpectralDecomposition};

/// Residual bound below which a solution counts as converged.
pub const BCS_TOLERANCE: f64 = 1e-8;

const NEWTON_MAX_ITER: usize = 100;
const BISECTION_MAX_ITER: usize = 200;

/// Cubic momentum grid `k_i = 2πj/L`, stored as the distinct values of
/// `cos k_x + cos k_y + cos k_z` with multiplicity weights summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGrid {
    size: usize,
    levels: Vec<(f64, f64)>,
}

impl LatticeGrid {
    pub fn new(size: usize) -> Result<Self> {
        if size < 8 {
            return Err(QgtError::Domain(alloc::format!(
                "lattice size must be at least 8, got {size}"
            )));
        }
        // cos(2πj/L) only depends on min(j, L − j)
        let mut single: Vec<(f64, f64)> = Vec::new();
        for j in 0..=size / 2 {
            let count = if j == 0 || 2 * j == size { 1.0 } else { 2.0 };
            let c = (2.0 * core::f64::consts::PI * j as f64 / size as f64).cos();
            single.push((c, count));
        }
        let norm = (size * size * size) as f64;
        let mut levels = Vec::with_capacity(single.len().pow(3));
        for &(a, wa) in &single {
            for &(b, wb) in &single {
                for &(c, wc) in &single {
                    levels.push((a + b + c, wa * wb * wc / norm));
                }
            }
        }
        levels.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(levels.len());
        for (s, w) in levels {
            match merged.last_mut() {
                Some(last) if last.0 == s => last.1 += w,
                _ => merged.push((s, w)),
            }
        }
        Ok(Self {
            size,
            levels: merged,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `(cos-sum, weight)` pairs in ascending cos-sum order.
    pub fn levels(&self) -> &[(f64, f64)] {
        &self.levels
    }
}

/// `tanh(x)/x`, finite at 0.
fn tanh_over_x(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0
    } else {
        x.tanh() / x
    }
}

#[derive(Debug, Clone, Copy)]
struct Problem<'a> {
    coupling: f64,
    density: f64,
    hopping: f64,
    temperature: f64,
    grid: &'a LatticeGrid,
}

impl Problem<'_> {
    fn epsilon(&self, cos_sum: f64, mu: f64) -> f64 {
        -2.0 * self.hopping * cos_sum - mu
    }

    /// `⟨tanh(E/2T)/(2E)⟩`.
    fn gap_sum(&self, delta: f64, mu: f64) -> f64 {
        let t2 = 2.0 * self.temperature;
        self.grid
            .levels
            .iter()
            .map(|&(c, w)| {
                let eps = self.epsilon(c, mu);
                let e = (delta * delta + eps * eps).sqrt();
                w * tanh_over_x(e / t2) / (2.0 * t2)
            })
            .sum()
    }

    /// `⟨1 − (ε/E) tanh(E/2T)⟩`.
    fn number(&self, delta: f64, mu: f64) -> f64 {
        let t2 = 2.0 * self.temperature;
        self.grid
            .levels
            .iter()
            .map(|&(c, w)| {
                let eps = self.epsilon(c, mu);
                let e = (delta * delta + eps * eps).sqrt();
                w * (1.0 - eps * tanh_over_x(e / t2) / t2)
            })
            .sum()
    }

    fn residuals(&self, delta: f64, mu: f64) -> (f64, f64) {
        (
            self.coupling * self.gap_sum(delta, mu) - 1.0,
            self.number(delta, mu) - self.density,
        )
    }

    /// Chemical potential hitting the target density at fixed `Δ`; the density is increasing in `μ`.
    fn chemical_potential(&self, delta: f64) -> Result<f64> {
        let span = 6.0 * self.hopping + 60.0 * self.temperature + 2.0 * delta + 1.0;
        let (mut lo, mut hi) = (-span, span);
        for _ in 0..BISECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if self.number(delta, mid) < self.density {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-14 * (1.0 + mid.abs()) {
                break;
            }
        }
        let mu = 0.5 * (lo + hi);
        let res = self.number(delta, mu) - self.density;
        if res.abs() > BCS_TOLERANCE {
            return Err(QgtError::RootFinding {
                iterations: BISECTION_MAX_ITER,
                residual: res.abs(),
            });
        }
        Ok(mu)
    }

    fn newton(&self, mut delta: f64, mut mu: f64) -> Option<(f64, f64, usize)> {
        let f = |d: f64, m: f64| -> (f64, f64) {
            let s = self.coupling * self.gap_sum(d, m);
            (s.ln(), self.number(d, m) - self.density)
        };
        let mut fx = f(delta, mu);
        for iter in 0..NEWTON_MAX_ITER {
            let (g, n) = self.residuals(delta, mu);
            if g.abs() < 0.1 * BCS_TOLERANCE && n.abs() < 0.1 * BCS_TOLERANCE {
                return Some((delta, mu, iter));
            }
            let hd = 1e-7 * delta.max(1e-3);
            let hm = 1e-7 * mu.abs().max(1.0);
            let fd = f(delta + hd, mu);
            let fdm = f(delta - hd, mu);
            let fm = f(delta, mu + hm);
            let fmm = f(delta, mu - hm);
            let j11 = (fd.0 - fdm.0) / (2.0 * hd);
            let j21 = (fd.1 - fdm.1) / (2.0 * hd);
            let j12 = (fm.0 - fmm.0) / (2.0 * hm);
            let j22 = (fm.1 - fmm.1) / (2.0 * hm);
            let det = j11 * j22 - j12 * j21;
            if !det.is_finite() || det == 0.0 {
                return None;
            }
            let sd = -(j22 * fx.0 - j12 * fx.1) / det;
            let sm = -(-j21 * fx.0 + j11 * fx.1) / det;
            let norm0 = fx.0.hypot(fx.1);
            let mut lambda = 1.0;
            loop {
                let nd = delta + lambda * sd;
                let nm = mu + lambda * sm;
                if nd > 0.0 {
                    let fnew = f(nd, nm);
                    if fnew.0.hypot(fnew.1) < norm0 || lambda < 1e-8 {
                        delta = nd;
                        mu = nm;
                        fx = fnew;
                        break;
                    }
                }
                lambda *= 0.5;
                if lambda < 1e-12 {
                    return None;
                }
            }
        }
        None
    }

    /// Outer bisection in `Δ` on the gap equation with `μ(Δ)` from the number equation.
    fn nested_bisection(&self) -> Result<(f64, f64)> {
        let (mut lo, mut hi) = (0.0, 0.5 * self.coupling + 1.0);
        for _ in 0..BISECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            let mu = self.chemical_potential(mid)?;
            if self.coupling * self.gap_sum(mid, mu) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * (1.0 + mid) {
                break;
            }
        }
        let delta = 0.5 * (lo + hi);
        Ok((delta, self.chemical_potential(delta)?))
    }
}

/// Self-consistent `(Δ, μ)` at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcsSolution {
    /// Gap in units of `t`.
    pub delta: f64,
    /// Chemical potential in units of `t`.
    pub mu: f64,
    pub temperature: f64,
    pub converged: bool,
    /// `U⟨tanh(E/2T)/(2E)⟩ − 1` on the superfluid branch, 0 on the normal branch.
    pub gap_residual: f64,
    pub density_residual: f64,
    pub iterations: usize,
}

impl BcsSolution {
    pub fn is_normal(&self) -> bool {
        self.delta == 0.0
    }
}

fn validate(coupling: f64, density: f64, hopping: f64, temperature: f64) -> Result<()> {
    if !(coupling > 0.0 && hopping > 0.0 && temperature > 0.0) || !temperature.is_finite() {
        return Err(QgtError::Domain(alloc::format!(
            "BCS needs U, t, T > 0, got U={coupling}, t={hopping}, T={temperature}"
        )));
    }
    if !(density > 0.0 && density < 2.0) {
        return Err(QgtError::Domain(alloc::format!(
            "density must lie in (0, 2), got {density}"
        )));
    }
    Ok(())
}

/// Solve the gap and number equations at coupling `U`, density `n`, hopping `t`, temperature `T`.
///
/// Returns `Δ = 0` exactly with `μ` from the number equation when the
/// Thouless criterion `U⟨tanh(ε/2T)/(2ε)⟩ ≤ 1` says no superfluid root exists.
pub fn bcs_solve(
    coupling: f64,
    density: f64,
    hopping: f64,
    temperature: f64,
    grid: &LatticeGrid,
) -> Result<BcsSolution> {
    validate(coupling, density, hopping, temperature)?;
    let p = Problem {
        coupling,
        density,
        hopping,
        temperature,
        grid,
    };
    let mu_normal = p.chemical_potential(0.0)?;
    if coupling * p.gap_sum(0.0, mu_normal) <= 1.0 {
        let density_residual = p.number(0.0, mu_normal) - density;
        return Ok(BcsSolution {
            delta: 0.0,
            mu: mu_normal,
            temperature,
            converged: density_residual.abs() < BCS_TOLERANCE,
            gap_residual: 0.0,
            density_residual,
            iterations: 0,
        });
    }
    let (delta, mu, iterations) = match p.newton(0.5 * coupling, mu_normal) {
        Some(x) => x,
        None => {
            let (d, m) = p.nested_bisection()?;
            (d, m, BISECTION_MAX_ITER)
        }
    };
    let (gap_residual, density_residual) = p.residuals(delta, mu);
    let converged = gap_residual.abs() < BCS_TOLERANCE && density_residual.abs() < BCS_TOLERANCE;
    if !converged {
        return Err(QgtError::RootFinding {
            iterations,
            residual: gap_residual.abs().max(density_residual.abs()),
        });
    }
    Ok(BcsSolution {
        delta,
        mu,
        temperature,
        converged,
        gap_residual,
        density_residual,
        iterations,
    })
}

/// Critical temperature from the Thouless criterion `U⟨tanh(ε/2T)/(2ε)⟩ = 1`, bisected in `T`.
pub fn bcs_critical_temperature(
    coupling: f64,
    density: f64,
    hopping: f64,
    grid: &LatticeGrid,
) -> Result<f64> {
    validate(coupling, density, hopping, 1.0)?;
    let thouless = |t: f64| -> Result<f64> {
        let p = Problem {
            coupling,
            density,
            hopping,
            temperature: t,
            grid,
        };
        let mu = p.chemical_potential(0.0)?;
        Ok(coupling * p.gap_sum(0.0, mu) - 1.0)
    };
    // ⟨tanh(x)/x⟩/(4T) ≤ 1/(4T), so U/4 bounds T_c from above
    let mut lo = 1e-3 * hopping;
    let mut hi = 0.25 * coupling + hopping;
    if thouless(lo)? <= 0.0 {
        return Err(QgtError::Precondition(alloc::format!(
            "no superfluid phase above T = {lo} for U={coupling}, n={density}"
        )));
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if thouless(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mean-field Hamiltonian `H(k) = Δσ₁ + ε_k σ₃` with `(Δ, μ)` frozen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcsModel {
    pub delta: f64,
    pub mu: f64,
    pub hopping: f64,
}

impl BcsModel {
    pub fn new(delta: f64, mu: f64, hopping: f64) -> Result<Self> {
        if !(delta >= 0.0 && hopping > 0.0 && mu.is_finite()) {
            return Err(QgtError::Domain(alloc::format!(
                "BCS model needs Δ ≥ 0, t > 0, got Δ={delta}, t={hopping}"
            )));
        }
        Ok(Self { delta, mu, hopping })
    }

    pub fn from_solution(solution: &BcsSolution, hopping: f64) -> Result<Self> {
        Self::new(solution.delta, solution.mu, hopping)
    }

    pub fn epsilon(&self, k: &[f64]) -> f64 {
        -2.0 * self.hopping * (k[0].cos() + k[1].cos() + k[2].cos()) - self.mu
    }

    pub fn d_vector(&self, k: &[f64]) -> [f64; 3] {
        [self.delta, 0.0, self.epsilon(k)]
    }
}

impl ParamModel for BcsModel {
    fn name(&self) -> &str {
        "bcs"
    }

    fn param_names(&self) -> &[&'static str] {
        &["kx", "ky", "kz"]
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
        let jac: Vec<[f64; 3]> = r
            .iter()
            .map(|k| [0.0, 0.0, 2.0 * self.hopping * k.sin()])
            .collect();
        Some(bloch_energy_derivatives(self.d_vector(r), &jac, r))
    }

    fn analytic_qgt(&self, r: &[f64], t: f64) -> Option<Result<AnalyticQgt>> {
        if let Err(e) = check_point(self, r) {
            return Some(Err(e));
        }
        Some(bcs_qgt_analytic(r, self.delta, self.mu, self.hopping, t))
    }
}

/// Closed-form BCS tensor, both parts rank one along `(sin k_x, sin k_y, sin k_z)`:
/// `g^FR_ij = sin k_i sin k_j t²β²ε² sech²(βd)/d²`, `g^FS_ij = sin k_i sin k_j Δ²t²/d⁴`, `Ω = 0`.
pub fn bcs_qgt_analytic(
    k: &[f64],
    delta: f64,
    mu: f64,
    hopping: f64,
    t: f64,
) -> Result<AnalyticQgt> {
    check_temperature(t)?;
    if k.len() != 3 {
        return Err(QgtError::Dimension(alloc::format!(
            "BCS momentum has 3 components, got {}",
            k.len()
        )));
    }
    let eps = -2.0 * hopping * (k[0].cos() + k[1].cos() + k[2].cos()) - mu;
    let d_sq = delta * delta + eps * eps;
    if !(d_sq > 0.0) {
        return Err(QgtError::Degenerate {
            point: k.to_vec(),
            gap: 0.0,
        });
    }
    let d = d_sq.sqrt();
    let s: Vec<f64> = k.iter().map(|x| x.sin()).collect();
    let fr = hopping * hopping * eps * eps * thermal_sech2(d, t) / d_sq;
    let fs = delta * delta * hopping * hopping / (d_sq * d_sq);
    Ok(AnalyticQgt {
        g_fr: RealMatrix::from_fn(3, |i, j| fr * s[i] * s[j]),
        g_fs: RealMatrix::from_fn(3, |i, j| fs * s[i] * s[j]),
        omega: RealMatrix::zeros(3),
    })
}
