//! Eigenvector-derivative cross-checks, parallel transport and the raw-distance decomposition.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{
    check_params, check_positive_temperature, hamiltonian_derivatives, thermal_weights, Evaluator,
    Gauge, Stencil, StepScheme,
};
use crate::distance::sjoqvist_distance_finite;
use crate::error::{QgtError, Result};
use crate::linalg::{inner, ComplexMatrix, SpectralDecomposition};
use crate::models::ParamModel;
use crate::thermal::{purify_with_reference, PhaseField, ThermalState};

/// Adjacent overlaps below this are rejected as an under-resolved path.
pub const MIN_PATH_OVERLAP: f64 = 0.1;

/// Tensor assembled from eigenvector derivatives in a smooth gauge.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvectorQgt {
    pub weights: Vec<f64>,
    /// `ω_{nμ} = ⟨n|∂_μ n⟩`, indexed `[level][param]`.
    pub connection: Vec<Vec<Complex64>>,
    /// `Σ_n [∂_μλ_n ∂_νλ_n/(4λ_n) + λ_n ⟨∂_μ n|∂_ν n⟩]`.
    pub g_raw: ComplexMatrix,
    /// `g_raw + Σ_n λ_n ω_{nμ} ω_{nν}`.
    pub gamma: ComplexMatrix,
    /// `Σ_n [∂_μλ_n ∂_νλ_n/(4λ_n) + λ_n (⟨∂_μ n|∂_ν n⟩ − ⟨∂_μ n|n⟩⟨n|∂_ν n⟩)]`.
    pub eq_form: ComplexMatrix,
}

/// Spectra at the stencil points rephased so the component chosen by the
/// center's phase convention stays real-positive, then passed through `gauge`.
fn smooth_stencil(
    model: &dyn ParamModel,
    r: &[f64],
    scheme: &StepScheme,
    gauge: Option<Gauge<'_>>,
) -> Result<Stencil> {
    let levels: Vec<usize> = (0..model.n_levels()).collect();
    let anchor = Evaluator::new(model, None)
        .gapped_spectrum(r, &levels)?
        .convention_indices();
    let align = |p: &[f64], spec: &mut SpectralDecomposition| {
        spec.align_components(&anchor);
        if let Some(g) = gauge {
            g(p, spec);
        }
    };
    Stencil::build(&Evaluator::new(model, Some(&align)), r, scheme, &levels)
}

/// Eigenvector-path tensor at temperature `t`, in the reference-component gauge
/// optionally modified by a smooth `gauge`.
pub fn eigenvector_path_qgt(
    model: &dyn ParamModel,
    r: &[f64],
    t: f64,
    scheme: &StepScheme,
    gauge: Option<Gauge<'_>>,
) -> Result<EigenvectorQgt> {
    check_params(model, r, scheme)?;
    check_positive_temperature(t)?;
    let k = r.len();
    let n_levels = model.n_levels();
    let stencil = smooth_stencil(model, r, scheme, gauge)?;
    let (weights, _) = thermal_weights(&stencil.center, t)?;

    let mut failure = None;
    let mut dw = Vec::with_capacity(k);
    let mut dv: Vec<Vec<Vec<Complex64>>> = Vec::with_capacity(k);
    for mu in 0..k {
        dw.push(
            stencil.derivative(mu, |spec| match thermal_weights(spec, t) {
                Ok((w, _)) => w,
                Err(e) => {
                    failure = Some(e);
                    alloc::vec![0.0; n_levels]
                }
            }),
        );
        dv.push(
            (0..n_levels)
                .map(|n| stencil.derivative(mu, |spec| spec.eigenvector(n).to_vec()))
                .collect(),
        );
    }
    if let Some(e) = failure {
        return Err(e);
    }

    let connection: Vec<Vec<Complex64>> = (0..n_levels)
        .map(|n| {
            (0..k)
                .map(|mu| inner(stencil.center.eigenvector(n), &dv[mu][n]))
                .collect()
        })
        .collect();

    let mut g_raw = ComplexMatrix::zeros(k);
    let mut gamma = ComplexMatrix::zeros(k);
    let mut eq_form = ComplexMatrix::zeros(k);
    for mu in 0..k {
        for nu in 0..k {
            let mut raw = Complex64::new(0.0, 0.0);
            let mut corr = Complex64::new(0.0, 0.0);
            let mut proj = Complex64::new(0.0, 0.0);
            for n in 0..n_levels {
                let l = weights[n];
                let fr = dw[mu][n] * dw[nu][n] / (4.0 * l);
                raw += fr + l * inner(&dv[mu][n], &dv[nu][n]);
                corr += l * connection[n][mu] * connection[n][nu];
                let back = inner(&dv[mu][n], stencil.center.eigenvector(n));
                proj += l * back * connection[n][nu];
            }
            g_raw[(mu, nu)] = raw;
            gamma[(mu, nu)] = raw + corr;
            eq_form[(mu, nu)] = raw - proj;
        }
    }
    Ok(EigenvectorQgt {
        weights,
        connection,
        g_raw,
        gamma,
        eq_form,
    })
}

fn transport_step(
    prev: &SpectralDecomposition,
    next: &SpectralDecomposition,
    n: usize,
    step: usize,
) -> Result<f64> {
    let o = inner(prev.eigenvector(n), next.eigenvector(n));
    if o.norm() <= MIN_PATH_OVERLAP {
        return Err(QgtError::SmallOverlap {
            step,
            overlap: o.norm(),
        });
    }
    Ok(o.arg())
}

/// Phases `θ_{j+1} = θ_j − arg⟨n_j|n_{j+1}⟩` keeping level `n` in phase along `path`, from `θ_0 = 0`.
pub fn parallel_transport_phases(
    model: &dyn ParamModel,
    path: &[Vec<f64>],
    n: usize,
) -> Result<Vec<f64>> {
    let field = transport(&Evaluator::new(model, None), path, &[n])?;
    Ok(field.column(0))
}

/// Parallel-transport phases for every level.
pub fn parallel_transport_field(model: &dyn ParamModel, path: &[Vec<f64>]) -> Result<PhaseField> {
    let levels: Vec<usize> = (0..model.n_levels()).collect();
    transport(&Evaluator::new(model, None), path, &levels)
}

fn transport(eval: &Evaluator<'_>, path: &[Vec<f64>], levels: &[usize]) -> Result<PhaseField> {
    let mut field = PhaseField::new(levels.len());
    if path.is_empty() {
        return Ok(field);
    }
    let mut theta = alloc::vec![0.0; levels.len()];
    let mut prev = eval.gapped_spectrum(&path[0], levels)?;
    field.push_row(&theta);
    for (j, r) in path.iter().enumerate().skip(1) {
        let next = eval.gapped_spectrum(r, levels)?;
        for (slot, &n) in levels.iter().enumerate() {
            theta[slot] -= transport_step(&prev, &next, n, j - 1)?;
        }
        field.push_row(&theta);
        prev = next;
    }
    Ok(field)
}

/// Terms of `raw² = Sjöqvist² + Σ_n λ_n (dθ_n − iω_n·dR)² + O(dt³)` for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PythagoreanTerms {
    pub raw_sq: f64,
    pub sjoqvist_sq: f64,
    pub phase_term: f64,
    pub residual: f64,
}

/// Rates `dθ_n/dt = i ω_n·direction` that make the phase term vanish (continuous parallel transport).
pub fn parallel_transport_rates(
    model: &dyn ParamModel,
    r: &[f64],
    direction: &[f64],
    scheme: &StepScheme,
) -> Result<Vec<f64>> {
    Ok(connection_along(model, r, direction, scheme)?
        .iter()
        .map(|a| -a)
        .collect())
}

/// `a_n` with `ω_n·direction = i a_n`, in the reference-component gauge.
///
/// With `∂|n⟩ = Σ_{m≠n} |m⟩⟨m|∂H|n⟩/(E_n − E_m) + i a_n |n⟩`, keeping the
/// anchor component `k` of `|n⟩` real fixes `a_n = −Im Σ_{m≠n} v_{mk} x_m / v_{nk}`.
fn connection_along(
    model: &dyn ParamModel,
    r: &[f64],
    direction: &[f64],
    scheme: &StepScheme,
) -> Result<Vec<f64>> {
    check_params(model, r, scheme)?;
    let n_levels = model.n_levels();
    let levels: Vec<usize> = (0..n_levels).collect();
    let spec = Evaluator::new(model, None).gapped_spectrum(r, &levels)?;
    let anchor = spec.convention_indices();
    let dh = hamiltonian_derivatives(model, r, scheme)?;
    let mut along = ComplexMatrix::zeros(n_levels);
    for (d, &c) in dh.iter().zip(direction) {
        along = &along + &d.scale(Complex64::new(c, 0.0));
    }
    let e = spec.eigenvalues();
    Ok((0..n_levels)
        .map(|n| {
            let k = anchor[n];
            let w = along.mul_vec(spec.eigenvector(n));
            let mixed: Complex64 = (0..n_levels)
                .filter(|&m| m != n)
                .map(|m| spec.eigenvector(m)[k] * inner(spec.eigenvector(m), &w) / (e[n] - e[m]))
                .sum();
            -mixed.im / spec.eigenvector(n)[k].re
        })
        .collect())
}

/// Residual of the raw-distance decomposition for the step `R → R + dt·direction`
/// with level phases advancing at `phase_rates`.
///
/// Both endpoints use the reference-component gauge of `R`, `W(R)` carries
/// zero phases and `W(R + dt·direction)` carries `θ_n = phase_rates[n]·dt`.
pub fn pythagorean_residual(
    model: &dyn ParamModel,
    r: &[f64],
    direction: &[f64],
    phase_rates: &[f64],
    t: f64,
    dt: f64,
) -> Result<PythagoreanTerms> {
    let scheme = StepScheme::default();
    check_params(model, r, &scheme)?;
    check_positive_temperature(t)?;
    let n_levels = model.n_levels();
    if direction.len() != r.len() || phase_rates.len() != n_levels {
        return Err(QgtError::Dimension(alloc::format!(
            "direction needs {} components and phase rates {n_levels}",
            r.len()
        )));
    }
    let levels: Vec<usize> = (0..n_levels).collect();
    let eval = Evaluator::new(model, None);
    let start = eval.gapped_spectrum(r, &levels)?;
    let anchor = start.convention_indices();
    let end_point: Vec<f64> = r.iter().zip(direction).map(|(x, d)| x + dt * d).collect();
    let mut end = eval.gapped_spectrum(&end_point, &levels)?;
    end.align_components(&anchor);

    let (w0, _) = thermal_weights(&start, t)?;
    let (w1, _) = thermal_weights(&end, t)?;
    let s0 = ThermalState::from_weights(start.clone(), w0.clone())?;
    let s1 = ThermalState::from_weights(end, w1)?;
    let reference = start.eigenvectors().to_vec();
    let theta1: Vec<f64> = phase_rates.iter().map(|v| v * dt).collect();
    let p0 = purify_with_reference(s0.clone(), &alloc::vec![0.0; n_levels], reference.clone())?;
    let p1 = purify_with_reference(s1.clone(), &theta1, reference)?;
    let raw_sq = (&p1.amplitude() - &p0.amplitude()).hs_norm_sqr();
    let sjoqvist_sq = sjoqvist_distance_finite(&s0, &s1)?;

    let a = connection_along(model, r, direction, &scheme)?;
    // dθ − iω·dR with ω = i a
    let phase_term: f64 = (0..n_levels)
        .map(|n| {
            let x = theta1[n] + a[n] * dt;
            w0[n] * x * x
        })
        .sum();
    Ok(PythagoreanTerms {
        raw_sq,
        sjoqvist_sq,
        phase_term,
        residual: (raw_sq - sjoqvist_sq - phase_term).abs(),
    })
}
