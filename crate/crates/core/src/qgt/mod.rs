//! The mixed-state geometric tensor `g^S = g^FR + g^FS − iΩ` at a parameter point.
//!
//! Per-level tensors are built from projector derivatives,
//! `Q^n_{μν} = Tr[∂_μP_n (1 − P_n) ∂_νP_n]`, so eigenvector phases never enter.
//! `∂_μP_n` comes from first-order perturbation theory in `∂_μH`, which is
//! differenced numerically; only the Hamiltonian is ever displaced.
//! Then `g^FS = Σ λ_n Re Q^n`, `Ω = −Σ λ_n Im Q^n` and
//! `g^FR = Σ ∂_μλ_n ∂_νλ_n / (4λ_n)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{QgtError, Result};
use crate::linalg::{inner, ComplexMatrix, RealMatrix, SpectralDecomposition};
use crate::models::ParamModel;
use crate::thermal::gibbs_weights;

mod eigvec;

pub use eigvec::{
    eigenvector_path_qgt, parallel_transport_field, parallel_transport_phases,
    parallel_transport_rates, pythagorean_residual, EigenvectorQgt, PythagoreanTerms,
    MIN_PATH_OVERLAP,
};

/// Default central-difference step, used with one level of Richardson extrapolation.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Minimum `Tr[P(R) P(R ± h)]` accepted for a stencil point.
pub const STENCIL_MIN_OVERLAP: f64 = 0.5;

/// Optional per-point phase change applied to every spectrum before use.
///
/// Every quantity in this module is gauge invariant, so this exists for testing that claim.
pub type Gauge<'a> = &'a dyn Fn(&[f64], &mut SpectralDecomposition);

/// Central finite-difference scheme, optionally with one level of Richardson extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct StepScheme {
    steps: Vec<f64>,
    richardson: bool,
}

impl Default for StepScheme {
    fn default() -> Self {
        Self {
            steps: alloc::vec![DEFAULT_STEP],
            richardson: true,
        }
    }
}

impl StepScheme {
    /// Same step for every parameter.
    pub fn uniform(h: f64) -> Result<Self> {
        Self::per_parameter(alloc::vec![h])
    }

    /// One step per parameter; a single entry is broadcast.
    pub fn per_parameter(steps: Vec<f64>) -> Result<Self> {
        if steps.is_empty() || steps.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(QgtError::Domain(format!(
                "finite-difference steps must be positive, got {steps:?}"
            )));
        }
        Ok(Self {
            steps,
            richardson: false,
        })
    }

    pub fn with_richardson(mut self, richardson: bool) -> Self {
        self.richardson = richardson;
        self
    }

    pub fn richardson(&self) -> bool {
        self.richardson
    }

    pub fn step(&self, mu: usize) -> f64 {
        if self.steps.len() == 1 {
            self.steps[0]
        } else {
            self.steps[mu]
        }
    }

    fn check(&self, k: usize) -> Result<()> {
        if self.steps.len() != 1 && self.steps.len() != k {
            return Err(QgtError::Dimension(format!(
                "{} steps for {k} parameters",
                self.steps.len()
            )));
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        let steps: Vec<String> = self.steps.iter().map(|h| format!("{h:e}")).collect();
        format!(
            "central h=[{}] richardson={}",
            steps.join(","),
            self.richardson
        )
    }
}

/// Tensor components at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct QgtPoint {
    pub point: Vec<f64>,
    /// `None` for the zero-temperature limit.
    pub temperature: Option<f64>,
    pub weights: Vec<f64>,
    pub g_fr: RealMatrix,
    pub g_fs: RealMatrix,
    pub omega: RealMatrix,
    pub g_s: ComplexMatrix,
    /// `Q^n` for every level that carries weight (only the ground level in the zero-temperature limit).
    pub level_q: Vec<ComplexMatrix>,
    /// Some Gibbs weight hit the underflow floor.
    pub floored: bool,
}

impl QgtPoint {
    pub fn n_params(&self) -> usize {
        self.g_fr.dim()
    }

    /// `F_n = −2 Im Q^n`.
    pub fn berry_curvature(&self, n: usize) -> RealMatrix {
        let q = &self.level_q[n];
        RealMatrix::from_fn(q.dim(), |i, j| -2.0 * q[(i, j)].im)
    }

    /// `max |g^S − (g^FR + g^FS − iΩ)|`.
    pub fn decomposition_defect(&self) -> f64 {
        let k = self.n_params();
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let z = Complex64::new(self.g_fr[(i, j)] + self.g_fs[(i, j)], -self.omega[(i, j)]);
                worst = worst.max((self.g_s[(i, j)] - z).norm());
            }
        }
        worst
    }

    /// Largest difference over every stored component.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = self
            .g_fr
            .max_abs_diff(&other.g_fr)
            .max(self.g_fs.max_abs_diff(&other.g_fs))
            .max(self.omega.max_abs_diff(&other.omega))
            .max(self.g_s.max_abs_diff(&other.g_s));
        for (a, b) in self.level_q.iter().zip(&other.level_q) {
            worst = worst.max(a.max_abs_diff(b));
        }
        worst
    }
}

pub(crate) struct Evaluator<'a> {
    pub model: &'a dyn ParamModel,
    pub gauge: Option<Gauge<'a>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(model: &'a dyn ParamModel, gauge: Option<Gauge<'a>>) -> Self {
        Self { model, gauge }
    }

    pub fn spectrum(&self, r: &[f64]) -> Result<SpectralDecomposition> {
        let mut spec = self.model.spectrum(r)?;
        if let Some(g) = self.gauge {
            g(r, &mut spec);
        }
        Ok(spec)
    }

    /// Spectrum with the named levels checked for degeneracy.
    pub fn gapped_spectrum(&self, r: &[f64], levels: &[usize]) -> Result<SpectralDecomposition> {
        let spec = self.spectrum(r)?;
        for &n in levels {
            if n >= spec.dim() {
                return Err(QgtError::IndexOutOfRange {
                    index: n,
                    len: spec.dim(),
                });
            }
            if spec.is_level_degenerate(n) {
                return Err(QgtError::Degenerate {
                    point: r.to_vec(),
                    gap: spec.level_gap(n),
                });
            }
        }
        Ok(spec)
    }
}

pub(crate) fn check_params(model: &dyn ParamModel, r: &[f64], scheme: &StepScheme) -> Result<()> {
    if r.len() != model.n_params() {
        return Err(QgtError::Dimension(format!(
            "{} expects {} parameters, got {}",
            model.name(),
            model.n_params(),
            r.len()
        )));
    }
    if r.iter().any(|x| !x.is_finite()) {
        return Err(QgtError::Domain(format!(
            "non-finite parameter point {r:?}"
        )));
    }
    scheme.check(r.len())
}

/// Displaced spectra `R ± h e_μ` (and `R ± h/2 e_μ` under Richardson).
pub(crate) struct Stencil {
    pub center: SpectralDecomposition,
    /// `[μ][s]` with `s` over `+h, −h, +h/2, −h/2`.
    pub displaced: Vec<Vec<SpectralDecomposition>>,
    pub steps: Vec<f64>,
    pub richardson: bool,
}

impl Stencil {
    pub fn build(
        eval: &Evaluator<'_>,
        r: &[f64],
        scheme: &StepScheme,
        levels: &[usize],
    ) -> Result<Self> {
        let center = eval.gapped_spectrum(r, levels)?;
        let mut displaced = Vec::with_capacity(r.len());
        let mut steps = Vec::with_capacity(r.len());
        for mu in 0..r.len() {
            let h = scheme.step(mu);
            let offsets = if scheme.richardson {
                &OFFSETS[..]
            } else {
                &OFFSETS[..2]
            };
            let mut row = Vec::with_capacity(offsets.len());
            for s in offsets {
                let mut p = r.to_vec();
                p[mu] += s * h;
                let spec = eval.gapped_spectrum(&p, levels)?;
                for &n in levels {
                    let overlap = inner(center.eigenvector(n), spec.eigenvector(n)).norm_sqr();
                    if overlap < STENCIL_MIN_OVERLAP {
                        return Err(QgtError::Stencil { point: p, overlap });
                    }
                }
                row.push(spec);
            }
            displaced.push(row);
            steps.push(h);
        }
        Ok(Self {
            center,
            displaced,
            steps,
            richardson: scheme.richardson,
        })
    }

    /// Central derivative of `f` evaluated on the displaced spectra along `μ`.
    pub fn derivative<T>(&self, mu: usize, mut f: impl FnMut(&SpectralDecomposition) -> T) -> T
    where
        T: Combine,
    {
        let h = self.steps[mu];
        let row = &self.displaced[mu];
        match central_difference(h, self.richardson, |i| Ok(f(&row[i]))) {
            Ok(d) => d,
            Err(_) => unreachable!("stencil evaluation is infallible"),
        }
    }
}

/// Stencil offsets in units of `h`; the last two are used only under Richardson.
const OFFSETS: [f64; 4] = [1.0, -1.0, 0.5, -0.5];

/// Central difference with step `h`, `f(i)` evaluated at offset `OFFSETS[i]·h`,
/// plus one Richardson level `(4 D(h/2) − D(h)) / 3`.
fn central_difference<T: Combine>(
    h: f64,
    richardson: bool,
    mut f: impl FnMut(usize) -> Result<T>,
) -> Result<T> {
    let coarse = T::diff(f(0)?, f(1)?, 1.0 / (2.0 * h));
    if !richardson {
        return Ok(coarse);
    }
    let fine = T::diff(f(2)?, f(3)?, 1.0 / h);
    Ok(T::diff(fine.scaled(4.0), coarse, 1.0 / 3.0))
}

/// Values that can be differenced and scaled.
pub(crate) trait Combine: Sized {
    /// `(a − b)·s`.
    fn diff(a: Self, b: Self, s: f64) -> Self;
    fn scaled(self, s: f64) -> Self;
}

impl Combine for ComplexMatrix {
    fn diff(a: Self, b: Self, s: f64) -> Self {
        (&a - &b).scale(Complex64::new(s, 0.0))
    }

    fn scaled(self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }
}

impl Combine for Vec<f64> {
    fn diff(a: Self, b: Self, s: f64) -> Self {
        a.iter().zip(&b).map(|(x, y)| (x - y) * s).collect()
    }

    fn scaled(self, s: f64) -> Self {
        self.into_iter().map(|x| x * s).collect()
    }
}

impl Combine for Vec<Complex64> {
    fn diff(a: Self, b: Self, s: f64) -> Self {
        a.iter().zip(&b).map(|(x, y)| (x - y) * s).collect()
    }

    fn scaled(self, s: f64) -> Self {
        self.into_iter().map(|x| x * s).collect()
    }
}

/// `∂_μH` by central differences of the Hamiltonian, `[μ]`.
pub(crate) fn hamiltonian_derivatives(
    model: &dyn ParamModel,
    r: &[f64],
    scheme: &StepScheme,
) -> Result<Vec<ComplexMatrix>> {
    (0..r.len())
        .map(|mu| {
            let h = scheme.step(mu);
            central_difference(h, scheme.richardson, |i| {
                let mut p = r.to_vec();
                p[mu] += OFFSETS[i] * h;
                Ok(model.hamiltonian(&p)?.into_matrix())
            })
        })
        .collect()
}

/// `Q^n` from `⟨m|∂_μ n⟩ = ⟨m|∂_μH|n⟩ / (E_n − E_m)`, `m ≠ n`; Hermitian as a tensor by construction.
fn level_qgt_from_derivatives(
    spec: &SpectralDecomposition,
    dh: &[ComplexMatrix],
    n: usize,
) -> ComplexMatrix {
    let k = dh.len();
    let e = spec.eigenvalues();
    let zero = Complex64::new(0.0, 0.0);
    let a: Vec<Vec<Complex64>> = dh
        .iter()
        .map(|d| {
            let w = d.mul_vec(spec.eigenvector(n));
            (0..spec.dim())
                .map(|m| {
                    if m == n {
                        zero
                    } else {
                        inner(spec.eigenvector(m), &w) / (e[n] - e[m])
                    }
                })
                .collect()
        })
        .collect();
    let mut q = ComplexMatrix::zeros(k);
    for mu in 0..k {
        q[(mu, mu)] = Complex64::new(a[mu].iter().map(|z| z.norm_sqr()).sum(), 0.0);
        for nu in mu + 1..k {
            let z: Complex64 = a[mu].iter().zip(&a[nu]).map(|(x, y)| x.conj() * y).sum();
            q[(mu, nu)] = z;
            q[(nu, mu)] = z.conj();
        }
    }
    q
}

/// Per-level tensor `Q^n_{μν} = Tr[∂_μP_n (1 − P_n) ∂_νP_n]`.
///
/// `Re Q^n` is the level's Fubini-Study metric and `Im Q^n = −F_n/2`.
pub fn level_qgt(
    model: &dyn ParamModel,
    r: &[f64],
    n: usize,
    scheme: &StepScheme,
) -> Result<ComplexMatrix> {
    check_params(model, r, scheme)?;
    let spec = Evaluator::new(model, None).gapped_spectrum(r, &[n])?;
    let dh = hamiltonian_derivatives(model, r, scheme)?;
    Ok(level_qgt_from_derivatives(&spec, &dh, n))
}

fn thermal_weights(spec: &SpectralDecomposition, t: f64) -> Result<(Vec<f64>, bool)> {
    gibbs_weights(spec.eigenvalues(), t)
}

/// `∂_μλ_n` as `[level][param]`, from closed-form energy derivatives when the
/// model has them and `∂_μE_n = ⟨n|∂_μH|n⟩` otherwise.
fn weight_derivatives(
    model: &dyn ParamModel,
    r: &[f64],
    t: f64,
    weights: &[f64],
    spec: &SpectralDecomposition,
    dh: &[ComplexMatrix],
) -> Result<Vec<Vec<f64>>> {
    let k = r.len();
    let n_levels = weights.len();
    let de = match model.energy_derivatives(r) {
        Some(de) => de?,
        None => (0..n_levels)
            .map(|n| {
                let v = spec.eigenvector(n);
                dh.iter().map(|d| inner(v, &d.mul_vec(v)).re).collect()
            })
            .collect(),
    };
    // ∂λ_n = −β λ_n (∂E_n − Σ_m λ_m ∂E_m)
    let beta = 1.0 / t;
    let mean: Vec<f64> = (0..k)
        .map(|mu| (0..n_levels).map(|m| weights[m] * de[m][mu]).sum())
        .collect();
    Ok((0..n_levels)
        .map(|n| {
            (0..k)
                .map(|mu| -beta * weights[n] * (de[n][mu] - mean[mu]))
                .collect()
        })
        .collect())
}

fn fisher_rao_from(weights: &[f64], dw: &[Vec<f64>], k: usize) -> RealMatrix {
    let mut g = RealMatrix::zeros(k);
    for mu in 0..k {
        for nu in mu..k {
            let s: f64 = weights
                .iter()
                .zip(dw)
                .map(|(l, d)| d[mu] * d[nu] / (4.0 * l))
                .sum();
            g[(mu, nu)] = s;
            g[(nu, mu)] = s;
        }
    }
    g
}

fn check_positive_temperature(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(QgtError::Domain(format!(
            "temperature must be positive and finite, got {t}"
        )))
    }
}

/// Fisher-Rao metric `Σ_n ∂_μλ_n ∂_νλ_n / (4λ_n)` of the Gibbs weights.
///
/// Uses the model's analytic energy derivatives when available, else
/// `⟨n|∂H|n⟩` with `∂H` differenced numerically.
pub fn fisher_rao_metric(
    model: &dyn ParamModel,
    r: &[f64],
    t: f64,
    scheme: &StepScheme,
) -> Result<RealMatrix> {
    check_params(model, r, scheme)?;
    check_positive_temperature(t)?;
    let levels: Vec<usize> = (0..model.n_levels()).collect();
    let spec = Evaluator::new(model, None).gapped_spectrum(r, &levels)?;
    let dh = hamiltonian_derivatives(model, r, scheme)?;
    let (weights, _) = thermal_weights(&spec, t)?;
    let dw = weight_derivatives(model, r, t, &weights, &spec, &dh)?;
    Ok(fisher_rao_from(&weights, &dw, r.len()))
}

/// Full tensor of the Gibbs state at temperature `t > 0`.
pub fn sjoqvist_qgt(
    model: &dyn ParamModel,
    r: &[f64],
    t: f64,
    scheme: &StepScheme,
) -> Result<QgtPoint> {
    thermal_qgt(&Evaluator::new(model, None), r, t, scheme)
}

/// As [`sjoqvist_qgt`], with `gauge` applied to every spectrum before projectors are built.
pub fn sjoqvist_qgt_with_gauge(
    model: &dyn ParamModel,
    r: &[f64],
    t: f64,
    scheme: &StepScheme,
    gauge: Gauge<'_>,
) -> Result<QgtPoint> {
    thermal_qgt(&Evaluator::new(model, Some(gauge)), r, t, scheme)
}

fn thermal_qgt(eval: &Evaluator<'_>, r: &[f64], t: f64, scheme: &StepScheme) -> Result<QgtPoint> {
    let model = eval.model;
    check_params(model, r, scheme)?;
    check_positive_temperature(t)?;
    let k = r.len();
    let levels: Vec<usize> = (0..model.n_levels()).collect();
    let spec = eval.gapped_spectrum(r, &levels)?;
    let dh = hamiltonian_derivatives(model, r, scheme)?;
    let (weights, floored) = thermal_weights(&spec, t)?;
    let dw = weight_derivatives(model, r, t, &weights, &spec, &dh)?;
    let g_fr = fisher_rao_from(&weights, &dw, k);
    let level_q: Vec<ComplexMatrix> = levels
        .iter()
        .map(|&n| level_qgt_from_derivatives(&spec, &dh, n))
        .collect();
    Ok(assemble(r, Some(t), weights, g_fr, level_q, floored))
}

/// Zero-temperature limit: `g^FR = 0` and `g^S = Q^0` of the ground level.
pub fn ground_state_qgt(
    model: &dyn ParamModel,
    r: &[f64],
    scheme: &StepScheme,
) -> Result<QgtPoint> {
    check_params(model, r, scheme)?;
    let q0 = level_qgt(model, r, 0, scheme)?;
    let mut weights = alloc::vec![0.0; model.n_levels()];
    weights[0] = 1.0;
    Ok(assemble(
        r,
        None,
        weights,
        RealMatrix::zeros(r.len()),
        alloc::vec![q0],
        false,
    ))
}

fn assemble(
    r: &[f64],
    temperature: Option<f64>,
    weights: Vec<f64>,
    g_fr: RealMatrix,
    level_q: Vec<ComplexMatrix>,
    floored: bool,
) -> QgtPoint {
    let k = r.len();
    let mut g_fs = RealMatrix::zeros(k);
    let mut omega = RealMatrix::zeros(k);
    for mu in 0..k {
        for nu in mu..k {
            let mut re = 0.0;
            let mut im = 0.0;
            for (l, q) in weights.iter().zip(&level_q) {
                re += l * q[(mu, nu)].re;
                im += l * q[(mu, nu)].im;
            }
            g_fs[(mu, nu)] = re;
            g_fs[(nu, mu)] = re;
            if mu != nu {
                omega[(mu, nu)] = -im;
                omega[(nu, mu)] = im;
            }
        }
    }
    let mut g_s = ComplexMatrix::zeros(k);
    for mu in 0..k {
        for nu in 0..k {
            g_s[(mu, nu)] = Complex64::new(g_fr[(mu, nu)] + g_fs[(mu, nu)], -omega[(mu, nu)]);
        }
    }
    QgtPoint {
        point: r.to_vec(),
        temperature,
        weights,
        g_fr,
        g_fs,
        omega,
        g_s,
        level_q,
        floored,
    }
}
