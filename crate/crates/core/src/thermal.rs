//! Full-rank thermal states, spectral projectors and purifications.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{QgtError, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator, SpectralDecomposition};

/// Smallest weight kept in a Gibbs state; anything below is floored here.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// `ρ = Σ λ_n |n⟩⟨n|` with strictly positive weights paired with `basis` levels.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalState {
    weights: Vec<f64>,
    basis: SpectralDecomposition,
    temperature: Option<f64>,
    floored: bool,
}

impl ThermalState {
    /// A mixed state from explicit weights (not necessarily Gibbs).
    pub fn from_weights(basis: SpectralDecomposition, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != basis.dim() {
            return Err(QgtError::Dimension(format!(
                "{} weights for {} levels",
                weights.len(),
                basis.dim()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(QgtError::Domain(
                "weights must be strictly positive (full rank)".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(QgtError::Domain(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            weights,
            basis,
            temperature: None,
            floored: false,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn basis(&self) -> &SpectralDecomposition {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Temperature for Gibbs states, `None` for states built from explicit weights.
    pub fn temperature(&self) -> Option<f64> {
        self.temperature
    }

    pub fn beta(&self) -> Option<f64> {
        self.temperature.map(|t| 1.0 / t)
    }

    /// Set when some Gibbs weight underflowed and was raised to [`WEIGHT_FLOOR`].
    pub fn floored(&self) -> bool {
        self.floored
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut rho = ComplexMatrix::zeros(n);
        for (w, v) in self.weights.iter().zip(self.basis.eigenvectors()) {
            rho = &rho + &ComplexMatrix::outer(v, v).scale(Complex64::new(*w, 0.0));
        }
        rho
    }
}

/// Gibbs weights `λ_n = e^{−E_n/T} / Σ_m e^{−E_m/T}`, evaluated with a max-shift.
pub fn gibbs_weights(energies: &[f64], temperature: f64) -> Result<(Vec<f64>, bool)> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(QgtError::Domain(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let boltzmann: Vec<f64> = energies
        .iter()
        .map(|e| (-(e - e_min) / temperature).exp())
        .collect();
    let z: f64 = boltzmann.iter().sum();
    let mut weights: Vec<f64> = boltzmann.iter().map(|b| b / z).collect();
    let floored = weights.iter().any(|&w| w < WEIGHT_FLOOR);
    if floored {
        weights.iter_mut().for_each(|w| *w = w.max(WEIGHT_FLOOR));
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
    }
    Ok((weights, floored))
}

pub fn gibbs_state(spec: SpectralDecomposition, temperature: f64) -> Result<ThermalState> {
    let (weights, floored) = gibbs_weights(spec.eigenvalues(), temperature)?;
    Ok(ThermalState {
        weights,
        basis: spec,
        temperature: Some(temperature),
        floored,
    })
}

/// `|n⟩⟨n|`.
pub fn projector(spec: &SpectralDecomposition, n: usize) -> Result<HermitianOperator> {
    if n >= spec.dim() {
        return Err(QgtError::IndexOutOfRange {
            index: n,
            len: spec.dim(),
        });
    }
    let v = spec.eigenvector(n);
    HermitianOperator::new(ComplexMatrix::outer(v, v))
}

/// Per-level phases `θ_n` sampled along a discrete path (rows are path points).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    levels: usize,
    data: Vec<f64>,
}

impl PhaseField {
    pub fn new(levels: usize) -> Self {
        Self {
            levels,
            data: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.levels);
        assert!(
            row.iter().all(|x| x.is_finite()),
            "phase field values must be finite"
        );
        self.data.extend_from_slice(row);
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.levels.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.levels..(j + 1) * self.levels]
    }

    pub fn column(&self, n: usize) -> Vec<f64> {
        (0..self.len())
            .map(|j| self.data[j * self.levels + n])
            .collect()
    }
}

/// Amplitude `W = Σ_n √λ_n e^{iθ_n} |n⟩⟨n₀|` of a thermal state.
///
/// `|n₀⟩` is a fixed reference basis, by default the state's own eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct Purification {
    state: ThermalState,
    phases: Vec<f64>,
    reference: Vec<Vec<Complex64>>,
}

impl Purification {
    pub fn state(&self) -> &ThermalState {
        &self.state
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn reference(&self) -> &[Vec<Complex64>] {
        &self.reference
    }

    pub fn amplitude(&self) -> ComplexMatrix {
        let n = self.state.dim();
        let mut w = ComplexMatrix::zeros(n);
        for (level, v) in self.state.basis().eigenvectors().iter().enumerate() {
            let coeff =
                Complex64::from_polar(self.state.weights()[level].sqrt(), self.phases[level]);
            let term = ComplexMatrix::outer(v, &self.reference[level]).scale(coeff);
            w = &w + &term;
        }
        w
    }

    /// `W W†`.
    pub fn density_matrix(&self) -> ComplexMatrix {
        let w = self.amplitude();
        &w * &w.adjoint()
    }

    /// `⟨W|W⟩ = Tr(W†W)`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitude().hs_norm_sqr()
    }
}

pub fn purify(state: ThermalState, phases: &[f64]) -> Result<Purification> {
    let reference = state.basis().eigenvectors().to_vec();
    purify_with_reference(state, phases, reference)
}

/// Purification against an explicit reference basis (e.g. the spectral basis at a path start).
pub fn purify_with_reference(
    state: ThermalState,
    phases: &[f64],
    reference: Vec<Vec<Complex64>>,
) -> Result<Purification> {
    let n = state.dim();
    if phases.len() != n {
        return Err(QgtError::Dimension(format!(
            "{} phases for {n} levels",
            phases.len()
        )));
    }
    if reference.len() != n || reference.iter().any(|v| v.len() != n) {
        return Err(QgtError::Dimension(format!(
            "reference basis must hold {n} vectors of length {n}"
        )));
    }
    Ok(Purification {
        state,
        phases: phases.to_vec(),
        reference,
    })
}
