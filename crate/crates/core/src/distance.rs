//! Finite distances between thermal states: Sjöqvist, Bures and raw.
//!
//! All functions return squared distances.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{QgtError, Result};
use crate::linalg::{inner, singular_values, ComplexMatrix};
use crate::thermal::{purify_with_reference, Purification, ThermalState};

/// Two assignments whose overlap masses differ by less than this are ambiguous.
pub const MATCHING_TOLERANCE: f64 = 1e-9;

/// Largest dimension handled by exhaustive matching.
pub const MAX_MATCHING_DIM: usize = 8;

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(QgtError::Dimension(alloc::format!(
            "states of dimension {a} and {b}"
        )));
    }
    Ok(())
}

/// Level assignment `n ↦ π(n)` maximizing `Σ_n |⟨a_n|b_π(n)⟩|²`, by exhaustive search.
pub fn level_matching(a: &ThermalState, b: &ThermalState) -> Result<Vec<usize>> {
    let n = a.dim();
    check_dims(n, b.dim())?;
    if n > MAX_MATCHING_DIM {
        return Err(QgtError::Dimension(alloc::format!(
            "exhaustive level matching supports N ≤ {MAX_MATCHING_DIM}, got {n}"
        )));
    }
    let mass: Vec<Vec<f64>> = a
        .basis()
        .eigenvectors()
        .iter()
        .map(|va| {
            b.basis()
                .eigenvectors()
                .iter()
                .map(|vb| inner(va, vb).norm_sqr())
                .collect()
        })
        .collect();

    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    let mut best_perm = perm.clone();
    let mut visit = |p: &[usize]| {
        let s: f64 = p.iter().enumerate().map(|(i, &j)| mass[i][j]).sum();
        if s > best {
            second = best;
            best = s;
            best_perm.copy_from_slice(p);
        } else if s > second {
            second = s;
        }
    };
    heap_permutations(&mut perm, &mut visit);
    if second.is_finite() && best - second < MATCHING_TOLERANCE {
        return Err(QgtError::AmbiguousMatching { best, second });
    }
    Ok(best_perm)
}

/// Heap's algorithm, iterative form.
fn heap_permutations(p: &mut [usize], visit: &mut impl FnMut(&[usize])) {
    let n = p.len();
    let mut c = alloc::vec![0usize; n];
    visit(p);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            visit(p);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Squared Sjöqvist distance `2 − 2 Σ_n √(λ_n^a λ_π(n)^b) |⟨n_a|π(n)_b⟩|` after level matching.
///
/// Evaluated as `Σ_n (√λ_n^a − √λ_π(n)^b)² + 2√(λ_n^a λ_π(n)^b)(1 − |⟨n_a|π(n)_b⟩|)`,
/// with `1 − |o|` from the component of `π(n)_b` orthogonal to `n_a`, so
/// nearby states do not lose their distance to cancellation against 2.
pub fn sjoqvist_distance_finite(a: &ThermalState, b: &ThermalState) -> Result<f64> {
    let perm = level_matching(a, b)?;
    let mut d = 0.0;
    for (i, &j) in perm.iter().enumerate() {
        let va = a.basis().eigenvector(i);
        let vb = b.basis().eigenvector(j);
        let o = inner(va, vb);
        let orth: f64 = vb.iter().zip(va).map(|(y, x)| (y - x * o).norm_sqr()).sum();
        // 1 − |o| = (1 − |o|²)/(1 + |o|), and 1 − |o|² = |b − a⟨a|b⟩|² for unit vectors
        let one_minus = orth / (1.0 + o.norm());
        let (la, lb) = (a.weights()[i].sqrt(), b.weights()[j].sqrt());
        d += (la - lb) * (la - lb) + 2.0 * la * lb * one_minus;
    }
    Ok(d.clamp(0.0, 2.0))
}

/// `√ρ` from the state's own spectral decomposition.
fn state_sqrt(state: &ThermalState) -> ComplexMatrix {
    let n = state.dim();
    let mut m = ComplexMatrix::zeros(n);
    for (w, v) in state.weights().iter().zip(state.basis().eigenvectors()) {
        m = &m + &ComplexMatrix::outer(v, v).scale(Complex64::new(w.sqrt(), 0.0));
    }
    m
}

/// Squared Bures distance `2 − 2 Tr|√ρ_a √ρ_b|`, the fidelity taken as a sum of singular values.
pub fn bures_distance_finite(a: &ThermalState, b: &ThermalState) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    let fidelity: f64 = singular_values(&(&state_sqrt(a) * &state_sqrt(b)))
        .iter()
        .sum();
    Ok((2.0 - 2.0 * fidelity).clamp(0.0, 2.0))
}

/// `⟨W_p − W_q|W_p − W_q⟩`; depends on the phases on purpose.
pub fn raw_distance(p: &Purification, q: &Purification) -> Result<f64> {
    check_dims(p.state().dim(), q.state().dim())?;
    Ok((&p.amplitude() - &q.amplitude()).hs_norm_sqr())
}

/// Grid-search oracle for the Sjöqvist distance.
///
/// Both states are purified against a shared reference basis with `b`'s
/// levels paired to `a`'s by [`level_matching`]. `W_a` keeps zero phases and
/// each level phase of `W_b` is scanned over `grid_points` values in
/// coordinate sweeps, evaluating the full Hilbert-Schmidt norm each time.
pub fn brute_force_sjoqvist(a: &ThermalState, b: &ThermalState, grid_points: usize) -> Result<f64> {
    if grid_points < 64 {
        return Err(QgtError::Domain(alloc::format!(
            "grid needs at least 64 points, got {grid_points}"
        )));
    }
    let n = a.dim();
    let perm = level_matching(a, b)?;
    let reference = a.basis().eigenvectors().to_vec();

    // b's levels reordered so that level i pairs with a's level i
    let b_vecs: Vec<Vec<Complex64>> = perm
        .iter()
        .map(|&j| b.basis().eigenvector(j).to_vec())
        .collect();
    let b_weights: Vec<f64> = perm.iter().map(|&j| b.weights()[j]).collect();

    let wa = purify_with_reference(a.clone(), &alloc::vec![0.0; n], reference.clone())?.amplitude();
    let amplitude_b = |phases: &[f64]| -> ComplexMatrix {
        let mut w = ComplexMatrix::zeros(n);
        for i in 0..n {
            let coeff = Complex64::from_polar(b_weights[i].sqrt(), phases[i]);
            w = &w + &ComplexMatrix::outer(&b_vecs[i], &reference[i]).scale(coeff);
        }
        w
    };
    let cost = |phases: &[f64]| (&amplitude_b(phases) - &wa).hs_norm_sqr();

    let grid: Vec<f64> = (0..grid_points)
        .map(|g| {
            -core::f64::consts::PI + 2.0 * core::f64::consts::PI * g as f64 / grid_points as f64
        })
        .collect();
    let mut phases = alloc::vec![0.0; n];
    let mut best = cost(&phases);
    for _sweep in 0..4 {
        let before = best;
        for level in 0..n {
            let mut trial = phases.clone();
            for &x in &grid {
                trial[level] = x;
                let c = cost(&trial);
                if c < best {
                    best = c;
                    phases[level] = x;
                }
            }
        }
        if before - best <= 0.0 {
            break;
        }
    }
    Ok(best)
}
