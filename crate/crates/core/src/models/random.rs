use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_point, ParamModel};
use crate::error::{QgtError, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};

const NAMES: [&str; 3] = ["R0", "R1", "R2"];

/// Seeded smooth random family `H(R) = A₀ + Σ_μ R^μ A_μ + Σ_μ sin(R^μ) B_μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomModel {
    levels: usize,
    seed: u64,
    constant: ComplexMatrix,
    linear: Vec<ComplexMatrix>,
    periodic: Vec<ComplexMatrix>,
}

impl RandomModel {
    /// `2 ≤ levels ≤ 8`, `1 ≤ params ≤ 3`.
    pub fn new(levels: usize, params: usize, seed: u64) -> Result<Self> {
        if !(2..=8).contains(&levels) || !(1..=3).contains(&params) {
            return Err(QgtError::Domain(alloc::format!(
                "random model needs 2 ≤ N ≤ 8 and 1 ≤ k ≤ 3, got N={levels}, k={params}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let constant = random_hermitian(levels, &mut rng);
        let linear = (0..params)
            .map(|_| random_hermitian(levels, &mut rng))
            .collect();
        let periodic = (0..params)
            .map(|_| random_hermitian(levels, &mut rng))
            .collect();
        Ok(Self {
            levels,
            seed,
            constant,
            linear,
            periodic,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Smallest adjacent eigenvalue gap at `r`.
    pub fn min_gap(&self, r: &[f64]) -> Result<f64> {
        Ok(self.spectrum(r)?.min_gap())
    }
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    (&m + &m.adjoint()).scale(Complex64::new(0.5, 0.0))
}

impl ParamModel for RandomModel {
    fn name(&self) -> &str {
        "random"
    }

    fn param_names(&self) -> &[&'static str] {
        &NAMES[..self.linear.len()]
    }

    fn n_levels(&self) -> usize {
        self.levels
    }

    fn hamiltonian(&self, r: &[f64]) -> Result<HermitianOperator> {
        check_point(self, r)?;
        let mut h = self.constant.clone();
        for ((x, a), b) in r.iter().zip(&self.linear).zip(&self.periodic) {
            h = &h + &a.scale(Complex64::new(*x, 0.0));
            h = &h + &b.scale(Complex64::new(x.sin(), 0.0));
        }
        HermitianOperator::new(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::check_hermitian;

    #[test]
    fn deterministic_per_seed() {
        let a = RandomModel::new(4, 2, 99).unwrap();
        let b = RandomModel::new(4, 2, 99).unwrap();
        let c = RandomModel::new(4, 2, 100).unwrap();
        let r = [0.3, -1.2];
        assert_eq!(a.hamiltonian(&r).unwrap(), b.hamiltonian(&r).unwrap());
        assert_ne!(a.hamiltonian(&r).unwrap(), c.hamiltonian(&r).unwrap());
    }

    #[test]
    fn hermitian_everywhere() {
        let m = RandomModel::new(5, 3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let r: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            assert!(check_hermitian(m.hamiltonian(&r).unwrap().matrix(), 1e-14));
        }
    }

    #[test]
    fn degenerate_draws_are_rare() {
        let mut rejected = 0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..200 {
            let m =
                RandomModel::new(2 + (seed as usize % 7), 1 + (seed as usize % 3), seed).unwrap();
            let r: Vec<f64> = (0..m.n_params())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            if m.min_gap(&r).unwrap() <= 1e-6 {
                rejected += 1;
            }
        }
        assert!(rejected <= 2, "{rejected} of 200 draws degenerate");
    }

    #[test]
    fn invalid_sizes() {
        assert!(RandomModel::new(1, 1, 0).is_err());
        assert!(RandomModel::new(9, 1, 0).is_err());
        assert!(RandomModel::new(3, 0, 0).is_err());
        assert!(RandomModel::new(3, 4, 0).is_err());
    }
}
