//! Quantum geometric tensor of finite-temperature mixed states.
//!
//! The crate computes the U^N(1)-invariant geometric tensor of Gibbs states
//! `ρ(R) = Σ λ_n |n(R)⟩⟨n(R)|` of parameterized Hermitian Hamiltonians. The
//! tensor splits as `g^S = g^FR + g^FS − iΩ`, where `g^FR` is the Fisher-Rao
//! metric of the thermal weights, `g^FS` the weighted sum of per-level
//! Fubini-Study metrics and `Ω` half the weighted sum of Berry curvatures.
//!
//! Layout:
//!
//! - [`linalg`]: small dense complex matrices, Jacobi diagonalization, PSD square roots, singular values.
//! - [`thermal`]: Gibbs states, spectral projectors, purifications.
//! - [`qgt`]: the tensor itself, eigenvector-derivative cross-checks,
//!   parallel transport and the raw-distance decomposition.
//! - [`distance`]: finite Sjöqvist, Bures and raw distances plus a brute-force oracle.
//! - [`geomphase`]: Wilson loops, Berry curvature, surface integrals of `Ω`.
//! - [`models`]: SSH, 2D Dirac, 3D BCS, Bloch sphere and seeded random models.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod distance;
pub mod error;
pub mod geomphase;
pub mod linalg;
pub mod models;
pub mod qgt;
pub mod quadrature;
pub mod thermal;

pub use error::{QgtError, Result};
pub use linalg::{ComplexMatrix, HermitianOperator, SpectralDecomposition};
pub use models::ParamModel;
pub use qgt::{QgtPoint, StepScheme};
pub use thermal::{Purification, ThermalState};

pub use num_complex::Complex64;
