//! Small dense complex Hermitian linear algebra.
//!
//! Everything here is sized for the handful of levels the models need
//! (N ≤ ~16). Diagonalization is cyclic complex Jacobi, which is simple,
//! dependency free and reproducible bit-for-bit.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{QgtError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative gap below which adjacent eigenvalues count as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

/// Hermiticity tolerance used when wrapping a matrix as [`HermitianOperator`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

const MAX_SWEEPS: usize = 64;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from `rows × cols` row-major entries; only square input is accepted.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows != cols {
            return Err(QgtError::Dimension(format!(
                "expected a square matrix, got {rows}×{cols}"
            )));
        }
        if rows == 0 {
            return Err(QgtError::Dimension(
                "matrix dimension must be positive".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(QgtError::Dimension(format!(
                "{rows}×{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { dim: rows, data })
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(QgtError::Dimension(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, n, data)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        assert_eq!(a.len(), b.len());
        let n = a.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = a[i] * b[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }

    /// Squared Hilbert-Schmidt norm `Tr(A†A)`.
    pub fn hs_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Hilbert-Schmidt inner product `Tr(A†B)`.
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        assert_eq!(v.len(), n);
        (0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
            .collect()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl<'a> Mul for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl<'a> Add for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Square real matrix stored row-major, used for metric components over parameter indices.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Smallest eigenvalue of the symmetric part.
    pub fn min_symmetric_eigenvalue(&self) -> f64 {
        if self.dim == 0 {
            return 0.0;
        }
        let m = ComplexMatrix::from_row_major(
            self.dim,
            self.dim,
            (0..self.dim * self.dim)
                .map(|idx| {
                    let (i, j) = (idx / self.dim, idx % self.dim);
                    Complex64::new(0.5 * (self[(i, j)] + self[(j, i)]), 0.0)
                })
                .collect(),
        )
        .expect("square by construction");
        match HermitianOperator::new(m).and_then(|h| eigh(&h)) {
            Ok(spec) => spec.eigenvalues()[0],
            Err(_) => f64::NAN,
        }
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

/// `true` iff `max |M_ij − conj(M_ji)| ≤ tol · max(1, max|M|)`.
pub fn check_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.hermiticity_deviation() <= tol * m.max_abs().max(1.0)
}

/// A validated Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Wraps `m` after checking Hermiticity to [`HERMITIAN_TOLERANCE`]; the
    /// stored matrix is the exact Hermitian part `(M + M†)/2`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !check_hermitian(&m, HERMITIAN_TOLERANCE) {
            return Err(QgtError::NotHermitian {
                deviation: m.hermiticity_deviation(),
            });
        }
        let sym = (&m + &m.adjoint()).scale(Complex64::new(0.5, 0.0));
        Ok(Self { matrix: sym })
    }

    /// `H = d · σ`.
    pub fn from_bloch(d: [f64; 3]) -> Self {
        let m = ComplexMatrix {
            dim: 2,
            data: vec![
                Complex64::new(d[2], 0.0),
                Complex64::new(d[0], -d[1]),
                Complex64::new(d[0], d[1]),
                Complex64::new(-d[2], 0.0),
            ],
        };
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// Pauli matrices `σ_x`, `σ_y`, `σ_z`.
pub fn pauli() -> [ComplexMatrix; 3] {
    let i = Complex64::i();
    [
        ComplexMatrix {
            dim: 2,
            data: vec![ZERO, ONE, ONE, ZERO],
        },
        ComplexMatrix {
            dim: 2,
            data: vec![ZERO, -i, i, ZERO],
        },
        ComplexMatrix {
            dim: 2,
            data: vec![ONE, ZERO, ZERO, -ONE],
        },
    ]
}

/// Eigen-system with ascending eigenvalues and orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<Complex64>>,
}

impl SpectralDecomposition {
    /// Assembles a decomposition from parts, checking sizes and ordering only.
    pub fn from_parts(eigenvalues: Vec<f64>, eigenvectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = eigenvalues.len();
        if n == 0 || eigenvectors.len() != n || eigenvectors.iter().any(|v| v.len() != n) {
            return Err(QgtError::Dimension(format!(
                "{n} eigenvalues need {n} eigenvectors of length {n}"
            )));
        }
        if eigenvalues.windows(2).any(|w| w[1] < w[0]) {
            return Err(QgtError::Domain("eigenvalues must be ascending".into()));
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Vec<Complex64>] {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, n: usize) -> &[Complex64] {
        &self.eigenvectors[n]
    }

    /// Smallest adjacent eigenvalue gap (infinite for N = 1).
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Gap separating level `n` from its neighbours.
    pub fn level_gap(&self, n: usize) -> f64 {
        let e = &self.eigenvalues;
        let below = if n > 0 {
            e[n] - e[n - 1]
        } else {
            f64::INFINITY
        };
        let above = if n + 1 < e.len() {
            e[n + 1] - e[n]
        } else {
            f64::INFINITY
        };
        below.min(above)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |acc, e| acc.max(e.abs()))
    }

    fn degeneracy_scale(&self) -> f64 {
        DEGENERACY_THRESHOLD * self.spectral_radius().max(1.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.min_gap() < self.degeneracy_scale()
    }

    pub fn is_level_degenerate(&self, n: usize) -> bool {
        self.level_gap(n) < self.degeneracy_scale()
    }

    /// Multiplies eigenvector `n` by `e^{iχ_n}`.
    pub fn rephase(&mut self, phases: &[f64]) {
        assert_eq!(phases.len(), self.dim());
        for (v, &chi) in self.eigenvectors.iter_mut().zip(phases) {
            let u = Complex64::from_polar(1.0, chi);
            v.iter_mut().for_each(|z| *z *= u);
        }
    }

    /// Fixes each eigenvector's phase so that component `indices[n]` is real and positive.
    pub fn align_components(&mut self, indices: &[usize]) {
        assert_eq!(indices.len(), self.dim());
        for (v, &idx) in self.eigenvectors.iter_mut().zip(indices) {
            let z = v[idx];
            if z.norm() > 0.0 {
                let u = z.conj() / z.norm();
                v.iter_mut().for_each(|c| *c *= u);
            }
        }
    }

    /// Index of the component fixed real-positive by the phase convention, per level.
    pub fn convention_indices(&self) -> Vec<usize> {
        self.eigenvectors.iter().map(|v| phase_anchor(v)).collect()
    }

    /// `Σ_n E_n |n⟩⟨n|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n);
        for (e, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let p = ComplexMatrix::outer(v, v).scale(Complex64::new(*e, 0.0));
            m = &m + &p;
        }
        m
    }
}

/// `⟨a|b⟩`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Index of the largest-magnitude component, lowest index on ties.
fn phase_anchor(v: &[Complex64]) -> usize {
    let max = v.iter().fold(0.0, |acc: f64, z| acc.max(z.norm()));
    let tie = max * (1.0 - 1e-12);
    v.iter().position(|z| z.norm() >= tie).unwrap_or(0)
}

fn apply_phase_convention(v: &mut [Complex64]) {
    let idx = phase_anchor(v);
    let z = v[idx];
    if z.norm() > 0.0 {
        let u = z.conj() / z.norm();
        v.iter_mut().for_each(|c| *c *= u);
    }
    // exact zero imaginary part on the anchor
    v[idx] = Complex64::new(v[idx].norm(), 0.0);
}

fn off_diagonal_norm_sqr(a: &ComplexMatrix) -> f64 {
    let n = a.dim;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.data[i * n + j].norm_sqr();
            }
        }
    }
    s
}

/// Diagonalizes a Hermitian operator by cyclic complex Jacobi rotations.
///
/// Eigenvalues come back ascending. Each eigenvector's largest-magnitude
/// component (lowest index on ties) is made real and positive.
pub fn eigh(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let n = h.dim();
    let mut a = h.matrix.clone();
    let mut v = ComplexMatrix::identity(n);
    let total = a.hs_norm_sqr();
    let target = (f64::EPSILON * f64::EPSILON) * total.max(f64::MIN_POSITIVE);

    let mut converged = off_diagonal_norm_sqr(&a) <= target;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off_diagonal_norm_sqr(&a) <= target;
    }
    if !converged {
        return Err(QgtError::NonConvergence {
            sweeps,
            residual: off_diagonal_norm_sqr(&a).sqrt(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&j| {
            let mut col: Vec<Complex64> = (0..n).map(|i| v[(i, j)]).collect();
            apply_phase_convention(&mut col);
            col
        })
        .collect();
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.dim;
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // a tiny element relative to both diagonals is already converged
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // V = D·J with D = diag(1, e^{-iφ}) and J the real symmetric Schur rotation.
    let vpp = Complex64::new(c, 0.0);
    let vpq = Complex64::new(s, 0.0);
    let vqp = -phase.conj() * s;
    let vqq = phase.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * vpp + akq * vqp;
        a[(k, q)] = akp * vpq + akq * vqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * vpp + vkq * vqp;
        v[(k, q)] = vkp * vpq + vkq * vqq;
    }
}

/// Singular values of a square matrix by one-sided (Hestenes) Jacobi, unordered.
///
/// Small singular values keep absolute accuracy `~ε‖A‖`, unlike square roots
/// of the eigenvalues of `A†A`.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let n = a.dim();
    // columns of A
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)]).collect())
        .collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // rephase column q so that the overlap is real positive, then rotate
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let ap = cols[p][i];
                    let aq = cols[q][i] * phase;
                    cols[p][i] = ap * c - aq * s;
                    cols[q][i] = ap * s + aq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    cols.iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect()
}

/// Closed-form eigen-system of `H = d · σ`: eigenvalues `(−|d|, +|d|)`.
pub fn eigh2(d: [f64; 3]) -> Result<SpectralDecomposition> {
    let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if !(norm > 0.0) {
        return Err(QgtError::Degenerate {
            point: d.to_vec(),
            gap: 0.0,
        });
    }
    let plus = bloch_eigenvector(d, norm, 1.0);
    let minus = bloch_eigenvector(d, norm, -1.0);
    Ok(SpectralDecomposition {
        eigenvalues: vec![-norm, norm],
        eigenvectors: vec![minus, plus],
    })
}

/// Eigenvector of `d·σ` with eigenvalue `sign·|d|`, picking whichever of the
/// two equivalent closed forms has the larger normalization.
fn bloch_eigenvector(d: [f64; 3], norm: f64, sign: f64) -> Vec<Complex64> {
    let off = Complex64::new(d[0], d[1]);
    if off == Complex64::new(0.0, 0.0) {
        // diagonal d·σ: exact basis vectors, free of normalization rounding
        let upper = sign * d[2] > 0.0;
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        return if upper {
            vec![one, zero]
        } else {
            vec![zero, one]
        };
    }
    let top = norm + sign * d[2];
    let bottom = norm - sign * d[2];
    let mut v = if top >= bottom {
        // (|d| ± d3, ±(d1 + i d2)) / √(2|d|(|d| ± d3))
        let scale = 1.0 / (2.0 * norm * top).sqrt();
        vec![Complex64::new(top * scale, 0.0), off * (sign * scale)]
    } else {
        // (±(d1 − i d2), |d| ∓ d3) / √(2|d|(|d| ∓ d3))
        let scale = 1.0 / (2.0 * norm * bottom).sqrt();
        vec![
            off.conj() * (sign * scale),
            Complex64::new(bottom * scale, 0.0),
        ]
    };
    apply_phase_convention(&mut v);
    v
}

/// Principal square root of a positive semidefinite operator.
///
/// Eigenvalues down to `−1e−12` are clipped to zero; anything more negative
/// is rejected.
pub fn psd_sqrt(h: &HermitianOperator) -> Result<HermitianOperator> {
    let spec = eigh(h)?;
    if let Some(&e) = spec.eigenvalues.iter().find(|&&e| e < -1e-12) {
        return Err(QgtError::NotPsd { eigenvalue: e });
    }
    let n = spec.dim();
    let mut m = ComplexMatrix::zeros(n);
    for (e, v) in spec.eigenvalues.iter().zip(&spec.eigenvectors) {
        let root = e.max(0.0).sqrt();
        m = &m + &ComplexMatrix::outer(v, v).scale(Complex64::new(root, 0.0));
    }
    HermitianOperator::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        HermitianOperator::new(&m + &m.adjoint()).unwrap()
    }

    fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        // eigenvectors of a random Hermitian matrix form a unitary
        let spec = eigh(&random_hermitian(n, rng)).unwrap();
        let mut u = ComplexMatrix::zeros(n);
        for (j, v) in spec.eigenvectors().iter().enumerate() {
            for i in 0..n {
                u[(i, j)] = v[i];
            }
        }
        u
    }

    #[test]
    fn singular_values_of_known_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sigma = [3.0, 1.0, 1e-9, 0.0];
        let u = random_unitary(4, &mut rng);
        let v = random_unitary(4, &mut rng);
        let a = &(&u * &ComplexMatrix::diagonal(&sigma)) * &v.adjoint();
        let mut got = singular_values(&a);
        got.sort_by(|x, y| y.total_cmp(x));
        for (g, e) in got.iter().zip(sigma) {
            assert!((g - e).abs() < 1e-14, "{got:?}");
        }
        let h = random_hermitian(3, &mut rng);
        let spec = eigh(&h).unwrap();
        let mut abs: Vec<f64> = spec.eigenvalues().iter().map(|e| e.abs()).collect();
        let mut sv = singular_values(h.matrix());
        abs.sort_by(f64::total_cmp);
        sv.sort_by(f64::total_cmp);
        for (x, y) in abs.iter().zip(&sv) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    fn residual(h: &HermitianOperator, spec: &SpectralDecomposition) -> f64 {
        let mut worst: f64 = 0.0;
        for (e, v) in spec.eigenvalues().iter().zip(spec.eigenvectors()) {
            let hv = h.matrix().mul_vec(v);
            for (a, b) in hv.iter().zip(v) {
                worst = worst.max((a - b * e).norm());
            }
        }
        worst
    }

    #[test]
    fn hermitian_check() {
        let [_, _, sz] = pauli();
        assert!(check_hermitian(&sz, 1e-12));
        let m =
            ComplexMatrix::from_rows(&[&[c(0.0, 0.0), c(0.0, 1.0)], &[c(0.0, 1.0), c(0.0, 0.0)]])
                .unwrap();
        assert!(!check_hermitian(&m, 1e-12));
        assert!(HermitianOperator::new(m).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_hermitian(5, &mut rng);
        assert!(check_hermitian(h.matrix(), 1e-12));
    }

    #[test]
    fn non_square_is_dimension_error() {
        let err = ComplexMatrix::from_row_major(2, 3, vec![ZERO; 6]).unwrap_err();
        assert!(matches!(err, QgtError::Dimension(_)));
        let err = ComplexMatrix::from_rows(&[&[ONE, ZERO], &[ONE]]).unwrap_err();
        assert!(matches!(err, QgtError::Dimension(_)));
    }

    #[test]
    fn pauli_spectra() {
        let [sx, _, sz] = pauli();
        let spec = eigh(&HermitianOperator::new(sz).unwrap()).unwrap();
        assert_eq!(spec.eigenvalues(), &[-1.0, 1.0]);
        assert_eq!(spec.eigenvector(0), &[ZERO, ONE]);
        assert_eq!(spec.eigenvector(1), &[ONE, ZERO]);

        let spec = eigh(&HermitianOperator::new(sx).unwrap()).unwrap();
        assert!((spec.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((spec.eigenvalues()[1] - 1.0).abs() < 1e-15);
        let r = 1.0 / 2f64.sqrt();
        let v = spec.eigenvector(0);
        assert!((v[0] - c(r, 0.0)).norm() < 1e-15);
        assert!((v[1] - c(-r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn random_residuals_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=8 {
            let h = random_hermitian(n, &mut rng);
            let spec = eigh(&h).unwrap();
            assert!(residual(&h, &spec) < 1e-12, "n = {n}");
            for a in 0..n {
                for b in 0..n {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    let o = inner(spec.eigenvector(a), spec.eigenvector(b));
                    assert!((o - c(expect, 0.0)).norm() < 1e-12);
                }
            }
            assert!(spec.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn deterministic_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(6, &mut rng);
        assert_eq!(eigh(&h).unwrap(), eigh(&h).unwrap());
    }

    #[test]
    fn reconstruct_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let h = random_hermitian(4, &mut rng);
            let spec = eigh(&h).unwrap();
            let again = eigh(&HermitianOperator::new(spec.reconstruct()).unwrap()).unwrap();
            for (a, b) in spec.eigenvalues().iter().zip(again.eigenvalues()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn spectrum_is_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=6 {
            let h = random_hermitian(n, &mut rng);
            let u = random_unitary(n, &mut rng);
            let rotated = &(&u * h.matrix()) * &u.adjoint();
            let a = eigh(&h).unwrap();
            let b = eigh(&HermitianOperator::new(rotated).unwrap()).unwrap();
            for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn eigh2_matches_closed_forms_and_eigh() {
        let spec = eigh2([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(spec.eigenvalues(), &[-1.0, 1.0]);

        // SSH with J1 = 2, J2 = 1 at k = π/2: R̃ = √(1 + r² + 2r cos k) = √5
        let k = core::f64::consts::FRAC_PI_2;
        let spec = eigh2([-2.0 - k.cos(), k.sin(), 0.0]).unwrap();
        assert!((spec.eigenvalues()[1] - 5f64.sqrt()).abs() < 1e-14);
        assert!((spec.eigenvalues()[0] + 5f64.sqrt()).abs() < 1e-14);

        let spec = eigh2([1.0, 0.3, 1.0]).unwrap();
        assert!((spec.eigenvalues()[1] - 2.09f64.sqrt()).abs() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut points: Vec<[f64; 3]> = (0..200)
            .map(|_| {
                [
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                ]
            })
            .collect();
        points.extend_from_slice(&[
            [0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, -1.0, 0.0],
        ]);
        for d in points {
            let closed = eigh2(d).unwrap();
            let jacobi = eigh(&HermitianOperator::from_bloch(d)).unwrap();
            for n in 0..2 {
                assert!((closed.eigenvalues()[n] - jacobi.eigenvalues()[n]).abs() < 1e-12);
                for i in 0..2 {
                    let diff = (closed.eigenvector(n)[i] - jacobi.eigenvector(n)[i]).norm();
                    assert!(diff < 1e-12, "d = {d:?}, level {n}: {diff:e}");
                }
            }
        }
    }

    #[test]
    fn eigh2_rejects_zero_vector() {
        assert!(eigh2([0.0; 3]).unwrap_err().is_degeneracy());
    }

    #[test]
    fn degeneracy_flag() {
        let h = HermitianOperator::new(ComplexMatrix::identity(3)).unwrap();
        let spec = eigh(&h).unwrap();
        assert!(spec.is_degenerate());
        let spec = eigh(
            &HermitianOperator::new(ComplexMatrix::diagonal(&[0.0, 1.0, 1.0 + 1e-12])).unwrap(),
        )
        .unwrap();
        assert!(spec.is_degenerate());
        assert!(!spec.is_level_degenerate(0));
        assert!(spec.is_level_degenerate(2));
    }

    #[test]
    fn psd_square_roots() {
        let id = HermitianOperator::new(ComplexMatrix::identity(3)).unwrap();
        assert!(
            psd_sqrt(&id)
                .unwrap()
                .matrix()
                .max_abs_diff(&ComplexMatrix::identity(3))
                < 1e-15
        );

        let d = HermitianOperator::new(ComplexMatrix::diagonal(&[4.0, 9.0])).unwrap();
        let r = psd_sqrt(&d).unwrap();
        assert!(
            r.matrix()
                .max_abs_diff(&ComplexMatrix::diagonal(&[2.0, 3.0]))
                < 1e-15
        );

        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 2..=6 {
            let mut a = ComplexMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                }
            }
            let aa = &a * &a.adjoint();
            let rho = aa.scale(Complex64::new(1.0 / aa.trace().re, 0.0));
            let root = psd_sqrt(&HermitianOperator::new(rho.clone()).unwrap()).unwrap();
            let back = root.matrix() * root.matrix();
            assert!(back.max_abs_diff(&rho) < 1e-10);
        }

        let neg = HermitianOperator::new(ComplexMatrix::diagonal(&[1.0, -0.1])).unwrap();
        assert!(matches!(psd_sqrt(&neg), Err(QgtError::NotPsd { .. })));
        let tiny = HermitianOperator::new(ComplexMatrix::diagonal(&[1.0, -1e-14])).unwrap();
        assert!(psd_sqrt(&tiny).is_ok());
    }
}
