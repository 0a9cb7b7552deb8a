//! Berry phases from discrete Wilson loops and the mixed-state phase `θ_g = ∫_S Ω`.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use core::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{QgtError, Result};
use crate::linalg::{inner, RealMatrix, SpectralDecomposition};
use crate::models::ParamModel;
use crate::qgt::{
    ground_state_qgt, level_qgt, sjoqvist_qgt, sjoqvist_qgt_with_gauge, Gauge, StepScheme,
    MIN_PATH_OVERLAP,
};
use crate::quadrature::GaussLegendre;
use crate::thermal::gibbs_weights;

/// Smallest number of segments accepted for a loop.
pub const MIN_LOOP_POINTS: usize = 16;

/// Default Gauss-Legendre order for radial integrals.
pub const DEFAULT_RADIAL_NODES: usize = 256;

/// Closed loop of `M` distinct parameter points; the last connects back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopPath {
    points: Vec<Vec<f64>>,
}

impl LoopPath {
    /// From an explicitly closed list (`first == last`), which is stored without the repeat.
    pub fn new(mut points: Vec<Vec<f64>>) -> Result<Self> {
        if points.len() < 2 || points.first() != points.last() {
            return Err(QgtError::Domain("loop must end where it starts".into()));
        }
        points.pop();
        Self::periodic(points)
    }

    /// From `M` distinct points whose closing segment runs from the last back to the first.
    pub fn periodic(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.len() < MIN_LOOP_POINTS {
            return Err(QgtError::Domain(alloc::format!(
                "loop needs at least {MIN_LOOP_POINTS} points, got {}",
                points.len()
            )));
        }
        let k = points[0].len();
        if points.iter().any(|p| p.len() != k) {
            return Err(QgtError::Dimension(
                "loop points must share one dimension".into(),
            ));
        }
        Ok(Self { points })
    }

    /// Counter-clockwise circle in the `(axes.0, axes.1)` plane through `base`.
    pub fn circle(
        base: &[f64],
        axes: (usize, usize),
        center: [f64; 2],
        radius: f64,
        m: usize,
    ) -> Result<Self> {
        Self::periodic(
            (0..m)
                .map(|j| {
                    let phi = TAU * j as f64 / m as f64;
                    let mut p = base.to_vec();
                    p[axes.0] = center[0] + radius * phi.cos();
                    p[axes.1] = center[1] + radius * phi.sin();
                    p
                })
                .collect(),
        )
    }

    /// Momentum loop `k_axis = 2πj/M` across the Brillouin zone, other coordinates from `base`.
    pub fn brillouin_zone(base: &[f64], axis: usize, m: usize) -> Result<Self> {
        Self::periodic(
            (0..m)
                .map(|j| {
                    let mut p = base.to_vec();
                    p[axis] = TAU * j as f64 / m as f64;
                    p
                })
                .collect(),
        )
    }

    /// Latitude `θ = α`, `φ = 2πj/M` on a `(θ, φ)` sphere.
    pub fn latitude(alpha: f64, m: usize) -> Result<Self> {
        Self::periodic(
            (0..m)
                .map(|j| alloc::vec![alpha, TAU * j as f64 / m as f64])
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
}

fn wrap(x: f64) -> f64 {
    let y = x - TAU * ((x + PI) / TAU).floor();
    // (x + π) mod 2π lands in [0, 2π), so y ∈ [−π, π); move −π to π
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

fn loop_spectra(
    model: &dyn ParamModel,
    path: &LoopPath,
    n: usize,
    gauge: Option<Gauge<'_>>,
) -> Result<Vec<SpectralDecomposition>> {
    path.points
        .iter()
        .map(|r| {
            let mut spec = model.spectrum(r)?;
            if n >= spec.dim() {
                return Err(QgtError::IndexOutOfRange {
                    index: n,
                    len: spec.dim(),
                });
            }
            if spec.is_level_degenerate(n) {
                return Err(QgtError::Degenerate {
                    point: r.clone(),
                    gap: spec.level_gap(n),
                });
            }
            if let Some(g) = gauge {
                g(r, &mut spec);
            }
            Ok(spec)
        })
        .collect()
}

/// `−Σ_j arg⟨n_j|n_{j+1}⟩` before wrapping.
fn wilson_sum(spectra: &[SpectralDecomposition], n: usize) -> Result<f64> {
    let m = spectra.len();
    let mut total = 0.0;
    for j in 0..m {
        let o = inner(
            spectra[j].eigenvector(n),
            spectra[(j + 1) % m].eigenvector(n),
        );
        if o.norm() <= MIN_PATH_OVERLAP {
            return Err(QgtError::SmallOverlap {
                step: j,
                overlap: o.norm(),
            });
        }
        total -= o.arg();
    }
    Ok(total)
}

/// Berry phase of level `n` around `path` in `(−π, π]`, as a discrete Wilson loop.
pub fn berry_phase_loop(model: &dyn ParamModel, path: &LoopPath, n: usize) -> Result<f64> {
    Ok(wrap(wilson_sum(&loop_spectra(model, path, n, None)?, n)?))
}

/// As [`berry_phase_loop`], with `gauge` applied at every loop point.
pub fn berry_phase_loop_with_gauge(
    model: &dyn ParamModel,
    path: &LoopPath,
    n: usize,
    gauge: Gauge<'_>,
) -> Result<f64> {
    Ok(wrap(wilson_sum(
        &loop_spectra(model, path, n, Some(gauge))?,
        n,
    )?))
}

/// Berry phase of level `n` with its `2π` branch fixed by a contraction.
///
/// `family(s)` must deform continuously from a point-like loop at `s = 0`
/// (Berry phase 0) to the target loop at `s = 1`; the phase is followed
/// through `steps` intermediate loops, so the result equals the curvature
/// flux through the swept surface rather than its principal value.
pub fn berry_phase_contracted(
    model: &dyn ParamModel,
    family: &dyn Fn(f64) -> Result<LoopPath>,
    n: usize,
    steps: usize,
) -> Result<f64> {
    if steps == 0 {
        return Err(QgtError::Domain(
            "contraction needs at least one step".into(),
        ));
    }
    let mut lifted = wrap(wilson_sum(
        &loop_spectra(model, &family(0.0)?, n, None)?,
        n,
    )?);
    for i in 1..=steps {
        let s = i as f64 / steps as f64;
        let principal = wrap(wilson_sum(&loop_spectra(model, &family(s)?, n, None)?, n)?);
        lifted += wrap(principal - lifted);
    }
    Ok(lifted)
}

/// `F_n = −2 Im Q^n` at one point.
pub fn berry_curvature_point(
    model: &dyn ParamModel,
    r: &[f64],
    n: usize,
    scheme: &StepScheme,
) -> Result<RealMatrix> {
    let q = level_qgt(model, r, n, scheme)?;
    Ok(RealMatrix::from_fn(q.dim(), |i, j| -2.0 * q[(i, j)].im))
}

/// Quadrature nodes on a 2D slice of parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    base: Vec<f64>,
    axes: (usize, usize),
    nodes: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl SurfaceGrid {
    fn validate(base: &[f64], axes: (usize, usize)) -> Result<()> {
        if axes.0 == axes.1 || axes.0 >= base.len() || axes.1 >= base.len() {
            return Err(QgtError::Dimension(alloc::format!(
                "slice axes {axes:?} invalid for {} parameters",
                base.len()
            )));
        }
        Ok(())
    }

    /// Gauss-Legendre product rule on `[x0, x1] × [y0, y1]`, oriented `dx ∧ dy`.
    pub fn rectangle(
        base: &[f64],
        axes: (usize, usize),
        x: (f64, f64),
        y: (f64, f64),
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        Self::validate(base, axes)?;
        if !(x.1 > x.0 && y.1 > y.0) {
            return Err(QgtError::Domain(
                "rectangle bounds must be increasing".into(),
            ));
        }
        let qx = GaussLegendre::new(nx)?;
        let qy = GaussLegendre::new(ny)?;
        let mut nodes = Vec::with_capacity(nx * ny);
        let mut weights = Vec::with_capacity(nx * ny);
        for (xi, wx) in qx.on_interval(x.0, x.1) {
            for (yi, wy) in qy.on_interval(y.0, y.1) {
                nodes.push([xi, yi]);
                weights.push(wx * wy);
            }
        }
        Ok(Self {
            base: base.to_vec(),
            axes,
            nodes,
            weights,
        })
    }

    /// Polar rule on a disk: Gauss-Legendre in radius, uniform in angle.
    pub fn disk(
        base: &[f64],
        axes: (usize, usize),
        center: [f64; 2],
        radius: f64,
        n_radial: usize,
        n_angular: usize,
    ) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(QgtError::Domain("disk radius must be positive".into()));
        }
        let q = GaussLegendre::new(n_radial)?;
        let radial: Vec<(f64, f64)> = q
            .on_interval(0.0, radius)
            .map(|(r, w)| (r, r * w))
            .collect();
        Self::polar(base, axes, center, &radial, n_angular)
    }

    /// Whole plane through `k = tan u`, `u ∈ [0, π/2)`, Gauss-Legendre in `u`, uniform in angle.
    pub fn plane(
        base: &[f64],
        axes: (usize, usize),
        center: [f64; 2],
        n_radial: usize,
        n_angular: usize,
    ) -> Result<Self> {
        let q = GaussLegendre::new(n_radial)?;
        let radial: Vec<(f64, f64)> = q
            .on_interval(0.0, FRAC_PI_2)
            .map(|(u, w)| {
                let k = u.tan();
                let sec2 = 1.0 + k * k;
                (k, k * sec2 * w)
            })
            .collect();
        Self::polar(base, axes, center, &radial, n_angular)
    }

    fn polar(
        base: &[f64],
        axes: (usize, usize),
        center: [f64; 2],
        radial: &[(f64, f64)],
        n_angular: usize,
    ) -> Result<Self> {
        Self::validate(base, axes)?;
        if n_angular == 0 {
            return Err(QgtError::Domain(
                "angular grid needs at least one node".into(),
            ));
        }
        let dphi = TAU / n_angular as f64;
        let mut nodes = Vec::with_capacity(radial.len() * n_angular);
        let mut weights = Vec::with_capacity(radial.len() * n_angular);
        for &(r, w) in radial {
            for j in 0..n_angular {
                let phi = (j as f64 + 0.5) * dphi;
                nodes.push([center[0] + r * phi.cos(), center[1] + r * phi.sin()]);
                weights.push(w * dphi);
            }
        }
        Ok(Self {
            base: base.to_vec(),
            axes,
            nodes,
            weights,
        })
    }

    /// Drops the nodes within `radius` of `center` (slice coordinates).
    pub fn exclude_disk(mut self, center: [f64; 2], radius: f64) -> Self {
        let keep: Vec<bool> = self
            .nodes
            .iter()
            .map(|p| (p[0] - center[0]).hypot(p[1] - center[1]) > radius)
            .collect();
        let mut it = keep.iter();
        self.nodes.retain(|_| *it.next().unwrap());
        let mut it = keep.iter();
        self.weights.retain(|_| *it.next().unwrap());
        self
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn axes(&self) -> (usize, usize) {
        self.axes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Full parameter vector of node `i`.
    pub fn point(&self, i: usize) -> Vec<f64> {
        let mut p = self.base.clone();
        p[self.axes.0] = self.nodes[i][0];
        p[self.axes.1] = self.nodes[i][1];
        p
    }
}

fn surface_sum(grid: &SurfaceGrid, mut f: impl FnMut(&[f64]) -> Result<f64>) -> Result<f64> {
    let mut total = 0.0;
    for (i, w) in grid.weights.iter().enumerate() {
        total += w * f(&grid.point(i))?;
    }
    Ok(total)
}

/// `θ_g = ∫_S Ω` over the grid's slice; `t = 0` integrates the ground-state limit.
pub fn omega_surface_integral(
    model: &dyn ParamModel,
    grid: &SurfaceGrid,
    t: f64,
    scheme: &StepScheme,
) -> Result<f64> {
    let (a, b) = grid.axes;
    surface_sum(grid, |r| {
        let q = if t == 0.0 {
            ground_state_qgt(model, r, scheme)?
        } else {
            sjoqvist_qgt(model, r, t, scheme)?
        };
        Ok(q.omega[(a, b)])
    })
}

/// As [`omega_surface_integral`], with `gauge` applied to every spectrum.
pub fn omega_surface_integral_with_gauge(
    model: &dyn ParamModel,
    grid: &SurfaceGrid,
    t: f64,
    scheme: &StepScheme,
    gauge: Gauge<'_>,
) -> Result<f64> {
    let (a, b) = grid.axes;
    surface_sum(grid, |r| {
        Ok(sjoqvist_qgt_with_gauge(model, r, t, scheme, gauge)?.omega[(a, b)])
    })
}

/// `∫_S F_n`, the flux whose loop counterpart is the Berry phase of level `n`.
pub fn curvature_surface_integral(
    model: &dyn ParamModel,
    grid: &SurfaceGrid,
    n: usize,
    scheme: &StepScheme,
) -> Result<f64> {
    let (a, b) = grid.axes;
    surface_sum(grid, |r| {
        Ok(berry_curvature_point(model, r, n, scheme)?[(a, b)])
    })
}

/// Radial form of `θ_g` for the massive Dirac plane:
/// `(π/2) ∫_0^∞ k tanh(β√(k² + m²)) m / (k² + m²)^{3/2} dk`, with `k = tan u`.
pub fn dirac_theta_g(m: f64, t: f64, nodes: usize) -> Result<f64> {
    if m == 0.0 {
        return Err(QgtError::Degenerate {
            point: alloc::vec![0.0, 0.0],
            gap: 0.0,
        });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(QgtError::Domain(alloc::format!(
            "temperature must be positive, got {t}"
        )));
    }
    let q = GaussLegendre::new(nodes)?;
    let m2 = m * m;
    let integral = q.integrate(0.0, FRAC_PI_2, |u| {
        let k = u.tan();
        let sec2 = 1.0 + k * k;
        let d2 = k * k + m2;
        let d = d2.sqrt();
        k * (d / t).tanh() / (d2 * d) * sec2
    });
    // m enters only through m² apart from this factor, so the result is exactly odd
    Ok(FRAC_PI_2 * m * integral)
}

fn check_constant_spectrum(model: &dyn ParamModel, path: &LoopPath) -> Result<Vec<f64>> {
    let first = model.spectrum(&path.points[0])?.eigenvalues().to_vec();
    let scale = first.iter().fold(1.0f64, |acc, e| acc.max(e.abs()));
    for r in &path.points[1..] {
        let spec = model.spectrum(r)?;
        let drift = spec
            .eigenvalues()
            .iter()
            .zip(&first)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        if drift > 1e-9 * scale {
            return Err(QgtError::Precondition(alloc::format!(
                "spectrum varies by {drift:.3e} along the loop; use the surface integral of Ω instead"
            )));
        }
    }
    Ok(first)
}

/// `½ Σ_n λ_n θ_Bn` with principal-branch Berry phases; valid only when the spectrum is constant.
pub fn thermal_berry_phase_constant_spectrum(
    model: &dyn ParamModel,
    path: &LoopPath,
    t: f64,
) -> Result<f64> {
    let energies = check_constant_spectrum(model, path)?;
    let (weights, _) = gibbs_weights(&energies, t)?;
    let mut total = 0.0;
    for (n, l) in weights.iter().enumerate() {
        total += 0.5 * l * berry_phase_loop(model, path, n)?;
    }
    Ok(total)
}

/// As [`thermal_berry_phase_constant_spectrum`], with branches fixed by [`berry_phase_contracted`].
pub fn thermal_berry_phase_contracted(
    model: &dyn ParamModel,
    family: &dyn Fn(f64) -> Result<LoopPath>,
    t: f64,
    steps: usize,
) -> Result<f64> {
    let mut energies = None;
    for i in 0..=steps {
        let e = check_constant_spectrum(model, &family(i as f64 / steps.max(1) as f64)?)?;
        match &energies {
            None => energies = Some(e),
            Some(prev) => {
                let drift = e
                    .iter()
                    .zip(prev)
                    .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
                if drift > 1e-9 * prev.iter().fold(1.0f64, |acc, x| acc.max(x.abs())) {
                    return Err(QgtError::Precondition(
                        "spectrum varies across the contraction".into(),
                    ));
                }
            }
        }
    }
    let (weights, _) = gibbs_weights(&energies.unwrap_or_default(), t)?;
    let mut total = 0.0;
    for (n, l) in weights.iter().enumerate() {
        total += 0.5 * l * berry_phase_contracted(model, family, n, steps)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{BlochSphereModel, DiracModel, SshModel};

    #[test]
    fn wrapping() {
        assert_eq!(wrap(PI), PI);
        assert_eq!(wrap(-PI), PI);
        assert!((wrap(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
        assert!((wrap(0.3) - 0.3).abs() < 1e-16);
    }

    #[test]
    fn ssh_zak_phase() {
        let topo = SshModel::new(0.5, 1.0).unwrap();
        let trivial = SshModel::new(2.0, 1.0).unwrap();
        let bz = LoopPath::brillouin_zone(&[0.0], 0, 2000).unwrap();
        let p = berry_phase_loop(&topo, &bz, 0).unwrap();
        assert!((p.abs() - PI).abs() < 1e-3);
        assert!(berry_phase_loop(&trivial, &bz, 0).unwrap().abs() < 1e-3);
    }

    #[test]
    fn constant_loop_has_no_phase() {
        let m = SshModel::new(2.0, 1.0).unwrap();
        let path = LoopPath::periodic(alloc::vec![alloc::vec![0.7]; 20]).unwrap();
        assert_eq!(berry_phase_loop(&m, &path, 0).unwrap(), 0.0);
        assert!(LoopPath::periodic(alloc::vec![alloc::vec![0.7]; 5]).is_err());
        let mut pts = alloc::vec![alloc::vec![0.0]; 20];
        pts[19] = alloc::vec![1.0];
        assert!(LoopPath::new(pts).is_err());
    }

    #[test]
    fn dirac_monopole_curvature() {
        let f = berry_curvature_point(
            &DiracModel::new(1.0),
            &[0.0, 0.0],
            0,
            &StepScheme::default(),
        )
        .unwrap();
        assert!((f[(0, 1)].abs() - 0.5).abs() < 1e-7);
        assert_eq!(f[(0, 1)], -f[(1, 0)]);
        let one = berry_curvature_point(
            &SshModel::new(2.0, 1.0).unwrap(),
            &[0.4],
            0,
            &StepScheme::default(),
        )
        .unwrap();
        assert_eq!(one.max_abs(), 0.0);
    }

    #[test]
    fn stokes_on_small_patch() {
        let m = DiracModel::new(0.8);
        let center = [0.3, -0.2];
        let radius = 0.25;
        let path = LoopPath::circle(&[0.0, 0.0], (0, 1), center, radius, 400).unwrap();
        let loop_phase = berry_phase_loop(&m, &path, 0).unwrap();
        let grid = SurfaceGrid::disk(&[0.0, 0.0], (0, 1), center, radius, 24, 32).unwrap();
        let flux = curvature_surface_integral(&m, &grid, 0, &StepScheme::default()).unwrap();
        assert!((loop_phase - flux).abs() < 1e-3, "{loop_phase} vs {flux}");
    }

    #[test]
    fn dirac_radial_limits() {
        let p = dirac_theta_g(1.0, 0.01, DEFAULT_RADIAL_NODES).unwrap();
        assert!((p - FRAC_PI_2).abs() < 1e-3);
        assert_eq!(dirac_theta_g(-1.0, 0.01, DEFAULT_RADIAL_NODES).unwrap(), -p);
        let hot = dirac_theta_g(1.0, 10.0, DEFAULT_RADIAL_NODES).unwrap();
        assert!(hot > 0.0 && hot < 0.5 * p);
        assert!(dirac_theta_g(0.0, 1.0, 64).unwrap_err().is_degeneracy());
    }

    #[test]
    fn rectangle_additivity() {
        let m = DiracModel::new(0.6);
        let s = StepScheme::default();
        let whole =
            SurfaceGrid::rectangle(&[0.0, 0.0], (0, 1), (-1.0, 1.0), (0.2, 1.0), 24, 24).unwrap();
        let left =
            SurfaceGrid::rectangle(&[0.0, 0.0], (0, 1), (-1.0, 0.0), (0.2, 1.0), 24, 24).unwrap();
        let right =
            SurfaceGrid::rectangle(&[0.0, 0.0], (0, 1), (0.0, 1.0), (0.2, 1.0), 24, 24).unwrap();
        let w = omega_surface_integral(&m, &whole, 0.7, &s).unwrap();
        let l = omega_surface_integral(&m, &left, 0.7, &s).unwrap();
        let r = omega_surface_integral(&m, &right, 0.7, &s).unwrap();
        assert!((w - l - r).abs() < 1e-10, "{}", w - l - r);
    }

    #[test]
    fn degeneracy_inside_surface() {
        let m = DiracModel::new(0.0);
        let s = StepScheme::default();
        let grid =
            SurfaceGrid::rectangle(&[0.0, 0.0], (0, 1), (-1.0, 1.0), (-1.0, 1.0), 3, 3).unwrap();
        assert!(omega_surface_integral(&m, &grid, 1.0, &s)
            .unwrap_err()
            .is_degeneracy());
        let punctured = grid.exclude_disk([0.0, 0.0], 0.1);
        assert_eq!(punctured.len(), 8);
        assert!(
            omega_surface_integral(&m, &punctured, 1.0, &s)
                .unwrap()
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn bloch_cap() {
        let m = BlochSphereModel::new(1.0).unwrap();
        let alpha = PI / 3.0;
        let t = 1.0;
        let path = LoopPath::latitude(alpha, 4000).unwrap();
        let lower = berry_phase_loop(&m, &path, 0).unwrap();
        assert!((lower - PI * (1.0 - alpha.cos())).abs() < 1e-5);
        let loop_side = thermal_berry_phase_constant_spectrum(&m, &path, t).unwrap();
        let grid =
            SurfaceGrid::rectangle(&[0.0, 0.0], (0, 1), (0.0, alpha), (0.0, TAU), 24, 8).unwrap();
        let surface = omega_surface_integral(&m, &grid, t, &StepScheme::default()).unwrap();
        let exact = 0.5 * (1.0 / t).tanh() * PI * (1.0 - alpha.cos());
        assert!((surface - exact).abs() < 1e-7);
        assert!((loop_side - surface).abs() < 1e-3);
        let pole = LoopPath::latitude(0.0, 64).unwrap();
        assert_eq!(
            thermal_berry_phase_constant_spectrum(&m, &pole, t).unwrap(),
            0.0
        );
        assert!(thermal_berry_phase_constant_spectrum(
            &DiracModel::new(1.0),
            &LoopPath::circle(&[0.0, 0.0], (0, 1), [0.0, 0.0], 0.5, 32).unwrap(),
            t
        )
        .is_ok());
        assert!(thermal_berry_phase_constant_spectrum(
            &DiracModel::new(1.0),
            &LoopPath::circle(&[0.0, 0.0], (0, 1), [0.3, 0.0], 0.5, 32).unwrap(),
            t
        )
        .is_err());
    }

    #[test]
    fn equator_needs_contraction() {
        let m = BlochSphereModel::new(1.0).unwrap();
        let family = |s: f64| LoopPath::latitude(s * FRAC_PI_2, 2000);
        let lower = berry_phase_contracted(&m, &family, 0, 40).unwrap();
        let upper = berry_phase_contracted(&m, &family, 1, 40).unwrap();
        assert!((lower - PI).abs() < 1e-5);
        assert!((upper + PI).abs() < 1e-5);
        let t = 0.5;
        let got = thermal_berry_phase_contracted(&m, &family, t, 40).unwrap();
        assert!((got - 0.5 * (1.0 / t).tanh() * PI).abs() < 1e-5);
    }
}
