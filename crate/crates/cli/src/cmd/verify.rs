use std::f64::consts::{PI, TAU};

use qgt_core::distance::{brute_force_sjoqvist, bures_distance_finite, sjoqvist_distance_finite};
use qgt_core::geomphase::{dirac_theta_g, DEFAULT_RADIAL_NODES};
use qgt_core::models::{BcsModel, DiracModel, RandomModel, SshModel};
use qgt_core::qgt::{
    eigenvector_path_qgt, ground_state_qgt, parallel_transport_rates, pythagorean_residual,
    sjoqvist_qgt, sjoqvist_qgt_with_gauge,
};
use qgt_core::thermal::{gibbs_state, ThermalState};
use qgt_core::{ParamModel, QgtPoint, SpectralDecomposition, StepScheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{pool, Status};
use crate::args::VerifyArgs;
use crate::output::{config_hash, write_json};

/// Random draws with a level spacing below this are redrawn.
const MIN_GAP: f64 = 0.05;

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
enum Bound {
    /// `worst ≤ tolerance`
    Upper,
    /// `worst ≥ tolerance`
    Lower,
}

#[derive(Debug, Serialize)]
struct Invariant {
    name: &'static str,
    samples: usize,
    worst: f64,
    tolerance: f64,
    bound: Bound,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    /// Command that rebuilds the worst (or failing) sample.
    reproduce: String,
}

/// One random or fixed draw: how to rebuild it, and its metrics.
struct Sample {
    reproduce: String,
    metrics: anyhow::Result<Vec<f64>>,
}

/// Per-sample stream so each draw is independent of thread scheduling and sample count.
fn sample_rng(seed: u64, suite: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((suite << 32) | i as u64);
    rng
}

fn collect(
    samples: &[Sample],
    metric: usize,
    name: &'static str,
    tolerance: f64,
    bound: Bound,
) -> Invariant {
    let mut worst = match bound {
        Bound::Upper => f64::NEG_INFINITY,
        Bound::Lower => f64::INFINITY,
    };
    let mut reproduce = String::new();
    let mut error = None;
    for s in samples {
        match &s.metrics {
            Ok(v) => {
                let x = v[metric];
                let worse = match bound {
                    Bound::Upper => !(x <= worst),
                    Bound::Lower => !(x >= worst),
                };
                if worse && error.is_none() {
                    worst = x;
                    reproduce = s.reproduce.clone();
                }
            }
            Err(e) if error.is_none() => {
                error = Some(format!("{e:#}"));
                reproduce = s.reproduce.clone();
            }
            Err(_) => {}
        }
    }
    let pass = error.is_none()
        && match bound {
            Bound::Upper => worst <= tolerance,
            Bound::Lower => worst >= tolerance,
        };
    Invariant {
        name,
        samples: samples.len(),
        worst,
        tolerance,
        bound,
        pass,
        error,
        reproduce,
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn draw_gapped(rng: &mut ChaCha8Rng, levels: usize, params: usize) -> (RandomModel, Vec<f64>) {
    loop {
        let model = RandomModel::new(levels, params, rng.random()).expect("valid sizes");
        let r: Vec<f64> = (0..params).map(|_| rng.random_range(-1.0..1.0)).collect();
        if matches!(model.min_gap(&r), Ok(g) if g > MIN_GAP) {
            return (model, r);
        }
    }
}

fn random_point_command(model: &RandomModel, r: &[f64], t: f64) -> String {
    let coords: String = r
        .iter()
        .enumerate()
        .map(|(i, x)| format!(" --coord R{i}={x}"))
        .collect();
    format!(
        "qgt point --model random --levels {} --params {} --seed {}{coords} --temp {t}",
        model.n_levels(),
        r.len(),
        model.seed()
    )
}

/// Phases that jump erratically from point to point: a worst case for any gauge-dependent step.
fn erratic_phases(salt: u64, r: &[f64], n: usize) -> Vec<f64> {
    let mut h = salt;
    for x in r {
        h = h.rotate_left(17) ^ x.to_bits().wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(h);
    (0..n).map(|_| rng.random_range(-PI..PI)).collect()
}

fn random_tensor_sample(seed: u64, i: usize, scheme: &StepScheme) -> Sample {
    let mut rng = sample_rng(seed, 1, i);
    let (model, r) = draw_gapped(&mut rng, 2 + i % 5, 1 + i % 3);
    let t = rng.random_range(0.2..3.0);
    let salt: u64 = rng.random();
    let gauge = |p: &[f64], spec: &mut SpectralDecomposition| {
        let chi = erratic_phases(salt, p, spec.dim());
        spec.rephase(&chi);
    };
    let metrics = (|| -> anyhow::Result<Vec<f64>> {
        let plain = sjoqvist_qgt(&model, &r, t, scheme)?;
        let gauged = sjoqvist_qgt_with_gauge(&model, &r, t, scheme, &gauge)?;
        let mut antisym: f64 = 0.0;
        let mut min_eig = f64::INFINITY;
        for q in [&plain, &gauged] {
            antisym = antisym.max(antisymmetry(q));
            min_eig = min_eig
                .min(q.g_fr.min_symmetric_eigenvalue())
                .min(q.g_fs.min_symmetric_eigenvalue());
        }
        Ok(vec![
            plain.max_abs_diff(&gauged),
            plain
                .decomposition_defect()
                .max(gauged.decomposition_defect()),
            antisym,
            -min_eig,
        ])
    })();
    Sample {
        reproduce: random_point_command(&model, &r, t),
        metrics,
    }
}

fn antisymmetry(q: &QgtPoint) -> f64 {
    let k = q.n_params();
    let mut worst: f64 = 0.0;
    for a in 0..k {
        for b in 0..k {
            worst = worst.max((q.omega[(a, b)] + q.omega[(b, a)]).abs());
        }
    }
    worst
}

fn pythagorean_sample(seed: u64, i: usize, scheme: &StepScheme, verify_cmd: &str) -> Sample {
    let mut rng = sample_rng(seed, 2, i);
    let levels = 3 + i % 2;
    let params = 1 + i % 3;
    let (model, r) = draw_gapped(&mut rng, levels, params);
    let t = rng.random_range(0.3..3.0);
    let mut dir: Vec<f64> = (0..params).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    dir.iter_mut().for_each(|x| *x /= norm);
    let rates: Vec<f64> = (0..levels).map(|_| rng.random_range(-2.0..2.0)).collect();
    let dt = 1e-4;
    let metrics = (|| -> anyhow::Result<Vec<f64>> {
        let a = pythagorean_residual(&model, &r, &dir, &rates, t, dt)?;
        let b = pythagorean_residual(&model, &r, &dir, &rates, t, dt / 2.0)?;
        let pt = parallel_transport_rates(&model, &r, &dir, scheme)?;
        let c = pythagorean_residual(&model, &r, &dir, &pt, t, dt)?;
        let ratio = a.residual / b.residual;
        Ok(vec![ratio, ratio.log2(), c.phase_term])
    })();
    Sample {
        reproduce: format!(
            "{verify_cmd}  # pythagorean sample {i}: {}",
            random_point_command(&model, &r, t)
        ),
        metrics,
    }
}

fn random_thermal_state(rng: &mut ChaCha8Rng, levels: usize) -> qgt_core::Result<ThermalState> {
    let model = RandomModel::new(levels, 1, rng.random())?;
    let t = rng.random_range(0.3..3.0);
    gibbs_state(model.spectrum(&[rng.random_range(-1.0..1.0)])?, t)
}

fn distance_sample(seed: u64, i: usize, brute: bool, verify_cmd: &str) -> Sample {
    let mut rng = sample_rng(seed, if brute { 4 } else { 3 }, i);
    let levels = 2 + i % 3;
    let metrics = (|| -> anyhow::Result<Vec<f64>> {
        let a = random_thermal_state(&mut rng, levels)?;
        let b = random_thermal_state(&mut rng, levels)?;
        let s = sjoqvist_distance_finite(&a, &b)?;
        if brute {
            return Ok(vec![(brute_force_sjoqvist(&a, &b, 1024)? - s).abs()]);
        }
        let bures = bures_distance_finite(&a, &b)?;
        let same = sjoqvist_distance_finite(&a, &a)?.max(bures_distance_finite(&a, &a)?);
        Ok(vec![bures - s, same])
    })();
    let suite = if brute {
        "brute-force distance"
    } else {
        "distance"
    };
    Sample {
        reproduce: format!("{verify_cmd}  # {suite} sample {i}"),
        metrics,
    }
}

fn eigenvector_sample(seed: u64, i: usize, scheme: &StepScheme) -> Sample {
    let mut rng = sample_rng(seed, 5, i);
    let levels = 2 + i % 4;
    let params = 1 + i % 3;
    let (model, r) = draw_gapped(&mut rng, levels, params);
    let t = rng.random_range(0.3..3.0);
    let coeff: Vec<f64> = (0..levels * params)
        .map(|_| rng.random_range(-1.5..1.5))
        .collect();
    let chi = |p: &[f64], spec: &mut SpectralDecomposition| {
        let phases: Vec<f64> = (0..spec.dim())
            .map(|n| {
                p.iter()
                    .enumerate()
                    .map(|(mu, x)| (coeff[n * params + mu] * x).sin())
                    .sum()
            })
            .collect();
        spec.rephase(&phases);
    };
    let metrics = (|| -> anyhow::Result<Vec<f64>> {
        let proj = sjoqvist_qgt(&model, &r, t, scheme)?;
        let ev = eigenvector_path_qgt(&model, &r, t, scheme, Some(&chi))?;
        Ok(vec![ev
            .gamma
            .max_abs_diff(&proj.g_s)
            .max(ev.eq_form.max_abs_diff(&proj.g_s))])
    })();
    Sample {
        reproduce: random_point_command(&model, &r, t),
        metrics,
    }
}

/// A built-in model at one point, with the `qgt point` flags that select it.
struct Fixed {
    model: Box<dyn ParamModel + Send + Sync>,
    flags: String,
    r: Vec<f64>,
    coords: String,
}

fn fixed_points() -> Vec<Fixed> {
    let mut out = Vec::new();
    for (j1, j2) in [(0.5, 1.0), (2.0, 1.0), (1.3, 0.7)] {
        for i in 0..12 {
            let k = -PI + TAU * (i as f64 + 0.5) / 12.0;
            out.push(Fixed {
                model: Box::new(SshModel::new(j1, j2).expect("valid hoppings")),
                flags: format!("--model ssh --J1 {j1} --J2 {j2}"),
                r: vec![k],
                coords: format!("--k {k}"),
            });
        }
    }
    for mass in [-1.0, 0.4, 1.5] {
        for i in 0..5 {
            for j in 0..4 {
                let (kx, ky) = (-1.2 + 0.55 * i as f64, -0.9 + 0.6 * j as f64);
                out.push(Fixed {
                    model: Box::new(DiracModel::new(mass)),
                    flags: format!("--model dirac --mass {mass}"),
                    r: vec![kx, ky],
                    coords: format!("--kx {kx} --ky {ky}"),
                });
            }
        }
    }
    out
}

fn oracle_sample(f: &Fixed, t: f64, scheme: &StepScheme) -> Sample {
    let metrics = (|| -> anyhow::Result<Vec<f64>> {
        let q = sjoqvist_qgt(f.model.as_ref(), &f.r, t, scheme)?;
        let a = f
            .model
            .analytic_qgt(&f.r, t)
            .ok_or_else(|| anyhow::anyhow!("no closed form"))??;
        Ok(vec![relative_score(&q, &a.g_fr, &a.g_fs, &a.omega)])
    })();
    Sample {
        reproduce: format!("qgt point {} {} --temp {t}", f.flags, f.coords),
        metrics,
    }
}

/// Worst `|num − closed form| / max(1e−6 |closed form|, 1e−9)`; at most 1 passes.
fn relative_score(
    q: &QgtPoint,
    fr: &qgt_core::linalg::RealMatrix,
    fs: &qgt_core::linalg::RealMatrix,
    omega: &qgt_core::linalg::RealMatrix,
) -> f64 {
    let score = |num: f64, ana: f64| (num - ana).abs() / (1e-6 * ana.abs()).max(1e-9);
    let k = q.n_params();
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            worst = worst
                .max(score(q.g_fr[(i, j)], fr[(i, j)]))
                .max(score(q.g_fs[(i, j)], fs[(i, j)]))
                .max(score(q.omega[(i, j)], omega[(i, j)]));
        }
    }
    worst
}

fn bcs_oracle_sample(i: usize, scheme: &StepScheme, verify_cmd: &str) -> Sample {
    // superfluid (Δ, μ) pairs typical of intermediate and strong coupling
    let (delta, mu) = [(3.33, -1.1), (4.47, -3.0), (11.72, -10.3)][i % 3];
    let t = [0.3, 1.0, 4.0][i / 3 % 3];
    let k = [0.3, 0.8, 1.7][i / 9 % 3];
    let r = vec![k, 0.5 * k, PI - k];
    let metrics = (|| -> anyhow::Result<Vec<f64>> {
        let model = BcsModel::new(delta, mu, 1.0)?;
        let q = sjoqvist_qgt(&model, &r, t, scheme)?;
        let a = model
            .analytic_qgt(&r, t)
            .ok_or_else(|| anyhow::anyhow!("no closed form"))??;
        Ok(vec![relative_score(&q, &a.g_fr, &a.g_fs, &a.omega)])
    })();
    Sample {
        reproduce: format!("{verify_cmd}  # BCS oracle Δ={delta} μ={mu} k={r:?} T={t}"),
        metrics,
    }
}

fn zero_temperature_sample(f: &Fixed, scheme: &StepScheme) -> Sample {
    let metrics = (|| -> anyhow::Result<Vec<f64>> {
        let model = f.model.as_ref();
        let spec = model.spectrum(&f.r)?;
        let gap = spec.eigenvalues()[1] - spec.eigenvalues()[0];
        let cold = sjoqvist_qgt(model, &f.r, 1e-3 * gap, scheme)?;
        let ground = ground_state_qgt(model, &f.r, scheme)?;
        let mut worst = cold.g_s.max_abs_diff(&ground.g_s);
        if let Some(a) = model.analytic_qgt(&f.r, 0.0) {
            let a = a?;
            let k = f.r.len();
            for i in 0..k {
                for j in 0..k {
                    let z = ground.g_s[(i, j)];
                    worst = worst
                        .max((z.re - a.g_fs[(i, j)]).abs())
                        .max((z.im + a.omega[(i, j)]).abs());
                }
            }
        }
        Ok(vec![worst])
    })();
    Sample {
        reproduce: format!("qgt point {} {} --temp 0", f.flags, f.coords),
        metrics,
    }
}

fn dirac_odd_sample(m: f64, t: f64) -> Sample {
    let metrics = (|| -> anyhow::Result<Vec<f64>> {
        let p = dirac_theta_g(m, t, DEFAULT_RADIAL_NODES)?;
        let q = dirac_theta_g(-m, t, DEFAULT_RADIAL_NODES)?;
        Ok(vec![(p + q).abs(), p.abs() - std::f64::consts::FRAC_PI_2])
    })();
    Sample {
        reproduce: format!(
            "qgt phase --model dirac --range mass={}:{}:2 --temp {t}",
            -m.abs(),
            m.abs()
        ),
        metrics,
    }
}

pub fn run(args: &VerifyArgs) -> anyhow::Result<Status> {
    if args.samples == 0 {
        anyhow::bail!("--samples must be at least 1");
    }
    let seed = args.seed;
    let n = args.samples;
    let scheme = StepScheme::default();
    let verify_cmd = format!("qgt verify --seed {seed} --samples {n}");
    let pool = pool(args.output.threads)?;

    let invariants: Vec<Invariant> = pool.install(|| {
        let mut out = Vec::new();

        let tensors: Vec<Sample> = (0..n)
            .into_par_iter()
            .map(|i| random_tensor_sample(seed, i, &scheme))
            .collect();
        out.push(collect(
            &tensors,
            0,
            "gauge_invariance",
            1e-12,
            Bound::Upper,
        ));
        out.push(collect(
            &tensors,
            1,
            "gs_decomposition",
            1e-12,
            Bound::Upper,
        ));
        out.push(collect(
            &tensors,
            2,
            "omega_antisymmetry",
            0.0,
            Bound::Upper,
        ));
        out.push(collect(
            &tensors,
            3,
            "metric_psd_negative_eigenvalue",
            1e-9,
            Bound::Upper,
        ));

        let n_pyth = (n / 2).max(1);
        let pyth: Vec<Sample> = (0..n_pyth)
            .into_par_iter()
            .map(|i| pythagorean_sample(seed, i, &scheme, &verify_cmd))
            .collect();
        out.push(collect(
            &pyth,
            0,
            "pythagorean_halving_ratio",
            5.0,
            Bound::Lower,
        ));
        let orders: Vec<f64> = pyth
            .iter()
            .filter_map(|s| s.metrics.as_ref().ok().map(|v| v[1]))
            .collect();
        let complete = orders.len() == pyth.len();
        let med = median(orders);
        out.push(Invariant {
            name: "pythagorean_median_order",
            samples: pyth.len(),
            worst: med,
            tolerance: 2.8,
            bound: Bound::Lower,
            pass: complete && med >= 2.8,
            error: (!complete).then(|| "some samples failed to evaluate".to_string()),
            reproduce: verify_cmd.clone(),
        });
        out.push(collect(
            &pyth,
            2,
            "parallel_transport_phase_term",
            1e-10,
            Bound::Upper,
        ));

        let n_dist = n * 5 / 2;
        let dist: Vec<Sample> = (0..n_dist)
            .into_par_iter()
            .map(|i| distance_sample(seed, i, false, &verify_cmd))
            .collect();
        out.push(collect(
            &dist,
            0,
            "bures_below_sjoqvist",
            1e-10,
            Bound::Upper,
        ));
        out.push(collect(
            &dist,
            1,
            "distance_identical_states",
            1e-12,
            Bound::Upper,
        ));
        let brute: Vec<Sample> = (0..n_pyth)
            .into_par_iter()
            .map(|i| distance_sample(seed, i, true, &verify_cmd))
            .collect();
        out.push(collect(
            &brute,
            0,
            "brute_force_sjoqvist",
            1e-4,
            Bound::Upper,
        ));

        let n_eig = (n / 4).max(1);
        let eig: Vec<Sample> = (0..n_eig)
            .into_par_iter()
            .map(|i| eigenvector_sample(seed, i, &scheme))
            .collect();
        out.push(collect(
            &eig,
            0,
            "eigenvector_path_identity",
            1e-6,
            Bound::Upper,
        ));

        let fixed = fixed_points();
        let temps = [0.05, 0.5, 2.0, 20.0];
        let jobs: Vec<(&Fixed, f64)> = fixed
            .iter()
            .flat_map(|f| temps.iter().map(move |&t| (f, t)))
            .collect();
        let mut oracle: Vec<Sample> = jobs
            .par_iter()
            .map(|(f, t)| oracle_sample(f, *t, &scheme))
            .collect();
        oracle.extend(
            (0..27)
                .into_par_iter()
                .map(|i| bcs_oracle_sample(i, &scheme, &verify_cmd))
                .collect::<Vec<_>>(),
        );
        out.push(collect(
            &oracle,
            0,
            "closed_form_relative_score",
            1.0,
            Bound::Upper,
        ));

        let cold: Vec<Sample> = fixed
            .par_iter()
            .map(|f| zero_temperature_sample(f, &scheme))
            .collect();
        out.push(collect(
            &cold,
            0,
            "zero_temperature_limit",
            1e-4,
            Bound::Upper,
        ));

        let odd: Vec<Sample> = [0.2, 1.0, 3.0]
            .iter()
            .flat_map(|&m| [0.01, 0.5, 2.0].map(move |t| (m, t)))
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&(m, t)| dirac_odd_sample(m, t))
            .collect();
        out.push(collect(
            &odd,
            0,
            "dirac_phase_odd_in_mass",
            1e-10,
            Bound::Upper,
        ));
        out.push(collect(
            &odd,
            1,
            "dirac_phase_bounded_excess",
            1e-12,
            Bound::Upper,
        ));
        out
    });

    let pass = invariants.iter().all(|i| i.pass);
    let config = json!({ "command": "verify", "seed": seed, "samples": n, "step_scheme": scheme.describe() });
    let report = json!({
        "pass": pass,
        "seed": seed,
        "samples": n,
        "step_scheme": scheme.describe(),
        "config_sha256": config_hash(&config),
        "invariants": invariants,
    });
    write_json(&report, &args.output)?;
    for inv in invariants.iter().filter(|i| !i.pass) {
        eprintln!(
            "invariant {} failed: worst {:e} vs tolerance {:e}{}; reproduce with: {}",
            inv.name,
            inv.worst,
            inv.tolerance,
            inv.error
                .as_deref()
                .map(|e| format!(" ({e})"))
                .unwrap_or_default(),
            inv.reproduce
        );
    }
    Ok(if pass { Status::Ok } else { Status::Failed })
}
