use std::f64::consts::TAU;

use anyhow::bail;
use qgt_core::geomphase::{
    dirac_theta_g, omega_surface_integral, thermal_berry_phase_contracted, LoopPath, SurfaceGrid,
};
use qgt_core::models::{BlochSphereModel, DiracModel};
use qgt_core::StepScheme;
use rayon::prelude::*;
use serde_json::json;

use super::{pool, Status};
use crate::args::{parse_axis, Axis, Format, ModelName, PhaseArgs};
use crate::eval::scheme;
use crate::model::ModelSpec;
use crate::output::{stamp, write_table, Cell, ErrorLog, Table};

/// Two independent values of θ_g at one (axis value, T).
enum Outcome {
    Both(f64, f64),
    Undefined,
}

pub fn run(args: &PhaseArgs) -> anyhow::Result<Status> {
    let spec = ModelSpec::from_args(&args.model);
    let (axis_name, first, second) = match spec.name {
        ModelName::Dirac => ("mass", "theta_radial", "theta_grid"),
        ModelName::Bloch => ("alpha", "theta_loop", "theta_surface"),
        other => bail!("phase supports the dirac and bloch models, not {other:?}"),
    };
    let values = match (args.ranges.as_slice(), spec.name) {
        ([], ModelName::Dirac) => vec![spec.constant("mass")],
        ([], _) => vec![args
            .alpha
            .ok_or_else(|| anyhow::anyhow!("give --alpha or --range alpha=A:B:N"))?],
        ([r], _) => {
            let axis: Axis = parse_axis(r)?;
            if axis.name != axis_name {
                bail!(
                    "the {:?} phase axis is {axis_name}, got {}",
                    spec.name,
                    axis.name
                );
            }
            axis.values()
        }
        _ => bail!("phase takes at most one --range axis"),
    };
    let temps = args.temps.resolve()?;
    if let Some(t) = temps.iter().find(|t| **t <= 0.0) {
        bail!("phase needs T > 0, got {t}");
    }
    let scheme = scheme(&args.scheme)?;
    let jobs: Vec<(f64, f64)> = values
        .iter()
        .flat_map(|&v| temps.iter().map(move |&t| (v, t)))
        .collect();

    let pool = pool(args.output.threads)?;
    let results: Vec<anyhow::Result<Outcome>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(v, t)| match spec.name {
                ModelName::Dirac => dirac_row(v, t, args, &scheme),
                _ => bloch_row(spec.constant("field"), v, t, args, &scheme),
            })
            .collect()
    });

    let cols = vec![
        axis_name.to_string(),
        "T".into(),
        first.into(),
        second.into(),
        "abs_diff".into(),
        "status".into(),
    ];
    let mut table = Table::new(cols);
    let mut log = ErrorLog::new(&args.output.out);
    for (i, ((v, t), res)) in jobs.iter().zip(results).enumerate() {
        let row = res.map(|o| {
            let mut row = vec![Cell::Num(*v), Cell::Num(*t)];
            match o {
                Outcome::Both(a, b) => row.extend([
                    Cell::Num(a),
                    Cell::Num(b),
                    Cell::Num((a - b).abs()),
                    Cell::Text("ok".into()),
                ]),
                Outcome::Undefined => row.extend([
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Text("undefined".into()),
                ]),
            }
            row
        });
        if let Err(e) = row.and_then(|r| table.push(r)) {
            log.record(format!(
                "row {i}: model={:?} {axis_name}={v} T={t}: error: {e:#}",
                spec.name
            ));
        }
    }
    let config = json!({
        "command": "phase",
        "model": spec,
        "axis": axis_name,
        "values": values,
        "temperatures": temps,
        "nodes": args.nodes,
        "surface_nodes": args.surface_nodes,
        "angular_nodes": args.angular_nodes,
        "loop_points": args.loop_points,
        "contraction_steps": args.contraction_steps,
        "step_scheme": scheme.describe(),
    });
    if !log.is_empty() {
        table.note("failed_points", log.len());
    }
    stamp(&mut table, &config, Some(&scheme.describe()), &args.output);
    write_table(&table, &args.output, Format::Csv)?;
    let partial = !log.is_empty();
    log.finish()?;
    Ok(if partial { Status::Partial } else { Status::Ok })
}

fn dirac_row(m: f64, t: f64, args: &PhaseArgs, scheme: &StepScheme) -> anyhow::Result<Outcome> {
    if m == 0.0 {
        // the gap closes at k = 0 and the phase has no value there
        return Ok(Outcome::Undefined);
    }
    let radial = dirac_theta_g(m, t, args.nodes)?;
    let grid = SurfaceGrid::plane(
        &[0.0, 0.0],
        (0, 1),
        [0.0, 0.0],
        args.surface_nodes,
        args.angular_nodes,
    )?;
    let surface = omega_surface_integral(&DiracModel::new(m), &grid, t, scheme)?;
    Ok(Outcome::Both(radial, surface))
}

fn bloch_row(
    field: f64,
    alpha: f64,
    t: f64,
    args: &PhaseArgs,
    scheme: &StepScheme,
) -> anyhow::Result<Outcome> {
    if !(alpha > 0.0 && alpha < std::f64::consts::PI) {
        bail!("cap angle alpha must lie in (0, π), got {alpha}");
    }
    let model = BlochSphereModel::new(field)?;
    let m = args.loop_points;
    let family = move |s: f64| LoopPath::latitude(s * alpha, m);
    let loop_side = thermal_berry_phase_contracted(&model, &family, t, args.contraction_steps)?;
    let grid = SurfaceGrid::rectangle(
        &[0.0, 0.0],
        (0, 1),
        (0.0, alpha),
        (0.0, TAU),
        args.surface_nodes,
        args.angular_nodes,
    )?;
    let surface = omega_surface_integral(&model, &grid, t, scheme)?;
    Ok(Outcome::Both(loop_side, surface))
}
