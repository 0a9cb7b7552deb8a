use std::collections::{BTreeMap, HashMap};

use anyhow::bail;
use rayon::prelude::*;
use serde_json::json;

use super::{pool, Status};
use crate::args::{parse_axis, Axis, Format, ModelName, SweepArgs};
use crate::eval::{evaluate_instance, has_closed_form, scheme, tensor_cells, tensor_columns};
use crate::model::{given_coordinates, point_vector, Instance, ModelSpec};
use crate::output::{stamp, write_table, Cell, ErrorLog, Table};

enum AxisKind {
    Coordinate,
    Constant,
}

struct Job {
    values: Vec<f64>,
    t: f64,
}

pub fn run(args: &SweepArgs) -> anyhow::Result<Status> {
    let spec = ModelSpec::from_args(&args.model);
    let names = spec.param_names();
    let axes: Vec<Axis> = args
        .ranges
        .iter()
        .map(|s| parse_axis(s))
        .collect::<anyhow::Result<_>>()?;
    if axes.is_empty() || axes.len() > 2 {
        bail!("sweep needs one or two --range axes, got {}", axes.len());
    }
    let mut kinds = Vec::new();
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.name == a.name) {
            bail!("axis {} given twice", a.name);
        }
        kinds.push(if names.contains(&a.name) {
            AxisKind::Coordinate
        } else if spec.sweepable().contains(&a.name.as_str()) {
            AxisKind::Constant
        } else {
            bail!(
                "unknown axis {:?} for the {:?} model; parameters {names:?}, constants {:?}",
                a.name,
                spec.name,
                spec.sweepable()
            );
        });
    }
    let temps = args.temps.resolve()?;
    let mut coords = given_coordinates(&spec, &args.coords)?;
    for (a, kind) in axes.iter().zip(&kinds) {
        if let AxisKind::Coordinate = kind {
            coords.insert(a.name.clone(), a.start);
        }
    }
    point_vector(&spec, &coords)?;
    let scheme = scheme(&args.scheme)?;

    // lexicographic in the swept axes, then temperature
    let grids: Vec<Vec<f64>> = axes.iter().map(Axis::values).collect();
    let combos: Vec<Vec<f64>> = match grids.as_slice() {
        [x] => x.iter().map(|&a| vec![a]).collect(),
        [x, y] => x
            .iter()
            .flat_map(|&a| y.iter().map(move |&b| vec![a, b]))
            .collect(),
        _ => unreachable!("one or two axes"),
    };
    let jobs: Vec<Job> = combos
        .iter()
        .flat_map(|v| {
            temps.iter().map(move |&t| Job {
                values: v.clone(),
                t,
            })
        })
        .collect();

    let constant_axes: Vec<usize> = kinds
        .iter()
        .enumerate()
        .filter(|(_, k)| matches!(k, AxisKind::Constant))
        .map(|(i, _)| i)
        .collect();
    let spec_for = |job: &Job| -> ModelSpec {
        constant_axes.iter().fold(spec.clone(), |s, &i| {
            s.with_override(&axes[i].name, job.values[i])
        })
    };
    let point_for = |job: &Job| -> Vec<f64> {
        let mut c: BTreeMap<String, f64> = coords.clone();
        for (i, (a, kind)) in axes.iter().zip(&kinds).enumerate() {
            if let AxisKind::Coordinate = kind {
                c.insert(a.name.clone(), job.values[i]);
            }
        }
        names.iter().map(|n| c[n]).collect()
    };
    // one model per distinct (constants, T); a BCS solve is the expensive part
    let key = |job: &Job| -> (Vec<u64>, u64) {
        let consts = constant_axes
            .iter()
            .map(|&i| job.values[i].to_bits())
            .collect();
        let t = if spec.name == ModelName::Bcs {
            job.t.to_bits()
        } else {
            0
        };
        (consts, t)
    };

    let pool = pool(args.output.threads)?;
    let rows: Vec<anyhow::Result<Vec<Cell>>> = pool.install(|| {
        let mut unique: Vec<&Job> = Vec::new();
        let mut seen = HashMap::new();
        for job in &jobs {
            seen.entry(key(job)).or_insert_with(|| {
                unique.push(job);
                unique.len() - 1
            });
        }
        let instances: Vec<anyhow::Result<Instance>> = unique
            .par_iter()
            .map(|j| spec_for(j).instantiate(j.t))
            .collect();
        jobs.par_iter()
            .map(|job| {
                let inst = instances[seen[&key(job)]]
                    .as_ref()
                    .map_err(|e| anyhow::anyhow!("{e:#}"))?;
                let r = point_for(job);
                let ev = evaluate_instance(inst, &r, job.t, &scheme)?;
                let mut row: Vec<Cell> = r.iter().map(|x| Cell::Num(*x)).collect();
                for &i in &constant_axes {
                    row.push(Cell::Num(job.values[i]));
                }
                row.push(Cell::Num(job.t));
                if let Some(b) = &ev.bcs {
                    row.push(Cell::Num(b.delta));
                    row.push(Cell::Num(b.mu));
                }
                row.extend(tensor_cells(&ev.q));
                row.push(Cell::Int(ev.q.floored as i64));
                if has_closed_form(&spec) {
                    row.push(ev.analytic_rel_diff().map_or(Cell::Empty, Cell::Num));
                }
                Ok(row)
            })
            .collect()
    });

    let mut cols = names.clone();
    for &i in &constant_axes {
        cols.push(axes[i].name.clone());
    }
    cols.push("T".into());
    if spec.name == ModelName::Bcs {
        cols.push("delta".into());
        cols.push("mu".into());
    }
    cols.extend(tensor_columns(&names));
    cols.push("floored".into());
    if has_closed_form(&spec) {
        cols.push("analytic_rel_diff".into());
    }

    let mut table = Table::new(cols);
    let mut log = ErrorLog::new(&args.output.out);
    for (i, (job, row)) in jobs.iter().zip(rows).enumerate() {
        let pushed = row.and_then(|r| table.push(r));
        if let Err(e) = pushed {
            log.record(format!(
                "row {i}: model={:?} point={:?} {}T={}: error: {e:#}",
                spec.name,
                point_for(job),
                constant_axes
                    .iter()
                    .map(|&a| format!("{}={} ", axes[a].name, job.values[a]))
                    .collect::<String>(),
                job.t
            ));
        }
    }
    let config = json!({
        "command": "sweep",
        "model": spec,
        "point": coords,
        "axes": axes,
        "temperatures": temps,
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
