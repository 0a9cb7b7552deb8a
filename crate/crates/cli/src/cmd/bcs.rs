use qgt_core::models::{bcs_critical_temperature, bcs_solve, BcsSolution, LatticeGrid};
use rayon::prelude::*;
use serde_json::json;

use super::{pool, Status};
use crate::args::{BcsArgs, Format};
use crate::output::{stamp, write_table, Cell, ErrorLog, Table};

pub fn run(args: &BcsArgs) -> anyhow::Result<Status> {
    let temps = args.temps.resolve()?;
    if let Some(t) = temps.iter().find(|t| **t <= 0.0) {
        anyhow::bail!("the gap equation needs T > 0, got {t}");
    }
    let grid = LatticeGrid::new(args.grid)?;
    let pool = pool(args.output.threads)?;
    let (sols, tc): (Vec<qgt_core::Result<BcsSolution>>, _) = pool.install(|| {
        rayon::join(
            || {
                temps
                    .par_iter()
                    .map(|&t| bcs_solve(args.coupling, args.density, args.hopping, t, &grid))
                    .collect()
            },
            || bcs_critical_temperature(args.coupling, args.density, args.hopping, &grid),
        )
    });

    let cols = [
        "T",
        "delta",
        "mu",
        "converged",
        "gap_residual",
        "density_residual",
        "iterations",
    ];
    let mut table = Table::new(cols.iter().map(|s| s.to_string()).collect());
    let mut log = ErrorLog::new(&args.output.out);
    let mut solved = Vec::new();
    for (i, (t, sol)) in temps.iter().zip(sols).enumerate() {
        let pushed = sol.map_err(anyhow::Error::from).and_then(|s| {
            table.push(vec![
                Cell::Num(s.temperature),
                Cell::Num(s.delta),
                Cell::Num(s.mu),
                Cell::Int(s.converged as i64),
                Cell::Num(s.gap_residual),
                Cell::Num(s.density_residual),
                Cell::Int(s.iterations as i64),
            ])?;
            solved.push(s);
            Ok(())
        });
        if let Err(e) = pushed {
            log.record(format!(
                "row {i}: U={} n={} t={} T={t}: error: {e:#}",
                args.coupling, args.density, args.hopping
            ));
        }
    }

    if let Some(mid) = bracket_midpoint(&solved) {
        table.note("tc_bracket_midpoint", mid);
    }
    match tc {
        Ok(tc) => table.note("tc_bisection", tc),
        Err(e) => log.record(format!("critical temperature: error: {e}")),
    }
    let config = json!({
        "command": "bcs",
        "U": args.coupling,
        "n": args.density,
        "t": args.hopping,
        "grid": args.grid,
        "temperatures": temps,
    });
    if !log.is_empty() {
        table.note("failed_points", log.len());
    }
    stamp(&mut table, &config, None, &args.output);
    write_table(&table, &args.output, Format::Csv)?;
    let partial = !log.is_empty();
    log.finish()?;
    Ok(if partial { Status::Partial } else { Status::Ok })
}

/// Midpoint between the last `Δ > 0` and the first `Δ = 0` sample in ascending `T`.
pub fn bracket_midpoint(sols: &[BcsSolution]) -> Option<f64> {
    let mut sorted: Vec<&BcsSolution> = sols.iter().collect();
    sorted.sort_by(|a, b| a.temperature.total_cmp(&b.temperature));
    let first_normal = sorted.iter().position(|s| s.is_normal())?;
    let last_super = sorted[..first_normal].last()?;
    Some(0.5 * (last_super.temperature + sorted[first_normal].temperature))
}
