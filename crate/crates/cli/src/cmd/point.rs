use serde_json::json;

use super::Status;
use crate::args::{Format, PointArgs};
use crate::eval::{evaluate, has_closed_form, matrix_json, scheme, tensor_cells, tensor_columns};
use crate::model::{given_coordinates, point_vector, ModelSpec};
use crate::output::{config_hash, stamp, write_json, write_table, Cell, Table};

pub fn run(args: &PointArgs) -> anyhow::Result<Status> {
    let spec = ModelSpec::from_args(&args.model);
    let coords = given_coordinates(&spec, &args.coords)?;
    let r = point_vector(&spec, &coords)?;
    if !(args.temp.is_finite() && args.temp >= 0.0) {
        anyhow::bail!(
            "temperature must be finite and non-negative, got {}",
            args.temp
        );
    }
    let scheme = scheme(&args.scheme)?;
    let config = json!({
        "command": "point",
        "model": spec,
        "point": coords,
        "temperature": args.temp,
        "step_scheme": scheme.describe(),
    });
    let ev = evaluate(&spec, &r, args.temp, &scheme)?;
    let names = spec.param_names();

    match args.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let q = &ev.q;
            let k = q.n_params();
            let re: Vec<Vec<f64>> = (0..k)
                .map(|i| (0..k).map(|j| q.g_s[(i, j)].re).collect())
                .collect();
            let im: Vec<Vec<f64>> = (0..k)
                .map(|i| (0..k).map(|j| q.g_s[(i, j)].im).collect())
                .collect();
            let mut v = json!({
                "model": spec.name,
                "constants": spec.constants,
                "parameters": names,
                "point": r,
                "temperature": args.temp,
                "ground_state_limit": args.temp == 0.0,
                "weights": q.weights,
                "g_fr": matrix_json(&q.g_fr),
                "g_fs": matrix_json(&q.g_fs),
                "omega": matrix_json(&q.omega),
                "g_s_re": re,
                "g_s_im": im,
                "floored": q.floored,
                "step_scheme": scheme.describe(),
                "config_sha256": config_hash(&config),
            });
            if let Some(a) = &ev.analytic {
                v["analytic"] = json!({
                    "g_fr": matrix_json(&a.g_fr),
                    "g_fs": matrix_json(&a.g_fs),
                    "omega": matrix_json(&a.omega),
                });
                v["analytic_rel_diff"] = json!(ev.analytic_rel_diff());
            }
            if let Some(b) = &ev.bcs {
                v["bcs"] = json!({ "delta": b.delta, "mu": b.mu, "converged": b.converged });
            }
            write_json(&v, &args.output)?;
        }
        Format::Csv => {
            let mut cols = names.clone();
            cols.push("T".into());
            cols.extend(tensor_columns(&names));
            cols.push("floored".into());
            if has_closed_form(&spec) {
                cols.push("analytic_rel_diff".into());
            }
            let mut table = Table::new(cols);
            let mut row: Vec<Cell> = r.iter().map(|x| Cell::Num(*x)).collect();
            row.push(Cell::Num(args.temp));
            row.extend(tensor_cells(&ev.q));
            row.push(Cell::Int(ev.q.floored as i64));
            if has_closed_form(&spec) {
                row.push(ev.analytic_rel_diff().map_or(Cell::Empty, Cell::Num));
            }
            table.push(row)?;
            stamp(&mut table, &config, Some(&scheme.describe()), &args.output);
            write_table(&table, &args.output, Format::Csv)?;
        }
    }
    Ok(Status::Ok)
}
