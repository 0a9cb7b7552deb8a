use qgt_core::linalg::RealMatrix;
use qgt_core::models::{AnalyticQgt, BcsSolution};
use qgt_core::qgt::{ground_state_qgt, sjoqvist_qgt};
use qgt_core::{QgtPoint, StepScheme};

use crate::args::{ModelName, SchemeArgs};
use crate::model::{Instance, ModelSpec};
use crate::output::Cell;

pub struct Evaluation {
    pub q: QgtPoint,
    pub analytic: Option<AnalyticQgt>,
    pub bcs: Option<BcsSolution>,
}

impl Evaluation {
    /// `max |num − closed form| / max(max |closed form|, 1e−9)` over `g^FR`, `g^FS`, `Ω`.
    pub fn analytic_rel_diff(&self) -> Option<f64> {
        let a = self.analytic.as_ref()?;
        let diff = self
            .q
            .g_fr
            .max_abs_diff(&a.g_fr)
            .max(self.q.g_fs.max_abs_diff(&a.g_fs))
            .max(self.q.omega.max_abs_diff(&a.omega));
        let scale = a
            .g_fr
            .max_abs()
            .max(a.g_fs.max_abs())
            .max(a.omega.max_abs())
            .max(1e-9);
        Some(diff / scale)
    }
}

pub fn scheme(args: &SchemeArgs) -> anyhow::Result<StepScheme> {
    Ok(StepScheme::uniform(args.step)?.with_richardson(!args.no_richardson))
}

/// Tensor at `r` and `t`; `t = 0` is the ground-state limit.
pub fn evaluate(
    spec: &ModelSpec,
    r: &[f64],
    t: f64,
    scheme: &StepScheme,
) -> anyhow::Result<Evaluation> {
    evaluate_instance(&spec.instantiate(t)?, r, t, scheme)
}

/// As [`evaluate`] for an already built model.
pub fn evaluate_instance(
    inst: &Instance,
    r: &[f64],
    t: f64,
    scheme: &StepScheme,
) -> anyhow::Result<Evaluation> {
    let model = inst.model.as_ref();
    let q = if t == 0.0 {
        ground_state_qgt(model, r, scheme)?
    } else {
        sjoqvist_qgt(model, r, t, scheme)?
    };
    // closed forms decline outside their printed domain; that is not an error here
    let analytic = model.analytic_qgt(r, t).and_then(|a| a.ok());
    Ok(Evaluation {
        q,
        analytic,
        bcs: inst.bcs.clone(),
    })
}

pub fn has_closed_form(spec: &ModelSpec) -> bool {
    spec.name != ModelName::Random
}

/// `gFR`, `gFS` and `Re gS` on and above the diagonal; `Ω` and `Im gS` strictly above.
pub fn tensor_columns(names: &[String]) -> Vec<String> {
    let k = names.len();
    let mut cols = Vec::new();
    let upper = |strict: bool| -> Vec<(usize, usize)> {
        (0..k)
            .flat_map(|i| (i..k).map(move |j| (i, j)))
            .filter(|(i, j)| !strict || i != j)
            .collect()
    };
    for (prefix, strict) in [
        ("gFR", false),
        ("gFS", false),
        ("Omega", true),
        ("gS_re", false),
        ("gS_im", true),
    ] {
        for (i, j) in upper(strict) {
            cols.push(format!("{prefix}_{}_{}", names[i], names[j]));
        }
    }
    cols
}

pub fn tensor_cells(q: &QgtPoint) -> Vec<Cell> {
    let k = q.n_params();
    let mut cells = Vec::new();
    let mut push = |m: &dyn Fn(usize, usize) -> f64, strict: bool| {
        for i in 0..k {
            for j in i..k {
                if !strict || i != j {
                    cells.push(Cell::Num(m(i, j)));
                }
            }
        }
    };
    push(&|i, j| q.g_fr[(i, j)], false);
    push(&|i, j| q.g_fs[(i, j)], false);
    push(&|i, j| q.omega[(i, j)], true);
    push(&|i, j| q.g_s[(i, j)].re, false);
    push(&|i, j| q.g_s[(i, j)].im, true);
    cells
}

pub fn matrix_json(m: &RealMatrix) -> serde_json::Value {
    let k = m.dim();
    (0..k)
        .map(|i| (0..k).map(|j| m[(i, j)]).collect::<Vec<f64>>())
        .collect::<Vec<_>>()
        .into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_layout() {
        let names = vec!["kx".to_string(), "ky".to_string()];
        let cols = tensor_columns(&names);
        assert_eq!(
            cols,
            [
                "gFR_kx_kx",
                "gFR_kx_ky",
                "gFR_ky_ky",
                "gFS_kx_kx",
                "gFS_kx_ky",
                "gFS_ky_ky",
                "Omega_kx_ky",
                "gS_re_kx_kx",
                "gS_re_kx_ky",
                "gS_re_ky_ky",
                "gS_im_kx_ky"
            ]
        );
        assert_eq!(
            tensor_columns(&["k".to_string()]),
            ["gFR_k_k", "gFS_k_k", "gS_re_k_k"]
        );
    }
}
