use std::collections::BTreeMap;

use anyhow::{bail, Context};
use qgt_core::models::{
    bcs_solve, BcsModel, BcsSolution, BlochSphereModel, DiracModel, LatticeGrid, RandomModel,
    SshModel,
};
use qgt_core::ParamModel;
use serde::Serialize;

use crate::args::{parse_assignment, CoordArgs, ModelArgs, ModelName};

/// Model selector plus its constants, in a form that can be hashed and overridden per row.
#[derive(Debug, Clone, Serialize)]
pub struct ModelSpec {
    pub name: ModelName,
    pub constants: BTreeMap<String, f64>,
    pub seed: u64,
}

/// A model ready to evaluate, with the BCS solution it was built from.
pub struct Instance {
    pub model: Box<dyn ParamModel + Send>,
    pub bcs: Option<BcsSolution>,
}

impl ModelSpec {
    pub fn from_args(args: &ModelArgs) -> Self {
        let mut c = BTreeMap::new();
        match args.model {
            ModelName::Ssh => {
                c.insert("J1".into(), args.j1);
                c.insert("J2".into(), args.j2);
            }
            ModelName::Dirac => {
                c.insert("mass".into(), args.mass);
            }
            ModelName::Bcs => {
                c.insert("U".into(), args.coupling);
                c.insert("n".into(), args.density);
                c.insert("t".into(), args.hopping);
                c.insert("grid".into(), args.grid as f64);
            }
            ModelName::Bloch => {
                c.insert("field".into(), args.field);
            }
            ModelName::Random => {
                c.insert("levels".into(), args.levels as f64);
                c.insert("params".into(), args.params as f64);
            }
        }
        Self {
            name: args.model,
            constants: c,
            seed: args.seed,
        }
    }

    /// Constants that may be swept as an axis.
    pub fn sweepable(&self) -> &'static [&'static str] {
        match self.name {
            ModelName::Ssh => &["J1", "J2"],
            ModelName::Dirac => &["mass"],
            ModelName::Bcs => &["U", "n", "t"],
            ModelName::Bloch => &["field"],
            ModelName::Random => &[],
        }
    }

    pub fn param_names(&self) -> Vec<String> {
        match self.name {
            ModelName::Ssh => vec!["k".into()],
            ModelName::Dirac => vec!["kx".into(), "ky".into()],
            ModelName::Bcs => vec!["kx".into(), "ky".into(), "kz".into()],
            ModelName::Bloch => vec!["theta".into(), "phi".into()],
            ModelName::Random => (0..self.constant("params") as usize)
                .map(|i| format!("R{i}"))
                .collect(),
        }
    }

    pub fn constant(&self, name: &str) -> f64 {
        self.constants[name]
    }

    pub fn with_override(&self, name: &str, value: f64) -> Self {
        let mut s = self.clone();
        s.constants.insert(name.to_string(), value);
        s
    }

    /// Builds the model at temperature `t`; BCS is solved self-consistently there.
    pub fn instantiate(&self, t: f64) -> anyhow::Result<Instance> {
        let c = |k: &str| self.constant(k);
        let model: Box<dyn ParamModel + Send> = match self.name {
            ModelName::Ssh => Box::new(SshModel::new(c("J1"), c("J2"))?),
            ModelName::Dirac => Box::new(DiracModel::new(c("mass"))),
            ModelName::Bloch => Box::new(BlochSphereModel::new(c("field"))?),
            ModelName::Random => Box::new(RandomModel::new(
                c("levels") as usize,
                c("params") as usize,
                self.seed,
            )?),
            ModelName::Bcs => {
                if !(t > 0.0) {
                    bail!("the BCS model needs T > 0 to solve for Δ and μ");
                }
                let grid = LatticeGrid::new(c("grid") as usize)?;
                let sol = bcs_solve(c("U"), c("n"), c("t"), t, &grid)?;
                let model = BcsModel::from_solution(&sol, c("t"))?;
                return Ok(Instance {
                    model: Box::new(model),
                    bcs: Some(sol),
                });
            }
        };
        Ok(Instance { model, bcs: None })
    }
}

/// Coordinates given on the command line, keyed by parameter name.
pub fn given_coordinates(
    spec: &ModelSpec,
    args: &CoordArgs,
) -> anyhow::Result<BTreeMap<String, f64>> {
    let names = spec.param_names();
    let mut out = BTreeMap::new();
    let mut put = |name: &str, value: Option<f64>| -> anyhow::Result<()> {
        if let Some(v) = value {
            if !names.iter().any(|n| n == name) {
                bail!(
                    "the {:?} model has no parameter {name}; its parameters are {names:?}",
                    spec.name
                );
            }
            out.insert(name.to_string(), v);
        }
        Ok(())
    };
    if spec.name == ModelName::Bcs && args.k.is_some() {
        // --k sets every component of the cubic momentum
        for axis in ["kx", "ky", "kz"] {
            put(axis, args.k)?;
        }
    } else {
        put("k", args.k)?;
    }
    put("kx", args.kx)?;
    put("ky", args.ky)?;
    put("kz", args.kz)?;
    put("theta", args.theta)?;
    put("phi", args.phi)?;
    for a in &args.coord {
        let (name, v) = parse_assignment(a)?;
        put(&name, Some(v))?;
    }
    Ok(out)
}

/// Full parameter vector in model order.
pub fn point_vector(spec: &ModelSpec, coords: &BTreeMap<String, f64>) -> anyhow::Result<Vec<f64>> {
    spec.param_names()
        .iter()
        .map(|n| {
            coords
                .get(n)
                .copied()
                .with_context(|| format!("missing coordinate --{n} for the {:?} model", spec.name))
        })
        .collect()
}
