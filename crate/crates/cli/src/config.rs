//! Turning command-line arguments into validated library inputs.

use std::path::Path;

use orlicz_eigen::{Error, Mesh, MeshSpec, NonlocalMesh, SolveOptions, YoungFunction, YoungSpec};
use serde::Serialize;

use crate::{IntervalArgs, SolverArgs};

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, config or unmet hypotheses (exit 2).
    Usage(String),
    /// The computation itself failed (exit 1).
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument { .. }
            | Error::InvalidYoung(_)
            | Error::InvalidMesh(_)
            | Error::Geometry(_)
            | Error::Precondition(_)
            | Error::DimensionMismatch { .. }
            | Error::Io(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Inline JSON when the argument starts with `{`, a file path otherwise.
fn read_json(arg: &str, what: &str) -> Result<String, Failure> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| usage(format!("cannot read {what} file `{arg}`: {e}")))
    }
}

pub fn young(arg: &str) -> Result<(YoungSpec, YoungFunction), Failure> {
    let spec = YoungSpec::parse(&read_json(arg, "young")?).map_err(|e| usage(format!("--young: {e}")))?;
    let f = spec.build().map_err(|e| usage(format!("--young: {e}")))?;
    Ok((spec, f))
}

pub fn mesh(arg: &str) -> Result<(MeshSpec, Mesh), Failure> {
    let text = read_json(arg, "mesh")?;
    let spec: MeshSpec = serde_json::from_str(&text).map_err(|e| usage(format!("--mesh: {e}")))?;
    let m = spec.build().map_err(|e| usage(format!("--mesh: {e}")))?;
    Ok((spec, m))
}

pub fn solve_options(a: &SolverArgs) -> Result<SolveOptions, Failure> {
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(usage(format!("--tol must be positive, got {}", a.tol)));
    }
    if a.max_iter == 0 {
        return Err(usage("--max-iter must be positive"));
    }
    if a.restarts == 0 {
        return Err(usage("--restarts must be positive"));
    }
    Ok(SolveOptions { tol: a.tol, max_iter: a.max_iter, restarts: a.restarts, seed: a.seed, parallel: true })
}

pub fn alpha(a: f64, flag: &str) -> Result<f64, Failure> {
    if a > 0.0 && a.is_finite() {
        Ok(a)
    } else {
        Err(usage(format!("{flag} must be positive, got {a}")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntervalSpec {
    pub length: f64,
    pub nodes: usize,
    pub s: f64,
    pub r_cut: f64,
}

pub fn interval(a: &IntervalArgs) -> Result<(IntervalSpec, NonlocalMesh), Failure> {
    let s = a.s.ok_or_else(|| usage("--s is required for the fractional energy"))?;
    if !(a.interval > 0.0 && a.interval.is_finite()) {
        return Err(usage(format!("--interval must be positive, got {}", a.interval)));
    }
    let r_cut = a.rcut.unwrap_or(4.0 * a.interval);
    let nm = NonlocalMesh::with_options(a.interval, a.nodes, s, r_cut, true).map_err(Failure::from)?;
    Ok((IntervalSpec { length: a.interval, nodes: a.nodes, s, r_cut }, nm))
}

/// Everything a run was configured with, echoed into reports.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub young: YoungSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh: Option<MeshSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonlocal: Option<IntervalSpec>,
    pub solver: SolveOptions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub per_decade: usize,
    pub warm_start: bool,
    pub checks: Vec<&'static str>,
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| usage(format!("cannot write `{}`: {e}", path.display())))
}
