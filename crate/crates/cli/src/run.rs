use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use orlicz_eigen::nonlocal::tail_report;
use orlicz_eigen::sweep::{
    check_bounds, check_decay, check_derivative, check_regularity, estimate_limits, global_p_index, plot_script,
    write_records_csv, SweepRecord,
};
use orlicz_eigen::young::{Bound, GridSpec, MatuszewskaEstimate, Regime};
use orlicz_eigen::{
    alpha_grid, delta2_report, matuszewska_exponent, run_sweep, solve_e, solve_es, Endpoint, EnergyModel,
    MinimizerResult, SweepOptions, YoungFunction,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{self, usage, Failure, RunConfig, SweepConfig};
use crate::{Check, IntervalArgs, SolverArgs, SweepArgs};

const ENDPOINTS: [Endpoint; 2] = [Endpoint::Zero, Endpoint::Infinity];

fn key(e: Endpoint) -> &'static str {
    match e {
        Endpoint::Zero => "0",
        Endpoint::Infinity => "infinity",
    }
}

/// Rounds away fit noise in the 15th digit for display.
fn tidy(x: f64) -> f64 {
    if x.is_finite() && x != 0.0 {
        let scale = 10f64.powi(9 - x.abs().log10().floor() as i32);
        (x * scale).round() / scale
    } else {
        x
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Failure::Runtime(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| usage(format!("cannot write `{}`: {e}", path.display())))
}

pub fn inspect(young: &str, as_json: bool) -> Result<bool, Failure> {
    let (spec, f) = config::young(young)?;
    let grid = GridSpec::default_for(&f);
    let d2: Vec<_> = ENDPOINTS.iter().map(|&e| delta2_report(&f, e, &grid)).collect::<Result<_, _>>()?;
    let mat: Vec<MatuszewskaEstimate> =
        ENDPOINTS.iter().map(|&e| matuszewska_exponent(&f, e)).collect::<Result<_, _>>()?;
    let p = global_p_index(&f)?;
    let name = f.family().to_string();
    if as_json {
        let mut delta2 = serde_json::Map::new();
        let mut exps = serde_json::Map::new();
        let mut mats = serde_json::Map::new();
        for (k, e) in ENDPOINTS.iter().enumerate() {
            delta2.insert(key(*e).into(), serde_json::to_value(&d2[k]).unwrap_or(Value::Null));
            exps.insert(key(*e).into(), json!(mat[k].exponent.map(tidy)));
            mats.insert(
                key(*e).into(),
                json!({
                    "regime": mat[k].regime,
                    "exponent": mat[k].exponent,
                    "max_rel_deviation": mat[k].max_rel_deviation,
                }),
            );
        }
        print_json(&json!({
            "young": spec,
            "name": name,
            "p_index": p.map_or(json!("divergent"), |p| json!(tidy(p))),
            "exponents": exps,
            "delta2": delta2,
            "matuszewska": mats,
        }))?;
    } else {
        println!("young function: {name}");
        for (k, e) in ENDPOINTS.iter().enumerate() {
            let r = &d2[k];
            let idx = match r.p_index {
                Bound::Finite(v) => format!("{}", tidy(v)),
                Bound::Divergent => "divergent".into(),
            };
            let verdict = if r.holds { "holds" } else { "fails" };
            println!("delta2 at {}: {verdict}, p index {idx}", e.label());
        }
        match p {
            Some(p) => println!("global p index: {}", tidy(p)),
            None => println!("global p index: divergent"),
        }
        for (k, e) in ENDPOINTS.iter().enumerate() {
            let m = &mat[k];
            let what = match (m.regime, m.exponent) {
                (Regime::PowerLike, Some(x)) => format!("t^{}", tidy(x)),
                (Regime::TrivialDegenerate, _) => "trivial (0 below 1, infinite above)".into(),
                _ => "oscillating".into(),
            };
            println!("matuszewska function at {}: {what}", e.label());
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    config: &'a RunConfig,
    quotient: f64,
    result: &'a MinimizerResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail: Option<orlicz_eigen::nonlocal::TailReport>,
}

pub fn solve(young: &str, mesh: &str, alpha: f64, s: &SolverArgs, csv: Option<&Path>) -> Result<bool, Failure> {
    let (yspec, f) = config::young(young)?;
    let (mspec, m) = config::mesh(mesh)?;
    let opts = config::solve_options(s)?;
    let alpha = config::alpha(alpha, "--alpha")?;
    let r = solve_e(&f, &m, alpha, &opts)?;
    if let Some(path) = csv {
        m.write_csv(r.u.values(), create(path)?)?;
    }
    let cfg = RunConfig { young: yspec, mesh: Some(mspec), nonlocal: None, solver: opts, sweep: None };
    print_json(&SolveOutput { config: &cfg, quotient: r.quotient(), result: &r, tail: None })?;
    Ok(r.converged)
}

pub fn nonlocal(
    young: &str,
    interval: &IntervalArgs,
    alpha: f64,
    s: &SolverArgs,
    csv: Option<&Path>,
) -> Result<bool, Failure> {
    let (yspec, f) = config::young(young)?;
    let (ispec, nm) = config::interval(interval)?;
    let opts = config::solve_options(s)?;
    let alpha = config::alpha(alpha, "--alpha")?;
    let r = solve_es(&f, &nm, alpha, &opts)?;
    if let Some(path) = csv {
        nm.write_csv(r.u.values(), create(path)?)?;
    }
    let tail = tail_report(&f, r.u.values(), &nm)?;
    let cfg = RunConfig { young: yspec, mesh: None, nonlocal: Some(ispec), solver: opts, sweep: None };
    print_json(&SolveOutput { config: &cfg, quotient: r.quotient(), result: &r, tail: Some(tail) })?;
    Ok(r.converged)
}

fn check_name(c: Check) -> &'static str {
    match c {
        Check::Bounds => "bounds",
        Check::Derivative => "derivative",
        Check::Limits => "limits",
        Check::Decay => "decay",
    }
}

/// Endpoints each requested check applies to, decided before any solve so
/// that unmet hypotheses fail fast.
struct Plan {
    p: Option<f64>,
    limit_ends: Vec<Endpoint>,
    decay_ends: Vec<Endpoint>,
}

fn plan(f: &YoungFunction, checks: &[Check], inner_radius: Option<f64>) -> Result<Plan, Failure> {
    let mut out = Plan { p: None, limit_ends: Vec::new(), decay_ends: Vec::new() };
    if checks.contains(&Check::Bounds) {
        out.p =
            Some(global_p_index(f)?.ok_or_else(|| {
                usage("bounds check: A does not satisfy the doubling condition at both 0 and infinity")
            })?);
    }
    if checks.contains(&Check::Limits) {
        for e in ENDPOINTS {
            if matuszewska_exponent(f, e)?.regime == Regime::PowerLike {
                out.limit_ends.push(e);
            }
        }
        if out.limit_ends.is_empty() {
            return Err(usage("limits check: A is not power-like at either endpoint (use the decay check)"));
        }
    }
    if checks.contains(&Check::Decay) {
        let r = inner_radius.ok_or_else(|| usage("decay check: not available for the fractional energy"))?;
        if r <= 1.0 {
            return Err(usage(format!(
                "decay check: the domain has inner radius {r}; the decay result requires inner radius > 1"
            )));
        }
        for e in ENDPOINTS {
            if !delta2_report(f, e, &GridSpec::default_for(f))?.holds {
                out.decay_ends.push(e);
            }
        }
        if out.decay_ends.is_empty() {
            return Err(usage("decay check: A satisfies the doubling condition at both endpoints"));
        }
    }
    Ok(out)
}

pub fn sweep(a: &SweepArgs) -> Result<bool, Failure> {
    let (yspec, f) = config::young(&a.young)?;
    let opts = config::solve_options(&a.solver)?;
    config::alpha(a.alpha_min, "--alpha-min")?;
    config::alpha(a.alpha_max, "--alpha-max")?;
    if !(a.decay_fraction > 0.0 && a.decay_fraction < 1.0) {
        return Err(usage(format!("--decay-fraction must lie in (0, 1), got {}", a.decay_fraction)));
    }
    let grid = alpha_grid(a.alpha_min, a.alpha_max, a.per_decade)?;
    let mut checks = a.check.clone();
    checks.dedup();
    let sweep_cfg = SweepConfig {
        alpha_min: a.alpha_min,
        alpha_max: a.alpha_max,
        per_decade: a.per_decade,
        warm_start: !a.no_warm_start,
        checks: checks.iter().map(|&c| check_name(c)).collect(),
    };
    let sopts = SweepOptions { solve: opts.clone(), warm_start: !a.no_warm_start };
    if a.nonlocal {
        let (ispec, nm) = config::interval(&a.interval)?;
        let pl = plan(&f, &checks, None)?;
        let cfg = RunConfig { young: yspec, mesh: None, nonlocal: Some(ispec), solver: opts, sweep: Some(sweep_cfg) };
        let records = run_sweep(&f, &nm, &grid, &sopts)?;
        finish(a, &f, &nm, None, &cfg, &checks, &pl, &records)
    } else {
        let mesh_arg = a.mesh.as_deref().ok_or_else(|| usage("--mesh is required without --nonlocal"))?;
        let (mspec, m) = config::mesh(mesh_arg)?;
        let pl = plan(&f, &checks, Some(m.inner_radius()))?;
        let cfg = RunConfig { young: yspec, mesh: Some(mspec), nonlocal: None, solver: opts, sweep: Some(sweep_cfg) };
        let records = run_sweep(&f, &m, &grid, &sopts)?;
        finish(a, &f, &m, Some(m.inner_radius()), &cfg, &checks, &pl, &records)
    }
}

#[allow(clippy::too_many_arguments)]
fn finish<M: EnergyModel + ?Sized>(
    a: &SweepArgs,
    f: &YoungFunction,
    model: &M,
    inner_radius: Option<f64>,
    cfg: &RunConfig,
    checks: &[Check],
    pl: &Plan,
    records: &[SweepRecord],
) -> Result<bool, Failure> {
    let mut results = serde_json::Map::new();
    let mut pass = true;
    for &c in checks {
        let (value, ok) = match c {
            Check::Bounds => {
                let r = check_bounds(records, pl.p.unwrap_or(f64::NAN))?;
                let ok = r.pass && r.negative_control_detected;
                (json!({ "report": r, "pass": ok }), ok)
            }
            Check::Derivative => {
                let d = check_derivative(records);
                let reg = check_regularity(records);
                let ok = d.pass && reg.pass;
                (json!({ "derivative": d, "regularity": reg, "pass": ok }), ok)
            }
            Check::Limits => {
                let mut ests = Vec::new();
                let mut ok = true;
                for &e in &pl.limit_ends {
                    let est = estimate_limits(f, model, records, e, &cfg.solver)?;
                    ok &= est.pass;
                    ests.push(est);
                }
                let note = "limits are checked two-sided: the extrapolated value stands for both lim sup and lim inf, \
                            and monotone_tail records whether the last samples approach it monotonically";
                (json!({ "estimates": ests, "note": note, "pass": ok }), ok)
            }
            Check::Decay => {
                let mut reps = Vec::new();
                let mut ok = true;
                for &e in &pl.decay_ends {
                    let r = check_decay(f, inner_radius.unwrap_or(0.0), records, e, a.decay_fraction)?;
                    ok &= r.pass;
                    reps.push(r);
                }
                (json!({ "reports": reps, "pass": ok }), ok)
            }
        };
        pass &= ok;
        results.insert(check_name(c).into(), value);
    }
    let converged = records.iter().filter(|r| r.converged).count();
    let sup_quotient = records.iter().filter(|r| r.converged).map(|r| r.quotient).fold(0.0, f64::max);
    let report = json!({
        "config": cfg,
        "summary": { "records": records.len(), "converged": converged, "sup_quotient": sup_quotient },
        "checks": results,
        "records": records,
        "pass": pass,
    });
    if let Some(path) = &a.csv {
        write_records_csv(records, create(path)?)?;
    }
    if let Some(path) = &a.plot_script {
        let csv = a.csv.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        config::write_file(path, plot_script(&csv, &f.family().to_string()).as_bytes())?;
    }
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Runtime(e.to_string()))?;
    if let Some(path) = &a.report {
        config::write_file(path, text.as_bytes())?;
    }
    println!("{text}");
    for &c in checks {
        let ok = results[check_name(c)]["pass"].as_bool().unwrap_or(false);
        eprintln!("{}: {}", check_name(c), if ok { "pass" } else { "FAIL" });
    }
    Ok(pass)
}
