//! One line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use orlicz_eigen::sweep::{check_bounds, check_decay, check_derivative, estimate_limits, SweepRecord};
use orlicz_eigen::young::{Bound, GridSpec, Regime};
use orlicz_eigen::{
    alpha_grid, delta2_report, matuszewska_exponent, run_sweep, solve_e, solve_es, Endpoint, EnergyModel, Mesh,
    NonlocalMesh, Result, SolveOptions, SweepOptions, YoungFunction,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Runs one criterion, prints its line and returns whether it passed.
fn criterion(id: u32, name: &str, budget: Option<Duration>, body: impl FnOnce() -> Result<Outcome>) -> bool {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match result {
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(b) = budget {
        if elapsed > b {
            pass = false;
            detail.push_str(&format!("; over the {} s budget", b.as_secs()));
        }
    }
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} {id:>2} {name} [{:.1} s]: {detail}", elapsed.as_secs_f64());
    pass
}

fn sum24() -> YoungFunction {
    YoungFunction::sum_of_powers(2.0, 4.0).unwrap()
}

fn sweep(f: &YoungFunction, m: &Mesh, lo: f64, hi: f64) -> Result<Vec<SweepRecord>> {
    run_sweep(f, m, &alpha_grid(lo, hi, 5)?, &SweepOptions::default())
}

fn p2_oracle() -> Result<Outcome> {
    let m = Mesh::interval(1.0, 200)?;
    let r = solve_e(&YoungFunction::power(2.0)?, &m, 1.0, &SolveOptions::default())?;
    let discrete = common::three_point_eigenvalue(200);
    let (gap, oracle_gap) = (relative(r.energy / r.alpha, discrete), relative(discrete, PI * PI));
    outcome(
        gap <= 1e-2 && oracle_gap <= 1e-3,
        format!("E/α = {:.6}, discrete {discrete:.6} (gap {gap:.1e}), π² gap {oracle_gap:.1e}", r.energy / r.alpha),
    )
}

fn p3_oracle() -> Result<Outcome> {
    let m = Mesh::interval(1.0, 200)?;
    let r = solve_e(&YoungFunction::power(3.0)?, &m, 1.0, &SolveOptions::default())?;
    let reference = common::shooting_eigenvalue(3.0);
    let gap = relative(r.quotient(), reference);
    outcome(gap <= 2e-2, format!("quotient {:.5}, shooting {reference:.5} (gap {gap:.2e})", r.quotient()))
}

fn derivative(records: &[SweepRecord]) -> Result<Outcome> {
    let d = check_derivative(records);
    outcome(
        d.median_gap <= 2e-2 && d.sandwich_violations.is_empty(),
        format!(
            "{} samples, median gap {:.2e}, max {:.2e}, {} sandwich violations",
            d.samples,
            d.median_gap,
            d.max_gap,
            d.sandwich_violations.len()
        ),
    )
}

fn bounds(records: &[SweepRecord]) -> Result<Outcome> {
    let f = sum24();
    let grid = GridSpec::default_for(&f);
    let mut p = 1.0f64;
    for e in [Endpoint::Zero, Endpoint::Infinity] {
        match delta2_report(&f, e, &grid)?.p_index {
            Bound::Finite(v) => p = p.max(v),
            Bound::Divergent => return outcome(false, format!("delta2 fails at {}", e.label())),
        }
    }
    let b = check_bounds(records, p)?;
    outcome(
        b.pass && b.violations.is_empty() && b.negative_control_detected && relative(p, 4.0) <= 1e-6,
        format!(
            "p = {p:.6}, {} records checked, {} violations, negative control detected: {}",
            b.checked,
            b.violations.len(),
            b.negative_control_detected
        ),
    )
}

fn limits() -> Result<Outcome> {
    let f = sum24();
    let m = Mesh::interval(1.0, 200)?;
    let records = sweep(&f, &m, 1e-4, 1e4)?;
    let opts = SolveOptions::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for e in [Endpoint::Zero, Endpoint::Infinity] {
        let l = estimate_limits(&f, &m, &records, e, &opts)?;
        pass &= l.relative_gap <= 5e-2;
        parts.push(format!(
            "{}: {:.5} vs Power({:.4}) {:.5} (gap {:.1e})",
            e.label(),
            l.extrapolated,
            l.exponent,
            l.reference_lambda,
            l.relative_gap
        ));
    }
    outcome(pass, parts.join(", "))
}

fn decay() -> Result<Outcome> {
    let f = YoungFunction::exp_minus_poly(2)?;
    let m = Mesh::interval(4.0, 400)?;
    let records = sweep(&f, &m, 1.0, 1e4)?;
    let d = check_decay(&f, m.inner_radius(), &records, Endpoint::Infinity, 0.2)?;
    outcome(
        d.strictly_decreasing && d.ratio <= 0.2,
        format!(
            "quotient {:.4} at α=1, {:.4} at α=1e4 (ratio {:.4}), strictly decreasing: {}",
            d.quotient_at_one, d.final_quotient, d.ratio, d.strictly_decreasing
        ),
    )
}

fn matuszewska_table() -> Result<Outcome> {
    use Endpoint::{Infinity, Zero};
    let powers: Vec<(YoungFunction, Endpoint, f64)> = vec![
        (YoungFunction::power(1.5)?, Zero, 1.5),
        (YoungFunction::power(1.5)?, Infinity, 1.5),
        (YoungFunction::power(3.0)?, Zero, 3.0),
        (YoungFunction::power(3.0)?, Infinity, 3.0),
        (YoungFunction::sum_of_powers(2.0, 4.0)?, Zero, 2.0),
        (YoungFunction::sum_of_powers(2.0, 4.0)?, Infinity, 4.0),
        (YoungFunction::sum_of_powers(1.5, 2.5)?, Zero, 1.5),
        (YoungFunction::sum_of_powers(1.5, 2.5)?, Infinity, 2.5),
        (YoungFunction::power_log(2.0, 1.0, 1.0)?, Zero, 3.0),
        (YoungFunction::power_log(2.0, 1.0, 1.0)?, Infinity, 2.0),
        (YoungFunction::power_log(1.5, 2.0, 0.5)?, Zero, 2.5),
        (YoungFunction::power_log(1.5, 2.0, 0.5)?, Infinity, 1.5),
        (YoungFunction::exp_minus_poly(2)?, Zero, 2.0),
        (YoungFunction::exp_minus_poly(3)?, Zero, 3.0),
    ];
    let trivial: Vec<(YoungFunction, Endpoint)> = vec![
        (YoungFunction::exp_minus_poly(2)?, Infinity),
        (YoungFunction::exp_minus_poly(3)?, Infinity),
        (YoungFunction::double_exp(), Infinity),
        (YoungFunction::exp_neg_inv_power(1.0)?, Zero),
        (YoungFunction::exp_neg_inv_power(2.0)?, Zero),
    ];
    let mut worst = 0.0f64;
    let mut misses = Vec::new();
    for (f, e, expected) in &powers {
        let est = matuszewska_exponent(f, *e)?;
        match (est.regime, est.exponent) {
            (Regime::PowerLike, Some(x)) => {
                let err = (x - expected).abs();
                worst = worst.max(err);
                if err > 1e-2 {
                    misses.push(format!("{f:?} at {}: {x}", e.label()));
                }
            }
            (r, _) => misses.push(format!("{f:?} at {}: {r:?}", e.label())),
        }
    }
    for (f, e) in &trivial {
        let r = matuszewska_exponent(f, *e)?.regime;
        if r != Regime::TrivialDegenerate {
            misses.push(format!("{f:?} at {}: {r:?}", e.label()));
        }
    }
    let mut detail =
        format!("{} exponents (worst error {worst:.1e}), {} trivial classifications", powers.len(), trivial.len());
    if !misses.is_empty() {
        detail.push_str(&format!("; misses: {}", misses.join("; ")));
    }
    outcome(misses.is_empty(), detail)
}

fn young_properties() -> Result<Outcome> {
    let results = common::young::run_all();
    let failures: Vec<String> =
        results.iter().filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}"))).collect();
    let detail = format!("{} suites x {} cases, {} failing", results.len(), common::young::CASES, failures.len());
    if failures.is_empty() {
        outcome(true, detail)
    } else {
        outcome(false, format!("{detail}; {}", failures.join("; ")))
    }
}

fn nonlocal_homogeneity() -> Result<Outcome> {
    let f = YoungFunction::power(2.0)?;
    let nm = NonlocalMesh::new(1.0, 128, 0.5)?;
    let opts = SolveOptions::default();
    let mut quotients = Vec::new();
    let mut last = None;
    for alpha in [0.5, 1.0, 2.0] {
        let r = solve_es(&f, &nm, alpha, &opts)?;
        quotients.push(r.energy / alpha);
        if alpha == 1.0 {
            last = Some(r.u.into_values());
        }
    }
    let lo = quotients.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = quotients.iter().cloned().fold(0.0, f64::max);
    let spread = (hi - lo) / lo;

    let u = last.expect("α = 1 is in the list");
    let g = nm.energy_gradient(&f, &u);
    let v: Vec<f64> = (0..u.len()).map(|k| (0.37 * k as f64).sin()).collect();
    let step = 1e-6;
    let shifted = |sign: f64| -> Vec<f64> { u.iter().zip(&v).map(|(a, b)| a + sign * step * b).collect() };
    let fd = (nm.energy_value(&f, &shifted(1.0)) - nm.energy_value(&f, &shifted(-1.0))) / (2.0 * step);
    let analytic: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
    let grad_gap = relative(fd, analytic);
    outcome(
        spread <= 1e-2 && grad_gap <= 1e-5,
        format!(
            "E/α = {:.5}, {:.5}, {:.5} (spread {spread:.1e}), gradient vs finite differences {grad_gap:.1e}",
            quotients[0], quotients[1], quotients[2]
        ),
    )
}

fn nonlocal_limit() -> Result<Outcome> {
    let nm = NonlocalMesh::new(1.0, 128, 0.5)?;
    let opts = SolveOptions::default();
    let small = solve_es(&sum24(), &nm, 1e-3, &opts)?;
    let reference = solve_es(&YoungFunction::power(2.0)?, &nm, 1.0, &opts)?;
    let gap = relative(small.quotient(), reference.quotient());
    outcome(
        gap <= 0.1,
        format!("quotient {:.5} at α=1e-3, Power(2) {:.5} (gap {gap:.2e})", small.quotient(), reference.quotient()),
    )
}

fn main() {
    let secs = Duration::from_secs;
    let mut pass = true;
    pass &= criterion(1, "p=2 discrete oracle", Some(secs(10)), p2_oracle);
    pass &= criterion(2, "p=3 shooting oracle", None, p3_oracle);

    let mut records = None;
    pass &= criterion(3, "energy derivative equals the multiplier", Some(secs(300)), || {
        let r = sweep(&sum24(), &Mesh::interval(1.0, 200)?, 1e-2, 1e2)?;
        let o = derivative(&r);
        records = Some(r);
        o
    });
    pass &= criterion(4, "energy, eigenvalue and quotient bounds", None, || match &records {
        Some(r) => bounds(r),
        None => outcome(false, "the sweep of criterion 3 did not run"),
    });
    pass &= criterion(5, "limits at 0 and infinity", None, limits);
    pass &= criterion(6, "decay without doubling", None, decay);
    pass &= criterion(7, "Matuszewska exponents", None, matuszewska_table);
    pass &= criterion(8, "Young function properties", None, young_properties);
    pass &= criterion(9, "nonlocal homogeneity", Some(secs(120)), nonlocal_homogeneity);
    pass &= criterion(10, "nonlocal limit at 0", None, nonlocal_limit);
    if !pass {
        std::process::exit(1);
    }
}
