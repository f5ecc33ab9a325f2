//! α-sweeps and the checks run on them: the two-sided bounds on `E(α)` and
//! `λ(α)`, the identity `E'(α) = λ(α)`, the limits of `E(α)/α` at `0` and
//! `∞`, and the decay of `E(α)/α` when `A` is not doubling.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::{solve_e, solve_e_from, EnergyModel, MinimizerResult, SolveOptions};
use crate::young::{delta2_report, matuszewska_exponent, Bound, Endpoint, GridSpec, Regime, YoungFunction};

/// Relative slack on the bound checks, for the solver tolerance.
pub const BOUND_SLACK: f64 = 1e-8;
/// Relative slack of the Lipschitz, sandwich and quotient-derivative checks.
pub const REGULARITY_SLACK: f64 = 5e-2;
/// Median gap allowed between `dE/dα` and `λ`.
pub const DERIVATIVE_TOL: f64 = 2e-2;
/// Gap allowed between an extrapolated limit and its reference.
pub const LIMIT_TOL: f64 = 5e-2;
/// Final-to-initial quotient ratio required by the decay check.
pub const DECAY_FRACTION: f64 = 0.2;

/// `α = 10^{k/per_decade}` for every integer `k` with `α` in
/// `[alpha_min, alpha_max]`; `α = 1` is hit exactly whenever it is in range.
pub fn alpha_grid(alpha_min: f64, alpha_max: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(alpha_min > 0.0 && alpha_max >= alpha_min && alpha_max.is_finite()) {
        return Err(Error::InvalidArgument {
            name: "alpha range",
            reason: format!("need 0 < alpha_min <= alpha_max, got [{alpha_min}, {alpha_max}]"),
        });
    }
    if per_decade < 3 {
        return Err(Error::InvalidArgument {
            name: "per_decade",
            reason: format!("central differences need at least 3 points per decade, got {per_decade}"),
        });
    }
    let pd = per_decade as f64;
    let k0 = (alpha_min.log10() * pd - 1e-9).ceil() as i64;
    let k1 = (alpha_max.log10() * pd + 1e-9).floor() as i64;
    let grid: Vec<f64> = (k0..=k1).map(|k| 10f64.powf(k as f64 / pd)).collect();
    if grid.len() < 3 {
        return Err(Error::InvalidArgument { name: "alpha range", reason: "fewer than 3 grid points".into() });
    }
    Ok(grid)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOptions {
    pub solve: SolveOptions,
    /// Start each α from the previous minimizer (sequential).
    pub warm_start: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { solve: SolveOptions::default(), warm_start: true }
    }
}

/// Flags of the three two-sided bounds at one record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundFlags {
    /// `min{α^p, α^{1/p}} E(1) ≤ E(α) ≤ max{α^p, α^{1/p}} E(1)`.
    pub energy: bool,
    /// `E(α)/(pα) ≤ λ(α) ≤ p E(α)/α`.
    pub eigenvalue: bool,
    /// `min{α^{p−1}, α^{1/p−1}} E(1) ≤ E(α)/α ≤ max{…} E(1)`.
    pub quotient: bool,
}

impl BoundFlags {
    pub fn all(&self) -> bool {
        self.energy && self.eigenvalue && self.quotient
    }
}

/// One α-sample of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub alpha: f64,
    pub energy: f64,
    pub quotient: f64,
    pub lambda: f64,
    pub de_dalpha: Option<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub bounds: Option<BoundFlags>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRecord {
    fn from_result(alpha: f64, r: &MinimizerResult) -> Self {
        SweepRecord {
            alpha,
            energy: r.energy,
            quotient: r.energy / alpha,
            lambda: r.lambda,
            de_dalpha: None,
            residual: r.residual,
            iterations: r.iterations,
            converged: r.converged,
            bounds: None,
            error: None,
        }
    }

    fn failed(alpha: f64, e: &Error) -> Self {
        SweepRecord {
            alpha,
            energy: f64::NAN,
            quotient: f64::NAN,
            lambda: f64::NAN,
            de_dalpha: None,
            residual: f64::NAN,
            iterations: 0,
            converged: false,
            bounds: None,
            error: Some(e.to_string()),
        }
    }

    fn usable(&self) -> bool {
        self.converged && self.energy.is_finite()
    }
}

/// The global `Δ₂` index `p = sup t a(t)/A(t)`, if `A` is doubling at both
/// endpoints.
pub fn global_p_index(f: &YoungFunction) -> Result<Option<f64>> {
    let g = GridSpec::default_for(f);
    let zero = delta2_report(f, Endpoint::Zero, &g)?;
    let inf = delta2_report(f, Endpoint::Infinity, &g)?;
    Ok(match (zero.p_index, inf.p_index) {
        (Bound::Finite(a), Bound::Finite(b)) if zero.holds && inf.holds => Some(a.max(b)),
        _ => None,
    })
}

/// Solves at every α of `grid` and fills in `dE/dα` and, when `A` is
/// doubling, the bound flags.
pub fn run_sweep<M: EnergyModel + ?Sized>(
    f: &YoungFunction,
    m: &M,
    grid: &[f64],
    opts: &SweepOptions,
) -> Result<Vec<SweepRecord>> {
    check_grid(grid)?;
    opts.solve.validate()?;
    let mut records: Vec<SweepRecord> = if opts.warm_start {
        let mut out = Vec::with_capacity(grid.len());
        let mut prev: Option<MinimizerResult> = None;
        for &alpha in grid {
            let warm = prev.as_ref().map(|r| r.u.values());
            match solve_e_from(f, m, alpha, &opts.solve, warm) {
                Ok(r) => {
                    out.push(SweepRecord::from_result(alpha, &r));
                    if r.converged || prev.is_none() {
                        prev = Some(r);
                    }
                }
                Err(e) => out.push(SweepRecord::failed(alpha, &e)),
            }
        }
        out
    } else {
        grid.par_iter()
            .map(|&alpha| match solve_e(f, m, alpha, &opts.solve) {
                Ok(r) => SweepRecord::from_result(alpha, &r),
                Err(e) => SweepRecord::failed(alpha, &e),
            })
            .collect()
    };
    fill_derivatives(&mut records);
    if let Some(p) = global_p_index(f)? {
        if let Ok(flags) = bound_flags(&records, p) {
            for (r, fl) in records.iter_mut().zip(flags) {
                r.bounds = Some(fl);
            }
        }
    }
    Ok(records)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::InvalidArgument { name: "alpha_grid", reason: "needs at least 3 points".into() });
    }
    let max_ratio = 10f64.powf(1.0 / 3.0) * (1.0 + 1e-9);
    for w in grid.windows(2) {
        if !(w[0] > 0.0 && w[1] > w[0]) {
            return Err(Error::InvalidArgument {
                name: "alpha_grid",
                reason: "must be positive and increasing".into(),
            });
        }
        if w[1] / w[0] > max_ratio {
            return Err(Error::InvalidArgument {
                name: "alpha_grid",
                reason: "needs at least 3 points per decade".into(),
            });
        }
    }
    Ok(())
}

/// Central difference at the middle sample. On a geometric grid it is exact
/// for `c₀ + c₁α + c₂/α`.
fn central(x: [f64; 3], y: [f64; 3]) -> f64 {
    (y[2] - y[0]) / (x[2] - x[0])
}

fn fill_derivatives(records: &mut [SweepRecord]) {
    for k in 1..records.len().saturating_sub(1) {
        let w = &records[k - 1..=k + 1];
        if w.iter().all(|r| r.usable()) {
            let d = central([w[0].alpha, w[1].alpha, w[2].alpha], [w[0].energy, w[1].energy, w[2].energy]);
            records[k].de_dalpha = Some(d);
        }
    }
}

/// `E(1)`, read off the record at `α = 1` or interpolated linearly in
/// `(ln α, ln E)` between the records that bracket it.
pub fn energy_at_one(records: &[SweepRecord]) -> Result<(f64, bool)> {
    let usable: Vec<&SweepRecord> = records.iter().filter(|r| r.usable()).collect();
    if let Some(r) = usable.iter().find(|r| (r.alpha - 1.0).abs() <= 1e-12) {
        return Ok((r.energy, false));
    }
    for w in usable.windows(2) {
        if w[0].alpha < 1.0 && w[1].alpha > 1.0 {
            let t = -w[0].alpha.ln() / (w[1].alpha.ln() - w[0].alpha.ln());
            let le = w[0].energy.ln() * (1.0 - t) + w[1].energy.ln() * t;
            return Ok((le.exp(), true));
        }
    }
    Err(Error::Precondition("the sweep does not bracket α = 1".into()))
}

fn flags_for(alpha: f64, energy: f64, lambda: f64, e1: f64, p: f64) -> BoundFlags {
    let lo = (1.0 - BOUND_SLACK) * alpha.powf(p).min(alpha.powf(1.0 / p)) * e1;
    let hi = (1.0 + BOUND_SLACK) * alpha.powf(p).max(alpha.powf(1.0 / p)) * e1;
    let q = energy / alpha;
    let qlo = (1.0 - BOUND_SLACK) * alpha.powf(p - 1.0).min(alpha.powf(1.0 / p - 1.0)) * e1;
    let qhi = (1.0 + BOUND_SLACK) * alpha.powf(p - 1.0).max(alpha.powf(1.0 / p - 1.0)) * e1;
    BoundFlags {
        energy: lo <= energy && energy <= hi,
        eigenvalue: (1.0 - BOUND_SLACK) * q / p <= lambda && lambda <= (1.0 + BOUND_SLACK) * p * q,
        quotient: qlo <= q && q <= qhi,
    }
}

fn bound_flags(records: &[SweepRecord], p: f64) -> Result<Vec<BoundFlags>> {
    let (e1, _) = energy_at_one(records)?;
    Ok(records.iter().map(|r| flags_for(r.alpha, r.energy, r.lambda, e1, p)).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub p: f64,
    pub energy_at_one: f64,
    pub interpolated: bool,
    pub checked: usize,
    pub violations: Vec<f64>,
    /// Whether inflating `E(α)` by `max{α^p, α^{1/p}}·1.01` is caught.
    pub negative_control_detected: bool,
    pub pass: bool,
}

/// Evaluates the three two-sided bounds on every converged record, and the
/// negative control.
pub fn check_bounds(records: &[SweepRecord], p: f64) -> Result<BoundsReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument { name: "p", reason: format!("must be finite and >= 1, got {p}") });
    }
    let (e1, interpolated) = energy_at_one(records)?;
    let usable: Vec<&SweepRecord> = records.iter().filter(|r| r.usable()).collect();
    let violations: Vec<f64> =
        usable.iter().filter(|r| !flags_for(r.alpha, r.energy, r.lambda, e1, p).all()).map(|r| r.alpha).collect();
    let detected = usable.iter().any(|r| {
        let bump = r.alpha.powf(p).max(r.alpha.powf(1.0 / p)) * 1.01;
        !flags_for(r.alpha, r.energy * bump, r.lambda, e1, p).energy
    });
    Ok(BoundsReport {
        p,
        energy_at_one: e1,
        interpolated,
        checked: usable.len(),
        pass: violations.is_empty() && !usable.is_empty(),
        violations,
        negative_control_detected: detected,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeReport {
    pub samples: usize,
    pub median_gap: f64,
    pub max_gap: f64,
    /// α where `0 ≤ dE/dα ≤ (1 + 5e-2) λ` fails.
    pub sandwich_violations: Vec<f64>,
    pub pass: bool,
}

/// `|dE/dα − λ|/λ` over the records with a derivative.
pub fn check_derivative(records: &[SweepRecord]) -> DerivativeReport {
    let mut gaps = Vec::new();
    let mut sandwich = Vec::new();
    for r in records.iter().filter(|r| r.usable()) {
        if let Some(d) = r.de_dalpha {
            gaps.push((d - r.lambda).abs() / r.lambda);
            if !(d >= 0.0 && d <= r.lambda * (1.0 + REGULARITY_SLACK)) {
                sandwich.push(r.alpha);
            }
        }
    }
    let median_gap = median(&gaps);
    let max_gap = gaps.iter().fold(0.0, |m: f64, &g| m.max(g));
    DerivativeReport {
        samples: gaps.len(),
        median_gap,
        max_gap,
        pass: !gaps.is_empty() && median_gap <= DERIVATIVE_TOL && sandwich.is_empty(),
        sandwich_violations: sandwich,
    }
}

fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub energy_increasing: bool,
    /// α at the left end of brackets where `|ΔE| > max λ · Δα · (1 + 5e-2)`.
    pub lipschitz_violations: Vec<f64>,
    /// α where the finite-difference derivative of `E/α` misses
    /// `(λ − E/α)/α` by more than 5e-2 relative (only where that exceeds 1e-8).
    pub quotient_identity_violations: Vec<f64>,
    pub quotient_identity_checked: usize,
    pub sup_quotient: f64,
    pub pass: bool,
}

pub fn check_regularity(records: &[SweepRecord]) -> RegularityReport {
    let usable: Vec<&SweepRecord> = records.iter().filter(|r| r.usable()).collect();
    let energy_increasing = usable.windows(2).all(|w| w[1].energy > w[0].energy);
    let lipschitz_violations: Vec<f64> = usable
        .windows(2)
        .filter(|w| {
            let lmax = w[0].lambda.max(w[1].lambda);
            (w[1].energy - w[0].energy).abs() > lmax * (w[1].alpha - w[0].alpha) * (1.0 + REGULARITY_SLACK)
        })
        .map(|w| w[0].alpha)
        .collect();
    let mut qviol = Vec::new();
    let mut checked = 0;
    for w in usable.windows(3) {
        let exact = (w[1].lambda - w[1].quotient) / w[1].alpha;
        if exact.abs() <= 1e-8 {
            continue;
        }
        checked += 1;
        let fd = central([w[0].alpha, w[1].alpha, w[2].alpha], [w[0].quotient, w[1].quotient, w[2].quotient]);
        if (fd - exact).abs() > REGULARITY_SLACK * exact.abs() {
            qviol.push(w[1].alpha);
        }
    }
    let sup_quotient = usable.iter().map(|r| r.quotient).fold(0.0, f64::max);
    RegularityReport {
        energy_increasing,
        pass: energy_increasing && lipschitz_violations.is_empty() && qviol.is_empty() && sup_quotient.is_finite(),
        lipschitz_violations,
        quotient_identity_violations: qviol,
        quotient_identity_checked: checked,
        sup_quotient,
    }
}

/// The limit of `E(α)/α` at one end of a sweep against `λ_{p_i}`.
#[derive(Debug, Clone, Serialize)]
pub struct LimitEstimate {
    pub endpoint: Endpoint,
    pub exponent: f64,
    /// Quotient at the extreme α of the sweep.
    pub raw: f64,
    pub extrapolated: f64,
    /// `"aitken"` or `"raw"` when the last three samples do not converge
    /// geometrically.
    pub method: &'static str,
    pub reference_lambda: f64,
    pub relative_gap: f64,
    /// The last three quotients are monotone, so the sampled lim sup and
    /// lim inf agree.
    pub monotone_tail: bool,
    pub pass: bool,
}

/// Extrapolates `E(α)/α` toward `endpoint` and compares it with the quotient
/// of the `Power(p_i)` problem on the same discretization.
pub fn estimate_limits<M: EnergyModel + ?Sized>(
    f: &YoungFunction,
    m: &M,
    records: &[SweepRecord],
    endpoint: Endpoint,
    opts: &SolveOptions,
) -> Result<LimitEstimate> {
    let est = matuszewska_exponent(f, endpoint)?;
    let p = match (est.regime, est.exponent) {
        (Regime::PowerLike, Some(p)) => p,
        (Regime::TrivialDegenerate, _) => {
            return Err(Error::Precondition(format!(
                "M at {} is trivial; the quotient decays instead (use the decay check)",
                endpoint.label()
            )))
        }
        _ => return Err(Error::Precondition(format!("M at {} does not behave like a power", endpoint.label()))),
    };
    let mut usable: Vec<&SweepRecord> = records.iter().filter(|r| r.usable()).collect();
    if endpoint == Endpoint::Zero {
        usable.reverse();
    }
    if usable.len() < 3 {
        return Err(Error::Precondition("need at least 3 converged records".into()));
    }
    let q: Vec<f64> = usable[usable.len() - 3..].iter().map(|r| r.quotient).collect();
    let (d1, d2) = (q[1] - q[0], q[2] - q[1]);
    let monotone_tail = d1 * d2 >= 0.0;
    let ratio = d2 / d1;
    let (extrapolated, method) = if d1 != 0.0 && ratio > 0.0 && ratio < 1.0 {
        (q[2] + d2 * ratio / (1.0 - ratio), "aitken")
    } else {
        (q[2], "raw")
    };
    let reference = solve_e(&YoungFunction::power(p)?, m, 1.0, opts)?;
    let reference_lambda = reference.quotient();
    let relative_gap = (extrapolated - reference_lambda).abs() / reference_lambda;
    Ok(LimitEstimate {
        endpoint,
        exponent: p,
        raw: q[2],
        extrapolated,
        method,
        reference_lambda,
        relative_gap,
        monotone_tail,
        pass: relative_gap <= LIMIT_TOL,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub endpoint: Endpoint,
    pub inner_radius: f64,
    pub quotient_at_one: f64,
    pub final_quotient: f64,
    pub ratio: f64,
    pub fraction: f64,
    /// Over the last decade toward the endpoint.
    pub strictly_decreasing: bool,
    pub pass: bool,
}

/// For `A` not doubling at `endpoint` on a domain of inner radius `> 1`,
/// checks that `E(α)/α` falls toward the endpoint.
pub fn check_decay(
    f: &YoungFunction,
    inner_radius: f64,
    records: &[SweepRecord],
    endpoint: Endpoint,
    fraction: f64,
) -> Result<DecayReport> {
    if !(inner_radius > 1.0) {
        return Err(Error::Precondition(format!(
            "the decay result needs a domain of inner radius > 1, got {inner_radius}"
        )));
    }
    let d2 = delta2_report(f, endpoint, &GridSpec::default_for(f))?;
    if d2.holds {
        return Err(Error::Precondition(format!(
            "A is doubling at {}; the decay result needs A(2t)/A(t) unbounded there",
            endpoint.label()
        )));
    }
    let usable: Vec<&SweepRecord> = records.iter().filter(|r| r.usable()).collect();
    let q1 = match usable.iter().find(|r| (r.alpha - 1.0).abs() <= 1e-12) {
        Some(r) => r.quotient,
        None => energy_at_one(records)?.0,
    };
    let mut tail: Vec<&SweepRecord> = match endpoint {
        Endpoint::Infinity => {
            let top = usable.last().ok_or(Error::Precondition("no converged records".into()))?.alpha;
            usable.iter().copied().filter(|r| r.alpha >= top / 10.0 * (1.0 - 1e-12)).collect()
        }
        Endpoint::Zero => {
            let bottom = usable.first().ok_or(Error::Precondition("no converged records".into()))?.alpha;
            let mut t: Vec<_> = usable.iter().copied().filter(|r| r.alpha <= bottom * 10.0 * (1.0 + 1e-12)).collect();
            t.reverse();
            t
        }
    };
    if tail.len() < 2 {
        return Err(Error::Precondition("the last decade holds fewer than 2 converged records".into()));
    }
    let strictly_decreasing = tail.windows(2).all(|w| w[1].quotient < w[0].quotient);
    let final_quotient = tail.pop().map(|r| r.quotient).unwrap_or(f64::NAN);
    let ratio = final_quotient / q1;
    Ok(DecayReport {
        endpoint,
        inner_radius,
        quotient_at_one: q1,
        final_quotient,
        ratio,
        fraction,
        strictly_decreasing,
        pass: strictly_decreasing && ratio <= fraction,
    })
}

/// Writes the records as CSV.
pub fn write_records_csv<W: Write>(records: &[SweepRecord], mut out: W) -> Result<()> {
    writeln!(out, "alpha,energy,quotient,lambda,dE_dalpha,residual,iterations,converged,energy_bound,eigenvalue_bound,quotient_bound")?;
    let flag = |b: Option<bool>| b.map_or(String::new(), |b| (b as u8).to_string());
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.alpha,
            r.energy,
            r.quotient,
            r.lambda,
            r.de_dalpha.map_or(String::new(), |d| d.to_string()),
            r.residual,
            r.iterations,
            r.converged as u8,
            flag(r.bounds.map(|b| b.energy)),
            flag(r.bounds.map(|b| b.eigenvalue)),
            flag(r.bounds.map(|b| b.quotient)),
        )?;
    }
    Ok(())
}

/// A matplotlib script plotting `E/α` and `λ` against `α` from a CSV written
/// by [`write_records_csv`].
pub fn plot_script(csv_path: &str, title: &str) -> String {
    format!(
        r#"import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open({csv_path:?})))
alpha = [float(r["alpha"]) for r in rows]
fig, ax = plt.subplots()
ax.plot(alpha, [float(r["quotient"]) for r in rows], "o-", label="E/alpha")
ax.plot(alpha, [float(r["lambda"]) for r in rows], "s--", label="lambda")
ax.set_xscale("log")
ax.set_yscale("log")
ax.set_xlabel("alpha")
ax.set_title({title:?})
ax.legend()
fig.savefig({png:?}, dpi=150)
"#,
        png = format!("{}.png", csv_path.trim_end_matches(".csv")),
    )
}
