//! Growth indices of a Young function near `0` and near `∞`: the Δ₂
//! condition with its index `p = sup t a(t)/A(t)`, and the
//! Matuszewska–Orlicz functions `M_i(t) = lim A(τt)/A(τ)`.
//!
//! Every limit here is approximated on a geometric grid, and all ratios are
//! formed from `ln A` so that exponential families can be pushed hundreds of
//! decades toward the endpoint without overflow.

use serde::{Serialize, Serializer};

use super::YoungFunction;
use crate::error::{Error, Result};

/// Values of `A(2t)/A(t)` or `M_i(t)` above this are treated as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;
/// Values of `M_i(t)` below this are treated as vanishing.
pub const VANISHING_THRESHOLD: f64 = 1e-6;
/// Relative spread allowed across the last decade for a stabilized limit.
pub const STABILIZATION_TOL: f64 = 1e-3;
/// A doubling ratio still rising over the last two decades is read as
/// divergent unless its last-decade rise (in log) is below this fraction of
/// the rise over the decade before.
pub const DECELERATION: f64 = 0.9;
/// Maximum relative deviation of `M_i` samples from the fitted power.
pub const FIT_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Zero,
    Infinity,
}

impl Endpoint {
    pub fn label(self) -> &'static str {
        match self {
            Endpoint::Zero => "0",
            Endpoint::Infinity => "inf",
        }
    }
}

/// A supremum that is either a finite number or diverges on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Divergent,
}

impl Bound {
    pub fn finite(self) -> Option<f64> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Divergent => None,
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(v) => s.serialize_f64(*v),
            Bound::Divergent => s.serialize_str("divergent"),
        }
    }
}

/// Geometric `t`-grid starting at `anchor` and running `decades` decades
/// toward the endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub anchor: f64,
    pub decades: f64,
    pub per_decade: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { anchor: 1.0, decades: 10.0, per_decade: 10 }
    }
}

impl GridSpec {
    /// 100 decades for families with a closed-form `ln A`, where slowly
    /// settling ratios need the room; the default grid otherwise.
    pub fn default_for(f: &YoungFunction) -> Self {
        if f.has_log_form() {
            GridSpec { decades: 100.0, ..GridSpec::default() }
        } else {
            GridSpec::default()
        }
    }

    /// Grid points ordered from the anchor toward the endpoint.
    pub fn points(&self, endpoint: Endpoint) -> Vec<f64> {
        let n = (self.decades * self.per_decade as f64).round() as usize;
        let sign = match endpoint {
            Endpoint::Zero => -1.0,
            Endpoint::Infinity => 1.0,
        };
        (0..=n).map(|k| self.anchor * 10f64.powf(sign * k as f64 / self.per_decade as f64)).collect()
    }
}

/// Outcome of the Δ₂ test at one endpoint.
#[derive(Debug, Clone, Serialize)]
pub struct Delta2Report {
    pub endpoint: Endpoint,
    pub holds: bool,
    /// `sup t a(t)/A(t)` over the grid; divergent when Δ₂ fails.
    pub p_index: Bound,
    /// `T₀` (Zero) or `T_∞` (Infinity): the grid anchor.
    pub threshold: f64,
    /// `sup A(2t)/A(t)` over the grid.
    pub doubling_sup: Bound,
    /// `C₀` or `C_∞ = max(2, doubling_sup)`.
    pub c_constant: Bound,
    /// Range of `t` actually sampled after skipping underflowed points.
    pub effective_range: (f64, f64),
    pub skipped_points: usize,
}

/// Tests the Δ₂ condition at `endpoint` on the geometric grid `grid`.
pub fn delta2_report(f: &YoungFunction, endpoint: Endpoint, grid: &GridSpec) -> Result<Delta2Report> {
    if grid.decades < 6.0 || grid.per_decade == 0 || !(grid.anchor > 0.0) {
        return Err(Error::InvalidArgument {
            name: "grid_spec",
            reason: "needs a positive anchor, at least 6 decades and 1 point per decade".into(),
        });
    }
    let points = grid.points(endpoint);
    let mut skipped = 0;
    let mut used = Vec::new();
    let mut growth_sup = 0.0f64;
    let mut growth_divergent = false;
    // (t, A(2t)/A(t)) ordered toward the endpoint
    let mut doubling: Vec<(f64, f64)> = Vec::new();
    for &t in &points {
        let ln_a = f.ln_eval(t);
        if ln_a == f64::NEG_INFINITY || ln_a.is_nan() {
            skipped += 1;
            continue;
        }
        used.push(t);
        let g = f.growth_ratio(t);
        if g.is_finite() {
            growth_sup = growth_sup.max(g);
        } else {
            growth_divergent = true;
        }
        if endpoint == Endpoint::Zero && 2.0 * t > grid.anchor * (1.0 + 1e-12) {
            continue;
        }
        let ln_2 = f.ln_eval(2.0 * t);
        let r = if ln_2.is_infinite() && ln_a.is_infinite() { f64::INFINITY } else { (ln_2 - ln_a).exp() };
        doubling.push((t, if r.is_nan() { f64::INFINITY } else { r }));
    }
    if used.is_empty() {
        return Err(Error::Precondition("every grid point underflowed".into()));
    }
    let doubling_sup = doubling.iter().map(|d| d.1).fold(0.0, f64::max);
    let decade = |back: f64| {
        let edge = points[points.len() - 1];
        match endpoint {
            Endpoint::Zero => edge * 10f64.powf(back),
            Endpoint::Infinity => edge * 10f64.powf(-back),
        }
    };
    let since = |start: f64| -> Vec<f64> {
        doubling
            .iter()
            .filter(|(t, _)| match endpoint {
                Endpoint::Zero => *t <= start * (1.0 + 1e-12),
                Endpoint::Infinity => *t >= start * (1.0 - 1e-12),
            })
            .map(|d| d.1)
            .collect()
    };
    let window = since(decade(2.0));
    let last = since(decade(1.0));
    let growing = window.len() >= 3 && last.len() >= 2 && {
        let (first, mid, end) = (window[0], last[0], window[window.len() - 1]);
        let rise_prev = (mid / first).ln();
        let rise_last = (end / mid).ln();
        window.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12))
            && end > first * (1.0 + STABILIZATION_TOL)
            && rise_last > DECELERATION * rise_prev
    };
    let holds = doubling_sup.is_finite() && doubling_sup < DIVERGENCE_THRESHOLD && !growing;
    let (lo, hi) = used.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &t| (l.min(t), h.max(t)));
    Ok(Delta2Report {
        endpoint,
        holds,
        p_index: if holds && !growth_divergent { Bound::Finite(growth_sup.max(1.0)) } else { Bound::Divergent },
        threshold: grid.anchor,
        doubling_sup: if doubling_sup.is_finite() && doubling_sup < DIVERGENCE_THRESHOLD {
            Bound::Finite(doubling_sup)
        } else {
            Bound::Divergent
        },
        c_constant: if holds { Bound::Finite(doubling_sup.max(2.0)) } else { Bound::Divergent },
        effective_range: (lo, hi),
        skipped_points: skipped,
    })
}

/// Classification of the limit `A(τt)/A(τ)` as `τ` approaches the endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// The ratio settles; `M_i` behaves like a power.
    PowerLike,
    /// `M_i` is the 0 / 1 / ∞ step function.
    TrivialDegenerate,
    /// Neither settles nor crosses the thresholds.
    Oscillating,
}

/// Geometric `τ`-grid toward the endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauGrid {
    pub start: f64,
    pub decades: f64,
    pub per_decade: usize,
}

impl TauGrid {
    /// Families with a closed-form `ln A` are pushed 250 decades out; a
    /// custom density only a dozen, since its `A` is computed in `f64`.
    pub fn default_for(f: &YoungFunction, endpoint: Endpoint) -> Self {
        let (start, decades) = match (f.has_log_form(), endpoint) {
            (true, Endpoint::Zero) => (1e-2, 250.0),
            (true, Endpoint::Infinity) => (1e2, 250.0),
            (false, Endpoint::Zero) => (1e-1, 12.0),
            (false, Endpoint::Infinity) => (1e1, 12.0),
        };
        TauGrid { start, decades, per_decade: 4 }
    }

    pub fn points(&self, endpoint: Endpoint) -> Vec<f64> {
        GridSpec { anchor: self.start, decades: self.decades, per_decade: self.per_decade }.points(endpoint)
    }
}

/// One estimate of `M_i(t)`.
#[derive(Debug, Clone, Serialize)]
pub struct MatuszewskaSample {
    pub t: f64,
    /// `A(τt)/A(τ)` at the last grid point (may be `0` or `∞`).
    #[serde(serialize_with = "serialize_extended")]
    pub value: f64,
    pub regime: Regime,
    /// `(τ, A(τt)/A(τ))` along the grid.
    #[serde(skip)]
    pub trace: Vec<(f64, f64)>,
}

fn serialize_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

fn ln_ratio(f: &YoungFunction, tau: f64, t: f64) -> f64 {
    let num = f.ln_eval(tau * t);
    let den = f.ln_eval(tau);
    if num.is_infinite() && den.is_infinite() && num == den {
        if num > 0.0 {
            // both overflowed: monotonicity decides
            return if t > 1.0 {
                f64::INFINITY
            } else if t < 1.0 {
                f64::NEG_INFINITY
            } else {
                0.0
            };
        }
        return f64::NAN;
    }
    num - den
}

/// Running estimate of `M_i(t)` along `grid`, with its regime.
pub fn matuszewska(f: &YoungFunction, endpoint: Endpoint, t: f64, grid: &TauGrid) -> Result<MatuszewskaSample> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument { name: "t", reason: format!("must be positive, got {t}") });
    }
    let taus = grid.points(endpoint);
    let trace: Vec<(f64, f64)> =
        taus.iter().map(|&tau| (tau, ln_ratio(f, tau, t))).filter(|(_, l)| !l.is_nan()).collect();
    let Some(&(_, last)) = trace.last() else {
        return Err(Error::Precondition("A underflowed at every grid point".into()));
    };
    let value = last.exp();
    let trace_values: Vec<(f64, f64)> = trace.iter().map(|&(tau, l)| (tau, l.exp())).collect();
    if t == 1.0 {
        return Ok(MatuszewskaSample { t, value: 1.0, regime: Regime::PowerLike, trace: trace_values });
    }
    let toward = |l: f64| (t > 1.0 && l == f64::INFINITY) || (t < 1.0 && l == f64::NEG_INFINITY);
    let regime = if toward(last) {
        Regime::TrivialDegenerate
    } else {
        let window = &trace[trace.len().saturating_sub(grid.per_decade + 1)..];
        let spread = window.iter().map(|(_, l)| (l - last).abs()).fold(0.0, f64::max);
        if last.is_finite() && spread <= STABILIZATION_TOL.ln_1p() {
            Regime::PowerLike
        } else if (t > 1.0 && value > DIVERGENCE_THRESHOLD) || (t < 1.0 && value < VANISHING_THRESHOLD) {
            Regime::TrivialDegenerate
        } else {
            Regime::Oscillating
        }
    };
    Ok(MatuszewskaSample { t, value, regime, trace: trace_values })
}

/// The Matuszewska–Orlicz function at one endpoint, sampled on
/// `t ∈ {2⁻³, …, 2³}`, with its fitted power exponent.
#[derive(Debug, Clone, Serialize)]
pub struct MatuszewskaEstimate {
    pub endpoint: Endpoint,
    pub samples: Vec<MatuszewskaSample>,
    pub regime: Regime,
    /// Least-squares `p_i` with `M_i(t) ≈ t^{p_i}`; only in the power regime.
    pub exponent: Option<f64>,
    /// Largest `|M_i(t)/t^{p_i} − 1|` over the samples.
    pub max_rel_deviation: Option<f64>,
    pub tau_grid: TauGrid,
}

/// Fits `M_i(t) = t^{p_i}` through the origin in log-log coordinates.
pub fn matuszewska_exponent(f: &YoungFunction, endpoint: Endpoint) -> Result<MatuszewskaEstimate> {
    let grid = TauGrid::default_for(f, endpoint);
    let samples = (-3..=3).map(|j| matuszewska(f, endpoint, 2f64.powi(j), &grid)).collect::<Result<Vec<_>>>()?;
    let mut regime = Regime::PowerLike;
    if samples.iter().any(|s| s.regime == Regime::TrivialDegenerate) {
        let step_shaped = samples.iter().all(|s| {
            if s.t > 1.0 {
                s.value > DIVERGENCE_THRESHOLD
            } else if s.t < 1.0 {
                s.value < VANISHING_THRESHOLD
            } else {
                true
            }
        });
        regime = if step_shaped { Regime::TrivialDegenerate } else { Regime::Oscillating };
    } else if samples.iter().any(|s| s.regime == Regime::Oscillating) {
        regime = Regime::Oscillating;
    }
    let (mut exponent, mut deviation) = (None, None);
    if regime == Regime::PowerLike {
        let (num, den) = samples
            .iter()
            .filter(|s| s.t != 1.0)
            .fold((0.0, 0.0), |(n, d), s| (n + s.t.ln() * s.value.ln(), d + s.t.ln().powi(2)));
        let p = num / den;
        let dev = samples.iter().map(|s| (s.value / s.t.powf(p) - 1.0).abs()).fold(0.0, f64::max);
        deviation = Some(dev);
        // M_i(t) <= t on (0,1) forces p_i >= 1
        if dev <= FIT_TOL && p >= 1.0 - 1e-9 {
            exponent = Some(p);
        } else {
            regime = Regime::Oscillating;
        }
    }
    Ok(MatuszewskaEstimate { endpoint, samples, regime, exponent, max_rel_deviation: deviation, tau_grid: grid })
}
