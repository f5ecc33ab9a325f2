//! Young functions and the scalar calculus built on them.
//!
//! A Young function is `A(t) = ∫₀ᵗ a(τ) dτ` for a nondecreasing density `a`
//! with `a(0) = 0`, `a(t) > 0` for `t > 0` and `a(t) → ∞`. Every preset
//! family below comes with closed forms for `A`, `a`, `a'` and for `ln A`,
//! so that ratios like `A(τt)/A(τ)` stay meaningful far outside the range of
//! `f64`. User-supplied densities ([`YoungFunction::custom`]) are integrated
//! numerically.

mod custom;
mod indices;
mod norm;

use std::fmt;
use std::sync::Arc;

pub use custom::{Custom, Density};
pub use indices::{
    delta2_report, matuszewska, matuszewska_exponent, Bound, Delta2Report, Endpoint, GridSpec, MatuszewskaEstimate,
    MatuszewskaSample, Regime, TauGrid, DIVERGENCE_THRESHOLD, VANISHING_THRESHOLD,
};
pub use norm::{luxemburg_norm, modular, modular_values, NodalQuadrature};

use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, golden_max, ln_factorial, ln_softplus, log_add_exp, logistic, softplus};

/// Relative tolerance used when `A` has to be integrated from `a`.
pub const QUADRATURE_RTOL: f64 = 1e-10;

/// A value that may have left the range of `f64`.
///
/// Overflowing evaluations saturate at `f64::MAX` and raise `overflow`, so an
/// infinity never leaks silently into later arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checked {
    pub value: f64,
    pub overflow: bool,
}

impl Checked {
    fn new(v: f64) -> Self {
        if v.is_finite() {
            Checked { value: v, overflow: false }
        } else {
            Checked { value: f64::MAX, overflow: true }
        }
    }
}

/// The preset families, with their parameters.
#[derive(Clone)]
pub enum Family {
    /// `A(t) = t^p`.
    Power { p: f64 },
    /// `A(t) = t^p/p + t^q/q`.
    SumOfPowers { p: f64, q: f64 },
    /// `A(t) = (t^p/p) ln^k(1 + t^r)`.
    PowerLog { p: f64, k: f64, r: f64 },
    /// `A(t) = e^t − Σ_{j<n} t^j/j!`.
    ExpMinusPoly { n: u32 },
    /// `A(t) = exp(−t^{−k})` up to the inflection point `t*`, continued by a
    /// quadratic so that the density stays nondecreasing.
    ExpNegInvPower { k: f64 },
    /// `A(t) = exp(e^t) − e(1 + t)`.
    DoubleExp,
    /// Density supplied by the caller.
    Custom(Arc<Custom>),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Power { p } => write!(f, "Power({p})"),
            Family::SumOfPowers { p, q } => write!(f, "SumOfPowers({p}, {q})"),
            Family::PowerLog { p, k, r } => write!(f, "PowerLog({p}, {k}, {r})"),
            Family::ExpMinusPoly { n } => write!(f, "ExpMinusPoly({n})"),
            Family::ExpNegInvPower { k } => write!(f, "ExpNegInvPower({k})"),
            Family::DoubleExp => write!(f, "DoubleExp"),
            Family::Custom(c) => write!(f, "Custom({})", c.name()),
        }
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A Young function `A` together with its density `a = A'`.
#[derive(Clone, Debug)]
pub struct YoungFunction {
    family: Family,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidYoung(msg.into())
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(invalid(format!("Power requires p > 1, got {p}")));
        }
        Ok(Self { family: Family::Power { p } })
    }

    pub fn sum_of_powers(p: f64, q: f64) -> Result<Self> {
        if !(p > 1.0 && q >= p && q.is_finite()) {
            return Err(invalid(format!("SumOfPowers requires 1 < p <= q, got ({p}, {q})")));
        }
        Ok(Self { family: Family::SumOfPowers { p, q } })
    }

    /// `(t^p/p) ln^k(1 + t^r)`.
    pub fn power_log(p: f64, k: f64, r: f64) -> Result<Self> {
        if !(p >= 1.0 && k >= 0.0 && r > 0.0 && p + r * k > 1.0) || !(p + k + r).is_finite() {
            return Err(invalid(format!("PowerLog requires p >= 1, k >= 0, r > 0, p + rk > 1; got ({p}, {k}, {r})")));
        }
        Ok(Self { family: Family::PowerLog { p, k, r } })
    }

    pub fn exp_minus_poly(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("ExpMinusPoly requires n >= 2, got {n}")));
        }
        Ok(Self { family: Family::ExpMinusPoly { n } })
    }

    pub fn exp_neg_inv_power(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(invalid(format!("ExpNegInvPower requires k > 0, got {k}")));
        }
        Ok(Self { family: Family::ExpNegInvPower { k } })
    }

    pub fn double_exp() -> Self {
        Self { family: Family::DoubleExp }
    }

    /// A Young function given only by its density; `A` is obtained by
    /// adaptive quadrature on a cached geometric grid.
    pub fn custom<F>(name: impl Into<String>, density: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { family: Family::Custom(Arc::new(Custom::new(name, Density::closure(density), None))) }
    }

    pub fn from_custom(custom: Custom) -> Self {
        Self { family: Family::Custom(Arc::new(custom)) }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Short machine-readable family tag.
    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Power { .. } => "power",
            Family::SumOfPowers { .. } => "sum_of_powers",
            Family::PowerLog { .. } => "power_log",
            Family::ExpMinusPoly { .. } => "exp_minus_poly",
            Family::ExpNegInvPower { .. } => "exp_neg_inv_power",
            Family::DoubleExp => "double_exp",
            Family::Custom(_) => "custom",
        }
    }

    /// True when `ln A` is available in closed form over the whole half-line.
    pub fn has_log_form(&self) -> bool {
        !matches!(self.family, Family::Custom(_))
    }

    /// `A(t)`, saturating at `f64::MAX` on overflow.
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_checked(t).value
    }

    /// `A(t)` with an explicit overflow flag.
    pub fn eval_checked(&self, t: f64) -> Checked {
        let t = t.abs();
        if t == 0.0 {
            return Checked::new(0.0);
        }
        let v = match &self.family {
            Family::Power { p } => t.powf(*p),
            Family::SumOfPowers { p, q } => t.powf(*p) / p + t.powf(*q) / q,
            Family::PowerLog { p, k, r } => {
                let z = r * t.ln();
                let l = softplus(z);
                let v = t.powf(*p) / p * l.powf(*k);
                if v.is_finite() && v > 0.0 {
                    v
                } else {
                    self.ln_eval(t).exp()
                }
            }
            Family::ExpMinusPoly { n } => exp_tail(*n, t),
            Family::ExpNegInvPower { k } => {
                let ts = inflection(*k);
                if t <= ts {
                    (-t.powf(-k)).exp()
                } else {
                    let (a_s, big_a_s) = (neg_inv_density(*k, ts), (-ts.powf(-k)).exp());
                    big_a_s + a_s / (2.0 * ts) * (t * t - ts * ts)
                }
            }
            Family::DoubleExp => double_exp_primitive(t),
            Family::Custom(c) => c.primitive(t),
        };
        Checked::new(v)
    }

    /// `ln A(t)`, finite wherever `A(t) > 0` even when `A(t)` itself is not
    /// representable. Returns `-∞` at `t = 0`.
    pub fn ln_eval(&self, t: f64) -> f64 {
        let t = t.abs();
        if t == 0.0 {
            return f64::NEG_INFINITY;
        }
        let lt = t.ln();
        match &self.family {
            Family::Power { p } => p * lt,
            Family::SumOfPowers { p, q } => log_add_exp(p * lt - p.ln(), q * lt - q.ln()),
            Family::PowerLog { p, k, r } => {
                let lnl = if *k == 0.0 { 0.0 } else { k * ln_softplus(r * lt) };
                p * lt - p.ln() + lnl
            }
            Family::ExpMinusPoly { n } => ln_exp_tail(*n, t),
            Family::ExpNegInvPower { k } => {
                let ts = inflection(*k);
                if t <= ts {
                    -t.powf(-k)
                } else {
                    self.eval(t).ln()
                }
            }
            Family::DoubleExp => {
                if t < 6.0 {
                    double_exp_primitive(t).ln()
                } else {
                    // exp(e^t) (1 − e(1+t) exp(−e^t))
                    let et = t.exp();
                    et + (-(1f64.exp()) * (1.0 + t) * (-et).exp()).ln_1p()
                }
            }
            Family::Custom(c) => c.primitive(t).ln(),
        }
    }

    /// The density `a(t) = A'(t)`, saturating at `f64::MAX`.
    pub fn density(&self, t: f64) -> f64 {
        let t = t.abs();
        if t == 0.0 {
            return 0.0;
        }
        let v = match &self.family {
            Family::Power { p } => p * t.powf(p - 1.0),
            Family::SumOfPowers { p, q } => t.powf(p - 1.0) + t.powf(q - 1.0),
            Family::PowerLog { p, k, r } => {
                let z = r * t.ln();
                let v = t.powf(p - 1.0) * softplus(z).powf(*k) * (1.0 + k * r / p * log_ratio(z));
                if v.is_finite() {
                    v
                } else {
                    self.ln_density(t).exp()
                }
            }
            Family::ExpMinusPoly { n } => exp_tail(n - 1, t),
            Family::ExpNegInvPower { k } => {
                let ts = inflection(*k);
                if t <= ts {
                    neg_inv_density(*k, t)
                } else {
                    neg_inv_density(*k, ts) * t / ts
                }
            }
            Family::DoubleExp => 1f64.exp() * (t + t.exp_m1()).exp_m1(),
            Family::Custom(c) => c.density(t),
        };
        if v.is_finite() {
            v
        } else {
            f64::MAX
        }
    }

    /// `ln a(t)`.
    pub fn ln_density(&self, t: f64) -> f64 {
        let t = t.abs();
        if t == 0.0 {
            return f64::NEG_INFINITY;
        }
        let lt = t.ln();
        match &self.family {
            Family::Power { p } => p.ln() + (p - 1.0) * lt,
            Family::SumOfPowers { p, q } => log_add_exp((p - 1.0) * lt, (q - 1.0) * lt),
            Family::PowerLog { p, k, r } => {
                let z = r * lt;
                let lnl = if *k == 0.0 { 0.0 } else { k * ln_softplus(z) };
                (p - 1.0) * lt + lnl + (k * r / p * log_ratio(z)).ln_1p()
            }
            Family::ExpMinusPoly { n } => ln_exp_tail(n - 1, t),
            Family::ExpNegInvPower { k } => {
                let ts = inflection(*k);
                if t <= ts {
                    k.ln() - (k + 1.0) * lt - t.powf(-k)
                } else {
                    self.density(t).ln()
                }
            }
            Family::DoubleExp => {
                if t < 6.0 {
                    self.density(t).ln()
                } else {
                    let s = t + t.exp();
                    s + (-(1f64.exp()) * (-s).exp()).ln_1p()
                }
            }
            Family::Custom(c) => c.density(t).ln(),
        }
    }

    /// `a'(t)`, the curvature of `A`. Closed form where it is short, otherwise
    /// a central difference.
    pub fn density_slope(&self, t: f64) -> f64 {
        let t = t.abs();
        let v = match &self.family {
            Family::Power { p } => p * (p - 1.0) * t.powf(p - 2.0),
            Family::SumOfPowers { p, q } => (p - 1.0) * t.powf(p - 2.0) + (q - 1.0) * t.powf(q - 2.0),
            Family::ExpMinusPoly { n } => exp_tail(n - 2, t),
            Family::ExpNegInvPower { k } => {
                let ts = inflection(*k);
                if t <= ts {
                    if t == 0.0 {
                        0.0
                    } else {
                        let e = (-t.powf(-k)).exp();
                        k * e * t.powf(-k - 2.0) * (k * t.powf(-k) - (k + 1.0))
                    }
                } else {
                    neg_inv_density(*k, ts) / ts
                }
            }
            Family::DoubleExp => (1.0 + t.exp()) * (t + t.exp()).exp(),
            Family::PowerLog { .. } | Family::Custom(_) => {
                let h = 1e-6 * t.max(1e-6);
                let lo = (t - h).max(0.0);
                (self.density(t + h) - self.density(lo)) / (t + h - lo)
            }
        };
        if v.is_finite() {
            v.max(0.0)
        } else {
            f64::MAX
        }
    }

    /// The right-continuous generalized inverse `a⁻¹(s) = sup{τ ≥ 0 : a(τ) ≤ s}`
    /// located by bisection on the monotone density.
    pub fn inverse_density(&self, s: f64) -> Checked {
        if let Family::Custom(c) = &self.family {
            if let Some(inv) = c.inverse() {
                return Checked::new(inv.eval(s));
            }
        }
        if !(s > 0.0) {
            return Checked::new(0.0);
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        if self.density(hi) <= s {
            loop {
                lo = hi;
                hi *= 2.0;
                if hi > 1e300 {
                    return Checked { value: f64::MAX, overflow: true };
                }
                if self.density(hi) > s {
                    break;
                }
            }
        } else {
            let mut probe = 0.5;
            while probe > 1e-300 {
                if self.density(probe) <= s {
                    lo = probe;
                    break;
                }
                hi = probe;
                probe *= 0.5;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.density(mid) <= s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Checked::new(0.5 * (lo + hi))
    }

    /// The complementary function `Ā(t) = ∫₀ᵗ a⁻¹(s) ds`.
    pub fn complementary_eval(&self, t: f64) -> Checked {
        let t = t.abs();
        if t == 0.0 {
            return Checked::new(0.0);
        }
        if self.inverse_density(t).overflow {
            return Checked { value: f64::MAX, overflow: true };
        }
        let v = adaptive_simpson(&|s: f64| self.inverse_density(s).value, 0.0, t, QUADRATURE_RTOL);
        Checked::new(v)
    }

    /// `sup{τt − A(τ) : τ ≥ 0}` by direct maximization, independent of the
    /// inverse density. Used to cross-check [`Self::complementary_eval`].
    pub fn complementary_sup(&self, t: f64) -> Checked {
        let t = t.abs();
        if t == 0.0 {
            return Checked::new(0.0);
        }
        let objective = |tau: f64| {
            let a = self.eval_checked(tau);
            if a.overflow {
                f64::NEG_INFINITY
            } else {
                tau * t - a.value
            }
        };
        let mut hi = 1.0;
        while objective(2.0 * hi) >= objective(hi) {
            hi *= 2.0;
            if hi > 1e300 {
                return Checked { value: f64::MAX, overflow: true };
            }
        }
        let (_, v) = golden_max(objective, 0.0, 2.0 * hi, 1e-15);
        Checked::new(v.max(0.0))
    }

    /// The complementary Young function `Ā` as a first-class value: its
    /// density is `a⁻¹` and the inverse of that density is `a` again.
    pub fn complementary(&self) -> YoungFunction {
        let this = self.clone();
        let back = self.clone();
        let custom = Custom::new(
            format!("complementary of {:?}", self.family),
            Density::closure(move |s| this.inverse_density(s).value),
            Some(Density::closure(move |t| back.density(t))),
        );
        YoungFunction::from_custom(custom)
    }

    /// `t a(t) / A(t)`, computed in log space.
    pub fn growth_ratio(&self, t: f64) -> f64 {
        if let Family::Power { p } = self.family {
            return p;
        }
        (t.ln() + self.ln_density(t) - self.ln_eval(t)).exp()
    }
}

/// Inflection point of `exp(−t^{−k})`.
fn inflection(k: f64) -> f64 {
    (k / (k + 1.0)).powf(1.0 / k)
}

fn neg_inv_density(k: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    k * t.powf(-k - 1.0) * (-t.powf(-k)).exp()
}

/// `q(z) = x / ((1+x) ln(1+x))` with `x = e^z`; tends to 1 as `z → −∞`.
fn log_ratio(z: f64) -> f64 {
    if z < -35.0 {
        1.0 - 0.5 * z.exp()
    } else {
        logistic(z) / softplus(z)
    }
}

/// `Σ_{j≥m} t^j / j!` for `t ≥ 0`.
pub(crate) fn exp_tail(m: u32, t: f64) -> f64 {
    if t == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if m == 0 {
        return t.exp();
    }
    if t < m as f64 + 20.0 {
        (m as f64 * t.ln() - ln_factorial(m) + tail_series_ln(m, t)).exp()
    } else {
        let poly: f64 = (0..m).map(|j| (j as f64 * t.ln() - ln_factorial(j)).exp()).sum();
        t.exp() - poly
    }
}

/// `ln Σ_{j≥0} t^j m!/(m+j)!`.
fn tail_series_ln(m: u32, t: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = 1.0;
    loop {
        term *= t / (m as f64 + j);
        sum += term;
        if term < 1e-17 * sum || j > 2000.0 {
            break;
        }
        j += 1.0;
    }
    sum.ln()
}

fn ln_exp_tail(m: u32, t: f64) -> f64 {
    if t == 0.0 {
        return if m == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if m == 0 {
        return t;
    }
    if t < m as f64 + 20.0 {
        m as f64 * t.ln() - ln_factorial(m) + tail_series_ln(m, t)
    } else {
        let rest: f64 = (0..m).map(|j| (j as f64 * t.ln() - t - ln_factorial(j)).exp()).sum();
        t + (-rest).ln_1p()
    }
}

/// Bell numbers `B_0..B_11`: `exp(e^t − 1) = Σ B_n t^n / n!`.
const BELL: [f64; 12] = [1.0, 1.0, 2.0, 5.0, 15.0, 52.0, 203.0, 877.0, 4140.0, 21147.0, 115975.0, 678570.0];

fn double_exp_primitive(t: f64) -> f64 {
    let e = 1f64.exp();
    if t < 0.05 {
        // e (exp(e^t − 1) − 1 − t) = e Σ_{n≥2} B_n t^n / n!
        let mut fact = 1.0;
        let mut pow = 1.0;
        let mut sum = 0.0;
        for (n, b) in BELL.iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
                pow *= t;
            }
            if n >= 2 {
                sum += b * pow / fact;
            }
        }
        e * sum
    } else {
        e * (t.exp_m1().exp_m1() - t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn families() -> Vec<YoungFunction> {
        vec![
            YoungFunction::power(2.0).unwrap(),
            YoungFunction::power(3.5).unwrap(),
            YoungFunction::sum_of_powers(2.0, 4.0).unwrap(),
            YoungFunction::power_log(2.0, 1.0, 1.0).unwrap(),
            YoungFunction::power_log(1.5, 2.0, 0.5).unwrap(),
            YoungFunction::exp_minus_poly(2).unwrap(),
            YoungFunction::exp_minus_poly(3).unwrap(),
            YoungFunction::exp_neg_inv_power(1.0).unwrap(),
            YoungFunction::exp_neg_inv_power(2.0).unwrap(),
            YoungFunction::double_exp(),
        ]
    }

    #[test]
    fn eval_examples() {
        assert_eq!(YoungFunction::power(2.0).unwrap().eval(3.0), 9.0);
        let f = YoungFunction::sum_of_powers(3.0, 4.0).unwrap();
        assert!((f.eval(1.0) - 7.0 / 12.0).abs() < 1e-15);
        assert_eq!(YoungFunction::exp_minus_poly(2).unwrap().eval(0.0), 0.0);
    }

    #[test]
    fn exp_minus_poly_matches_direct_formula() {
        let f = YoungFunction::exp_minus_poly(2).unwrap();
        for &t in &[0.01f64, 0.5, 1.0, 3.0, 10.0, 25.0, 40.0] {
            let direct = t.exp_m1() - t;
            assert!((f.eval(t) - direct).abs() <= 1e-12 * direct, "t={t}");
            assert!((f.density(t) - t.exp_m1()).abs() <= 1e-13 * t.exp_m1());
            assert!((f.ln_eval(t) - direct.ln()).abs() < 1e-12);
        }
        // tiny t: A ≈ t²/2
        assert!((f.eval(1e-8) / 5e-17 - 1.0).abs() < 1e-7);
    }

    #[test]
    fn overflow_is_flagged_not_silent() {
        let f = YoungFunction::exp_minus_poly(2).unwrap();
        let c = f.eval_checked(1000.0);
        assert!(c.overflow);
        assert_eq!(c.value, f64::MAX);
        assert!((f.ln_eval(1000.0) - 1000.0).abs() < 1e-9);
        let d = YoungFunction::double_exp();
        assert!(d.eval_checked(10.0).overflow);
        assert!((d.ln_eval(10.0) - 10f64.exp()).abs() < 1e-6);
    }

    #[test]
    fn double_exp_series_and_direct_agree() {
        let e = 1f64.exp();
        for &t in &[0.01f64, 0.049, 0.051, 0.2, 1.0, 3.0] {
            let direct = (t.exp()).exp() - e * (1.0 + t);
            let v = double_exp_primitive(t);
            assert!((v - direct).abs() <= 1e-9 * direct, "t={t} {v} {direct}");
        }
        let f = YoungFunction::double_exp();
        assert!(f.density(0.0) == 0.0);
    }

    #[test]
    fn log_forms_agree_with_direct_evaluation() {
        for f in families() {
            for &t in &[1e-3, 0.1, 0.4, 1.0, 2.5, 5.0] {
                let a = f.eval(t);
                if a > 0.0 && a < 1e300 {
                    assert!((f.ln_eval(t) - a.ln()).abs() < 1e-9 * (1.0 + a.ln().abs()), "{f:?} t={t}");
                }
                let d = f.density(t);
                if d > 0.0 && d < 1e300 {
                    assert!((f.ln_density(t) - d.ln()).abs() < 1e-9 * (1.0 + d.ln().abs()), "{f:?} t={t}");
                }
            }
        }
    }

    #[test]
    fn density_is_derivative_of_primitive() {
        for f in families() {
            for &t in &[0.05, 0.3, 0.7, 1.3, 2.0] {
                let h = 1e-6 * t;
                let fd = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
                let a = f.density(t);
                assert!((fd - a).abs() <= 1e-6 * (1.0 + a), "{f:?} t={t}: {fd} vs {a}");
                let fd2 = (f.density(t + h) - f.density(t - h)) / (2.0 * h);
                let s = f.density_slope(t);
                assert!((fd2 - s).abs() <= 1e-4 * (1.0 + s), "{f:?} t={t}: {fd2} vs {s}");
            }
        }
    }

    #[test]
    fn complementary_examples() {
        let half_square = YoungFunction::custom("t^2/2", |t| t);
        assert!((half_square.complementary_eval(1.0).value - 0.5).abs() < 1e-9);
        let cube = YoungFunction::custom("t^3/3", |t| t * t);
        assert!((cube.complementary_eval(1.0).value - 2.0 / 3.0).abs() < 1e-9);
        for f in families() {
            assert_eq!(f.complementary_eval(0.0).value, 0.0);
        }
    }

    #[test]
    fn complementary_routes_agree() {
        for f in families() {
            for &t in &[0.1, 1.0, 4.0] {
                let a = f.complementary_eval(t).value;
                let b = f.complementary_sup(t).value;
                assert!((a - b).abs() <= 1e-8 * a.max(b), "{f:?} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn inverse_density_inverts() {
        for f in families() {
            for &t in &[0.2, 0.9, 2.0] {
                let s = f.density(t);
                let back = f.inverse_density(s).value;
                assert!((back - t).abs() < 1e-9 * t, "{f:?}");
            }
        }
    }

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(YoungFunction::power(1.0).is_err());
        assert!(YoungFunction::sum_of_powers(3.0, 2.0).is_err());
        assert!(YoungFunction::power_log(1.0, 0.0, 1.0).is_err());
        assert!(YoungFunction::exp_minus_poly(1).is_err());
        assert!(YoungFunction::exp_neg_inv_power(0.0).is_err());
    }
}
