use std::fmt;
use std::sync::{Arc, RwLock};

use super::QUADRATURE_RTOL;
use crate::error::{Error, Result};
use crate::numeric::adaptive_simpson;

/// Lowest cached knot is `2^KNOT_MIN_EXP`.
const KNOT_MIN_EXP: i32 = -40;
/// Knots up to `2^PREWARM_EXP` are integrated at construction.
const PREWARM_EXP: i32 = 8;

/// A scalar density `t ↦ a(t)`.
#[derive(Clone)]
pub enum Density {
    Closure(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Piecewise-linear through `(t, a)` knots, extended linearly past the
    /// last knot with the slope of the final segment.
    Table(Vec<(f64, f64)>),
}

impl Density {
    pub fn closure<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Density::Closure(Arc::new(f))
    }

    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidYoung(format!("density table: {m}")));
        if knots.len() < 2 {
            return bad("needs at least two knots");
        }
        if knots[0] != (0.0, 0.0) {
            return bad("first knot must be (0, 0)");
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return bad("knot abscissae must be strictly increasing");
            }
            if w[1].1 < w[0].1 {
                return bad("density values must be nondecreasing");
            }
        }
        if knots.iter().any(|(t, a)| !t.is_finite() || !a.is_finite()) {
            return bad("knots must be finite");
        }
        let n = knots.len();
        if !(knots[n - 1].1 > knots[n - 2].1) {
            return bad("last segment must be increasing so that a(t) → ∞");
        }
        if !(knots[1].1 > 0.0) {
            return bad("density must be positive for t > 0");
        }
        Ok(Density::Table(knots))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Density::Closure(f) => f(t),
            Density::Table(k) => {
                let i = match k.binary_search_by(|(x, _)| x.total_cmp(&t)) {
                    Ok(i) => return k[i].1,
                    Err(i) => i.clamp(1, k.len() - 1),
                };
                let (t0, a0) = k[i - 1];
                let (t1, a1) = k[i];
                a0 + (a1 - a0) * (t - t0) / (t1 - t0)
            }
        }
    }
}

/// A user-supplied Young function: density plus cached cumulative integrals
/// on the geometric knots `2^j`.
pub struct Custom {
    name: String,
    density: Density,
    inverse: Option<Density>,
    cumulative: RwLock<Vec<f64>>,
}

impl fmt::Debug for Custom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Custom").field("name", &self.name).finish()
    }
}

fn knot(j: usize) -> f64 {
    2f64.powi(j as i32 + KNOT_MIN_EXP)
}

impl Custom {
    /// `inverse`, when given, must be the generalized inverse of `density`.
    pub fn new(name: impl Into<String>, density: Density, inverse: Option<Density>) -> Self {
        let c = Custom { name: name.into(), density, inverse, cumulative: RwLock::new(Vec::new()) };
        c.extend_to((PREWARM_EXP - KNOT_MIN_EXP) as usize);
        c
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn density(&self, t: f64) -> f64 {
        self.density.eval(t)
    }

    pub fn inverse(&self) -> Option<&Density> {
        self.inverse.as_ref()
    }

    /// The knots, when the density is tabulated.
    pub fn density_table(&self) -> Option<&[(f64, f64)]> {
        match &self.density {
            Density::Table(k) => Some(k),
            Density::Closure(_) => None,
        }
    }

    fn integrate(&self, a: f64, b: f64) -> f64 {
        adaptive_simpson(&|s| self.density.eval(s), a, b, QUADRATURE_RTOL * 1e-2)
    }

    fn extend_to(&self, j: usize) {
        if self.cumulative.read().expect("cache poisoned").len() > j {
            return;
        }
        let mut cache = self.cumulative.write().expect("cache poisoned");
        if cache.is_empty() {
            let first = self.integrate(0.0, knot(0));
            cache.push(first);
        }
        while cache.len() <= j {
            let i = cache.len();
            let next = cache[i - 1] + self.integrate(knot(i - 1), knot(i));
            cache.push(next);
        }
    }

    /// `A(t) = ∫₀ᵗ a`.
    pub fn primitive(&self, t: f64) -> f64 {
        if t <= knot(0) {
            return self.integrate(0.0, t);
        }
        let mut j = (t.log2().floor() as i32 - KNOT_MIN_EXP).max(0) as usize;
        while j > 0 && knot(j) > t {
            j -= 1;
        }
        if j >= (1023 - KNOT_MIN_EXP) as usize {
            return f64::INFINITY;
        }
        self.extend_to(j);
        let base = self.cumulative.read().expect("cache poisoned")[j];
        base + self.integrate(knot(j), t)
    }
}
