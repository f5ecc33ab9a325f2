//! The one-dimensional fractional energy
//!
//! ```text
//! E^s(u) = ∫∫ A(|u(x) − u(y)| / |x − y|^s) dx dy / |x − y|
//! ```
//!
//! for `u` supported in `Ω = (0, L)`, discretized by a midpoint double sum
//! over the nodes of `Ω` and of a halo of width `R_cut` on each side where
//! `u = 0`. Beyond the halo the integrand only involves `u(x)`, and the
//! remaining `y`-integral is done exactly:
//!
//! ```text
//! ∫_D^∞ A(c r^{-s}) dr / r = (1/s) Φ(c D^{-s}),   Φ(c) = ∫_0^c A(v) dv / v.
//! ```

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::mesh::ScalarField;
use crate::numeric::{adaptive_simpson, tree_sum};
use crate::solver::{self, curvature, secant, EnergyModel, MinimizerResult, SolveOptions, GRADIENT_EPS};
use crate::young::{Family, NodalQuadrature, YoungFunction, QUADRATURE_RTOL};

/// Interior nodes `x_i = i h`, `i = 1..=N`, `h = L/(N+1)`, plus halo nodes at
/// spacing `h` out to `R_cut` past each end.
#[derive(Debug, Clone)]
pub struct NonlocalMesh {
    length: f64,
    n: usize,
    s: f64,
    r_cut: f64,
    h: f64,
    halo: usize,
    tail: bool,
    weights: Vec<f64>,
    /// `2 h² / (m h)` for node separation `m h`, indexed by `m`.
    pair_weight: Vec<f64>,
    /// `(m h)^{-s}`.
    inv_dist_s: Vec<f64>,
}

impl NonlocalMesh {
    /// `R_cut` defaults to `4 L`, with the analytic exterior tail included.
    pub fn new(length: f64, n: usize, s: f64) -> Result<Self> {
        Self::with_options(length, n, s, 4.0 * length, true)
    }

    pub fn with_options(length: f64, n: usize, s: f64, r_cut: f64, tail: bool) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidMesh(format!("interval length must be positive, got {length}")));
        }
        if n < 2 {
            return Err(Error::InvalidMesh(format!("need at least 2 interior nodes, got {n}")));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidArgument { name: "s", reason: format!("must lie in (0, 1), got {s}") });
        }
        if !(r_cut >= 0.0 && r_cut.is_finite()) {
            return Err(Error::InvalidArgument { name: "r_cut", reason: format!("must be nonnegative, got {r_cut}") });
        }
        let h = length / (n + 1) as f64;
        let halo = (r_cut / h).floor() as usize;
        let mut weights = vec![h; n];
        // the half cells at x = 0 and x = L go to their neighbors
        weights[0] += 0.5 * h;
        weights[n - 1] += 0.5 * h;
        let span = n + halo + 1;
        let pair_weight = (0..=span).map(|m| if m == 0 { 0.0 } else { 2.0 * h / m as f64 }).collect();
        let inv_dist_s = (0..=span).map(|m| if m == 0 { 0.0 } else { (m as f64 * h).powf(-s) }).collect();
        Ok(NonlocalMesh { length, n, s, r_cut, h, halo, tail, weights, pair_weight, inv_dist_s })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn r_cut(&self) -> f64 {
        self.r_cut
    }

    /// Halo nodes on each side, the boundary node included.
    pub fn halo_nodes(&self) -> usize {
        self.halo + 1
    }

    pub fn has_tail(&self) -> bool {
        self.tail
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (1..=self.n).map(|i| i as f64 * self.h).collect()
    }

    /// `w_ij = h² / |x_i − x_j|` for node indices on the full line
    /// (`0` and `N+1` are the ends of Ω; negative and larger indices are
    /// halo nodes).
    pub fn pair_weight(&self, i: i64, j: i64) -> Option<f64> {
        (i != j).then(|| self.h * self.h / ((i - j).unsigned_abs() as f64 * self.h))
    }

    pub fn field_from_fn<F: Fn(f64) -> f64>(&self, f: F) -> ScalarField {
        ScalarField::new(self.coordinates().into_iter().map(f).collect())
    }

    /// Distances from node `i` (0-based interior index) to the start of the
    /// exterior region on the left and on the right.
    fn tail_distances(&self, i: usize) -> [f64; 2] {
        let left = (i + 1 + self.halo) as f64 * self.h + 0.5 * self.h;
        let right = (self.n - i + self.halo) as f64 * self.h + 0.5 * self.h;
        [left, right]
    }

    /// Halo separations `m` seen from node `i`, both sides.
    fn halo_separations(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let left = (i + 1)..=(i + 1 + self.halo);
        let right = (self.n - i)..=(self.n - i + self.halo);
        left.chain(right)
    }

    pub fn write_csv<W: std::io::Write>(&self, u: &[f64], mut out: W) -> Result<()> {
        self.check(u)?;
        writeln!(out, "x,u")?;
        writeln!(out, "0,0")?;
        for (x, v) in self.coordinates().iter().zip(u) {
            writeln!(out, "{x},{v}")?;
        }
        writeln!(out, "{},0", self.length)?;
        Ok(())
    }
}

impl NodalQuadrature for NonlocalMesh {
    fn node_weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `Φ(c) = ∫_0^c A(v)/v dv`.
pub fn phi_integral(f: &YoungFunction, c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    match f.family() {
        Family::Power { p } => c.powf(*p) / p,
        Family::SumOfPowers { p, q } => c.powf(*p) / (p * p) + c.powf(*q) / (q * q),
        _ => adaptive_simpson(&|v: f64| if v > 0.0 { f.eval(v) / v } else { 0.0 }, 0.0, c, QUADRATURE_RTOL),
    }
}

impl NonlocalMesh {
    fn row_energy(&self, f: &YoungFunction, u: &[f64], i: usize) -> f64 {
        let ui = u[i];
        let mut e = 0.0;
        for j in i + 1..self.n {
            let m = j - i;
            e += self.pair_weight[m] * f.eval((ui - u[j]).abs() * self.inv_dist_s[m]);
        }
        if ui != 0.0 {
            for m in self.halo_separations(i) {
                e += self.pair_weight[m] * f.eval(ui.abs() * self.inv_dist_s[m]);
            }
            if self.tail {
                for d in self.tail_distances(i) {
                    e += 2.0 * self.h / self.s * phi_integral(f, ui.abs() * d.powf(-self.s));
                }
            }
        }
        e
    }

    fn row_gradient(&self, f: &YoungFunction, u: &[f64], i: usize) -> f64 {
        let ui = u[i];
        let mut g = 0.0;
        for (j, &uj) in u.iter().enumerate() {
            if j == i {
                continue;
            }
            let m = i.abs_diff(j);
            let du = ui - uj;
            let t = du.abs() * self.inv_dist_s[m];
            if t > 0.0 {
                g += self.pair_weight[m] * secant(f, t) * du * self.inv_dist_s[m].powi(2);
            }
        }
        if ui != 0.0 {
            for m in self.halo_separations(i) {
                let t = ui.abs() * self.inv_dist_s[m];
                g += self.pair_weight[m] * secant(f, t) * ui * self.inv_dist_s[m].powi(2);
            }
            if self.tail {
                for d in self.tail_distances(i) {
                    let c = ui.abs() * d.powf(-self.s);
                    g += 2.0 * self.h / self.s * f.eval(c) / ui;
                }
            }
        }
        g
    }

    fn row_flux(&self, f: &YoungFunction, u: &[f64], i: usize) -> f64 {
        let ui = u[i];
        let mut e = 0.0;
        for j in i + 1..self.n {
            let m = j - i;
            let t = (ui - u[j]).abs() * self.inv_dist_s[m];
            e += self.pair_weight[m] * f.density(t) * t;
        }
        if ui != 0.0 {
            for m in self.halo_separations(i) {
                let t = ui.abs() * self.inv_dist_s[m];
                e += self.pair_weight[m] * f.density(t) * t;
            }
            if self.tail {
                for d in self.tail_distances(i) {
                    e += 2.0 * self.h / self.s * f.eval(ui.abs() * d.powf(-self.s));
                }
            }
        }
        e
    }
}

impl EnergyModel for NonlocalMesh {
    fn unknowns(&self) -> usize {
        self.n
    }

    fn quadrature(&self) -> &[f64] {
        &self.weights
    }

    fn energy_value(&self, f: &YoungFunction, u: &[f64]) -> f64 {
        let rows: Vec<f64> = (0..self.n).into_par_iter().map(|i| self.row_energy(f, u, i)).collect();
        tree_sum(&rows)
    }

    fn energy_gradient(&self, f: &YoungFunction, u: &[f64]) -> Vec<f64> {
        (0..self.n).into_par_iter().map(|i| self.row_gradient(f, u, i)).collect()
    }

    fn flux(&self, f: &YoungFunction, u: &[f64]) -> f64 {
        let rows: Vec<f64> = (0..self.n).into_par_iter().map(|i| self.row_flux(f, u, i)).collect();
        tree_sum(&rows)
    }

    fn curvature_matrix(&self, f: &YoungFunction, u: &[f64]) -> SymMatrix {
        let n = self.n;
        let geom = |m: usize| self.pair_weight[m] * self.inv_dist_s[m].powi(2);
        // curvature of A at every pair, floored below relative to the largest
        let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
        let mut halo = Vec::with_capacity(n * 2 * (self.halo + 1));
        let mut cmax = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                let c = curvature(f, (u[i] - u[j]).abs() * self.inv_dist_s[j - i]);
                cmax = cmax.max(c);
                pairs.push((i, j, c));
            }
            for m in self.halo_separations(i) {
                let c = curvature(f, u[i].abs() * self.inv_dist_s[m]);
                cmax = cmax.max(c);
                halo.push((i, m, c));
            }
        }
        let floor = 1e-10 * cmax;
        let mut p = SymMatrix::dense(n);
        for (i, j, c) in pairs {
            let k = c.max(floor) * geom(j - i);
            p.add(i, i, k);
            p.add(j, j, k);
            p.add(i, j, -k);
        }
        for (i, m, c) in halo {
            p.add(i, i, c.max(floor) * geom(m));
        }
        if self.tail {
            for (i, &v) in u.iter().enumerate() {
                for d in self.tail_distances(i) {
                    let ds = d.powf(-self.s);
                    let ui = v.abs().max(GRADIENT_EPS / ds);
                    let c = ui * ds;
                    let (a, big_a) = (f.density(c), f.eval(c));
                    p.add(i, i, 2.0 * self.h / self.s * (a * c - big_a).max(big_a) / (ui * ui));
                }
            }
        }
        p
    }
}

/// `E^s(u)`.
pub fn energy_s(f: &YoungFunction, u: &[f64], nm: &NonlocalMesh) -> Result<f64> {
    solver::energy(f, u, nm)
}

/// `λ^s = Σ a(|D^s u|)|D^s u| w / ∫ a(|u|)|u|`.
pub fn lagrange_quotient_s(f: &YoungFunction, u: &[f64], nm: &NonlocalMesh) -> Result<f64> {
    solver::lagrange_quotient(f, u, nm)
}

/// `E^s(α)` and `λ^s(α)`.
pub fn solve_es(f: &YoungFunction, nm: &NonlocalMesh, alpha: f64, opts: &SolveOptions) -> Result<MinimizerResult> {
    solver::solve_e(f, nm, alpha, opts)
}

/// How much of the energy lives beyond the halo.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailReport {
    /// The exterior contribution included in `E^s` (0 when disabled).
    pub included: f64,
    /// `Σ_i 2h/s · A(|u_i| D^{-s})` over both sides: an upper bound for the
    /// exterior contribution, from `A(τt) ≤ τA(t)` for `τ ≤ 1`.
    pub bound: f64,
    /// `bound / E^s(u)`.
    pub relative_bound: f64,
}

pub fn tail_report(f: &YoungFunction, u: &[f64], nm: &NonlocalMesh) -> Result<TailReport> {
    nm.check(u)?;
    let mut included = 0.0;
    let mut bound = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        for d in nm.tail_distances(i) {
            let c = ui.abs() * d.powf(-nm.s);
            bound += 2.0 * nm.h / nm.s * f.eval(c);
            if nm.tail {
                included += 2.0 * nm.h / nm.s * phi_integral(f, c);
            }
        }
    }
    let e = nm.energy_value(f, u);
    Ok(TailReport { included, bound, relative_bound: if e > 0.0 { bound / e } else { 0.0 } })
}
