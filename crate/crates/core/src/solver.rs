//! The constrained problem
//!
//! ```text
//! E(α) = inf { ∫ A(|∇u|) : ∫ A(|u|) = α },
//! ```
//!
//! its Lagrange multiplier `λ(α)`, and the normalization `r ↦ ∫ A(r|u|)`.
//!
//! Minimization is a projected descent: every trial point is pulled back onto
//! the constraint set by rescaling, so all iterates are feasible. Directions
//! are preconditioned by a curvature-weighted stiffness matrix; for `A = t²`
//! a unit step is exactly one step of inverse iteration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Factor, SymMatrix};
use crate::mesh::{Mesh, ScalarField};
use crate::numeric::{bisect_increasing, dot, tree_sum};
use crate::young::{modular, YoungFunction};

/// Floor for `|∇u|` in `a(g)/g`.
pub const GRADIENT_EPS: f64 = 1e-12;

const ARMIJO_C1: f64 = 1e-4;
const ARMIJO_SHRINK: f64 = 0.5;
const MIN_STEP: f64 = 1e-14;
/// Weights of the curvature matrix are floored at this fraction of the
/// largest one so that flat regions stay positive definite.
const CURVATURE_FLOOR: f64 = 1e-10;

/// A discretized energy `u ↦ E(u)` with nodal quadrature for the constraint.
pub trait EnergyModel: Sync {
    /// Number of unknowns.
    fn unknowns(&self) -> usize;
    /// Nodal quadrature weights of the zero-order term.
    fn quadrature(&self) -> &[f64];
    /// `E(u)`; `+∞` if a term overflows.
    fn energy_value(&self, f: &YoungFunction, u: &[f64]) -> f64;
    /// `∇E(u)`, with `a(g)/g` taken at `max(g, GRADIENT_EPS)`.
    fn energy_gradient(&self, f: &YoungFunction, u: &[f64]) -> Vec<f64>;
    /// The `a(t)·t` counterpart of the energy: `∫ a(|∇u|)|∇u|`.
    fn flux(&self, f: &YoungFunction, u: &[f64]) -> f64;
    /// A symmetric positive definite approximation of the Hessian of `E`
    /// at `u`.
    fn curvature_matrix(&self, f: &YoungFunction, u: &[f64]) -> SymMatrix;

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.unknowns() {
            return Err(Error::DimensionMismatch { expected: self.unknowns(), found: u.len() });
        }
        Ok(())
    }
}

/// `a(g)/g` at `max(g, ε)`.
#[inline]
pub(crate) fn secant(f: &YoungFunction, g: f64) -> f64 {
    let g = g.max(GRADIENT_EPS);
    f.density(g) / g
}

/// `max(a'(g), a(g)/g)` at `max(g, ε)`.
#[inline]
pub(crate) fn curvature(f: &YoungFunction, g: f64) -> f64 {
    let g = g.max(GRADIENT_EPS);
    f.density_slope(g).max(f.density(g) / g)
}

fn checked_a(f: &YoungFunction, t: f64) -> f64 {
    let c = f.eval_checked(t);
    if c.overflow {
        f64::INFINITY
    } else {
        c.value
    }
}

impl EnergyModel for Mesh {
    fn unknowns(&self) -> usize {
        self.len()
    }

    fn quadrature(&self) -> &[f64] {
        self.weights()
    }

    fn energy_value(&self, f: &YoungFunction, u: &[f64]) -> f64 {
        let terms: Vec<f64> = self.cells().iter().map(|c| c.volume * checked_a(f, c.gradient(u))).collect();
        tree_sum(&terms)
    }

    fn energy_gradient(&self, f: &YoungFunction, u: &[f64]) -> Vec<f64> {
        let mut grad = vec![0.0; self.len()];
        for c in self.cells() {
            let g = c.gradient(u);
            if g == 0.0 {
                continue;
            }
            let s = c.volume * secant(f, g);
            for d in c.diffs() {
                let v = s * d.coeff * d.eval(u);
                if let Some(j) = d.to {
                    grad[j] += v;
                }
                if let Some(i) = d.from {
                    grad[i] -= v;
                }
            }
        }
        grad
    }

    fn flux(&self, f: &YoungFunction, u: &[f64]) -> f64 {
        let terms: Vec<f64> = self
            .cells()
            .iter()
            .map(|c| {
                let g = c.gradient(u);
                c.volume * f.density(g) * g
            })
            .collect();
        tree_sum(&terms)
    }

    fn curvature_matrix(&self, f: &YoungFunction, u: &[f64]) -> SymMatrix {
        let weights: Vec<f64> = self.cells().iter().map(|c| c.volume * curvature(f, c.gradient(u))).collect();
        let floor = CURVATURE_FLOOR * weights.iter().fold(0.0f64, |m, &w| m.max(w));
        let mut p = SymMatrix::banded(self.len(), self.bandwidth());
        for (c, &w) in self.cells().iter().zip(&weights) {
            let w = w.max(floor);
            for d in c.diffs() {
                let k = w * d.coeff;
                match (d.from, d.to) {
                    (Some(i), Some(j)) => {
                        p.add(i, i, k);
                        p.add(j, j, k);
                        p.add(i, j, -k);
                    }
                    (Some(i), None) | (None, Some(i)) => p.add(i, i, k),
                    (None, None) => {}
                }
            }
        }
        p
    }
}

/// `∫ A(|∇u|)`.
pub fn energy<M: EnergyModel + ?Sized>(f: &YoungFunction, u: &[f64], m: &M) -> Result<f64> {
    m.check(u)?;
    Ok(m.energy_value(f, u))
}

/// The negative gradient of the discrete energy.
pub fn descent_direction<M: EnergyModel + ?Sized>(f: &YoungFunction, u: &[f64], m: &M) -> Result<ScalarField> {
    m.check(u)?;
    Ok(ScalarField::new(m.energy_gradient(f, u).into_iter().map(|g| -g).collect()))
}

/// Gradient of the constraint `∫ A(|u|)`: `w_i a(|u_i|) sgn u_i`.
pub fn modular_gradient<M: EnergyModel + ?Sized>(f: &YoungFunction, u: &[f64], m: &M) -> Vec<f64> {
    u.iter().zip(m.quadrature()).map(|(&v, &w)| if v == 0.0 { 0.0 } else { w * f.density(v) * v.signum() }).collect()
}

/// `λ = ∫ a(|∇u|)|∇u| / ∫ a(|u|)|u|`.
pub fn lagrange_quotient<M: EnergyModel + ?Sized>(f: &YoungFunction, u: &[f64], m: &M) -> Result<f64> {
    m.check(u)?;
    if u.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroField);
    }
    let terms: Vec<f64> = u.iter().zip(m.quadrature()).map(|(&v, &w)| w * f.density(v) * v.abs()).collect();
    let den = tree_sum(&terms);
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::DegenerateQuotient("∫ a(|u|)|u| is zero or not finite"));
    }
    Ok(m.flux(f, u) / den)
}

fn weighted_norm(v: &[f64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(x, w)| x * x / w).sum::<f64>().sqrt()
}

/// Defect of the weak Euler–Lagrange equation tested against every nodal
/// basis function, in the dual norm of the nodal quadrature, relative to the
/// same norm of the energy-gradient term.
pub fn weak_residual<M: EnergyModel + ?Sized>(f: &YoungFunction, u: &[f64], lambda: f64, m: &M) -> Result<f64> {
    m.check(u)?;
    let g = m.energy_gradient(f, u);
    let h = modular_gradient(f, u, m);
    Ok(residual_of(&g, &h, lambda, m.quadrature()))
}

fn residual_of(g: &[f64], h: &[f64], lambda: f64, w: &[f64]) -> f64 {
    let r: Vec<f64> = g.iter().zip(h).map(|(g, h)| g - lambda * h).collect();
    let (nr, ng) = (weighted_norm(&r, w), weighted_norm(g, w));
    if ng > 0.0 {
        nr / ng
    } else if nr == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Outcome of [`phi_root`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizationResult {
    pub r_alpha: f64,
    pub phi_value: f64,
    pub bisection_iterations: usize,
}

/// The `r > 0` with `∫ A(r|u|) = α`.
pub fn phi_root<M: EnergyModel + ?Sized>(
    f: &YoungFunction,
    u: &[f64],
    m: &M,
    alpha: f64,
) -> Result<NormalizationResult> {
    m.check(u)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument { name: "alpha", reason: format!("must be positive, got {alpha}") });
    }
    if u.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroField);
    }
    let w = m.quadrature();
    let phi = |r: f64| {
        let scaled: Vec<f64> = u.iter().map(|v| r * v).collect();
        modular(f, w, &scaled).unwrap_or(f64::NAN)
    };
    let b = bisect_increasing(phi, alpha, 1.0, 4.0 * f64::EPSILON).map_err(|(lo, hi)| Error::Range { lo, hi })?;
    let phi_value = phi(b.root);
    if !phi_value.is_finite() {
        return Err(Error::Range { lo: b.root, hi: b.root });
    }
    Ok(NormalizationResult { r_alpha: b.root, phi_value, bisection_iterations: b.iterations })
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOptions {
    /// Stop when the weak residual falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Number of starting fields.
    pub restarts: usize,
    pub seed: u64,
    /// Run the starts on the rayon pool.
    pub parallel: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-8, max_iter: 50_000, restarts: 5, seed: 0, parallel: true }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument { name: "tol", reason: "must be positive".into() });
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument { name: "max_iter", reason: "must be positive".into() });
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument { name: "restarts", reason: "must be positive".into() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizerResult {
    #[serde(skip)]
    pub u: ScalarField,
    /// The constraint value actually achieved by `u`.
    pub alpha: f64,
    pub energy: f64,
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub restarts_used: usize,
    /// Which start produced `u` (0 is the warm or `p = 2` start).
    pub start_index: usize,
    /// Largest energy increase accepted by the line search (roundoff slack).
    pub max_energy_increase: f64,
}

impl MinimizerResult {
    pub fn quotient(&self) -> f64 {
        self.energy / self.alpha
    }
}

/// First eigenpair of the `A = t²` problem by inverse iteration, normalized
/// to `∫ u² = 1` and positive.
pub fn p2_eigenpair<M: EnergyModel + ?Sized>(m: &M) -> Result<(Vec<f64>, f64)> {
    let q = YoungFunction::power(2.0)?;
    let n = m.unknowns();
    let w = m.quadrature();
    let ones = vec![1.0; n];
    let p = m.curvature_matrix(&q, &ones).factor()?;
    let mut v = ones;
    let mut mu = f64::INFINITY;
    for _ in 0..10_000 {
        let rhs: Vec<f64> = v.iter().zip(w).map(|(v, w)| 2.0 * w * v).collect();
        let mut y = p.solve(&rhs);
        let norm = y.iter().zip(w).map(|(y, w)| w * y * y).sum::<f64>().sqrt();
        y.iter_mut().for_each(|y| *y /= norm);
        let next = m.energy_value(&q, &y);
        let done = (next - mu).abs() <= 4.0 * f64::EPSILON * next;
        v = y;
        mu = next;
        if done {
            break;
        }
    }
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok((v, mu))
}

struct Run {
    u: Vec<f64>,
    energy: f64,
    lambda: f64,
    residual: f64,
    iterations: usize,
    converged: bool,
    max_increase: f64,
}

fn descend<M: EnergyModel + ?Sized>(
    f: &YoungFunction,
    m: &M,
    alpha: f64,
    u0: &[f64],
    opts: &SolveOptions,
) -> Result<Run> {
    let w = m.quadrature();
    let n0 = phi_root(f, u0, m, alpha)?;
    let mut u: Vec<f64> = u0.iter().map(|v| n0.r_alpha * v).collect();
    let mut e = m.energy_value(f, &u);
    let mut max_increase = 0.0f64;
    let mut it = 0;
    loop {
        let g = m.energy_gradient(f, &u);
        let h = modular_gradient(f, &u, m);
        let lambda = dot(&g, &u) / dot(&h, &u);
        let residual = residual_of(&g, &h, lambda, w);
        if residual < opts.tol || it >= opts.max_iter {
            return Ok(Run {
                u,
                energy: e,
                lambda,
                residual,
                iterations: it,
                converged: residual < opts.tol,
                max_increase,
            });
        }
        it += 1;
        let r: Vec<f64> = g.iter().zip(&h).map(|(g, h)| g - lambda * h).collect();
        let d: Vec<f64> = m.curvature_matrix(f, &u).factor()?.solve(&r).into_iter().map(|x| -x).collect();
        let slope = dot(&r, &d);
        let slack = 10.0 * f64::EPSILON * e.abs();
        let mut t = 1.0;
        let accepted = loop {
            if t < MIN_STEP || !(slope < 0.0) {
                break None;
            }
            let trial: Vec<f64> = u.iter().zip(&d).map(|(u, d)| u + t * d).collect();
            if let Ok(nr) = phi_root(f, &trial, m, alpha) {
                let cand: Vec<f64> = trial.iter().map(|v| nr.r_alpha * v).collect();
                let ec = m.energy_value(f, &cand);
                if ec.is_finite() && ec <= e + ARMIJO_C1 * t * slope + slack {
                    break Some((cand, ec));
                }
            }
            t *= ARMIJO_SHRINK;
        };
        match accepted {
            Some((cand, ec)) => {
                max_increase = max_increase.max(ec - e);
                u = cand;
                e = ec;
            }
            None => {
                return Ok(Run { u, energy: e, lambda, residual, iterations: it, converged: false, max_increase });
            }
        }
    }
}

/// Starting fields: the warm start (or the `p = 2` eigenvector), then
/// positive random fields smoothed by one `p = 2` solve.
fn starts<M: EnergyModel + ?Sized>(m: &M, opts: &SolveOptions, warm: Option<&[f64]>) -> Result<Vec<Vec<f64>>> {
    let first = match warm {
        Some(u) => u.to_vec(),
        None => p2_eigenpair(m)?.0,
    };
    let mut out = vec![first];
    if opts.restarts > 1 {
        let q = YoungFunction::power(2.0)?;
        let n = m.unknowns();
        let p: Factor = m.curvature_matrix(&q, &vec![1.0; n]).factor()?;
        for k in 1..opts.restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k as u64));
            let rhs: Vec<f64> = m.quadrature().iter().map(|w| w * (0.05 + rng.random::<f64>())).collect();
            out.push(p.solve(&rhs));
        }
    }
    Ok(out)
}

/// `E(α)` and `λ(α)` with the default starts.
pub fn solve_e<M: EnergyModel + ?Sized>(
    f: &YoungFunction,
    m: &M,
    alpha: f64,
    opts: &SolveOptions,
) -> Result<MinimizerResult> {
    solve_e_from(f, m, alpha, opts, None)
}

/// Like [`solve_e`], with `warm` replacing the `p = 2` start.
pub fn solve_e_from<M: EnergyModel + ?Sized>(
    f: &YoungFunction,
    m: &M,
    alpha: f64,
    opts: &SolveOptions,
    warm: Option<&[f64]>,
) -> Result<MinimizerResult> {
    opts.validate()?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument { name: "alpha", reason: format!("must be positive, got {alpha}") });
    }
    if let Some(u) = warm {
        m.check(u)?;
    }
    let starts = starts(m, opts, warm)?;
    let runs: Vec<Result<Run>> = if opts.parallel && starts.len() > 1 {
        starts.par_iter().map(|u0| descend(f, m, alpha, u0, opts)).collect()
    } else {
        starts.iter().map(|u0| descend(f, m, alpha, u0, opts)).collect()
    };
    let mut best: Option<(usize, Run)> = None;
    let mut first_err = None;
    for (k, run) in runs.into_iter().enumerate() {
        let run = match run {
            Ok(r) => r,
            Err(e) => {
                first_err.get_or_insert(e);
                continue;
            }
        };
        let better = match &best {
            None => true,
            Some((_, b)) => {
                if run.converged != b.converged {
                    run.converged
                } else if (run.energy - b.energy).abs() <= 1e-12 * b.energy.abs() {
                    run.residual < b.residual
                } else {
                    run.energy < b.energy
                }
            }
        };
        if better {
            best = Some((k, run));
        }
    }
    let Some((start_index, mut run)) = best else {
        return Err(first_err.expect("at least one start"));
    };
    if run.u.iter().sum::<f64>() < 0.0 {
        run.u.iter_mut().for_each(|v| *v = -*v);
    }
    let achieved = modular(f, m.quadrature(), &run.u)?;
    Ok(MinimizerResult {
        alpha: achieved,
        energy: m.energy_value(f, &run.u),
        lambda: lagrange_quotient(f, &run.u, m).unwrap_or(run.lambda),
        residual: run.residual,
        iterations: run.iterations,
        converged: run.converged,
        restarts_used: starts.len(),
        start_index,
        max_energy_increase: run.max_increase,
        u: ScalarField::new(run.u),
    })
}
