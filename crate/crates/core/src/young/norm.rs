//! Modular and Luxemburg norm of a nodal field.

use super::YoungFunction;
use crate::error::{Error, Result};
use crate::numeric::{bisect_increasing, tree_sum};

/// Anything that integrates nodal values with fixed positive weights.
pub trait NodalQuadrature {
    fn node_weights(&self) -> &[f64];
}

impl NodalQuadrature for [f64] {
    fn node_weights(&self) -> &[f64] {
        self
    }
}

impl NodalQuadrature for Vec<f64> {
    fn node_weights(&self) -> &[f64] {
        self
    }
}

/// `A(|u_i|)` node by node; overflowed entries are `+∞`.
pub fn modular_values(f: &YoungFunction, u: &[f64]) -> Vec<f64> {
    u.iter()
        .map(|&v| {
            let c = f.eval_checked(v);
            if c.overflow {
                f64::INFINITY
            } else {
                c.value
            }
        })
        .collect()
}

/// `∫ A(|u|)` under the quadrature `q`. Returns `+∞` when any term overflows.
pub fn modular<Q: NodalQuadrature + ?Sized>(f: &YoungFunction, q: &Q, u: &[f64]) -> Result<f64> {
    let w = q.node_weights();
    if w.len() != u.len() {
        return Err(Error::DimensionMismatch { expected: w.len(), found: u.len() });
    }
    let terms: Vec<f64> = modular_values(f, u).iter().zip(w).map(|(a, w)| a * w).collect();
    Ok(tree_sum(&terms))
}

/// `‖u‖ = inf{λ > 0 : ∫ A(|u|/λ) ≤ 1}`, to relative accuracy `1e-12`.
pub fn luxemburg_norm<Q: NodalQuadrature + ?Sized>(f: &YoungFunction, q: &Q, u: &[f64]) -> Result<f64> {
    if modular(f, q, u)? == 0.0 {
        return Ok(0.0);
    }
    // modular(r u) is nondecreasing in r; the norm is 1 / r at the crossing.
    let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let r = bisect_increasing(|r| modular_scaled(f, q, u, r).unwrap_or(f64::NAN), 1.0, 1.0 / scale, 1e-13)
        .map_err(|(lo, hi)| Error::Range { lo, hi })?;
    Ok(1.0 / r.root)
}

fn modular_scaled<Q: NodalQuadrature + ?Sized>(f: &YoungFunction, q: &Q, u: &[f64], r: f64) -> Result<f64> {
    let scaled: Vec<f64> = u.iter().map(|v| r * v).collect();
    modular(f, q, &scaled)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_norm_is_lp_norm() {
        let f = YoungFunction::power(2.0).unwrap();
        let w = vec![0.25; 4];
        let u = [1.0, -2.0, 0.5, 3.0];
        let lp = (w.iter().zip(&u).map(|(w, u)| w * u * u).sum::<f64>()).sqrt();
        let n = luxemburg_norm(&f, &w, &u).unwrap();
        assert!((n - lp).abs() < 1e-11 * lp);
        assert_eq!(luxemburg_norm(&f, &w, &[0.0; 4]).unwrap(), 0.0);
    }

    #[test]
    fn unit_norm_means_unit_modular() {
        let f = YoungFunction::exp_minus_poly(2).unwrap();
        let w = vec![0.1; 10];
        let u: Vec<f64> = (0..10).map(|k| k as f64 * 3.0).collect();
        let n = luxemburg_norm(&f, &w, &u).unwrap();
        let v: Vec<f64> = u.iter().map(|x| x / n).collect();
        assert!((modular(&f, &w, &v).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn length_is_checked() {
        let f = YoungFunction::power(2.0).unwrap();
        let w = vec![1.0; 3];
        assert!(matches!(modular(&f, &w, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }
}
