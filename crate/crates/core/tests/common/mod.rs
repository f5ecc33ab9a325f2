//! Reference computations that share no code with the library, and the
//! Young-function properties checked against it.
#![allow(dead_code)]

pub mod young;

/// Lumped nodal weights of the interior nodes of a uniform 1D mesh: `h`, with
/// `1.5h` on the two nodes next to the boundary.
pub fn lumped_weights(length: f64, cells: usize) -> Vec<f64> {
    let h = length / cells as f64;
    let n = cells - 1;
    let mut w = vec![h; n];
    w[0] = 1.5 * h;
    w[n - 1] = 1.5 * h;
    w
}

/// Solves `tridiag(-1, 2, -1) x = b` (Thomas algorithm).
fn solve_laplacian(b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut den = 2.0;
    c[0] = -1.0 / den;
    d[0] = b[0] / den;
    for i in 1..n {
        den = 2.0 + c[i - 1];
        c[i] = -1.0 / den;
        d[i] = (b[i] + d[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Smallest `μ` with `(1/h) tridiag(-1, 2, -1) u = μ W u` by inverse
/// iteration, and its eigenvector normalized to `Σ wᵢuᵢ² = 1`.
pub fn generalized_p2_eigenpair(length: f64, cells: usize) -> (f64, Vec<f64>) {
    let h = length / cells as f64;
    let w = lumped_weights(length, cells);
    let n = w.len();
    let mut u = vec![1.0; n];
    let mut mu = 0.0;
    // The eigenvalue ratio is about 1/4, so 300 sweeps reach roundoff in u,
    // not only in the Rayleigh quotient.
    for _ in 0..300 {
        let rhs: Vec<f64> = u.iter().zip(&w).map(|(x, wi)| h * wi * x).collect();
        let mut y = solve_laplacian(&rhs);
        let norm = y.iter().zip(&w).map(|(x, wi)| wi * x * x).sum::<f64>().sqrt();
        y.iter_mut().for_each(|x| *x /= norm);
        let ku: f64 = (0..=n)
            .map(|i| {
                let a = if i == 0 { 0.0 } else { y[i - 1] };
                let b = if i == n { 0.0 } else { y[i] };
                (b - a) * (b - a) / h
            })
            .sum();
        mu = ku;
        u = y;
    }
    (mu, u)
}

/// First zero after the origin of the solution of
/// `−(|u'|^{p−2}u')' = μ|u|^{p−2}u`, `u(0) = 0`, `u'(0) = 1`, by RK4 in the
/// flux variable `v = |u'|^{p−2}u'`.
fn first_zero(p: f64, mu: f64, step: f64) -> f64 {
    let rhs = |u: f64, v: f64| -> (f64, f64) {
        (v.signum() * v.abs().powf(1.0 / (p - 1.0)), -mu * u.signum() * u.abs().powf(p - 1.0))
    };
    let (mut x, mut u, mut v) = (0.0, 0.0, 1.0);
    loop {
        let k1 = rhs(u, v);
        let k2 = rhs(u + 0.5 * step * k1.0, v + 0.5 * step * k1.1);
        let k3 = rhs(u + 0.5 * step * k2.0, v + 0.5 * step * k2.1);
        let k4 = rhs(u + step * k3.0, v + step * k3.1);
        let un = u + step / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        let vn = v + step / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if x > 0.0 && un <= 0.0 {
            return x + step * u / (u - un);
        }
        x += step;
        u = un;
        v = vn;
    }
}

/// First eigenvalue of the `p`-Laplacian on `(0, 1)`, by shooting on `μ`
/// until the first zero lands at `x = 1`.
pub fn shooting_eigenvalue(p: f64) -> f64 {
    let (mut lo, mut hi) = (1.0f64, 1e4f64);
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        if first_zero(p, mid, 2e-5) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

/// `(p − 1)(2π / (p sin(π/p)))^p`, the same eigenvalue in closed form.
pub fn closed_form_eigenvalue(p: f64) -> f64 {
    use std::f64::consts::PI;
    (p - 1.0) * (2.0 * PI / (p * (PI / p).sin())).powf(p)
}

/// `2(1 − cos πh)/h²`, the first eigenvalue of the three-point Laplacian.
pub fn three_point_eigenvalue(cells: usize) -> f64 {
    let h = 1.0 / cells as f64;
    2.0 * (1.0 - (std::f64::consts::PI * h).cos()) / (h * h)
}
