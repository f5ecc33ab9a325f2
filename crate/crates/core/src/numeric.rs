//! Small scalar routines shared across the crate: adaptive quadrature,
//! bracketed bisection, golden-section search and a deterministic pairwise
//! summation.

/// Adaptive Simpson quadrature of `f` over `[a, b]` to relative tolerance
/// `rel_tol` (with a tiny absolute floor so that integrals of zero terminate).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    // A coarse composite pass sets the absolute target.
    const PANELS: usize = 16;
    let h = (b - a) / PANELS as f64;
    let mut panels = Vec::with_capacity(PANELS);
    let mut coarse = 0.0;
    for k in 0..PANELS {
        let x0 = a + k as f64 * h;
        let x1 = if k + 1 == PANELS { b } else { x0 + h };
        let xm = 0.5 * (x0 + x1);
        let (f0, fm, f1) = (f(x0), f(xm), f(x1));
        let s = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        coarse += s;
        panels.push((x0, x1, f0, fm, f1, s));
    }
    let eps = (rel_tol * coarse.abs()).max(1e-300) / PANELS as f64;
    panels.into_iter().map(|(x0, x1, f0, fm, f1, s)| simpson_rec(f, x0, x1, f0, fm, f1, s, eps, 48)).sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps || (m - a) <= f64::EPSILON * m.abs() {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}

/// Outcome of [`bisect_increasing`].
#[derive(Debug, Clone, Copy)]
pub struct Bisection {
    pub root: f64,
    pub iterations: usize,
}

/// Finds `r > 0` with `g(r) = target` for a continuous nondecreasing `g`,
/// growing or shrinking the bracket geometrically from `start`, then
/// bisecting until the bracket is below `rel_tol` relative width.
///
/// Returns `Err((lo, hi))` with the last bracket when `g` overflows or the
/// bracket cannot be closed.
pub fn bisect_increasing<G: FnMut(f64) -> f64>(
    mut g: G,
    target: f64,
    start: f64,
    rel_tol: f64,
) -> Result<Bisection, (f64, f64)> {
    let mut lo = start;
    let mut hi = start;
    let mut iterations = 0;
    let v = g(start);
    if v.is_nan() {
        return Err((lo, hi));
    }
    if v < target {
        loop {
            lo = hi;
            hi *= 2.0;
            iterations += 1;
            let gv = g(hi);
            if gv.is_nan() || !hi.is_finite() || iterations > 2200 {
                return Err((lo, hi));
            }
            if gv >= target {
                break;
            }
        }
    } else if v > target {
        loop {
            hi = lo;
            lo *= 0.5;
            iterations += 1;
            if lo == 0.0 || iterations > 2200 {
                return Err((lo, hi));
            }
            if g(lo) <= target {
                break;
            }
        }
    } else {
        return Ok(Bisection { root: start, iterations: 0 });
    }
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let gv = g(mid);
        if gv.is_nan() {
            return Err((lo, hi));
        }
        if gv < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bisection { root: 0.5 * (lo + hi), iterations })
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
/// Returns `(argmax, max)`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if hi - lo <= tol * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    [(x1, f1), (x2, f2), (x, fx)].into_iter().fold((x, fx), |best, c| if c.1 > best.1 { c } else { best })
}

/// Pairwise (tree) summation. The reduction order depends only on the length
/// of the input, so results are reproducible however the terms were produced.
pub fn tree_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let (l, r) = values.split_at(n / 2);
            tree_sum(l) + tree_sum(r)
        }
    }
}

/// `ln(1 + e^x)` without overflow or underflow.
pub fn softplus(x: f64) -> f64 {
    if x > 35.0 {
        x + (-x).exp()
    } else if x < -35.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln(ln(1 + e^x))`, accurate when the inner logarithm underflows.
pub fn ln_softplus(x: f64) -> f64 {
    if x < -35.0 {
        // ln(1+e^x) = e^x (1 - e^x/2 + ...)
        x - 0.5 * x.exp()
    } else {
        softplus(x).ln()
    }
}

/// `e^x / (1 + e^x)`.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(e^a + e^b)`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln Γ(n+1)` for small integers.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
