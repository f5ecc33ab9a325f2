//! Young-function properties shared by the proptest suites and the
//! acceptance run.

use orlicz_eigen::young::{matuszewska, Bound, GridSpec, TauGrid};
use orlicz_eigen::{delta2_report, luxemburg_norm, modular, Endpoint, YoungFunction};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseResult, TestRng, TestRunner};

pub const CASES: u32 = 1000;

pub fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

/// Young functions doubling at both ends.
pub fn doubling() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        (1.2f64..6.0).prop_map(|p| YoungFunction::power(p).unwrap()),
        (1.2f64..4.0, 0.0f64..3.0).prop_map(|(p, d)| YoungFunction::sum_of_powers(p, p + d).unwrap()),
        (1.2f64..4.0, 0.0f64..2.0, 0.5f64..2.0).prop_map(|(p, k, r)| YoungFunction::power_log(p, k, r).unwrap()),
    ]
}

pub fn any_young() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        3 => doubling(),
        1 => (2u32..5).prop_map(|n| YoungFunction::exp_minus_poly(n).unwrap()),
        1 => (0.5f64..3.0).prop_map(|k| YoungFunction::exp_neg_inv_power(k).unwrap()),
        1 => Just(YoungFunction::double_exp()),
    ]
}

pub fn endpoint() -> impl Strategy<Value = Endpoint> {
    any::<bool>().prop_map(|z| if z { Endpoint::Zero } else { Endpoint::Infinity })
}

fn p_index(f: &YoungFunction, e: Endpoint) -> Result<f64, TestCaseError> {
    match delta2_report(f, e, &GridSpec::default_for(f)).unwrap().p_index {
        Bound::Finite(p) => Ok(p),
        Bound::Divergent => Err(TestCaseError::fail(format!("{f:?} is not doubling at {e:?}"))),
    }
}

/// `τt ≤ Ā(τ) + A(t)`.
pub fn young_inequality(f: &YoungFunction, tau: f64, t: f64) -> TestCaseResult {
    let bar = f.complementary_eval(tau).value;
    let a = f.eval(t);
    prop_assert!(tau * t <= bar + a + 1e-8 * (1.0 + bar + a), "{f:?} τ={tau} t={t}: {} > {bar} + {a}", tau * t);
    Ok(())
}

/// Equality at `τ = a(t)`.
pub fn young_inequality_is_sharp(f: &YoungFunction, t: f64) -> TestCaseResult {
    let s = f.density(t);
    let gap = t * s - f.eval(t) - f.complementary_eval(s).value;
    prop_assert!(gap.abs() <= 1e-8 * t * s, "{f:?} t={t}: gap {gap}");
    Ok(())
}

pub fn complementary_is_an_involution(f: &YoungFunction, t: f64) -> TestCaseResult {
    let back = f.complementary().complementary_sup(t).value;
    let a = f.eval(t);
    prop_assert!((back - a).abs() <= 1e-6 * a, "{f:?} t={t}: {back} vs {a}");
    Ok(())
}

pub fn luxemburg_norm_is_bounded_by_modular(f: &YoungFunction, scale: f64, raw: &[f64]) -> TestCaseResult {
    let u: Vec<f64> = raw.iter().map(|x| scale * x).collect();
    let w = vec![1.0 / u.len() as f64; u.len()];
    let norm = luxemburg_norm(f, &w, &u).unwrap();
    let m = modular(f, &w, &u).unwrap();
    prop_assert!(norm <= m.max(1.0), "{f:?}: norm {norm}, modular {m}");
    Ok(())
}

/// `A(τt) ≤ τA(t)` for `τ < 1` and the reverse for `τ > 1`.
pub fn convexity_scaling(f: &YoungFunction, t: f64, tau: f64) -> TestCaseResult {
    let at = f.eval_checked(t);
    let ats = f.eval_checked(tau * t);
    if at.overflow || ats.overflow || at.value <= 0.0 {
        return Ok(());
    }
    let tol = 1e-12 * ats.value.max(tau * at.value);
    if tau < 1.0 {
        prop_assert!(ats.value <= tau * at.value + tol, "{f:?} τ={tau} t={t}");
    } else {
        prop_assert!(ats.value >= tau * at.value - tol, "{f:?} τ={tau} t={t}");
    }
    Ok(())
}

/// `1 ≤ ta(t)/A(t) ≤ p`.
pub fn growth_ratio_is_bracketed(f: &YoungFunction, t: f64) -> TestCaseResult {
    let p = p_index(f, Endpoint::Zero)?.max(p_index(f, Endpoint::Infinity)?);
    let a = f.eval(t);
    let at = f.density(t) * t;
    prop_assert!(a <= at * (1.0 + 1e-12), "{f:?} t={t}");
    prop_assert!(at <= p * a * (1.0 + 1e-9), "{f:?} t={t}: ta(t)/A(t) = {} > {p}", at / a);
    Ok(())
}

/// `τ^p A(t) ≤ A(τt) ≤ τA(t)` for `τ < 1`, `t ≤ 1`.
pub fn scaling_below_the_zero_threshold(f: &YoungFunction, t: f64, tau: f64) -> TestCaseResult {
    let p = p_index(f, Endpoint::Zero)?;
    let (a, ats) = (f.eval(t), f.eval(tau * t));
    prop_assert!(tau.powf(p) * a <= ats * (1.0 + 1e-9), "{f:?} τ={tau} t={t}");
    prop_assert!(ats <= tau * a * (1.0 + 1e-12), "{f:?} τ={tau} t={t}");
    Ok(())
}

/// `τA(t) ≤ A(τt) ≤ τ^p A(t)` for `τ > 1`, `t ≥ 1`.
pub fn scaling_above_the_infinity_threshold(f: &YoungFunction, t: f64, tau: f64) -> TestCaseResult {
    let p = p_index(f, Endpoint::Infinity)?;
    let (a, ats) = (f.eval(t), f.eval(tau * t));
    prop_assert!(tau * a <= ats * (1.0 + 1e-12), "{f:?} τ={tau} t={t}");
    prop_assert!(ats <= tau.powf(p) * a * (1.0 + 1e-9), "{f:?} τ={tau} t={t}");
    Ok(())
}

pub fn doubling_is_bounded_by_two_to_the_p(f: &YoungFunction, t: f64) -> TestCaseResult {
    let p = p_index(f, Endpoint::Zero)?.max(p_index(f, Endpoint::Infinity)?);
    prop_assert!(f.eval(2.0 * t) <= 2f64.powf(p) * f.eval(t) * (1.0 + 1e-9), "{f:?} t={t}");
    Ok(())
}

pub fn matuszewska_is_submultiplicative(f: &YoungFunction, e: Endpoint, i: i32, j: i32) -> TestCaseResult {
    let grid = TauGrid::default_for(f, e);
    let m = |t: f64| matuszewska(f, e, t, &grid).unwrap().value;
    let (tau, t) = (2f64.powi(i), 2f64.powi(j));
    prop_assert!(m(tau * t) <= m(tau) * m(t) * (1.0 + 1e-2), "{f:?} at {e:?}: τ={tau} t={t}");
    Ok(())
}

fn run<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> TestCaseResult) -> Result<(), String> {
    let config = Config { cases: CASES, failure_persistence: None, ..Config::default() };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng).run(&strategy, test).map_err(|e| e.to_string())
}

/// Every property above over `CASES` deterministic random cases, one
/// thread per property.
pub fn run_all() -> Vec<(&'static str, Result<(), String>)> {
    type Job = (&'static str, fn() -> Result<(), String>);
    let jobs: [Job; 10] = [
        ("young inequality", || {
            run((any_young(), log_uniform(1e-3, 1e3), log_uniform(1e-3, 1e3)), |(f, tau, t)| {
                young_inequality(&f, tau, t)
            })
        }),
        ("young inequality is sharp", || {
            run((doubling(), log_uniform(1e-2, 1e2)), |(f, t)| young_inequality_is_sharp(&f, t))
        }),
        ("complementary involution", || {
            run((doubling(), log_uniform(5e-2, 5.0)), |(f, t)| complementary_is_an_involution(&f, t))
        }),
        ("luxemburg norm vs modular", || {
            run((any_young(), log_uniform(1e-2, 1e2), prop::collection::vec(-1.0f64..1.0, 1..40)), |(f, scale, raw)| {
                luxemburg_norm_is_bounded_by_modular(&f, scale, &raw)
            })
        }),
        ("convexity scaling", || {
            run((any_young(), log_uniform(1e-3, 1e2), log_uniform(1e-3, 1e3)), |(f, t, tau)| {
                convexity_scaling(&f, t, tau)
            })
        }),
        ("growth ratio bracket", || {
            run((doubling(), log_uniform(1e-3, 1e3)), |(f, t)| growth_ratio_is_bracketed(&f, t))
        }),
        ("scaling below 1", || {
            run((doubling(), log_uniform(1e-3, 1.0), 1e-3f64..1.0), |(f, t, tau)| {
                scaling_below_the_zero_threshold(&f, t, tau)
            })
        }),
        ("scaling above 1", || {
            run((doubling(), log_uniform(1.0, 1e3), 1.0f64..1e3), |(f, t, tau)| {
                scaling_above_the_infinity_threshold(&f, t, tau)
            })
        }),
        ("doubling constant", || {
            run((doubling(), log_uniform(1e-3, 1e3)), |(f, t)| doubling_is_bounded_by_two_to_the_p(&f, t))
        }),
        ("matuszewska submultiplicative", || {
            run((doubling(), endpoint(), -3i32..=3, -3i32..=3), |(f, e, i, j)| {
                matuszewska_is_submultiplicative(&f, e, i, j)
            })
        }),
    ];
    std::thread::scope(|s| {
        let handles: Vec<_> = jobs.iter().map(|&(name, job)| (name, s.spawn(job))).collect();
        handles.into_iter().map(|(name, h)| (name, h.join().unwrap_or_else(|_| Err("panicked".into())))).collect()
    })
}
