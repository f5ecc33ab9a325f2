//! Energy `E(α)` and first eigenvalue `λ(α)` of the Orlicz a-Laplacian under
//! the modular constraint `∫ A(|u|) = α`, on structured Dirichlet meshes and
//! for the one-dimensional fractional energy.
//!
//! ```
//! use orlicz_eigen::{solve_e, Mesh, SolveOptions, YoungFunction};
//!
//! let mesh = Mesh::interval(1.0, 100)?;
//! let f = YoungFunction::power(2.0)?;
//! let r = solve_e(&f, &mesh, 1.0, &SolveOptions::default())?;
//! assert!((r.quotient() - std::f64::consts::PI.powi(2)).abs() < 1e-2);
//! # Ok::<(), orlicz_eigen::Error>(())
//! ```
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod linalg;
pub mod mesh;
pub mod nonlocal;
pub mod numeric;
pub mod solver;
pub mod sweep;
pub mod young;

pub use config::YoungSpec;
pub use error::{Error, Result};
pub use mesh::{bump_field, cell_gradient_magnitudes, Mesh, MeshSpec, ScalarField};
pub use nonlocal::{energy_s, solve_es, NonlocalMesh};
pub use solver::{
    energy, lagrange_quotient, phi_root, solve_e, weak_residual, EnergyModel, MinimizerResult, SolveOptions,
};
pub use sweep::{alpha_grid, run_sweep, SweepOptions, SweepRecord};
pub use young::{delta2_report, luxemburg_norm, matuszewska_exponent, modular, Endpoint, YoungFunction};

/// Library version, for build info.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/young.md")]
    struct Young;
    #[doc = include_str!("../../../book/src/solver.md")]
    struct Solver;
    #[doc = include_str!("../../../book/src/sweeps.md")]
    struct Sweeps;
    #[doc = include_str!("../../../book/src/nonlocal.md")]
    struct Nonlocal;
}
