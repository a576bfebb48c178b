//! Self-similar solutions of multi-phase Stefan problems.
//!
//! The free-boundary parameters of a self-similar solution are the critical
//! points of an explicit coercive potential: on the line the potential is
//! strictly convex, in the radial case with a point heat source it is not,
//! but in both cases the minimizer is the unique solution. This crate
//! evaluates those potentials with analytic derivatives, minimizes them with
//! a feasibility-preserving damped Newton method, rebuilds the temperature
//! profile and checks the result against independent oracles (quadrature,
//! scalar bisection, and an enthalpy finite-difference simulation).
//!
//! ```
//! use stefan_core::{minimize, PhaseConfig, RiemannProblem1D, SolverSettings};
//!
//! let cfg = PhaseConfig::new(vec![-1.0, 0.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0], vec![0.0]).unwrap();
//! let problem = RiemannProblem1D::new(cfg).unwrap();
//! let report = minimize(&problem, &SolverSettings::default()).unwrap();
//! assert!(report.minimizer[0].abs() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod optimizer;
pub mod oracle;
pub mod potential_1d;
pub mod potential_radial;
pub mod profile;
pub mod special_fn;
pub mod tridiag;

pub use error::{Error, Result};
pub use model::{
    build_enthalpy_pair, build_enthalpy_pair_radial, EnthalpyPair, PhaseConfig, Problem, ProblemFile, ProblemKind,
    RadialProblem, RiemannProblem1D,
};
pub use optimizer::{
    initial_guess, minimize, minimize_from, newton_step, Direction, GuessStrategy, Objective, RunTrace, SolveReport,
    SolverSettings, StepInfo, AGREEMENT_TOL, START_LEVEL_MARGIN,
};
pub use potential_1d::{coercivity_box_1d, energy_1d, grad_1d, hess_1d, CoercivityBox1D, FrontVector1D};
pub use potential_radial::{
    coercivity_box_radial, energy_radial, energy_radial_parts, grad_radial, hess_radial, lower_bound_f,
    min_lower_bound, CoercivityBoxRadial, EnergyParts, FrontVectorRadial,
};
pub use profile::{build_profile, build_profile_radial, Profile1D, ProfileRadial, SelfSimilarProfile};
pub use tridiag::SymTridiagonal;
