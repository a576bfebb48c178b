//! Independent checks of the potential-based solver.
//!
//! Nothing here calls the potentials or the optimizer: the quadrature
//! routines integrate the defining integrals of `F` and `G` directly, the
//! scalar solvers bisect the Stefan condition for a single front, and the
//! enthalpy simulation time-steps `β(u)_t = α(u)_xx` on a grid.

mod bisection;
mod enthalpy;
mod quadrature;

pub use bisection::{
    bisect_scalar, bisect_scalar_1d, bisect_scalar_radial, scalar_residual_1d, scalar_residual_radial,
};
pub use enthalpy::{simulate_enthalpy_1d, FdGrid1D, FrontTrace, CFL_SAFETY};
pub use quadrature::{adaptive_simpson, quad_f, quad_g};
