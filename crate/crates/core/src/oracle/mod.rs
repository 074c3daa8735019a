//! Independent numeric verification of the analytic layer: grid quadrature
//! of sampled wavefunctions, fixed-step integration of the second-moment
//! equations, Lorentz-force orbit integration, and free-Schroedinger
//! residual checks.
//!
//! Nothing in this module evaluates a closed-form moment expression from
//! the analytic modules; inputs are raw amplitude samples, raw ODE
//! right-hand sides, or classical initial conditions. That independence is
//! the point: a constant slipped in `packets` or `elements` shows up as a
//! mismatch here instead of cancelling.

pub mod grid;
pub mod ode;
pub mod residual;

pub use grid::{
    discretization_estimate_2d, grid_moments_1d, grid_moments_2d, Grid1d, Grid2d, GridMoments1d,
    GridMoments2d, Stencil,
};
pub use ode::{lorentz_orbit, rk4_moments, MomentSystem, OdeRun};
pub use residual::{residual_norm_1d, residual_norm_2d};
