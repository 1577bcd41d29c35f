//! Continuous-time kernel regression along trajectories of dynamical systems.
//!
//! An unknown output `y(t) = G(φ(t))` is observed along a trajectory `φ` and
//! estimated in the native space of a kernel by minimizing
//!
//! ```text
//! E(t, g) = ½ ∫₀ᵗ |y(τ) − g(φ(τ))|² dτ + ½ γ ‖g‖²
//! ```
//!
//! over the span of kernel sections centered at samples of the orbit.
//!
//! | module | contents |
//! |--------|----------|
//! | [`kernels`] | Matérn-3/2 and Gaussian kernels, Gram matrices |
//! | [`dynamics`] | Lorenz system, RK4, trajectories, Lyapunov diagnostics |
//! | [`centers`] | greedy separated center selection, power function |
//! | [`regression`] | quadrature fit, coefficient evolution fit, discrete ERM |
//! | [`operator`] | discretized time-integral operator, excitation constants, error bounds |
//! | [`io`] | CSV schemas |
//! | [`config`] / [`experiment`] | key=value configuration and experiment recipes |

pub mod centers;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod operator;
pub mod point;
pub mod regression;

pub use centers::CenterSet;
pub use dynamics::{Interp, LorenzParams, Observations, RhsMode, Trajectory};
pub use error::{Error, Result};
pub use kernels::{DistanceMode, KernelFamily, KernelSpec};
pub use point::Point;
pub use regression::{Estimate, QuadratureRule, RegressionProblem};
