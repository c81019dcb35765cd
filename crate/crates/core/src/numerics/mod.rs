//! Grids, quadrature, finite differences, root finding, an RK4 stepper,
//! Taylor jets and residual reports.

pub mod fd;
pub mod grid;
pub mod jet;
pub mod ode;
pub mod quadrature;
pub mod report;
pub mod roots;
pub mod scalar;
pub mod tolerances;

pub use fd::{fd_divergence, fd_gradient, fd_laplacian, Order};
pub use grid::{integrate_scalar, Grid, GridKind, GridSpec, Integral};
pub use jet::{Jet, Jet1, Jet2, Jet3, Jet4};
pub use ode::rk4_step;
pub use report::{ResidualReport, Sample};
pub use roots::{find_root, scan_bracket};
pub use scalar::{Cx, Scalar, V3};
pub use tolerances::Tolerances;
