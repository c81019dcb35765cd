use thiserror::Error;

pub type Result<T> = std::result::Result<T, QflowError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QflowError {
    #[error("wavefunction node at {x:?}: rho = {rho:e}")]
    Node { x: [f64; 3], rho: f64 },
    #[error("evaluation at a Coulomb centre is singular")]
    CoulombSingularity,
    #[error("degenerate grid: {skipped} of {total} nodes skipped")]
    DegenerateGrid { skipped: usize, total: usize },
    #[error("finite-difference stencil touches a node near {x:?}")]
    Stencil { x: [f64; 3] },
    #[error("no sign change on [{a}, {b}]")]
    NoBracket { a: f64, b: f64 },
    #[error("direction undefined at {x:?}")]
    DirectionUndefined { x: [f64; 3] },
    #[error("trajectory left the domain of radius {radius} at t = {t}")]
    Escaped { t: f64, radius: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("Coulomb field circulation {circulation:e} exceeds {tolerance:e}")]
    NonConservative { circulation: f64, tolerance: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
}
