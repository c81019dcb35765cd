//! Quantum-fluid correspondence fields of analytic quantum states.
//!
//! A wavefunction `Ψ = √ρ e^{iS/ħ}` is mapped onto two velocity fields
//! (`v = ∇S/m`, `u = −ζ∇ρ/ρ`), two pressures, two energies and the Bohm
//! quantum potential. The [`verifier`] turns the fluid equations these
//! fields obey into residual reports over grids of sample points.
//!
//! Atomic units are fixed: `ħ = m = e = 4πε₀ = 1`.

pub mod analytic_states;
pub mod crossflow;
pub mod error;
pub mod field_engine;
pub mod manybody;
pub mod numerics;
pub mod trajectories;
pub mod units;
pub mod verifier;

pub use analytic_states::{eigen_energy, eval_psi, polar_jet, PolarJet, QuantumState, StateSpec};
pub use error::{QflowError, Result};
pub use field_engine::{FieldBundle, FieldPoint};
pub use numerics::{Grid, ResidualReport, Tolerances};
