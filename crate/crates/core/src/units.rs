//! Atomic units. Every formula in the crate assumes these values.

pub const HBAR: f64 = 1.0;
pub const MASS: f64 = 1.0;
/// `ζ₀ = ħ/2`.
pub const ZETA0: f64 = HBAR / 2.0;
/// `ζ = ζ₀/m`.
pub const ZETA: f64 = ZETA0 / MASS;
