//! Reduced one-body picture of determinantal many-body states.
//!
//! Every two-point quantity is assembled from orbital pair charges
//! `φₖ*φₗ`: the pair density `ρ₂`, the quantum charge `Q = ρ₂/ρ̂`, and the
//! Coulomb field and potential that `2Q(r₁, ·)` generates at `r₁`.
//! Orbitals are evaluated at `t = 0`; the phases of stationary orbitals
//! cancel in every pair product used here.

mod coulomb;
mod flows;
#[cfg(test)]
mod tests;

pub use coulomb::{Circulation, FieldRoute, BOUNDARY_RADIUS};
pub use flows::{
    energy_functional, energy_functional_with, orbital_residual, reduced_euler_residual, EnergyRecord,
    OrbitalEnergy, OrbitalRecord, ReducedEulerRecord, Spoiler,
};

use crate::analytic_states::{overlap_matrix, Determinant, QuantumState, NODE_EPS_ABS};
use crate::error::{QflowError, Result};
use crate::numerics::grid::integrate_scalar;
use crate::numerics::{Cx, Grid, Jet, Scalar};
use crate::units::{MASS, ZETA, ZETA0};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Normalization of the reduced density `ρ̂`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `∫ρ̂ = n`.
    #[default]
    N,
    /// `∫ρ̂ = 1`.
    Unity,
}

impl FromStr for Normalization {
    type Err = QflowError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(Normalization::N),
            "unity" | "1" => Ok(Normalization::Unity),
            _ => Err(QflowError::InvalidState(format!("normalization must be 'n' or 'unity', got '{s}'"))),
        }
    }
}

/// `ρ̂`, `û = −ζ∇ρ̂/ρ̂`, the density-weighted orbital velocity `v̂` and
/// `P̂ = −ζζ₀∇²ρ̂` at one point.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ReducedFields {
    pub rho_hat: f64,
    pub u_hat: [f64; 3],
    pub v_hat: [f64; 3],
    #[serde(rename = "P_hat")]
    pub p_hat: f64,
}

/// A determinant together with its pair-density normalization.
#[derive(Clone, Debug)]
pub struct ReducedState {
    label: String,
    det: Determinant,
    n: usize,
    mode: Normalization,
    /// `c` in `ρ₂ = c·ρ₂⁰`, fixed by `∫∫ρ₂ = n − 1`; zero for one electron.
    pair_norm: f64,
    /// `wₖₗ`, row-major: number of spin channels that hold both `k` and `l`.
    exchange: Vec<f64>,
    spherical: bool,
}

impl ReducedState {
    pub fn new(state: &QuantumState, mode: Normalization) -> Result<ReducedState> {
        let det = state
            .determinant()
            .ok_or_else(|| QflowError::Unsupported(format!("{} is not a determinant", state.label())))?
            .clone();
        let m = det.orbitals.len();
        let n = det.electrons();
        let mut exchange = vec![0.0; m * m];
        for k in 0..m {
            for l in 0..m {
                let both_down = det.occupancy[k] == 2 && det.occupancy[l] == 2;
                exchange[k * m + l] = 1.0 + f64::from(u8::from(both_down));
            }
        }
        let pair_norm = if n < 2 {
            0.0
        } else {
            // ∫∫ρ₂⁰ = (Σ occₖSₖₖ)² − Σ wₖₗ|Sₖₗ|² with overlaps by quadrature.
            let s = overlap_matrix(&det.orbitals, 0.0)?;
            let total: f64 = (0..m).map(|k| f64::from(det.occupancy[k]) * s[(k, k)].re).sum();
            let mut exch = 0.0;
            for k in 0..m {
                for l in 0..m {
                    exch += exchange[k * m + l] * s[(k, l)].norm_sqr();
                }
            }
            (n - 1) as f64 / (total * total - exch)
        };
        let spherical = det.orbitals.iter().all(|o| o.hydrogenic().is_some_and(|h| h.l == 0));
        Ok(ReducedState {
            label: state.label(),
            det,
            n,
            mode,
            pair_norm,
            exchange,
            spherical,
        })
    }

    pub fn with_mode(&self, mode: Normalization) -> ReducedState {
        ReducedState { mode, ..self.clone() }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn electrons(&self) -> usize {
        self.n
    }

    pub fn normalization(&self) -> Normalization {
        self.mode
    }

    pub fn determinant(&self) -> &Determinant {
        &self.det
    }

    pub fn pair_norm(&self) -> f64 {
        self.pair_norm
    }

    /// Every pair charge is spherical, so the shell theorem applies.
    pub fn is_spherical(&self) -> bool {
        self.spherical
    }

    /// `ρ̂ / ρ` with `ρ = Σ occₖ|φₖ|²`.
    fn mode_scale(&self) -> f64 {
        match self.mode {
            Normalization::N => 1.0,
            Normalization::Unity => 1.0 / self.n as f64,
        }
    }

    /// Pair repulsion strength: zero for noninteracting Hamiltonians.
    fn coupling(&self) -> f64 {
        if self.det.interacting && self.n >= 2 {
            1.0
        } else {
            0.0
        }
    }

    /// `f` with `∫2Q(r₁, r₂) dr₂ = f·(n − 1)` at every `r₁`.
    pub fn field_factor(&self) -> f64 {
        2.0 * self.pair_norm / self.mode_scale()
    }

    fn orbital_values(&self, x: [f64; 3]) -> Result<Vec<Complex64>> {
        self.det.orbitals.iter().map(|o| o.psi(x, 0.0).map(|c| c.to_c64())).collect()
    }

    fn density_of(&self, phi: &[Complex64]) -> f64 {
        phi.iter().zip(&self.det.occupancy).map(|(p, o)| f64::from(*o) * p.norm_sqr()).sum()
    }

    /// `ρ₂⁰(r₁, r₂) = ρ(r₁)ρ(r₂) − Σ wₖₗ φₖ(r₁)φₗ*(r₁)φₖ*(r₂)φₗ(r₂)`, normalized
    /// to `n(n − 1)`.
    fn raw_pair(&self, phi1: &[Complex64], phi2: &[Complex64]) -> f64 {
        let m = phi1.len();
        let mut exch = Complex64::new(0.0, 0.0);
        for k in 0..m {
            for l in 0..m {
                exch += self.exchange[k * m + l] * phi1[k] * phi1[l].conj() * phi2[k].conj() * phi2[l];
            }
        }
        self.density_of(phi1) * self.density_of(phi2) - exch.re
    }

    pub fn rho_hat(&self, x: [f64; 3]) -> Result<f64> {
        Ok(self.mode_scale() * self.density_of(&self.orbital_values(x)?))
    }

    /// Spin-summed 1-dentrix `Σ occₖ φₖ(r₁)φₖ*(r₂)`, normalized like `ρ̂`.
    pub fn one_dentrix(&self, r1: [f64; 3], r2: [f64; 3]) -> Result<Complex64> {
        let (a, b) = (self.orbital_values(r1)?, self.orbital_values(r2)?);
        let sum: Complex64 = a
            .iter()
            .zip(&b)
            .zip(&self.det.occupancy)
            .map(|((p, q), o)| f64::from(*o) * p * q.conj())
            .sum();
        Ok(sum * self.mode_scale())
    }

    /// Pair density normalized to `n − 1`.
    pub fn pair_density(&self, r1: [f64; 3], r2: [f64; 3]) -> Result<f64> {
        Ok(self.pair_norm * self.raw_pair(&self.orbital_values(r1)?, &self.orbital_values(r2)?))
    }

    /// Quantum charge `Q = ρ₂(r₁, r₂)/ρ̂(r₁)`.
    pub fn q_charge(&self, r1: [f64; 3], r2: [f64; 3]) -> Result<f64> {
        let rho = self.rho_hat(r1)?;
        if rho <= NODE_EPS_ABS {
            return Err(QflowError::Node { x: r1, rho });
        }
        Ok(self.pair_density(r1, r2)? / rho)
    }

    /// Exchange-correlation charge `ρ_xc = 2Q − ρ̂(r₂)`.
    pub fn xc_charge(&self, r1: [f64; 3], r2: [f64; 3]) -> Result<f64> {
        Ok(2.0 * self.q_charge(r1, r2)? - self.rho_hat(r2)?)
    }

    /// `∫ρ_xc(r₁, ·)`: `f(n − 1) − ∫ρ̂`, a constant deficit for determinants.
    pub fn hole_sum(&self, r1: [f64; 3], grid: &Grid) -> Result<f64> {
        Ok(integrate_scalar(|x| self.xc_charge(r1, x), grid)?.value)
    }

    /// `ρ̂` and `ρ̂v̂ = Σ occₖ Im(φₖ*∇φₖ)/m` as Taylor jets about `x`.
    fn density_jets<const N: usize>(&self, x: [f64; 3]) -> Result<(Jet<N>, [Jet<N>; 3])> {
        let s = self.mode_scale();
        let mut rho = Jet::<N>::constant(0.0);
        let mut j = [Jet::<N>::constant(0.0); 3];
        for (o, occ) in self.det.orbitals.iter().zip(&self.det.occupancy) {
            let psi: Cx<Jet<N>> = o.psi_taylor(x, 0.0)?;
            let w = s * f64::from(*occ);
            rho = rho + psi.norm_sqr() * w;
            for (a, ja) in j.iter_mut().enumerate() {
                let cur = psi.re * psi.im.d(a) - psi.im * psi.re.d(a);
                *ja = *ja + cur * (w / MASS);
            }
        }
        Ok((rho, j))
    }

    pub fn reduced_fields(&self, x: [f64; 3]) -> Result<ReducedFields> {
        let (rho, j) = self.density_jets::<15>(x)?;
        let r = rho.value();
        if r <= NODE_EPS_ABS {
            return Err(QflowError::Node { x, rho: r });
        }
        Ok(ReducedFields {
            rho_hat: r,
            u_hat: [0, 1, 2].map(|a| -ZETA * rho.d(a).value() / r),
            v_hat: j.map(|c| c.value() / r),
            p_hat: -ZETA * ZETA0 * rho.lap().value(),
        })
    }
}
