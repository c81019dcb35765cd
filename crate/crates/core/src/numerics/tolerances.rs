//! Every pass/fail threshold in one record.
//!
//! Defaults are the acceptance thresholds. `QFLOW_TOL_SCALE` multiplies all
//! tolerances (not the refinement ratio) and per-key overrides can be merged
//! from a map.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// `||u| − 1|` for the hydrogen ground state, analytic jets.
    pub unit_speed: f64,
    /// Standard deviation of `E` over a grid for eigenstates, analytic jets.
    pub energy_uniform: f64,
    /// Same with finite-difference jets.
    pub energy_uniform_fd: f64,
    /// Radii from root finding (pressure crossover, orbit radius).
    pub radius: f64,
    /// Absolute error of free-variable integrals (`∫P`, `∫p`, `∫Fρ`).
    pub free_integral: f64,
    /// Absolute error of kinetic-energy and energy integrals.
    pub energy_integral: f64,
    /// Pointwise closed forms of the two-level superposition energies.
    pub superposition_pointwise: f64,
    /// Quadrature norm of cataloged eigenstates.
    pub norm: f64,
    /// Continuity family, analytic jets.
    pub continuity: f64,
    /// Lower bound every continuity residual must exceed on corrupted input.
    pub corrupted_floor: f64,
    /// Energy equations, analytic jets.
    pub energy_equation: f64,
    /// Energy equations, finite-difference jets.
    pub energy_equation_fd: f64,
    /// Euler equation variants.
    pub euler: f64,
    /// Pointwise magnitude of the coupling force for states with `v = 0`.
    pub coupling: f64,
    /// Momentum balances, analytic time derivatives.
    pub momentum: f64,
    /// Momentum balances, finite-difference time derivatives.
    pub momentum_fd: f64,
    /// Bohmian equations, analytic jets.
    pub bohmian: f64,
    /// Bohmian equations, finite-difference jets.
    pub bohmian_fd: f64,
    /// `max|u·v|` below which a flow counts as smooth, per unit `|u||v|`.
    pub smooth_flow: f64,
    /// `μ·u` and `|μ| − |u|` by construction.
    pub cross_exact: f64,
    /// Finite-difference divergence of cross velocities.
    pub cross_divergence: f64,
    /// Nowork force components.
    pub nowork_force: f64,
    /// Holland velocity against its closed form.
    pub holland: f64,
    /// Closed-orbit return distance.
    pub orbit_return: f64,
    /// Hamiltonian spread along a trajectory.
    pub hamiltonian: f64,
    /// Density drift along cross-flow paths.
    pub born_rule: f64,
    /// Analytic derivatives against finite differences.
    pub fd_vs_analytic: f64,
    /// Minimum error reduction on halving a step for fourth-order schemes.
    pub refinement_ratio: f64,
    /// Pair-density normalization.
    pub pair_norm: f64,
    /// Coulomb field and potential against closed forms.
    pub coulomb: f64,
    /// Coulomb interaction energy integrals.
    pub coulomb_energy: f64,
    /// Energy functional of the determinant.
    pub energy_functional: f64,
    /// Closed-loop circulation of the Coulomb field.
    pub circulation: f64,
    /// Orbital equations and reduced Euler equation for exact cases.
    pub orbital: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            unit_speed: 1e-10,
            energy_uniform: 1e-10,
            energy_uniform_fd: 1e-4,
            radius: 1e-6,
            free_integral: 1e-6,
            energy_integral: 1e-6,
            superposition_pointwise: 1e-8,
            norm: 1e-8,
            continuity: 1e-8,
            corrupted_floor: 1e-4,
            energy_equation: 1e-10,
            energy_equation_fd: 1e-6,
            euler: 1e-6,
            coupling: 1e-12,
            momentum: 1e-8,
            momentum_fd: 1e-5,
            bohmian: 1e-10,
            bohmian_fd: 1e-5,
            smooth_flow: 1e-10,
            cross_exact: 1e-12,
            cross_divergence: 1e-6,
            nowork_force: 1e-6,
            holland: 1e-10,
            orbit_return: 1e-4,
            hamiltonian: 1e-6,
            born_rule: 1e-8,
            fd_vs_analytic: 1e-6,
            refinement_ratio: 8.0,
            pair_norm: 1e-5,
            coulomb: 1e-4,
            coulomb_energy: 1e-4,
            energy_functional: 1e-3,
            circulation: 1e-5,
            orbital: 1e-8,
        }
    }
}

pub const SCALE_ENV: &str = "QFLOW_TOL_SCALE";

impl Tolerances {
    /// `QFLOW_TOL_SCALE` when it holds a positive finite number, else 1.
    pub fn env_scale() -> f64 {
        std::env::var(SCALE_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|s| *s > 0.0 && s.is_finite())
            .unwrap_or(1.0)
    }

    /// Defaults scaled by [`Self::env_scale`].
    pub fn from_env() -> Tolerances {
        Tolerances::default().scaled(Tolerances::env_scale())
    }

    pub fn scaled(&self, s: f64) -> Tolerances {
        let mut v = serde_json::to_value(self).expect("plain struct");
        if let Some(map) = v.as_object_mut() {
            for (k, x) in map.iter_mut() {
                if k != "refinement_ratio" {
                    *x = serde_json::json!(x.as_f64().unwrap_or(0.0) * s);
                }
            }
        }
        serde_json::from_value(v).expect("same shape")
    }

    /// Replaces the named entries; unknown keys are rejected.
    pub fn with_overrides(&self, overrides: &BTreeMap<String, f64>) -> Result<Tolerances, String> {
        let mut v = serde_json::to_value(self).expect("plain struct");
        let map = v.as_object_mut().expect("object");
        for (k, x) in overrides {
            if !map.contains_key(k) {
                return Err(format!("unknown tolerance key '{k}'"));
            }
            map.insert(k.clone(), serde_json::json!(x));
        }
        serde_json::from_value(v).map_err(|e| e.to_string())
    }
}
