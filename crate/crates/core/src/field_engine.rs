//! Fluid variables as algebraic functions of a [`PolarJet`].
//!
//! Everything is generic over [`Scalar`]: applied to a jet bundle the same
//! formulas return Taylor expansions of the fields, which the verifier
//! differentiates exactly.

use crate::analytic_states::{node_floor_for, polar_jet_with, JetMethod, PolarJet, QuantumState};
use crate::error::{QflowError, Result};
use crate::numerics::grid::{check_skipped, map_nodes};
use crate::numerics::{Grid, Scalar};
use crate::units::{MASS, ZETA, ZETA0};
use serde::{Deserialize, Serialize};

/// Correspondence variables at one point.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FieldPoint<T> {
    /// `∇S/m`.
    pub v: [T; 3],
    /// `−ζ∇ρ/ρ`.
    pub u: [T; 3],
    /// `u + v`.
    pub w: [T; 3],
    /// First pressure `−ζζ₀∇²ρ`.
    #[serde(rename = "P")]
    pub p_first: T,
    /// Second pressure `−(ζ₀/m)∇·(ρ∇S)`.
    #[serde(rename = "p")]
    pub p_second: T,
    /// `−∂S`.
    #[serde(rename = "E")]
    pub e: T,
    /// `ζ₀∂ρ/ρ`.
    #[serde(rename = "F")]
    pub f: T,
    #[serde(rename = "Ebar")]
    pub ebar: T,
    #[serde(rename = "Q")]
    pub q: T,
    /// `−ζ₀ ln ρ`.
    pub theta: T,
    /// `ζ₀ρ`.
    pub eta: T,
    pub ke_u: T,
    pub ke_v: T,
    /// `ρv`.
    pub j: [T; 3],
}

fn dot<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `(v, u)`.
pub fn momentae<T: Scalar>(jet: &PolarJet<T>) -> ([T; 3], [T; 3]) {
    let inv = jet.rho.recip() * -ZETA;
    (
        jet.grad_s.map(|g| g / MASS),
        jet.grad_rho.map(|g| g * inv),
    )
}

/// `(P, p)`.
pub fn pressures<T: Scalar>(jet: &PolarJet<T>) -> (T, T) {
    (
        jet.lap_rho * (-ZETA * ZETA0),
        jet.div_rho_grad_s * (-ZETA0 / MASS),
    )
}

/// `(E, F)`.
pub fn energies<T: Scalar>(jet: &PolarJet<T>) -> (T, T) {
    (-jet.dt_s, jet.dt_rho / jet.rho * ZETA0)
}

/// `Q = (ħ²/8m)|∇ρ|²/ρ² − (ħ²/4m)∇²ρ/ρ`.
pub fn quantum_potential<T: Scalar>(jet: &PolarJet<T>) -> T {
    let hb2 = 4.0 * ZETA0 * ZETA0;
    let g2 = dot(&jet.grad_rho, &jet.grad_rho);
    let inv = jet.rho.recip();
    g2 * inv * inv * (hb2 / (8.0 * MASS)) - jet.lap_rho * inv * (hb2 / (4.0 * MASS))
}

/// `∇·u = −ζ(∇²ρ/ρ − |∇ρ|²/ρ²)`.
pub fn div_u<T: Scalar>(jet: &PolarJet<T>) -> T {
    let inv = jet.rho.recip();
    (jet.lap_rho * inv - dot(&jet.grad_rho, &jet.grad_rho) * inv * inv) * -ZETA
}

/// `∇·v = ∇²S/m`.
pub fn div_v<T: Scalar>(jet: &PolarJet<T>) -> T {
    jet.lap_s() / MASS
}

pub fn field_point<T: Scalar>(jet: &PolarJet<T>) -> FieldPoint<T> {
    let (v, u) = momentae(jet);
    let (p_first, p_second) = pressures(jet);
    let (e, f) = energies(jet);
    let rho_m = jet.rho * MASS;
    FieldPoint {
        v,
        u,
        w: [u[0] + v[0], u[1] + v[1], u[2] + v[2]],
        p_first,
        p_second,
        e,
        f,
        ebar: e + f,
        q: quantum_potential(jet),
        theta: jet.rho.ln() * -ZETA0,
        eta: jet.rho * ZETA0,
        ke_u: rho_m * dot(&u, &u) * 0.5,
        ke_v: rho_m * dot(&v, &v) * 0.5,
        j: v.map(|c| c * jet.rho),
    }
}

/// Fields sampled on a grid; `points[i]` is `None` at skipped nodes.
#[derive(Clone, Debug, Serialize)]
pub struct FieldBundle {
    pub state: String,
    pub t: f64,
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub rho: Vec<Option<f64>>,
    pub points: Vec<Option<FieldPoint<f64>>>,
    pub skipped: usize,
}

impl FieldBundle {
    /// Iterates `(node, weight, ρ, field)` over evaluated nodes.
    pub fn iter(&self) -> impl Iterator<Item = ([f64; 3], f64, f64, &FieldPoint<f64>)> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(self.rho.iter().zip(&self.points))
            .filter_map(|((x, w), (r, p))| Some((*x, *w, (*r)?, p.as_ref()?)))
    }
}

pub fn field_bundle(state: &QuantumState, grid: &Grid, t: f64) -> Result<FieldBundle> {
    field_bundle_with(state, grid, t, JetMethod::Analytic)
}

pub fn field_bundle_with(state: &QuantumState, grid: &Grid, t: f64, method: JetMethod) -> Result<FieldBundle> {
    if grid.is_empty() {
        return Err(QflowError::DegenerateGrid { skipped: 0, total: 0 });
    }
    let floor = node_floor_for(state, grid, t, method);
    let vals = map_nodes(grid, |x| {
        let jet = polar_jet_with(state, x, t, method, floor)?;
        Ok((jet.rho, field_point(&jet)))
    })?;
    let skipped = vals.iter().filter(|v| v.is_none()).count();
    check_skipped(skipped, grid.len())?;
    let (rho, points) = vals.into_iter().map(|v| (v.map(|p| p.0), v.map(|p| p.1))).unzip();
    Ok(FieldBundle {
        state: state.label(),
        t,
        nodes: grid.nodes.clone(),
        weights: grid.weights.clone(),
        rho,
        points,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic_states::{polar_jet, psi_derivs, StateSpec};
    use crate::numerics::fd::{fd_divergence, fd_laplacian, Order};
    use proptest::prelude::*;

    fn st(s: &str) -> QuantumState {
        QuantumState::parse(s).unwrap()
    }

    fn spherical(r: f64, th: f64, ph: f64) -> [f64; 3] {
        [r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()]
    }

    fn rel(a: f64, b: f64, scale: f64) -> f64 {
        (a - b).abs() / scale.abs().max(1e-300)
    }

    #[test]
    fn ground_state_velocities() {
        let s = st("hydrogen:1s");
        let x = spherical(2.3, 1.0, 0.3);
        let (v, u) = momentae(&polar_jet(&s, x, 0.4).unwrap());
        let r = 2.3;
        for k in 0..3 {
            assert!((u[k] - x[k] / r).abs() < 1e-14);
            assert!(v[k].abs() < 1e-15);
        }
    }

    #[test]
    fn azimuthal_state_angular_momentum() {
        let s = st("hydrogen:2p1");
        let (r, th, ph) = (1.4, 0.8, -1.2);
        let x = spherical(r, th, ph);
        let (v, _) = momentae(&polar_jet(&s, x, 0.0).unwrap());
        // L_z = m (x v_y − y v_x)
        assert!((x[0] * v[1] - x[1] * v[0] - 1.0).abs() < 1e-13);
        let phi_hat = [-ph.sin(), ph.cos(), 0.0];
        let vphi = dot(&v, &phi_hat);
        assert!((vphi - 1.0 / (r * th.sin())).abs() < 1e-13);
    }

    #[test]
    fn uniform_density_has_no_second_velocity() {
        let jet = PolarJet {
            rho: 0.3,
            grad_rho: [0.0; 3],
            lap_rho: 0.0,
            dt_rho: 0.0,
            grad_s: [0.1, 0.0, 0.0],
            dt_s: 0.0,
            div_rho_grad_s: 0.0,
            hess_s: None,
        };
        let (_, u) = momentae(&jet);
        assert_eq!(u, [0.0; 3]);
        assert_eq!(quantum_potential(&jet), 0.0);
    }

    #[test]
    fn ground_state_pressure_against_fd_divergence() {
        let s = st("hydrogen:1s");
        let x = spherical(1.7, 0.4, 2.0);
        let (p1, p2) = pressures(&polar_jet(&s, x, 0.0).unwrap());
        let rho = |y: [f64; 3]| -> Result<f64> { Ok(s.psi(y, 0.0)?.to_c64().norm_sqr()) };
        let r = 1.7;
        let closed = rho(x).unwrap() * (1.0 / r - 1.0);
        assert!(rel(p1, closed, closed) < 1e-12);
        // P = ζ₀∇·(ρ r̂)
        let flux = |y: [f64; 3]| -> [f64; 3] {
            let ry = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            let d = rho(y).unwrap();
            y.map(|c| d * c / ry)
        };
        let div: f64 = (0..3)
            .map(|k| {
                crate::numerics::fd::derivative(
                    |s| {
                        let mut y = x;
                        y[k] += s;
                        Ok(flux(y)[k])
                    },
                    0.0,
                    1e-4 * (1.0 + r),
                    Order::Four,
                )
                .unwrap()
            })
            .sum();
        assert!(rel(p1, 0.5 * div, closed) < 1e-8);
        assert_eq!(p2, 0.0);
    }

    #[test]
    fn azimuthal_state_has_no_second_pressure() {
        let s = st("hydrogen:2p1");
        let x = spherical(2.0, 1.1, 0.5);
        let (_, p) = pressures(&polar_jet(&s, x, 0.0).unwrap());
        let j = |y: [f64; 3]| {
            let pj = polar_jet(&s, y, 0.0)?;
            Ok(pj.grad_s.map(|g| g * pj.rho))
        };
        let div = fd_divergence(j, x, Order::Four).unwrap();
        assert!(p.abs() < 1e-17);
        assert!(div.abs() < 1e-10);
    }

    #[test]
    fn ground_state_energies_and_quantum_potential() {
        let s = st("hydrogen:1s");
        for (r, t) in [(0.3, 0.0), (1.0, 2.0), (5.0, 7.5)] {
            let jet = polar_jet(&s, spherical(r, 0.6, 0.2), t).unwrap();
            let (e, f) = energies(&jet);
            assert!((e + 0.5).abs() < 1e-13);
            assert!(f.abs() < 1e-13);
            let q = quantum_potential(&jet);
            assert!(rel(q, -0.5 + 1.0 / r, 1.0 / r) < 1e-12);
        }
    }

    #[test]
    fn quantum_potential_against_fd_of_root_density() {
        for (s, x) in [("hydrogen:1s", [0.4, 0.7, -0.3]), ("osc1d:0", [0.8, 0.0, 0.0])] {
            let s = st(s);
            let q = quantum_potential(&polar_jet(&s, x, 0.0).unwrap());
            let amp = |y: [f64; 3]| Ok(s.psi(y, 0.0)?.to_c64().norm());
            let lap = fd_laplacian(amp, x, Order::Four).unwrap();
            let want = -0.5 * lap / amp(x).unwrap();
            assert!(rel(q, want, want.abs() + 1.0) < 1e-7, "{q} {want}");
        }
        let q = quantum_potential(&polar_jet(&st("osc1d:0"), [0.8, 0.0, 0.0], 0.0).unwrap());
        assert!((q - (0.5 - 0.5 * 0.64)).abs() < 1e-13);
    }

    #[test]
    fn superposition_energy_closed_forms_at_zero() {
        let s = st("super:1s+2s");
        let h1 = st("hydrogen:1s");
        let h2 = st("hydrogen:2s");
        let x = [0.5, 1.2, -0.8];
        let jet = polar_jet(&s, x, 0.0).unwrap();
        let (e, f) = energies(&jet);
        let p1 = h1.psi(x, 0.0).unwrap().re;
        let p2 = h2.psi(x, 0.0).unwrap().re;
        let (e1, e2) = (-0.5, -0.125);
        let want = 0.5 * p1 * p2 * (e1 + e2) + 0.5 * e1 * p1 * p1 + 0.5 * e2 * p2 * p2;
        assert!((e * jet.rho - want).abs() < 1e-14);
        assert!((f * jet.rho).abs() < 1e-15);
    }

    #[test]
    fn bundle_of_ground_state_has_unit_speed() {
        let s = st("hydrogen:1s");
        let b = field_bundle(&s, &Grid::reference_with(30.0, 12), 0.0).unwrap();
        let worst = b
            .iter()
            .map(|(_, _, _, p)| (dot(&p.u, &p.u).sqrt() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst}");
        assert_eq!(b.skipped, 0);
    }

    #[test]
    fn bundle_skips_the_radial_node() {
        let s = st("hydrogen:2s");
        let mut r: Vec<f64> = (1..=200).map(|k| 0.05 * k as f64 + 0.013).collect();
        r.push(2.0);
        r.sort_by(f64::total_cmp);
        let w = vec![1.0; r.len()];
        let g = Grid::spherical_product(r, w, 8, 8).unwrap();
        let b = field_bundle(&s, &g, 0.0).unwrap();
        assert!(b.skipped > 0);
        // P < 0 across the node shell, P > 0 just beyond r ≈ 2.85.
        let radius = |x: &[f64; 3]| x.iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!(b.iter().filter(|(x, ..)| (1.5..2.5).contains(&radius(x))).all(|p| p.3.p_first < 0.0));
        assert!(b.iter().filter(|(x, ..)| (3.0..4.5).contains(&radius(x))).all(|p| p.3.p_first > 0.0));
    }

    #[test]
    fn empty_grid_is_degenerate() {
        let s = st("hydrogen:1s");
        assert!(matches!(
            field_bundle(&s, &Grid::points(vec![]), 0.0),
            Err(QflowError::DegenerateGrid { .. })
        ));
    }

    fn probe_states() -> Vec<QuantumState> {
        [
            "hydrogen:1s",
            "hydrogen:2p1",
            "hydrogen:3d2",
            "hydrogen:3p-1",
            "super:1s+2p0",
            "super:2s+3d1",
            "osc3d:1.0.2",
            "coherent:1+0.5i",
        ]
        .iter()
        .map(|s| st(s))
        .collect()
    }

    fn probe() -> impl Strategy<Value = (usize, f64, f64, f64, f64)> {
        (0usize..8, 0.2f64..8.0, 0.15f64..3.0, 0.0f64..std::f64::consts::TAU, 0.0f64..5.0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pointwise_identities((k, r, th, ph, t) in probe()) {
            let s = &probe_states()[k];
            let x = spherical(r, th, ph);
            let d = psi_derivs(s, x, t, JetMethod::Analytic).unwrap();
            let jet = crate::analytic_states::polar_from_psi(&d);
            prop_assume!(jet.rho > 1e-200);
            let fp = field_point(&jet);
            let rho = jet.rho;
            // |P̂Ψ|²ρ = |Ψ*P̂Ψ|²
            let grad_sq: f64 = d.grad.iter().map(|g| g.norm_sqr()).sum();
            let psi = d.psi.to_c64();
            let cross_sq: f64 = d.grad.iter().map(|g| (psi.conj() * g.to_c64()).norm_sqr()).sum();
            prop_assert!(rel(grad_sq * rho, cross_sq, cross_sq) < 1e-10);
            // ½|Ψ*P̂Ψ/ρ|² = ½u² + ½v²
            let ke = fp.ke_u / rho + fp.ke_v / rho;
            prop_assert!(rel(0.5 * cross_sq / (rho * rho), ke, ke) < 1e-10);
            // Q = ½u² + P/ρ
            let rhs = fp.ke_u / rho + fp.p_first / rho;
            prop_assert!(rel(fp.q, rhs, fp.q.abs().max(fp.ke_u / rho).max((fp.p_first / rho).abs())) < 1e-10);
            // P = −ρu·u + η∇·u,  p = ρu·v − η∇·v
            let uu = dot(&fp.u, &fp.u);
            let scale_p = fp.p_first.abs().max(rho * uu).max((fp.eta * div_u(&jet)).abs());
            prop_assert!(rel(fp.p_first, -rho * uu + fp.eta * div_u(&jet), scale_p) < 1e-8);
            let uv = dot(&fp.u, &fp.v);
            let scale_q = fp.p_second.abs().max((rho * uv).abs()).max((fp.eta * div_v(&jet)).abs()).max(scale_p);
            prop_assert!(rel(fp.p_second, rho * uv - fp.eta * div_v(&jet), scale_q) < 1e-8);
        }

        #[test]
        fn strong_form_with_fd_laplacian((k, r, th, ph, t) in probe()) {
            let s = &probe_states()[k];
            let x = spherical(r, th, ph);
            let jet = polar_jet(s, x, t).unwrap();
            prop_assume!(jet.rho > 1e-12);
            let fp = field_point(&jet);
            let psi = s.psi(x, t).unwrap().to_c64();
            let lap = |part: fn(num_complex::Complex64) -> f64| {
                fd_laplacian(|y| Ok(part(s.psi(y, t)?.to_c64())), x, Order::Four).unwrap()
            };
            let lap_psi = num_complex::Complex64::new(lap(|c| c.re), lap(|c| c.im));
            let u_pot = s.potential().eval(&x);
            let h = psi.conj() * (lap_psi * -0.5) + psi.norm_sqr() * u_pot;
            let rhs = fp.ke_u + fp.p_first + fp.ke_v + u_pot * jet.rho;
            let scale = [fp.ke_u, fp.p_first, fp.ke_v, u_pot * jet.rho].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(rel(h.re, rhs, scale) < 1e-8, "{} {}", h.re, rhs);
            let scale_im = fp.p_second.abs().max(0.5 * (psi.conj() * lap_psi).norm());
            prop_assert!(rel(h.im, fp.p_second, scale_im) < 1e-8);
        }
    }

    #[test]
    fn specs_round_trip_through_bundle_label() {
        let s = QuantumState::new(StateSpec::hydrogenic(3, 2, -1, 2.0)).unwrap();
        assert_eq!(s.label(), "hydrogenic 3d-1 Z=2");
    }
}
