//! Cross flows: velocity fields `μ` with `μ·u = 0` that replace the second
//! velocity on surfaces of constant density, the Holland spin velocity, and
//! the normal force that keeps a crossed particle on its circle.

use crate::analytic_states::{polar_jet, polar_taylor, PolarJet, QuantumState, NODE_EPS_ABS};
use crate::error::{QflowError, Result};
use crate::field_engine::{field_point, FieldPoint};
use crate::numerics::fd::{divergence_h, step, Order, H0_ORDER4};
use crate::numerics::grid::check_skipped;
use crate::numerics::jet::{X, Y, Z};
use crate::numerics::{Grid, ResidualReport, Sample, Scalar};
use crate::units::{MASS, ZETA, ZETA0};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CrossKind {
    /// `μ ∝ ∇S × u`.
    GradSCross,
    /// `μ ∝ ∇φ × u` for the linear potential `φ = axis·x`.
    Auxiliary { axis: [f64; 3] },
    /// `(∇ρ/mρ) × s`, spin `s = spin·(ħ/2)·axis`.
    Holland { axis: [f64; 3], spin: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossPolicy {
    pub kind: CrossKind,
    /// Scale the direction to `|u|`.
    pub rescale: bool,
}

const EZ: [f64; 3] = [0.0, 0.0, 1.0];

impl CrossPolicy {
    pub fn grad_s(rescale: bool) -> CrossPolicy {
        CrossPolicy {
            kind: CrossKind::GradSCross,
            rescale,
        }
    }

    /// `φ = z`, rescaled: the default for s states.
    pub fn aux_z() -> CrossPolicy {
        CrossPolicy {
            kind: CrossKind::Auxiliary { axis: EZ },
            rescale: true,
        }
    }

    pub fn holland() -> CrossPolicy {
        CrossPolicy {
            kind: CrossKind::Holland { axis: EZ, spin: 1.0 },
            rescale: false,
        }
    }

    /// `gradS`, `gradS:raw`, `aux:z` (or `aux:x`, `aux:y`, `aux:z:raw`),
    /// `holland`, `holland:down`.
    pub fn parse(s: &str) -> Result<CrossPolicy> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let raw = parts.last() == Some(&"raw");
        let bad = || QflowError::InvalidState(format!("unknown cross policy '{s}'"));
        let axis = |a: &str| match a {
            "x" => Ok([1.0, 0.0, 0.0]),
            "y" => Ok([0.0, 1.0, 0.0]),
            "z" => Ok(EZ),
            _ => Err(bad()),
        };
        let kind = match parts.as_slice() {
            ["gradS"] | ["gradS", "raw"] => CrossKind::GradSCross,
            ["aux", a] | ["aux", a, "raw"] => CrossKind::Auxiliary { axis: axis(a)? },
            ["holland"] => CrossKind::Holland { axis: EZ, spin: 1.0 },
            ["holland", "down"] => CrossKind::Holland { axis: EZ, spin: -1.0 },
            _ => return Err(bad()),
        };
        let rescale = match kind {
            CrossKind::Holland { .. } => false,
            _ => !raw,
        };
        Ok(CrossPolicy { kind, rescale })
    }

    /// Streamlines are circles about `axis`.
    fn azimuthal_axis(&self) -> Option<[f64; 3]> {
        match self.kind {
            CrossKind::Auxiliary { axis } | CrossKind::Holland { axis, .. } => Some(axis),
            CrossKind::GradSCross => None,
        }
    }
}

pub(crate) fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Relative size of `|d × u|` below which the direction counts as undefined.
const PARALLEL_EPS: f64 = 1e-12;

/// `μ` from the fields at `x`. The direction is built from `∇ρ` itself,
/// `d × u = −(ζ/ρ) d × ∇ρ`, so `μ·∇ρ` vanishes exactly for axis directions.
pub fn cross_from_fields(
    x: [f64; 3],
    pj: &PolarJet<f64>,
    fp: &FieldPoint<f64>,
    policy: &CrossPolicy,
) -> Result<[f64; 3]> {
    let (raw, scale) = cross_parts(x, pj, fp, policy)?;
    Ok(raw.map(|c| c * scale))
}

/// `μ = scale·raw`, keeping the unscaled direction for exact dot products.
fn cross_parts(
    x: [f64; 3],
    pj: &PolarJet<f64>,
    fp: &FieldPoint<f64>,
    policy: &CrossPolicy,
) -> Result<([f64; 3], f64)> {
    let g = pj.grad_rho;
    let k = -ZETA / pj.rho;
    let (d, raw) = match policy.kind {
        CrossKind::Holland { axis, spin } => {
            // (∇ρ/mρ) × s
            let s = axis.map(|c| spin * ZETA0 * c / (MASS * pj.rho));
            return Ok((cross(&g, &s), 1.0));
        }
        CrossKind::GradSCross => {
            let d = fp.v.map(|c| c * MASS);
            (norm(&d), cross(&d, &g))
        }
        CrossKind::Auxiliary { axis } => (norm(&axis), cross(&axis, &g)),
    };
    let nr = norm(&raw);
    let ng = norm(&g);
    if !(nr > PARALLEL_EPS * d * ng) {
        return Err(QflowError::DirectionUndefined { x });
    }
    let scale = if policy.rescale { -norm(&fp.u) / nr } else { k };
    Ok((raw, scale))
}

pub fn cross_velocity(state: &QuantumState, x: [f64; 3], t: f64, policy: &CrossPolicy) -> Result<[f64; 3]> {
    let pj = polar_jet(state, x, t)?;
    cross_from_fields(x, &pj, &field_point(&pj), policy)
}

/// `(∇ρ/mρ) × s` with `s = (ħ/2)ẑ`; equals `u sinθ φ̂` when `u` is radial.
pub fn holland_velocity(state: &QuantumState, x: [f64; 3], t: f64) -> Result<[f64; 3]> {
    cross_velocity(state, x, t, &CrossPolicy::holland())
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossRecord {
    pub state: String,
    pub t: f64,
    pub policy: CrossPolicy,
    pub max_mu_dot_u: f64,
    /// `max||μ| − |u||`; only meaningful with rescaling.
    pub max_speed_mismatch: f64,
    pub max_div_mu: f64,
    pub max_div_rho_mu: f64,
    pub max_mu_dot_grad_rho: f64,
    /// `max|ω·∇ρ|`, `ω = μ + v`.
    pub max_omega_dot_grad_rho: f64,
    pub max_div_omega: f64,
    pub samples: usize,
    pub skipped: usize,
}

struct CrossSample {
    mu_u: f64,
    speed: f64,
    div_mu: f64,
    div_rho_mu: f64,
    mu_grad_rho: f64,
    omega_grad_rho: f64,
    div_omega: f64,
}

/// Grid diagnostics with fourth-order FD divergences (`h0 = 1e-4`). Nodes where
/// the direction is undefined on the stencil are skipped.
pub fn cross_diagnostics(state: &QuantumState, grid: &Grid, t: f64, policy: &CrossPolicy) -> Result<CrossRecord> {
    if grid.is_empty() {
        return Err(QflowError::DegenerateGrid { skipped: 0, total: 0 });
    }
    let fields = |y: [f64; 3]| -> Result<(f64, FieldPoint<f64>, [f64; 3])> {
        let pj = polar_jet(state, y, t)?;
        let fp = field_point(&pj);
        let mu = cross_from_fields(y, &pj, &fp, policy)?;
        Ok((pj.rho, fp, mu))
    };
    let one = |x: [f64; 3]| -> Result<CrossSample> {
        let (_, fp, mu) = fields(x)?;
        let pj = polar_jet(state, x, t)?;
        let grad_rho = pj.grad_rho;
        let (raw, scale) = cross_parts(x, &pj, &fp, policy)?;
        let h = step(&x, H0_ORDER4);
        let div = |f: &dyn Fn(&(f64, FieldPoint<f64>, [f64; 3])) -> [f64; 3]| {
            divergence_h(&|y| fields(y).map(|v| f(&v)), &x, h, Order::Four)
        };
        let omega = |a: &[f64; 3], v: &[f64; 3]| [a[0] + v[0], a[1] + v[1], a[2] + v[2]];
        let om = omega(&mu, &fp.v);
        Ok(CrossSample {
            mu_u: dot(&mu, &fp.u).abs(),
            speed: (norm(&mu) - norm(&fp.u)).abs(),
            div_mu: div(&|v| v.2)?.abs(),
            div_rho_mu: div(&|v| v.2.map(|c| c * v.0))?.abs(),
            mu_grad_rho: (scale * dot(&raw, &grad_rho)).abs(),
            omega_grad_rho: dot(&om, &grad_rho).abs(),
            div_omega: div(&|v| omega(&v.2, &v.1.v))?.abs(),
        })
    };
    let vals: Vec<Option<CrossSample>> = grid
        .nodes
        .par_iter()
        .map(|&x| match one(x) {
            Ok(s) => Ok(Some(s)),
            Err(QflowError::Node { .. })
            | Err(QflowError::Stencil { .. })
            | Err(QflowError::DirectionUndefined { .. })
            | Err(QflowError::CoulombSingularity) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let skipped = vals.iter().filter(|v| v.is_none()).count();
    check_skipped(skipped, grid.len())?;
    let ok: Vec<&CrossSample> = vals.iter().flatten().collect();
    let mx = |f: fn(&CrossSample) -> f64| ok.iter().map(|s| f(s)).fold(0.0, f64::max);
    Ok(CrossRecord {
        state: state.label(),
        t,
        policy: *policy,
        max_mu_dot_u: mx(|s| s.mu_u),
        max_speed_mismatch: if policy.rescale { mx(|s| s.speed) } else { f64::NAN },
        max_div_mu: mx(|s| s.div_mu),
        max_div_rho_mu: mx(|s| s.div_rho_mu),
        max_mu_dot_grad_rho: mx(|s| s.mu_grad_rho),
        max_omega_dot_grad_rho: mx(|s| s.omega_grad_rho),
        max_div_omega: mx(|s| s.div_omega),
        samples: ok.len(),
        skipped,
    })
}

/// Normal force per unit mass that keeps a particle moving with `μ` on its
/// circle about the policy axis: `F̂ = a_c + ∇U + ∇P/ρ`, with centripetal
/// acceleration `a_c = −(|μ|²/s) ŝ` and `s` the distance from the axis.
/// On the equatorial plane of an s state `F̂·r̂ = −μ²/r + ∇U·r̂ + ρ⁻¹∇P·r̂`.
pub fn required_nowork_force(state: &QuantumState, x: [f64; 3], t: f64, policy: &CrossPolicy) -> Result<[f64; 3]> {
    let axis = policy
        .azimuthal_axis()
        .ok_or_else(|| QflowError::Unsupported("nowork force needs circular streamlines about an axis".into()))?;
    let pj = polar_taylor::<35>(state, x, t, NODE_EPS_ABS)?;
    let fp = field_point(&pj);
    let rho = pj.rho.value();
    let grad_p = [X, Y, Z].map(|k| fp.p_first.d(k).value());
    let mu = cross_velocity(state, x, t, policy)?;
    let an = norm(&axis);
    let a_hat = axis.map(|c| c / an);
    let along = dot(&x, &a_hat);
    let radial = [x[0] - along * a_hat[0], x[1] - along * a_hat[1], x[2] - along * a_hat[2]];
    let s = norm(&radial);
    if s == 0.0 {
        return Err(QflowError::DirectionUndefined { x });
    }
    let speed2 = dot(&mu, &mu);
    let muh = mu.map(|c| c / speed2.sqrt().max(f64::MIN_POSITIVE));
    // μ must be azimuthal for the circle to be a streamline.
    if dot(&muh, &radial).abs() > 1e-10 * s || dot(&muh, &a_hat).abs() > 1e-10 {
        return Err(QflowError::Unsupported("cross velocity is not azimuthal here".into()));
    }
    let gu = state.potential().grad(&x);
    let mut f = [0.0; 3];
    for k in 0..3 {
        f[k] = -speed2 / s * radial[k] / s + gu[k] / MASS + grad_p[k] / (rho * MASS);
    }
    Ok(f)
}

/// `μ` sampled on the circle of radius `r` about the policy axis at height 0.
pub fn sample_circle(
    state: &QuantumState,
    t: f64,
    policy: &CrossPolicy,
    radius: f64,
    n: usize,
) -> Vec<([f64; 3], Result<[f64; 3]>)> {
    (0..n)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let x = [radius * a.cos(), radius * a.sin(), 0.0];
            (x, cross_velocity(state, x, t, policy))
        })
        .collect()
}

/// Energy equation with `u` replaced by `μ`:
/// `Eρ = ½ρμ² + ½ρv² + P + Uρ`.
pub fn crossed_energy_residual(state: &QuantumState, grid: &Grid, t: f64, policy: &CrossPolicy, tol: f64) -> Result<ResidualReport> {
    let vals = crate::numerics::grid::map_nodes(grid, |x| {
        let pj = polar_jet(state, x, t)?;
        let fp = field_point(&pj);
        let mu = match cross_from_fields(x, &pj, &fp, policy) {
            Ok(m) => m,
            Err(QflowError::DirectionUndefined { .. }) => return Err(QflowError::Stencil { x }),
            Err(e) => return Err(e),
        };
        let u_pot = state.potential().eval(&x);
        let terms = [
            fp.e * pj.rho,
            -0.5 * MASS * pj.rho * dot(&mu, &mu),
            -fp.ke_v,
            -fp.p_first,
            -u_pot * pj.rho,
        ];
        Ok(terms)
    })?;
    let skipped = vals.iter().filter(|v| v.is_none()).count();
    check_skipped(skipped, grid.len())?;
    let samples: Vec<Sample> = vals
        .iter()
        .zip(&grid.weights)
        .filter_map(|(v, w)| v.map(|t| Sample::new(*w, t.iter().sum(), &t)))
        .collect();
    Ok(ResidualReport::from_samples(
        "crossflow.energy",
        "Eρ = ½ρμ² + ½ρv² + P + Uρ",
        tol,
        &samples,
        skipped,
    ))
}
