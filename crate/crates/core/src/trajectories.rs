//! Point-mass paths along the velocity fields, their Hamiltonian
//! `H = ½|q̇|² + P/ρ + U`, closed-orbit detection, and the radial force
//! balances of s states.

use crate::analytic_states::{polar_jet, polar_taylor, QuantumState, NODE_EPS_ABS};
use crate::crossflow::{cross_from_fields, dot, norm, CrossPolicy};
use crate::error::{QflowError, Result};
use crate::field_engine::field_point;
use crate::numerics::jet::X;
use crate::numerics::roots::{find_root, scan_bracket};
use crate::numerics::{rk4_step, ResidualReport, Scalar};
use crate::units::MASS;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Mode {
    /// `q̇ = v`.
    MadelungV,
    /// `q̇ = u + v`.
    BernoulliW,
    /// `q̇ = μ + v`.
    CrossOmega { policy: CrossPolicy },
}

impl Mode {
    /// `v`, `w`, `cross` (aux-z policy) or `cross:<policy>`.
    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "v" => Ok(Mode::MadelungV),
            "w" => Ok(Mode::BernoulliW),
            "cross" => Ok(Mode::CrossOmega {
                policy: CrossPolicy::aux_z(),
            }),
            _ => match s.strip_prefix("cross:") {
                Some(p) => Ok(Mode::CrossOmega {
                    policy: CrossPolicy::parse(p)?,
                }),
                None => Err(QflowError::InvalidState(format!("unknown trajectory mode '{s}'"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajSample {
    pub t: f64,
    pub x: [f64; 3],
    pub vel: [f64; 3],
    #[serde(rename = "H")]
    pub h: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosedOrbit {
    pub period: f64,
    pub return_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub state: String,
    pub mode: Mode,
    pub samples: Vec<TrajSample>,
    pub closed: Option<ClosedOrbit>,
}

/// Default radius beyond which a path counts as escaped.
pub const DOMAIN_RADIUS: f64 = 50.0;

/// Velocity of `mode` and the Hamiltonian at `(x, t)`.
pub fn velocity_and_h(state: &QuantumState, mode: &Mode, x: [f64; 3], t: f64) -> Result<([f64; 3], f64)> {
    let pj = polar_jet(state, x, t)?;
    let fp = field_point(&pj);
    let vel = match mode {
        Mode::MadelungV => fp.v,
        Mode::BernoulliW => fp.w,
        Mode::CrossOmega { policy } => {
            let mu = cross_from_fields(x, &pj, &fp, policy)?;
            [mu[0] + fp.v[0], mu[1] + fp.v[1], mu[2] + fp.v[2]]
        }
    };
    let h = 0.5 * MASS * dot(&vel, &vel) + fp.p_first / pj.rho + state.potential().eval(&x);
    Ok((vel, h))
}

/// Closed-orbit check on a Poincaré plane through `x0` normal to the initial
/// velocity; the crossing and return point come from cubic Hermite
/// interpolation of the step that pierces the plane.
fn detect_return(samples: &[TrajSample]) -> Option<ClosedOrbit> {
    let s0 = samples.first()?;
    let sp = norm(&s0.vel);
    if sp == 0.0 {
        return None;
    }
    let n = s0.vel.map(|c| c / sp);
    let side = |s: &TrajSample| dot(&[s.x[0] - s0.x[0], s.x[1] - s0.x[1], s.x[2] - s0.x[2]], &n);
    // The path must first leave the neighbourhood of the plane behind it.
    let mut armed = false;
    for w in samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let (fa, fb) = (side(a), side(b));
        if fa < 0.0 {
            armed = true;
        }
        if armed && fa < 0.0 && fb >= 0.0 {
            let h = b.t - a.t;
            let herm = |tau: f64, p0: f64, p1: f64, m0: f64, m1: f64| {
                let s = tau / h;
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * p0
                    + (s3 - 2.0 * s2 + s) * h * m0
                    + (-2.0 * s3 + 3.0 * s2) * p1
                    + (s3 - s2) * h * m1
            };
            let pos = |tau: f64| [0, 1, 2].map(|k| herm(tau, a.x[k], b.x[k], a.vel[k], b.vel[k]));
            let g = |tau: f64| {
                let p = pos(tau);
                dot(&[p[0] - s0.x[0], p[1] - s0.x[1], p[2] - s0.x[2]], &n)
            };
            let tau = find_root(g, (0.0, h), 1e-15 * h.max(1.0)).ok()?;
            let p = pos(tau);
            let err = [p[0] - s0.x[0], p[1] - s0.x[1], p[2] - s0.x[2]];
            return Some(ClosedOrbit {
                period: a.t + tau - s0.t,
                return_error: norm(&err),
            });
        }
    }
    None
}

pub fn integrate(state: &QuantumState, x0: [f64; 3], mode: Mode, t_span: (f64, f64), dt: f64) -> Result<Trajectory> {
    integrate_within(state, x0, mode, t_span, dt, DOMAIN_RADIUS)
}

/// RK4 path with every step sampled. Fails with `Escaped` once `|x|` exceeds
/// `radius` and with a node error when the path reaches `ρ = 0`.
pub fn integrate_within(
    state: &QuantumState,
    x0: [f64; 3],
    mode: Mode,
    t_span: (f64, f64),
    dt: f64,
    radius: f64,
) -> Result<Trajectory> {
    let (t0, t1) = t_span;
    if !(dt > 0.0) || !(t1 >= t0) {
        return Err(QflowError::InvalidState(format!("bad time span {t_span:?} with dt {dt}")));
    }
    let steps = ((t1 - t0) / dt).round().max(0.0) as usize;
    let mut f = |t: f64, y: [f64; 3]| velocity_and_h(state, &mode, y, t).map(|p| p.0);
    let mut x = x0;
    let mut samples = Vec::with_capacity(steps + 1);
    let (vel, h) = velocity_and_h(state, &mode, x, t0)?;
    samples.push(TrajSample { t: t0, x, vel, h });
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        x = rk4_step(&mut f, t, x, dt)?;
        let tn = t0 + (k + 1) as f64 * dt;
        if norm(&x) > radius {
            return Err(QflowError::Escaped { t: tn, radius });
        }
        let (vel, h) = velocity_and_h(state, &mode, x, tn)?;
        samples.push(TrajSample { t: tn, x, vel, h });
    }
    let closed = detect_return(&samples);
    Ok(Trajectory {
        state: state.label(),
        mode,
        samples,
        closed,
    })
}

/// `rel = (max H − min H)/|mean H|`.
pub fn hamiltonian_constancy(traj: &Trajectory, tol: f64) -> ResidualReport {
    let hs: Vec<f64> = traj.samples.iter().map(|s| s.h).collect();
    let n = hs.len().max(1) as f64;
    let hi = hs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = hs.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = hs.iter().sum::<f64>() / n;
    let spread = if hs.is_empty() { 0.0 } else { hi - lo };
    let rel = if spread == 0.0 { 0.0 } else { spread / mean.abs() };
    ResidualReport {
        name: "trajectory.hamiltonian".into(),
        anchor: "H = ½|q̇|² + P/ρ + U constant".into(),
        l_inf: spread,
        l2: spread,
        rel,
        tolerance: tol,
        pass: rel <= tol,
        samples: hs.len(),
        skipped: 0,
    }
}

/// Hydrogenic s state or `Unsupported`; returns `Z`.
fn s_state_charge(state: &QuantumState) -> Result<f64> {
    match state.hydrogenic() {
        Some(h) if h.l == 0 => Ok(h.z),
        _ => Err(QflowError::Unsupported("radial force balance needs a hydrogenic s state".into())),
    }
}

/// Radial force components per unit mass at `(r, 0, 0)`: the Coulomb
/// force `−∇U·r̂`, the pressure force `−ρ⁻¹∇P·r̂` and the speed `|u|`.
pub fn radial_forces(state: &QuantumState, r: f64) -> Result<(f64, f64, f64)> {
    let x = [r, 0.0, 0.0];
    let pj = polar_taylor::<35>(state, x, 0.0, NODE_EPS_ABS)?;
    let fp = field_point(&pj);
    let rho = pj.rho.value();
    let grad_p = fp.p_first.d(X).value();
    let coulomb = -state.potential().grad(&x)[0];
    let u = fp.u.map(|c| c.value());
    Ok((coulomb / MASS, -grad_p / (rho * MASS), norm(&u)))
}

/// First sign change of `g` on `[a, b]`, refined to `1e-13`. `NaN` samples
/// (nodes, singular points) never form a bracket.
pub fn radial_root<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, n: usize) -> Result<f64> {
    let br = scan_bracket(&g, a, b, n)?;
    find_root(&g, br, 1e-13)
}

fn radial_scan(state: &QuantumState, z: f64, f: impl Fn(f64, f64, f64, f64) -> f64) -> Result<f64> {
    let g = |r: f64| match radial_forces(state, r) {
        Ok((c, p, u)) => f(r, c, p, u),
        Err(_) => f64::NAN,
    };
    radial_root(g, 0.05 / z, 30.0 / z, 3000)
}

/// Radius where Coulomb attraction, pressure force and the centrifugal term
/// of a crossed particle with `|μ| = |u|` balance:
/// `−∇U·r̂ − ρ⁻¹∇P·r̂ + μ²/r = 0`.
pub fn modified_bohr_radius(state: &QuantumState) -> Result<f64> {
    let z = s_state_charge(state)?;
    radial_scan(state, z, |r, c, p, u| c + p + u * u / r)
}

/// Radius where the pressure force `−ρ⁻¹∇P·r̂` turns from repulsive to
/// attractive.
pub fn pressure_force_crossover(state: &QuantumState) -> Result<f64> {
    let z = s_state_charge(state)?;
    radial_scan(state, z, |_, _, p, _| p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn st(s: &str) -> QuantumState {
        QuantumState::parse(s).unwrap()
    }

    #[test]
    fn madelung_path_is_stationary_for_real_states() {
        let tr = integrate(&st("hydrogen:1s"), [0.3, 0.5, -0.2], Mode::MadelungV, (0.0, 2.0), 0.1).unwrap();
        assert!(tr.samples.iter().all(|s| s.x == [0.3, 0.5, -0.2]));
        assert!(hamiltonian_constancy(&tr, 1e-6).rel < 1e-14);
    }

    #[test]
    fn constant_h_has_zero_spread() {
        let samples = (0..12)
            .map(|k| TrajSample {
                t: k as f64,
                x: [k as f64, 0.0, 0.0],
                vel: [1.0, 0.0, 0.0],
                h: -0.25,
            })
            .collect();
        let tr = Trajectory {
            state: "synthetic".into(),
            mode: Mode::BernoulliW,
            samples,
            closed: None,
        };
        let r = hamiltonian_constancy(&tr, 0.0);
        assert!(r.rel == 0.0 && r.pass);
    }

    #[test]
    fn bernoulli_path_escapes_radially_at_unit_speed() {
        let s = st("hydrogen:1s");
        let tr = integrate(&s, [1.0, 0.0, 0.0], Mode::BernoulliW, (0.0, 5.0), 0.01).unwrap();
        for p in &tr.samples {
            assert!((norm(&p.x) - (1.0 + p.t)).abs() < 1e-8);
            assert!((p.h + 0.5).abs() < 1e-12);
        }
        assert!(hamiltonian_constancy(&tr, 1e-6).pass);
        let e = integrate(&s, [1.0, 0.0, 0.0], Mode::BernoulliW, (0.0, 60.0), 0.05);
        assert!(matches!(e, Err(QflowError::Escaped { .. })));
    }

    #[test]
    fn cross_circle_closes() {
        let s = st("hydrogen:1s");
        let mode = Mode::parse("cross").unwrap();
        let tr = integrate(&s, [1.0, 0.0, 0.0], mode, (0.0, 7.0), 0.01).unwrap();
        let c = tr.closed.unwrap();
        assert!((c.period - 2.0 * PI).abs() < 1e-4 && c.return_error < 1e-4, "{c:?}");
        let rho0 = crate::polar_jet(&s, [1.0, 0.0, 0.0], 0.0).unwrap().rho;
        for p in &tr.samples {
            let rho = crate::polar_jet(&s, p.x, 0.0).unwrap().rho;
            assert!((rho - rho0).abs() < 1e-8 * rho0);
        }
        let tr = integrate(&s, [1.5, 0.0, 0.0], mode, (0.0, 10.0), 0.01).unwrap();
        let hr = hamiltonian_constancy(&tr, 1e-6);
        assert!(hr.pass, "{hr:?}");
        let mean = tr.samples.iter().map(|p| p.h).sum::<f64>() / tr.samples.len() as f64;
        assert!((mean + 0.5).abs() < 1e-6);
    }

    #[test]
    fn return_error_refines_at_high_order() {
        let s = st("hydrogen:1s");
        let mode = Mode::parse("cross").unwrap();
        let err = |dt: f64| {
            integrate(&s, [1.0, 0.0, 0.0], mode, (0.0, 7.0), dt)
                .unwrap()
                .closed
                .unwrap()
                .return_error
        };
        let (a, b) = (err(0.2), err(0.1));
        assert!(a / b >= 8.0, "{a} {b}");
    }

    #[test]
    fn streamline_reseeding_reproduces_path() {
        let s = st("hydrogen:2p1");
        let tr = integrate(&s, [2.0, 1.0, 0.5], Mode::BernoulliW, (0.0, 1.0), 0.002).unwrap();
        let k = 200;
        let again = integrate(&s, tr.samples[k].x, Mode::BernoulliW, (tr.samples[k].t, 1.0), 0.002).unwrap();
        let (a, b) = (tr.samples.last().unwrap().x, again.samples.last().unwrap().x);
        assert!((0..3).all(|i| (a[i] - b[i]).abs() < 1e-6), "{a:?} {b:?}");
    }

    #[test]
    fn radial_balances() {
        let r = modified_bohr_radius(&st("hydrogen:1s")).unwrap();
        assert!((r - 1.5).abs() < 1e-6);
        let r = modified_bohr_radius(&st("hydrogen:1s:Z=2")).unwrap();
        assert!((r - 0.75).abs() < 1e-6);
        let c = pressure_force_crossover(&st("hydrogen:1s")).unwrap();
        assert!((c - (1.0 + 3f64.sqrt()) / 2.0).abs() < 1e-6);
        let c = pressure_force_crossover(&st("hydrogen:1s:Z=2")).unwrap();
        assert!((c - 0.6830127).abs() < 1e-6);
        let (_, p, _) = radial_forces(&st("hydrogen:1s"), 1.0).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert!(matches!(radial_root(|r| r * r + 1.0, 0.1, 5.0, 50), Err(QflowError::NoBracket { .. })));
        assert!(matches!(
            modified_bohr_radius(&st("hydrogen:2p1")),
            Err(QflowError::Unsupported(_))
        ));
    }

    #[test]
    fn modes_parse() {
        assert_eq!(Mode::parse("v").unwrap(), Mode::MadelungV);
        assert!(matches!(Mode::parse("cross:gradS").unwrap(), Mode::CrossOmega { .. }));
        assert!(Mode::parse("sideways").is_err());
    }
}
