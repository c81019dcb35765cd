//! Coulomb field `𝓔(r₁) = ∫2Q(r₁, r₂)(r₁ − r₂)/|r₁ − r₂|³ dr₂` and its
//! potential.
//!
//! Both reduce to linear functionals `K[φₖ*φₗ](r₁)` of orbital pair charges,
//! recombined with the `r₁`-dependent weights of `2Q`.

use super::ReducedState;
use crate::analytic_states::NODE_EPS_ABS;
use crate::crossflow::{cross, norm};
use crate::error::{QflowError, Result};
use crate::numerics::quadrature::gauss_legendre_on;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::str::FromStr;

/// Radius where the ray integral of `−𝓔` starts; beyond it `V_e` is the
/// Gauss-law tail `f(n − 1)/r`.
pub const BOUNDARY_RADIUS: f64 = 30.0;
/// Pair charges are treated as zero beyond this distance from the nucleus.
const CHARGE_RADIUS: f64 = 60.0;
/// Extent of the `r₁`-centred radial rule past the nucleus.
const CENTRED_REACH: f64 = 40.0;
const RADIAL_PER_PANEL: usize = 16;
const POLAR_PER_PANEL: usize = 10;
/// Geometric panels in the polar angle toward `θ = π`, where the nucleus sits.
const POLAR_LEVELS: i32 = 10;
const AZIMUTHAL_NODES: usize = 16;
const LINE_PER_PANEL: usize = 12;

/// How the `r₂` integrals are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldRoute {
    /// Shell theorem when every pair charge is spherical, centred otherwise.
    #[default]
    Auto,
    /// Enclosed charge of spherical pair charges (1D quadrature only).
    Shell,
    /// Spherical coordinates about `r₁`: the `s²` Jacobian cancels the `1/s²`
    /// kernel, so no ball around `r₁` is excluded.
    Centred,
}

impl FromStr for FieldRoute {
    type Err = QflowError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(FieldRoute::Auto),
            "shell" => Ok(FieldRoute::Shell),
            "centred" | "centered" => Ok(FieldRoute::Centred),
            _ => Err(QflowError::InvalidState(format!("unknown field route '{s}'"))),
        }
    }
}

/// `∮𝓔·dl` around three orthogonal circles about one centre.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Circulation {
    pub centre: [f64; 3],
    pub radius: f64,
    /// Loops in the `xy`, `yz` and `zx` planes.
    pub loops: [f64; 3],
    pub max_abs: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Circulation {
    /// Fails with [`QflowError::NonConservative`] above tolerance.
    pub fn check(self) -> Result<Circulation> {
        if self.pass {
            Ok(self)
        } else {
            Err(QflowError::NonConservative {
                circulation: self.max_abs,
                tolerance: self.tolerance,
            })
        }
    }
}

/// Gauss–Legendre nodes on the panels between consecutive breakpoints.
fn panel_rule(breaks: &[f64], per_panel: usize) -> Vec<(f64, f64)> {
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .flat_map(|w| {
            let (x, wt) = gauss_legendre_on(per_panel, w[0], w[1]);
            x.into_iter().zip(wt)
        })
        .collect()
}

/// Breakpoints splitting `[a, b]` into panels no longer than `max_len`.
fn uniform_breaks(a: f64, b: f64, max_len: f64) -> Vec<f64> {
    let k = ((b - a) / max_len).ceil().max(1.0) as usize;
    (0..=k).map(|i| a + (b - a) * i as f64 / k as f64).collect()
}

/// `a` plus offsets growing geometrically, capped at `b`.
fn graded_breaks(a: f64, b: f64, first: f64) -> Vec<f64> {
    let mut out = vec![a];
    let (mut x, mut step) = (a, first);
    while x + step < b {
        x += step;
        out.push(x);
        step *= 2.0;
    }
    out.push(b);
    out
}

/// Radii equal to within rounding share one table entry.
fn radial_key(r: f64) -> u64 {
    (r * RADIAL_KEY_SCALE).round() as u64
}

fn key_radius(key: u64) -> f64 {
    key as f64 / RADIAL_KEY_SCALE
}

const RADIAL_KEY_SCALE: f64 = 1.0e12;

type Moments<const D: usize> = Vec<[Complex64; D]>;

impl ReducedState {
    pub(super) fn resolve(&self, route: FieldRoute) -> Result<FieldRoute> {
        match route {
            FieldRoute::Auto if self.spherical => Ok(FieldRoute::Shell),
            FieldRoute::Auto => Ok(FieldRoute::Centred),
            FieldRoute::Shell if !self.spherical => Err(QflowError::Unsupported(
                "shell-theorem route needs spherical pair charges (s orbitals only)".into(),
            )),
            r => Ok(r),
        }
    }

    fn pair_count(&self) -> usize {
        let m = self.det.orbitals.len();
        m * m
    }

    /// `Σ_kernel` of `2Q(r₁, ·)` from the pair-charge moments `Aₖₗ = K[φₖ*φₗ]`.
    fn combine<const D: usize>(&self, r1: [f64; 3], moments: &Moments<D>) -> Result<[f64; D]> {
        let phi = self.orbital_values(r1)?;
        let rho = self.density_of(&phi);
        let rho_hat = self.mode_scale() * rho;
        if rho_hat <= NODE_EPS_ABS {
            return Err(QflowError::Node { x: r1, rho: rho_hat });
        }
        let m = phi.len();
        let pref = 2.0 * self.pair_norm * self.coupling() / rho_hat;
        let mut out = [0.0; D];
        for (d, slot) in out.iter_mut().enumerate() {
            let mut direct = Complex64::new(0.0, 0.0);
            let mut exch = Complex64::new(0.0, 0.0);
            for k in 0..m {
                direct += f64::from(self.det.occupancy[k]) * moments[k * m + k][d];
                for l in 0..m {
                    exch += self.exchange[k * m + l] * phi[k] * phi[l].conj() * moments[k * m + l][d];
                }
            }
            *slot = pref * (rho * direct - exch).re;
        }
        Ok(out)
    }

    /// Enclosed charge `4π∫₀ʳ s²q ds` and outer moment `4π∫ᵣ^∞ s q ds` of
    /// every pair charge, sampled along `+z`.
    fn shell_moments(&self, r: f64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let m = self.det.orbitals.len();
        let accumulate = |breaks: Vec<f64>, power: i32| -> Result<Vec<Complex64>> {
            let mut acc = vec![Complex64::new(0.0, 0.0); m * m];
            for (s, w) in panel_rule(&breaks, RADIAL_PER_PANEL) {
                let phi = self.orbital_values([0.0, 0.0, s])?;
                let ws = 4.0 * PI * w * s.powi(power);
                for k in 0..m {
                    for l in 0..m {
                        acc[k * m + l] += ws * phi[k].conj() * phi[l];
                    }
                }
            }
            Ok(acc)
        };
        let enc = if r > 0.0 {
            accumulate(uniform_breaks(0.0, r, 1.0), 2)?
        } else {
            vec![Complex64::new(0.0, 0.0); m * m]
        };
        let outer = if r < CHARGE_RADIUS {
            accumulate(uniform_breaks(r, CHARGE_RADIUS, 1.0), 1)?
        } else {
            vec![Complex64::new(0.0, 0.0); m * m]
        };
        Ok((enc, outer))
    }

    /// `Aₖₗ = ∫ds dΩ g(s, ω) φₖ*φₗ(r₁ + sω)` with the polar axis along `r̂₁`,
    /// so the nucleus lies on the `θ = π` edge of the rule.
    fn centred_moments<const D: usize, G>(&self, r1: [f64; 3], kernel: G) -> Result<Moments<D>>
    where
        G: Fn(f64, [f64; 3]) -> [f64; D] + Sync,
    {
        let r = norm(&r1);
        let e3 = if r > 0.0 { r1.map(|c| c / r) } else { [0.0, 0.0, 1.0] };
        let seed = if e3[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let c = cross(&e3, &seed);
        let e1 = c.map(|x| x / norm(&c));
        let e2 = cross(&e3, &e1);

        let mut s_breaks = if r > 0.0 { uniform_breaks(0.0, r, 2.0) } else { vec![0.0] };
        s_breaks.pop();
        s_breaks.extend(graded_breaks(r, r + CENTRED_REACH, 0.25));
        let s_rule = panel_rule(&s_breaks, RADIAL_PER_PANEL);
        // α = π − θ is the angle to the nucleus direction. In α the charge near
        // the nucleus is smooth; in cos θ it would carry a √(1 + cos θ) edge.
        let mut a_breaks: Vec<f64> = (1..=POLAR_LEVELS).rev().map(|k| PI * 0.5f64.powi(k)).collect();
        a_breaks.insert(0, 0.0);
        a_breaks.push(PI);
        let a_rule = panel_rule(&a_breaks, POLAR_PER_PANEL);
        let dphi = 2.0 * PI / AZIMUTHAL_NODES as f64;
        let dirs: Vec<([f64; 3], f64)> = a_rule
            .iter()
            .flat_map(|&(alpha, wa)| {
                let (sa, ca) = alpha.sin_cos();
                (0..AZIMUTHAL_NODES).map(move |j| {
                    let (sp, cp) = (dphi * (j as f64 + 0.5)).sin_cos();
                    let om = [0, 1, 2].map(|a| sa * cp * e1[a] + sa * sp * e2[a] - ca * e3[a]);
                    (om, wa * sa * dphi)
                })
            })
            .collect();

        let pairs = self.pair_count();
        let m = self.det.orbitals.len();
        let zero = vec![[Complex64::new(0.0, 0.0); D]; pairs];
        // Per-node partials are summed in node order so results do not depend
        // on the thread count.
        let partials = s_rule
            .par_iter()
            .map(|&(s, ws)| -> Result<Moments<D>> {
                let mut acc = zero.clone();
                for (om, wd) in &dirs {
                    let x = [0, 1, 2].map(|a| r1[a] + s * om[a]);
                    let phi = self.orbital_values(x)?;
                    let g = kernel(s, *om);
                    for k in 0..m {
                        for l in 0..m {
                            let q = phi[k].conj() * phi[l] * (ws * wd);
                            for d in 0..D {
                                acc[k * m + l][d] += q * g[d];
                            }
                        }
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(partials.into_iter().fold(zero, |mut a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                for d in 0..D {
                    x[d] += y[d];
                }
            }
            a
        }))
    }

    /// Quantum Coulomb field at `r₁`; identically zero without pair repulsion.
    pub fn coulomb_field(&self, r1: [f64; 3], route: FieldRoute) -> Result<[f64; 3]> {
        if self.coupling() == 0.0 {
            return Ok([0.0; 3]);
        }
        match self.resolve(route)? {
            FieldRoute::Centred => {
                let mo = self.centred_moments::<3, _>(r1, |_, om| om.map(|c| -c))?;
                self.combine(r1, &mo)
            }
            _ => {
                let r = norm(&r1);
                if r == 0.0 {
                    return Ok([0.0; 3]);
                }
                let (enc, _) = self.shell_moments(r)?;
                let mo: Moments<3> = enc.iter().map(|q| r1.map(|c| q * (c / (r * r * r)))).collect();
                self.combine(r1, &mo)
            }
        }
    }

    /// Direct potential `∫2Q(r₁, r₂)/|r₁ − r₂| dr₂`.
    pub fn hartree_potential(&self, r1: [f64; 3], route: FieldRoute) -> Result<f64> {
        if self.coupling() == 0.0 {
            return Ok(0.0);
        }
        match self.resolve(route)? {
            FieldRoute::Centred => {
                let mo = self.centred_moments::<1, _>(r1, |s, _| [s])?;
                Ok(self.combine(r1, &mo)?[0])
            }
            _ => {
                let r = norm(&r1);
                let (enc, outer) = self.shell_moments(r)?;
                let mo: Moments<1> = enc
                    .iter()
                    .zip(&outer)
                    .map(|(e, o)| [if r > 0.0 { e / r } else { Complex64::new(0.0, 0.0) } + o])
                    .collect();
                Ok(self.combine(r1, &mo)?[0])
            }
        }
    }

    /// `V_e(r₁) = f(n − 1)/R + ∫_{|r₁|}^{R} 𝓔·r̂ ds` along the ray through
    /// `r₁`, with `R` the boundary radius; `f(n − 1)/|r₁|` beyond it.
    pub fn coulomb_potential(&self, r1: [f64; 3], route: FieldRoute) -> Result<f64> {
        if self.coupling() == 0.0 {
            return Ok(0.0);
        }
        let route = self.resolve(route)?;
        let r = norm(&r1);
        let charge = self.field_factor() * (self.n - 1) as f64;
        if r >= BOUNDARY_RADIUS {
            return Ok(charge / r);
        }
        let dir = if r > 0.0 { r1.map(|c| c / r) } else { [0.0, 0.0, 1.0] };
        let mut line = 0.0;
        for (s, w) in panel_rule(&graded_breaks(r, BOUNDARY_RADIUS, 0.5), LINE_PER_PANEL) {
            let e = self.coulomb_field(dir.map(|c| c * s), route)?;
            line += w * (e[0] * dir[0] + e[1] * dir[1] + e[2] * dir[2]);
        }
        Ok(charge / BOUNDARY_RADIUS + line)
    }

    /// `V_e` at many points. Spherical states take the ray integral once per
    /// distinct radius; otherwise each point takes the direct form
    /// [`Self::hartree_potential`], which agrees with the ray integral
    /// wherever `𝓔` is conservative (see [`Self::circulation`]).
    pub fn potential_on(&self, nodes: &[[f64; 3]], route: FieldRoute) -> Result<Vec<f64>> {
        if self.coupling() == 0.0 {
            return Ok(vec![0.0; nodes.len()]);
        }
        if self.resolve(route)? == FieldRoute::Centred {
            return nodes.iter().map(|x| self.hartree_potential(*x, route)).collect();
        }
        let radial = self.radial_table(nodes, |r| self.coulomb_potential([0.0, 0.0, r], route))?;
        Ok(nodes.iter().map(|x| radial[&radial_key(norm(x))]).collect())
    }

    /// [`Self::coulomb_field`] at many points, per distinct radius when spherical.
    pub fn field_on(&self, nodes: &[[f64; 3]], route: FieldRoute) -> Result<Vec<[f64; 3]>> {
        if self.coupling() == 0.0 {
            return Ok(vec![[0.0; 3]; nodes.len()]);
        }
        if self.resolve(route)? == FieldRoute::Centred {
            return nodes.iter().map(|x| self.coulomb_field(*x, route)).collect();
        }
        let radial = self.radial_table(nodes, |r| Ok(self.coulomb_field([0.0, 0.0, r], route)?[2]))?;
        Ok(nodes
            .iter()
            .map(|x| {
                let r = norm(x);
                let er = radial[&radial_key(r)];
                if r > 0.0 {
                    x.map(|c| er * c / r)
                } else {
                    [0.0; 3]
                }
            })
            .collect())
    }

    fn radial_table<F>(&self, nodes: &[[f64; 3]], f: F) -> Result<BTreeMap<u64, f64>>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let mut keys: Vec<u64> = nodes.iter().map(|x| radial_key(norm(x))).collect();
        keys.sort_unstable();
        keys.dedup();
        keys.par_iter()
            .map(|&k| Ok((k, f(key_radius(k))?)))
            .collect()
    }

    /// `∮𝓔·dl` around the circles of the given radius about `centre` in the
    /// three coordinate planes (periodic trapezoid rule, `m` nodes).
    pub fn circulation(
        &self,
        centre: [f64; 3],
        radius: f64,
        m: usize,
        route: FieldRoute,
        tolerance: f64,
    ) -> Result<Circulation> {
        let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let mut loops = [0.0; 3];
        for (p, slot) in loops.iter_mut().enumerate() {
            let (a, b) = (axes[p], axes[(p + 1) % 3]);
            let dt = 2.0 * PI / m as f64;
            let mut pts = Vec::with_capacity(m);
            let mut tangents = Vec::with_capacity(m);
            for j in 0..m {
                let (st, ct) = (dt * j as f64).sin_cos();
                pts.push([0, 1, 2].map(|i| centre[i] + radius * (ct * a[i] + st * b[i])));
                tangents.push([0, 1, 2].map(|i| radius * (-st * a[i] + ct * b[i])));
            }
            let field = self.field_on(&pts, route)?;
            *slot = field
                .iter()
                .zip(&tangents)
                .map(|(e, t)| dt * (e[0] * t[0] + e[1] * t[1] + e[2] * t[2]))
                .sum();
        }
        let max_abs = loops.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        Ok(Circulation {
            centre,
            radius,
            loops,
            max_abs,
            tolerance,
            pass: max_abs <= tolerance,
        })
    }
}
