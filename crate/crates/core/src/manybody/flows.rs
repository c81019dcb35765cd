//! Orbital-flow equations, the reduced Euler balance and the energy
//! functional of a determinant.

use super::{FieldRoute, Normalization, ReducedState};
use crate::analytic_states::{node_floor, QuantumState, NODE_EPS_ABS};
use crate::crossflow::norm;
use crate::error::{QflowError, Result};
use crate::numerics::grid::map_nodes;
use crate::numerics::quadrature::pairwise_sum;
use crate::numerics::{Cx, Grid, Jet2, Jet3, ResidualReport, Sample, Scalar};
use crate::units::{MASS, ZETA, ZETA0};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Probes at which the two-body spoiler integral is evaluated.
const SPOILER_PROBES: usize = 24;

/// Rayleigh quotient of one orbital under `−½∇² + V + V_e`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitalEnergy {
    pub orbital: String,
    pub norm: f64,
    /// `−½∫ψ*∇²ψ`.
    pub kinetic: f64,
    /// `∫½ρ(u² + v²)` from the orbital's own flow velocities.
    pub kinetic_flow: f64,
    pub external: f64,
    /// `∫V_e|ψ|²`.
    pub coulomb: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitalRecord {
    pub state: String,
    pub energies: Vec<OrbitalEnergy>,
    pub reports: Vec<ResidualReport>,
}

/// Two-body reduction defect of the momentum flux, `n ∫[½ρ∇₁u₁² +
/// ∇₁·(ρu₁)u₁] dr₂ − [½ρ̂∇û² + ∇·(ρ̂û)û]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Spoiler {
    pub probes: usize,
    pub skipped: usize,
    pub max_defect: f64,
    /// Largest reduced flux term over the probes.
    pub scale: f64,
    pub rel: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReducedEulerRecord {
    pub report: ResidualReport,
    /// Only two-electron states admit the `r₂` integral at desk scale.
    pub spoiler: Option<Spoiler>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub state: String,
    pub electrons: usize,
    pub pair_norm: f64,
    pub field_factor: f64,
    /// `−½∫∇₁²ρ₁(r₁, r₂)|_{r₂ = r₁}`.
    pub kinetic: f64,
    /// `Σ occₖ∫½ρₖ(uₖ² + vₖ²)`.
    pub kinetic_flow: f64,
    /// `∫Vρ̂`.
    pub external: f64,
    /// `∫V_e ρ̂ = 2∫∫ρ₂/r₁₂`.
    pub coulomb_doubled: f64,
    /// `½∫∫ρ₂⁰/r₁₂` with `ρ₂⁰ = ρ₂/c` normalized to `n(n − 1)`.
    pub interaction: f64,
    pub total: f64,
    pub orbitals: Vec<OrbitalEnergy>,
    /// `Σ occₖ εₖ`.
    pub orbital_sum: f64,
    /// `Σ occₖ εₖ − ½∫V_e ρ̂`; equals `total` when `n = 2`.
    pub double_counting: f64,
}

/// Everything the orbital equations need at one point.
struct OrbitalLocal {
    rho: f64,
    psi: Complex64,
    lap_psi: Complex64,
    ke_u: f64,
    ke_v: f64,
    p: f64,
    div_j: f64,
    /// `½ρ∇(u² + v²)`.
    flux_w2: [f64; 3],
    grad_p: [f64; 3],
    /// `∇·(ρu) u`.
    flux_u: [f64; 3],
}

fn orbital_local(o: &QuantumState, x: [f64; 3]) -> Result<OrbitalLocal> {
    let psi: Cx<Jet3> = o.psi_taylor(x, 0.0)?;
    let rho = psi.norm_sqr();
    let r = rho.value();
    if r <= NODE_EPS_ABS {
        return Err(QflowError::Node { x, rho: r });
    }
    let inv = rho.recip();
    let u = rho.grad().map(|g| g * inv * -ZETA);
    let j = [0, 1, 2].map(|a| (psi.re * psi.im.d(a) - psi.im * psi.re.d(a)) / MASS);
    let v = j.map(|c| c * inv);
    let u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let w2 = u2 + v2;
    let lap = rho.lap();
    let p = lap * (-ZETA * ZETA0);
    let div_rho_u = -ZETA * lap.value();
    Ok(OrbitalLocal {
        rho: r,
        psi: psi.to_c64_value(),
        lap_psi: Complex64::new(psi.re.lap().value(), psi.im.lap().value()),
        ke_u: 0.5 * MASS * r * u2.value(),
        ke_v: 0.5 * MASS * r * v2.value(),
        p: p.value(),
        div_j: (0..3).map(|a| j[a].d(a).value()).sum(),
        flux_w2: [0, 1, 2].map(|a| 0.5 * MASS * r * w2.d(a).value()),
        grad_p: [0, 1, 2].map(|a| p.d(a).value()),
        flux_u: u.map(|c| MASS * div_rho_u * c.value()),
    })
}

trait ValueC64 {
    fn to_c64_value(&self) -> Complex64;
}

impl<T: Scalar> ValueC64 for Cx<T> {
    fn to_c64_value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

fn vnorm(a: &[f64; 3]) -> f64 {
    norm(a)
}

/// Rayleigh quotient and kinetic forms of one orbital. `V_e` is integrated on
/// the orbital's reference grid when spherical; otherwise the direct form is
/// used on a coarse product grid.
fn orbital_energy(r: &ReducedState, o: &QuantumState, route: FieldRoute) -> Result<OrbitalEnergy> {
    let pot = r.det.potential;
    let grid = o.reference_grid();
    let vals = map_nodes(&grid, |x| {
        let psi: Cx<Jet2> = o.psi_taylor(x, 0.0)?;
        let rho = psi.norm_sqr();
        let rv = rho.value();
        if rv <= NODE_EPS_ABS {
            return Err(QflowError::Node { x, rho: rv });
        }
        let lap = Complex64::new(psi.re.lap().value(), psi.im.lap().value());
        let ke_lap = -0.5 / MASS * (psi.to_c64_value().conj() * lap).re;
        let grad = rho.grad().map(|g| g.value());
        let j = [0, 1, 2].map(|a| (psi.re * psi.im.d(a) - psi.im * psi.re.d(a)).value() / MASS);
        let u2: f64 = grad.iter().map(|g| (ZETA * g / rv).powi(2)).sum();
        let v2: f64 = j.iter().map(|c| (c / rv).powi(2)).sum();
        Ok([rv, ke_lap, 0.5 * MASS * rv * (u2 + v2), pot.eval(&x) * rv])
    })?;
    let sum = |k: usize| {
        let terms: Vec<f64> = vals
            .iter()
            .zip(&grid.weights)
            .map(|(v, w)| v.map_or(0.0, |v| v[k] * w))
            .collect();
        pairwise_sum(&terms)
    };
    let (nrm, kinetic, kinetic_flow, external) = (sum(0), sum(1), sum(2), sum(3));
    let coulomb = if r.coupling() == 0.0 {
        0.0
    } else {
        let cgrid = if r.resolve(route)? == FieldRoute::Shell {
            grid
        } else {
            Grid::spherical(0.0, 15.0, 12, 6, 6)?
        };
        let ve = r.potential_on(&cgrid.nodes, route)?;
        let terms: Vec<f64> = cgrid
            .nodes
            .iter()
            .zip(&cgrid.weights)
            .zip(&ve)
            .map(|((x, w), v)| Ok(w * v * o.psi(*x, 0.0)?.norm_sqr()))
            .collect::<Result<_>>()?;
        pairwise_sum(&terms)
    };
    Ok(OrbitalEnergy {
        orbital: o.label(),
        norm: nrm,
        kinetic,
        kinetic_flow,
        external,
        coulomb,
        epsilon: (kinetic + external + coulomb) / nrm,
    })
}

/// Energy functional with `ρ̂` normalized to `n` and the default route.
pub fn energy_functional(state: &QuantumState) -> Result<EnergyRecord> {
    energy_functional_with(&ReducedState::new(state, Normalization::N)?, FieldRoute::Auto)
}

pub fn energy_functional_with(reduced: &ReducedState, route: FieldRoute) -> Result<EnergyRecord> {
    let r = reduced.with_mode(Normalization::N);
    let orbitals: Vec<OrbitalEnergy> = r
        .det
        .orbitals
        .iter()
        .map(|o| orbital_energy(&r, o, route))
        .collect::<Result<_>>()?;
    let occ: Vec<f64> = r.det.occupancy.iter().map(|o| f64::from(*o)).collect();
    let weighted = |f: &dyn Fn(&OrbitalEnergy) -> f64| -> f64 { orbitals.iter().zip(&occ).map(|(e, o)| o * f(e)).sum() };
    let kinetic = weighted(&|e| e.kinetic);
    let kinetic_flow = weighted(&|e| e.kinetic_flow);
    let external = weighted(&|e| e.external);
    let coulomb_doubled = weighted(&|e| e.coulomb);
    let orbital_sum = weighted(&|e| e.epsilon);
    let interaction = if r.coupling() == 0.0 {
        0.0
    } else {
        coulomb_doubled / (4.0 * r.pair_norm)
    };
    let total = kinetic + external + interaction;
    Ok(EnergyRecord {
        state: r.label.clone(),
        electrons: r.n,
        pair_norm: r.pair_norm,
        field_factor: r.field_factor(),
        kinetic,
        kinetic_flow,
        external,
        coulomb_doubled,
        interaction,
        total,
        orbitals,
        orbital_sum,
        double_counting: orbital_sum - 0.5 * coulomb_doubled,
    })
}

/// Residuals of `−½∇²ψ + (V + V_e)ψ = εψ` and of the orbital energy,
/// continuity and Euler equations in the potential `V + V_e`, for each
/// candidate orbital with `ε` from its Rayleigh quotient. `∇V_e = −𝓔`.
pub fn orbital_residual(
    reduced: &ReducedState,
    orbitals: &[QuantumState],
    grid: &Grid,
    route: FieldRoute,
    tol: f64,
) -> Result<OrbitalRecord> {
    let r = reduced.with_mode(Normalization::N);
    if orbitals.iter().any(|o| !o.is_one_body() || o.is_1d()) {
        return Err(QflowError::InvalidState("candidate orbitals must be 3D one-body states".into()));
    }
    let pot = r.det.potential;
    let ve = r.potential_on(&grid.nodes, route)?;
    let field = r.field_on(&grid.nodes, route)?;
    let mut energies = Vec::new();
    let mut reports = Vec::new();
    for (k, o) in orbitals.iter().enumerate() {
        let e = orbital_energy(&r, o, route)?;
        let eps = e.epsilon;
        let floor = node_floor(o, grid, 0.0);
        let mut s = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
        let mut skipped = 0;
        for (i, x) in grid.nodes.iter().enumerate() {
            let loc = match orbital_local(o, *x) {
                Ok(l) if l.rho > floor && !pot.is_singular_at(x) => l,
                Ok(_) | Err(QflowError::Node { .. }) | Err(QflowError::CoulombSingularity) => {
                    skipped += 1;
                    continue;
                }
                Err(err) => return Err(err),
            };
            let w = grid.weights[i];
            let v = pot.eval(x);
            let gv = pot.grad(x);
            let kin = -0.5 / MASS * loc.lap_psi;
            let res = kin + (v + ve[i] - eps) * loc.psi;
            s[0].push(Sample::new(
                w,
                res.norm(),
                &[kin.norm(), (v * loc.psi).norm(), (ve[i] * loc.psi).norm(), (eps * loc.psi).norm()],
            ));
            let terms = [loc.ke_u, loc.ke_v, loc.p, (v + ve[i]) * loc.rho, eps * loc.rho];
            s[1].push(Sample::new(w, terms[0] + terms[1] + terms[2] + terms[3] - terms[4], &terms));
            s[2].push(Sample::new(w, loc.div_j, &[loc.div_j, loc.rho * eps]));
            let ext = [0, 1, 2].map(|a| loc.rho * gv[a]);
            let coul = field[i].map(|c| -loc.rho * c);
            let sum = [0, 1, 2].map(|a| loc.flux_w2[a] + loc.grad_p[a] + loc.flux_u[a] + ext[a] + coul[a]);
            s[3].push(Sample::new(
                w,
                vnorm(&sum),
                &[vnorm(&loc.flux_w2), vnorm(&loc.grad_p), vnorm(&loc.flux_u), vnorm(&ext), vnorm(&coul)],
            ));
        }
        let names = [
            ("schrodinger", "-½∇²ψ + (V + V_e)ψ = εψ"),
            ("energy", "½ρu² + ½ρv² + P + (V + V_e)ρ = ερ"),
            ("continuity", "∂ρ + ∇·(ρv) = 0"),
            ("euler", "½ρ∇(u² + v²) + ∇P + ∇·(ρu)u + ρ∇V − ρ𝓔 = 0"),
        ];
        for ((name, anchor), samples) in names.iter().zip(&s) {
            reports.push(ResidualReport::from_samples(
                &format!("orbital.{k}.{name}"),
                anchor,
                tol,
                samples,
                skipped,
            ));
        }
        energies.push(e);
    }
    Ok(OrbitalRecord {
        state: r.label.clone(),
        energies,
        reports,
    })
}

/// Stationary reduced force balance `½ρ̂∇(û² + v̂²) + ∇·(ρ̂û)û + ∇P̂ + ρ̂∇V −
/// ρ̂𝓔 = 0` over `grid`, plus the spoiler diagnostic for two electrons.
pub fn reduced_euler_residual(
    reduced: &ReducedState,
    grid: &Grid,
    route: FieldRoute,
    tol: f64,
) -> Result<ReducedEulerRecord> {
    if !reduced.det.orbitals.iter().all(|o| o.is_stationary()) {
        return Err(QflowError::Unsupported("reduced Euler balance needs stationary orbitals".into()));
    }
    let pot = reduced.det.potential;
    let field = reduced.field_on(&grid.nodes, route)?;
    let mut samples = Vec::new();
    let mut skipped = 0;
    for (i, x) in grid.nodes.iter().enumerate() {
        if pot.is_singular_at(x) {
            skipped += 1;
            continue;
        }
        let (rho, j) = reduced.density_jets::<35>(*x)?;
        let r = rho.value();
        if r <= NODE_EPS_ABS {
            skipped += 1;
            continue;
        }
        let inv = rho.recip();
        let u = rho.grad().map(|g| g * inv * -ZETA);
        let v = j.map(|c| c * inv);
        let w2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        let lap = rho.lap();
        let p = lap * (-ZETA * ZETA0);
        let flux_w2 = [0, 1, 2].map(|a| 0.5 * MASS * r * w2.d(a).value());
        let flux_u = u.map(|c| -MASS * ZETA * lap.value() * c.value());
        let grad_p = [0, 1, 2].map(|a| p.d(a).value());
        let gv = pot.grad(x);
        let ext = gv.map(|g| r * g);
        let coul = field[i].map(|c| -r * c);
        let sum = [0, 1, 2].map(|a| flux_w2[a] + flux_u[a] + grad_p[a] + ext[a] + coul[a]);
        samples.push(Sample::new(
            grid.weights[i],
            vnorm(&sum),
            &[vnorm(&flux_w2), vnorm(&flux_u), vnorm(&grad_p), vnorm(&ext), vnorm(&coul)],
        ));
    }
    let report = ResidualReport::from_samples(
        "manybody.reduced_euler",
        "½ρ̂∇(û² + v̂²) + ∇·(ρ̂û)û + ∇P̂ + ρ̂∇V − ρ̂𝓔 = 0",
        tol,
        &samples,
        skipped,
    );
    let spoiler = if reduced.n == 2 {
        Some(spoiler(reduced, grid)?)
    } else {
        None
    };
    Ok(ReducedEulerRecord { report, spoiler })
}

/// Two-electron density `ρ(r₁, r₂) = ρ₂⁰/2` (normalized to one) as a jet in
/// `r₁`, integrated against `r₂` on a fixed inner rule.
pub(super) struct TwoBody<'a> {
    reduced: &'a ReducedState,
    inner: Grid,
    /// `φₖ*φₗ(r₂)` per inner node, row-major in `(k, l)`.
    pairs: Vec<Vec<Complex64>>,
    density: Vec<f64>,
}

impl<'a> TwoBody<'a> {
    pub(super) fn new(reduced: &'a ReducedState) -> Result<TwoBody<'a>> {
        if reduced.n != 2 {
            return Err(QflowError::Unsupported("two-body integrals need exactly two electrons".into()));
        }
        let inner = Grid::spherical(0.0, 30.0, 48, 12, 12)?;
        let mut pairs = Vec::with_capacity(inner.len());
        let mut density = Vec::with_capacity(inner.len());
        for x in &inner.nodes {
            let phi = reduced.orbital_values(*x)?;
            density.push(reduced.density_of(&phi));
            pairs.push(phi.iter().flat_map(|a| phi.iter().map(move |b| a.conj() * b)).collect());
        }
        Ok(TwoBody {
            reduced,
            inner,
            pairs,
            density,
        })
    }

    /// `∫f(ρ(r₁, ·)) dr₂`, skipping inner nodes where `ρ` vanishes.
    pub(super) fn integrate<F>(&self, x1: [f64; 3], f: F) -> Result<([f64; 3], usize)>
    where
        F: Fn(&Jet2) -> [f64; 3],
    {
        let r = self.reduced;
        let phi: Vec<Cx<Jet2>> = r
            .det
            .orbitals
            .iter()
            .map(|o| o.psi_taylor(x1, 0.0))
            .collect::<Result<_>>()?;
        let m = phi.len();
        let mut rho1 = Jet2::constant(0.0);
        for (p, o) in phi.iter().zip(&r.det.occupancy) {
            rho1 = rho1 + p.norm_sqr() * f64::from(*o);
        }
        // φₖ(r₁)φₗ*(r₁) weighted by wₖₗ.
        let outer: Vec<Cx<Jet2>> = (0..m * m)
            .map(|kl| {
                let (a, b) = (phi[kl / m], phi[kl % m]);
                let w = r.exchange[kl];
                Cx::new((a.re * b.re + a.im * b.im) * w, (a.im * b.re - a.re * b.im) * w)
            })
            .collect();
        let mut acc = [0.0; 3];
        let mut skipped = 0;
        for (i, w2) in self.inner.weights.iter().enumerate() {
            let mut raw = rho1 * self.density[i];
            for (o, q) in outer.iter().zip(&self.pairs[i]) {
                raw = raw - (o.re * q.re - o.im * q.im);
            }
            let rho = raw * 0.5;
            if rho.value() <= NODE_EPS_ABS {
                skipped += 1;
                continue;
            }
            let v = f(&rho);
            for a in 0..3 {
                acc[a] += w2 * v[a];
            }
        }
        Ok((acc, skipped))
    }
}

/// `½ρ∇(u²) + ∇·(ρu)u` of a density jet with `u = −ζ∇ρ/ρ`.
fn u_flux(rho: &Jet2) -> [f64; 3] {
    let inv = rho.recip();
    let u = rho.grad().map(|g| g * inv * -ZETA);
    let u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    let div = -ZETA * rho.lap().value();
    [0, 1, 2].map(|a| MASS * (0.5 * rho.value() * u2.d(a).value() + div * u[a].value()))
}

fn spoiler(reduced: &ReducedState, grid: &Grid) -> Result<Spoiler> {
    let two = TwoBody::new(reduced)?;
    let stride = (grid.len() / SPOILER_PROBES).max(1);
    let n = reduced.n as f64 * reduced.mode_scale();
    let (mut max_defect, mut scale) = (0.0f64, 0.0f64);
    let (mut probes, mut skipped) = (0, 0);
    for x in grid.nodes.iter().step_by(stride) {
        if reduced.det.potential.is_singular_at(x) {
            skipped += 1;
            continue;
        }
        let (rho_hat, _) = reduced.density_jets::<15>(*x)?;
        if rho_hat.value() <= NODE_EPS_ABS {
            skipped += 1;
            continue;
        }
        let (full, _) = two.integrate(*x, u_flux)?;
        let red = u_flux(&rho_hat);
        let inv = rho_hat.recip();
        let u = rho_hat.grad().map(|g| (g * inv * -ZETA).value());
        let flux_u = u.map(|c| -MASS * ZETA * rho_hat.lap().value() * c);
        let flux_w2 = [0, 1, 2].map(|a| red[a] - flux_u[a]);
        let defect = [0, 1, 2].map(|a| n * full[a] - red[a]);
        max_defect = max_defect.max(vnorm(&defect));
        scale = scale.max(vnorm(&flux_u)).max(vnorm(&flux_w2));
        probes += 1;
    }
    Ok(Spoiler {
        probes,
        skipped,
        max_defect,
        scale,
        rel: if max_defect == 0.0 { 0.0 } else { max_defect / scale },
    })
}
