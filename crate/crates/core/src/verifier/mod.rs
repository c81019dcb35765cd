//! Residual suites for the fluid equations obeyed by a solution of the
//! Schrödinger equation.
//!
//! Each suite samples a [`LocalFlow`] per grid node and reduces one equation
//! to a [`ResidualReport`]. Relative norms divide by the largest additive term
//! of the equation or by a reference magnitude built from `ρ`, `E` and `∇U`,
//! so stationary states, whose time-derivative terms are pure rounding, are
//! not compared against noise.

mod local;

pub use local::{local_flow, LocalFlow, Route};

use crate::analytic_states::{node_floor_for, QuantumState};
use crate::error::{QflowError, Result};
use crate::field_engine::field_bundle_with;
use crate::numerics::grid::{check_skipped, map_nodes};
use crate::numerics::quadrature::pairwise_sum;
use crate::numerics::{Grid, ResidualReport, Sample, Tolerances};
use crate::units::{ZETA, ZETA0};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyForm {
    TwoVelocity,
    SingleVelocity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EulerVariant {
    Euler0,
    Euler1,
    Euler3,
    Full0000,
}

impl EulerVariant {
    pub const ALL: [EulerVariant; 4] = [
        EulerVariant::Euler0,
        EulerVariant::Euler1,
        EulerVariant::Euler3,
        EulerVariant::Full0000,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Continuity,
    Energy,
    Euler,
    Momentum,
    Conservation,
    Bohmian,
    Orthogonality,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Suite, String> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown suite '{s}'"))
    }
}

/// Deliberate damage applied to sampled flows; used to show that the suites
/// reject non-solutions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowCorruption {
    /// Multiplies `∂ρ` and every time derivative linear in it.
    pub dt_rho_factor: f64,
    /// Replaces `Q` by `½u²`, dropping `P/ρ`.
    pub drop_pressure_in_q: bool,
}

impl Default for FlowCorruption {
    fn default() -> Self {
        FlowCorruption {
            dt_rho_factor: 1.0,
            drop_pressure_in_q: false,
        }
    }
}

impl FlowCorruption {
    fn apply(&self, l: &mut LocalFlow) {
        let c = self.dt_rho_factor;
        if c != 1.0 {
            l.dt_rho *= c;
            l.fp.f *= c;
            l.dt_u = l.dt_u.map(|x| x * c);
            l.dt_rho_u = l.dt_rho_u.map(|x| x * c);
            l.dt_p_first *= c;
            l.dt_theta *= c;
        }
        if self.drop_pressure_in_q {
            l.fp.q = l.fp.ke_u / l.rho;
        }
    }
}

/// Suite runner: tolerances, derivative route and optional corruption.
#[derive(Clone, Debug)]
pub struct Verifier {
    pub tol: Tolerances,
    pub route: Route,
    pub corruption: FlowCorruption,
}

impl Default for Verifier {
    fn default() -> Self {
        Verifier::new(Tolerances::from_env())
    }
}

/// Sampled flows and the number of skipped nodes.
pub struct Samples {
    pub flows: Vec<LocalFlow>,
    pub skipped: usize,
}

/// Reference magnitude of the momentum balances relative to `|E|`-scaled
/// fields.
pub const RATE_FLOOR: f64 = 1e-4;

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    a.map(|x| x * s)
}

fn sum(vs: &[[f64; 3]]) -> [f64; 3] {
    let mut o = [0.0; 3];
    for v in vs {
        for k in 0..3 {
            o[k] += v[k];
        }
    }
    o
}

/// Vector equation: residual norm of `Σ terms` plus the term norms.
fn vector_sample(weight: f64, terms: &[[f64; 3]], reference: f64) -> Sample {
    let mut mags: Vec<f64> = terms.iter().map(|t| norm(*t)).collect();
    mags.push(reference);
    Sample::new(weight, norm(sum(terms)), &mags)
}

/// Scalar equation `Σ terms = 0`.
fn scalar_sample(weight: f64, terms: &[f64], reference: f64) -> Sample {
    let mut mags = terms.to_vec();
    mags.push(reference);
    Sample::new(weight, terms.iter().sum(), &mags)
}

impl Verifier {
    pub fn new(tol: Tolerances) -> Verifier {
        Verifier {
            tol,
            route: Route::Jets,
            corruption: FlowCorruption::default(),
        }
    }

    pub fn with_route(mut self, route: Route) -> Verifier {
        self.route = route;
        self
    }

    pub fn with_corruption(mut self, corruption: FlowCorruption) -> Verifier {
        self.corruption = corruption;
        self
    }

    fn pick(&self, analytic: f64, numerical: f64) -> f64 {
        if self.route.is_numerical() {
            numerical
        } else {
            analytic
        }
    }

    pub fn sample(&self, state: &QuantumState, grid: &Grid, t: f64) -> Result<Samples> {
        if !state.is_one_body() {
            return Err(QflowError::Unsupported("residual suites need a one-body state".into()));
        }
        if grid.is_empty() {
            return Err(QflowError::DegenerateGrid { skipped: 0, total: 0 });
        }
        let floor = node_floor_for(state, grid, t, self.route.jet_method());
        let vals = map_nodes(grid, |x| local_flow(state, x, t, self.route, floor))?;
        let skipped = vals.iter().filter(|v| v.is_none()).count();
        check_skipped(skipped, grid.len())?;
        let flows = vals
            .into_iter()
            .zip(&grid.weights)
            .filter_map(|(v, w)| {
                v.map(|mut l| {
                    l.weight = *w;
                    self.corruption.apply(&mut l);
                    l
                })
            })
            .collect();
        Ok(Samples { flows, skipped })
    }

    fn report<F: Fn(&LocalFlow) -> Sample>(&self, name: &str, anchor: &str, tol: f64, s: &Samples, f: F) -> ResidualReport {
        let samples: Vec<Sample> = s.flows.iter().map(f).collect();
        ResidualReport::from_samples(name, anchor, tol, &samples, s.skipped)
    }

    pub fn continuity_six(&self, state: &QuantumState, grid: &Grid, t: f64) -> Result<Vec<ResidualReport>> {
        let s = self.sample(state, grid, t)?;
        Ok(self.continuity_from(&s))
    }

    fn continuity_from(&self, s: &Samples) -> Vec<ResidualReport> {
        let tol = self.tol.continuity;
        let half = |l: &LocalFlow| ZETA0 * l.rho * l.fp.e.abs();
        let full = |l: &LocalFlow| l.rho * l.fp.e.abs();
        vec![
            self.report("continuity.1", "p = ζ₀∂ρ", tol, s, |l| {
                scalar_sample(l.weight, &[l.fp.p_second, -ZETA0 * l.dt_rho], half(l))
            }),
            self.report("continuity.2", "∂ρ + ∇·(ρv) = 0", tol, s, |l| {
                scalar_sample(l.weight, &[l.dt_rho, l.div_rho_grad_s], full(l))
            }),
            self.report("continuity.3", "Fρ = p", tol, s, |l| {
                scalar_sample(l.weight, &[l.fp.f * l.rho, -l.fp.p_second], half(l))
            }),
            self.report("continuity.4", "Im(iħΨ*∂Ψ − Ψ*ĤΨ) = 0", tol, s, |l| {
                scalar_sample(l.weight, &[l.re_psi_dt_psi, -l.psi_h_psi.im], half(l))
            }),
            self.report("continuity.5", "∂ρ + ∇·j = 0", tol, s, |l| {
                scalar_sample(l.weight, &[l.dt_rho, l.div_j], full(l))
            }),
            self.report("continuity.6", "ħRe(Ψ*∂Ψ) + (ħ/2m)Re∇·(Ψ*P̂Ψ) = 0", tol, s, |l| {
                scalar_sample(l.weight, &[l.re_psi_dt_psi, 0.5 * l.re_div_psi_p_psi], half(l))
            }),
        ]
    }

    pub fn energy_equation_residual(
        &self,
        state: &QuantumState,
        grid: &Grid,
        t: f64,
        form: EnergyForm,
    ) -> Result<ResidualReport> {
        let s = self.sample(state, grid, t)?;
        Ok(self.energy_from(&s, form))
    }

    fn energy_from(&self, s: &Samples, form: EnergyForm) -> ResidualReport {
        let tol = self.pick(self.tol.energy_equation, self.tol.energy_equation_fd);
        match form {
            EnergyForm::TwoVelocity => self.report(
                "energy.two_velocity",
                "Eρ = ½ρu² + ½ρv² + P + Uρ",
                tol,
                s,
                |l| {
                    let f = &l.fp;
                    scalar_sample(
                        l.weight,
                        &[f.e * l.rho, -f.ke_u, -f.ke_v, -f.p_first, -l.u_pot * l.rho],
                        0.0,
                    )
                },
            ),
            EnergyForm::SingleVelocity => self.report(
                "energy.single_velocity",
                "Ēρ = ½ρw² + P − η∇·v + Uρ",
                tol,
                s,
                |l| {
                    let f = &l.fp;
                    scalar_sample(
                        l.weight,
                        &[
                            f.ebar * l.rho,
                            -0.5 * l.rho * dot(&f.w, &f.w),
                            -f.p_first,
                            f.eta * l.div_v,
                            -l.u_pot * l.rho,
                        ],
                        0.0,
                    )
                },
            ),
        }
    }

    /// Unweighted mean and standard deviation of `E` over the evaluated nodes.
    pub fn energy_field_stats(&self, state: &QuantumState, grid: &Grid, t: f64) -> Result<EnergyStats> {
        let b = field_bundle_with(state, grid, t, self.route.jet_method())?;
        let es: Vec<f64> = b.iter().map(|(_, _, _, f)| f.e).collect();
        let n = es.len() as f64;
        let mean = pairwise_sum(&es) / n;
        let dev: Vec<f64> = es.iter().map(|e| (e - mean) * (e - mean)).collect();
        Ok(EnergyStats {
            mean,
            std: (pairwise_sum(&dev) / n).sqrt(),
            samples: es.len(),
            skipped: b.skipped,
        })
    }

    pub fn euler_residual(&self, state: &QuantumState, grid: &Grid, t: f64, variant: EulerVariant) -> Result<ResidualReport> {
        let s = self.sample(state, grid, t)?;
        Ok(self.euler_from(&s, variant))
    }

    fn euler_from(&self, s: &Samples, variant: EulerVariant) -> ResidualReport {
        let tol = self.tol.euler;
        let (name, anchor) = match variant {
            EulerVariant::Euler0 => ("euler.euler0", "ρ∂v + ½ρ∇(u²+v²) + ∇P + ∇·(ρu)u + ρ∇U = 0"),
            EulerVariant::Euler1 => ("euler.euler1", "ρ∂w + ½ρ∇w² + ∇P + ρ∇U + ∇·(ρu)u − η∇(∇·v) = 0"),
            EulerVariant::Euler3 => ("euler.euler3", "∂(ρu) + ρ∂v + ½ρ∇(u²+v²) + ∇(P+p) + ∇·(ρu)u + ρ∇U = 0"),
            EulerVariant::Full0000 => (
                "euler.full0000",
                "ρ∂w + ½ρ∇w² + ∇·(ρu)w + ∇P + ρ∇U − ∇(η∇·v) = ζ⁻¹[(u·v)ρu + Pv − pu]",
            ),
        };
        self.report(name, anchor, tol, s, |l| {
            let f = &l.fp;
            let rho = l.rho;
            let force = scale(l.grad_u_pot, rho);
            let reference = norm(force);
            let dt_w = sum(&[l.dt_u, l.dt_v]);
            let terms: Vec<[f64; 3]> = match variant {
                EulerVariant::Euler0 => vec![
                    scale(l.dt_v, rho),
                    scale(sum(&[l.grad_u2, l.grad_v2]), 0.5 * rho),
                    l.grad_p_first,
                    scale(f.u, l.div_rho_u),
                    force,
                ],
                EulerVariant::Euler1 => vec![
                    scale(dt_w, rho),
                    scale(l.grad_w2, 0.5 * rho),
                    l.grad_p_first,
                    force,
                    scale(f.u, l.div_rho_u),
                    scale(l.grad_div_v, -f.eta),
                ],
                EulerVariant::Euler3 => vec![
                    l.dt_rho_u,
                    scale(l.dt_v, rho),
                    scale(sum(&[l.grad_u2, l.grad_v2]), 0.5 * rho),
                    l.grad_p_first,
                    l.grad_p_second,
                    scale(f.u, l.div_rho_u),
                    force,
                ],
                EulerVariant::Full0000 => vec![
                    scale(dt_w, rho),
                    scale(l.grad_w2, 0.5 * rho),
                    scale(f.w, l.div_rho_u),
                    l.grad_p_first,
                    force,
                    scale(l.grad_eta_div_v, -1.0),
                    scale(coupling_force(l), -1.0),
                ],
            };
            vector_sample(l.weight, &terms, reference)
        })
    }

    /// Largest `|Γ|` of the coupling forces over the grid.
    pub fn coupling_force_max(&self, state: &QuantumState, grid: &Grid, t: f64) -> Result<f64> {
        let s = self.sample(state, grid, t)?;
        Ok(s.flows.iter().map(|l| norm(coupling_force(l))).fold(0.0, f64::max))
    }

    pub fn momentum_balance_residuals(&self, state: &QuantumState, grid: &Grid, t: f64) -> Result<Vec<ResidualReport>> {
        let s = self.sample(state, grid, t)?;
        Ok(self.momentum_from(&s))
    }

    fn momentum_from(&self, s: &Samples) -> Vec<ResidualReport> {
        let tol = self.pick(self.tol.momentum, self.tol.momentum_fd);
        // Every term is a rate of change, pure rounding for stationary states;
        // the floor is a small fraction of frequency |E| times the field.
        let speed = |l: &LocalFlow| RATE_FLOOR * l.fp.e.abs() * (norm(l.fp.u) + norm(l.fp.v));
        vec![
            self.report("momentum.particle_v", "−∇E = m∂v", tol, s, |l| {
                vector_sample(l.weight, &[l.grad_e, l.dt_v], speed(l))
            }),
            self.report("momentum.particle_u", "−∇F = m∂u", tol, s, |l| {
                vector_sample(l.weight, &[l.grad_f, l.dt_u], speed(l))
            }),
            self.report("momentum.fluid", "−∇p = ∂(ρu)", tol, s, |l| {
                vector_sample(l.weight, &[l.grad_p_second, l.dt_rho_u], l.rho * speed(l))
            }),
            self.report("momentum.pressures", "∂P = −ζ∇²p", tol, s, |l| {
                scalar_sample(
                    l.weight,
                    &[l.dt_p_first, ZETA * l.lap_p_second],
                    RATE_FLOOR * l.fp.e.abs() * (l.fp.p_first.abs() + l.rho * l.fp.e.abs()),
                )
            }),
            self.report("momentum.potentials", "ρ∂θ = ζ∇·(ρ∇S)", tol, s, |l| {
                scalar_sample(
                    l.weight,
                    &[l.rho * l.dt_theta, -ZETA * l.div_rho_grad_s],
                    RATE_FLOOR * ZETA0 * l.rho * l.fp.e.abs(),
                )
            }),
            self.report("momentum.fluid_potential", "∂(ρu) = ζ₀∇[∇·(ρv)]", tol, s, |l| {
                vector_sample(
                    l.weight,
                    &[l.dt_rho_u, scale(l.grad_div_rho_v, -ZETA0)],
                    l.rho * speed(l),
                )
            }),
        ]
    }

    pub fn bohmian_equivalence(&self, state: &QuantumState, grid: &Grid, t: f64) -> Result<Vec<ResidualReport>> {
        let s = self.sample(state, grid, t)?;
        Ok(self.bohmian_from(&s))
    }

    fn bohmian_from(&self, s: &Samples) -> Vec<ResidualReport> {
        let tol = self.pick(self.tol.bohmian, self.tol.bohmian_fd);
        vec![
            self.report("bohmian.phase", "−∂S = ½mv² + Q + U", tol, s, |l| {
                let f = &l.fp;
                scalar_sample(l.weight, &[f.e, -0.5 * dot(&f.v, &f.v), -f.q, -l.u_pot], 0.0)
            }),
            self.report("bohmian.density", "∂ρ + (1/m)∇·(ρ∇S) = 0", tol, s, |l| {
                scalar_sample(l.weight, &[l.dt_rho, l.div_rho_grad_s], l.rho * l.fp.e.abs())
            }),
        ]
    }

    pub fn conservation_integrals(&self, state: &QuantumState, grid: &Grid, t: f64) -> Result<ConservationRecord> {
        let b = field_bundle_with(state, grid, t, self.route.jet_method())?;
        let integral = |f: &dyn Fn(f64, &crate::FieldPoint<f64>) -> f64| {
            let v: Vec<f64> = b.iter().map(|(_, w, r, fp)| w * f(r, fp)).collect();
            pairwise_sum(&v)
        };
        let kinetic_u = integral(&|_, f| f.ke_u);
        let kinetic_v = integral(&|_, f| f.ke_v);
        Ok(ConservationRecord {
            state: state.label(),
            t,
            norm: integral(&|r, _| r),
            int_p_first: integral(&|_, f| f.p_first),
            int_p_second: integral(&|_, f| f.p_second),
            int_e_rho: integral(&|r, f| f.e * r),
            int_f_rho: integral(&|r, f| f.f * r),
            kinetic: kinetic_u + kinetic_v,
            kinetic_u,
            kinetic_v,
            target_energy: mean_energy(state),
            target_free: 0.0,
            skipped: b.skipped,
        })
    }

    /// Conservation record as absolute-error reports against its targets.
    pub fn conservation_reports(&self, state: &QuantumState, grid: &Grid, t: f64) -> Result<Vec<ResidualReport>> {
        let c = self.conservation_integrals(state, grid, t)?;
        let tol = self.tol.free_integral;
        let mut out = vec![
            ResidualReport::absolute("conservation.norm", "∫ρ = 1", c.norm, 1.0, self.tol.norm),
            ResidualReport::absolute("conservation.int_P", "∫P = 0", c.int_p_first, 0.0, tol),
            ResidualReport::absolute("conservation.int_p", "∫p = 0", c.int_p_second, 0.0, tol),
            ResidualReport::absolute("conservation.int_F_rho", "∫Fρ = 0", c.int_f_rho, 0.0, tol),
        ];
        if let Some(e) = c.target_energy {
            let tol = self.tol.energy_integral;
            out.push(ResidualReport::absolute("conservation.int_E_rho", "∫Eρ = Σ|Cₖ|²εₖ", c.int_e_rho, e, tol));
            if matches!(state.potential(), crate::analytic_states::Potential::Coulomb { .. }) && state.is_stationary() {
                out.push(ResidualReport::absolute("conservation.kinetic", "∫(½ρu² + ½ρv²) = −ε", c.kinetic, -e, tol));
            }
        }
        Ok(out)
    }

    pub fn orthogonality_diagnostics(&self, state: &QuantumState, grid: &Grid, t: f64) -> Result<OrthogonalityRecord> {
        let s = self.sample(state, grid, t)?;
        let mut max_uv: f64 = 0.0;
        let mut max_div_v: f64 = 0.0;
        let mut max_speeds: f64 = 0.0;
        for l in &s.flows {
            max_uv = max_uv.max(dot(&l.fp.u, &l.fp.v).abs());
            max_div_v = max_div_v.max(l.div_v.abs());
            max_speeds = max_speeds.max(norm(l.fp.u) * norm(l.fp.v));
        }
        let tol = self.tol.smooth_flow * max_speeds.max(1.0);
        Ok(OrthogonalityRecord {
            state: state.label(),
            t,
            max_u_dot_v: max_uv,
            max_div_v,
            tolerance: tol,
            smooth: max_uv < tol,
            samples: s.flows.len(),
            skipped: s.skipped,
        })
    }

    /// Reports of one suite, or of all of them.
    pub fn run(&self, suite: Suite, state: &QuantumState, grid: &Grid, t: f64) -> Result<Vec<ResidualReport>> {
        let needs_flows = !matches!(suite, Suite::Conservation);
        let s = if needs_flows { Some(self.sample(state, grid, t)?) } else { None };
        let s = s.as_ref();
        let mut out = Vec::new();
        let all = suite == Suite::All;
        if all || suite == Suite::Continuity {
            out.extend(self.continuity_from(s.unwrap()));
        }
        if all || suite == Suite::Energy {
            out.push(self.energy_from(s.unwrap(), EnergyForm::TwoVelocity));
            out.push(self.energy_from(s.unwrap(), EnergyForm::SingleVelocity));
        }
        if all || suite == Suite::Euler {
            for v in EulerVariant::ALL {
                out.push(self.euler_from(s.unwrap(), v));
            }
        }
        if all || suite == Suite::Momentum {
            out.extend(self.momentum_from(s.unwrap()));
        }
        if all || suite == Suite::Bohmian {
            out.extend(self.bohmian_from(s.unwrap()));
        }
        if all || suite == Suite::Orthogonality {
            let o = self.orthogonality_diagnostics(state, grid, t)?;
            let mut r = ResidualReport::absolute("orthogonality.div_v", "∇·v (reported)", o.max_div_v, 0.0, f64::INFINITY);
            r.pass = true;
            out.push(r);
        }
        if all || suite == Suite::Conservation {
            out.extend(self.conservation_reports(state, &state.reference_grid(), t)?);
        }
        Ok(out)
    }
}

/// `Γ = ζ⁻¹[(u·v)ρu + Pv − pu]`.
pub fn coupling_force(l: &LocalFlow) -> [f64; 3] {
    let f = &l.fp;
    let uv = dot(&f.u, &f.v);
    let mut g = [0.0; 3];
    for k in 0..3 {
        g[k] = (uv * l.rho * f.u[k] + f.p_first * f.v[k] - f.p_second * f.u[k]) / ZETA;
    }
    g
}

/// `Σ|Cₖ|²εₖ` for eigenstates and their superpositions.
pub fn mean_energy(state: &QuantumState) -> Option<f64> {
    if let Some(e) = state.eigen_energy() {
        return Some(e);
    }
    let terms = state.terms()?;
    terms
        .iter()
        .map(|(c, s)| s.eigen_energy().map(|e| c.norm_sqr() * e))
        .sum()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnergyStats {
    pub mean: f64,
    pub std: f64,
    pub samples: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConservationRecord {
    pub state: String,
    pub t: f64,
    pub norm: f64,
    #[serde(rename = "int_P")]
    pub int_p_first: f64,
    #[serde(rename = "int_p")]
    pub int_p_second: f64,
    #[serde(rename = "int_E_rho")]
    pub int_e_rho: f64,
    #[serde(rename = "int_F_rho")]
    pub int_f_rho: f64,
    pub kinetic: f64,
    pub kinetic_u: f64,
    pub kinetic_v: f64,
    /// `Σ|Cₖ|²εₖ`, when the state is built from eigenstates.
    pub target_energy: Option<f64>,
    pub target_free: f64,
    pub skipped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityRecord {
    pub state: String,
    pub t: f64,
    pub max_u_dot_v: f64,
    pub max_div_v: f64,
    pub tolerance: f64,
    pub smooth: bool,
    pub samples: usize,
    pub skipped: usize,
}

pub fn continuity_six(state: &QuantumState, grid: &Grid, t: f64) -> Result<Vec<ResidualReport>> {
    Verifier::default().continuity_six(state, grid, t)
}

pub fn energy_equation_residual(state: &QuantumState, grid: &Grid, t: f64, form: EnergyForm) -> Result<ResidualReport> {
    Verifier::default().energy_equation_residual(state, grid, t, form)
}

pub fn euler_residual(state: &QuantumState, grid: &Grid, t: f64, variant: EulerVariant) -> Result<ResidualReport> {
    Verifier::default().euler_residual(state, grid, t, variant)
}

pub fn momentum_balance_residuals(state: &QuantumState, grid: &Grid, t: f64) -> Result<Vec<ResidualReport>> {
    Verifier::default().momentum_balance_residuals(state, grid, t)
}

pub fn conservation_integrals(state: &QuantumState, grid: &Grid, t: f64) -> Result<ConservationRecord> {
    Verifier::default().conservation_integrals(state, grid, t)
}

pub fn bohmian_equivalence(state: &QuantumState, grid: &Grid, t: f64) -> Result<Vec<ResidualReport>> {
    Verifier::default().bohmian_equivalence(state, grid, t)
}

pub fn orthogonality_diagnostics(state: &QuantumState, grid: &Grid, t: f64) -> Result<OrthogonalityRecord> {
    Verifier::default().orthogonality_diagnostics(state, grid, t)
}

#[cfg(test)]
mod tests;
