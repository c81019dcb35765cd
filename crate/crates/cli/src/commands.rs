//! One function per subcommand; each fills a [`Report`] and optional tables.

use crate::config::{CliError, CliResult, RunConfig};
use crate::report::{Report, Table};
use qflow::crossflow::{cross_diagnostics, crossed_energy_residual, required_nowork_force, CrossPolicy};
use qflow::field_engine::field_bundle;
use qflow::manybody::{
    energy_functional_with, orbital_residual, reduced_euler_residual, FieldRoute, Normalization, ReducedState,
};
use qflow::numerics::grid::integrate_scalar;
use qflow::trajectories::{hamiltonian_constancy, integrate, Mode};
use qflow::verifier::{Suite, Verifier};
use qflow::{Grid, QflowError, QuantumState, ResidualReport, Tolerances};
use serde::Serialize;

/// Everything a subcommand needs, resolved from the configuration.
pub struct Context {
    pub state: QuantumState,
    pub times: Vec<f64>,
    pub tol: Tolerances,
    pub config: RunConfig,
    pub threads: usize,
}

impl Context {
    pub fn new(config: RunConfig, threads: usize) -> CliResult<Context> {
        Ok(Context {
            state: config.state()?,
            times: config.times(),
            tol: config.tolerances()?,
            config,
            threads,
        })
    }

    fn report(&self, command: &str) -> Report {
        Report::new(command, &self.state.label(), self.times.clone(), self.threads)
    }

    fn grid(&self) -> CliResult<Grid> {
        self.config.grid_for(&self.state)
    }

    /// Suffixes check names with the time when several times are sampled.
    fn tag(&self, mut r: ResidualReport, t: f64) -> ResidualReport {
        if self.times.len() > 1 {
            r.name = format!("{}@t={t}", r.name);
        }
        r
    }
}

pub type Output = (Report, Vec<Table>);

pub fn fields(ctx: &Context) -> CliResult<Output> {
    let grid = ctx.grid()?;
    let mut report = ctx.report("fields");
    let mut tables = Vec::new();
    for (i, &t) in ctx.times.iter().enumerate() {
        let b = field_bundle(&ctx.state, &grid, t)?;
        let mut table = Table::new(
            &format!("fields_t{i}"),
            &[
                "x", "y", "z", "weight", "rho", "v_x", "v_y", "v_z", "u_x", "u_y", "u_z", "P", "p", "E", "F", "Q",
            ],
        );
        let mut norm = 0.0;
        for (x, w, rho, f) in b.iter() {
            norm += w * rho;
            let mut row = vec![x[0], x[1], x[2], w, rho];
            row.extend(f.v);
            row.extend(f.u);
            row.extend([f.p_first, f.p_second, f.e, f.f, f.q]);
            table.push(row);
        }
        #[derive(Serialize)]
        struct Summary {
            t: f64,
            samples: usize,
            skipped: usize,
            weighted_rho: f64,
        }
        report.record(
            "field_bundle",
            &Summary {
                t,
                samples: table.rows.len(),
                skipped: b.skipped,
                weighted_rho: norm,
            },
        )?;
        tables.push(table);
    }
    Ok((report, tables))
}

pub fn verify(ctx: &Context, suites: &[Suite]) -> CliResult<Output> {
    let grid = ctx.grid()?;
    let suites: Vec<Suite> = if suites.is_empty() || suites.contains(&Suite::All) {
        vec![Suite::All]
    } else {
        let mut s = suites.to_vec();
        s.dedup();
        s
    };
    let verifier = Verifier::new(ctx.tol.clone());
    let mut report = ctx.report("verify");
    for &t in &ctx.times {
        for &suite in &suites {
            for r in verifier.run(suite, &ctx.state, &grid, t)? {
                report.check(ctx.tag(r, t));
            }
        }
        if suites.contains(&Suite::All) || suites.contains(&Suite::Conservation) {
            let c = verifier.conservation_integrals(&ctx.state, &ctx.state.reference_grid(), t)?;
            report.record("conservation", &c)?;
        }
    }
    Ok((report, Vec::new()))
}

pub struct TraceArgs {
    pub x0: [f64; 3],
    pub mode: Mode,
    pub t_end: f64,
    pub dt: f64,
}

pub fn trace(ctx: &Context, args: &TraceArgs) -> CliResult<Output> {
    let t0 = ctx.times[0];
    if !(args.dt > 0.0) || !(args.t_end > t0) {
        return Err(CliError::Config(format!("need dt > 0 and t_end > {t0}")));
    }
    let traj = integrate(&ctx.state, args.x0, args.mode, (t0, args.t_end), args.dt)?;
    let mut report = ctx.report("trace");
    report.check(hamiltonian_constancy(&traj, ctx.tol.hamiltonian));
    if let Some(c) = traj.closed {
        report.check(ResidualReport::absolute(
            "trace.return",
            "|q(T) − q(0)| = 0",
            c.return_error,
            0.0,
            ctx.tol.orbit_return,
        ));
    }
    let mut table = Table::new("trajectory", &["t", "x", "y", "z", "vel_x", "vel_y", "vel_z", "H"]);
    for s in &traj.samples {
        table.push(vec![s.t, s.x[0], s.x[1], s.x[2], s.vel[0], s.vel[1], s.vel[2], s.h]);
    }
    let first = traj.samples.first().expect("integrate records the start");
    let last = traj.samples.last().expect("integrate records the start");
    #[derive(Serialize)]
    struct Summary<'a> {
        mode: &'a Mode,
        steps: usize,
        t_start: f64,
        t_end: f64,
        x_start: [f64; 3],
        x_end: [f64; 3],
        h_start: f64,
        closed: Option<qflow::trajectories::ClosedOrbit>,
    }
    report.record(
        "trajectory",
        &Summary {
            mode: &traj.mode,
            steps: traj.samples.len() - 1,
            t_start: first.t,
            t_end: last.t,
            x_start: first.x,
            x_end: last.x,
            h_start: first.h,
            closed: traj.closed,
        },
    )?;
    Ok((report, vec![table]))
}

pub fn crossflow(ctx: &Context, policy: &CrossPolicy) -> CliResult<Output> {
    let grid = ctx.grid()?;
    let tol = &ctx.tol;
    let mut report = ctx.report("crossflow");
    for &t in &ctx.times {
        let rec = cross_diagnostics(&ctx.state, &grid, t, policy)?;
        let exact = [
            ("crossflow.mu_dot_u", "μ·u = 0", rec.max_mu_dot_u),
            ("crossflow.mu_dot_grad_rho", "μ·∇ρ = 0", rec.max_mu_dot_grad_rho),
        ];
        for (name, anchor, v) in exact {
            report.check(ctx.tag(ResidualReport::absolute(name, anchor, v, 0.0, tol.cross_exact), t));
        }
        if policy.rescale {
            let r = ResidualReport::absolute("crossflow.speed", "|μ| = |u|", rec.max_speed_mismatch, 0.0, tol.cross_exact);
            report.check(ctx.tag(r, t));
            let r = crossed_energy_residual(&ctx.state, &grid, t, policy, tol.energy_equation)?;
            report.check(ctx.tag(r, t));
        }
        let r = ResidualReport::absolute("crossflow.div_mu", "∇·μ = 0", rec.max_div_mu, 0.0, tol.cross_divergence);
        report.check(ctx.tag(r, t));
        report.record("cross_diagnostics", &rec)?;
        match required_nowork_force(&ctx.state, [1.0, 0.0, 0.0], t, policy) {
            Ok(f) => report.record("nowork_force", &serde_json::json!({ "t": t, "x": [1.0, 0.0, 0.0], "force": f }))?,
            Err(QflowError::Unsupported(m)) => {
                report.record("nowork_force", &serde_json::json!({ "t": t, "unsupported": m }))?
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok((report, Vec::new()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ManybodyReport {
    Fields,
    Coulomb,
    Orbital,
    Energy,
    Euler,
}

pub struct ManybodyArgs {
    pub report: ManybodyReport,
    pub normalization: Normalization,
    pub route: FieldRoute,
}

/// Radii of the exported `V_e` table when no grid is given.
fn default_radii() -> Vec<f64> {
    (1..=80).map(|k| 0.25 * k as f64).collect()
}

/// Radius of the Gauss-law tail check.
const TAIL_RADIUS: f64 = 20.0;

pub fn manybody(ctx: &Context, args: &ManybodyArgs) -> CliResult<Output> {
    let reduced = ReducedState::new(&ctx.state, args.normalization)?;
    let mut report = ctx.report("manybody");
    let mut tables = Vec::new();
    let tol = &ctx.tol;
    let grid = || -> CliResult<Grid> {
        match &ctx.config.grid {
            Some(_) => ctx.grid(),
            None => Ok(Grid::verification()),
        }
    };
    #[derive(Serialize)]
    struct Header<'a> {
        normalization: Normalization,
        route: FieldRoute,
        electrons: usize,
        pair_norm: f64,
        field_factor: f64,
        spherical: bool,
        label: &'a str,
    }
    report.record(
        "reduced_state",
        &Header {
            normalization: reduced.normalization(),
            route: args.route,
            electrons: reduced.electrons(),
            pair_norm: reduced.pair_norm(),
            field_factor: reduced.field_factor(),
            spherical: reduced.is_spherical(),
            label: reduced.label(),
        },
    )?;
    match args.report {
        ManybodyReport::Fields => {
            let g = grid()?;
            let mut table = Table::new(
                "reduced_fields",
                &["x", "y", "z", "rho_hat", "u_hat_x", "u_hat_y", "u_hat_z", "v_hat_x", "v_hat_y", "v_hat_z", "P_hat"],
            );
            let mut skipped = 0usize;
            for x in &g.nodes {
                match reduced.reduced_fields(*x) {
                    Ok(f) => {
                        let mut row = vec![x[0], x[1], x[2], f.rho_hat];
                        row.extend(f.u_hat);
                        row.extend(f.v_hat);
                        row.push(f.p_hat);
                        table.push(row);
                    }
                    Err(QflowError::Node { .. }) => skipped += 1,
                    Err(e) => return Err(e.into()),
                }
            }
            let norm = integrate_scalar(|x| reduced.rho_hat(x), &reference_grid(&reduced))?;
            report.record(
                "reduced_fields",
                &serde_json::json!({ "samples": table.rows.len(), "skipped": skipped, "int_rho_hat": norm.value }),
            )?;
            tables.push(table);
        }
        ManybodyReport::Coulomb => {
            let radii: Vec<f64> = match &ctx.config.grid {
                Some(_) => {
                    let mut r: Vec<f64> = grid()?.nodes.iter().map(|x| qflow::numerics::scalar::norm(x)).collect();
                    r.sort_by(f64::total_cmp);
                    r.dedup();
                    r
                }
                None => default_radii(),
            };
            let nodes: Vec<[f64; 3]> = radii.iter().map(|r| [0.0, 0.0, *r]).collect();
            let ve = reduced.potential_on(&nodes, args.route)?;
            let field = reduced.field_on(&nodes, args.route)?;
            let mut table = Table::new("coulomb_radial", &["r", "V_e", "E_r", "r2_E_r"]);
            for ((r, v), e) in radii.iter().zip(&ve).zip(&field) {
                table.push(vec![*r, *v, e[2], r * r * e[2]]);
            }
            tables.push(table);

            let charge = reduced.field_factor() * (reduced.electrons().saturating_sub(1)) as f64;
            let e = reduced.coulomb_field([0.0, 0.0, TAIL_RADIUS], args.route)?;
            report.check(ResidualReport::absolute(
                "manybody.gauss_tail",
                "r²|𝓔| = f(n − 1) at r = 20",
                TAIL_RADIUS * TAIL_RADIUS * e[2],
                charge,
                tol.coulomb,
            ));

            let ref_grid = reference_grid(&reduced);
            let probe = [0.5, 0.0, 0.0];
            let hole = reduced.hole_sum(probe, &ref_grid)?;
            let norm = integrate_scalar(|x| reduced.rho_hat(x), &ref_grid)?.value;
            report.check(ResidualReport::absolute(
                "manybody.pair_norm",
                "∫2Q(r₁, ·) = f(n − 1)",
                hole + norm,
                charge,
                tol.pair_norm,
            ));
            report.record("hole_sum", &serde_json::json!({ "r1": probe, "hole_sum": hole, "int_rho_hat": norm }))?;

            let circ = reduced.circulation([0.3, 0.2, 0.1], 1.0, 64, args.route, tol.circulation)?;
            report.check(ResidualReport::absolute(
                "manybody.circulation",
                "∮𝓔·dl = 0 on three unit circles",
                circ.max_abs,
                0.0,
                tol.circulation,
            ));
            report.record("circulation", &circ)?;
        }
        ManybodyReport::Orbital => {
            let g = grid()?;
            let orbitals = reduced.determinant().orbitals.clone();
            let rec = orbital_residual(&reduced, &orbitals, &g, args.route, tol.orbital)?;
            for r in &rec.reports {
                report.check(r.clone());
            }
            report.record("orbital_energies", &rec.energies)?;
        }
        ManybodyReport::Energy => {
            let e = energy_functional_with(&reduced, args.route)?;
            report.check(ResidualReport::absolute(
                "manybody.kinetic_forms",
                "−½Σ∫ψ*∇²ψ = Σ∫½ρ(u² + v²)",
                e.kinetic,
                e.kinetic_flow,
                tol.energy_functional,
            ));
            report.record("energy_functional", &e)?;
        }
        ManybodyReport::Euler => {
            let g = grid()?;
            let rec = reduced_euler_residual(&reduced, &g, args.route, tol.orbital)?;
            report.check(rec.report.clone());
            if let Some(s) = &rec.spoiler {
                report.record("spoiler", s)?;
            }
        }
    }
    Ok((report, tables))
}

/// Quadrature rule wide enough for the most diffuse orbital.
fn reference_grid(reduced: &ReducedState) -> Grid {
    reduced
        .determinant()
        .orbitals
        .iter()
        .map(|o| o.reference_grid())
        .max_by(|a, b| a.len().cmp(&b.len()))
        .unwrap_or_else(Grid::reference)
}

/// Prints each report's check table; the result is whether all passed.
pub fn summarize(paths: &[std::path::PathBuf]) -> CliResult<bool> {
    if paths.is_empty() {
        return Err(CliError::Config("no report files given".into()));
    }
    let mut pass = true;
    for p in paths {
        let r = Report::load(p)?;
        print!("{}", r.summary());
        pass &= r.pass;
    }
    Ok(pass)
}
