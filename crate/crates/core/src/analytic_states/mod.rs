//! Exactly evaluable quantum states.
//!
//! Every one-body state evaluates `Ψ(x, t)` through one generic routine over
//! [`Scalar`], so the same code yields plain values and exact Taylor jets.

pub mod hydrogenic;
pub mod oscillator;
pub mod polar;
pub mod spec;

pub use hydrogenic::Hydrogenic;
pub use oscillator::{Coherent1d, Oscillator1d, Oscillator3d};
pub use polar::{polar_from_psi, PolarJet, PsiDerivs};
pub use spec::{Corruption, SpinPairing, StateSpec, Term};

use crate::error::{QflowError, Result};
use crate::numerics::grid::integrate_complex;
use crate::numerics::{jet, Cx, Grid, Jet, Scalar};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Absolute density below which a point counts as a wavefunction node.
pub const NODE_EPS_ABS: f64 = 1e-300;
/// Relative density floor against the largest density on an active grid.
pub const NODE_EPS_REL: f64 = 1e-14;

/// Box half-width for an oscillator of extent `scale`: the density is below
/// `e⁻⁴⁰` of its peak at the faces, and no wider, since a fixed node count
/// loses resolution as the box grows.
fn gaussian_half_width(scale: f64, omega: f64) -> f64 {
    scale + 5.5 / omega.sqrt()
}

/// External one-body potential `U`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Potential {
    /// `−Z/r`.
    Coulomb { z: f64 },
    /// `½ω²x²`.
    Harmonic1d { omega: f64 },
    /// `½ω²r²`.
    Harmonic3d { omega: f64 },
}

impl Potential {
    pub fn eval<T: Scalar>(&self, x: &[T; 3]) -> T {
        match *self {
            Potential::Coulomb { z } => (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt().recip() * -z,
            Potential::Harmonic1d { omega } => x[0] * x[0] * (0.5 * omega * omega),
            Potential::Harmonic3d { omega } => {
                (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) * (0.5 * omega * omega)
            }
        }
    }

    pub fn grad(&self, x: &[f64; 3]) -> [f64; 3] {
        match *self {
            Potential::Coulomb { z } => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                let s = z / (r * r * r);
                [s * x[0], s * x[1], s * x[2]]
            }
            Potential::Harmonic1d { omega } => [omega * omega * x[0], 0.0, 0.0],
            Potential::Harmonic3d { omega } => x.map(|c| omega * omega * c),
        }
    }

    pub fn is_singular_at(&self, x: &[f64; 3]) -> bool {
        matches!(self, Potential::Coulomb { .. }) && x.iter().all(|c| *c == 0.0)
    }
}

/// Slater determinant of spin-orbitals with one spin parameter per electron.
#[derive(Clone, Debug)]
pub struct Determinant {
    pub orbitals: Vec<QuantumState>,
    pub occupancy: Vec<u8>,
    pub potential: Potential,
    /// Whether the Hamiltonian carries the pair repulsion `1/r₁₂`.
    pub interacting: bool,
}

impl Determinant {
    pub fn electrons(&self) -> usize {
        self.occupancy.iter().map(|o| *o as usize).sum()
    }

    /// `(orbital index, spin up?)` per spin-orbital: all up spins first.
    pub fn spin_orbitals(&self) -> Vec<(usize, bool)> {
        let mut up: Vec<_> = (0..self.orbitals.len()).map(|i| (i, true)).collect();
        for (i, o) in self.occupancy.iter().enumerate() {
            if *o == 2 {
                up.push((i, false));
            }
        }
        up
    }
}

#[derive(Clone, Debug)]
enum Body {
    Hydrogenic(Hydrogenic),
    Osc1d(Oscillator1d),
    Osc3d(Oscillator3d),
    Coherent(Coherent1d),
    Superposition(Vec<(Complex64, QuantumState)>),
    Determinant(Determinant),
    Corrupted(Box<QuantumState>, Corruption),
}

/// Validated, immutable state.
#[derive(Clone, Debug)]
pub struct QuantumState {
    spec: StateSpec,
    body: Body,
}

impl QuantumState {
    pub fn new(spec: StateSpec) -> Result<QuantumState> {
        let invalid = |m: String| Err(QflowError::InvalidState(m));
        let body = match &spec {
            &StateSpec::Hydrogenic { n, l, m_l, z } => {
                if n == 0 || l >= n || m_l.unsigned_abs() > l || !(z > 0.0 && z.is_finite()) {
                    return invalid(format!("hydrogenic needs 0 ≤ l < n, |m| ≤ l, Z > 0 (n={n}, l={l}, m={m_l}, Z={z})"));
                }
                Body::Hydrogenic(Hydrogenic::new(n, l, m_l, z))
            }
            &StateSpec::Oscillator1d { n, omega } => {
                if !(omega > 0.0 && omega.is_finite()) {
                    return invalid("oscillator needs omega > 0".into());
                }
                Body::Osc1d(Oscillator1d::new(n, omega))
            }
            &StateSpec::Oscillator3d { nx, ny, nz, omega } => {
                if !(omega > 0.0 && omega.is_finite()) {
                    return invalid("oscillator needs omega > 0".into());
                }
                Body::Osc3d(Oscillator3d::new([nx, ny, nz], omega))
            }
            &StateSpec::Coherent1d { alpha, omega } => {
                if !(omega > 0.0 && omega.is_finite()) || !alpha.iter().all(|a| a.is_finite()) {
                    return invalid("coherent state needs omega > 0 and finite alpha".into());
                }
                Body::Coherent(Coherent1d {
                    alpha: Complex64::new(alpha[0], alpha[1]),
                    omega,
                })
            }
            StateSpec::Superposition { terms } => Body::Superposition(validate_superposition(terms)?),
            StateSpec::Determinant {
                orbitals,
                occupancy,
                nuclear_charge,
                interacting,
                ..
            } => Body::Determinant(validate_determinant(orbitals, occupancy, *nuclear_charge, *interacting)?),
            StateSpec::Corrupted { base, corruption } => {
                let base = QuantumState::new((**base).clone())?;
                if !base.is_one_body() {
                    return invalid("corruption applies to one-body states".into());
                }
                Body::Corrupted(Box::new(base), *corruption)
            }
        };
        Ok(QuantumState { spec, body })
    }

    pub fn parse(s: &str) -> Result<QuantumState> {
        QuantumState::new(StateSpec::parse(s)?)
    }

    pub fn spec(&self) -> &StateSpec {
        &self.spec
    }

    pub fn label(&self) -> String {
        match &self.spec {
            StateSpec::Hydrogenic { n, l, m_l, z } => {
                let letter = "spdfghik".as_bytes()[*l as usize] as char;
                let m = if *l == 0 { String::new() } else { m_l.to_string() };
                if *z == 1.0 {
                    format!("hydrogen {n}{letter}{m}")
                } else {
                    format!("hydrogenic {n}{letter}{m} Z={z}")
                }
            }
            StateSpec::Oscillator1d { n, omega } => format!("oscillator1d n={n} omega={omega}"),
            StateSpec::Oscillator3d { nx, ny, nz, omega } => {
                format!("oscillator3d ({nx},{ny},{nz}) omega={omega}")
            }
            StateSpec::Coherent1d { alpha, omega } => {
                format!("coherent1d alpha={}{:+}i omega={omega}", alpha[0], alpha[1])
            }
            StateSpec::Superposition { .. } => {
                let Body::Superposition(terms) = &self.body else { unreachable!() };
                let parts: Vec<_> = terms.iter().map(|(_, s)| s.label()).collect();
                format!("superposition [{}]", parts.join(", "))
            }
            StateSpec::Determinant { .. } => {
                let d = self.determinant().unwrap();
                let parts: Vec<_> = d
                    .orbitals
                    .iter()
                    .zip(&d.occupancy)
                    .map(|(o, k)| format!("{}^{k}", o.label()))
                    .collect();
                format!("determinant [{}]", parts.join(", "))
            }
            StateSpec::Corrupted { base, corruption } => {
                format!("corrupted {:?} of {:?}", corruption, base)
            }
        }
    }

    pub fn is_one_body(&self) -> bool {
        !matches!(self.body, Body::Determinant(_))
    }

    pub fn determinant(&self) -> Option<&Determinant> {
        match &self.body {
            Body::Determinant(d) => Some(d),
            _ => None,
        }
    }

    pub fn hydrogenic(&self) -> Option<&Hydrogenic> {
        match &self.body {
            Body::Hydrogenic(h) => Some(h),
            _ => None,
        }
    }

    /// Terms of a superposition.
    pub fn terms(&self) -> Option<&[(Complex64, QuantumState)]> {
        match &self.body {
            Body::Superposition(t) => Some(t),
            _ => None,
        }
    }

    /// The state depends on `x` only.
    pub fn is_1d(&self) -> bool {
        match &self.body {
            Body::Osc1d(_) | Body::Coherent(_) => true,
            Body::Superposition(t) => t[0].1.is_1d(),
            Body::Corrupted(b, _) => b.is_1d(),
            _ => false,
        }
    }

    /// Stationary spatial density.
    pub fn is_stationary(&self) -> bool {
        self.eigen_energy().is_some()
    }

    pub fn potential(&self) -> Potential {
        match &self.body {
            Body::Hydrogenic(h) => Potential::Coulomb { z: h.z },
            Body::Osc1d(o) => Potential::Harmonic1d { omega: o.omega },
            Body::Coherent(c) => Potential::Harmonic1d { omega: c.omega },
            Body::Osc3d(o) => Potential::Harmonic3d { omega: o.omega },
            Body::Superposition(t) => t[0].1.potential(),
            Body::Determinant(d) => d.potential,
            Body::Corrupted(b, _) => b.potential(),
        }
    }

    pub fn eigen_energy(&self) -> Option<f64> {
        match &self.body {
            Body::Hydrogenic(h) => Some(h.energy),
            Body::Osc1d(o) => Some(o.energy),
            Body::Osc3d(o) => Some(o.energy),
            _ => None,
        }
    }

    /// Length scale and largest angular momentum, used to size grids.
    fn extent(&self) -> (f64, u32) {
        match &self.body {
            Body::Hydrogenic(h) => (h.n as f64 / h.z, h.l),
            Body::Osc1d(o) => (((o.n as f64) + 1.0).sqrt() / o.omega.sqrt(), 0),
            Body::Osc3d(o) => ((o.n.iter().sum::<u32>() as f64 + 1.0).sqrt() / o.omega.sqrt(), 0),
            Body::Coherent(c) => ((1.0 + c.alpha.norm()) / c.omega.sqrt(), 0),
            Body::Superposition(t) => t
                .iter()
                .map(|(_, s)| s.extent())
                .fold((0.0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1))),
            Body::Determinant(d) => d
                .orbitals
                .iter()
                .map(|s| s.extent())
                .fold((0.0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1))),
            Body::Corrupted(b, _) => b.extent(),
        }
    }

    /// Quadrature rule covering the state's support: a spherical product
    /// (200 radial Gauss–Legendre nodes, angular order adapted to `l`) for
    /// Coulomb states, a tensor box for oscillators, a slab of unit
    /// cross-section for 1D states.
    pub fn reference_grid(&self) -> Grid {
        let (scale, lmax) = self.extent();
        match self.potential() {
            Potential::Coulomb { .. } => {
                let radius = (20.0 * scale).max(crate::numerics::grid::REFERENCE_RADIUS);
                let nang = (2 * lmax as usize + 10).max(12);
                Grid::reference_with(radius, nang)
            }
            Potential::Harmonic1d { omega } => {
                let half = gaussian_half_width(scale, omega);
                Grid::cartesian_box([-half, -0.5, -0.5], [half, 0.5, 0.5], [240, 1, 1]).expect("valid box")
            }
            Potential::Harmonic3d { omega } => {
                let half = gaussian_half_width(scale, omega);
                Grid::cartesian_box([-half; 3], [half; 3], [48; 3]).expect("valid box")
            }
        }
    }

    /// Probe grid for pointwise residual suites: the spherical verification
    /// shell for 3D states, a line of points along `x` for 1D states.
    pub fn verification_grid(&self) -> Grid {
        if self.is_1d() {
            let (scale, _) = self.extent();
            let half = 3.0 * scale + 1.0;
            let nodes = (0..121).map(|k| [-half + 2.0 * half * k as f64 / 120.0, 0.0, 0.0]).collect();
            Grid::points(nodes)
        } else {
            Grid::verification()
        }
    }

    /// One-body `Ψ(x, t)` over any scalar type.
    pub fn psi<T: Scalar>(&self, x: [T; 3], t: T) -> Result<Cx<T>> {
        Ok(match &self.body {
            Body::Hydrogenic(h) => h.psi(x, t),
            Body::Osc1d(o) => o.psi(x, t),
            Body::Osc3d(o) => o.psi(x, t),
            Body::Coherent(c) => c.psi(x, t),
            Body::Superposition(terms) => {
                let mut acc = Cx::zero();
                for (c, s) in terms {
                    acc = acc + s.psi(x, t)?.scale_c64(*c);
                }
                acc
            }
            Body::Corrupted(base, corruption) => {
                let p = base.psi(x, t)?;
                match *corruption {
                    Corruption::DensityDrift { rate } => p.scale(t * rate + 1.0),
                    Corruption::PhaseShift { delta } => p * Cx::expi(t * -delta),
                }
            }
            Body::Determinant(_) => {
                return Err(QflowError::Unsupported(
                    "a determinant takes one position per electron".into(),
                ))
            }
        })
    }

    /// Taylor expansion of `Ψ` in `(x, y, z, t)` about `(x, t)`.
    pub fn psi_taylor<const N: usize>(&self, x: [f64; 3], t: f64) -> Result<Cx<Jet<N>>> {
        if self.potential().is_singular_at(&x) {
            return Err(QflowError::CoulombSingularity);
        }
        let xs = [Jet::var(x[0], jet::X), Jet::var(x[1], jet::Y), Jet::var(x[2], jet::Z)];
        self.psi(xs, Jet::var(t, jet::T))
    }

    /// `Ψ(x₁, …, xₙ, t)` of a determinant at the fixed spin assignment
    /// (first all up spins, then all down spins).
    pub fn psi_many(&self, xs: &[[f64; 3]], t: f64) -> Result<Complex64> {
        let Some(d) = self.determinant() else {
            return match xs {
                [x] => self.psi(*x, t).map(|c| c.to_c64()),
                _ => Err(QflowError::Unsupported("one-body state takes one position".into())),
            };
        };
        let so = d.spin_orbitals();
        let n = so.len();
        if xs.len() != n {
            return Err(QflowError::Unsupported(format!(
                "determinant of {n} electrons evaluated at {} positions",
                xs.len()
            )));
        }
        let n_up = d.orbitals.len();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (i, x) in xs.iter().enumerate() {
            let up_i = i < n_up;
            for (j, (k, up_j)) in so.iter().enumerate() {
                if up_i == *up_j {
                    m[(i, j)] = d.orbitals[*k].psi(*x, t)?.to_c64();
                }
            }
        }
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        Ok(m.determinant() / fact.sqrt())
    }
}

fn validate_superposition(terms: &[Term]) -> Result<Vec<(Complex64, QuantumState)>> {
    let invalid = |m: &str| Err(QflowError::InvalidState(m.to_string()));
    if terms.is_empty() {
        return invalid("superposition needs at least one term");
    }
    let states: Vec<(Complex64, QuantumState)> = terms
        .iter()
        .map(|t| Ok((t.coeff(), QuantumState::new(t.state.clone())?)))
        .collect::<Result<_>>()?;
    if states.iter().any(|(_, s)| s.eigen_energy().is_none()) {
        return invalid("superposition terms must be eigenstates");
    }
    let pot = states[0].1.potential();
    if states.iter().any(|(_, s)| s.potential() != pot) {
        return invalid("superposition terms must share one Hamiltonian");
    }
    for i in 0..states.len() {
        for j in 0..i {
            if states[i].1.spec == states[j].1.spec {
                return invalid("superposition terms must be distinct (orthonormal) eigenstates");
            }
        }
    }
    let norm: f64 = states.iter().map(|(c, _)| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return invalid(&format!("superposition coefficients have Σ|C|² = {norm}, not 1"));
    }
    Ok(states)
}

fn validate_determinant(
    orbitals: &[StateSpec],
    occupancy: &[u8],
    nuclear_charge: Option<f64>,
    interacting: bool,
) -> Result<Determinant> {
    let invalid = |m: String| Err(QflowError::InvalidState(m));
    if orbitals.is_empty() || orbitals.len() != occupancy.len() {
        return invalid("determinant needs one occupancy per orbital".into());
    }
    if occupancy.iter().any(|o| *o != 1 && *o != 2) {
        return invalid("occupancies must be 1 or 2".into());
    }
    let states: Vec<QuantumState> = orbitals
        .iter()
        .map(|s| QuantumState::new(s.clone()))
        .collect::<Result<_>>()?;
    if states.iter().any(|s| !s.is_one_body() || s.is_1d()) {
        return invalid("determinant orbitals must be three-dimensional one-body states".into());
    }
    let potential = match nuclear_charge {
        Some(z) if z > 0.0 => Potential::Coulomb { z },
        Some(z) => return invalid(format!("nuclear charge must be positive, got {z}")),
        None => states[0].potential(),
    };
    let det = Determinant {
        orbitals: states,
        occupancy: occupancy.to_vec(),
        potential,
        interacting,
    };
    let s = overlap_matrix(&det.orbitals, 0.0)?;
    for i in 0..s.nrows() {
        for j in 0..s.ncols() {
            let want = if i == j { 1.0 } else { 0.0 };
            if (s[(i, j)] - want).norm() > 1e-8 {
                return invalid(format!(
                    "orbitals are not orthonormal: S[{i}][{j}] = {}",
                    s[(i, j)]
                ));
            }
        }
    }
    Ok(det)
}

/// `Sᵢⱼ = ∫φᵢ*φⱼ` on the union of the orbitals' reference grids.
pub fn overlap_matrix(orbitals: &[QuantumState], t: f64) -> Result<DMatrix<Complex64>> {
    let grid = orbitals
        .iter()
        .map(|o| o.reference_grid())
        .max_by(|a, b| a.len().cmp(&b.len()).then(a.total_weight().total_cmp(&b.total_weight())))
        .expect("nonempty");
    let n = orbitals.len();
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = integrate_complex(
                |x| {
                    let a = orbitals[i].psi(x, t)?.to_c64();
                    let b = orbitals[j].psi(x, t)?.to_c64();
                    Ok(a.conj() * b)
                },
                &grid,
            )?;
            s[(i, j)] = v;
            s[(j, i)] = v.conj();
        }
    }
    Ok(s)
}

/// How a [`PolarJet`] is obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum JetMethod {
    /// Exact Taylor arithmetic on the closed form.
    Analytic,
    /// Fourth-order central differences of `Ψ`: spatial step `h0·(1 + |x|)`,
    /// time step `dt`.
    FiniteDifference { h0: f64, dt: f64 },
}

impl JetMethod {
    /// `h0 = 1e-3` keeps the `O(h⁴)` truncation and `O(ε/h²)` rounding of the
    /// second derivatives both near `1e-12`.
    pub const FD: JetMethod = JetMethod::FiniteDifference { h0: 1e-3, dt: 1e-4 };
}

/// `Ψ(x, t)` of a one-body state (`xs.len() == 1`) or a determinant.
pub fn eval_psi(state: &QuantumState, xs: &[[f64; 3]], t: f64) -> Result<Complex64> {
    state.psi_many(xs, t)
}

pub fn eigen_energy(state: &QuantumState) -> Option<f64> {
    state.eigen_energy()
}

/// Analytic polar jet at `x`.
pub fn polar_jet(state: &QuantumState, x: [f64; 3], t: f64) -> Result<PolarJet<f64>> {
    polar_jet_with(state, x, t, JetMethod::Analytic, NODE_EPS_ABS)
}

/// Polar jet by the chosen method; `rho_floor` is the node threshold.
pub fn polar_jet_with(
    state: &QuantumState,
    x: [f64; 3],
    t: f64,
    method: JetMethod,
    rho_floor: f64,
) -> Result<PolarJet<f64>> {
    let d = psi_derivs(state, x, t, method)?;
    let rho = d.psi.norm_sqr();
    if !(rho >= rho_floor.max(NODE_EPS_ABS)) {
        return Err(QflowError::Node { x, rho });
    }
    Ok(polar_from_psi(&d))
}

/// Polar bundle as Taylor jets; a `Ψ` jet of capacity `K` yields fields of
/// order `K − 2`.
pub fn polar_taylor<const N: usize>(
    state: &QuantumState,
    x: [f64; 3],
    t: f64,
    rho_floor: f64,
) -> Result<PolarJet<Jet<N>>> {
    let psi = state.psi_taylor::<N>(x, t)?;
    let rho = psi.norm_sqr().value();
    if !(rho >= rho_floor.max(NODE_EPS_ABS)) {
        return Err(QflowError::Node { x, rho });
    }
    Ok(polar_from_psi(&PsiDerivs::from_taylor(psi)))
}

/// `Ψ` and its first and second derivatives at one point.
pub fn psi_derivs(state: &QuantumState, x: [f64; 3], t: f64, method: JetMethod) -> Result<PsiDerivs<f64>> {
    match method {
        JetMethod::Analytic => Ok(PsiDerivs::from_taylor(state.psi_taylor::<15>(x, t)?).values()),
        JetMethod::FiniteDifference { h0, dt } => fd_psi_derivs(state, x, t, h0, dt),
    }
}

fn fd_psi_derivs(state: &QuantumState, x: [f64; 3], t: f64, h0: f64, dt: f64) -> Result<PsiDerivs<f64>> {
    if state.potential().is_singular_at(&x) {
        return Err(QflowError::CoulombSingularity);
    }
    let f = |y: [f64; 3], s: f64| -> Result<Complex64> { Ok(state.psi(y, s)?.to_c64()) };
    let h = crate::numerics::fd::step(&x, h0);
    let at = |d: [f64; 3]| [x[0] + d[0], x[1] + d[1], x[2] + d[2]];
    let e = |i: usize, s: f64| {
        let mut v = [0.0; 3];
        v[i] = s;
        v
    };
    let d1 = |g: &dyn Fn(f64) -> Result<Complex64>, h: f64| -> Result<Complex64> {
        Ok((g(-2.0 * h)? - g(2.0 * h)? + (g(h)? - g(-h)?) * 8.0) / (12.0 * h))
    };
    let psi = f(x, t)?;
    let mut grad = [Complex64::new(0.0, 0.0); 3];
    let mut hess = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        grad[i] = d1(&|s| f(at(e(i, s)), t), h)?;
        let g = |s: f64| f(at(e(i, s)), t);
        hess[i][i] = (-g(2.0 * h)? - g(-2.0 * h)? + (g(h)? + g(-h)?) * 16.0 - psi * 30.0) / (12.0 * h * h);
        for j in 0..i {
            let v = d1(
                &|s| {
                    let shift = e(j, s);
                    d1(&|r| f(at([shift[0] + e(i, r)[0], shift[1] + e(i, r)[1], shift[2] + e(i, r)[2]]), t), h)
                },
                h,
            )?;
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    let dtv = d1(&|s| f(x, t + s), dt)?;
    let cx = |c: Complex64| Cx::new(c.re, c.im);
    Ok(PsiDerivs {
        psi: cx(psi),
        grad: grad.map(cx),
        hess: hess.map(|r| r.map(cx)),
        dt: cx(dtv),
    })
}

/// Largest `ρ` over the grid nodes at time `t` (one-body states).
pub fn max_density(state: &QuantumState, grid: &Grid, t: f64) -> f64 {
    use rayon::prelude::*;
    grid.nodes
        .par_iter()
        .map(|x| state.psi(*x, t).map(|p| p.norm_sqr()).unwrap_or(0.0))
        .reduce(|| 0.0, f64::max)
}

/// Node threshold on a grid: the absolute floor or the relative guard
/// against the grid maximum, whichever is larger.
pub fn node_floor(state: &QuantumState, grid: &Grid, t: f64) -> f64 {
    (NODE_EPS_REL * max_density(state, grid, t)).max(NODE_EPS_ABS)
}

/// Node threshold for a jet method. Analytic jets form every ratio from `Ψ`
/// at full relative precision, so only the absolute floor applies; the
/// relative guard protects finite-difference ratios near nodes.
pub fn node_floor_for(state: &QuantumState, grid: &Grid, t: f64, method: JetMethod) -> f64 {
    match method {
        JetMethod::Analytic => NODE_EPS_ABS,
        JetMethod::FiniteDifference { .. } => node_floor(state, grid, t),
    }
}
