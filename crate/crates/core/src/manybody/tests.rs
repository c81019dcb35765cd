use super::flows::TwoBody;
use super::*;
use crate::analytic_states::{polar_jet, SpinPairing, StateSpec};
use crate::field_engine::field_point;
use crate::numerics::{fd_gradient, Order};
use proptest::prelude::*;
use std::f64::consts::PI;

const ZETA_HE: f64 = 27.0 / 16.0;

fn he() -> ReducedState {
    let s = QuantumState::new(StateSpec::helium_like(ZETA_HE, 2.0)).unwrap();
    ReducedState::new(&s, Normalization::N).unwrap()
}

fn det(orbitals: &[(u32, u32, i32)], occupancy: &[u8], z: f64, interacting: bool) -> QuantumState {
    QuantumState::new(StateSpec::Determinant {
        orbitals: orbitals.iter().map(|&(n, l, m)| StateSpec::hydrogenic(n, l, m, z)).collect(),
        occupancy: occupancy.to_vec(),
        spin_pairing: SpinPairing::ClosedShell,
        nuclear_charge: Some(z),
        interacting,
    })
    .unwrap()
}

fn reduced(s: &QuantumState) -> ReducedState {
    ReducedState::new(s, Normalization::N).unwrap()
}

/// Charge of a normalized `1s(ζ)` cloud inside radius `r`.
fn enclosed_1s(z: f64, r: f64) -> f64 {
    1.0 - (-2.0 * z * r).exp() * (1.0 + 2.0 * z * r + 2.0 * z * z * r * r)
}

/// Potential of a normalized `1s(ζ)` cloud.
fn hartree_1s(z: f64, r: f64) -> f64 {
    (1.0 - (-2.0 * z * r).exp() * (1.0 + z * r)) / r
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn he_reduced_fields_match_closed_forms_and_finite_differences() {
    let r = he();
    let z = ZETA_HE;
    for x in [[0.3, 0.1, -0.2], [1.0, -0.5, 0.7], [0.0, 2.0, 0.5]] {
        let f = r.reduced_fields(x).unwrap();
        let d = norm3(x);
        let rho = 2.0 * z.powi(3) / PI * (-2.0 * z * d).exp();
        assert!(rel(f.rho_hat, rho) < 1e-13);
        for a in 0..3 {
            assert!((f.u_hat[a] - z * x[a] / d).abs() < 1e-12);
            assert_eq!(f.v_hat[a], 0.0);
        }
        let p = -0.25 * rho * (4.0 * z * z - 4.0 * z / d);
        assert!(rel(f.p_hat, p) < 1e-12);
        let g = fd_gradient(|y| r.rho_hat(y), x, Order::Four).unwrap();
        for a in 0..3 {
            assert!((-0.5 * g[a] / f.rho_hat - f.u_hat[a]).abs() < 1e-6);
        }
    }
}

fn norm3(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

#[test]
fn one_orbital_determinant_reproduces_field_engine() {
    let s = det(&[(2, 1, 1)], &[1], 1.0, true);
    let r = reduced(&s);
    let orb = QuantumState::new(StateSpec::hydrogenic(2, 1, 1, 1.0)).unwrap();
    for x in [[1.0, 0.5, 0.3], [-2.0, 1.0, 1.5]] {
        let f = r.reduced_fields(x).unwrap();
        let jet = polar_jet(&orb, x, 0.0).unwrap();
        let fp = field_point(&jet);
        assert!(rel(f.rho_hat, jet.rho) < 1e-14);
        assert!(rel(f.p_hat, fp.p_first) < 1e-12);
        for a in 0..3 {
            assert!((f.u_hat[a] - fp.u[a]).abs() < 1e-12);
            assert!((f.v_hat[a] - fp.v[a]).abs() < 1e-12);
        }
        assert_eq!(r.coulomb_field(x, FieldRoute::Auto).unwrap(), [0.0; 3]);
        assert_eq!(r.coulomb_potential(x, FieldRoute::Auto).unwrap(), 0.0);
    }
    assert_eq!(r.pair_norm(), 0.0);
}

#[test]
fn be_like_density_norms_and_real_orbitals() {
    let s = det(&[(1, 0, 0), (2, 0, 0)], &[2, 2], 4.0, true);
    let grid = s.determinant().unwrap().orbitals[1].reference_grid();
    for (mode, want) in [(Normalization::N, 4.0), (Normalization::Unity, 1.0)] {
        let r = ReducedState::new(&s, mode).unwrap();
        let total = integrate_scalar(|x| r.rho_hat(x), &grid).unwrap().value;
        assert!((total - want).abs() < 1e-6, "{mode:?}: {total}");
        let f = r.reduced_fields([0.4, -0.3, 0.2]).unwrap();
        assert_eq!(f.v_hat, [0.0; 3]);
    }
}

/// `∫∫g(r₁, r₂)` on a product of low-order spherical rules, independent of
/// the overlap-matrix normalization.
fn nested(g: impl Fn([f64; 3], [f64; 3]) -> f64, radius: f64, nr: usize, nang: usize) -> f64 {
    let rule = Grid::spherical(0.0, radius, nr, nang, nang).unwrap();
    let mut total = 0.0;
    for (x1, w1) in rule.nodes.iter().zip(&rule.weights) {
        for (x2, w2) in rule.nodes.iter().zip(&rule.weights) {
            total += w1 * w2 * g(*x1, *x2);
        }
    }
    total
}

#[test]
fn pair_density_is_normalized_to_n_minus_one() {
    let r = he();
    let total = nested(|a, b| r.pair_density(a, b).unwrap(), 15.0, 40, 2);
    assert!((total - 1.0).abs() < 1e-5, "He: {total}");
    let be = reduced(&det(&[(1, 0, 0), (2, 0, 0)], &[2, 2], 4.0, true));
    let total = nested(|a, b| be.pair_density(a, b).unwrap(), 15.0, 40, 2);
    assert!((total - 3.0).abs() < 1e-5, "Be: {total}");
}

#[test]
fn same_orbital_pair_density_factorizes() {
    let r = he();
    let z = ZETA_HE;
    let dens = |x: [f64; 3]| z.powi(3) / PI * (-2.0 * z * norm3(x)).exp();
    for (a, b) in [([0.2, 0.1, 0.0], [1.0, -1.0, 0.5]), ([0.5, 0.5, 0.5], [0.5, 0.5, 0.5])] {
        assert!(rel(r.pair_density(a, b).unwrap(), dens(a) * dens(b)) < 1e-12);
        // Q = ρ₂/ρ̂ is the other electron's cloud, shared equally.
        assert!(rel(r.q_charge(a, b).unwrap(), 0.5 * dens(b)) < 1e-12);
    }
}

#[test]
fn parallel_spins_have_a_fermi_hole() {
    let r = reduced(&det(&[(1, 0, 0), (2, 0, 0)], &[1, 1], 1.0, true));
    for x in [[0.3, 0.2, 0.1], [1.5, -0.5, 2.0]] {
        let same = r.pair_density(x, x).unwrap();
        let apart = r.pair_density(x, [-x[0], x[1], 2.0]).unwrap();
        assert!(same.abs() < 1e-15 * apart.abs().max(1e-3));
    }
}

#[test]
fn he_field_matches_shell_closed_form_by_both_routes() {
    let r = he();
    let d = 2.0f64;
    let x = [d / 3f64.sqrt(); 3];
    let want = r.field_factor() * enclosed_1s(ZETA_HE, d) / (d * d);
    assert!((r.field_factor() - 1.0).abs() < 1e-10);
    for route in [FieldRoute::Shell, FieldRoute::Centred] {
        let e = r.coulomb_field(x, route).unwrap();
        let radial = (e[0] + e[1] + e[2]) / 3f64.sqrt();
        assert!(rel(radial, want) < 1e-4, "{route:?}: {radial} vs {want}");
        assert!(norm3([e[0] - e[1], e[1] - e[2], 0.0]) < 1e-8 * want);
    }
    let e0 = r.coulomb_field([0.0; 3], FieldRoute::Centred).unwrap();
    assert!(norm3(e0) < 1e-10, "{e0:?}");
}

#[test]
fn gauss_tail_carries_n_minus_one_charges() {
    for mode in [Normalization::N, Normalization::Unity] {
        for route in [FieldRoute::Shell, FieldRoute::Centred] {
            let r = he().with_mode(mode);
            let e = r.coulomb_field([0.0, 12.0, 16.0], route).unwrap();
            let tail = 400.0 * norm3(e);
            assert!((tail - r.field_factor()).abs() < 1e-4 * r.field_factor(), "{mode:?} {route:?}: {tail}");
        }
    }
}

#[test]
fn he_potential_matches_hartree_closed_form() {
    let r = he();
    for d in [0.3, 1.0, 2.5, 8.0, 35.0] {
        let x = [0.0, d * 0.6, d * 0.8];
        let want = hartree_1s(ZETA_HE, d);
        let ray = r.coulomb_potential(x, FieldRoute::Auto).unwrap();
        let direct = r.hartree_potential(x, FieldRoute::Shell).unwrap();
        assert!(rel(ray, want) < 1e-4, "ray at {d}: {ray} vs {want}");
        assert!(rel(direct, want) < 1e-4, "direct at {d}: {direct} vs {want}");
    }
    let centred = r.hartree_potential([0.7, 0.0, 0.0], FieldRoute::Centred).unwrap();
    assert!(rel(centred, hartree_1s(ZETA_HE, 0.7)) < 1e-4);
}

#[test]
fn exchange_terms_agree_between_routes() {
    let be = reduced(&det(&[(1, 0, 0), (2, 0, 0)], &[2, 2], 4.0, true));
    let x = [0.3, -0.2, 0.4];
    let shell = be.coulomb_field(x, FieldRoute::Shell).unwrap();
    let centred = be.coulomb_field(x, FieldRoute::Centred).unwrap();
    let scale = norm3(shell);
    assert!(norm3([shell[0] - centred[0], shell[1] - centred[1], shell[2] - centred[2]]) < 1e-6 * scale);
    let direct = be.hartree_potential(x, FieldRoute::Shell).unwrap();
    let centred = be.hartree_potential(x, FieldRoute::Centred).unwrap();
    assert!(rel(centred, direct) < 1e-6);
}

#[test]
fn shell_route_needs_spherical_pair_charges() {
    let r = reduced(&det(&[(1, 0, 0), (2, 1, 0)], &[2, 1], 3.0, true));
    assert!(!r.is_spherical());
    assert!(matches!(
        r.coulomb_field([1.0, 0.0, 0.0], FieldRoute::Shell),
        Err(QflowError::Unsupported(_))
    ));
    let one = QuantumState::parse("hydrogen:1s").unwrap();
    assert!(matches!(ReducedState::new(&one, Normalization::N), Err(QflowError::Unsupported(_))));
}

#[test]
fn he_energy_functional_matches_variational_closed_form() {
    let e = energy_functional(&QuantumState::new(StateSpec::helium_like(ZETA_HE, 2.0)).unwrap()).unwrap();
    let z = ZETA_HE;
    let j = 5.0 * z / 8.0;
    assert!((e.coulomb_doubled - 2.0 * j).abs() < 1e-4, "{}", e.coulomb_doubled);
    assert!((e.kinetic - z * z).abs() < 1e-6);
    assert!((e.kinetic - e.kinetic_flow).abs() < 1e-6);
    assert!((e.external + 4.0 * z).abs() < 1e-6);
    let closed = z * z - 4.0 * z + 5.0 * z / 8.0;
    assert!((closed + 2.84765625).abs() < 1e-12);
    assert!((e.total - closed).abs() < 1e-3, "{}", e.total);
    assert!((e.total - closed).abs() < 1e-6, "closed form is reproduced far inside tolerance");
    assert!((e.double_counting - e.total).abs() < 1e-8);
    let eps = z * z / 2.0 - 2.0 * z + j;
    assert!((e.orbitals[0].epsilon - eps).abs() < 1e-6);
}

#[test]
fn coulomb_energy_is_independent_of_normalization() {
    let a = he();
    let grid = a.determinant().orbitals[0].reference_grid();
    let integral = |r: &ReducedState| {
        let ve = r.potential_on(&grid.nodes, FieldRoute::Auto).unwrap();
        grid.nodes
            .iter()
            .zip(&grid.weights)
            .zip(&ve)
            .map(|((x, w), v)| w * v * r.rho_hat(*x).unwrap())
            .sum::<f64>()
    };
    let n = integral(&a);
    let unity = integral(&a.with_mode(Normalization::Unity));
    assert!((n - unity).abs() < 1e-10 && (n - 1.25 * ZETA_HE).abs() < 1e-4);
}

#[test]
fn hydrogen_as_one_electron_determinant() {
    let s = det(&[(1, 0, 0)], &[1], 1.0, true);
    let e = energy_functional(&s).unwrap();
    assert!((e.total + 0.5).abs() < 1e-8 && e.interaction == 0.0);
    let r = reduced(&s);
    let grid = Grid::verification();
    let orb = r.determinant().orbitals.clone();
    let rec = orbital_residual(&r, &orb, &grid, FieldRoute::Auto, 1e-8).unwrap();
    assert!((rec.energies[0].epsilon + 0.5).abs() < 1e-10);
    for rep in &rec.reports {
        assert!(rep.pass, "{rep:?}");
    }
    let eu = reduced_euler_residual(&r, &grid, FieldRoute::Auto, 1e-8).unwrap();
    assert!(eu.report.pass, "{:?}", eu.report);
    assert!(eu.spoiler.is_none());
}

#[test]
fn noninteracting_determinants_solve_their_orbital_equations() {
    let s = det(&[(1, 0, 0), (2, 0, 0)], &[1, 1], 1.0, false);
    let r = reduced(&s);
    let orb = r.determinant().orbitals.clone();
    let rec = orbital_residual(&r, &orb, &Grid::verification(), FieldRoute::Auto, 1e-8).unwrap();
    assert!((rec.energies[1].epsilon + 0.125).abs() < 1e-10);
    for rep in &rec.reports {
        assert!(rep.pass, "{rep:?}");
    }
    let pair = reduced(&det(&[(1, 0, 0)], &[2], 1.0, false));
    let eu = reduced_euler_residual(&pair, &Grid::verification(), FieldRoute::Auto, 1e-6).unwrap();
    assert!(eu.report.pass, "{:?}", eu.report);
    assert!(eu.spoiler.unwrap().rel < 1e-8);
}

#[test]
fn he_trial_orbital_is_a_diagnostic_not_a_solution() {
    let r = he();
    let orb = r.determinant().orbitals.clone();
    let rec = orbital_residual(&r, &orb, &Grid::verification(), FieldRoute::Auto, 1e-8).unwrap();
    let sch = &rec.reports[0];
    assert!(sch.rel.is_finite() && sch.samples > 0);
    let eu = reduced_euler_residual(&r, &Grid::verification(), FieldRoute::Auto, 1e-8).unwrap();
    assert!(eu.report.rel.is_finite());
    // Both electrons share one spatial orbital: the flux reduces exactly.
    let sp = eu.spoiler.unwrap();
    assert!(sp.probes > 0 && sp.rel < 1e-8, "{sp:?}");
}

#[test]
fn reduction_of_the_osmotic_momentum_is_exact() {
    let r = reduced(&det(&[(1, 0, 0), (2, 0, 0)], &[1, 1], 1.0, true));
    let two = TwoBody::new(&r).unwrap();
    for x in [[0.4, 0.2, -0.1], [1.2, -0.8, 0.9]] {
        let (flux, _) = two
            .integrate(x, |rho| rho.grad().map(|g| -ZETA * g.value()))
            .unwrap();
        let f = r.reduced_fields(x).unwrap();
        for a in 0..3 {
            let want = f.rho_hat * f.u_hat[a];
            assert!((2.0 * flux[a] - want).abs() < 1e-6 * want.abs().max(1e-3), "{a}: {} vs {want}", 2.0 * flux[a]);
        }
    }
}

#[test]
fn closed_shell_fields_circulate_nothing() {
    for s in [
        QuantumState::new(StateSpec::helium_like(ZETA_HE, 2.0)).unwrap(),
        det(&[(1, 0, 0), (2, 0, 0)], &[2, 2], 4.0, true),
    ] {
        let r = reduced(&s);
        let c = r.circulation([0.3, 0.2, 0.1], 1.0, 32, FieldRoute::Auto, 1e-5).unwrap();
        assert!(c.pass, "{c:?}");
        assert!(c.check().is_ok());
    }
}

#[test]
fn hole_sum_is_the_charge_deficit() {
    let r = he();
    let grid = r.determinant().orbitals[0].reference_grid();
    for x in [[0.2, 0.0, 0.1], [1.0, 1.0, 1.0]] {
        let sum = r.hole_sum(x, &grid).unwrap();
        assert!((sum - (r.field_factor() - 2.0)).abs() < 1e-6, "{sum}");
    }
}

#[test]
fn option_strings_parse() {
    assert_eq!("unity".parse::<Normalization>().unwrap(), Normalization::Unity);
    assert_eq!("centred".parse::<FieldRoute>().unwrap(), FieldRoute::Centred);
    assert!("both".parse::<FieldRoute>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn pair_density_is_symmetric_and_nonnegative(
        a in prop::array::uniform3(-3.0f64..3.0),
        b in prop::array::uniform3(-3.0f64..3.0),
    ) {
        let r = reduced(&det(&[(1, 0, 0), (2, 1, 1), (2, 0, 0)], &[2, 1, 2], 3.0, true));
        let ab = r.pair_density(a, b).unwrap();
        let ba = r.pair_density(b, a).unwrap();
        prop_assert!(ab >= -1e-14 * ab.abs().max(1.0));
        prop_assert!((ab - ba).abs() <= 1e-12 * ab.abs().max(1e-12));
        let q = r.q_charge(a, b).unwrap();
        prop_assert!((q * r.rho_hat(a).unwrap() - ab).abs() <= 1e-12 * ab.abs().max(1e-12));
    }
}
