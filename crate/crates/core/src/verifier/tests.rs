use super::*;
use crate::analytic_states::StateSpec;
use proptest::prelude::*;

fn st(s: &str) -> QuantumState {
    QuantumState::parse(s).unwrap()
}

fn v() -> Verifier {
    Verifier::new(Tolerances::default())
}

fn vgrid(s: &QuantumState) -> Grid {
    s.verification_grid()
}

/// Small shell grid for the slower finite-difference routes.
fn shell(r0: f64, r1: f64) -> Grid {
    Grid::spherical(r0, r1, 8, 6, 6).unwrap()
}

fn max_rel(rs: &[ResidualReport]) -> f64 {
    rs.iter().map(|r| r.rel).fold(0.0, f64::max)
}

#[test]
fn eigenstates_pass_continuity() {
    for s in ["hydrogen:1s", "hydrogen:2s", "hydrogen:2p1", "hydrogen:3d2"] {
        let s = st(s);
        let rs = v().continuity_six(&s, &vgrid(&s), 0.3).unwrap();
        assert_eq!(rs.len(), 6);
        for r in &rs {
            assert!(r.pass && r.rel < 1e-8, "{} {}: {}", s.label(), r.name, r.rel);
        }
    }
}

#[test]
fn superposition_continuity_fields_are_proportional() {
    let s = st("super:1s+2s");
    let rs = v().continuity_six(&s, &vgrid(&s), 0.7).unwrap();
    assert!(max_rel(&rs) < 1e-6, "{rs:?}");
    for x in [[0.4, 0.2, -0.3], [1.1, -1.5, 0.7], [3.0, 0.5, 2.0]] {
        let l = local_flow(&s, x, 0.7, Route::Jets, 0.0).unwrap();
        let a = ZETA0 * l.dt_rho;
        assert!(a.abs() > 1e-6);
        for b in [
            l.fp.p_second,
            l.fp.f * l.rho,
            -ZETA0 * l.div_rho_grad_s,
            -ZETA0 * l.div_j,
            l.re_psi_dt_psi,
            -0.5 * l.re_div_psi_p_psi,
            l.psi_h_psi.im,
        ] {
            assert!((a - b).abs() < 1e-12 * l.rho.max(1e-3), "{a} {b}");
        }
    }
}

#[test]
fn density_drift_fails_all_six_together() {
    let s = st("corrupted:hydrogen:1s");
    let rs = v().continuity_six(&s, &vgrid(&s), 0.5).unwrap();
    assert!(rs[3].rel > 1e-3);
    let lo = rs.iter().map(|r| r.rel).fold(f64::INFINITY, f64::min);
    let hi = max_rel(&rs);
    assert!(lo > 1e-4 && hi < 10.0 * lo, "{lo} {hi}");
    assert!(rs.iter().all(|r| !r.pass));
}

#[test]
fn ground_state_energy_equation_and_uniform_e() {
    let s = st("hydrogen:1s");
    let g = vgrid(&s);
    for form in [EnergyForm::TwoVelocity, EnergyForm::SingleVelocity] {
        let r = v().energy_equation_residual(&s, &g, 0.0, form).unwrap();
        assert!(r.rel < 1e-10, "{r:?}");
    }
    let e = v().energy_field_stats(&s, &g, 0.0).unwrap();
    assert!((e.mean + 0.5).abs() < 1e-12 && e.std < 1e-10);
    let e = v().with_route(Route::FD_JETS).energy_field_stats(&s, &g, 0.0).unwrap();
    assert!((e.mean + 0.5).abs() < 1e-6 && e.std < 1e-4, "{e:?}");
}

#[test]
fn single_velocity_form_with_fd_jets() {
    let s = st("hydrogen:3d1");
    let r = v()
        .with_route(Route::FD_JETS)
        .energy_equation_residual(&s, &shell(1.0, 8.0), 0.2, EnergyForm::SingleVelocity)
        .unwrap();
    assert!(r.rel < 1e-6, "{r:?}");
}

#[test]
fn oscillator_with_node_skips_it() {
    let s = st("osc1d:1");
    let r = v().energy_equation_residual(&s, &vgrid(&s), 0.4, EnergyForm::TwoVelocity).unwrap();
    assert!(r.rel < 1e-6, "{r:?}");
}

#[test]
fn perturbations_fail_their_own_part() {
    let g = Grid::verification();
    let shifted = st("phase-shifted:hydrogen:2p1");
    let e = v().energy_equation_residual(&shifted, &g, 0.5, EnergyForm::TwoVelocity).unwrap();
    assert!(!e.pass && e.rel > 1e-4, "{e:?}");
    assert!(v().continuity_six(&shifted, &g, 0.5).unwrap().iter().all(|r| r.pass));
    let drift = st("corrupted:hydrogen:2p1");
    assert!(v().continuity_six(&drift, &g, 0.5).unwrap().iter().all(|r| !r.pass));
    let s = st("hydrogen:2p1");
    for form in [EnergyForm::TwoVelocity, EnergyForm::SingleVelocity] {
        assert!(v().energy_equation_residual(&s, &g, 0.5, form).unwrap().pass);
    }
}

#[test]
fn euler_family_for_stationary_states() {
    for s in ["hydrogen:1s", "hydrogen:2p1"] {
        let s = st(s);
        for var in EulerVariant::ALL {
            let r = v().euler_residual(&s, &vgrid(&s), 0.0, var).unwrap();
            assert!(r.rel < 1e-8, "{} {r:?}", s.label());
        }
    }
    let s = st("hydrogen:1s");
    assert!(v().coupling_force_max(&s, &vgrid(&s), 0.0).unwrap() < 1e-12);
    let r = v()
        .with_route(Route::FD)
        .euler_residual(&st("hydrogen:2p1"), &shell(0.5, 8.0), 0.0, EulerVariant::Euler0)
        .unwrap();
    assert!(r.rel < 1e-6, "{r:?}");
}

#[test]
fn euler_hierarchy_for_time_dependent_states() {
    for (s, t) in [("super:1s+2p0", 1.0), ("coherent:1+0.5i", 0.3), ("super:2s+3d1", 2.2)] {
        let s = st(s);
        let g = vgrid(&s);
        for var in EulerVariant::ALL {
            let r = v().euler_residual(&s, &g, t, var).unwrap();
            assert!(r.rel < 1e-6, "{} {r:?}", s.label());
        }
    }
}

#[test]
fn euler_rejects_phase_shift_free_damage() {
    let s = st("corrupted:super:1s+2p0");
    let r = v().euler_residual(&s, &Grid::verification(), 1.0, EulerVariant::Euler3).unwrap();
    assert!(!r.pass, "{r:?}");
}

#[test]
fn momentum_balances() {
    for s in ["hydrogen:2s", "hydrogen:2p1", "osc3d:1.0.1"] {
        let s = st(s);
        let rs = v().momentum_balance_residuals(&s, &vgrid(&s), 0.4).unwrap();
        assert!(max_rel(&rs) < 1e-8, "{rs:?}");
    }
    let s = st("super:1s+2p0");
    let rs = v().momentum_balance_residuals(&s, &vgrid(&s), 1.0).unwrap();
    assert!(max_rel(&rs) < 1e-8, "{rs:?}");
    let rs = v()
        .with_route(Route::FD)
        .momentum_balance_residuals(&s, &shell(0.5, 6.0), 1.0)
        .unwrap();
    assert!(max_rel(&rs) < 1e-5, "{rs:?}");
}

#[test]
fn momentum_rejects_doubled_density_rate() {
    let s = st("super:1s+2p0");
    let bad = |c: f64| {
        v().with_corruption(FlowCorruption {
            dt_rho_factor: c,
            ..Default::default()
        })
        .momentum_balance_residuals(&s, &vgrid(&s), 1.0)
        .unwrap()
    };
    // residual ∂(ρu), largest term 2∂(ρu): exactly one half.
    let r = &bad(2.0)[2];
    assert!(!r.pass && (r.rel - 0.5).abs() < 1e-9, "{r:?}");
    let r = &bad(3.0)[5];
    assert!(r.rel > 0.5, "{r:?}");
}

#[test]
fn conservation_closed_forms() {
    let s = st("hydrogen:1s");
    let c = v().conservation_integrals(&s, &s.reference_grid(), 0.0).unwrap();
    assert!(c.int_p_first.abs() < 1e-6 && c.int_p_second.abs() < 1e-6);
    assert!((c.kinetic - 0.5).abs() < 1e-6 && (c.int_e_rho + 0.5).abs() < 1e-6);
    let s = st("super:1s+2s");
    for t in [0.0, 1.3, 4.0] {
        let c = v().conservation_integrals(&s, &s.reference_grid(), t).unwrap();
        assert!((c.target_energy.unwrap() + 0.3125).abs() < 1e-15);
        assert!((c.int_e_rho + 0.3125).abs() < 1e-6 && c.int_f_rho.abs() < 1e-6, "{c:?}");
    }
    let s = st("hydrogen:2s");
    let c = v().conservation_integrals(&s, &s.reference_grid(), 0.0).unwrap();
    assert!((c.kinetic - 0.125).abs() < 1e-6);
    assert!(v().conservation_reports(&s, &s.reference_grid(), 0.0).unwrap().iter().all(|r| r.pass));
}

#[test]
fn bohmian_forms() {
    let s = st("hydrogen:1s");
    let rs = v().bohmian_equivalence(&s, &vgrid(&s), 0.0).unwrap();
    assert!(max_rel(&rs) < 1e-10, "{rs:?}");
    let c = st("coherent:1+0.5i");
    let rs = v().bohmian_equivalence(&c, &vgrid(&c), 0.3).unwrap();
    assert!(max_rel(&rs) < 1e-10, "{rs:?}");
    let rs = v().with_route(Route::FD).bohmian_equivalence(&c, &vgrid(&c), 0.3).unwrap();
    assert!(max_rel(&rs) < 1e-5, "{rs:?}");
    let bad = v().with_corruption(FlowCorruption {
        drop_pressure_in_q: true,
        ..Default::default()
    });
    let rs = bad.bohmian_equivalence(&s, &shell(0.1, 0.99), 0.0).unwrap();
    assert!(rs[0].rel > 1e-2 && rs[1].pass, "{rs:?}");
}

#[test]
fn orthogonality_classification() {
    let s = st("hydrogen:2p1");
    let o = v().orthogonality_diagnostics(&s, &vgrid(&s), 0.0).unwrap();
    assert!(o.smooth && o.max_div_v < 1e-12, "{o:?}");
    let o = v().with_route(Route::FD).orthogonality_diagnostics(&s, &shell(0.5, 6.0), 0.0).unwrap();
    assert!(o.smooth, "{o:?}");
    let s = st("hydrogen:1s");
    assert!(v().orthogonality_diagnostics(&s, &vgrid(&s), 0.0).unwrap().smooth);
    let c = st("coherent:1+0.5i");
    let o = v().orthogonality_diagnostics(&c, &vgrid(&c), 0.9).unwrap();
    assert!(!o.smooth && o.max_u_dot_v > 1e-2, "{o:?}");
}

#[test]
fn many_body_states_are_rejected() {
    let s = st("he:1.6875");
    assert!(matches!(
        v().continuity_six(&s, &Grid::verification(), 0.0),
        Err(QflowError::Unsupported(_))
    ));
}

#[test]
fn suite_names_parse() {
    assert_eq!("euler".parse::<Suite>().unwrap(), Suite::Euler);
    assert!("bogus".parse::<Suite>().is_err());
    let s = st("hydrogen:2p1");
    let rs = v().run(Suite::All, &s, &vgrid(&s), 0.0).unwrap();
    assert!(rs.iter().all(|r| r.pass), "{rs:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Random two-term superpositions solve every local equation.
    #[test]
    fn superpositions_pass_every_suite(
        a in 0.1f64..1.0, phase in 0.0f64..6.2, t in 0.0f64..5.0,
        pair in prop::sample::select(vec![("1s", "2p0"), ("2s", "3d1"), ("2p1", "3p-1"), ("1s", "3s")]),
    ) {
        let b = (1.0 - a * a).sqrt();
        let spec = StateSpec::Superposition {
            terms: vec![
                crate::analytic_states::Term { coeff: [a, 0.0], state: StateSpec::from_shorthand(&format!("hydrogen:{}", pair.0)).unwrap() },
                crate::analytic_states::Term {
                    coeff: [b * phase.cos(), b * phase.sin()],
                    state: StateSpec::from_shorthand(&format!("hydrogen:{}", pair.1)).unwrap(),
                },
            ],
        };
        let s = QuantumState::new(spec).unwrap();
        let g = Grid::spherical(0.3, 9.0, 6, 5, 5).unwrap();
        let samples = v().sample(&s, &g, t).unwrap();
        let ver = v();
        let mut rs = ver.continuity_from(&samples);
        rs.extend(ver.momentum_from(&samples));
        rs.extend(ver.bohmian_from(&samples));
        rs.push(ver.energy_from(&samples, EnergyForm::TwoVelocity));
        rs.push(ver.energy_from(&samples, EnergyForm::SingleVelocity));
        for var in EulerVariant::ALL {
            rs.push(ver.euler_from(&samples, var));
        }
        for r in &rs {
            prop_assert!(r.rel < 1e-8, "{}: {}", r.name, r.rel);
        }
    }
}

