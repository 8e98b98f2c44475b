// SPDX-License-Identifier: Apache-2.0

//! Invariants over random parameters.

use czscatter::gate::{fidelity_closed_form, ideal_gate_limit, process_fidelity, CZ_DIAGONAL};
use czscatter::photonic::{
    bright_dark_transform, inverse_bright_dark_transform, verify_equivalence, GroundDoubletState,
};
use czscatter::scattering::{
    closed_form_solver_convention, open_line_operators, reflection_amplitude_closed_form,
    solve_stationary_state_gamma,
};
use czscatter::table::SweepTable;
use czscatter::{Complex64, CouplingModel, Geometry, LambdaAtomParams, ReflectionGate, SpinConfig};
use proptest::prelude::*;

fn config() -> impl Strategy<Value = SpinConfig> {
    (0usize..4).prop_map(|i| SpinConfig::from_index(i).unwrap())
}

fn geometry() -> impl Strategy<Value = Geometry> {
    (0.05f64..20.0, 0.05f64..20.0).prop_map(|(x2, gap)| Geometry::new(x2, x2 + gap).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 1000,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn reflection_has_unit_modulus(
        c in config(),
        gamma in 0.0f64..1e3,
        g in geometry(),
        k in 0.05f64..5.0,
    ) {
        let solved = solve_stationary_state_gamma(c, gamma, &g, k).unwrap();
        prop_assert!((solved.r.norm() - 1.0).abs() < 1e-10, "|r| = {}", solved.r.norm());
        let closed = reflection_amplitude_closed_form(c, gamma, &g, k).unwrap();
        prop_assert!((closed.norm() - 1.0).abs() < 1e-13);
        let convention = closed_form_solver_convention(c, gamma, &g, k).unwrap();
        prop_assert!((solved.r - convention).norm() < 1e-8, "{} vs {}", solved.r, convention);
    }

    #[test]
    fn open_line_is_complete(
        gamma in 0.0f64..1e3,
        x2 in 0.05f64..20.0,
        k in 0.05f64..5.0,
    ) {
        let model = CouplingModel::massive_from_gamma(gamma, k, 1.0).unwrap();
        let result = open_line_operators(&model, x2, k).unwrap();
        prop_assert!(result.completeness_deviation() < 1e-12, "{}", result.completeness_deviation());
    }

    #[test]
    fn photonic_matches_massive(
        velocity in 0.5f64..2.0,
        omega0 in 0.5f64..1.5,
        coupling in 0.0f64..0.5,
        g in geometry(),
        detuning in prop_oneof![-0.5f64..-1e-3, 1e-3f64..0.5],
    ) {
        let params = LambdaAtomParams::new(velocity, omega0, coupling).unwrap();
        let k = (omega0 + detuning) / velocity;
        prop_assume!(k > 0.0);
        let report = verify_equivalence(&params, &g, &[k]).unwrap();
        prop_assert!(report.max_deviation < 1e-8, "{report:?}");
    }

    #[test]
    fn fidelity_routes_agree(g in geometry(), k in 0.0f64..5.0) {
        let gate = ideal_gate_limit(k, &g).unwrap();
        let cz = ReflectionGate::new(CZ_DIAGONAL).matrix();
        let chi = process_fidelity(&gate.matrix(), &cz).unwrap();
        prop_assert!((chi - fidelity_closed_form(k, &g)).abs() < 1e-12);
        prop_assert!((-1e-15..=1.0 + 1e-15).contains(&chi));
    }

    #[test]
    fn bright_dark_round_trip(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, d in -1.0f64..1.0) {
        let n = (a * a + b * b + c * c + d * d).sqrt();
        prop_assume!(n > 1e-3);
        let state = GroundDoubletState::new(Complex64::new(a / n, b / n), Complex64::new(c / n, d / n)).unwrap();
        let (p, m) = bright_dark_transform(&state);
        prop_assert!((p.norm_sqr() + m.norm_sqr() - 1.0).abs() < 1e-14);
        let (g0, g1) = inverse_bright_dark_transform(p, m);
        prop_assert!((g0 - state.g0).norm() < 1e-15 && (g1 - state.g1).norm() < 1e-15);
    }

    #[test]
    fn sweep_table_round_trips(
        rows in prop::collection::vec(prop::collection::vec(-1e300f64..1e300, 3), 0..20),
        note in "[a-z ]{0,12}",
    ) {
        let mut table = SweepTable::new(["a", "b", "c"]).with_meta("note", &note).with_meta("gamma", 1e3);
        for r in rows {
            table.push_row(r).unwrap();
        }
        prop_assert_eq!(&SweepTable::from_csv(&table.to_csv()).unwrap(), &table);
        prop_assert_eq!(&SweepTable::from_json(&table.to_json()).unwrap(), &table);
    }
}
