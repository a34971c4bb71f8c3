use qsphere_core::connections::{
    check_hermitian_matrix, check_metric_compatibility, check_torsion_free, check_torsion_free_christoffel,
    gamma_tilde_to_json, identity_matrix, levi_civita, levi_civita_delta_table, metric_connection_from_params,
    perturb, reality_residual, CompatLevel, ConnectionError, HermitianMetric, LCParams, SigmaModule,
};
use qsphere_core::derivations::Index;
use qsphere_core::harness::{
    generic_constant_metric, nonconstant_test_metrics, reality_violating_metric, run_suite, sample_lc_params,
    sample_metric_params, Suite, SuiteConfig,
};
use qsphere_core::{sample, Element, Monomial, Scalar, Side};

fn lc_passes(conn: &qsphere_core::connections::Connection) -> bool {
    check_torsion_free(conn).unwrap().passed()
        && check_metric_compatibility(conn, CompatLevel::GammaTilde).unwrap().passed()
}

#[test]
fn delta_metric_recovers_the_closed_list() {
    let table = levi_civita_delta_table();
    for side in Side::BOTH {
        let conn = levi_civita(&HermitianMetric::delta(3), &LCParams::default(), side).unwrap();
        for a in Index::ALL {
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(conn.gamma_tilde_entry(a, i, j), &table[a.pos()][i][j]);
                }
            }
        }
        assert!(lc_passes(&conn));
        assert!(check_torsion_free_christoffel(&conn).unwrap().passed());
    }
    // six nonzero symbols out of 27
    let nonzero = table.iter().flatten().flatten().filter(|e| !e.is_zero()).count();
    assert_eq!(nonzero, 6);
}

#[test]
fn free_parameters_keep_delta_connections_levi_civita() {
    let mut rng = sample::rng(3);
    for side in Side::BOTH {
        for _ in 0..3 {
            let conn = levi_civita(&HermitianMetric::delta(3), &sample_lc_params(&mut rng), side).unwrap();
            assert!(lc_passes(&conn));
            assert!(check_metric_compatibility(&conn, CompatLevel::Module).unwrap().passed());
        }
    }
}

#[test]
fn non_constant_metrics_on_the_left() {
    let metrics = nonconstant_test_metrics();
    assert_eq!(metrics.len(), 6);
    for (label, m) in metrics {
        let conn = levi_civita(&m, &LCParams::default(), Side::Left).unwrap();
        assert!(lc_passes(&conn), "{label}");
    }
}

#[test]
fn generic_constant_metrics_on_both_sides() {
    let mut rng = sample::rng(11);
    for side in Side::BOTH {
        let m = generic_constant_metric(&mut rng, 3);
        let conn = levi_civita(&m, &LCParams::default(), side).unwrap();
        assert!(lc_passes(&conn));
        assert!(check_torsion_free_christoffel(&conn).unwrap().passed());
    }
}

#[test]
fn perturbations_break_torsion_freeness() {
    let conn = levi_civita(&HermitianMetric::delta(3), &LCParams::default(), Side::Left).unwrap();
    // Γ̃_{+z,+} pairs ω₊ with ω_z, so it enters the torsion
    let bad = perturb(&conn, Index::Plus, 2, 0, Monomial::new(0, 1, 1));
    assert!(!check_torsion_free(&bad).unwrap().passed());
    assert!(!check_metric_compatibility(&bad, CompatLevel::GammaTilde).unwrap().passed());
}

#[test]
fn metric_connections_from_parameters() {
    let mut rng = sample::rng(5);
    let (a, b, r) = sample_metric_params(&mut rng, 3);
    for side in Side::BOTH {
        let module = SigmaModule::one_forms(side);
        let conn = metric_connection_from_params(&module, &HermitianMetric::delta(3), &a, &b, &r).unwrap();
        assert!(check_metric_compatibility(&conn, CompatLevel::GammaTilde).unwrap().passed());
    }
}

#[test]
fn reality_violation_is_rejected_with_its_residual() {
    let m = reality_violating_metric();
    let want = Element::a().pow(2).scale(&Scalar::q_pow(-2));
    assert_eq!(reality_residual(&m.h, Side::Left), want);
    match levi_civita(&m, &LCParams::default(), Side::Left) {
        Err(ConnectionError::Reality { residual }) => assert_eq!(residual, want),
        other => panic!("expected a reality error, got {:?}", other.map(|_| ())),
    }
}

#[test]
fn non_hermitian_matrices_are_rejected() {
    let mut h = identity_matrix(3);
    h[0][1] = Element::a();
    assert!(check_hermitian_matrix(&h, "h").is_err());
    assert!(HermitianMetric::new(h).is_err());
}

#[test]
fn symbols_serialize_with_27_keys() {
    let conn = levi_civita(&HermitianMetric::delta(3), &LCParams::default(), Side::Right).unwrap();
    let v = gamma_tilde_to_json(&conn);
    assert_eq!(v.as_object().unwrap().len(), 27);
}

#[test]
fn suite_runs_are_deterministic() {
    let cfg = SuiteConfig {
        suites: vec![Suite::Algebra, Suite::Torsion],
        max_degree: 1,
        ..SuiteConfig::default()
    };
    let (r1, r2) = (run_suite(&cfg), run_suite(&cfg));
    assert_eq!(r1.to_json(), r2.to_json());
    assert_eq!(r1.exit_code(), 0);
}
