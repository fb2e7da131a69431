use gave::linalg::singular_values;
use gave::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (GaveProblem, DVector<f64>)> {
    (1usize..10, prop::sample::select(vec![0.1, 1.0, 10.0]), any::<u64>(), any::<bool>()).prop_map(
        |(n, gap, seed, identity_b)| {
            let spec = GeneratorSpec::new(n, gap, 1.0, seed).unwrap();
            if identity_b {
                random_solvable_ave(&spec).unwrap()
            } else {
                random_solvable_gave(&spec).unwrap()
            }
        },
    )
}

/// An instance plus a probe at distance roughly `10^e` from the solution.
fn instance_and_probe() -> impl Strategy<Value = (GaveProblem, DVector<f64>, DVector<f64>)> {
    (instance(), prop::collection::vec(-1.0f64..1.0, 10), -3.0f64..3.0).prop_map(|((p, star), dir, e)| {
        let d = DVector::from_column_slice(&dir[..p.dim()]);
        let probe = &star + d * 10f64.powf(e);
        (p, star, probe)
    })
}

fn matrix(max_n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-10.0f64..10.0, n * n).prop_map(move |v| DMatrix::from_row_slice(n, n, &v))
    })
}

fn pair(n: usize) -> impl Strategy<Value = (DVector<f64>, DVector<f64>)> {
    (prop::collection::vec(-1e3f64..1e3, n), prop::collection::vec(-1e3f64..1e3, n))
        .prop_map(|(x, y)| (DVector::from_vec(x), DVector::from_vec(y)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn absolute_value_is_nonexpansive((x, y) in pair(7)) {
        let d = x.abs() - y.abs();
        prop_assert!(d.norm() <= (&x - &y).norm());
    }

    #[test]
    fn singular_value_extremes_and_transpose(m in matrix(8)) {
        let smin = smallest_singular_value(&m).unwrap();
        let norm = spectral_norm(&m).unwrap();
        prop_assert!(smin <= norm);
        let mt = m.transpose();
        let scale = 1e-12 * norm.max(1.0);
        prop_assert!((smallest_singular_value(&mt).unwrap() - smin).abs() <= scale);
        prop_assert!((spectral_norm(&mt).unwrap() - norm).abs() <= scale);
        let reference = m.clone().svd(false, false).singular_values;
        let mut ours = singular_values(&m);
        ours.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in ours.iter().zip(reference.iter()) {
            prop_assert!((a - b).abs() <= 1e-10 * norm.max(1.0));
        }
    }

    #[test]
    fn descent_inequality((p, star, x) in instance_and_probe()) {
        let r = p.residual(&x).unwrap();
        let lhs = (&x - &star).dot(&(p.a().transpose() * &r));
        prop_assert!(lhs - 0.5 * r.norm_squared() >= -1e-9 * (1.0 + x.norm_squared()));
    }

    #[test]
    fn error_bracket_contains_true_error((p, star, x) in instance_and_probe()) {
        let cert = certify(&p);
        let bracket = error_bounds(&p, &cert, &x).unwrap();
        let err = (&x - &star).norm();
        prop_assert!(bracket.lower <= bracket.upper);
        prop_assert!(err >= bracket.lower * (1.0 - 1e-9) && err <= bracket.upper * (1.0 + 1e-9));
    }

    #[test]
    fn gradient_part_is_lipschitz((p, _star) in instance(), seed_x in prop::collection::vec(-1e2f64..1e2, 10), seed_y in prop::collection::vec(-1e2f64..1e2, 10), gamma in 0.1f64..10.0) {
        let n = p.dim();
        let params = FlowParams::from_xi(gamma, 1.0, 1.0, 4.0).unwrap();
        let l = lipschitz_constant(&params, &p);
        let x = DVector::from_column_slice(&seed_x[..n]);
        let y = DVector::from_column_slice(&seed_y[..n]);
        let g = |v: &DVector<f64>| p.a().transpose() * p.residual(v).unwrap() * gamma;
        prop_assert!((g(&x) - g(&y)).norm() <= l * (&x - &y).norm() * (1.0 + 1e-12));
    }

    #[test]
    fn equilibria_are_exactly_solutions((p, star, x) in instance_and_probe()) {
        let params = FlowParams::default();
        let at_star = flow_field(&params, &p, &star).unwrap();
        prop_assert_eq!(at_star.norm() == 0.0, verify_solution(&p, &star, 1e-10).unwrap());
        let away = flow_field(&params, &p, &x).unwrap();
        prop_assert!(away.norm() > 0.0);
        prop_assert!(!verify_solution(&p, &x, 1e-10).unwrap());
    }

    #[test]
    fn field_magnitude_bound((p, _star, x) in instance_and_probe(), l1 in 0.05f64..0.95, l2 in 1.05f64..3.0) {
        let params = FlowParams::new(1.5, 0.7, 1.3, l1, l2).unwrap();
        let rn = p.residual(&x).unwrap().norm();
        let bound = params.gamma() * spectral_norm(p.a()).unwrap()
            * (params.rho1() * rn.powf(l1) + params.rho2() * rn.powf(l2));
        prop_assert!(flow_field(&params, &p, &x).unwrap().norm() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn positive_negative_parts(x in prop::collection::vec(-1e6f64..1e6, 1..12)) {
        let x = DVector::from_vec(x);
        let (z, w) = gave_solution_to_hlcp(&x);
        prop_assert_eq!(&z - &w, x);
        prop_assert!(z.min() >= 0.0 && w.min() >= 0.0);
        prop_assert_eq!(z.dot(&w), 0.0);
    }

    #[test]
    fn hlcp_round_trip_is_exact(c in matrix(6), shift in -5i32..5, p_seed in prop::collection::vec(-1e3f64..1e3, 6)) {
        // Dyadic entries keep halving and re-adding exact.
        let c = c.map(|v| (v * 1024.0).round() / 1024.0);
        let l = c.nrows();
        let d = c.map(|v| v * 2f64.powi(shift)) + DMatrix::identity(l, l);
        let hlcp = HlcpProblem::new(c, d, DVector::from_column_slice(&p_seed[..l])).unwrap();
        let g = hlcp_to_gave(&hlcp);
        prop_assert_eq!(gave_to_hlcp(&g), hlcp.clone());
        prop_assert_eq!(hlcp_to_gave(&hlcp), g);
    }

    #[test]
    fn step_count_is_monotone(eta in 1e-3f64..1.0, factor in 1.0f64..4.0, gap in 0.1f64..5.0, bump in 0.0f64..2.0) {
        let params = FlowParams::default();
        let scalar = |g: f64| GaveProblem::from_row_slices(1, &[1.0 + g], &[1.0], &[1.0]).unwrap();
        let cert = certify(&scalar(gap));
        let k = |e: f64, cert: &Certificate| {
            fixed_step_count(&EulerConfig { eta: e, ..EulerConfig::default() }, &params, cert).unwrap()
        };
        prop_assert!(k(eta * factor, &cert) <= k(eta, &cert));
        prop_assert!(k(eta, &certify(&scalar(gap + bump))) <= k(eta, &cert));
    }
}
