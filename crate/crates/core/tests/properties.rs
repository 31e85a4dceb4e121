use mminf_core::lab::{sweep_case, sweep_tally, two_point_u, variational_value, FunctionSampler, InequalityId, InequalityParams};
use mminf_core::queue::{carre_du_champ, gamma_two, generator_apply, mehler_law, semigroup_values};
use mminf_core::report::{Case, Tally};
use mminf_core::scaling::{k_constant, k_star_constant, theta, GaussianMeasure};
use mminf_core::simulator::{simulate_path, ScalingConfig};
use mminf_core::transform::{transform_a, transform_b, transform_c, TransformPoint};
use mminf_core::{DiscreteMeasure, GridFunction, Interval, PhiFunction, QueueParams};
use proptest::prelude::*;

fn admissible() -> Vec<PhiFunction> {
    vec![PhiFunction::p1(), PhiFunction::p2(), PhiFunction::p3(1.5).unwrap(), PhiFunction::power_mixture()]
}

fn close(a: f64, b: f64, rel: f64, scale: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(scale)
}

fn positive_values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.05f64..20.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn transforms_are_nonnegative_and_satisfy_the_sum_rule(i in 0usize..4, u in 0.01f64..50.0, w in 0.01f64..50.0) {
        let phi = &admissible()[i];
        let pt = TransformPoint::from_ends(u, w);
        let a = transform_a(phi, pt).unwrap();
        let at = transform_a(phi, pt.tau()).unwrap();
        let b = transform_b(phi, pt).unwrap();
        let bt = transform_b(phi, pt.tau()).unwrap();
        let c = transform_c(phi, u, w - u).unwrap();
        prop_assert!(a >= 0.0 && b >= 0.0 && c >= 0.0);
        let scale = phi.eval(u).abs() + phi.eval(w).abs() + (phi.d1(u) * (w - u)).abs();
        prop_assert!(close(a + at, b, 1e-10, 1e-12 * scale), "{a} + {at} vs {b}");
        prop_assert!(close(b, bt, 1e-10, 1e-12 * scale));
        prop_assert!(a <= b * (1.0 + 1e-12) + 1e-14 * scale);
    }

    #[test]
    fn quadratic_transforms_collapse(u in -10.0f64..10.0, v in -10.0f64..10.0) {
        let phi = PhiFunction::p2();
        let pt = TransformPoint::new(u, v);
        let (a, b, c) = (transform_a(&phi, pt).unwrap(), transform_b(&phi, pt).unwrap(), transform_c(&phi, u, v).unwrap());
        prop_assert_eq!(2.0 * a, b);
        prop_assert_eq!(b, c);
    }

    #[test]
    fn affine_phi_has_zero_transforms(s in -3.0f64..3.0, c in -3.0f64..3.0, u in -5.0f64..5.0, v in -5.0f64..5.0) {
        let phi = PhiFunction::affine(s, c, Interval::REAL);
        let pt = TransformPoint::new(u, v);
        prop_assert!(transform_a(&phi, pt).unwrap().abs() < 1e-12);
        prop_assert!(transform_b(&phi, pt).unwrap().abs() < 1e-12);
        prop_assert!(transform_c(&phi, u, v).unwrap().abs() < 1e-12);
    }

    #[test]
    fn measures_are_normalised(rho in 0.0f64..40.0, n in 0u64..30, p in 0.0f64..=1.0) {
        for m in [DiscreteMeasure::poisson(rho).unwrap(), DiscreteMeasure::binomial(n, p).unwrap(), DiscreteMeasure::binpoi(n, p, rho).unwrap()] {
            prop_assert!(m.weights().iter().all(|&w| w >= 0.0));
            prop_assert!(m.tail_bound() <= 1e-12);
            prop_assert!((m.captured_mass() + m.tail_bound() - 1.0).abs() <= 1e-15 * 4.0);
        }
        prop_assert_eq!(DiscreteMeasure::binomial(n, p).unwrap().len() as u64, n + 1);
        let conv = DiscreteMeasure::binomial(n, p).unwrap().convolve(&DiscreteMeasure::poisson(rho).unwrap());
        let direct = DiscreteMeasure::binpoi(n, p, rho).unwrap();
        for k in 0..direct.len().min(conv.len()) {
            prop_assert!((conv.weight(k) - direct.weight(k)).abs() < 1e-14);
        }
    }

    #[test]
    fn entropy_is_nonnegative_and_blind_to_affine_terms(i in 0usize..4, vals in positive_values(48), s in -2.0f64..2.0, c in -2.0f64..2.0, rho in 0.3f64..4.0) {
        let phi = &admissible()[i];
        let m = DiscreteMeasure::poisson(rho).unwrap();
        let f = GridFunction::new(vals, phi.interval()).unwrap();
        let ent = m.phi_entropy(phi, &f).unwrap();
        let scale = f.values().iter().map(|&u| phi.eval(u).abs()).fold(0.0, f64::max);
        prop_assert!(ent >= -1e-12 * scale.max(1.0));
        let shifted = m.phi_entropy(&phi.plus_affine(s, c), &f).unwrap();
        prop_assert!((shifted - ent).abs() <= 1e-10 * scale.max(1.0), "{shifted} vs {ent}");
    }

    #[test]
    fn variational_formula_is_maximised_at_f(i in 0usize..4, fv in positive_values(48), gv in positive_values(48), rho in 0.3f64..4.0) {
        let phi = &admissible()[i];
        let m = DiscreteMeasure::poisson(rho).unwrap();
        let f = GridFunction::new(fv, phi.interval()).unwrap();
        let g = GridFunction::new(gv, phi.interval()).unwrap();
        let ent = m.phi_entropy(phi, &f).unwrap();
        let scale = f.values().iter().chain(g.values()).map(|&u| phi.eval(u).abs() + phi.d1(u).abs() * u).fold(0.0, f64::max);
        prop_assert!(variational_value(phi, &m, &f, &g).unwrap() <= ent + 1e-10 * scale);
        prop_assert!((variational_value(phi, &m, &f, &f).unwrap() - ent).abs() <= 1e-10 * scale);
    }

    #[test]
    fn generator_commutes_and_is_self_adjoint(vals in proptest::collection::vec(-3.0f64..3.0, 60), t in 0.01f64..3.0, lam in 0.2f64..3.0, mu in 0.2f64..3.0) {
        let q = QueueParams::new(lam, mu).unwrap();
        let f = GridFunction::real(vals.clone());
        let lf = generator_apply(&q, &f).unwrap();
        let df = f.d_forward();
        let ldf = generator_apply(&q, &df).unwrap();
        for n in 0..20i64 {
            let lhs = ldf.at(n) - (lf.at(n + 1) - lf.at(n));
            prop_assert!((lhs - mu * df.at(n)).abs() < 1e-11 * (1.0 + (lam + 30.0 * mu) * 10.0));
        }
        let g = GridFunction::real(vals.iter().rev().map(|x| x.sin()).collect());
        let inv = DiscreteMeasure::poisson(q.rho()).unwrap();
        let count = inv.len();
        let reach = count - 1 + DiscreteMeasure::poisson(q.rho_q(t)).unwrap().max_index();
        prop_assume!(reach < 60);
        let pf = semigroup_values(&q, t, &f, count).unwrap();
        let pg = semigroup_values(&q, t, &g, count).unwrap();
        let left = inv.expect_with(|k| g.at(k as i64) * pf.at(k as i64));
        let right = inv.expect_with(|k| f.at(k as i64) * pg.at(k as i64));
        prop_assert!((left - right).abs() < 1e-10 * 10.0, "{left} vs {right}");
    }

    #[test]
    fn curvature_bound_holds_pointwise(vals in proptest::collection::vec(-3.0f64..3.0, 30), lam in 0.2f64..3.0, mu in 0.2f64..3.0) {
        let q = QueueParams::new(lam, mu).unwrap();
        let f = GridFunction::real(vals);
        let g1 = carre_du_champ(&q, &f).unwrap();
        let g2 = gamma_two(&q, &f).unwrap();
        for n in 0..25i64 {
            prop_assert!(g2.at(n) >= 0.5 * mu * g1.at(n) - 1e-10 * (1.0 + g1.at(n).abs() * (lam + mu * 30.0)));
        }
    }

    #[test]
    fn mehler_mean_and_mass(lam in 0.0f64..5.0, mu in 0.1f64..3.0, t in 0.0f64..6.0, n in 0usize..15) {
        let q = QueueParams::new(lam, mu).unwrap();
        let law = mehler_law(&q, t, n).unwrap();
        let expect = n as f64 * q.p(t) + q.rho_q(t);
        prop_assert!((law.mean() - expect).abs() < 1e-10 * (1.0 + expect));
    }

    #[test]
    fn paths_move_by_single_steps(lam in 0.0f64..4.0, mu in 0.0f64..2.0, n0 in 0u64..10, seed in any::<u64>()) {
        prop_assume!(lam + mu > 0.0);
        let q = QueueParams::new(lam, mu).unwrap();
        let a = simulate_path(&q, n0, 5.0, seed).unwrap();
        prop_assert_eq!(&a, &simulate_path(&q, n0, 5.0, seed).unwrap());
        prop_assert!(a.states.windows(2).all(|w| w[0].abs_diff(w[1]) == 1));
        prop_assert!(a.jump_times.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(a.jump_times.iter().all(|&s| s <= 5.0));
    }

    #[test]
    fn scaled_start_is_nonnegative(n in 1u64..5000, x in 0.0f64..5.0, y in -1.0f64..1.0) {
        let cfg = ScalingConfig { n_scale: n, x, y, t_max: 1.0, paths: 1, seed: 0 };
        if cfg.validate().is_ok() {
            let z = cfg.initial_state() as f64;
            prop_assert_eq!(z, (n as f64 * x + (n as f64).sqrt() * y).floor());
        }
    }

    #[test]
    fn sampled_functions_stay_inside_the_interval(i in 0usize..4, seed in any::<u64>(), index in 0u64..1000, len in 2usize..40) {
        let phi = &admissible()[i];
        let f = FunctionSampler::mixed(seed).draw(phi, len, index).unwrap();
        prop_assert!(f.values().iter().all(|&u| phi.interval().contains(u)));
    }

    #[test]
    fn sweep_cases_are_reproducible(seed in any::<u64>(), index in 0u64..5000) {
        let params = InequalityParams::default();
        let s = FunctionSampler::mixed(seed);
        let phi = PhiFunction::p1();
        let a = sweep_case(InequalityId::PoissonA, &phi, &params, &s, index).unwrap();
        prop_assert_eq!(a.clone(), sweep_case(InequalityId::PoissonA, &phi, &params, &s, index).unwrap());
        let mut t = sweep_tally(InequalityId::PoissonA, &phi, &s);
        t.record(a);
        prop_assert_eq!(t.finish().seed, Some(seed));
    }

    #[test]
    fn pass_iff_slack_within_tolerance(cases in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..30), tol in 1e-12f64..1e-1) {
        let mut t = Tally::inequality("p", tol);
        for (i, (l, r)) in cases.iter().enumerate() {
            t.record(Case::new(i, *l, *r));
        }
        let rep = t.finish();
        let min = cases.iter().map(|(l, r)| Case::new(0, *l, *r).slack()).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(rep.min_slack, Some(min));
        prop_assert_eq!(rep.pass, min >= -tol);
    }

    #[test]
    fn slack_is_scale_invariant(l in -10.0f64..10.0, r in -10.0f64..10.0, c in 1e-3f64..1e3) {
        let a = Case::new(0, l, r).slack();
        let b = Case::new(0, c * l, c * r).slack();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn a_weight_makes_the_two_point_criterion_hold(i in 0usize..4, a in 0.05f64..10.0, b in 0.05f64..10.0) {
        let phi = &admissible()[i];
        let g = [transform_a(phi, TransformPoint::from_ends(a, b)).unwrap(), transform_a(phi, TransformPoint::from_ends(b, a)).unwrap()];
        let r = two_point_u(phi, [a, b], g, 201).unwrap();
        prop_assert!(r.criterion && r.grid_nonpositive);
    }

    #[test]
    fn local_constants_are_ordered(lam in 0.1f64..5.0, mu in 0.1f64..3.0, t in 0.0f64..10.0, dt in 0.0f64..2.0) {
        let q = QueueParams::new(lam, mu).unwrap();
        prop_assert!(k_constant(&q, t).unwrap() >= k_star_constant(&q, t).unwrap());
        let (a, b) = (theta(&q, t), theta(&q, t + dt));
        prop_assert!((1.0..=1.5).contains(&a));
        prop_assert!(b <= a + 1e-15);
    }

    #[test]
    fn hermite_rule_integrates_low_moments(mean in -5.0f64..5.0, var in 0.01f64..20.0) {
        let gm = GaussianMeasure::new(mean, var).unwrap();
        prop_assert!(gm.moment_defects().iter().all(|&d| d < 1e-10));
    }
}
