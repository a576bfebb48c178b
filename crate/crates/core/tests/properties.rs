mod common;

use common::*;
use proptest::prelude::*;
use stefan_core::special_fn::{eval_f, eval_g, inv_f, inv_g};
use stefan_core::*;

fn line_instance() -> impl Strategy<Value = RiemannProblem1D> {
    (1usize..=4)
        .prop_flat_map(|m| {
            (
                -2.0..2.0f64,
                prop::collection::vec(0.1..2.0f64, m + 1),
                prop::collection::vec(-1.0..1.0f64, m + 1),
                prop::collection::vec(-1.0..1.0f64, m + 1),
                prop::collection::vec(0.0..3.0f64, m),
            )
        })
        .prop_map(|(u0, steps, la, lk, d)| {
            let mut t = vec![u0];
            for s in steps {
                t.push(t.last().unwrap() + s);
            }
            let a: Vec<f64> = la.iter().map(|e| 10f64.powf(*e)).collect();
            let k: Vec<f64> = lk.iter().map(|e| 10f64.powf(*e)).collect();
            line(&t, &a, &k, &d)
        })
}

fn radial_instance() -> impl Strategy<Value = RadialProblem> {
    (1usize..=3, 2u32..=3)
        .prop_flat_map(|(m, n)| {
            (
                prop::collection::vec(0.1..2.0f64, m),
                prop::collection::vec(-0.5..0.5f64, m + 1),
                prop::collection::vec(-0.5..0.5f64, m + 1),
                prop::collection::vec(0.2..2.0f64, m),
                // Source strength k_m A relative to the total phase weight. For
                // n = 2 the front ratios grow like exp(w_i / (k_m A)), so weak
                // sources put the fronts many decades below the rounding floor
                // of an absolute gradient tolerance; the acceptance suite
                // covers that regime on fixed instances.
                0.5..5.0f64,
                Just(n),
            )
        })
        .prop_map(|(steps, la, lk, d, strength, n)| {
            let mut t = vec![0.0];
            for s in &steps {
                t.push(t.last().unwrap() + s);
            }
            let a: Vec<f64> = la.iter().map(|e| 10f64.powf(*e)).collect();
            let k: Vec<f64> = lk.iter().map(|e| 10f64.powf(*e)).collect();
            let weight: f64 = steps.iter().zip(&k).map(|(s, k)| s * k).sum();
            let amp = strength * weight / k[steps.len()];
            radial(&t, &a, &k, &d, n, amp, 0.0)
        })
}

fn quick() -> SolverSettings {
    SolverSettings { starts: 1, ..Default::default() }
}

/// Random instances can have nearly coincident fronts, where the rounding
/// floor of the gradient grows like the inverse gap and reaches the default
/// tolerance; the acceptance suite enforces the default on fixed instances.
fn line_settings() -> SolverSettings {
    SolverSettings { grad_tol: 1e-10, ..quick() }
}

/// For n = 2 the fronts can still sit close to the origin, where the gradient
/// grows like 1/ξ and the default absolute tolerance is below rounding.
fn radial_settings() -> SolverSettings {
    SolverSettings { grad_tol: 1e-9, ..quick() }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x5e1f_5150),
        ..ProptestConfig::default()
    })]

    #[test]
    fn inv_f_round_trip(p in 1e-12..(1.0 - 1e-12f64)) {
        let x = inv_f(p).unwrap();
        prop_assert!((eval_f(x) - p).abs() <= 1e-13);
    }

    #[test]
    fn inv_g_round_trip(y in 0.01..20.0f64, n in 2u32..=5) {
        let g = eval_g(y, n).unwrap();
        let back = inv_g(g, n).unwrap();
        prop_assert!((back / y - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn line_gradient_and_hessian_match_differences(p in line_instance()) {
        let x = minimize(&p, &line_settings()).unwrap().minimizer;
        let shifted: Vec<f64> = x.iter().enumerate().map(|(i, v)| v + 0.05 * (i as f64 - 0.7)).collect();
        prop_assume!(shifted.windows(2).all(|w| w[0] < w[1]) && p.value(&shifted).is_ok());
        let g = p.gradient(&shifted).unwrap();
        let steps = fd_steps(&shifted, false);
        let fd = fd_gradient(|y| p.value(y).unwrap(), &shifted, &steps);
        let err: Vec<f64> = g.iter().zip(&fd).map(|(a, b)| a - b).collect();
        prop_assert!(max_abs(&err) <= 1e-6 * max_abs(&g).max(1.0));

        let h = p.hessian(&shifted).unwrap();
        for j in 0..shifted.len() {
            let col = fd_gradient(|y| p.gradient(y).unwrap()[j], &shifted, &steps);
            for (i, fd) in col.iter().enumerate() {
                let exact = h.get(i, j);
                prop_assert!((exact - fd).abs() <= 1e-5 * h.norm_inf().max(1.0), "H[{i}][{j}] {exact} vs {fd}");
            }
        }
    }

    #[test]
    fn radial_gradient_matches_differences(p in radial_instance()) {
        let x = minimize(&p, &radial_settings()).unwrap().minimizer;
        let shifted: Vec<f64> = x.iter().enumerate().map(|(i, v)| v * (1.0 + 0.03 * (i as f64 + 1.0))).collect();
        prop_assume!(shifted.windows(2).all(|w| w[0] < w[1]) && p.value(&shifted).is_ok());
        let g = p.gradient(&shifted).unwrap();
        let fd = fd_gradient(|y| p.value(y).unwrap(), &shifted, &fd_steps(&shifted, true));
        let err: Vec<f64> = g.iter().zip(&fd).map(|(a, b)| a - b).collect();
        prop_assert!(max_abs(&err) <= 1e-6 * max_abs(&g).max(1.0));
    }

    #[test]
    fn line_solutions_are_stationary_and_continuous(p in line_instance()) {
        let r = minimize(&p, &line_settings()).unwrap();
        let fronts = FrontVector1D::new(r.minimizer.clone()).unwrap();
        let profile = build_profile(&p, &fronts).unwrap();
        prop_assert!(max_abs(&profile.stefan_residual()) <= 1e-9);
        for i in 1..=p.m() {
            prop_assert!((profile.v(fronts.xi(i)) - p.config.u(i)).abs() <= 1e-12);
        }
        // v'' + ξ v' / (2 a²) = 0 inside each phase.
        for (i, piece) in profile.pieces.iter().enumerate() {
            let lo = if piece.lo.is_finite() { piece.lo } else { piece.hi - 3.0 };
            let hi = if piece.hi.is_finite() { piece.hi } else { piece.lo + 3.0 };
            let xi = 0.5 * (lo + hi);
            let h = 1e-4 * (hi - lo);
            let second = (profile.v_prime(xi + h) - profile.v_prime(xi - h)) / (2.0 * h);
            let a = p.config.a(i);
            let ode = second + xi / (2.0 * a * a) * profile.v_prime(xi);
            prop_assert!(ode.abs() <= 1e-6 * (1.0 + profile.v_prime(xi).abs() * (1.0 + xi.abs())));
        }
    }

    #[test]
    fn fronts_invariant_under_energy_scaling(p in line_instance(), lambda in 0.1..10.0f64, shift in -5.0..5.0f64) {
        // The scaled potential is lambda E up to a constant, so its minimizer is
        // a critical point of E, hence the minimizer of E by strict convexity.
        let base = line_settings();
        let c = &p.config;
        let t: Vec<f64> = c.temperatures.iter().map(|u| u + shift).collect();
        let k: Vec<f64> = c.conductivities.iter().map(|v| v * lambda).collect();
        let d: Vec<f64> = c.latent_heats.iter().map(|v| v * lambda).collect();
        let scaled = line(&t, &c.diffusivities, &k, &d);
        let settings = SolverSettings { grad_tol: base.grad_tol * lambda, ..base };
        let other = minimize(&scaled, &settings).unwrap().minimizer;
        let g = p.gradient(&other).unwrap();
        prop_assert!(max_abs(&g) <= 2.0 * base.grad_tol, "|grad E| = {:e}", max_abs(&g));
    }

    #[test]
    fn radial_solutions_ordered_and_stationary(p in radial_instance()) {
        let r = minimize(&p, &radial_settings()).unwrap();
        prop_assert!(r.minimizer[0] > 0.0);
        prop_assert!(r.minimizer.windows(2).all(|w| w[0] < w[1]));
        let fronts = FrontVectorRadial::from_ascending(r.minimizer.clone(), false).unwrap();
        let profile = build_profile_radial(&p, &fronts).unwrap();
        // The residuals are the gradient components, so they share its tolerance.
        prop_assert!(max_abs(&profile.stefan_residual()) <= 2.0 * radial_settings().grad_tol);
    }

    #[test]
    fn enthalpy_pair_round_trip(p in line_instance(), s in 0.0..1.0f64) {
        let pair = build_enthalpy_pair(&p);
        let lo = p.u_minus();
        let hi = p.u_plus();
        let u = lo + s * (hi - lo);
        let w = pair.beta(u);
        let back = pair.invert_beta(w).unwrap();
        // Compared in enthalpy: a shallow slope k_i/a_i² amplifies rounding in u.
        prop_assert!((pair.beta(back) - w).abs() <= 1e-13 * (1.0 + w.abs()));
        prop_assert!(back >= lo && back <= hi);
        let a2 = p.config.diffusivities.iter().fold(0.0f64, |m, a| m.max(a * a));
        prop_assert!((pair.max_ratio_bound() - a2).abs() <= 1e-12 * a2);
    }
}
