mod common;

use common::*;
use rand::Rng;
use tradebloc_core::economy::welfare;
use tradebloc_core::tariff_game::{
    best_response, constrained_best_response_iteration, nash_by_iteration, nash_closed_form,
    nash_tariff, nash_welfare, own_tariff_curvature, total_welfare, world_optimum_residuals,
    IterationSettings,
};
use tradebloc_core::{Exact, ModelError, ModelParams, Scalar, TariffProfile};

#[test]
fn example_nash_tariff_and_welfare() {
    let p = ModelParams::example_exact();
    let ne = nash_closed_form(&p);
    assert_eq!(ne.tariff, exact("36/223"));
    let thm = exact("6336/13") - exact("7") * exact("38/52") * &ne.tariff * &ne.tariff;
    assert_eq!(ne.welfare, thm);
    assert_eq!(welfare(&p, &ne.profile).unwrap().welfare, vec![thm; 8]);
}

#[test]
fn closed_form_matches_iteration_on_grid() {
    let settings = IterationSettings::default();
    for p in float_grid() {
        let ne = nash_closed_form(&p);
        let (it, _) = nash_by_iteration(&p, &TariffProfile::zero(p.n()), settings).unwrap();
        assert!(it.profile.max_abs_diff(&ne.profile) <= 10.0 * settings.tol);
        let high = TariffProfile::uniform(p.n(), p.a() / 2.0).unwrap();
        let (it, _) = nash_by_iteration(&p, &high, settings).unwrap();
        assert!(it.profile.max_abs_diff(&ne.profile) <= 10.0 * settings.tol);
    }
}

#[test]
fn random_starts_reach_one_fixed_point() {
    let mut rng = rng(3);
    let settings = IterationSettings::default();
    for p in [ModelParams::example(), ModelParams::new(5, 1.0, 0.5).unwrap()] {
        let ends: Vec<_> = (0..20)
            .map(|_| {
                let start = TariffProfile::from_fn(p.n(), |_, _| rng.gen_range(0.0..*p.a())).unwrap();
                nash_by_iteration(&p, &start, settings).unwrap().0.profile
            })
            .collect();
        for x in &ends {
            for y in &ends {
                assert!(x.max_abs_diff(y) <= 10.0 * settings.tol);
            }
        }
    }
}

#[test]
fn starting_at_the_fixed_point_takes_no_steps() {
    let p = ModelParams::new(4, 1.0, 1.0).unwrap();
    let ne = nash_closed_form(&p);
    let (_, steps) = nash_by_iteration(&p, &ne.profile, IterationSettings::default()).unwrap();
    assert_eq!(steps, 0);
}

#[test]
fn iteration_reports_non_convergence() {
    let p = ModelParams::example();
    let tight = IterationSettings { tol: 1e-12, max_iters: 2 };
    assert!(matches!(
        nash_by_iteration(&p, &TariffProfile::zero(8), tight),
        Err(ModelError::NoConvergence { .. })
    ));
    let bad = IterationSettings { tol: 0.0, max_iters: 10 };
    assert!(nash_by_iteration(&p, &TariffProfile::zero(8), bad).is_err());
}

#[test]
fn best_response_properties() {
    let p = ModelParams::example_exact();
    let zero = TariffProfile::zero(8);
    let d = p.price_denominator();
    assert_eq!(best_response(&p, &zero, 0, 1).unwrap(), exact("432") / (&d * &d - Exact::of_int(4)));
    let ne = nash_closed_form(&p);
    assert_eq!(best_response(&p, &ne.profile, 3, 6).unwrap(), ne.tariff);
    assert!(best_response(&p, &zero, 2, 2).is_err());
    let mut prev = best_response(&p, &zero, 0, 1).unwrap();
    let mut t = zero.clone();
    for step in 1..=10 {
        t.set(4, 1, exact("1/10") * Exact::of_int(step)).unwrap();
        let next = best_response(&p, &t, 0, 1).unwrap();
        assert!(next > prev);
        prev = next;
    }
    // own tariff on j does not enter i's best response
    t.set(0, 1, exact("1")).unwrap();
    assert_eq!(best_response(&p, &t, 0, 1).unwrap(), prev);
}

#[test]
fn nash_tariff_falls_with_world_size_and_vanishes_with_lambda() {
    for (a, lambda) in [("1", "1/2"), ("12", "36"), ("12", "4")] {
        let mut prev: Option<Exact> = None;
        for n in 3..=50 {
            let t = nash_tariff(&exact_params(n, a, lambda));
            assert!(t > Exact::of_int(0));
            if let Some(prev) = prev {
                assert!(t < prev, "n = {n}");
            }
            prev = Some(t);
        }
    }
    let tiny = ModelParams::new(8, 12.0, 1e-12).unwrap();
    assert!(nash_tariff(&tiny) < 1e-11);
}

#[test]
fn welfare_decreases_in_a_common_tariff() {
    for p in exact_grid().into_iter().step_by(5) {
        let tne = nash_tariff(&p);
        let mut prev = welfare(&p, &TariffProfile::zero(p.n())).unwrap().welfare[0].clone();
        for k in 1..=20 {
            let t = &tne * Exact::of_int(k) / Exact::of_int(10);
            let w = welfare(&p, &TariffProfile::uniform(p.n(), t).unwrap()).unwrap().welfare[0].clone();
            assert!(w < prev);
            prev = w;
        }
        assert_eq!(nash_welfare(&p), nash_closed_form(&p).welfare);
    }
}

#[test]
fn second_order_condition_holds() {
    for p in exact_grid() {
        assert!(own_tariff_curvature(&p) < Exact::of_int(0));
    }
}

#[test]
fn world_optimum_residuals_signs() {
    let p = ModelParams::example_exact();
    let at_zero = world_optimum_residuals(&p, &TariffProfile::zero(8));
    let ne = nash_closed_form(&p);
    let at_ne = world_optimum_residuals(&p, &ne.profile);
    for i in 0..8 {
        for j in (0..8).filter(|&j| j != i) {
            assert_eq!(at_zero.get(i, j), &Exact::of_int(0));
            assert!(at_ne.get(i, j) > &Exact::of_int(0));
        }
    }
}

#[test]
fn free_trade_maximizes_world_welfare() {
    let mut rng = rng(99);
    let p = ModelParams::example();
    let best = total_welfare(&p, &TariffProfile::zero(8)).unwrap();
    for _ in 0..1000 {
        let t = random_profile(&p, &mut rng);
        assert!(total_welfare(&p, &t).unwrap() < best);
    }
}

#[test]
fn constrained_iteration_keeps_pinned_coordinates_at_zero() {
    let p = ModelParams::example();
    let members = |c: usize| c < 5;
    let out = constrained_best_response_iteration(
        &p,
        &TariffProfile::zero(8),
        |i, j| members(i) && members(j),
        IterationSettings::default(),
    )
    .unwrap();
    assert_eq!(*out.profile.get(0, 1), 0.0);
    assert!(*out.profile.get(5, 0) > 0.0);
}
