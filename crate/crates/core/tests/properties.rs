mod common;

use common::{catalog, exponential, random_expr, same_eval};
use dyadic_ivp::euler_grid::CONTAINMENT_PAIR_SAMPLES;
use dyadic_ivp::{
    build_grid, choose_level, containment_check, parse, rect_of, refinement_report,
    validate_problem, Problem, Solution,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn certified_bound_is_sound_on_catalog() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for entry in catalog() {
        let p = &entry.problem;
        for m in [4, 8, 12] {
            let s = Solution::build(p, m).unwrap();
            for _ in 0..1000 {
                let t = rng.gen_range(p.t0()..=p.t_end());
                let e = s.evaluate(t).unwrap();
                let err = (e.value - (entry.exact)(t)).abs();
                assert!(
                    err <= e.bound,
                    "{} m={m} t={t}: {err} > {}",
                    entry.name,
                    e.bound
                );
                assert!(e.bound <= s.eval_bound() * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn lipschitz_modulus_at_finite_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for entry in catalog() {
        let p = &entry.problem;
        let s = Solution::build(p, 9).unwrap();
        for _ in 0..1000 {
            let t = rng.gen_range(p.t0()..=p.t_end());
            let u = rng.gen_range(p.t0()..=p.t_end());
            let diff = (s.evaluate(t).unwrap().value - s.evaluate(u).unwrap().value).abs();
            assert!(diff <= p.m_bound() * (t - u).abs() + 2.0 * s.eval_bound());
        }
    }
}

#[test]
fn refinement_by_two_levels_is_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for entry in catalog() {
        let p = &entry.problem;
        for m in [3, 6, 9] {
            let coarse = Solution::build(p, m).unwrap();
            let fine = Solution::build(p, m + 2).unwrap();
            for _ in 0..200 {
                let t = rng.gen_range(p.t0()..=p.t_end());
                let (a, b) = (coarse.evaluate(t).unwrap(), fine.evaluate(t).unwrap());
                assert!((a.value - b.value).abs() <= a.bound + b.bound);
            }
        }
    }
}

#[test]
fn evaluation_starts_at_initial_value() {
    for entry in catalog() {
        let p = &entry.problem;
        for m in 1..=12 {
            assert_eq!(
                Solution::build(p, m)
                    .unwrap()
                    .evaluate(p.t0())
                    .unwrap()
                    .value,
                p.x0()
            );
        }
    }
}

#[test]
fn containment_and_decay_on_catalog() {
    for entry in catalog() {
        let p = &entry.problem;
        let grids: Vec<_> = (1..=12).map(|m| build_grid(p, m).unwrap()).collect();
        for g in &grids {
            assert!(
                containment_check(g, 0).ok,
                "{} level {}",
                entry.name,
                g.level()
            );
        }
        for w in grids[2..].windows(2) {
            let r = refinement_report(&w[0], &w[1]).unwrap();
            assert!(r.bound_satisfied, "{} level {}", entry.name, r.level);
            assert_eq!(r.deltas[0], 0.0);
        }
    }
}

#[test]
fn containment_seed_changes_sampled_pairs_only() {
    let g = build_grid(&exponential().problem, 11).unwrap();
    let (a, b) = (containment_check(&g, 1), containment_check(&g, 2));
    assert_eq!(a.pairs_checked, CONTAINMENT_PAIR_SAMPLES);
    assert_eq!(a.worst_node, b.worst_node);
    assert_eq!(a, containment_check(&g, 1));
}

#[test]
fn validation_max_is_monotone_on_nested_lattices() {
    let p = Problem::new(
        parse("sin(3*t)*cos(x) + x/4").unwrap(),
        0.2,
        -0.4,
        1.3,
        2.0,
        4.0,
    )
    .unwrap();
    let mut last = 0.0;
    for n in [2, 4, 8, 16, 32, 64, 128] {
        let r = validate_problem(&p, n).unwrap();
        assert!(r.max_abs_f_sampled >= last);
        last = r.max_abs_f_sampled;
    }
    let r3 = validate_problem(&p, 3).unwrap();
    assert!(validate_problem(&p, 9).unwrap().max_abs_f_sampled >= r3.max_abs_f_sampled);
}

#[test]
fn affine_lipschitz_estimate_is_exact() {
    // dyadic coefficients and window keep every difference quotient exact
    for (pt, qx) in [(0.5, -2.0), (-3.0, 1.25), (0.0, 0.75), (4.0, 0.0)] {
        let f = move |t: f64, x: f64| pt * t + qx * x + 0.125;
        let p = Problem::new(f, 0.0, 0.5, 1.0, 8.0, 5.0).unwrap();
        for n in [2, 8, 64] {
            let r = validate_problem(&p, n).unwrap();
            assert_eq!(
                r.lipschitz_estimate,
                f64::max(pt.abs(), qx.abs()),
                "p={pt} q={qx} n={n}"
            );
        }
    }
}

#[test]
fn affine_expressions_evaluate_exactly() {
    let e = parse("3*t - 0.5*x + 2").unwrap();
    for (t, x) in [(1.0, 2.0), (0.25, -4.0), (1024.0, 0.125)] {
        assert_eq!(e.eval(t, x).unwrap(), 3.0 * t - 0.5 * x + 2.0);
    }
}

#[test]
fn choose_level_is_monotone() {
    let p = exponential().problem;
    let mut eps = 1.0;
    let mut last = choose_level(&p, eps).unwrap();
    while eps > 1e-10 {
        eps /= 3.0;
        let m = choose_level(&p, eps).unwrap();
        assert!(m >= last);
        last = m;
    }
}

#[test]
fn rect_width_is_exact() {
    for entry in catalog() {
        let p = &entry.problem;
        let u = rect_of(p);
        assert_eq!(u.x_hi - u.x_lo, 2.0 * p.m_bound() * p.a());
        assert_eq!(rect_of(p), u);
    }
}

#[test]
fn printer_round_trip_on_random_expressions() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..1000 {
        let e = random_expr(&mut rng, 5);
        let again = parse(&e.to_string()).unwrap();
        assert!(e.same_shape(&again), "{e}");
        let t = rng.gen_range(-3.0..3.0);
        let x = rng.gen_range(-3.0..3.0);
        assert!(same_eval(&e, &again, t, x), "{e} at ({t}, {x})");
    }
}

proptest! {
    #[test]
    fn printed_literals_survive_reparse(v in 0.0f64..1e12) {
        let e = dyadic_ivp::Expr::num(v);
        let again = parse(&e.to_string()).unwrap();
        prop_assert!(e.same_shape(&again));
    }

    #[test]
    fn grid_build_is_deterministic(x0 in -2.0f64..2.0, m in 1u32..10) {
        let p = Problem::new(parse("cos(t) - x/3").unwrap(), 0.0, x0, 1.0, 10.0, 1.0).unwrap();
        let a = build_grid(&p, m).unwrap();
        let b = build_grid(&p, m).unwrap();
        prop_assert!(a.values().iter().zip(b.values()).all(|(u, v)| u.to_bits() == v.to_bits()));
    }
}

#[test]
fn solutions_are_shareable_across_threads() {
    let p = exponential().problem;
    let s = Solution::build(&p, 10).unwrap();
    let serial: Vec<_> = (0..=8).map(|i| s.evaluate(0.5 * i as f64 / 8.0).unwrap()).collect();
    let parallel: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..=8)
            .map(|i| {
                let s = &s;
                scope.spawn(move || s.evaluate(0.5 * i as f64 / 8.0).unwrap())
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(serial, parallel);
}
