use approx::assert_relative_eq;
use effcon::dynamics::effective_rhs_closed_form;
use effcon::models::velocity_addition;
use effcon::reduction::{pt_moment_roots, DEFAULT_KAPPA};
use effcon::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn var() -> impl Strategy<Value = Var> {
    prop::sample::select(Var::ALL.to_vec())
}

fn poly() -> impl Strategy<Value = PolyExpr> {
    prop::collection::vec(
        (-3i32..=3, prop::collection::vec(var(), 0..3), 0u8..2),
        1..4,
    )
    .prop_map(|terms| {
        let mut out = PolyExpr::zero();
        for (c, vars, h) in terms {
            let mut t = PolyExpr::constant(c as f64);
            for v in vars {
                t = t * PolyExpr::var(v);
            }
            if h == 1 {
                t = t * PolyExpr::hbar();
            }
            out += &t;
        }
        out
    })
}

/// Admissible reduced state for the given ħ.
fn state(hbar: f64) -> impl Strategy<Value = ReducedState> {
    (
        -3.0..3.0f64,
        -3.0..3.0f64,
        0.2..2.0f64,
        -1.0..1.0f64,
        1.0..3.0f64,
    )
        .prop_map(move |(q, p, a, c, u)| {
            let dq2 = a * hbar;
            let dqp = c * hbar;
            let dp2 = u * (0.25 * hbar * hbar + dqp * dqp) / dq2;
            ReducedState::new(q, p, dq2, dqp, dp2)
        })
}

fn moment_state() -> impl Strategy<Value = MomentState> {
    prop::array::uniform14(-2.0..2.0f64).prop_map(|xs| {
        let mut s = MomentState::zeros(AlgebraContext::default());
        for (v, x) in Var::ALL.iter().zip(xs) {
            s.set(*v, x);
        }
        s
    })
}

#[test]
fn jacobi_on_all_coordinate_triples() {
    for a in Var::ALL {
        for b in Var::ALL {
            for c in Var::ALL {
                let (pa, pb, pc) = (PolyExpr::var(a), PolyExpr::var(b), PolyExpr::var(c));
                let j = bracket(&pa, &bracket(&pb, &pc))
                    + bracket(&pb, &bracket(&pc, &pa))
                    + bracket(&pc, &bracket(&pa, &pb));
                assert!(j.is_zero(), "Jacobi fails for ({a}, {b}, {c})");
            }
        }
    }
}

#[test]
fn casimir_commutes_with_physical_moments() {
    let cas = PolyExpr::var(Var::Dq2) * PolyExpr::var(Var::Dp2)
        - PolyExpr::var(Var::Dqp) * PolyExpr::var(Var::Dqp);
    for v in [Var::Dq2, Var::Dqp, Var::Dp2, Var::Dt2, Var::Dtpt, Var::Dpt2] {
        assert!(bracket(&cas, &PolyExpr::var(v)).is_zero(), "{v}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_on_random_polynomials(a in poly(), b in poly(), c in poly()) {
        let j = bracket(&a, &bracket(&b, &c)) + bracket(&b, &bracket(&c, &a)) + bracket(&c, &bracket(&a, &b));
        prop_assert!(j.is_zero());
    }

    #[test]
    fn bracket_is_antisymmetric_and_leibniz(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(bracket(&a, &b), -bracket(&b, &a));
        let lhs = bracket(&a, &(&b * &c));
        let rhs = bracket(&a, &b) * c.clone() + b.clone() * bracket(&a, &c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn text_round_trip(a in poly(), s in -1e3..1e3f64) {
        let p = a.scale(Complex64::new(s, -s / 7.0));
        let back: PolyExpr = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn boost_is_a_group_action(s in moment_state(), v1 in -0.9..0.9f64, v2 in -0.9..0.9f64) {
        let twice = boost(&boost(&s, v1).unwrap(), v2).unwrap();
        let once = boost(&s, velocity_addition(v1, v2)).unwrap();
        for v in Var::ALL {
            let (a, b) = (twice.get(v), once.get(v));
            prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0), "{} {} {}", v, a, b);
        }
    }

    #[test]
    fn boost_by_zero_is_identity(s in moment_state()) {
        prop_assert_eq!(boost(&s, 0.0).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn engine_and_closed_form_rhs_agree(r in state(0.5), m in 0.0..2.0f64) {
        let model = ModelSpec::QuadraticPotential { m };
        let a = effective_rhs(&model, &r, Sign::Plus).unwrap();
        let b = effective_rhs_closed_form(&model, &r).unwrap();
        let scale = b.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        for (x, y) in a.iter().zip(b) {
            prop_assert!((x - y).abs() <= 1e-12 * scale.max(1e-300), "{:?} vs {:?}", a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn casimir_is_conserved_by_the_flow(r in state(0.3), m in 0.0..2.0f64, which in 0usize..3) {
        let model = [ModelSpec::QuadraticPotential { m }, ModelSpec::FreeMassive { m: m + 0.1 }, ModelSpec::Massless][which].clone();
        prop_assume!(!matches!(model, ModelSpec::Massless) || r.p.abs() > 0.05);
        let d = effective_rhs(&model, &r, Sign::Plus).unwrap();
        let rate = r.dp2 * d[2] + r.dq2 * d[4] - 2.0 * r.dqp * d[3];
        let scale = r.dp2 * d[2].abs() + r.dq2 * d[4].abs() + 2.0 * (r.dqp * d[3]).abs();
        prop_assert!(rate.abs() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn massless_moments_do_not_spread(r in state(0.7)) {
        prop_assume!(r.p.abs() > 1e-3);
        let d = effective_rhs(&ModelSpec::Massless, &r, Sign::Plus).unwrap();
        prop_assert_eq!(&d[2..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn constraints_vanish_on_the_free_branch(r in state(0.4), m in 0.1..3.0f64, plus in any::<bool>()) {
        let ctx = AlgebraContext::new(0.4).unwrap();
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let model = ModelSpec::FreeMassive { m };
        let sector = solve_pt_sector(&model, &r, sign, &ctx).unwrap();
        let point = r.embed(&sector, ctx);
        let cs = build_constraints(&model, &ctx).unwrap();
        for (id, c) in cs.iter() {
            let v = c.evaluate(&point);
            prop_assert!(v.norm() <= 1e-11 * (1.0 + r.p * r.p + m * m), "{} = {}", id.label(), v);
        }
    }

    #[test]
    fn gauge_saturates_time_uncertainty(r in state(0.4), m in 0.1..3.0f64) {
        let ctx = AlgebraContext::new(0.4).unwrap();
        let sector = solve_pt_sector(&ModelSpec::FreeMassive { m }, &r, Sign::Plus, &ctx).unwrap();
        prop_assert_eq!(sector.dtpt.im, -0.2);
        let point = r.embed(&sector, ctx);
        let gap = point.get(Var::Dt2) * point.get(Var::Dpt2) - point.get(Var::Dtpt) * point.get(Var::Dtpt);
        prop_assert!((gap - Complex64::new(0.04, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn large_root_fails_the_hierarchy(r in state(0.01), m in 0.5..3.0f64, quad in any::<bool>()) {
        let model = if quad { ModelSpec::QuadraticPotential { m } } else { ModelSpec::FreeMassive { m } };
        let (small, big) = pt_moment_roots(&model, &r).unwrap();
        prop_assert!(big > DEFAULT_KAPPA * r.largest_moment());
        prop_assert!(small <= DEFAULT_KAPPA * r.largest_moment());
    }

    #[test]
    fn energy_is_non_negative(r in state(0.3), m in 0.0..3.0f64, quad in any::<bool>()) {
        let model = if quad { ModelSpec::QuadraticPotential { m } } else { ModelSpec::FreeMassive { m } };
        prop_assert!(energy(&model, &r).unwrap() >= 0.0);
    }

    #[test]
    fn dirac_matrix_structure(r in state(0.6), m in 0.2..2.0f64, plus in any::<bool>()) {
        let ctx = AlgebraContext::new(0.6).unwrap();
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        for model in [ModelSpec::FreeMassive { m }, ModelSpec::QuadraticPotential { m }] {
            let d = dirac_matrix(&model, &r, sign, &ctx).unwrap();
            prop_assert!(d.is_antisymmetric(1e-12));
            prop_assert!((d.get(0, 3) - Complex64::new(0.0, 1.2)).norm() < 1e-12);
        }
        let free = dirac_matrix(&ModelSpec::FreeMassive { m }, &r, sign, &ctx).unwrap();
        prop_assert!(free.is_off_block_diagonal(1e-12));
        prop_assert!((free.get(1, 4) - Complex64::new(-r.dqp, 0.3)).norm() < 1e-12);
    }
}

#[test]
fn velocity_addition_stays_subluminal() {
    assert_relative_eq!(velocity_addition(0.9, 0.9), 1.8 / 1.81);
    assert!(boost(&MomentState::zeros(AlgebraContext::default()), 1.0).is_err());
}
