use effcon::{build_constraints, AlgebraContext, ModelSpec, PolyExpr};

fn render(model: &ModelSpec) -> String {
    let cs = build_constraints(model, &AlgebraContext::default()).unwrap();
    cs.iter()
        .map(|(id, c)| format!("{} = {}\n", id.label(), c))
        .collect()
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}.txt", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

#[test]
fn free_massive_constraints() {
    assert_eq!(
        render(&ModelSpec::FreeMassive { m: 2.0 }),
        golden("free_massive")
    );
}

#[test]
fn massless_constraints() {
    assert_eq!(render(&ModelSpec::Massless), golden("massless"));
}

#[test]
fn quadratic_potential_constraints() {
    assert_eq!(
        render(&ModelSpec::QuadraticPotential { m: 2.0 }),
        golden("quadratic_potential")
    );
}

#[test]
fn linear_time_potential_constraints() {
    assert_eq!(
        render(&ModelSpec::LinearTimePotential {
            m: 2.0,
            lambda: 0.5
        }),
        golden("linear_time_potential")
    );
}

#[test]
fn slow_polynomial_potential_constraints() {
    let model = ModelSpec::SlowPolynomialPotential {
        m: 2.0,
        lambda: 0.5,
        v0: 1.0,
        vtilde: vec![1.0, 0.25],
    };
    assert_eq!(render(&model), golden("slow_polynomial_potential"));
}

#[test]
fn golden_text_parses_back() {
    for name in [
        "free_massive",
        "massless",
        "quadratic_potential",
        "linear_time_potential",
        "slow_polynomial_potential",
    ] {
        for line in golden(name).lines() {
            let (_, rhs) = line.split_once(" = ").unwrap();
            let p: PolyExpr = rhs.parse().unwrap();
            assert_eq!(p.to_string(), rhs);
        }
    }
}

#[test]
fn slow_polynomial_with_unit_vtilde_matches_linear_in_c() {
    let slow = build_constraints(
        &ModelSpec::SlowPolynomialPotential {
            m: 2.0,
            lambda: 0.5,
            v0: 0.0,
            vtilde: vec![1.0],
        },
        &AlgebraContext::default(),
    )
    .unwrap();
    let linear = build_constraints(
        &ModelSpec::LinearTimePotential {
            m: 2.0,
            lambda: 0.5,
        },
        &AlgebraContext::default(),
    )
    .unwrap();
    assert_eq!(slow.c, linear.c);
}
