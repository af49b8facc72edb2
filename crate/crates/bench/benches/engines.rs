use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use effcon::{
    bracket, build_constraints, closure_report, coherent, dirac_matrix, effective_rhs, energy,
    evolve, integrate, observables, run_scenario, Complex64, PolyExpr, Sign, Var,
};
use effcon_bench::{
    context, quadratic, reference_integrator, reference_scenario, reference_state, Q0,
};

fn algebra(c: &mut Criterion) {
    c.bench_function("bracket/all_pairs", |b| {
        b.iter(|| {
            for x in Var::ALL {
                for y in Var::ALL {
                    black_box(bracket(&PolyExpr::var(x), &PolyExpr::var(y)));
                }
            }
        })
    });
    let cs = build_constraints(&quadratic(), &context()).unwrap();
    c.bench_function("closure_report/quadratic", |b| {
        b.iter(|| closure_report(black_box(&cs)).unwrap())
    });
}

fn reduction(c: &mut Criterion) {
    let (model, r, ctx) = (quadratic(), reference_state(), context());
    c.bench_function("energy/quadratic", |b| {
        b.iter(|| energy(black_box(&model), black_box(&r)).unwrap())
    });
    c.bench_function("dirac_matrix/quadratic", |b| {
        b.iter(|| dirac_matrix(black_box(&model), black_box(&r), Sign::Plus, &ctx).unwrap())
    });
}

fn dynamics(c: &mut Criterion) {
    let (model, r, ctx) = (quadratic(), reference_state(), context());
    c.bench_function("effective_rhs/quadratic", |b| {
        b.iter(|| effective_rhs(black_box(&model), black_box(&r), Sign::Plus).unwrap())
    });
    let opts = reference_integrator();
    c.bench_function("integrate/rk4_to_2q0", |b| {
        b.iter(|| integrate(&model, &r, 2.0 * Q0, Sign::Plus, &opts, &ctx).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let alpha = Complex64::new(Q0 / 2f64.sqrt(), 0.0);
    c.bench_function("oracle/coherent", |b| {
        b.iter(|| coherent(black_box(alpha), 1.0, 0.0).unwrap())
    });
    let psi = coherent(alpha, 1.0, 0.0).unwrap();
    c.bench_function("oracle/evolve", |b| b.iter(|| evolve(black_box(&psi), 1.0)));
    c.bench_function("oracle/observables", |b| {
        b.iter(|| observables(black_box(&psi)))
    });
}

fn scenario(c: &mut Criterion) {
    let cfg = reference_scenario();
    let dir = std::env::temp_dir().join("effcon-bench");
    let mut g = c.benchmark_group("scenario");
    g.sample_size(10);
    g.bench_function("reference_all_engines", |b| {
        b.iter(|| run_scenario(&cfg, &dir).unwrap())
    });
    g.finish();
}

criterion_group!(benches, algebra, reduction, dynamics, oracle, scenario);
criterion_main!(benches);
