//! Shared fixtures for the engine benchmarks under `benches/`.

use effcon::{AlgebraContext, IntegratorOptions, ModelSpec, ReducedState, ScenarioConfig};

/// Phase-space radius of the reference oscillator run.
pub const Q0: f64 = 10.0;

pub fn quadratic() -> ModelSpec {
    ModelSpec::QuadraticPotential { m: 0.0 }
}

pub fn context() -> AlgebraContext {
    AlgebraContext::new(1.0).expect("ħ = 1 is valid")
}

/// Coherent state centred at `(Q0, 0)` with ħ = 1.
pub fn reference_state() -> ReducedState {
    ReducedState::coherent(Q0, 0.0, 1.0)
}

/// Fixed-step RK4 with the reference step `Q0 / 1000`.
pub fn reference_integrator() -> IntegratorOptions {
    IntegratorOptions::rk4(Q0 / 1000.0)
}

/// The reference scenario over `[0, 2 Q0]` with every engine enabled.
pub fn reference_scenario() -> ScenarioConfig {
    ScenarioConfig::from_json(
        r#"{"name": "bench", "model": {"kind": "quadratic_potential", "m": 0.0}, "hbar": 1.0,
            "initial": {"coherent": {"q": 10.0, "p": 0.0}}, "t_span": [0.0, 20.0],
            "integrator": {"step": 0.01}, "sample_interval": 0.05}"#,
    )
    .expect("bench scenario is valid")
}
