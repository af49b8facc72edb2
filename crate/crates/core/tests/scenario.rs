use effcon::scenario::{run_scenario, Engine, EngineStatus, ScenarioConfig};
use effcon::{Error, CSV_HEADER};

const QUADRATIC: &str = r#"{
    "name": "quad",
    "model": {"kind": "quadratic_potential", "m": 0.0},
    "hbar": 0.5,
    "initial": {"coherent": {"q": 3.0, "p": 0.0}},
    "t_span": [0.0, 6.0],
    "integrator": {"step": 0.002},
    "sample_interval": 0.05
}"#;

fn config_error(text: &str) -> String {
    match ScenarioConfig::from_json(text) {
        Err(Error::Config(msg)) => msg,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn parses_defaults() {
    let cfg = ScenarioConfig::from_json(QUADRATIC).unwrap();
    assert_eq!(cfg.engines, Engine::ALL.to_vec());
    assert_eq!(cfg.prefix(), "quad");
    assert_eq!(cfg.sample_interval(), 0.05);
    let alpha = cfg.coherent_alpha().unwrap();
    assert!((alpha.re - 3.0).abs() < 1e-15 && alpha.im == 0.0);
}

#[test]
fn errors_name_the_offending_field() {
    let msg = config_error(&QUADRATIC.replace(r#""m": 0.0"#, r#""m": "zero""#));
    assert!(msg.contains("model"), "{msg}");
    let msg = config_error(&QUADRATIC.replace(r#""step": 0.002"#, r#""step": 0.002, "stepz": 1"#));
    assert!(msg.contains("integrator") && msg.contains("stepz"), "{msg}");
    let msg = config_error(&QUADRATIC.replace("[0.0, 6.0]", "[6.0, 0.0]"));
    assert!(msg.contains("t_span"), "{msg}");
    let msg = config_error(&QUADRATIC.replace(r#""hbar": 0.5"#, r#""hbar": -1"#));
    assert!(msg.contains("hbar"), "{msg}");
    let msg = config_error(&QUADRATIC.replace(r#""t_span": [0.0, 6.0],"#, ""));
    assert!(msg.contains("t_span"), "{msg}");
}

#[test]
fn rejects_inadmissible_initial_state() {
    let text = QUADRATIC.replace(
        r#"{"coherent": {"q": 3.0, "p": 0.0}}"#,
        r#"{"state": {"q": 3.0, "p": 0.0, "dq2": 0.1, "dqp": 0.0, "dp2": 0.1}}"#,
    );
    assert!(config_error(&text).contains("initial"));
}

#[test]
fn oracle_requires_a_supported_model_and_coherent_start() {
    let text = QUADRATIC.replace(
        r#"{"coherent": {"q": 3.0, "p": 0.0}}"#,
        r#"{"state": {"q": 3.0, "p": 0.0, "dq2": 0.5, "dqp": 0.1, "dp2": 0.6}}"#,
    );
    assert!(config_error(&text).contains("coherent"));
    let text = QUADRATIC.replace(
        r#"{"kind": "quadratic_potential", "m": 0.0}"#,
        r#"{"kind": "massless"}"#,
    );
    assert!(config_error(&text).contains("engines"));
    let ok = text.replace(
        r#""sample_interval""#,
        r#""engines": ["classical", "effective"], "sample_interval""#,
    );
    ScenarioConfig::from_json(&ok).unwrap();
}

#[test]
fn run_writes_all_outputs_and_is_deterministic() {
    let cfg = ScenarioConfig::from_json(QUADRATIC).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run_scenario(&cfg, a.path()).unwrap();
    let rb = run_scenario(&cfg, b.path()).unwrap();
    assert!(!ra.summary.has_engine_error());
    assert_eq!(ra.files.len(), 5);
    for eng in Engine::ALL {
        let name = format!("quad_{}.csv", eng.name());
        let ta = std::fs::read_to_string(a.path().join(&name)).unwrap();
        let tb = std::fs::read_to_string(b.path().join(&name)).unwrap();
        assert_eq!(ta, tb, "{name}");
        let mut lines = ta.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 8);
        assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);
        assert!((first[1].parse::<f64>().unwrap() - 3.0).abs() < 1e-14);
    }
    assert_eq!(
        std::fs::read_to_string(a.path().join("quad_plot.py")).unwrap(),
        std::fs::read_to_string(b.path().join("quad_plot.py")).unwrap()
    );
    assert_eq!(
        ra.summary.max_abs_q_deviation,
        rb.summary.max_abs_q_deviation
    );
    assert_eq!(ra.summary.energy_drift, rb.summary.energy_drift);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.path().join("quad_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["name"], "quad");
    let dq = summary["max_abs_q_deviation"].as_f64().unwrap();
    assert!(dq < 0.05 * 3.0, "{dq}");
    assert!(summary["energy_drift"].as_f64().unwrap() < 1e-8);
}

#[test]
fn engine_failures_are_recorded_not_fatal() {
    let text = QUADRATIC
        .replace(r#""m": 0.0"#, r#""m": 1.0"#)
        .replace(
            r#""step": 0.002"#,
            r#""step": 0.01, "breakdown": "stop", "breakdown_ratio": 1e-9"#,
        )
        .replace(
            r#""sample_interval""#,
            r#""engines": ["classical", "effective"], "sample_interval""#,
        );
    let cfg = ScenarioConfig::from_json(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run_scenario(&cfg, dir.path()).unwrap();
    assert!(out
        .summary
        .engines
        .iter()
        .any(|(e, s)| *e == Engine::Classical && matches!(s, EngineStatus::Ok { .. })));
    assert!(
        out.summary.stopped_at.is_some() || out.summary.has_engine_error(),
        "{:?}",
        out.summary
    );
}
