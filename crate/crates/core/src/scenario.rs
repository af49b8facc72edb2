//! Scenario configuration and the runner that drives the classical, effective
//! and oracle engines and writes their trajectories side by side.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraContext;
use crate::dynamics::{
    classical_trajectory, csv_line, effective_rhs, integrate, IntegratorOptions, Trajectory,
    CSV_HEADER,
};
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::numerics::rk4_step;
use crate::oracle::{coherent, evolve, observables, FreeGaussian};
use crate::reduction::{check_admissible, energy, ReducedState, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Classical,
    Effective,
    Oracle,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Classical, Engine::Effective, Engine::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Classical => "classical",
            Engine::Effective => "effective",
            Engine::Oracle => "oracle",
        }
    }
}

/// Initial data: an explicit reduced state or a coherent state given by its
/// centre `(q, p)` or by the amplitude `α = (q + ip)/√(2ħ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    State(ReducedState),
    Coherent { q: f64, p: f64 },
    Alpha { re: f64, im: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// File name prefix; defaults to the scenario name.
    pub prefix: Option<String>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            prefix: None,
        }
    }
}

fn default_hbar() -> f64 {
    1.0
}

fn default_engines() -> Vec<Engine> {
    Engine::ALL.to_vec()
}

fn default_divergence() -> f64 {
    0.1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub model: ModelSpec,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    pub initial: InitialCondition,
    #[serde(default)]
    pub sign: Sign,
    pub t_span: [f64; 2],
    #[serde(default)]
    pub integrator: IntegratorOptions,
    /// Spacing of the recorded samples; defaults to 1/1000 of the span.
    #[serde(default)]
    pub sample_interval: Option<f64>,
    /// Relative `Δp` deviation between effective and oracle runs reported as
    /// the divergence time.
    #[serde(default = "default_divergence")]
    pub divergence_tolerance: f64,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default = "default_engines")]
    pub engines: Vec<Engine>,
}

impl ScenarioConfig {
    /// Parses a JSON document; errors name the offending field and position.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path.is_empty() || path == "." {
                Error::Config(inner.to_string())
            } else {
                Error::Config(format!("field `{path}`: {inner}"))
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn context(&self) -> Result<AlgebraContext> {
        AlgebraContext::new(self.hbar).map_err(|e| Error::Config(format!("field `hbar`: {e}")))
    }

    pub fn prefix(&self) -> &str {
        self.output.prefix.as_deref().unwrap_or(&self.name)
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval
            .unwrap_or((self.t_span[1] - self.t_span[0]) / 1000.0)
    }

    /// The initial reduced state at `t_span[0]`.
    pub fn initial_state(&self) -> ReducedState {
        let h = self.hbar;
        let r = match self.initial {
            InitialCondition::State(r) => r,
            InitialCondition::Coherent { q, p } => ReducedState::coherent(q, p, h),
            InitialCondition::Alpha { re, im } => {
                let s = (2.0 * h).sqrt();
                ReducedState::coherent(s * re, s * im, h)
            }
        };
        r.at_time(self.t_span[0])
    }

    /// Coherent amplitude of the initial state, if it is a coherent state.
    pub fn coherent_alpha(&self) -> Option<Complex64> {
        let r = self.initial_state();
        let h = self.hbar;
        let tol = 1e-12 * h;
        let minimal =
            (r.dq2 - 0.5 * h).abs() <= tol && (r.dp2 - 0.5 * h).abs() <= tol && r.dqp.abs() <= tol;
        minimal.then(|| Complex64::new(r.q, r.p) / (2.0 * h).sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |field: &str, msg: String| Error::Config(format!("field `{field}`: {msg}"));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(cfg(
                "name",
                format!(
                    "must be a non-empty file-name-safe string, got {:?}",
                    self.name
                ),
            ));
        }
        self.model
            .validate()
            .map_err(|e| cfg("model", e.to_string()))?;
        let ctx = self.context()?;
        let [t0, t1] = self.t_span;
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(cfg(
                "t_span",
                format!("need finite t0 < t1, got [{t0}, {t1}]"),
            ));
        }
        self.integrator
            .validate()
            .map_err(|e| cfg("integrator", e.to_string()))?;
        let dt = self.sample_interval();
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(cfg(
                "sample_interval",
                format!("must be positive, got {dt}"),
            ));
        }
        if !(self.divergence_tolerance > 0.0) {
            return Err(cfg(
                "divergence_tolerance",
                format!("must be positive, got {}", self.divergence_tolerance),
            ));
        }
        if self.engines.is_empty() {
            return Err(cfg("engines", "at least one engine is required".into()));
        }
        let r = self.initial_state();
        let adm = check_admissible(&r, &ctx);
        if !adm.is_admissible() {
            return Err(cfg("initial", format!("state is not admissible: {adm:?}")));
        }
        if self.engines.contains(&Engine::Oracle) {
            match self.model {
                ModelSpec::QuadraticPotential { .. } => {
                    if self.coherent_alpha().is_none() {
                        return Err(cfg(
                            "initial",
                            "the oracle for the quadratic potential starts from a coherent state"
                                .into(),
                        ));
                    }
                }
                ModelSpec::FreeMassive { .. } => {}
                _ => return Err(cfg(
                    "engines",
                    format!(
                        "the oracle engine supports quadratic_potential and free_massive, not {}",
                        self.model.name()
                    ),
                )),
            }
        }
        Ok(())
    }
}

/// Per-engine outcome.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EngineStatus {
    Ok { file: String, samples: usize },
    Error { message: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub name: String,
    pub model: ModelSpec,
    pub hbar: f64,
    pub sign: Sign,
    pub t_span: [f64; 2],
    pub engines: Vec<(Engine, EngineStatus)>,
    /// `max |q_eff − q_oracle|` over shared sample times.
    pub max_abs_q_deviation: Option<f64>,
    pub max_abs_p_deviation: Option<f64>,
    /// First time the relative `Δp` deviation exceeds the divergence tolerance.
    pub moment_divergence_time: Option<f64>,
    /// Largest relative drift of the effective energy.
    pub energy_drift: Option<f64>,
    pub first_breakdown: Option<f64>,
    pub flagged_samples: usize,
    pub stopped_at: Option<f64>,
}

impl Summary {
    pub fn has_engine_error(&self) -> bool {
        self.engines
            .iter()
            .any(|(_, s)| matches!(s, EngineStatus::Error { .. }))
    }
}

/// One row of an engine output: state, energy and flag text.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub state: ReducedState,
    pub energy: f64,
    pub flags: String,
}

pub fn rows_to_csv(rows: &[Row]) -> String {
    let mut out = String::with_capacity(rows.len() * 160);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", csv_line(&r.state, r.energy, &r.flags));
    }
    out
}

fn sample_times(cfg: &ScenarioConfig) -> Vec<f64> {
    let [t0, t1] = cfg.t_span;
    let dt = cfg.sample_interval();
    let n = ((t1 - t0) / dt).round().max(1.0) as usize;
    (0..=n)
        .map(|k| if k == n { t1 } else { t0 + k as f64 * dt })
        .collect()
}

/// Classical run: closed-form circle for the quadratic potential, otherwise
/// the effective equations with all moments held at zero.
pub fn run_classical(cfg: &ScenarioConfig) -> Result<Vec<Row>> {
    let r0 = cfg.initial_state();
    let times = sample_times(cfg);
    let model = &cfg.model;
    let classical = |q: f64, p: f64, t: f64| ReducedState {
        t,
        q,
        p,
        dq2: 0.0,
        dqp: 0.0,
        dp2: 0.0,
    };
    if let ModelSpec::QuadraticPotential { .. } = model {
        let rel: Vec<f64> = times.iter().map(|t| cfg.sign.pm() * (t - r0.t)).collect();
        let path = classical_trajectory(model, r0.p, r0.q, &rel)?;
        return path
            .into_iter()
            .zip(&times)
            .map(|((q, p), &t)| {
                let s = classical(q, p, t);
                Ok(Row {
                    state: s,
                    energy: energy(model, &s)?,
                    flags: "classical".into(),
                })
            })
            .collect();
    }
    let h = cfg
        .integrator
        .step
        .unwrap_or(cfg.sample_interval() / 10.0)
        .min(cfg.sample_interval());
    let mut rhs = |t: f64, y: &[f64; 2]| {
        let d = effective_rhs(model, &classical(y[0], y[1], t), cfg.sign)?;
        Ok([d[0], d[1]])
    };
    let mut y = [r0.q, r0.p];
    let mut t = r0.t;
    let mut rows = Vec::with_capacity(times.len());
    for &target in &times {
        while target - t > 1e-12 * (1.0 + t.abs()) {
            let step = h.min(target - t);
            y = rk4_step(&mut rhs, t, &y, step)?;
            t += step;
        }
        t = target;
        let s = classical(y[0], y[1], t);
        rows.push(Row {
            state: s,
            energy: energy(model, &s)?,
            flags: "classical".into(),
        });
    }
    Ok(rows)
}

pub fn run_effective(cfg: &ScenarioConfig) -> Result<Trajectory> {
    let ctx = cfg.context()?;
    let mut opts = cfg.integrator;
    if opts.output_interval.is_none() {
        opts.output_interval = Some(cfg.sample_interval());
    }
    if opts.step.is_none() && opts.method == crate::dynamics::Method::FixedRk4 {
        opts.step = Some(cfg.sample_interval() / 10.0);
    }
    integrate(
        &cfg.model,
        &cfg.initial_state(),
        cfg.t_span[1],
        cfg.sign,
        &opts,
        &ctx,
    )
}

/// Exact quantum evolution. The negative-frequency branch is the time
/// reverse of the positive one.
pub fn run_oracle(cfg: &ScenarioConfig) -> Result<Vec<Row>> {
    let times = sample_times(cfg);
    let t0 = cfg.t_span[0];
    let orientation = cfg.sign.pm();
    match cfg.model {
        ModelSpec::QuadraticPotential { m } => {
            let alpha = cfg.coherent_alpha().ok_or_else(|| {
                Error::Config("field `initial`: oracle needs a coherent state".into())
            })?;
            let f0 = coherent(alpha, cfg.hbar, m)?;
            let e = f0.energy_expectation();
            Ok(times
                .iter()
                .map(|&t| {
                    let o = observables(&evolve(&f0, orientation * (t - t0)));
                    Row {
                        state: o.to_reduced(t),
                        energy: e,
                        flags: "oracle".into(),
                    }
                })
                .collect())
        }
        ModelSpec::FreeMassive { m } => {
            let g = FreeGaussian {
                initial: cfg.initial_state(),
                m,
                orientation,
            };
            let e = g.energy(cfg.hbar)?;
            times
                .iter()
                .map(|&t| {
                    Ok(Row {
                        state: g.at(t)?.to_reduced(t),
                        energy: e,
                        flags: "oracle".into(),
                    })
                })
                .collect()
        }
        _ => Err(Error::Config(format!(
            "field `engines`: no oracle for {}",
            cfg.model.name()
        ))),
    }
}

/// Files written by [`run_scenario`] and the summary.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub summary: Summary,
}

fn trajectory_rows(tr: &Trajectory) -> Vec<Row> {
    tr.samples
        .iter()
        .map(|s| Row {
            state: s.state,
            energy: s.energy,
            flags: s.flags.render(),
        })
        .collect()
}

fn compare(cfg: &ScenarioConfig, effective: &[Row], oracle: &[Row]) -> (f64, f64, Option<f64>) {
    let (mut dq, mut dp) = (0.0f64, 0.0f64);
    let mut divergence = None;
    let mut j = 0;
    for e in effective {
        while j < oracle.len() && oracle[j].state.t < e.state.t - 1e-9 {
            j += 1;
        }
        let Some(o) = oracle.get(j) else { break };
        if (o.state.t - e.state.t).abs() > 1e-9 {
            continue;
        }
        dq = dq.max((e.state.q - o.state.q).abs());
        dp = dp.max((e.state.p - o.state.p).abs());
        let (a, b) = (e.state.dp2.max(0.0).sqrt(), o.state.dp2.sqrt());
        if divergence.is_none() && ((a - b) / b).abs() > cfg.divergence_tolerance {
            divergence = Some(e.state.t);
        }
    }
    (dq, dp, divergence)
}

type EngineOutput = (Vec<Row>, Option<Trajectory>);

/// Runs every configured engine and writes `<prefix>_<engine>.csv`,
/// `<prefix>_summary.json` and `<prefix>_plot.py` into `out_dir`.
///
/// Engine failures are recorded in the summary; they do not stop the other
/// engines.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let prefix = cfg.prefix();

    let mut engines = cfg.engines.clone();
    engines.sort();
    engines.dedup();

    let results: Vec<(Engine, Result<EngineOutput>)> = std::thread::scope(|s| {
        let handles: Vec<_> = engines
            .iter()
            .map(|&eng| {
                s.spawn(move || {
                    let out = match eng {
                        Engine::Classical => run_classical(cfg).map(|r| (r, None)),
                        Engine::Effective => {
                            run_effective(cfg).map(|tr| (trajectory_rows(&tr), Some(tr)))
                        }
                        Engine::Oracle => run_oracle(cfg).map(|r| (r, None)),
                    };
                    (eng, out)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| panic!("engine thread panicked"))
            })
            .collect()
    });

    let mut summary = Summary {
        name: cfg.name.clone(),
        model: cfg.model.clone(),
        hbar: cfg.hbar,
        sign: cfg.sign,
        t_span: cfg.t_span,
        engines: Vec::new(),
        max_abs_q_deviation: None,
        max_abs_p_deviation: None,
        moment_divergence_time: None,
        energy_drift: None,
        first_breakdown: None,
        flagged_samples: 0,
        stopped_at: None,
    };
    let mut files = Vec::new();
    let mut effective_rows = None;
    let mut oracle_rows = None;
    for (eng, res) in results {
        match res {
            Ok((rows, traj)) => {
                let file = out_dir.join(format!("{prefix}_{}.csv", eng.name()));
                std::fs::write(&file, rows_to_csv(&rows))?;
                summary.engines.push((
                    eng,
                    EngineStatus::Ok {
                        file: file.display().to_string(),
                        samples: rows.len(),
                    },
                ));
                files.push(file);
                if let Some(tr) = traj {
                    summary.energy_drift = Some(tr.max_relative_drift(|s| s.energy));
                    summary.first_breakdown = tr.first_breakdown();
                    summary.flagged_samples =
                        tr.samples.iter().filter(|s| !s.flags.is_clean()).count();
                    summary.stopped_at = tr.stopped_at;
                }
                match eng {
                    Engine::Effective => effective_rows = Some(rows),
                    Engine::Oracle => oracle_rows = Some(rows),
                    Engine::Classical => {}
                }
            }
            Err(e) => summary.engines.push((
                eng,
                EngineStatus::Error {
                    message: e.to_string(),
                },
            )),
        }
    }
    if let (Some(e), Some(o)) = (&effective_rows, &oracle_rows) {
        let (dq, dp, div) = compare(cfg, e, o);
        summary.max_abs_q_deviation = Some(dq);
        summary.max_abs_p_deviation = Some(dp);
        summary.moment_divergence_time = div;
    }

    let summary_file = out_dir.join(format!("{prefix}_summary.json"));
    let json =
        serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    std::fs::write(&summary_file, json + "\n")?;
    files.push(summary_file);

    let plot_file = out_dir.join(format!("{prefix}_plot.py"));
    std::fs::write(&plot_file, plot_script(prefix, &engines))?;
    files.push(plot_file);

    Ok(RunOutcome { files, summary })
}

/// Minimal matplotlib script for the written CSV files.
pub fn plot_script(prefix: &str, engines: &[Engine]) -> String {
    let names: Vec<String> = engines
        .iter()
        .map(|e| format!("\"{}\"", e.name()))
        .collect();
    format!(
        r#"#!/usr/bin/env python3
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
PREFIX = "{prefix}"
ENGINES = [{engines}]


def load(engine):
    with open(HERE / f"{{PREFIX}}_{{engine}}.csv") as fh:
        rows = list(csv.DictReader(fh))
    return {{k: [float(r[k]) for r in rows] for k in ("t", "q", "p", "dq2", "dqp", "dp2", "E")}}


def main():
    data = {{e: load(e) for e in ENGINES if (HERE / f"{{PREFIX}}_{{e}}.csv").exists()}}
    fig, (ax_q, ax_dp) = plt.subplots(1, 2, figsize=(11, 4))
    for name, d in data.items():
        ax_q.plot(d["t"], d["q"], label=f"{{name}} q")
        ax_q.plot(d["t"], d["p"], "--", label=f"{{name}} p")
        if name != "classical":
            ax_dp.plot(d["t"], [max(x, 0.0) ** 0.5 for x in d["dp2"]], label=name)
    ax_q.set_xlabel("t")
    ax_q.legend()
    ax_dp.set_xlabel("t")
    ax_dp.set_ylabel("Δp")
    ax_dp.legend()
    fig.tight_layout()
    out = HERE / f"{{PREFIX}}.png"
    fig.savefig(out, dpi=150)
    print(out, file=sys.stderr)


if __name__ == "__main__":
    main()
"#,
        engines = names.join(", ")
    )
}
