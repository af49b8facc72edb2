//! `effcon`: run scenarios, bundled presets and verification suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use effcon::scenario::{EngineStatus, RunOutcome};
use effcon::{run_scenario, run_suite, Error, ScenarioConfig, Suite};

/// Environment variable that overrides the configured output directory.
const OUT_DIR_ENV: &str = "EFFCON_OUT_DIR";

const EXIT_CONFIG: u8 = 1;
const EXIT_ENGINE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

const PRESETS: [(&str, &str); 4] = [
    ("figure1", include_str!("../presets/figure1.json")),
    ("figure2", include_str!("../presets/figure2.json")),
    (
        "massless-demo",
        include_str!("../presets/massless-demo.json"),
    ),
    ("timedep-slow", include_str!("../presets/timedep-slow.json")),
];

#[derive(Parser)]
#[command(
    name = "effcon",
    version,
    about = "Effective-constraint evolution of relativistic quantum particles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a JSON config file.
    Run {
        config: PathBuf,
        /// Output directory; overrides the config and the environment.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run a bundled preset scenario.
    Preset {
        /// Preset name; `list` prints the available presets.
        name: String,
        /// Print the preset config instead of running it.
        #[arg(long)]
        print: bool,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run a verification suite (brackets, closure, dirac, limits, appB or all).
    Verify { suite: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out_dir } => match ScenarioConfig::from_path(&config) {
            Ok(cfg) => run(&cfg, out_dir),
            Err(e) => fail(EXIT_CONFIG, &e),
        },
        Command::Preset {
            name,
            print,
            out_dir,
        } => preset(&name, print, out_dir),
        Command::Verify { suite } => verify(&suite),
    }
}

fn fail(code: u8, e: &dyn std::fmt::Display) -> ExitCode {
    eprintln!("effcon: {e}");
    ExitCode::from(code)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_ENGINE,
    }
}

fn out_dir(cfg: &ScenarioConfig, flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
    .unwrap_or_else(|| cfg.output.dir.clone())
}

fn run(cfg: &ScenarioConfig, flag: Option<PathBuf>) -> ExitCode {
    let dir = out_dir(cfg, flag);
    match run_scenario(cfg, &dir) {
        Ok(outcome) => report_run(&outcome, &dir),
        Err(e) => fail(exit_code(&e), &e),
    }
}

fn report_run(outcome: &RunOutcome, dir: &Path) -> ExitCode {
    let s = &outcome.summary;
    println!("scenario {} -> {}", s.name, dir.display());
    for (engine, status) in &s.engines {
        match status {
            EngineStatus::Ok { file, samples } => {
                println!("  {:<9} ok     {samples} samples  {file}", engine.name())
            }
            EngineStatus::Error { message } => println!("  {:<9} error  {message}", engine.name()),
        }
    }
    let show = |label: &str, v: Option<f64>| {
        if let Some(x) = v {
            println!("  {label:<24} {x:.6e}");
        }
    };
    show("max |q_eff - q_oracle|", s.max_abs_q_deviation);
    show("max |p_eff - p_oracle|", s.max_abs_p_deviation);
    show("moment divergence time", s.moment_divergence_time);
    show("energy drift", s.energy_drift);
    show("first breakdown", s.first_breakdown);
    show("stopped at", s.stopped_at);
    if s.has_engine_error() {
        ExitCode::from(EXIT_ENGINE)
    } else {
        ExitCode::SUCCESS
    }
}

fn preset(name: &str, print: bool, flag: Option<PathBuf>) -> ExitCode {
    if name == "list" {
        for (n, _) in PRESETS {
            println!("{n}");
        }
        return ExitCode::SUCCESS;
    }
    let Some((_, text)) = PRESETS.iter().find(|(n, _)| *n == name) else {
        let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
        return fail(
            EXIT_CONFIG,
            &format!("unknown preset {name:?}; available: {}", names.join(", ")),
        );
    };
    if print {
        print!("{text}");
        return ExitCode::SUCCESS;
    }
    match ScenarioConfig::from_json(text) {
        Ok(cfg) => run(&cfg, flag),
        Err(e) => fail(EXIT_CONFIG, &e),
    }
}

fn verify(name: &str) -> ExitCode {
    let suites: Vec<Suite> = if name.eq_ignore_ascii_case("all") {
        Suite::ALL.to_vec()
    } else {
        match name.parse() {
            Ok(s) => vec![s],
            Err(e) => return fail(EXIT_CONFIG, &e),
        }
    };
    let mut all_passed = true;
    for suite in suites {
        match run_suite(suite) {
            Ok(report) => {
                print!("{report}");
                all_passed &= report.passed();
            }
            Err(e) => return fail(EXIT_ENGINE, &e),
        }
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY)
    }
}
