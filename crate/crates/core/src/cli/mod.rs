//! Batch front end: config in, CSV tables and a JSON summary out.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or the
//! computation errors, 2 for an invalid configuration (nothing written).

pub mod config;
pub mod report;
pub mod verbs;

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Deserialize;
use serde_json::json;

pub use config::{parse, ConfigError, Plan, RunConfig};
pub use report::{Bound, Check, Report, Table, SCHEMA};
use verbs::VerbOutput;

pub const THREADS_ENV: &str = "SHELLKIT_THREADS";
pub const DEFAULT_OUT_DIR: &str = "shellkit-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Verb {
    Geometry,
    Measures,
    CheckInvariance,
    CheckIntegrals,
    Energy,
    Linearize,
    Minimize,
    Spectrum,
}

impl Verb {
    pub fn name(&self) -> &'static str {
        match self {
            Verb::Geometry => "geometry",
            Verb::Measures => "measures",
            Verb::CheckInvariance => "check-invariance",
            Verb::CheckIntegrals => "check-integrals",
            Verb::Energy => "energy",
            Verb::Linearize => "linearize",
            Verb::Minimize => "minimize",
            Verb::Spectrum => "spectrum",
        }
    }

    pub fn needs_chart(&self) -> bool {
        matches!(
            self,
            Verb::Geometry | Verb::Measures | Verb::Energy | Verb::Linearize | Verb::Minimize
        )
    }

    pub fn needs_model(&self) -> bool {
        matches!(
            self,
            Verb::CheckInvariance | Verb::Energy | Verb::Minimize | Verb::Spectrum
        )
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "shellkit",
    version,
    about = "Resultant shell kinematics, drilling audits and energies"
)]
pub struct Args {
    pub verb: Verb,
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Seed of the random generator; overrides the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Multiplier applied to every upper-bound tolerance.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub tol_scale: f64,
}

/// Report plus artifact files, in writing order.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub files: Vec<(String, String)>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed {
            0
        } else {
            1
        }
    }
}

/// Runs a validated plan on the current rayon pool.
pub fn execute(plan: &Plan) -> Outcome {
    let result = match plan.verb {
        Verb::Geometry => verbs::geometry(plan),
        Verb::Measures => verbs::measures(plan),
        Verb::CheckInvariance => verbs::check_invariance(plan),
        Verb::CheckIntegrals => verbs::check_integrals(plan),
        Verb::Energy => verbs::energy(plan),
        Verb::Linearize => verbs::linearize(plan),
        Verb::Minimize => verbs::minimize_verb(plan),
        Verb::Spectrum => verbs::spectrum(plan),
    };
    let (out, error) = match result {
        Ok(o) => (o, None),
        Err(e) => (
            VerbOutput {
                summary: json!({}),
                ..VerbOutput::default()
            },
            Some(e.to_string()),
        ),
    };
    let mut files: Vec<(String, String)> = out.tables.iter().map(|(n, t)| (n.clone(), t.to_csv())).collect();
    files.extend(out.json);
    let passed = error.is_none() && out.checks.iter().all(|c| c.passed);
    let report = Report {
        schema: SCHEMA,
        verb: plan.verb.name(),
        seed: plan.seed,
        tol_scale: plan.tol_scale,
        passed,
        checks: out.checks,
        summary: out.summary,
        artifacts: files.iter().map(|(n, _)| n.clone()).collect(),
        error,
    };
    files.push(("report.json".into(), report.to_json()));
    Outcome { report, files }
}

/// Worker count from the environment value; `None` leaves rayon's default.
pub fn parse_threads(value: Option<&str>) -> Result<Option<usize>, ConfigError> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

/// Runs `plan` on a pool capped at `threads` workers.
pub fn execute_with_threads(plan: &Plan, threads: Option<usize>) -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .expect("thread pool");
    pool.install(|| execute(plan))
}

fn write_outputs(dir: &Path, files: &[(String, String)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, contents) in files {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

/// Full command-line behaviour; returns the process exit code.
pub fn run(args: &Args, threads_env: Option<&str>) -> i32 {
    let prepared = (|| -> Result<(Plan, PathBuf, Option<usize>), ConfigError> {
        let text = std::fs::read_to_string(&args.config)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", args.config.display())))?;
        let cfg = parse(&text)?;
        let plan = cfg.plan(args.verb, args.seed, args.tol_scale)?;
        let dir = match (&args.out, &cfg.output.dir) {
            (Some(d), _) => d.clone(),
            (None, Some(d)) => PathBuf::from(d),
            (None, None) => PathBuf::from(DEFAULT_OUT_DIR),
        };
        Ok((plan, dir, parse_threads(threads_env)?))
    })();
    let (plan, dir, threads) = match prepared {
        Ok(p) => p,
        Err(e) => {
            eprintln!("shellkit: {e}");
            return 2;
        }
    };
    let outcome = execute_with_threads(&plan, threads);
    if let Err(e) = write_outputs(&dir, &outcome.files) {
        eprintln!("shellkit: cannot write outputs to {}: {e}", dir.display());
        return 1;
    }
    for c in &outcome.report.checks {
        let measured = c.measured.map_or("nan".to_string(), |m| format!("{m:e}"));
        println!("{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, measured);
    }
    if let Some(e) = &outcome.report.error {
        println!("ERROR {e}");
    }
    outcome.exit_code()
}

pub fn main() -> i32 {
    let args = Args::parse();
    let threads = std::env::var(THREADS_ENV).ok();
    run(&args, threads.as_deref())
}
