//! `scoresleuth`: consistency tests for reported performance scores.
//!
//! Exit codes: 0 consistent, 1 inconsistency identified, 2 usage or input
//! error, 3 resource refusal (the check could not be decided within limits).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use scoresleuth::aggregate::{check_with, CheckOptions, DEFAULT_CONFIG_CAP};
use scoresleuth::bundles::{self, load_bundle};
use scoresleuth::model::{ConsistencyResult, Experiment, Procedure, ScoreReport, Uncertainty};
use scoresleuth::num::parse_rational;
use scoresleuth::scores::{default_scores, registry};
use scoresleuth::Error;

#[derive(Parser)]
#[command(name = "scoresleuth", version, about = "Test reported performance scores for consistency with an experimental setup")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check scores against an experiment specification file.
    Check {
        /// Experiment JSON (classification spec, or {"task": "regression", ...}).
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check scores against a predefined dataset bundle.
    Bundle {
        /// Bundle id, see `list --bundles`.
        #[arg(long)]
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// List registered scores, bundles or decision procedures (JSON lines).
    List {
        #[command(flatten)]
        what: ListWhat,
        /// With --scores: include scores disabled by default.
        #[arg(long)]
        all: bool,
    },
}

#[derive(Args)]
struct Common {
    /// Scores JSON: {"score-id": "decimal string", ...}; optional "beta" for fbeta.
    #[arg(long)]
    scores: PathBuf,
    #[command(flatten)]
    eps: EpsChoice,
    /// Extra tolerance added to every interval.
    #[arg(long, value_name = "RATIONAL")]
    slack: Option<String>,
    /// Write the verdict here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cap on enumerated fold configurations.
    #[arg(long, env = "SCORESLEUTH_CONFIG_CAP", default_value_t = DEFAULT_CONFIG_CAP)]
    config_cap: u64,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct EpsChoice {
    /// Uncertainty radius for every score, e.g. 1e-4 or 1/10000.
    #[arg(long, value_name = "RATIONAL")]
    eps: Option<String>,
    /// Radius 10^-d per score, d = digits after the decimal point.
    #[arg(long)]
    infer_eps: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ListWhat {
    #[arg(long)]
    scores: bool,
    #[arg(long)]
    bundles: bool,
    #[arg(long)]
    procedures: bool,
}

enum Failure {
    Usage(String),
    Refusal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_resource_refusal() {
            Failure::Refusal(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{} is not valid JSON: {e}", path.display())))
}

fn uncertainty(common: &Common, report: &ScoreReport) -> Result<Uncertainty, Failure> {
    let mut unc = match &common.eps.eps {
        Some(text) => Uncertainty::new(parse_rational(text)?),
        None => Uncertainty::inferred(report)?,
    };
    if let Some(s) = &common.slack {
        unc = unc.with_slack(parse_rational(s)?);
    }
    unc.validate()?;
    Ok(unc)
}

fn run_check(experiment: &Experiment, common: &Common) -> Result<ConsistencyResult, Failure> {
    let report = ScoreReport::from_json(&read_json(&common.scores)?)?;
    let unc = uncertainty(common, &report)?;
    let opts = CheckOptions {
        config_cap: common.config_cap,
        ..CheckOptions::default()
    };
    Ok(check_with(experiment, &report, &unc, &opts)?)
}

fn emit(result: &ConsistencyResult, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(result).expect("results serialize");
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes()).ok();
            Ok(())
        }
    }
}

fn json_line(v: serde_json::Value) {
    println!("{}", serde_json::to_string(&v).expect("list entry serializes"));
}

fn list(what: &ListWhat, all: bool) {
    if what.scores {
        let defs: Vec<_> = if all { registry().iter().collect() } else { default_scores().collect() };
        for d in defs {
            json_line(serde_json::to_value(d).expect("definition serializes"));
        }
    } else if what.bundles {
        for e in bundles::registry() {
            json_line(serde_json::to_value(e).expect("entry serializes"));
        }
    } else {
        for p in Procedure::ALL {
            json_line(serde_json::json!({"id": p.as_str(), "description": p.description()}));
        }
    }
}

fn run(cli: Cli) -> Result<Option<bool>, Failure> {
    let (result, out) = match &cli.command {
        Command::List { what, all } => {
            list(what, *all);
            return Ok(None);
        }
        Command::Check { spec, common } => {
            let experiment = Experiment::from_json(read_json(spec)?)?;
            (run_check(&experiment, common)?, common.out.as_deref())
        }
        Command::Bundle { name, common } => {
            let bundle = load_bundle(name)?;
            (run_check(&Experiment::Classification(bundle.spec), common)?, common.out.as_deref())
        }
    };
    emit(&result, out)?;
    Ok(Some(result.inconsistency))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Some(true)) => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Refusal(msg)) => {
            eprintln!("refused: {msg}");
            ExitCode::from(3)
        }
    }
}
