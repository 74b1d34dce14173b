//! Command-line front end.
//!
//! Exit codes: 0 for success (and ACCEPT from `decide`), 1 for REJECT from
//! `decide`, 2 for any error. `--machine` replaces the human-readable text
//! with one JSON record per invocation: keys sorted, numbers rounded to 10
//! significant digits.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{load_config, ConfigError, ModelConfig};
use crate::grid::{compute_grid, GridKind};
use crate::simulate::{compare_strategies, SimulationReport};
use crate::strategy::{AcceptanceTable, DecisionModel, StrategySpec, Threshold, Verdict};

/// Tolerance on the threshold location used by `decide` and `optimal`.
const THRESHOLD_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "twoperiod",
    version,
    about = "Accept or wait: optimal first-period decisions for a two-offer purchase"
)]
pub struct Cli {
    /// Model configuration (TOML); omitted keys take the reference values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Print a single JSON record instead of text.
    #[arg(long, global = true)]
    pub machine: bool,
    /// Seed for simulations.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Accept or reject a first-period offer.
    Decide {
        #[arg(long)]
        price: f64,
        /// Guessed second-period price; switches to the guessing rule.
        #[arg(long)]
        guess: Option<f64>,
    },
    /// Locate the price below which offers should be accepted.
    Threshold {
        #[arg(long, default_value_t = THRESHOLD_TOL)]
        x_tol: f64,
    },
    /// Tabulate a curve or surface as CSV.
    Grid {
        /// h-curve, h-surface, joint-pdf, p-surface or marginals.
        #[arg(long)]
        what: GridKind,
        /// Points per axis.
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        /// Output file; CSV goes to stdout when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Estimate expected prices by simulating purchases.
    Simulate {
        #[command(flatten)]
        strategy: StrategyArgs,
        /// Comma-separated strategies run on common random numbers.
        #[arg(long, value_delimiter = ',', conflicts_with = "strategy")]
        compare: Vec<String>,
        /// Number of simulated purchases.
        #[arg(long, default_value_t = 100_000)]
        n: u64,
    },
    /// Expected price of a strategy by numerical integration.
    Expected {
        #[command(flatten)]
        strategy: StrategyArgs,
    },
}

#[derive(Debug, Args)]
pub struct StrategyArgs {
    /// optimal, always-accept, always-reject, guessing, threshold:<price> or tabulated.
    #[arg(long, default_value = "optimal")]
    pub strategy: String,
    /// Acceptance-probability table for `tabulated`: one row per first-offer
    /// price cell, one column per second-offer price cell.
    #[arg(long, value_name = "CSV")]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Rounds to 10 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.9e}").parse().expect("formatted float")
    } else {
        x
    }
}

fn num(x: f64) -> Value {
    json!(round_sig(x))
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Accept => "ACCEPT",
        Verdict::Reject => "REJECT",
    }
}

/// Resolves strategy labels, computing the optimal threshold at most once.
struct StrategyResolver<'a> {
    model: &'a DecisionModel,
    table_path: Option<&'a Path>,
    optimal: Option<StrategySpec>,
}

impl<'a> StrategyResolver<'a> {
    fn new(model: &'a DecisionModel, table_path: Option<&'a Path>) -> Self {
        StrategyResolver {
            model,
            table_path,
            optimal: None,
        }
    }

    fn resolve(&mut self, label: &str) -> CliResult<StrategySpec> {
        let spec = match label {
            "optimal" => self.optimal()?,
            "always-accept" => StrategySpec::AlwaysAccept,
            "always-reject" => StrategySpec::AlwaysReject,
            "guessing" => StrategySpec::GuessingSurface,
            "tabulated" => {
                let path = self.table_path.ok_or_else(|| {
                    CliError::Usage("strategy `tabulated` needs --table <CSV>".into())
                })?;
                let text = std::fs::read_to_string(path).map_err(io_err(path))?;
                StrategySpec::Tabulated(AcceptanceTable::from_csv(&text)?)
            }
            other => match other.strip_prefix("threshold:") {
                Some(v) => StrategySpec::Threshold(
                    v.parse()
                        .map_err(|_| CliError::Usage(format!("invalid threshold price {v:?}")))?,
                ),
                None => return Err(CliError::Usage(format!(
                    "unknown strategy {other:?}; expected optimal, always-accept, always-reject, \
                         guessing, threshold:<price> or tabulated"
                ))),
            },
        };
        spec.validate(&self.model.market().range)?;
        Ok(spec)
    }

    fn optimal(&mut self) -> CliResult<StrategySpec> {
        if let Some(s) = &self.optimal {
            return Ok(s.clone());
        }
        let spec = self
            .model
            .find_threshold(THRESHOLD_TOL)?
            .strategy()
            .ok_or_else(|| {
                CliError::Usage(
                    "h rises through zero from below; no accept-low threshold strategy exists"
                        .into(),
                )
            })?;
        self.optimal = Some(spec.clone());
        Ok(spec)
    }
}

/// Runs one command, writing its output to `out`. Returns the exit code.
pub fn run<W: Write>(cli: &Cli, out: &mut W) -> CliResult<u8> {
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => ModelConfig::default(),
    };
    let model = config.build()?;
    let stdout_err = |source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    let mut emit = |text: String| writeln!(out, "{text}").map_err(stdout_err);

    match &cli.command {
        Command::Decide { price, guess } => {
            let (decision, threshold) = match guess {
                Some(w) => (model.decide_with_guess(*price, *w)?, None),
                None => (
                    model.decide(*price)?,
                    Some(model.find_threshold(THRESHOLD_TOL)?),
                ),
            };
            if cli.machine {
                let mut rec = json!({
                    "verdict": verdict_name(decision.verdict),
                    "price": num(*price),
                    "h": num(decision.h_value),
                    "boundary": decision.boundary,
                });
                match guess {
                    Some(w) => rec["guess"] = num(*w),
                    None => {
                        rec["threshold"] = threshold.and_then(|t| t.v0()).map_or(Value::Null, num)
                    }
                }
                emit(rec.to_string())?;
            } else {
                let mut text = format!("{}  price {:.2}", decision.verdict, price);
                match guess {
                    Some(w) => {
                        text += &format!(", guess {w:.2}\nh(v, w) = {:.6e}", decision.h_value)
                    }
                    None => {
                        text += &format!("\nh(v) = {:.6e}", decision.h_value);
                        match threshold.and_then(|t| t.v0()) {
                            Some(v0) => text += &format!("\nthreshold {v0:.2}"),
                            None => text += "\nno threshold: h keeps one sign on the support",
                        }
                    }
                }
                if decision.boundary {
                    text += "\n(h is within the zero band; tie resolved as ACCEPT)";
                }
                emit(text)?;
            }
            Ok(match decision.verdict {
                Verdict::Accept => 0,
                Verdict::Reject => 1,
            })
        }

        Command::Threshold { x_tol } => {
            if !(*x_tol > 0.0) {
                return Err(CliError::Usage(format!(
                    "--x-tol must be positive, got {x_tol}"
                )));
            }
            let t = model.find_threshold(*x_tol)?;
            let text = match (cli.machine, t) {
                (
                    true,
                    Threshold::Crossing {
                        v0,
                        bracket,
                        sign_changes,
                        accept_left,
                    },
                ) => json!({
                    "status": "crossing",
                    "v0": num(v0),
                    "bracket": [num(bracket.0), num(bracket.1)],
                    "sign_changes": sign_changes,
                    "multiple_roots": sign_changes > 1,
                    "accept_left": accept_left,
                })
                .to_string(),
                (true, Threshold::NoSignChange(v)) => json!({
                    "status": "no-sign-change",
                    "verdict": verdict_name(v),
                })
                .to_string(),
                (
                    false,
                    Threshold::Crossing {
                        v0,
                        bracket,
                        sign_changes,
                        accept_left,
                    },
                ) => {
                    let (left, right) = if accept_left {
                        ("accept", "reject")
                    } else {
                        ("reject", "accept")
                    };
                    let mut text = format!(
                        "threshold {v0:.2}\n{left} below, {right} above\nbracket [{:.2}, {:.2}], {sign_changes} sign change(s)",
                        bracket.0, bracket.1
                    );
                    if sign_changes > 1 {
                        text += "\nwarning: several crossings; reporting the leftmost";
                    }
                    text
                }
                (false, Threshold::NoSignChange(v)) => {
                    format!("no sign change: {v} at every price")
                }
            };
            emit(text)?;
            Ok(0)
        }

        Command::Grid {
            what,
            resolution,
            output,
        } => {
            let grid = compute_grid(&model, *what, *resolution)?;
            match output {
                Some(path) => {
                    grid.write_file(path).map_err(io_err(path))?;
                    if cli.machine {
                        emit(
                            json!({
                                "grid": what.name(),
                                "path": path.display().to_string(),
                                "resolution": resolution,
                                "rows": grid.rows.len(),
                            })
                            .to_string(),
                        )?;
                    } else {
                        emit(format!(
                            "wrote {} rows of {} to {}",
                            grid.rows.len(),
                            what,
                            path.display()
                        ))?;
                    }
                }
                None => {
                    grid.write_csv(&mut *out).map_err(stdout_err)?;
                }
            }
            Ok(0)
        }

        Command::Simulate {
            strategy,
            compare,
            n,
        } => {
            let mut resolver = StrategyResolver::new(&model, strategy.table.as_deref());
            let labels: Vec<&str> = if compare.is_empty() {
                vec![strategy.strategy.as_str()]
            } else {
                compare.iter().map(String::as_str).collect()
            };
            let specs = labels
                .iter()
                .map(|l| resolver.resolve(l))
                .collect::<CliResult<Vec<_>>>()?;
            let reports = compare_strategies(&specs, &model, *n, cli.seed)?;
            emit(format_reports(&labels, &reports, cli.machine))?;
            Ok(0)
        }

        Command::Expected { strategy } => {
            let spec = StrategyResolver::new(&model, strategy.table.as_deref())
                .resolve(&strategy.strategy)?;
            let b = model.expected_price(&spec)?;
            if cli.machine {
                emit(
                    json!({
                        "strategy": strategy.strategy,
                        "mu0": num(b.mu0),
                        "mu1": num(b.mu1),
                        "total": num(b.total),
                    })
                    .to_string(),
                )?;
            } else {
                emit(format!(
                    "strategy {}\nmu0   {:.2}\nmu1   {:.2}\ntotal {:.2}",
                    strategy.strategy, b.mu0, b.mu1, b.total
                ))?;
            }
            Ok(0)
        }
    }
}

fn format_reports(labels: &[&str], reports: &[SimulationReport], machine: bool) -> String {
    if machine {
        let records: Vec<Value> = labels
            .iter()
            .zip(reports)
            .map(|(label, r)| {
                json!({
                    "strategy": label,
                    "n": r.n,
                    "seed": r.seed,
                    "mean_paid": num(r.mean_paid),
                    "std_err": num(r.std_err),
                    "accept_rate": num(r.accept_rate),
                })
            })
            .collect();
        return json!({ "reports": records }).to_string();
    }
    let width = labels
        .iter()
        .map(|l| l.len())
        .max()
        .unwrap_or(0)
        .max("strategy".len());
    let mut lines = vec![format!(
        "{:<width$}  {:>10}  {:>10}  {:>8}  {:>11}",
        "strategy", "n", "mean paid", "std err", "accept rate"
    )];
    for (label, r) in labels.iter().zip(reports) {
        lines.push(format!(
            "{:<width$}  {:>10}  {:>10.2}  {:>8.2}  {:>11.4}",
            label, r.n, r.mean_paid, r.std_err, r.accept_rate
        ));
    }
    lines.push(format!("seed {}", reports[0].seed));
    lines.join("\n")
}
