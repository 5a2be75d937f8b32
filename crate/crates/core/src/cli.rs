//! Command-line front end. [`run`] is the whole program minus process exit,
//! so it can be driven from tests.
//!
//! Exit codes: 0 when the analysis succeeds with a positive answer, 2 when
//! it answers no (arbitrage found, claim not replicable, ...), 1 for bad
//! input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::arbitrage::{check_classical_na, check_nra};
use crate::calculus::gen_cond_expectation;
use crate::error::Error;
use crate::format::{load_market_file, parse_document, read_file, LoadError, Market};
use crate::hedging::{calibrate, dp_superhedge, market_complete, replicable, subhedge, superhedge};
use crate::market::StaticOption;
use crate::pricing::{find_pricing_system, pricing_bounds, RobustPricingSystem};
use crate::rational::format_rational;
use crate::report::{self, collect_certificates, rational};

pub const THREADS_ENV: &str = "ROBUSTFTAP_THREADS";

#[derive(Debug, Parser)]
#[command(name = "robustftap", version, about = "Exact robust no-arbitrage analysis of finite markets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide no robust arbitrage.
    CheckNra {
        market: PathBuf,
        #[arg(long)]
        with_options: bool,
    },
    /// Classical no-arbitrage for a single model.
    Na {
        market: PathBuf,
        #[arg(long)]
        theta: String,
    },
    /// A robust pricing system charging the given model.
    PricingSystem {
        market: PathBuf,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        with_options: bool,
    },
    /// Lowest and highest price of a claim over all pricing systems.
    Bounds {
        market: PathBuf,
        #[arg(long)]
        claim: String,
        #[arg(long)]
        with_options: bool,
    },
    Superhedge {
        market: PathBuf,
        #[arg(long)]
        claim: String,
        #[arg(long)]
        with_options: bool,
    },
    Subhedge {
        market: PathBuf,
        #[arg(long)]
        claim: String,
        #[arg(long)]
        with_options: bool,
    },
    Replicate {
        market: PathBuf,
        #[arg(long)]
        claim: String,
    },
    Complete {
        market: PathBuf,
    },
    /// Prices before and after calibrating to the market's options.
    Calibrate {
        market: PathBuf,
        #[arg(long)]
        claim: String,
    },
    /// Backward one-period superhedging value.
    DpPrice {
        market: PathBuf,
        #[arg(long)]
        claim: String,
    },
    /// Generalized conditional expectation of a terminal claim given F_s.
    Condexp {
        market: PathBuf,
        #[arg(long)]
        claim: String,
        /// Conditioning date s.
        #[arg(long)]
        time: usize,
        /// Use a pricing system charging this model.
        #[arg(long, conflicts_with = "system")]
        theta: Option<String>,
        /// Use the first pricing system found in this JSON file.
        #[arg(long)]
        system: Option<PathBuf>,
    },
    /// Re-verify every certificate inside a report.
    VerifySystem {
        market: PathBuf,
        #[arg(long)]
        file: PathBuf,
    },
    Toy {
        #[command(subcommand)]
        action: ToyCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum ToyCommand {
    /// Rewrite a toy stanza as an explicit space and models.
    Expand {
        market: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Load(#[from] LoadError),
    #[error("{0}")]
    Analysis(#[from] Error),
    #[error("{0}")]
    Io(String),
}

struct Outcome {
    exit: i32,
    summary: String,
    result: Value,
}

impl Outcome {
    fn new(positive: bool, summary: String, result: Value) -> Self {
        Outcome {
            exit: if positive { 0 } else { 2 },
            summary,
            result,
        }
    }
}

/// Sizes the global rayon pool from `ROBUSTFTAP_THREADS` when set.
pub fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if a pool already exists, which is harmless.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    let echo: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let started = Instant::now();

    if let Command::Toy {
        action: ToyCommand::Expand { market, output },
    } = &cli.command
    {
        return match expand(market, output.as_deref(), out) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                1
            }
        };
    }

    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    let document = json!({
        "command": echo,
        "exit_code": outcome.exit,
        "result": outcome.result,
        "timing": {"elapsed_ms": started.elapsed().as_millis() as u64},
    });
    let text = serde_json::to_string_pretty(&document).expect("reports serialize") + "\n";
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, &text) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return 1;
        }
    }
    let _ = if cli.json {
        out.write_all(text.as_bytes())
    } else {
        out.write_all(outcome.summary.as_bytes())
    };
    outcome.exit
}

fn expand(market: &Path, output: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let doc = parse_document(&read_file(market)?)?.expand()?;
    let text = serde_json::to_string_pretty(&doc).expect("documents serialize") + "\n";
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn options_for(market: &Market, with_options: bool) -> Vec<StaticOption> {
    if with_options {
        market.static_options()
    } else {
        Vec::new()
    }
}

fn strategy_lines(table: &Value) -> String {
    let mut s = String::new();
    for row in table.as_array().into_iter().flatten() {
        let outcomes: Vec<&str> = row["outcomes"]
            .as_array()
            .into_iter()
            .flatten()
            .filter_map(Value::as_str)
            .collect();
        let position: Vec<&str> = row["position"]
            .as_array()
            .into_iter()
            .flatten()
            .filter_map(Value::as_str)
            .collect();
        s.push_str(&format!(
            "  H_{} on {{{}}}: [{}]\n",
            row["t"],
            outcomes.join(","),
            position.join(", ")
        ));
    }
    s
}

/// Turns a failed no-arbitrage precondition into a negative verdict with
/// the arbitrage as evidence.
fn nra_failure(market: &Market, options: &[StaticOption]) -> Result<Outcome, CliError> {
    let verdict = check_nra(&market.family, options)?;
    let witness = verdict
        .witness
        .as_ref()
        .map(|w| report::witness(&market.family, w, !options.is_empty()))
        .unwrap_or(Value::Null);
    Ok(Outcome::new(
        false,
        "NRA fails: a robust arbitrage exists\n".into(),
        json!({"nra": false, "witness": witness}),
    ))
}

fn guard<T>(
    market: &Market,
    options: &[StaticOption],
    result: crate::error::Result<T>,
    f: impl FnOnce(T) -> Result<Outcome, CliError>,
) -> Result<Outcome, CliError> {
    match result {
        Ok(v) => f(v),
        Err(Error::NraViolated) => nra_failure(market, options),
        Err(e @ (Error::NoPricingSystem | Error::UnboundedBelow)) => Ok(Outcome::new(
            false,
            format!("{e}\n"),
            json!({"error": e.to_string()}),
        )),
        Err(e) => Err(e.into()),
    }
}

fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::CheckNra {
            market,
            with_options,
        } => {
            let m = load_market_file(market)?;
            let options = options_for(&m, *with_options);
            let verdict = check_nra(&m.family, &options)?;
            if !verdict.holds {
                return nra_failure(&m, &options);
            }
            let certs: Vec<Value> = verdict
                .certificates
                .iter()
                .map(|q| report::pricing_system(&m.family, q, *with_options))
                .collect();
            Ok(Outcome::new(
                true,
                format!("NRA holds\ncertificates: {}\n", certs.len()),
                json!({"nra": true, "certificates": certs}),
            ))
        }
        Command::Na { market, theta } => {
            let m = load_market_file(market)?;
            let th = m.family.theta_index(theta)?;
            let v = check_classical_na(&m.family, th)?;
            let result = json!({
                "theta": theta,
                "holds": v.holds,
                "martingale_measure": v.martingale_measure.as_deref().map(|q| {
                    m.family.space().outcomes().iter().cloned().zip(q.iter().map(rational))
                        .collect::<serde_json::Map<_, _>>()
                }),
                "witness": v.witness.as_ref().map(|h| report::strategy(&m.family, h)),
            });
            let summary = if v.holds {
                format!("NA holds for {theta}\n")
            } else {
                format!(
                    "NA fails for {theta}\n{}",
                    strategy_lines(&result["witness"])
                )
            };
            Ok(Outcome::new(v.holds, summary, result))
        }
        Command::PricingSystem {
            market,
            theta,
            with_options,
        } => {
            let m = load_market_file(market)?;
            let th = m.family.theta_index(theta)?;
            let options = options_for(&m, *with_options);
            match find_pricing_system(&m.family, th, &options)? {
                Some(q) => Ok(Outcome::new(
                    true,
                    format!(
                        "pricing system found, mass on {theta}: {}\n",
                        format_rational(&q.mass(th))
                    ),
                    json!({"theta": theta, "system": report::pricing_system(&m.family, &q, *with_options)}),
                )),
                None => Ok(Outcome::new(
                    false,
                    format!("no pricing system charges {theta}\n"),
                    json!({"theta": theta, "system": null}),
                )),
            }
        }
        Command::Bounds {
            market,
            claim,
            with_options,
        } => {
            let m = load_market_file(market)?;
            let f = m.claim(claim)?;
            let options = options_for(&m, *with_options);
            guard(&m, &options, pricing_bounds(&m.family, f, &options), |b| {
                Ok(Outcome::new(
                    true,
                    format!(
                        "price bounds for {claim}: [{}, {}]\n",
                        format_rational(&b.lo),
                        format_rational(&b.hi)
                    ),
                    report::bounds(&m.family, &b, *with_options),
                ))
            })
        }
        Command::Superhedge {
            market,
            claim,
            with_options,
        }
        | Command::Subhedge {
            market,
            claim,
            with_options,
        } => {
            let sub = matches!(command, Command::Subhedge { .. });
            let m = load_market_file(market)?;
            let f = m.claim(claim)?;
            let options = options_for(&m, *with_options);
            let result = if sub {
                subhedge(&m.family, f, &options)
            } else {
                superhedge(&m.family, f, &options)
            };
            guard(&m, &options, result, |h| {
                let named: Vec<(String, StaticOption)> = if *with_options {
                    m.options.clone()
                } else {
                    Vec::new()
                };
                let value = report::hedge(&m.family, &h, &named);
                let summary = format!(
                    "{} price for {claim}: {}\n{}",
                    if sub { "subhedging" } else { "superhedging" },
                    format_rational(&h.price),
                    strategy_lines(&value["strategy"])
                );
                Ok(Outcome::new(true, summary, value))
            })
        }
        Command::Replicate { market, claim } => {
            let m = load_market_file(market)?;
            let f = m.claim(claim)?;
            match replicable(&m.family, f)? {
                Some(r) => {
                    let table = report::strategy(&m.family, &r.strategy);
                    Ok(Outcome::new(
                        true,
                        format!(
                            "{claim} is replicable from {}\n{}",
                            format_rational(&r.initial),
                            strategy_lines(&table)
                        ),
                        json!({"replicable": true, "initial": rational(&r.initial), "strategy": table}),
                    ))
                }
                None => Ok(Outcome::new(
                    false,
                    format!("{claim} is not replicable\n"),
                    json!({"replicable": false}),
                )),
            }
        }
        Command::Complete { market } => {
            let m = load_market_file(market)?;
            guard(&m, &[], market_complete(&m.family), |c| {
                let witness = c.witness.as_ref().map(|w| {
                    let space = m.family.space();
                    json!({
                        "theta": m.family.thetas()[w.theta],
                        "t": w.t,
                        "atom": w.atom,
                        "event": space.atoms(w.t)[w.atom].iter()
                            .map(|&o| space.outcomes()[o].clone()).collect::<Vec<_>>(),
                    })
                });
                let summary = match &witness {
                    None => "market is complete\n".to_string(),
                    Some(w) => format!(
                        "market is incomplete: indicator of {} under {} is not replicable\n",
                        w["event"], w["theta"]
                    ),
                };
                Ok(Outcome::new(
                    c.complete,
                    summary,
                    json!({"complete": c.complete, "witness": witness}),
                ))
            })
        }
        Command::Calibrate { market, claim } => {
            let m = load_market_file(market)?;
            if m.options.is_empty() {
                return Err(LoadError::Parse {
                    path: "$.options".into(),
                    message: "calibration needs at least one option".into(),
                }
                .into());
            }
            let f = m.claim(claim)?;
            let options = m.static_options();
            guard(&m, &options, calibrate(&m.family, f, &options), |c| {
                let summary = format!(
                    "{claim}: uncalibrated [{}, {}], calibrated [{}, {}]\n",
                    format_rational(&c.uncalibrated.lo),
                    format_rational(&c.uncalibrated.hi),
                    format_rational(&c.calibrated.lo),
                    format_rational(&c.calibrated.hi)
                );
                Ok(Outcome::new(
                    true,
                    summary,
                    json!({
                        "uncalibrated": report::bounds(&m.family, &c.uncalibrated, false),
                        "calibrated": report::bounds(&m.family, &c.calibrated, true),
                        "superhedge": report::hedge(&m.family, &c.superhedge, &m.options),
                        "subhedge": report::hedge(&m.family, &c.subhedge, &m.options),
                        "systems": c.systems.iter()
                            .map(|q| report::pricing_system(&m.family, q, true)).collect::<Vec<_>>(),
                    }),
                ))
            })
        }
        Command::DpPrice { market, claim } => {
            let m = load_market_file(market)?;
            let f = m.claim(claim)?;
            guard(&m, &[], dp_superhedge(&m.family, f), |v| {
                Ok(Outcome::new(
                    true,
                    format!("dynamic-programming value for {claim}: {}\n", format_rational(&v)),
                    json!({"value": rational(&v)}),
                ))
            })
        }
        Command::Condexp {
            market,
            claim,
            time,
            theta,
            system,
        } => {
            let m = load_market_file(market)?;
            let f = m.claim(claim)?;
            let q = match system {
                Some(file) => first_system(&m, file)?,
                None => {
                    let th = match theta {
                        Some(name) => m.family.theta_index(name)?,
                        None => 0,
                    };
                    match find_pricing_system(&m.family, th, &[])? {
                        Some(q) => q,
                        None => {
                            return Ok(Outcome::new(
                                false,
                                "no pricing system to condition with\n".into(),
                                json!({"system": null}),
                            ))
                        }
                    }
                }
            };
            let ce = gen_cond_expectation(&m.family, &q, f, m.family.horizon(), *time)?;
            let space = m.family.space();
            let table = |values: &[Vec<crate::Rational>]| -> Value {
                m.family
                    .thetas()
                    .iter()
                    .zip(values)
                    .map(|(theta, row)| (theta.clone(), report::rationals(row)))
                    .collect::<serde_json::Map<_, _>>()
                    .into()
            };
            let atoms: Vec<Vec<String>> = space
                .atoms(*time)
                .iter()
                .map(|a| a.iter().map(|&w| space.outcomes()[w].clone()).collect())
                .collect();
            Ok(Outcome::new(
                true,
                format!(
                    "conditional expectation of {claim} given F_{time}: kernel dimension {}\n",
                    ce.kernel_dimension()
                ),
                json!({
                    "s": time,
                    "atoms": atoms,
                    "system": report::pricing_system(&m.family, &q, false),
                    "particular": table(&ce.particular),
                    "kernel_basis": ce.kernel_basis.iter().map(|b| table(b)).collect::<Vec<_>>(),
                }),
            ))
        }
        Command::VerifySystem { market, file } => {
            let m = load_market_file(market)?;
            let value = read_json(file)?;
            let checks = collect_certificates(&m.family, &m.static_options(), &value);
            if checks.is_empty() {
                return Err(LoadError::Parse {
                    path: "$".into(),
                    message: format!("no certificates found in {}", file.display()),
                }
                .into());
            }
            let all = checks.iter().all(|c| c.valid);
            let mut summary = String::new();
            for c in &checks {
                summary.push_str(&format!(
                    "{} {} at {}: {}\n",
                    if c.valid { "ok  " } else { "FAIL" },
                    c.kind,
                    c.path,
                    c.detail
                ));
            }
            Ok(Outcome::new(
                all,
                summary,
                json!({
                    "all_valid": all,
                    "checks": checks.iter().map(|c| json!({
                        "path": c.path, "kind": c.kind, "valid": c.valid, "detail": c.detail,
                    })).collect::<Vec<_>>(),
                }),
            ))
        }
        Command::Toy { .. } => unreachable!("handled before dispatch"),
    }
}

fn read_json(file: &Path) -> Result<Value, CliError> {
    let text = read_file(file)?;
    serde_json::from_str(&text).map_err(|e| {
        LoadError::Parse {
            path: "$".into(),
            message: format!("{}: {e}", file.display()),
        }
        .into()
    })
}

fn first_system(market: &Market, file: &Path) -> Result<RobustPricingSystem, CliError> {
    fn find(value: &Value) -> Option<&Value> {
        match value {
            Value::Object(map) => {
                if map.get("kind").and_then(Value::as_str) == Some("pricing_system") {
                    return Some(value);
                }
                map.values().find_map(find)
            }
            Value::Array(items) => items.iter().find_map(find),
            _ => None,
        }
    }
    let value = read_json(file)?;
    let cert = find(&value).ok_or_else(|| LoadError::Parse {
        path: "$".into(),
        message: format!("no pricing system in {}", file.display()),
    })?;
    Ok(report::read_pricing_system(&market.family, cert)?)
}
