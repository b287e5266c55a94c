//! The `dualutil` command line.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 audit failure,
//! 3 infeasible elicitation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dualutil_core::du::{anticipated_utility, choquet_evaluate, concavity_counterexample, rdu_evaluate};
use dualutil_core::elicit::{elicit_dual, elicit_eu, DualElicitation, EuElicitation};
use dualutil_core::eu::{self, UtilityFunction};
use dualutil_core::num::to_f64;
use dualutil_core::{are_comonotonic, DiscreteMeasure, DistortionFunction, StepQuantile};
use serde_json::{json, Value};

use crate::audit::{self, AuditConfig, Suite};
use crate::json::{self, FieldError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_AUDIT_FAILED: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "dualutil", version, about = "Expected, rank-dependent and Choquet utility toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed of the audit generator.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of audit trials.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Audit tolerance, overriding the suite default.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expected utility of a measure.
    EvalEu {
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        measure: PathBuf,
    },
    /// Rank-dependent utility of a step quantile.
    EvalRdu {
        #[arg(long)]
        w: PathBuf,
        #[arg(long)]
        quantile: PathBuf,
    },
    /// Choquet integral of a measure against a normalized distortion.
    EvalChoquet {
        #[arg(long)]
        w: PathBuf,
        #[arg(long)]
        measure: PathBuf,
    },
    /// Anticipated utility of a step quantile.
    EvalAu {
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        w: PathBuf,
        #[arg(long)]
        quantile: PathBuf,
    },
    /// Quantile function of a measure.
    Quantile {
        #[arg(long)]
        measure: PathBuf,
    },
    /// Measure of a step quantile.
    Invert {
        #[arg(long)]
        quantile: PathBuf,
    },
    /// Mixture alpha·mu + (1 − alpha)·nu.
    Mix {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
    },
    /// Conditional-expectation coarsening of a measure or a quantile.
    Coarsen(CoarsenArgs),
    /// Whether random variables on a shared sample space are comonotonic.
    ComonoCheck {
        /// Files holding one random variable or an array of them.
        #[arg(long = "vars", num_args = 1.., required = true)]
        vars: Vec<PathBuf>,
    },
    /// Randomized property audit.
    Audit {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
    },
    /// Fits a utility table to a preference dataset.
    ElicitEu {
        #[arg(long)]
        data: PathBuf,
    },
    /// Fits a monotone distortion to a preference dataset.
    ElicitDual {
        #[arg(long)]
        data: PathBuf,
    },
    /// Four-point prospect showing that a distortion is not risk averse.
    Counterexample {
        #[arg(long)]
        w: PathBuf,
    },
}

#[derive(Debug, Args)]
struct CoarsenArgs {
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Cuts as `{"cuts":[…]}` or a bare array.
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long)]
    quantile: Option<PathBuf>,
    /// Levels as `{"betas":[…]}` or a bare array.
    #[arg(long)]
    betas: Option<PathBuf>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

/// A fatal validation error naming the offending file and field.
#[derive(Debug)]
struct Failure(String);

impl Failure {
    fn input(file: &str, e: FieldError) -> Self {
        if e.field.is_empty() {
            Self(format!("{file}: {}", e.message))
        } else {
            Self(format!("{file}: {}: {}", e.field, e.message))
        }
    }
}

fn display_name(path: &Path) -> String {
    if path == Path::new("-") {
        "<stdin>".into()
    } else {
        path.display().to_string()
    }
}

/// Reads input files, with `-` standing for standard input (at most once).
struct Inputs<'a> {
    stdin: Option<&'a mut dyn Read>,
}

impl Inputs<'_> {
    fn value(&mut self, path: &Path) -> Result<(String, Value), Failure> {
        let name = display_name(path);
        let text = if path == Path::new("-") {
            let stdin = self.stdin.take().ok_or_else(|| Failure("standard input can be read only once".into()))?;
            let mut text = String::new();
            stdin.read_to_string(&mut text).map_err(|e| Failure(format!("{name}: {e}")))?;
            text
        } else {
            std::fs::read_to_string(path).map_err(|e| Failure(format!("{name}: {e}")))?
        };
        let value = json::parse(&text).map_err(|e| Failure::input(&name, e))?;
        Ok((name, value))
    }

    fn load<T>(&mut self, path: &Path, f: impl FnOnce(&Value) -> Result<T, FieldError>) -> Result<T, Failure> {
        let (name, value) = self.value(path)?;
        f(&value).map_err(|e| Failure::input(&name, e))
    }
}

/// Structured command output in both formats.
struct Output {
    json: Value,
    csv: String,
    code: i32,
}

impl Output {
    fn ok(json: Value, csv: String) -> Self {
        Self { json, csv, code: EXIT_OK }
    }
}

pub fn format_float(x: f64) -> String {
    json::canonical(&json::number(x)).trim_end().to_string()
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn value_output(v: f64) -> Output {
    Output::ok(json!({ "value": json::number(v) }), csv_table(&["value"], [vec![format_float(v)]]))
}

fn measure_output(m: &DiscreteMeasure) -> Output {
    let rows = m.atoms().iter().map(|a| {
        let point: Vec<String> = a.point.coords().iter().map(|&c| format_float(c)).collect();
        vec![point.join(";"), format_float(to_f64(&a.mass))]
    });
    Output::ok(json::measure_value(m), csv_table(&["point", "mass"], rows))
}

fn quantile_output(q: &StepQuantile) -> Output {
    let rows = q.levels().iter().zip(q.values()).map(|(l, &v)| vec![format_float(to_f64(l)), format_float(v)]);
    Output::ok(json::quantile_value(q), csv_table(&["level", "value"], rows))
}

fn utility_output(u: &UtilityFunction) -> Output {
    let csv = match u {
        UtilityFunction::Table(t) => csv_table(
            &["point", "value"],
            t.points().iter().zip(t.values()).map(|(p, &v)| {
                let point: Vec<String> = p.coords().iter().map(|&c| format_float(c)).collect();
                vec![point.join(";"), format_float(v)]
            }),
        ),
        UtilityFunction::PiecewiseLinear(f) => csv_table(
            &["knot", "value"],
            f.knots().iter().zip(f.values()).map(|(&k, &v)| vec![format_float(k), format_float(v)]),
        ),
    };
    Output::ok(json::utility_value(u), csv)
}

fn distortion_output(w: &DistortionFunction) -> Output {
    let rows = w.knots().iter().zip(w.values()).map(|(&k, &v)| vec![format_float(k), format_float(v)]);
    Output::ok(json::distortion_value(w), csv_table(&["knot", "value"], rows))
}

/// A flat object as a two-row CSV; nested values are embedded as JSON.
fn record_csv(v: &Value) -> String {
    let Value::Object(map) = v else { return json::canonical(v) };
    let mut keys: Vec<&String> = map.keys().collect();
    keys.sort();
    let cells = keys.iter().map(|k| match &map[*k] {
        Value::Number(n) if n.is_f64() => format_float(n.as_f64().expect("f64")),
        Value::String(s) => s.clone(),
        other => {
            let text = json::canonical(other);
            let text = text.trim_end();
            if text.contains([',', '"']) {
                format!("\"{}\"", text.replace('"', "\"\""))
            } else {
                text.to_string()
            }
        }
    });
    let mut out = String::new();
    writeln!(out, "{}", keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",")).unwrap();
    writeln!(out, "{}", cells.collect::<Vec<_>>().join(",")).unwrap();
    out
}

fn record_output(v: Value, code: i32) -> Output {
    let csv = record_csv(&v);
    Output { json: v, csv, code }
}

fn execute(cli: &Cli, inputs: &mut Inputs<'_>) -> Result<Output, Failure> {
    let eval = |r: dualutil_core::Result<f64>| r.map_err(|e| Failure(e.to_string()));
    Ok(match &cli.command {
        Command::EvalEu { u, measure } => {
            let u = inputs.load(u, json::utility)?;
            let m = inputs.load(measure, json::measure)?;
            value_output(eval(eu::evaluate(&u, &m))?)
        }
        Command::EvalRdu { w, quantile } => {
            let w = inputs.load(w, json::distortion)?;
            let q = inputs.load(quantile, json::quantile)?;
            value_output(rdu_evaluate(&w, &q))
        }
        Command::EvalChoquet { w, measure } => {
            let w = inputs.load(w, json::distortion)?;
            let m = inputs.load(measure, json::measure)?;
            value_output(eval(choquet_evaluate(&w, &m))?)
        }
        Command::EvalAu { u, w, quantile } => {
            let u = inputs.load(u, json::utility)?;
            let w = inputs.load(w, json::distortion)?;
            let q = inputs.load(quantile, json::quantile)?;
            value_output(eval(anticipated_utility(&u, &w, &q))?)
        }
        Command::Quantile { measure } => {
            let m = inputs.load(measure, json::measure)?;
            quantile_output(&m.quantile().map_err(|e| Failure(e.to_string()))?)
        }
        Command::Invert { quantile } => measure_output(&inputs.load(quantile, json::quantile)?.inverse().to_measure()),
        Command::Mix { alpha, mu, nu } => {
            let alpha = json::parse_exact(alpha).ok_or_else(|| Failure(format!("--alpha: not a number: {alpha}")))?;
            let mu = inputs.load(mu, json::measure)?;
            let nu = inputs.load(nu, json::measure)?;
            measure_output(&DiscreteMeasure::mix_exact(&alpha, &mu, &nu).map_err(|e| Failure(format!("--alpha: {e}")))?)
        }
        Command::Coarsen(args) => match (&args.measure, &args.partition, &args.quantile, &args.betas) {
            (Some(m), Some(p), None, None) => {
                let m = inputs.load(m, json::measure)?;
                let p = inputs.load(p, json::partition)?;
                measure_output(&m.coarsen(&p).map_err(|e| Failure(e.to_string()))?)
            }
            (None, None, Some(q), Some(b)) => {
                let q = inputs.load(q, json::quantile)?;
                let name = display_name(b);
                let betas = inputs.load(b, json::betas)?;
                quantile_output(&q.coarsen(&betas).map_err(|e| Failure(format!("{name}: {e}")))?)
            }
            _ => return Err(Failure("coarsen takes either --measure with --partition or --quantile with --betas".into())),
        },
        Command::ComonoCheck { vars } => {
            let mut all = Vec::new();
            for path in vars {
                all.extend(inputs.load(path, json::random_variables)?);
            }
            let answer = are_comonotonic(&all).map_err(|e| Failure(e.to_string()))?;
            record_output(json!({ "comonotonic": answer, "variables": all.len() }), EXIT_OK)
        }
        Command::Audit { suite } => {
            let config = AuditConfig {
                seed: cli.seed.unwrap_or(0),
                trials: cli.trials.unwrap_or(1000),
                tolerance: cli.tolerance.unwrap_or_else(|| suite.default_tolerance()),
            };
            if !config.tolerance.is_finite() {
                return Err(Failure("--tolerance: must be finite".into()));
            }
            let report = audit::run(*suite, &config);
            let code = if report.passed() { EXIT_OK } else { EXIT_AUDIT_FAILED };
            record_output(report.to_json(), code)
        }
        Command::ElicitEu { data } => {
            let data = inputs.load(data, json::dataset)?;
            match elicit_eu(&data).map_err(|e| Failure(e.to_string()))? {
                EuElicitation::Feasible(u) => utility_output(&u),
                EuElicitation::Infeasible { phase_one } => record_output(
                    json!({ "feasible": false, "phase_one": json::number(phase_one) }),
                    EXIT_INFEASIBLE,
                ),
            }
        }
        Command::ElicitDual { data } => {
            let data = inputs.load(data, json::dataset)?;
            match elicit_dual(&data).map_err(|e| Failure(e.to_string()))? {
                DualElicitation::Feasible(w) => distortion_output(&w),
                DualElicitation::Infeasible { phase_one, signed_representable } => record_output(
                    json!({
                        "feasible": false,
                        "phase_one": json::number(phase_one),
                        "signed_representable": signed_representable,
                    }),
                    EXIT_INFEASIBLE,
                ),
            }
        }
        Command::Counterexample { w } => {
            let w = inputs.load(w, json::distortion)?;
            let v = match concavity_counterexample(&w) {
                None => json!({ "found": false }),
                Some(c) => json!({
                    "found": true,
                    "p1": json::number(c.p1),
                    "p2": json::number(c.p2),
                    "p3": json::number(c.p3),
                    "quantile": json::quantile_value(&c.quantile),
                    "betas": json::betas_value(&c.betas),
                    "violation": json::number(c.violation),
                }),
            };
            record_output(v, EXIT_OK)
        }
    })
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let mut inputs = Inputs { stdin: Some(stdin) };
    match execute(&cli, &mut inputs) {
        Ok(out) => {
            let text = match cli.format {
                Format::Json => json::canonical(&out.json),
                Format::Csv => out.csv,
            };
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return EXIT_INVALID;
            }
            out.code
        }
        Err(Failure(message)) => {
            let _ = writeln!(stderr, "error: {message}");
            EXIT_INVALID
        }
    }
}
