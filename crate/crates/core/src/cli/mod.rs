//! Command-line front end.

mod output;
mod parse;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::branch::{hensel_lift, validate_branch, verify_annihilation};
use crate::continuation::TrackerConfig;
use crate::error::{Error, Result};
use crate::estimate::EstimateReport;
use crate::exactpoly::{parse_rational, rational_to_string, BiPoly, MultiPoly, Rational};
use crate::radius::{puiseux_radius, RadiusConfig, RadiusResult};
use crate::reinhardt::{directional_profiles, log_convexity_check, multivariate_expand};
use crate::singularities::CandidateSet;

pub use output::{algebraic_json, value_json};
pub use parse::parse_polynomial;

#[derive(Debug, Parser)]
#[command(
    name = "algradius",
    version,
    about = "Exact convergence radii of algebraic power series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Working precision of certified candidate boxes.
    #[arg(long, global = true, default_value_t = 53)]
    pub precision_bits: u32,
    /// Relative tolerance of the coefficient cross-check.
    #[arg(long, global = true, default_value_t = 0.1)]
    pub rtol: f64,
    /// Significant digits of decimal approximations.
    #[arg(long, global = true, default_value_t = 12)]
    pub digits: usize,
}

#[derive(Debug, Args)]
pub struct Source {
    /// Polynomial in X (or X1..Xn) and T, e.g. "X*T^2 - T + 1".
    #[arg(long, required_unless_present = "input", conflicts_with = "input")]
    pub poly: Option<String>,
    /// Read the polynomial from a file.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact convergence radius of the branch through t0.
    Radius {
        #[command(flatten)]
        source: Source,
        /// Simple root of P(0, T) selecting the branch, e.g. 3/2.
        #[arg(long, allow_hyphen_values = true)]
        t0: String,
        /// Report R^p for the Puiseux series in X^(1/p).
        #[arg(long, default_value_t = 1)]
        puiseux: u32,
        /// Truncation order of the cross-check (0 disables it).
        #[arg(long, default_value_t = 512)]
        check_order: usize,
    },
    /// Exact series coefficients through order N.
    Expand {
        #[command(flatten)]
        source: Source,
        /// Simple root of P(0, T) selecting the branch, e.g. 3/2.
        #[arg(long, allow_hyphen_values = true)]
        t0: String,
        /// Truncation order N.
        #[arg(long)]
        order: usize,
    },
    /// Candidate singularities and their exact moduli.
    Candidates {
        #[command(flatten)]
        source: Source,
    },
    /// Hadamard and ratio estimates from the coefficients.
    Estimate {
        #[command(flatten)]
        source: Source,
        /// Simple root of P(0, T) selecting the branch, e.g. 3/2.
        #[arg(long, allow_hyphen_values = true)]
        t0: String,
        /// Truncation order N.
        #[arg(long)]
        order: usize,
    },
    /// Directional radii of a multivariate branch.
    Domain {
        #[command(flatten)]
        source: Source,
        /// Simple root of P(0, T) selecting the branch, e.g. 3/2.
        #[arg(long, allow_hyphen_values = true)]
        t0: String,
        /// Truncation order N.
        #[arg(long)]
        order: usize,
        /// Comma-separated directions, components separated by colons: 1:1,1:2
        #[arg(long, value_delimiter = ',', required = true)]
        directions: Vec<String>,
        /// Additive slack of the log-convexity check.
        #[arg(long, default_value_t = 0.02)]
        slack: f64,
    },
}

/// Text produced by one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_)
        | Error::NotARoot
        | Error::Parse { .. }
        | Error::InsufficientData => 2,
        Error::RamifiedBranch(_) => 3,
        Error::Undecided(_)
        | Error::ObstructionUndecided(_)
        | Error::TrackingFailed(_)
        | Error::PrecisionExhausted { .. } => 4,
        Error::CrossValidationFailed(_) => 5,
        Error::InternalInconsistency(_) => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidArgument(_) => "invalid-argument",
        Error::NotARoot => "not-a-root",
        Error::RamifiedBranch(_) => "ramified-branch",
        Error::PrecisionExhausted { .. } => "precision-exhausted",
        Error::InternalInconsistency(_) => "internal-inconsistency",
        Error::TrackingFailed(_) => "tracking-failed",
        Error::ObstructionUndecided(_) | Error::Undecided(_) => "undecided",
        Error::InsufficientData => "insufficient-data",
        Error::Parse { .. } => "parse",
        Error::CrossValidationFailed(_) => "cross-validation-failed",
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(stdout) => Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => {
            let code = exit_code(&e);
            let mut out = Outcome {
                code,
                stdout: String::new(),
                stderr: String::new(),
            };
            if cli.json {
                let mut v =
                    json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } });
                match &e {
                    Error::Undecided(u) => v["undecided"] = output::undecided_json(u, cli.digits),
                    Error::CrossValidationFailed(r) => {
                        v["result"] = output::radius_json(r, cli.digits)
                    }
                    Error::Parse { line, column, .. } => {
                        v["error"]["line"] = (*line).into();
                        v["error"]["column"] = (*column).into();
                    }
                    _ => {}
                }
                out.stdout = pretty(&v);
            } else {
                if let Error::CrossValidationFailed(r) = &e {
                    out.stdout = radius_text(r, cli.digits);
                }
                if let Error::Undecided(u) = &e {
                    out.stdout = format!(
                        "frontier modulus  {}\nhadamard estimate {}\n",
                        u.modulus,
                        u.hadamard
                            .as_ref()
                            .map_or("n/a".into(), output::estimate_text)
                    );
                }
                out.stderr = format!("error: {e}\n");
            }
            out
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json renders") + "\n"
}

fn source_text(s: &Source) -> Result<String> {
    match (&s.poly, &s.input) {
        (Some(p), _) => Ok(p.clone()),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display()))),
        (None, None) => Err(Error::invalid("no polynomial given")),
    }
}

fn univariate(s: &Source) -> Result<(String, BiPoly)> {
    let text = source_text(s)?;
    let p = parse_polynomial(&text)?;
    Ok((text.trim().to_string(), p.to_bipoly()?))
}

fn rational_arg(name: &str, text: &str) -> Result<Rational> {
    parse_rational(text.trim())
        .ok_or_else(|| Error::invalid(format!("--{name}: `{text}` is not a rational number")))
}

fn radius_config(cli: &Cli, check_order: usize) -> RadiusConfig {
    RadiusConfig {
        tracker: TrackerConfig {
            precision_bits: cli.precision_bits,
            ..TrackerConfig::default()
        },
        digits: cli.digits,
        rtol: cli.rtol,
        check_order,
    }
}

fn radius_text(r: &RadiusResult, digits: usize) -> String {
    let mut rows = vec![vec![
        "radius".to_string(),
        output::value_text(&r.value, digits),
    ]];
    if let Some(v) = r.value.finite() {
        let (lo, hi) = v.interval();
        rows.push(vec!["defining".into(), v.defining().display_in("s")]);
        rows.push(vec![
            "interval".into(),
            format!("[{}, {}]", rational_to_string(lo), rational_to_string(hi)),
        ]);
    }
    rows.push(vec!["decimal".into(), r.decimal.clone()]);
    if r.power > 1 {
        rows.push(vec![
            "base radius".into(),
            output::value_text(&r.base, digits),
        ]);
        rows.push(vec!["puiseux".into(), r.power.to_string()]);
    }
    if let Some(c) = &r.cross_check {
        rows.push(vec![
            "cross-check".into(),
            format!(
                "{} (hadamard {} at N={}, rtol {})",
                if c.passed { "pass" } else { "FAIL" },
                output::estimate_text(&c.hadamard),
                c.order,
                c.rtol
            ),
        ]);
    }
    let mut out = output::table(&["field", "value"], &rows);
    if !r.candidates.is_empty() {
        out.push('\n');
        out.push_str(&output::candidates_text(&r.candidates, &r.verdicts, digits));
    }
    out
}

fn dispatch(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Radius {
            source,
            t0,
            puiseux,
            check_order,
        } => {
            let (text, p) = univariate(source)?;
            let t0 = rational_arg("t0", t0)?;
            let r = puiseux_radius(&p, *puiseux, &t0, &radius_config(cli, *check_order))?;
            if cli.json {
                let mut v = output::radius_json(&r, cli.digits);
                v["command"] = "radius".into();
                v["polynomial"] = text.into();
                v["t0"] = rational_to_string(&t0).into();
                Ok(pretty(&v))
            } else {
                Ok(radius_text(&r, cli.digits))
            }
        }
        Command::Expand { source, t0, order } => {
            let text = source_text(source)?;
            let m = parse_polynomial(&text)?;
            let t0 = rational_arg("t0", t0)?;
            if m.nvars() <= 1 {
                let b = validate_branch(&m.to_bipoly()?, &t0)?;
                let s = hensel_lift(&b, *order);
                let verified = verify_annihilation(&b, &s);
                if cli.json {
                    Ok(pretty(&json!({
                        "command": "expand",
                        "order": order,
                        "coefficients": s.to_strings(),
                        "annihilation_verified": verified,
                    })))
                } else {
                    let rows: Vec<Vec<String>> = s
                        .to_strings()
                        .into_iter()
                        .enumerate()
                        .map(|(k, c)| vec![k.to_string(), c])
                        .collect();
                    Ok(output::table(&["k", "a_k"], &rows))
                }
            } else {
                expand_multi(cli, &m, &t0, *order)
            }
        }
        Command::Candidates { source } => {
            let (_, p) = univariate(source)?;
            let c = CandidateSet::compute(&p.squarefree_part_t(), cli.precision_bits)?;
            if cli.json {
                let mut v = output::candidates_json(&c, cli.digits);
                v["command"] = "candidates".into();
                Ok(pretty(&v))
            } else {
                let mut out = format!("candidate polynomial: {}\n\n", c.d.display_in("X"));
                out.push_str(&output::candidates_text(&c, &[], cli.digits));
                Ok(out)
            }
        }
        Command::Estimate { source, t0, order } => {
            let (_, p) = univariate(source)?;
            let t0 = rational_arg("t0", t0)?;
            let b = validate_branch(&p, &t0)?;
            let r = EstimateReport::new(&hensel_lift(&b, *order))?;
            if cli.json {
                let mut v = output::estimate_report_json(&r);
                v["command"] = "estimate".into();
                Ok(pretty(&v))
            } else {
                let rows = vec![
                    vec!["order".into(), r.order.to_string()],
                    vec!["window".into(), format!("[{}, {}]", r.window.0, r.window.1)],
                    vec!["hadamard".into(), output::estimate_text(&r.hadamard)],
                    vec![
                        "ratio".into(),
                        r.ratio.map_or("n/a".into(), |x| format!("{x:.9}")),
                    ],
                    vec!["convention".into(), r.ratio_convention.into()],
                ];
                Ok(output::table(&["field", "value"], &rows))
            }
        }
        Command::Domain {
            source,
            t0,
            order,
            directions,
            slack,
        } => {
            let text = source_text(source)?;
            let m = parse_polynomial(&text)?;
            let t0 = rational_arg("t0", t0)?;
            let dirs = directions
                .iter()
                .map(|d| {
                    d.split(':')
                        .map(|x| rational_arg("directions", x))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let profiles = directional_profiles(&m, &t0, &dirs, *order, &radius_config(cli, 0))?;
            let convexity = match log_convexity_check(&profiles, *slack) {
                Ok(c) => Some(c),
                Err(Error::InsufficientData) => None,
                Err(e) => return Err(e),
            };
            if cli.json {
                Ok(pretty(&json!({
                    "command": "domain",
                    "order": order,
                    "profiles": profiles.iter().map(|p| output::profile_json(p, cli.digits)).collect::<Vec<_>>(),
                    "log_convexity": convexity.as_ref().map(output::convexity_json),
                })))
            } else {
                let rows: Vec<Vec<String>> = profiles
                    .iter()
                    .map(|p| {
                        vec![
                            p.direction
                                .iter()
                                .map(rational_to_string)
                                .collect::<Vec<_>>()
                                .join(":"),
                            output::estimate_text(&p.rho_estimate),
                            output::value_text(&p.rho_upper, cli.digits),
                            p.gap
                                .map_or(String::new(), |g| format!("{:.2}%", 100.0 * g)),
                            if p.gap_flagged {
                                "gap".into()
                            } else {
                                String::new()
                            },
                        ]
                    })
                    .collect();
                let mut out = output::table(
                    &["direction", "estimate", "exact upper bound", "gap", "flag"],
                    &rows,
                );
                out.push_str(&match &convexity {
                    Some(c) => format!(
                        "\nlog-convexity: {} ({} triples, worst violation {:.3e})\n",
                        if c.passed { "pass" } else { "FAIL" },
                        c.triples_checked,
                        c.worst_violation
                    ),
                    None => "\nlog-convexity: not enough finite directions\n".into(),
                });
                Ok(out)
            }
        }
    }
}

fn expand_multi(cli: &Cli, m: &MultiPoly, t0: &Rational, order: usize) -> Result<String> {
    let s = multivariate_expand(m, t0, order)?;
    if cli.json {
        let coeffs: Vec<Value> = s
            .iter()
            .map(|(alpha, c)| json!({ "alpha": alpha, "value": rational_to_string(c) }))
            .collect();
        Ok(pretty(&json!({
            "command": "expand",
            "order": order,
            "variables": s.nvars(),
            "coefficients": coeffs,
        })))
    } else {
        let rows: Vec<Vec<String>> = s
            .iter()
            .map(|(alpha, c)| {
                vec![
                    alpha
                        .iter()
                        .map(u32::to_string)
                        .collect::<Vec<_>>()
                        .join(","),
                    rational_to_string(c),
                ]
            })
            .collect();
        Ok(output::table(&["alpha", "a_alpha"], &rows))
    }
}
