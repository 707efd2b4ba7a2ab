//! Command-line front end: argument parsing into a [`RunConfig`], dispatch,
//! deterministic JSON output and exit codes (0 ok, 2 inconclusive, 1 error).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::berend::berend_verdict;
use crate::classifier::{classify, Verdict};
use crate::config::{Bounds, Command, OrbitMode, RunConfig};
use crate::diophantine::{cook_search, lacunary_badly_approximable, RealPoly};
use crate::error::{Error, Result};
use crate::number_field::construct_example;
use crate::numeric::{parse_rational, parse_real_expr, DEFAULT_PRECISION_BITS};
use crate::polynomials::MonicIntPoly;
use crate::random::random_lacunary;
use crate::reproduce::reproduce_paper;
use crate::spec::ActionSpec;
use crate::torus::{density_diagnostic, orbit_csv, rational_orbit, TorusPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "sqd", version, about = "Strong quasidiagonality verdicts for Z^d ⋊ Z^n")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Working precision in bits for floating-point stages.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION_BITS)]
    precision: usize,
    #[command(flatten)]
    bounds: BoundArgs,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// Highest power factored directly in condition (1).
    #[arg(long, global = true)]
    direct_bound: Option<u32>,
    #[arg(long, global = true)]
    word_bound: Option<u32>,
    #[arg(long, global = true)]
    coincidence_bound: Option<u32>,
    #[arg(long, global = true)]
    iters: Option<u64>,
    /// Box size `1/2^k` for density diagnostics.
    #[arg(long, global = true)]
    eps: Option<String>,
    /// Horizon of the non-SQD witness orbit.
    #[arg(long, global = true)]
    horizon: Option<usize>,
    #[arg(long, global = true)]
    cap: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Verdict for a spec file.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Attach a non-SQD witness when the verdict is not_sqd.
        #[arg(long)]
        witness: bool,
    },
    /// Berend's three conditions.
    BerendCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Two commuting unit matrices from a totally real cubic.
    ConstructExample {
        /// Ascending coefficients, constant first, e.g. "-1,-2,1,1".
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = crate::number_field::DEFAULT_UNIT_BOUND)]
        bound: i64,
        /// Spec file to write.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Verification report (stdout when absent).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Orbit of a point under the dual action.
    Orbit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        csv_steps: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Small values of real polynomials at integers.
    CookSearch {
        /// JSON file `{"polys": [["0", "sqrt(2)"], ...]}`, ascending coefficients.
        #[arg(long)]
        polys: PathBuf,
        #[arg(long = "N", default_value_t = 10_000)]
        n: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Badly approximable point for a lacunary integer sequence.
    BadlyApprox {
        /// `pow:B`, `list:t1,t2,...` or `random` (seeded).
        #[arg(long)]
        sequence: String,
        #[arg(long = "N", default_value_t = 200)]
        n: usize,
        #[arg(long, default_value = "3/2")]
        ratio: String,
        #[arg(long)]
        eps_target: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the flagship pipelines and summarize by citation tag.
    ReproducePaper {
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Parses command-line arguments (program name first).
pub fn parse_args<I, T>(args: I) -> std::result::Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let defaults = Bounds::default();
    let b = cli.bounds;
    let bounds = Bounds {
        direct_bound: b.direct_bound.unwrap_or(defaults.direct_bound),
        word_bound: b.word_bound.unwrap_or(defaults.word_bound),
        coincidence_bound: b.coincidence_bound.unwrap_or(defaults.coincidence_bound),
        iters: b.iters.unwrap_or(defaults.iters),
        eps: b.eps.unwrap_or(defaults.eps),
        witness_horizon: b.horizon.unwrap_or(defaults.witness_horizon),
        orbit_cap: b.cap.unwrap_or(defaults.orbit_cap),
    };
    let command = match cli.command {
        Sub::Classify { input, output, witness } => Command::Classify { input, output, witness },
        Sub::BerendCheck { input, output } => Command::BerendCheck { input, output },
        Sub::ConstructExample { poly, bound, output, report } => Command::ConstructExample {
            poly,
            unit_bound: bound,
            output,
            report,
        },
        Sub::Orbit { input, theta, mode, csv, csv_steps, output } => Command::Orbit {
            input,
            theta,
            mode: match mode {
                ModeArg::Exact => OrbitMode::Exact,
                ModeArg::Float => OrbitMode::Float,
            },
            csv,
            csv_steps,
            output,
        },
        Sub::CookSearch { polys, n, output } => Command::CookSearch { polys, n, output },
        Sub::BadlyApprox { sequence, n, ratio, eps_target, output } => Command::BadlyApprox {
            sequence,
            n,
            ratio,
            eps_target,
            output,
        },
        Sub::ReproducePaper { output } => Command::ReproducePaper { output },
    };
    Ok(RunConfig {
        command,
        seed: cli.seed,
        precision_bits: cli.precision,
        bounds,
    })
}

/// Report text plus any extra files, and the exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: String,
    pub report_path: Option<PathBuf>,
    pub files: Vec<(PathBuf, String)>,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_spec(path: &Path) -> Result<ActionSpec> {
    ActionSpec::from_json_str(&read(path)?)
}

/// `1/2^k` to `k`.
fn eps_bits(text: &str) -> Result<u32> {
    let q = parse_rational(text).map_err(|_| Error::schema("eps", format!("not a rational: {text:?}")))?;
    let bad = || Error::schema("eps", format!("box size must be 1/2^k, got {text}"));
    if !q.numer().is_one() {
        return Err(bad());
    }
    let d = q.denom();
    if d.magnitude().count_ones() != 1 || d.bits() < 2 {
        return Err(bad());
    }
    Ok((d.bits() - 1) as u32)
}

fn parse_cook_polys(text: &str, prec: usize) -> Result<Vec<RealPoly>> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| Error::schema("$", format!("invalid JSON: {e}")))?;
    let polys = v
        .get("polys")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::schema("polys", "expected an array of coefficient arrays"))?;
    polys
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let coeffs = p
                .as_array()
                .ok_or_else(|| Error::schema(format!("polys[{i}]"), "expected an array"))?;
            coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let field = format!("polys[{i}][{j}]");
                    let text = match c {
                        Value::String(s) => s.clone(),
                        Value::Number(n) => n.to_string(),
                        _ => return Err(Error::schema(field, "expected a string or number")),
                    };
                    parse_real_expr(&text, prec).map_err(|e| Error::schema(field, e.to_string()))
                })
                .collect::<Result<Vec<_>>>()
                .map(RealPoly::new)
        })
        .collect()
}

fn sequence_terms(spec: &str, n: usize, seed: u64) -> Result<Vec<BigInt>> {
    if let Some(b) = spec.strip_prefix("pow:") {
        let base: BigInt = b
            .trim()
            .parse()
            .map_err(|_| Error::schema("sequence", format!("bad base {b:?}")))?;
        let mut t = BigInt::one();
        return Ok((0..n)
            .map(|_| {
                t = &t * &base;
                t.clone()
            })
            .collect());
    }
    if let Some(list) = spec.strip_prefix("list:") {
        let terms = list
            .split(',')
            .enumerate()
            .map(|(i, s)| {
                s.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::schema(format!("sequence[{i}]"), format!("not an integer: {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(terms.into_iter().take(n).collect());
    }
    if spec == "random" {
        return Ok(random_lacunary(&mut ChaCha8Rng::seed_from_u64(seed), n));
    }
    Err(Error::schema(
        "sequence",
        format!("expected pow:B, list:... or random, got {spec:?}"),
    ))
}

pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let prec = config.precision_bits;
    let mut files = Vec::new();
    let mut exit_code = EXIT_OK;
    let (report, report_path) = match &config.command {
        Command::Classify { input, output, witness } => {
            let spec = read_spec(input)?;
            let r = classify(&spec, &config.classify_options(*witness))?;
            if r.verdict == Verdict::Inconclusive {
                exit_code = EXIT_INCONCLUSIVE;
            }
            (to_json(&r), output.clone())
        }
        Command::BerendCheck { input, output } => {
            let spec = read_spec(input)?;
            (to_json(&berend_verdict(&spec, config.berend_bounds())?), output.clone())
        }
        Command::ConstructExample { poly, unit_bound, output, report } => {
            let p = MonicIntPoly::parse_ascending(poly)?;
            let ex = construct_example(&p, *unit_bound, config.berend_bounds())?;
            if !ex.verified {
                exit_code = EXIT_ERROR;
            }
            if let Some(path) = output {
                files.push((path.clone(), format!("{}\n", ex.spec.to_json_pretty())));
            }
            (to_json(&ex), report.clone())
        }
        Command::Orbit { input, theta, mode, csv, csv_steps, output } => {
            let spec = read_spec(input)?;
            let point = TorusPoint::parse(theta, *mode == OrbitMode::Exact)?;
            let bits = eps_bits(&config.bounds.eps)?;
            let record = density_diagnostic(&spec, &point, config.bounds.iters, bits, config.seed)?;
            if let Some(path) = csv {
                files.push((path.clone(), orbit_csv(&spec, &point, *csv_steps, config.seed)?));
            }
            let exact_orbit = if point.is_exact() {
                Some(rational_orbit(&spec, &point, config.bounds.orbit_cap)?)
            } else {
                None
            };
            let body = json!({
                "theta": point,
                "rational_orbit": exact_orbit,
                "eps": config.bounds.eps,
                "iters": config.bounds.iters,
                "seed": config.seed,
                "density": record,
            });
            (to_json(&body), output.clone())
        }
        Command::CookSearch { polys, n, output } => {
            let family = parse_cook_polys(&read(polys)?, prec)?;
            let r = cook_search(&family, *n)?;
            (to_json(&json!({ "polys": family, "result": r })), output.clone())
        }
        Command::BadlyApprox { sequence, n, ratio, eps_target, output } => {
            let terms = sequence_terms(sequence, *n, config.seed)?;
            let ratio: BigRational =
                parse_rational(ratio).map_err(|_| Error::schema("ratio", format!("not a rational: {ratio:?}")))?;
            let target = eps_target
                .as_deref()
                .map(|t| parse_rational(t).map_err(|_| Error::schema("eps_target", format!("not a rational: {t:?}"))))
                .transpose()?;
            let id = if sequence == "random" {
                format!("random:{}", config.seed)
            } else {
                sequence.clone()
            };
            let cert = lacunary_badly_approximable(&terms, &ratio, target.as_ref(), &id)?;
            let body = json!({
                "ratio": ratio.to_string(),
                "ratio_decimal": ratio.to_f64(),
                "n": terms.len(),
                "certificate": cert,
            });
            (to_json(&body), output.clone())
        }
        Command::ReproducePaper { output } => {
            let summary = reproduce_paper(config)?;
            if !summary.passed {
                exit_code = EXIT_ERROR;
            }
            (to_json(&summary), output.clone())
        }
    };
    Ok(RunOutcome {
        exit_code,
        report,
        report_path,
        files,
    })
}

fn error_json(e: &Error) -> String {
    let body = match e {
        Error::Schema { field, message } => json!({ "error": e.to_string(), "field": field, "message": message }),
        _ => json!({ "error": e.to_string() }),
    };
    to_json(&body)
}

/// Runs a configuration, writing files and printing reports; returns the
/// process exit code.
pub fn execute(config: &RunConfig) -> i32 {
    match run(config) {
        Ok(outcome) => {
            for (path, text) in &outcome.files {
                if let Err(e) = fs::write(path, text) {
                    eprint!("{}", error_json(&Error::Io(format!("{}: {e}", path.display()))));
                    return EXIT_ERROR;
                }
            }
            match &outcome.report_path {
                Some(path) => {
                    if let Err(e) = fs::write(path, &outcome.report) {
                        eprint!("{}", error_json(&Error::Io(format!("{}: {e}", path.display()))));
                        return EXIT_ERROR;
                    }
                }
                None => print!("{}", outcome.report),
            }
            outcome.exit_code
        }
        Err(e) => {
            eprint!("{}", error_json(&e));
            EXIT_ERROR
        }
    }
}

/// Entry point used by the `sqd` binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(args) {
        Ok(config) => execute(&config),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
