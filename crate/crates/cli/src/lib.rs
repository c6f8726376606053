//! `countstable` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid parameters, 2 usage error,
//! 3 verification failure.

use std::fmt;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use countstable::pmf::{format_value, panjer_pmf_auto, stable_pmf, MAX_TRUNCATION};
use countstable::sample::{hermite_sample, stable_sample};
use countstable::stability::{verify_pmf_level, Verdict, DEFAULT_WINDOW, MAX_PMF_COPIES, PMF_TOL};
use countstable::{CompoundParams, CountPmf, HermiteParams, StableError, StableParams};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_250_912;
pub const DEFAULT_COUNT: usize = 1000;
pub const DEFAULT_N_LIST: [u32; 3] = [2, 3, 4];

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_PARAMS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "countstable",
    version,
    about = "Discrete stable distributions: PMFs, samples, moments and stability checks"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Truncated PMF table with a certified tail bound.
    Pmf(Flags),
    /// Random draws, one per line.
    Sample(Flags),
    /// Check the stability identity for each n in --n.
    Verify(Flags),
    /// Mean and dispersion ("inf" when infinite).
    Moments(Flags),
    /// APGF on the grid t = 0, 0.1, ..., 2.
    Apgf(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma2: Option<f64>,
    /// Truncation index (pmf) or comparison window (verify).
    #[arg(long)]
    max_k: Option<usize>,
    /// Comma-separated copy counts for verify.
    #[arg(long = "n", value_delimiter = ',')]
    n_list: Option<Vec<u32>>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_COUNT)]
    count: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = PMF_TOL)]
    tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Pmf,
    Sample,
    Verify,
    Moments,
    Apgf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Parametrization {
    Stable { alpha: f64, delta: f64, gamma: f64 },
    Compound { lambda: f64, theta: f64, alpha: f64 },
    Hermite { mu: f64, sigma2: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub command: Command,
    pub parametrization: Parametrization,
    pub max_k: Option<usize>,
    pub n_list: Vec<u32>,
    pub seed: u64,
    pub count: usize,
    pub format: Format,
    pub tol: f64,
}

/// A rejected command line. `exit_code` is 0 for `--help`/`--version`.
#[derive(Debug)]
pub struct UsageError {
    pub message: String,
    pub exit_code: i32,
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn usage(message: impl Into<String>) -> UsageError {
    UsageError {
        message: message.into(),
        exit_code: EXIT_USAGE,
    }
}

pub fn parse_args<I, T>(argv: I) -> Result<CliConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| UsageError {
        message: e.render().to_string(),
        exit_code: if e.use_stderr() { EXIT_USAGE } else { EXIT_OK },
    })?;
    let (command, flags) = match cli.command {
        CommandArgs::Pmf(f) => (Command::Pmf, f),
        CommandArgs::Sample(f) => (Command::Sample, f),
        CommandArgs::Verify(f) => (Command::Verify, f),
        CommandArgs::Moments(f) => (Command::Moments, f),
        CommandArgs::Apgf(f) => (Command::Apgf, f),
    };
    let parametrization = resolve_parametrization(&flags)?;

    if let Some(k) = flags.max_k {
        if k > MAX_TRUNCATION {
            return Err(usage(format!(
                "--max-k must be at most {MAX_TRUNCATION}, got {k}"
            )));
        }
    }
    let n_list = flags.n_list.unwrap_or_else(|| DEFAULT_N_LIST.to_vec());
    if n_list.is_empty() {
        return Err(usage("--n needs at least one copy count"));
    }
    if let Some(bad) = n_list.iter().find(|&&n| n == 0 || n > MAX_PMF_COPIES) {
        return Err(usage(format!(
            "--n values must lie in 1..={MAX_PMF_COPIES}, got {bad}"
        )));
    }
    if !(flags.tol > 0.0 && flags.tol.is_finite()) {
        return Err(usage(format!("--tol must be positive, got {}", flags.tol)));
    }
    Ok(CliConfig {
        command,
        parametrization,
        max_k: flags.max_k,
        n_list,
        seed: flags.seed,
        count: flags.count,
        format: flags.format,
        tol: flags.tol,
    })
}

fn resolve_parametrization(f: &Flags) -> Result<Parametrization, UsageError> {
    let stable: Vec<&str> = [("--delta", f.delta), ("--gamma", f.gamma)]
        .into_iter()
        .filter_map(|(name, v)| v.map(|_| name))
        .collect();
    let compound: Vec<&str> = [("--lambda", f.lambda), ("--theta", f.theta)]
        .into_iter()
        .filter_map(|(name, v)| v.map(|_| name))
        .collect();
    let hermite: Vec<&str> = [("--mu", f.mu), ("--sigma2", f.sigma2)]
        .into_iter()
        .filter_map(|(name, v)| v.map(|_| name))
        .collect();

    let groups: Vec<&Vec<&str>> = [&stable, &compound, &hermite]
        .into_iter()
        .filter(|g| !g.is_empty())
        .collect();
    if groups.len() > 1 {
        return Err(usage(format!(
            "{} conflicts with {}: give exactly one parametrization",
            groups[0][0], groups[1][0]
        )));
    }
    if !hermite.is_empty() && f.alpha.is_some() {
        return Err(usage(format!(
            "--alpha conflicts with {}: the Hermite parametrization fixes alpha = 2",
            hermite[0]
        )));
    }
    let need = |name: &str, v: Option<f64>| v.ok_or_else(|| usage(format!("missing {name}")));
    if !stable.is_empty() {
        Ok(Parametrization::Stable {
            alpha: need("--alpha", f.alpha)?,
            delta: need("--delta", f.delta)?,
            gamma: need("--gamma", f.gamma)?,
        })
    } else if !compound.is_empty() {
        Ok(Parametrization::Compound {
            lambda: need("--lambda", f.lambda)?,
            theta: need("--theta", f.theta)?,
            alpha: need("--alpha", f.alpha)?,
        })
    } else if !hermite.is_empty() {
        Ok(Parametrization::Hermite {
            mu: need("--mu", f.mu)?,
            sigma2: need("--sigma2", f.sigma2)?,
        })
    } else {
        Err(usage(
            "no parametrization: give --alpha/--delta/--gamma, --lambda/--theta/--alpha or --mu/--sigma2",
        ))
    }
}

/// The validated law in every parametrization the commands need.
struct Law {
    stable: StableParams,
    hermite: Option<HermiteParams>,
}

fn resolve_law(p: Parametrization) -> Result<Law, StableError> {
    match p {
        Parametrization::Stable {
            alpha,
            delta,
            gamma,
        } => Ok(Law {
            stable: StableParams::checked(alpha, delta, gamma)?,
            hermite: None,
        }),
        Parametrization::Compound {
            lambda,
            theta,
            alpha,
        } => {
            let stable = CompoundParams::new(lambda, theta, alpha)?.to_stable();
            stable.ensure_valid()?;
            Ok(Law {
                stable,
                hermite: None,
            })
        }
        Parametrization::Hermite { mu, sigma2 } => {
            let h = HermiteParams::new(mu, sigma2)?;
            Ok(Law {
                stable: h.to_stable(),
                hermite: Some(h),
            })
        }
    }
}

fn json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)
}

#[derive(Serialize)]
struct ApgfPoint {
    t: f64,
    psi: f64,
}

#[derive(Serialize)]
struct Moments {
    mean: countstable::Moment,
    dispersion: countstable::Moment,
}

/// Executes a parsed command, writing results to `out` and diagnostics to `err`.
pub fn run(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let law = match resolve_law(config.parametrization) {
        Ok(law) => law,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID_PARAMS;
        }
    };
    match execute(config, &law, out) {
        Ok(code) => code,
        Err(RunError::Params(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID_PARAMS
        }
        Err(RunError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID_PARAMS
        }
    }
}

enum RunError {
    Params(StableError),
    Io(std::io::Error),
}

impl From<StableError> for RunError {
    fn from(e: StableError) -> Self {
        RunError::Params(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

fn execute(config: &CliConfig, law: &Law, out: &mut dyn Write) -> Result<i32, RunError> {
    let p = &law.stable;
    match config.command {
        Command::Pmf => {
            let pmf = match config.max_k {
                Some(k) => stable_pmf(p, k)?,
                None => match p.to_compound() {
                    Ok(c) => panjer_pmf_auto(&c),
                    Err(StableError::Degenerate) => CountPmf::point_mass(0),
                    Err(e) => return Err(e.into()),
                },
            };
            match config.format {
                Format::Csv => out.write_all(pmf.to_csv().as_bytes())?,
                Format::Json => json_line(out, &pmf)?,
            }
        }
        Command::Sample => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let draws = match (&law.hermite, p.to_compound()) {
                (Some(h), _) => hermite_sample(h, &mut rng, config.count),
                (None, Ok(c)) => stable_sample(&c, &mut rng, config.count),
                (None, Err(StableError::Degenerate)) => vec![0; config.count],
                (None, Err(e)) => return Err(e.into()),
            };
            match config.format {
                Format::Csv => {
                    let mut buf = String::with_capacity(draws.len() * 4);
                    for d in &draws {
                        buf.push_str(&d.to_string());
                        buf.push('\n');
                    }
                    out.write_all(buf.as_bytes())?;
                }
                Format::Json => json_line(out, &draws)?,
            }
        }
        Command::Moments => {
            let m = Moments {
                mean: p.mean(),
                dispersion: p.dispersion(),
            };
            match config.format {
                Format::Csv => {
                    writeln!(out, "quantity,value")?;
                    writeln!(out, "mean,{}", m.mean)?;
                    writeln!(out, "dispersion,{}", m.dispersion)?;
                }
                Format::Json => json_line(out, &m)?,
            }
        }
        Command::Apgf => {
            let points = (0..=20)
                .map(|i| {
                    let t = f64::from(i) / 10.0;
                    p.apgf(t).map(|psi| ApgfPoint { t, psi })
                })
                .collect::<Result<Vec<_>, _>>()?;
            match config.format {
                Format::Csv => {
                    writeln!(out, "t,psi")?;
                    for pt in &points {
                        writeln!(out, "{},{}", pt.t, format_value(pt.psi))?;
                    }
                }
                Format::Json => json_line(out, &points)?,
            }
        }
        Command::Verify => {
            let window = config.max_k.unwrap_or(DEFAULT_WINDOW);
            let reports = std::thread::scope(|scope| {
                let handles: Vec<_> = config
                    .n_list
                    .iter()
                    .map(|&n| scope.spawn(move || verify_pmf_level(p, n, window, config.tol)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("verifier thread panicked"))
                    .collect::<Result<Vec<_>, _>>()
            })?;
            match config.format {
                Format::Csv => {
                    writeln!(
                        out,
                        "n,a_n,b_n,param_residual,tv,verdict,form_used,window,truncation_error,outside_mass"
                    )?;
                    for r in &reports {
                        let verdict = serde_json::to_value(r.verdict).expect("enum serializes");
                        let form = serde_json::to_value(r.form_used).expect("enum serializes");
                        writeln!(
                            out,
                            "{},{},{},{},{},{},{},{},{},{}",
                            r.n,
                            format_value(r.a_n),
                            format_value(r.b_n),
                            format_value(r.param_residual),
                            format_value(r.tv),
                            verdict.as_str().unwrap_or_default(),
                            form.as_str().unwrap_or_default(),
                            r.window,
                            format_value(r.truncation_error),
                            format_value(r.outside_mass),
                        )?;
                    }
                }
                Format::Json => json_line(out, &reports)?,
            }
            if reports.iter().any(|r| r.verdict == Verdict::Fail) {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}
