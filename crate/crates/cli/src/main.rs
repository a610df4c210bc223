use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use gtet::analytic::{constant_with, QuantityName, DEFAULT_SERIES_REL_TOL};
use gtet::densities::{
    crofton_density, crofton_limit_at_two_pi, density_limit_at_zero, miles_marginal, miller_density_simplified,
    triple_convolution_density, CroftonCdf, SimplexCase,
};
use gtet::events::{Event, EventError};
use gtet::quadrature::QuadratureSpec;
use gtet::report::{estimate_report, Report, ResultEntry, Uncertainty};
use gtet::sampling::{SamplingError, MIN_TRIALS};
use gtet::validation::{run_suite, Scale};

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "gtet", version, about = "Random tetrahedra and triangles: estimates, analytic values, densities")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Add wall-clock times to the report.
    #[arg(long, global = true)]
    timing: bool,
    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monte Carlo estimate of a named event or functional.
    Estimate {
        #[arg(long)]
        event: String,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Closed-form, series or quadrature value of a named constant.
    Analytic {
        #[arg(long)]
        quantity: String,
        /// Absolute and relative quadrature tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// CSV table of a density on a grid `lo:hi:step` or `lo:hi:stepxlo:hi:step`.
    Density {
        #[arg(long)]
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
    /// Run the acceptance criteria.
    Validate {
        /// Run a single criterion by id.
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value = "full")]
        scale: String,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<EventError> for Failure {
    fn from(e: EventError) -> Self {
        match e {
            EventError::Unknown(_) | EventError::NotATetraSampler(_) => Failure::Usage(e.to_string()),
            EventError::Sampling(SamplingError::TooFewTrials { .. }) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    let start = Instant::now();
    match run(&cli, start) {
        Ok((text, code)) => {
            if let Err(e) = emit(&cli.output, &text) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_RUNTIME);
            }
            ExitCode::from(code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

/// Caps the worker pool at `GTET_THREADS` when set.
fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("GTET_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("GTET_THREADS must be a positive integer, got '{v}'"))?;
    if n == 0 {
        return Err("GTET_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn emit(path: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn run(cli: &Cli, start: Instant) -> Result<(String, u8), Failure> {
    let finish = |mut r: Report, format: Format| {
        if cli.timing {
            r.wall_time = Some(start.elapsed().as_secs_f64());
        }
        match format {
            Format::Json => r.to_json(),
            Format::Csv => results_csv(&r.results),
        }
    };
    match &cli.command {
        Cmd::Estimate { event, n, seed, format } => {
            let event: Event = event.parse()?;
            if *n < MIN_TRIALS {
                return Err(Failure::Usage(format!("--n must be at least {MIN_TRIALS}, got {n}")));
            }
            Ok((finish(estimate_report(&event, *n, *seed)?, *format), 0))
        }
        Cmd::Analytic { quantity, tol, format } => {
            let q: QuantityName = quantity.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
            let spec = QuadratureSpec::default().with_tolerance(*tol);
            spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let v = constant_with(q, &spec, DEFAULT_SERIES_REL_TOL.min(*tol)).map_err(|e| Failure::Runtime(e.to_string()))?;
            let mut config = Map::new();
            config.insert("quantity".into(), Value::String(q.to_string()));
            config.insert("tol".into(), Value::from(*tol));
            let mut r = Report::new("analytic", config);
            r.results.push(ResultEntry::from_analytic(&v));
            Ok((finish(r, *format), 0))
        }
        Cmd::Density { name, grid } => density_csv(name, grid).map(|s| (s, 0)),
        Cmd::Validate { only, scale } => {
            let scale: Scale = scale.parse().map_err(Failure::Usage)?;
            let runner = |event: &str, n: u64, seed: u64, threads: usize| spawn_estimate(event, n, seed, threads);
            let reports = run_suite(only.as_deref(), scale, &runner, |r| eprintln!("{r}")).map_err(Failure::Usage)?;
            let all_passed = reports.iter().all(|r| r.passed);
            let mut config = Map::new();
            config.insert("only".into(), only.clone().map(Value::String).unwrap_or(Value::Null));
            config.insert("scale".into(), Value::String(scale_name(scale).into()));
            let mut r = Report::new("validate", config);
            for c in &reports {
                r.results.extend(c.checks.iter().filter(|k| cli.timing || !k.timing).map(|k| k.result.clone()));
            }
            r.criteria = reports.into_iter().map(|c| if cli.timing { c } else { c.without_timing() }).collect();
            let code = if all_passed { 0 } else { EXIT_VALIDATION };
            Ok((finish(r, Format::Json), code))
        }
    }
}

fn scale_name(s: Scale) -> &'static str {
    match s {
        Scale::Full => "full",
        Scale::Quick => "quick",
    }
}

/// Reruns this binary's `estimate` under a given `GTET_THREADS`.
fn spawn_estimate(event: &str, n: u64, seed: u64, threads: usize) -> Result<Vec<u8>, String> {
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    let out = Command::new(exe)
        .args(["estimate", "--event", event, "--n", &n.to_string(), "--seed", &seed.to_string()])
        .env("GTET_THREADS", threads.to_string())
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("estimate exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn results_csv(results: &[ResultEntry]) -> String {
    let mut s = String::from("name,value,uncertainty_kind,stderr_or_bound,ci_low,ci_high,method,n_or_evals,seed\n");
    for r in results {
        let (kind, u, lo, hi) = match r.uncertainty {
            Uncertainty::Stderr { stderr, ci_low, ci_high } => ("stderr", stderr, ci_low.to_string(), ci_high.to_string()),
            Uncertainty::ErrorBound { bound } => ("error-bound", bound, String::new(), String::new()),
        };
        let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{},{},{kind},{u},{lo},{hi},{},{},{seed}", r.name, r.value, r.method, r.n_or_evals);
    }
    s
}

/// `lo:hi:step`, inclusive of `hi` up to rounding.
fn parse_axis(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Usage(format!("bad grid axis '{spec}' (expected lo:hi:step)"));
    let parts: Vec<f64> = spec.split(':').map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad());
    };
    if !(lo.is_finite() && hi.is_finite() && step.is_finite() && step > 0.0 && hi >= lo) {
        return Err(bad());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(Failure::Usage(format!("grid axis '{spec}' has too many points")));
    }
    // round to the decimals written in the spec so that 0.1 steps print as such
    let decimals = spec.split(':').take(3).map(|p| p.trim().split_once('.').map_or(0, |(_, f)| f.len())).max().unwrap_or(0);
    let scale = 10f64.powi(decimals.min(15) as i32);
    Ok((0..count)
        .map(|i| {
            let x = lo + i as f64 * step;
            if spec.contains(['e', 'E']) {
                x
            } else {
                (x * scale).round() / scale
            }
        })
        .collect())
}

fn parse_grid(spec: &str) -> Result<(Vec<f64>, Option<Vec<f64>>), Failure> {
    match spec.split_once('x') {
        Some((a, b)) => Ok((parse_axis(a)?, Some(parse_axis(b)?))),
        None => Ok((parse_axis(spec)?, None)),
    }
}

fn density_csv(name: &str, grid: &str) -> Result<String, Failure> {
    let (xs, ys) = parse_grid(grid)?;
    let two_d = |f: &dyn Fn(f64, f64) -> f64| -> Result<String, Failure> {
        let ys = ys.as_ref().ok_or_else(|| Failure::Usage(format!("density '{name}' needs a two-axis grid")))?;
        let mut s = String::from("x,y,density\n");
        for &x in &xs {
            for &y in ys {
                let _ = writeln!(s, "{x},{y},{}", f(x, y));
            }
        }
        Ok(s)
    };
    let one_d = || -> Result<(), Failure> {
        match ys {
            Some(_) => Err(Failure::Usage(format!("density '{name}' takes a one-axis grid"))),
            None => Ok(()),
        }
    };
    // the Miller densities have a logarithmic pole at the origin
    let miller = |case| move |x: f64, y: f64| miller_density_simplified(case, [x, y]).unwrap_or(f64::INFINITY);
    match name {
        "miller-general" => two_d(&miller(SimplexCase::General)),
        "miller-pinned" => two_d(&miller(SimplexCase::Pinned)),
        "conv3-general" => two_d(&|x, y| triple_convolution_density(SimplexCase::General, x, y)),
        "conv3-pinned" => two_d(&|x, y| triple_convolution_density(SimplexCase::Pinned, x, y)),
        "crofton" => {
            one_d()?;
            let two_pi = 2.0 * std::f64::consts::PI;
            let cdf = CroftonCdf::new();
            let mut s = String::from("x,density,cdf\n");
            for &x in &xs {
                // endpoints carry the finite one-sided limits
                let f = if x == 0.0 {
                    density_limit_at_zero()
                } else if x == two_pi {
                    crofton_limit_at_two_pi()
                } else {
                    crofton_density(x).unwrap_or(0.0)
                };
                let _ = writeln!(s, "{x},{f},{}", cdf.cdf(x));
            }
            Ok(s)
        }
        "miles-marginal" => {
            one_d()?;
            let spec = QuadratureSpec::default().with_tolerance(1e-10);
            let mut s = String::from("x,density,error_bound\n");
            for &x in &xs {
                let (v, e) = if x > 0.0 && x < std::f64::consts::PI {
                    let r = miles_marginal(x, &spec).map_err(|e| Failure::Runtime(e.to_string()))?;
                    (r.value, r.error_estimate)
                } else {
                    (0.0, 0.0)
                };
                let _ = writeln!(s, "{x},{v},{e}");
            }
            Ok(s)
        }
        other => Err(Failure::Usage(format!(
            "unknown density '{other}' (expected miller-general, miller-pinned, conv3-general, conv3-pinned, crofton, miles-marginal)"
        ))),
    }
}
