mod grid;
mod verify;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use polydisc::classify::regularity_class;
use polydisc::diophantine::construct_dip;
use polydisc::discrepancy::{
    l2_norm_direct, l2_norm_parseval, MotionSampleConfig, NormEstimate, SampleMode,
};
use polydisc::fourier::{chi_hat, log_log_fit, spherical_average, spherical_sweep, Frequency};
use polydisc::presets::preset;
use polydisc::{Polygon, Vec2};

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] polydisc::Error),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("verification failed")]
    Verify,
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(polydisc::Error::CostCap(_)) => 3,
            CliError::Core(polydisc::Error::DipNotFound { .. }) => 4,
            CliError::Core(_) | CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Verify => 5,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "polydisc",
    version,
    about = "Lattice-point discrepancy laboratory for convex polygons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads (results do not depend on this)
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Run on a single worker
    #[arg(long, global = true)]
    deterministic: bool,

    /// Write the main output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Source {
    /// Polygon JSON file: {"vertices": [[x, y], ...]}
    #[arg(long, conflicts_with = "preset")]
    polygon: Option<PathBuf>,

    /// Named polygon, e.g. square, triangle, pgon-family-p:4:7
    #[arg(long)]
    preset: Option<String>,
}

impl Source {
    fn load(&self) -> CliResult<Polygon> {
        match (&self.polygon, &self.preset) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                Ok(Polygon::from_json(&text)?)
            }
            (None, Some(name)) => Ok(preset(name)?),
            _ => Err(CliError::Input(
                "give exactly one of --polygon or --preset".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Grid,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Method {
    Direct,
    Parseval,
    Both,
}

#[derive(Args, Debug, Clone)]
struct Sampling {
    /// Total motion samples of the direct route
    #[arg(long, default_value_t = 20_000)]
    samples: usize,

    #[arg(long, value_enum, default_value_t = Mode::Mc)]
    mode: Mode,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Sampling {
    fn config(&self) -> CliResult<MotionSampleConfig> {
        if self.samples == 0 {
            return Err(CliError::Input("--samples must be positive".into()));
        }
        let n_sigma = (self.samples as f64).sqrt().ceil() as usize;
        let n_t = self.samples.div_ceil(n_sigma);
        Ok(MotionSampleConfig {
            n_sigma,
            n_t,
            mode: match self.mode {
                Mode::Grid => SampleMode::Grid,
                Mode::Mc => SampleMode::MonteCarlo,
            },
            seed: self.seed,
        })
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Regularity class with its witness
    Classify {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = polydisc::DEFAULT_TOL)]
        tol: f64,
    },
    /// Transform at one frequency (--xi) or spherical averages over a grid
    Transform {
        #[command(flatten)]
        source: Source,
        /// Frequency "x,y"
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        #[arg(long)]
        rho_grid: Option<String>,
        /// Angles per circle (default: resolution floor, at least 64)
        #[arg(long)]
        n_angles: Option<usize>,
    },
    /// L2 discrepancy norm by counting, by Parseval, or both
    Norm {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        rho_grid: String,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[arg(long, default_value_t = 64)]
        k_max: u32,
        #[arg(long, default_value_t = 64)]
        n_angles: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Normalized norm at each grid point against its neighbourhood median
    Scan {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        rho_grid: String,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Search an integer dilation with small |sin(pi rho |k| L_j)|
    DipSearch {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        u: u64,
        #[arg(long)]
        k_cap: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        rho_cap: u64,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Spherical averages of the transform and their log-log slope
    Decay {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "pow2:8:512")]
        rho_grid: String,
    },
    /// Cross-oracle suites; exits 5 on any failure
    Verify {
        /// One of transform, counting, parseval, dirichlet, witness, dip, classify, all
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn rho_grid(text: &str) -> CliResult<Vec<f64>> {
    let g = grid::parse_grid(text).map_err(CliError::Input)?;
    if let Some(bad) = g.iter().find(|&&r| !(r >= 1.0)) {
        return Err(CliError::Input(format!(
            "rho values must be >= 1, got {bad}"
        )));
    }
    Ok(g)
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn norm_row(csv: &mut String, est: &NormEstimate) {
    let (budget, err) = match est.method {
        polydisc::discrepancy::NormMethod::Direct => (est.samples, est.stderr.unwrap_or(0.0)),
        polydisc::discrepancy::NormMethod::Parseval => (
            est.truncation_k.unwrap_or(0) as u64,
            est.tail_estimate.unwrap_or(0.0),
        ),
    };
    let _ = writeln!(
        csv,
        "{},{},{},{},{},{}",
        fmt(est.rho),
        est.method.as_str(),
        fmt(est.value),
        fmt(est.value / est.rho.sqrt()),
        budget,
        fmt(err)
    );
}

fn neighbourhood(rho: f64) -> Vec<f64> {
    [0.05, 0.15, 0.25, 0.35]
        .iter()
        .flat_map(|&d| [rho - d, rho + d])
        .filter(|&r| r >= 1.0)
        .collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let out = cli.out.clone();
    match cli.command {
        Command::Classify { source, tol } => {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Input(format!(
                    "--tol must be positive, got {tol}"
                )));
            }
            let p = source.load()?;
            let class = regularity_class(&p, tol);
            let mut text = format!("{}\n", class.tag);
            text.push_str(&serde_json::to_string(&class).expect("class serializes"));
            text.push('\n');
            if let Some(w) = p.normalization_warning() {
                eprintln!("warning: {w}");
            }
            emit(&out, &text)
        }
        Command::Transform {
            source,
            xi,
            rho_grid: grid_text,
            n_angles,
        } => {
            let p = source.load()?;
            match (xi, grid_text) {
                (Some(xi), None) => {
                    let parts: Vec<f64> = xi
                        .split(',')
                        .map(|s| s.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| CliError::Input(format!("bad frequency {xi:?}")))?;
                    let [x, y] = parts[..] else {
                        return Err(CliError::Input(format!(
                            "frequency needs two components, got {xi:?}"
                        )));
                    };
                    let v = chi_hat(&p, Frequency::from(Vec2::new(x, y)));
                    emit(
                        &out,
                        &format!(
                            "xi_x,xi_y,re,im\n{},{},{},{}\n",
                            fmt(x),
                            fmt(y),
                            fmt(v.re),
                            fmt(v.im)
                        ),
                    )
                }
                (None, Some(text)) => {
                    let rhos = grid::parse_grid(&text).map_err(CliError::Input)?;
                    let mut csv = String::from("rho,spherical_average,n_angles\n");
                    match n_angles {
                        Some(n) => {
                            for &rho in &rhos {
                                let v = spherical_average(&p, rho, n)?;
                                let _ = writeln!(csv, "{},{},{n}", fmt(rho), fmt(v));
                            }
                        }
                        None => {
                            for row in spherical_sweep(&p, &rhos)? {
                                let _ = writeln!(
                                    csv,
                                    "{},{},{}",
                                    fmt(row.rho),
                                    fmt(row.value),
                                    row.n_angles
                                );
                            }
                        }
                    }
                    emit(&out, &csv)
                }
                _ => Err(CliError::Input(
                    "give exactly one of --xi or --rho-grid".into(),
                )),
            }
        }
        Command::Norm {
            source,
            rho_grid: text,
            method,
            k_max,
            n_angles,
            sampling,
        } => {
            let p = source.load()?;
            let rhos = rho_grid(&text)?;
            let cfg = sampling.config()?;
            let mut csv =
                String::from("rho,method,value,normalized_value,k_max_or_samples,tail_or_stderr\n");
            for &rho in &rhos {
                if method != Method::Parseval {
                    norm_row(&mut csv, &l2_norm_direct(&p, rho, &cfg)?);
                }
                if method != Method::Direct {
                    norm_row(&mut csv, &l2_norm_parseval(&p, rho, k_max, n_angles)?);
                }
            }
            emit(&out, &csv)
        }
        Command::Scan {
            source,
            rho_grid: text,
            sampling,
        } => {
            let p = source.load()?;
            let rhos = rho_grid(&text)?;
            let cfg = sampling.config()?;
            let nn = |rho: f64| -> CliResult<f64> {
                Ok(l2_norm_direct(&p, rho, &cfg)?.value / rho.sqrt())
            };
            let mut csv = String::from("rho,normalized_value,neighbourhood_median,ratio\n");
            for &rho in &rhos {
                let at = nn(rho)?;
                let around = neighbourhood(rho)
                    .into_iter()
                    .map(nn)
                    .collect::<CliResult<Vec<_>>>()?;
                let m = median(around);
                let _ = writeln!(csv, "{},{},{},{}", fmt(rho), fmt(at), fmt(m), fmt(at / m));
            }
            emit(&out, &csv)
        }
        Command::DipSearch {
            source,
            u,
            k_cap,
            rho_cap,
            sampling,
        } => {
            let p = source.load()?;
            let cert = match construct_dip(&p, u, k_cap, rho_cap) {
                Ok(c) => c,
                Err(e) => {
                    if let polydisc::Error::DipNotFound {
                        best_rho,
                        best_value,
                        ..
                    } = &e
                    {
                        eprintln!(
                            "best candidate: rho = {best_rho}, max |sin| = {}",
                            fmt(*best_value)
                        );
                    }
                    return Err(e.into());
                }
            };
            let mut json = cert.to_json();
            json.push('\n');
            emit(&out, &json)?;
            let cfg = sampling.config()?;
            let rho_u = cert.rho_u as f64;
            let mut table = String::from("rho,normalized_value\n");
            let mut rows: Vec<f64> = neighbourhood(rho_u);
            rows.push(rho_u);
            rows.sort_by(f64::total_cmp);
            for rho in rows {
                let v = l2_norm_direct(&p, rho, &cfg)?.value / rho.sqrt();
                let _ = writeln!(table, "{},{}", fmt(rho), fmt(v));
            }
            if out.is_some() {
                print!("{table}");
            } else {
                eprint!("{table}");
            }
            Ok(())
        }
        Command::Decay {
            source,
            rho_grid: text,
        } => {
            let p = source.load()?;
            let rhos = rho_grid(&text)?;
            let rows = spherical_sweep(&p, &rhos)?;
            let vals: Vec<f64> = rows.iter().map(|r| r.value).collect();
            let slope = if rhos.len() >= 2 {
                log_log_fit(&rhos, &vals)?.slope
            } else {
                f64::NAN
            };
            let mut csv = String::from("rho,spherical_average,n_angles,fitted_slope\n");
            for r in &rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    fmt(r.rho),
                    fmt(r.value),
                    r.n_angles,
                    fmt(slope)
                );
            }
            emit(&out, &csv)
        }
        Command::Verify { suite, seed } => {
            let names: Vec<&str> = if suite == "all" {
                verify::SUITES.to_vec()
            } else {
                vec![suite.as_str()]
            };
            let mut failed = false;
            let mut report = String::new();
            for name in names {
                let Some(res) = verify::run_suite(name, seed) else {
                    return Err(CliError::Input(format!(
                        "unknown suite {name:?}; known: {}, all",
                        verify::SUITES.join(", ")
                    )));
                };
                match res {
                    Ok(detail) => {
                        let _ = writeln!(report, "[PASS] {name}: {detail}");
                    }
                    Err(detail) => {
                        failed = true;
                        let _ = writeln!(report, "[FAIL] {name}: {detail}");
                    }
                }
            }
            emit(&out, &report)?;
            if failed {
                Err(CliError::Verify)
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = if cli.deterministic {
        Some(1)
    } else {
        cli.workers
    };
    if let Some(n) = threads {
        if n == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured once");
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
