use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use blbesov_cli::commands::{self, Emitted};
use blbesov_cli::config::{FileConfig, RunConfig};
use blbesov_cli::selftest::run_selftest;

/// Spline-wavelet bases, weighted sequence norms, discrete Hardy constants
/// and approximation numbers of embedding models.
#[derive(Parser)]
#[command(name = "blbesov", version, about)]
struct Cli {
    /// JSON file with global defaults (seed, threads, out)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized searches
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread count (default: BLBESOV_THREADS or all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file for the JSON report (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output file for the CSV table, when the command produces one
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral data of the order-n construction
    Ef {
        #[arg(long)]
        order: usize,
        /// Comma-separated per-root choices: r or 1/r
        #[arg(long)]
        tmask: Option<String>,
    },
    /// B-spline dump and samples
    Spline {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        shift: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Include the piecewise data in the JSON payload (always on)
        #[arg(long, default_value_t = true)]
        dump: bool,
    },
    /// Localized scaling function and wavelet
    Wavelet {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        kk: u8,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        k: f64,
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
    /// Local Muckenhoupt constant estimate
    Muck {
        #[arg(long)]
        weight: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 4)]
        levels: u32,
        #[arg(long, default_value_t = 2.0)]
        window: f64,
        /// Ascending p grid for the r0 sweep, e.g. 1,1.25,1.5,2
        #[arg(long)]
        r0_grid: Option<String>,
    },
    /// Wavelet coefficients of a function
    Coeffs {
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lo: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        hi: Vec<f64>,
    },
    /// Weighted smoothness norm of a function
    Norm {
        /// b | f | wavelet | lp
        #[arg(long)]
        kind: String,
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "one")]
        weight: String,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lo: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        hi: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
    },
    /// Discrete Hardy constants of an integration operator
    Hardy {
        /// Operator as inline JSON, overriding the decomposed flags
        #[arg(long)]
        spec: Option<String>,
        /// Comma-separated axis stars: 0 | + | -
        #[arg(long, default_value = "+")]
        stars: String,
        #[arg(long, default_value = "1")]
        orders: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        cuts: String,
        #[arg(long)]
        w: String,
        #[arg(long)]
        u: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        range: i64,
    },
    /// Two-sided inequality harness over the canonical suite
    Verify {
        /// forward | reverse
        direction: String,
        #[arg(long)]
        stars: String,
        #[arg(long)]
        orders: String,
        #[arg(long)]
        cuts: String,
        #[arg(long, default_value = "one|one")]
        w: String,
        #[arg(long, default_value = "one|one")]
        u: String,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 12)]
        range: i64,
    },
    /// Approximation numbers of the diagonal embedding model
    Embed {
        #[arg(long)]
        s1: f64,
        #[arg(long)]
        s2: f64,
        #[arg(long, default_value = "one")]
        v: String,
        #[arg(long, default_value = "one")]
        w: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 32, alias = "K")]
        k_max: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lo: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        hi: Vec<f64>,
    },
    /// Full acceptance run; exits nonzero on any failing criterion
    Selftest,
}

fn load_file_config(path: &Option<PathBuf>) -> Result<Option<FileConfig>> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            Ok(Some(serde_json::from_str(&text).context("parsing config JSON")?))
        }
    }
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(p) => {
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
    }
}

fn emit(cfg: &RunConfig, csv_path: &Option<PathBuf>, emitted: Emitted) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&emitted.json)?;
    text.push('\n');
    write_out(&cfg.out, &text)?;
    if let Some(csv) = emitted.csv {
        if let Some(p) = csv_path {
            std::fs::write(p, csv).with_context(|| format!("writing {}", p.display()))?;
        }
    }
    Ok(())
}

/// Usage errors exit 2 (clap's default), validation errors 3, I/O errors 4.
fn classify(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<std::io::Error>().is_some()
        || format!("{err}").starts_with("reading ")
        || format!("{err}").starts_with("writing ")
    {
        4
    } else {
        3
    }
}

fn run(cli: Cli) -> Result<bool> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let file_cfg = load_file_config(&cli.config)?;
    let cfg = RunConfig::resolve(file_cfg, cli.seed, cli.threads, cli.out.clone(), argv);
    let hash = cfg.hash();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .context("building thread pool")?;
    let csv_path = cli.csv.clone();
    pool.install(|| -> Result<bool> {
        let emitted = match &cli.command {
            Command::Ef { order, tmask } => commands::cmd_ef(*order, tmask.as_deref(), &hash)?,
            Command::Spline { order, shift, samples, dump: _ } => {
                commands::cmd_spline(*order, *shift, *samples, &hash)?
            }
            Command::Wavelet { order, kk, m, k, s, samples } => {
                commands::cmd_wavelet(*order, *kk, *m, *k, *s, *samples, &hash)?
            }
            Command::Muck { weight, p, levels, window, r0_grid } => {
                commands::cmd_muck(weight, *p, *levels, *window, r0_grid.as_deref(), &hash)?
            }
            Command::Coeffs { f, order, depth, lo, hi } => {
                commands::cmd_coeffs(f, *order, *depth, lo, hi, &hash)?
            }
            Command::Norm { kind, f, weight, s, p, q, order, depth, lo, hi, r0 } => {
                commands::cmd_norm(kind, f, weight, *s, *p, *q, *order, *depth, lo, hi, *r0, &hash)?
            }
            Command::Hardy { spec, stars, orders, cuts, w, u, p, depth, range } => {
                commands::cmd_hardy(spec.as_deref(), stars, orders, cuts, w, u, *p, *depth, *range, &hash)?
            }
            Command::Verify { direction, stars, orders, cuts, w, u, s, p, q, order, depth, range } => {
                commands::cmd_verify(
                    direction, stars, orders, cuts, w, u, *s, *p, *q, *order, *depth, *range, &hash,
                )?
            }
            Command::Embed { s1, s2, v, w, depth, k_max, lo, hi } => {
                commands::cmd_embed(*s1, *s2, v, w, *depth, *k_max, lo, hi, &hash)?
            }
            Command::Selftest => {
                let report = run_selftest(cfg.seed, hash.clone());
                let pass = report.pass;
                let mut text = serde_json::to_string_pretty(&report)?;
                text.push('\n');
                write_out(&cfg.out, &text)?;
                return Ok(pass);
            }
        };
        emit(&cfg, &csv_path, emitted)?;
        Ok(true)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}
