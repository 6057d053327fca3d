//! `ising-lab`: command-line driver for `ising-core`.
//!
//! Exit status: 0 on success, 2 on input or validation errors, 3 when a
//! computation does not converge or a certificate or identity check fails.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::config::{parse_angle, parse_complex, Format, KvFile, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ising-lab", version, about = "Numerical laboratory for the 2D Ising susceptibility integrals")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Flat key = value run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Quadrature nodes per circle (grid.m).
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Contour gap as a fraction of min Re γ on the unit circle (grid.safety).
    #[arg(long, global = true)]
    safety: Option<f64>,
    #[arg(long, global = true)]
    tol_identity: Option<f64>,
    #[arg(long, global = true)]
    tol_hull: Option<f64>,
    #[arg(long, global = true)]
    tol_active: Option<f64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorrMethod {
    Formfactor,
    Fredholm,
    Contour,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChiRouteArg {
    Tensor,
    Reduced,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// γ(z) with Re γ >= 0 and branch information.
    Gamma {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
    },
    /// Spontaneous magnetization (1 - k²)^{1/8}.
    Mag {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Complex64,
    },
    /// The order-n susceptibility integral χ^(n).
    Chi {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Complex64,
        /// Contour radius; chosen and certified automatically when absent.
        #[arg(long)]
        r: Option<f64>,
        /// Maximum integrand evaluations; required for n >= 4.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = ChiRouteArg::Tensor)]
        route: ChiRouteArg,
    },
    /// Spin-spin correlation <σ00 σMN>.
    Corr {
        #[arg(long, value_enum)]
        method: CorrMethod,
        #[arg(long = "M", allow_hyphen_values = true)]
        lattice_m: i64,
        #[arg(long = "N", allow_hyphen_values = true)]
        lattice_n: i64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Complex64,
        /// Expansion order (form factor: default 2; contour: default 1).
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Nickel points on the unit circle.
    Nickel {
        #[command(subcommand)]
        action: NickelAction,
    },
    /// Convex-hull certificates for singular configurations.
    Hull {
        #[command(subcommand)]
        action: HullAction,
    },
    /// χ^(2) along rays s = (1 + ε) e^{iφ}; CSV output.
    Scan {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Comma-separated angles; `pi/4` style multiples are accepted.
        #[arg(long, value_delimiter = ',', value_parser = parse_angle, allow_hyphen_values = true, required = true)]
        phis: Vec<f64>,
        /// Strictly decreasing, comma-separated, in (0, 0.5].
        #[arg(long, value_delimiter = ',', required = true)]
        epsilons: Vec<f64>,
        #[arg(long)]
        m_start: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        rel_tol: Option<f64>,
        /// Also write the second-difference indicator for every (φ, ε) to this CSV.
        #[arg(long)]
        indicator_out: Option<PathBuf>,
    },
    /// Randomized identity battery; exit 3 on any violation.
    Identities {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

#[derive(Debug, Subcommand)]
enum NickelAction {
    /// Enumerate Nickel points of order n (CSV: n, j, k, re_value, angle1, angle2).
    List {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        allow_repeats: bool,
    },
    /// Test whether a unit-circle point is a Nickel point of order n.
    Check {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s0: Complex64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        allow_repeats: bool,
    },
    /// Point counts and largest angular gaps (CSV: n, count, max_gap).
    Density {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum HullAction {
    /// Certificate for the configuration given by x0, y0, s0 in the --config file.
    Check,
    /// Randomized separation check with Nickel witnesses.
    RandomVerify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// sin θ / sin φ along the level set cos θ + cos φ = 2 Re s⁰.
    Ratio {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_angle)]
        s0_re: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

fn build_config(g: &GlobalArgs) -> Result<(RunConfig, KvFile), CliError> {
    let mut cfg = RunConfig::default();
    let mut kv = match &g.config {
        Some(p) => KvFile::load(p)?,
        None => KvFile::default(),
    };
    cfg.apply_file(&mut kv)?;
    if let Some(v) = g.m {
        cfg.grid_m = v;
    }
    if let Some(v) = g.safety {
        cfg.grid_safety = v;
    }
    if g.tol_identity.is_some() {
        cfg.tol_identity = g.tol_identity;
    }
    if let Some(v) = g.tol_hull {
        cfg.tol_hull = v;
    }
    if let Some(v) = g.tol_active {
        cfg.tol_active = v;
    }
    if g.threads.is_some() {
        cfg.threads = g.threads;
    }
    if let Some(v) = g.seed {
        cfg.seed = v;
    }
    if g.out.is_some() {
        cfg.output_path = g.out.clone();
    }
    if g.format.is_some() {
        cfg.output_format = g.format;
    }
    cfg.validate()?;
    Ok((cfg, kv))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (cfg, kv) = build_config(&cli.global)?;
    if !matches!(cli.command, Command::Hull { action: HullAction::Check }) {
        kv.ensure_empty()?;
    }
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Input(format!("cannot configure {t} threads: {e}")))?;
    }
    use commands as c;
    match cli.command {
        Command::Gamma { s, z } => c::gamma(&cfg, s, z),
        Command::Mag { s } => c::mag(&cfg, s),
        Command::Chi { n, s, r, budget, route } => c::chi(&cfg, n, s, r, budget, route),
        Command::Corr {
            method,
            lattice_m,
            lattice_n,
            s,
            nmax,
            budget,
        } => c::corr(&cfg, method, lattice_m, lattice_n, s, nmax, budget),
        Command::Nickel { action } => match action {
            NickelAction::List { n, allow_repeats } => c::nickel_list(&cfg, n, allow_repeats),
            NickelAction::Check { s0, n, tol, allow_repeats } => c::nickel_check(&cfg, s0, n, tol, allow_repeats),
            NickelAction::Density { n } => c::nickel_density(&cfg, &n),
        },
        Command::Hull { action } => match action {
            HullAction::Check => c::hull_check(&cfg, kv),
            HullAction::RandomVerify { n, trials } => c::hull_random_verify(&cfg, n, trials),
            HullAction::Ratio { s0_re, samples } => c::hull_ratio(&cfg, s0_re, samples),
        },
        Command::Scan {
            n,
            phis,
            epsilons,
            m_start,
            budget,
            rel_tol,
            indicator_out,
        } => c::scan(
            &cfg,
            c::ScanArgs {
                n,
                phis,
                epsilons,
                m_start,
                budget,
                rel_tol,
                indicator_out,
            },
        ),
        Command::Identities { trials } => c::identities(&cfg, trials),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit()
        }
    }
}
