//! `wqed`: few-photon transport, spectra and correlations of a driven
//! emitter in a waveguide, written as CSV (or JSON for `coeffs`).
//!
//! Exit codes: 0 success, 2 invalid parameters or usage, 3 numerical
//! failure, 1 output could not be written.

mod commands;
mod config;
mod error;
mod figures;
mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use commands::Context;
use config::{Settings, Sweep};
use error::CliError;
use figures::Figure;
use output::{Manifest, Table};

#[derive(Debug, Parser)]
#[command(
    name = "wqed",
    version,
    about = "Few-photon scattering off a driven emitter in a waveguide"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Quasi-Monte-Carlo points for three-photon integrals.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 picks the number of cores).
    #[arg(long, global = true, env = "WQED_WORKERS")]
    workers: Option<usize>,
    /// Flat key = value parameter file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (a directory for reproduce-figure); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sweep one parameter: var=lo:hi:n.
    #[arg(long, global = true, allow_hyphen_values = true)]
    sweep: Option<String>,
    /// Emit every three-photon channel, not just RRR.
    #[arg(long, global = true)]
    full: bool,
    /// Emitter: lambda or n.
    #[arg(long, global = true)]
    kind: Option<String>,
    /// Purcell factor; a lo:hi:n range for g2map.
    #[arg(long, global = true, allow_hyphen_values = true)]
    purcell: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega_rabi: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    sigma: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta_omega: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma3: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma4: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta_ctrl: Option<f64>,
    /// Mismatch of the |3>-|4> and |1>-|2> transition frequencies.
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta43: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single-photon T, R and loss.
    Single,
    /// Two-photon channel probabilities and P21.
    TwoPhoton,
    /// Three-photon channel probabilities and P31.
    ThreePhoton,
    /// Joint and uncorrelated two-photon spectra on a square grid.
    JointSpectrum {
        #[arg(long, default_value_t = 201)]
        grid: usize,
        /// Grid half-width in units of sigma.
        #[arg(long, default_value_t = 5.0)]
        half_width: f64,
    },
    /// Transmitted photon-number statistics of a coherent packet.
    Stats {
        #[arg(long, default_value_t = 1.0)]
        nbar: f64,
    },
    /// Second-order correlation against delay.
    G2 {
        /// Delays lo:hi:n; a default grid with extra points near zero otherwise.
        #[arg(long)]
        tau: Option<String>,
    },
    /// log10 g2(0) over a Purcell factor by Rabi frequency grid.
    /// The Purcell range comes from the global --purcell (default 0.1:20:30).
    G2map {
        #[arg(long, default_value = "0.1:3:30")]
        omega: String,
    },
    /// Binding constants and bound-state coefficients as JSON.
    Coeffs {
        #[arg(long, allow_hyphen_values = true)]
        k1: f64,
        #[arg(long, allow_hyphen_values = true)]
        k2: f64,
        #[arg(long, allow_hyphen_values = true)]
        k3: Option<f64>,
    },
    /// Datasets of one figure (fig2..fig7) written into the --out directory.
    ReproduceFigure { figure: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Single => "single",
            Command::TwoPhoton => "two-photon",
            Command::ThreePhoton => "three-photon",
            Command::JointSpectrum { .. } => "joint-spectrum",
            Command::Stats { .. } => "stats",
            Command::G2 { .. } => "g2",
            Command::G2map { .. } => "g2map",
            Command::Coeffs { .. } => "coeffs",
            Command::ReproduceFigure { .. } => "reproduce-figure",
        }
    }
}

const G2MAP_PURCELL: &str = "0.1:20:30";

/// Defaults, then the config file, then flags. A previous output given as
/// the config also supplies its sweep.
fn settings(g: &Global, command: &Command) -> Result<(Settings, Option<String>), CliError> {
    let mut s = Settings::default();
    let mut sweep = None;
    if let Some(path) = &g.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Param(format!("cannot read config {}: {e}", path.display())))?;
        if text.starts_with("# wqed ") {
            // a previous output: rerun with its recorded settings
            let m = Manifest::read(text.as_bytes())?;
            s.run = m.config;
            s.numerics = m.numerics;
            sweep = m.sweep;
        } else {
            s.apply_text(&text)?;
        }
    }
    if let Some(k) = &g.kind {
        s.set("kind", k)?;
    }
    for (key, value) in [
        ("omega_rabi", g.omega_rabi),
        ("sigma", g.sigma),
        ("delta_omega", g.delta_omega),
        ("gamma3", g.gamma3),
        ("gamma4", g.gamma4),
        ("delta_ctrl", g.delta_ctrl),
        ("delta43", g.delta43),
        ("abs_tol", g.abs_tol),
        ("rel_tol", g.rel_tol),
    ] {
        if let Some(v) = value {
            s.set(key, &v.to_string())?;
        }
    }
    if let (Some(p), false) = (&g.purcell, matches!(command, Command::G2map { .. })) {
        s.set("purcell", p)?;
    }
    if let Some(b) = g.budget {
        s.numerics.budget = b;
    }
    if let Some(seed) = g.seed {
        s.numerics.seed = seed;
    }
    if let Some(w) = g.workers {
        s.numerics.workers = w;
    }
    Ok((s, g.sweep.clone().or(sweep)))
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(cli: Cli, args: Vec<String>) -> Result<(), CliError> {
    let start = Instant::now();
    let (s, sweep_arg) = settings(&cli.global, &cli.command)?;
    let sweep = sweep_arg.as_deref().map(Sweep::parse).transpose()?;
    let ctx = Context {
        run: s.run,
        numerics: s.numerics,
        sweep,
        full: cli.global.full,
    };
    // surface invalid tolerances or budgets before any work
    ctx.quad()?;
    ctx.qmc()?;
    if !matches!(cli.command, Command::ReproduceFigure { .. }) {
        ctx.validate()?;
    }
    let mut manifest = Manifest::new(cli.command.name(), args, s.run, s.numerics);
    manifest.sweep = sweep_arg;
    let out = cli.global.out.as_deref();

    let workers = s.numerics.workers;
    let command = cli.command;
    let (tables, failure) = wqed::numerics::with_workers(workers, || -> Result<_, CliError> {
        Ok(match &command {
            Command::Single => one(commands::single(&ctx, &mut manifest)?),
            Command::TwoPhoton => one(commands::two_photon(&ctx, &mut manifest)?),
            Command::ThreePhoton => one(commands::three_photon(&ctx, &mut manifest)?),
            Command::JointSpectrum { grid, half_width } => {
                (vec![commands::joint_spectrum(&ctx, *grid, *half_width)?], None)
            }
            Command::Stats { nbar } => one(commands::stats(&ctx, *nbar, &mut manifest)?),
            Command::G2 { tau } => (vec![commands::g2_command(&ctx, tau.as_deref())?], None),
            Command::G2map { omega } => {
                let purcell = cli.global.purcell.as_deref().unwrap_or(G2MAP_PURCELL);
                (vec![commands::g2map(&ctx, omega, purcell)?], None)
            }
            Command::Coeffs { k1, k2, k3 } => {
                let snap = commands::coeffs(&ctx, *k1, *k2, *k3)?;
                let mut w = sink(out)?;
                serde_json::to_writer_pretty(&mut w, &snap)?;
                writeln!(w)?;
                w.flush()?;
                return Ok((Vec::new(), None));
            }
            Command::ReproduceFigure { figure } => {
                let fig: Figure = figure.parse()?;
                if ctx.sweep.is_some() {
                    return Err(CliError::Param("reproduce-figure does not take --sweep".into()));
                }
                figures::reproduce(fig, &ctx, &mut manifest)?
            }
        })
    })?;
    manifest.wall_time_s = start.elapsed().as_secs_f64();

    if let Command::ReproduceFigure { .. } = command {
        let dir = out.unwrap_or(Path::new("figures"));
        std::fs::create_dir_all(dir)?;
        for t in &tables {
            let path = dir.join(format!("{}.csv", t.name));
            t.write(&manifest, std::io::BufWriter::new(std::fs::File::create(&path)?))?;
            eprintln!("wrote {}", path.display());
        }
    } else {
        for t in &tables {
            let mut w = sink(out)?;
            t.write(&manifest, &mut w)?;
        }
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn one((t, f): (Table, Option<CliError>)) -> (Vec<Table>, Option<CliError>) {
    (vec![t], f)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
