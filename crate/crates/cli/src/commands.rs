//! Dataset builders behind each subcommand.

use serde::Serialize;
use wqed::coeffs::{spectral_constants, three_photon_coeffs, two_photon_coeffs, SpectralConstants};
use wqed::coherent_stats::{default_tau_grid, g2, g2_zero_map, number_statistics, MAX_PHOTONS};
use wqed::numerics::{sweep, QmcSpec, QuadratureSpec};
use wqed::single_photon::{tbar, transmission_reflection};
use wqed::three_photon::{three_photon_probabilities, ThreeChannel, CHANNELS};
use wqed::two_photon::{joint_spectra, spectrum_grid, two_photon_probabilities};
use wqed::SystemParams;

use crate::config::{Numerics, Range, RunConfig, Sweep};
use crate::error::CliError;
use crate::output::{Cell, Manifest, Table};

/// Inputs shared by every builder.
#[derive(Debug, Clone)]
pub struct Context {
    pub run: RunConfig,
    pub numerics: Numerics,
    pub sweep: Option<Sweep>,
    pub full: bool,
}

impl Context {
    pub fn quad(&self) -> Result<QuadratureSpec, CliError> {
        self.numerics.quadrature()
    }

    pub fn qmc(&self) -> Result<QmcSpec, CliError> {
        self.numerics.qmc()
    }

    /// Sweep points, or the base configuration alone as a one-point sweep
    /// over the packet detuning.
    fn points(&self) -> (String, Vec<(f64, RunConfig)>) {
        match &self.sweep {
            Some(s) => (s.var.clone(), s.points(&self.run)),
            None => ("delta_omega".into(), vec![(self.run.delta_omega, self.run)]),
        }
    }

    /// Checks every sweep point so bad input fails before any work.
    pub fn validate(&self) -> Result<(), CliError> {
        let (var, points) = self.points();
        for (v, cfg) in points {
            cfg.system()
                .map_err(|e| CliError::Param(format!("{var} = {v}: {}", e.message())))?;
        }
        Ok(())
    }

    fn reject_sweep(&self, command: &str) -> Result<(), CliError> {
        match self.sweep {
            Some(_) => Err(CliError::Param(format!("{command} does not take --sweep"))),
            None => Ok(()),
        }
    }
}

/// Runs `task` over the sweep. Failed points become rows of `NaN`; the
/// worst failure is returned alongside the table so the caller can still
/// write it.
fn sweep_table<R, F>(
    ctx: &Context,
    name: &str,
    columns: &[&str],
    manifest: &mut Manifest,
    task: F,
) -> (Table, Option<CliError>)
where
    R: Send,
    F: Fn(&RunConfig) -> Result<R, CliError> + Sync,
    R: RowSource,
{
    let (var, points) = ctx.points();
    let mut cols = vec![var.as_str()];
    cols.extend_from_slice(columns);
    let mut table = Table::new(name, &cols);
    let results = sweep(&points, |(_, cfg)| task(cfg));
    let mut failure: Option<CliError> = None;
    for ((x, _), res) in points.iter().zip(results) {
        let mut row: Vec<Cell> = vec![(*x).into()];
        match res {
            Ok(r) => {
                for (k, v) in r.errors() {
                    manifest.note_error(k, v);
                }
                row.extend(r.cells());
            }
            Err(e) => {
                eprintln!("warning: {var} = {x}: {e}");
                row.extend((0..columns.len()).map(|_| Cell::Num(f64::NAN)));
                failure = Some(match failure {
                    Some(f) => f.worse(e),
                    None => e,
                });
            }
        }
        table.push(row);
    }
    (table, failure)
}

/// A per-point result that knows its CSV cells and error estimates.
pub trait RowSource {
    fn cells(&self) -> Vec<Cell>;
    fn errors(&self) -> Vec<(&'static str, f64)>;
}

struct SingleRow(wqed::single_photon::SingleTransport);

impl RowSource for SingleRow {
    fn cells(&self) -> Vec<Cell> {
        let s = &self.0;
        vec![
            s.transmission.into(),
            s.reflection.into(),
            s.loss.into(),
            s.quad_err.into(),
        ]
    }
    fn errors(&self) -> Vec<(&'static str, f64)> {
        vec![("quad_err", self.0.quad_err)]
    }
}

pub const SINGLE_COLUMNS: [&str; 4] = ["T", "R", "loss", "quad_err"];

pub fn single(ctx: &Context, manifest: &mut Manifest) -> Result<(Table, Option<CliError>), CliError> {
    let quad = ctx.quad()?;
    Ok(sweep_table(ctx, "single", &SINGLE_COLUMNS, manifest, |cfg| {
        let (p, wp) = cfg.system()?;
        Ok(SingleRow(transmission_reflection(&p, &wp, &quad)?))
    }))
}

struct TwoRow(wqed::two_photon::TwoPhotonReport);

impl RowSource for TwoRow {
    fn cells(&self) -> Vec<Cell> {
        let r = &self.0;
        let mut v: Vec<Cell> = Vec::new();
        for c in [r.rr, r.rl, r.ll] {
            v.extend([c.total.into(), c.plane_wave.into(), c.bound_state.into()]);
        }
        v.extend([
            r.loss2.into(),
            r.transmission.into(),
            r.reflection.into(),
            r.p21.into(),
            r.quad_err.into(),
        ]);
        v
    }
    fn errors(&self) -> Vec<(&'static str, f64)> {
        vec![("quad_err", self.0.quad_err)]
    }
}

pub const TWO_PHOTON_COLUMNS: [&str; 14] = [
    "P_RR", "P_RR_pw", "P_RR_bs", "P_RL", "P_RL_pw", "P_RL_bs", "P_LL", "P_LL_pw", "P_LL_bs", "loss2", "T",
    "R", "P21", "quad_err",
];

pub fn two_photon(ctx: &Context, manifest: &mut Manifest) -> Result<(Table, Option<CliError>), CliError> {
    let quad = ctx.quad()?;
    Ok(sweep_table(
        ctx,
        "two_photon",
        &TWO_PHOTON_COLUMNS,
        manifest,
        |cfg| {
            let (p, wp) = cfg.system()?;
            Ok(TwoRow(two_photon_probabilities(&p, &wp, &quad)?))
        },
    ))
}

struct ThreeRow {
    report: wqed::three_photon::ThreePhotonReport,
    full: bool,
}

fn channel_cells(c: &ThreeChannel, with_err: bool) -> Vec<Cell> {
    let mut v: Vec<Cell> = vec![c.total.into(), c.plane_wave.into(), c.bound_state.into()];
    if with_err {
        v.push(c.stderr.into());
    }
    v
}

impl RowSource for ThreeRow {
    fn cells(&self) -> Vec<Cell> {
        let r = &self.report;
        let mut v = channel_cells(&r.rrr, false);
        if self.full {
            for c in [r.rrl, r.rll, r.lll] {
                v.extend(channel_cells(&c, true));
            }
        }
        v.extend([r.transmission.into(), r.p31.into(), r.mc_err.into()]);
        v
    }
    fn errors(&self) -> Vec<(&'static str, f64)> {
        let worst = self
            .report
            .channels()
            .iter()
            .map(|c| c.stderr)
            .fold(0.0, f64::max);
        vec![("mc_err", self.report.mc_err), ("mc_err_all_channels", worst)]
    }
}

pub fn three_photon_columns(full: bool) -> Vec<String> {
    let mut cols: Vec<String> = ["P_RRR", "P_RRR_pw", "P_RRR_bs"].map(String::from).to_vec();
    if full {
        for ch in &CHANNELS[1..] {
            for suffix in ["", "_pw", "_bs", "_err"] {
                cols.push(format!("P_{ch}{suffix}"));
            }
        }
    }
    cols.extend(["T", "P31", "mc_err"].map(String::from));
    cols
}

pub fn three_photon(ctx: &Context, manifest: &mut Manifest) -> Result<(Table, Option<CliError>), CliError> {
    let quad = ctx.quad()?;
    let qmc = ctx.qmc()?;
    let cols = three_photon_columns(ctx.full);
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    Ok(sweep_table(ctx, "three_photon", &refs, manifest, |cfg| {
        let (p, wp) = cfg.system()?;
        Ok(ThreeRow {
            report: three_photon_probabilities(&p, &wp, &quad, &qmc)?,
            full: ctx.full,
        })
    }))
}

pub const JOINT_SPECTRUM_COLUMNS: [&str; 8] =
    ["omega1", "omega2", "F_RR", "F_RL", "F_LL", "G_RR", "G_RL", "G_LL"];

pub fn joint_spectrum_table(
    name: &str,
    cfg: &RunConfig,
    quad: &QuadratureSpec,
    grid: usize,
    half_width: f64,
) -> Result<Table, CliError> {
    if grid == 0 || !(half_width > 0.0) {
        return Err(CliError::Param(
            "joint-spectrum grid needs at least one point and a positive width".into(),
        ));
    }
    let (p, wp) = cfg.system()?;
    let omega = spectrum_grid(&wp, half_width, grid);
    let s = joint_spectra(&p, &wp, &omega, quad)?;
    let mut table = Table::new(name, &JOINT_SPECTRUM_COLUMNS);
    let n = omega.len();
    for i in 0..n {
        for j in 0..n {
            let k = i * n + j;
            table.push(vec![
                omega[i].into(),
                omega[j].into(),
                s.f_rr[k].into(),
                s.f_rl[k].into(),
                s.f_ll[k].into(),
                s.g_rr[k].into(),
                s.g_rl[k].into(),
                s.g_ll[k].into(),
            ]);
        }
    }
    Ok(table)
}

pub fn joint_spectrum(ctx: &Context, grid: usize, half_width: f64) -> Result<Table, CliError> {
    ctx.reject_sweep("joint-spectrum")?;
    joint_spectrum_table("joint_spectrum", &ctx.run, &ctx.quad()?, grid, half_width)
}

pub const STATS_COLUMNS: [&str; 4] = ["n", "p_n", "ratio_n", "loss_mass"];

pub fn stats_wide_columns() -> Vec<String> {
    let mut cols: Vec<String> = (0..=MAX_PHOTONS).map(|n| format!("p_{n}")).collect();
    cols.extend((0..=MAX_PHOTONS).map(|n| format!("ratio_{n}")));
    cols.extend(["loss_mass", "nbar_out", "mc_err"].map(String::from));
    cols
}

struct StatsRow(wqed::coherent_stats::NumberStats);

impl RowSource for StatsRow {
    fn cells(&self) -> Vec<Cell> {
        let s = &self.0;
        let mut v: Vec<Cell> = s.p.iter().map(|&x| x.into()).collect();
        v.extend(s.ratio.iter().map(|&x| Cell::from(x)));
        v.extend([s.loss_mass.into(), s.nbar_out.into(), s.mc_err.into()]);
        v
    }
    fn errors(&self) -> Vec<(&'static str, f64)> {
        vec![("mc_err", self.0.mc_err)]
    }
}

pub fn stats(
    ctx: &Context,
    nbar: f64,
    manifest: &mut Manifest,
) -> Result<(Table, Option<CliError>), CliError> {
    let quad = ctx.quad()?;
    let qmc = ctx.qmc()?;
    let compute = |cfg: &RunConfig| -> Result<StatsRow, CliError> {
        let (p, wp) = cfg.system()?;
        let s = number_statistics(&p, &wp, nbar, &quad, &qmc)?;
        if s.truncation_warning() {
            eprintln!(
                "warning: input weight above three photons is {:.3}; results are truncated",
                s.truncated_weight
            );
        }
        Ok(StatsRow(s))
    };
    if ctx.sweep.is_some() {
        let cols = stats_wide_columns();
        let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
        return Ok(sweep_table(ctx, "stats", &refs, manifest, compute));
    }
    let s = compute(&ctx.run)?.0;
    manifest.note_error("mc_err", s.mc_err);
    let mut table = Table::new("stats", &STATS_COLUMNS);
    for n in 0..=MAX_PHOTONS {
        table.push(vec![
            (n as f64).into(),
            s.p[n].into(),
            s.ratio[n].into(),
            s.loss_mass.into(),
        ]);
    }
    Ok((table, None))
}

pub const G2_COLUMNS: [&str; 2] = ["tau", "g2"];

pub fn g2_table(name: &str, cfg: &RunConfig, quad: &QuadratureSpec, tau: &[f64]) -> Result<Table, CliError> {
    let (p, wp) = cfg.system()?;
    let curve = g2(&p, &wp, tau, quad)?;
    let mut table = Table::new(name, &G2_COLUMNS);
    for (t, g) in curve.tau.iter().zip(curve.g2) {
        table.push(vec![(*t).into(), g.into()]);
    }
    Ok(table)
}

pub fn g2_command(ctx: &Context, tau: Option<&str>) -> Result<Table, CliError> {
    ctx.reject_sweep("g2")?;
    let grid = match tau {
        Some(t) => Range::parse(t)?.values(),
        None => default_tau_grid(),
    };
    if grid.iter().any(|t| *t < 0.0) {
        return Err(CliError::Param("delays must be non-negative".into()));
    }
    g2_table("g2", &ctx.run, &ctx.quad()?, &grid)
}

pub const G2MAP_COLUMNS: [&str; 4] = ["purcell", "omega_rabi", "g2_zero", "log10_g2"];

pub fn g2map_table(
    name: &str,
    cfg: &RunConfig,
    quad: &QuadratureSpec,
    omega: &[f64],
    purcell: &[f64],
) -> Result<(Table, usize), CliError> {
    if omega.iter().chain(purcell).any(|x| *x < 0.0) {
        return Err(CliError::Param(
            "omega_rabi and purcell must be non-negative".into(),
        ));
    }
    let (p, wp) = cfg.system()?;
    let map = g2_zero_map(&p, &wp, omega, purcell, quad);
    let mut table = Table::new(name, &G2MAP_COLUMNS);
    let mut missing = 0;
    for (i, pf) in purcell.iter().enumerate() {
        for (j, om) in omega.iter().enumerate() {
            let v = map.at(i, j);
            missing += usize::from(v.is_none());
            table.push(vec![
                (*pf).into(),
                (*om).into(),
                v.map(|l| 10f64.powf(l)).into(),
                v.into(),
            ]);
        }
    }
    Ok((table, missing))
}

pub fn g2map(ctx: &Context, omega: &str, purcell: &str) -> Result<Table, CliError> {
    ctx.reject_sweep("g2map")?;
    let (table, missing) = g2map_table(
        "g2map",
        &ctx.run,
        &ctx.quad()?,
        &Range::parse(omega)?.values(),
        &Range::parse(purcell)?.values(),
    )?;
    if missing > 0 {
        eprintln!("warning: {missing} map cells have no value");
    }
    Ok(table)
}

#[derive(Debug, Serialize)]
pub struct CoeffSnapshot {
    pub config: RunConfig,
    pub params: SystemParams,
    pub constants: SpectralConstants,
    pub k: Vec<f64>,
    pub tbar: Vec<num_complex::Complex64>,
    pub c1: num_complex::Complex64,
    pub c2: num_complex::Complex64,
    /// `D_1..D_4(k1, k2, k3)` when `k3` is given.
    pub d: Option<[num_complex::Complex64; 4]>,
}

pub fn coeffs(ctx: &Context, k1: f64, k2: f64, k3: Option<f64>) -> Result<CoeffSnapshot, CliError> {
    ctx.reject_sweep("coeffs")?;
    let (p, _) = ctx.run.system()?;
    let consts = spectral_constants(&p);
    let c = two_photon_coeffs(&p, &consts, k1, k2)?;
    let mut k = vec![k1, k2];
    let d = match k3 {
        Some(k3) => {
            k.push(k3);
            let d = three_photon_coeffs(&p, &consts, k1, k2, k3)?;
            Some([d.d1, d.d2, d.d3, d.d4])
        }
        None => None,
    };
    Ok(CoeffSnapshot {
        config: ctx.run,
        params: p,
        constants: consts,
        tbar: k.iter().map(|&x| tbar(&p, x)).collect(),
        k,
        c1: c.c1,
        c2: c.c2,
        d,
    })
}
