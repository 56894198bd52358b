//! Subcommands. Each builds a [`Table`] that `main` writes out.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use lossfish_core::hypothesis::{fidelity_error_bound, qfi_error_approx, threshold_strategy_error, HypothesisSpec};
use lossfish_core::optimize::{
    advantage_ratio, optimize_bandwidth, optimize_two_mode, optimize_xi, two_mode_grid_qfi, Bandwidth, ProbeFamily, ProbeKind,
    TwoModeOptimum, XiBoundary,
};
use lossfish_core::probes::r_min;
use lossfish_core::qfi::{
    qfi_coherent, qfi_fidelity_fd, qfi_if_closed, qfi_single_mode_form, qfi_sld, qfi_squeezed_vacuum, qfi_tmsv, qfi_two_mode_closed,
};
use lossfish_core::{build_single_mode, build_two_mode, ChannelParams, GaussianState, SingleModeProbe, TwoModeProbe};

use crate::error::{CliError, CliResult};
use crate::grid::Axis;
use crate::table::{Cell, Format, Table};

#[derive(Debug, Parser)]
#[command(name = "lossfish", version, about = "QFI of Gaussian probes through a thermal lossy channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// QFI at a single point through any route.
    Qfi(QfiArgs),
    /// Optimal squeezing fraction over an (N_S, η) grid.
    SweepXi(SweepXiArgs),
    /// Two-mode QFI over the (ζ, r) plane.
    SweepTwomode(SweepTwomodeArgs),
    /// Bandwidth-optimized total QFI over a (total N_S, η) grid.
    SweepTotal(SweepTotalArgs),
    /// TMSV over coherent QFI ratio over an (η, N_S) grid.
    Advantage(AdvantageArgs),
    /// Discrimination error bounds between two transmissions.
    Hypothesis(HypothesisArgs),
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Qfi(a) => &a.output,
            Command::SweepXi(a) => &a.output,
            Command::SweepTwomode(a) => &a.output,
            Command::SweepTotal(a) => &a.output,
            Command::Advantage(a) => &a.output,
            Command::Hypothesis(a) => &a.output,
        }
    }

    pub fn run(&self) -> CliResult<Table> {
        match self {
            Command::Qfi(a) => cmd_qfi(a),
            Command::SweepXi(a) => cmd_sweep_xi(a),
            Command::SweepTwomode(a) => cmd_sweep_twomode(a),
            Command::SweepTotal(a) => cmd_sweep_total(a),
            Command::Advantage(a) => cmd_advantage(a),
            Command::Hypothesis(a) => cmd_hypothesis(a),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeName {
    Coherent,
    /// Squeezed vacuum.
    Sq,
    /// Displaced squeezed state, needs --xi.
    Dsq,
    Tmsv,
    /// Canonical two-mode probe, uses --zeta --r --theta --phi.
    Twomode,
}

impl ProbeName {
    fn label(self) -> &'static str {
        match self {
            ProbeName::Coherent => "coherent",
            ProbeName::Sq => "sq",
            ProbeName::Dsq => "dsq",
            ProbeName::Tmsv => "tmsv",
            ProbeName::Twomode => "twomode",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteName {
    Closed,
    Sld,
    /// Single-mode purity form.
    Form,
    /// Finite difference of the fidelity.
    Fidelity,
}

impl RouteName {
    fn label(self) -> &'static str {
        match self {
            RouteName::Closed => "closed",
            RouteName::Sld => "sld",
            RouteName::Form => "form",
            RouteName::Fidelity => "fidelity",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProbeArgs {
    #[arg(long, value_enum)]
    pub probe: ProbeName,
    /// Signal photons per mode.
    #[arg(long)]
    pub ns: f64,
    /// Squeezing fraction of the displaced squeezed probe.
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub zeta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
}

impl ProbeArgs {
    fn xi(&self) -> CliResult<f64> {
        match self.probe {
            ProbeName::Coherent => Ok(0.0),
            ProbeName::Sq => Ok(1.0),
            ProbeName::Dsq => self.xi.ok_or_else(|| CliError::Invalid("--probe dsq needs --xi".into())),
            _ => Ok(0.0),
        }
    }

    fn two_mode(&self) -> CliResult<TwoModeProbe> {
        let (zeta, r) = match self.probe {
            ProbeName::Tmsv => (1.0, 1.0),
            _ => (self.zeta, self.r),
        };
        Ok(TwoModeProbe::new(self.ns, zeta, r, self.theta, self.phi)?)
    }

    pub fn state(&self) -> CliResult<GaussianState> {
        match self.probe {
            ProbeName::Tmsv | ProbeName::Twomode => Ok(build_two_mode(&self.two_mode()?)?),
            _ => Ok(build_single_mode(&SingleModeProbe::new(self.ns, self.xi()?, self.theta)?)?),
        }
    }

    fn closed(&self, p: &ChannelParams) -> CliResult<f64> {
        let ns = self.ns;
        let single_theta = self.theta != 0.0 && matches!(self.probe, ProbeName::Coherent | ProbeName::Dsq);
        if single_theta {
            return Err(CliError::Invalid("closed single-mode forms assume --theta 0; use --route sld".into()));
        }
        Ok(match self.probe {
            ProbeName::Coherent => qfi_coherent(ns, p)?,
            ProbeName::Sq => qfi_squeezed_vacuum(ns, p)?,
            ProbeName::Dsq => {
                let xi = self.xi()?;
                SingleModeProbe::new(ns, xi, 0.0)?;
                qfi_if_closed(ns * (1.0 - xi), ns * xi, p)?.total
            }
            ProbeName::Tmsv => qfi_tmsv(ns, p)?,
            ProbeName::Twomode => qfi_two_mode_closed(&self.two_mode()?, p)?,
        })
    }
}

fn channel(eta: f64, nb: f64, normalized: bool) -> CliResult<ChannelParams> {
    Ok(ChannelParams::new(eta, nb, normalized)?)
}

#[derive(Debug, Clone, Args)]
pub struct QfiArgs {
    #[arg(long)]
    pub eta: f64,
    #[arg(long)]
    pub nb: f64,
    #[arg(long)]
    pub normalized: bool,
    #[command(flatten)]
    pub probe: ProbeArgs,
    #[arg(long, value_enum, default_value_t = RouteName::Closed)]
    pub route: RouteName,
    /// Step of the fidelity route.
    #[arg(long, default_value_t = 1e-4)]
    pub deta: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// One row `eta,nb,probe,ns,route,qfi`.
pub fn cmd_qfi(a: &QfiArgs) -> CliResult<Table> {
    let p = channel(a.eta, a.nb, a.normalized)?;
    let qfi = match a.route {
        RouteName::Closed => a.probe.closed(&p)?,
        RouteName::Sld => qfi_sld(&a.probe.state()?, &p)?,
        RouteName::Form => qfi_single_mode_form(&a.probe.state()?, &p)?,
        RouteName::Fidelity => qfi_fidelity_fd(&a.probe.state()?, &p, a.deta)?,
    };
    let mut t = Table::new(vec!["eta", "nb", "probe", "ns", "route", "qfi"]);
    t.push(vec![a.eta.into(), a.nb.into(), a.probe.probe.label().into(), a.probe.ns.into(), a.route.label().into(), qfi.into()]);
    Ok(t)
}

/// Evaluates `f` on every input in parallel, keeping input order.
fn par_rows<T: Sync, F>(inputs: &[T], f: F) -> CliResult<Vec<Vec<Cell>>>
where
    F: Fn(&T) -> CliResult<Vec<Cell>> + Sync + Send,
{
    inputs.par_iter().map(f).collect()
}

fn boundary_label(b: XiBoundary) -> &'static str {
    match b {
        XiBoundary::Interior => "interior",
        XiBoundary::CoherentEdge => "coherent_edge",
        XiBoundary::SqueezedEdge => "squeezed_edge",
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepXiArgs {
    #[arg(long, default_value = "1e-2:1e3:41:log")]
    pub ns_grid: Axis,
    #[arg(long, default_value = "0.01:0.99:50")]
    pub eta_grid: Axis,
    #[arg(long, default_value_t = 0.0)]
    pub nb: f64,
    #[arg(long)]
    pub normalized: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// `ns,eta,xi_opt,qfi_opt,boundary`, `ns` outer.
pub fn cmd_sweep_xi(a: &SweepXiArgs) -> CliResult<Table> {
    let inputs: Vec<(f64, f64)> =
        a.ns_grid.values().into_iter().flat_map(|n| a.eta_grid.values().into_iter().map(move |e| (n, e))).collect();
    let rows = par_rows(&inputs, |&(ns, eta)| {
        let o = optimize_xi(ns, &channel(eta, a.nb, a.normalized)?)?;
        Ok(vec![ns.into(), eta.into(), o.xi_opt.into(), o.qfi_opt.into(), boundary_label(o.boundary).into()])
    })?;
    let mut t = Table::new(vec!["ns", "eta", "xi_opt", "qfi_opt", "boundary"]);
    t.rows = rows;
    Ok(t)
}

/// Grid size written `NxM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSize(pub usize, pub usize);

impl std::str::FromStr for GridSize {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CliError::Invalid(format!("expected NxM grid, got '{s}'"));
        let (n, m) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        let m: usize = m.trim().parse().map_err(|_| bad())?;
        if n < 2 || m < 2 {
            return Err(CliError::Invalid(format!("grid needs at least 2 points per side, got '{s}'")));
        }
        Ok(GridSize(n, m))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepTwomodeArgs {
    #[arg(long, default_value_t = 1.0)]
    pub ns: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub nb: f64,
    #[arg(long)]
    pub normalized: bool,
    /// `ζ` points x `r` points.
    #[arg(long, default_value = "64x64")]
    pub grid: GridSize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// `zeta,r,qfi,point`: grid rows, then the argmax and the coherent,
/// squeezed-vacuum and TMSV reference points.
pub fn cmd_sweep_twomode(a: &SweepTwomodeArgs) -> CliResult<Table> {
    let p = channel(a.eta, a.nb, a.normalized)?;
    let grid = (a.grid.0, a.grid.1);
    let inputs: Vec<(usize, usize)> = (0..grid.0).flat_map(|i| (0..grid.1).map(move |j| (i, j))).collect();
    let points: Vec<TwoModeOptimum> = inputs.par_iter().map(|&(i, j)| two_mode_grid_qfi(a.ns, &p, i, j, grid)).collect::<Result<_, _>>()?;
    let best = optimize_two_mode(a.ns, &p, grid)?;

    let mut t = Table::new(vec!["zeta", "r", "qfi", "point"]);
    let row = |o: &TwoModeOptimum, kind: &str| vec![o.zeta.into(), o.r.into(), o.qfi.into(), kind.into()];
    for o in &points {
        t.push(row(o, "grid"));
    }
    t.push(row(&best, "argmax"));
    let reference = |zeta: f64, r: f64| -> CliResult<TwoModeOptimum> {
        let qfi = qfi_two_mode_closed(&TwoModeProbe::new(a.ns, zeta, r, 0.0, 0.0)?, &p)?;
        Ok(TwoModeOptimum { zeta, r, qfi })
    };
    t.push(row(&reference(0.0, 1.0)?, "coherent"));
    t.push(row(&reference(1.0, r_min(a.ns, 1.0))?, "squeezed_vacuum"));
    t.push(row(&reference(1.0, 1.0)?, "tmsv"));
    Ok(t)
}

#[derive(Debug, Clone, Args)]
pub struct SweepTotalArgs {
    #[arg(long, default_value = "1e-2:1e2:41:log")]
    pub total_ns_grid: Axis,
    #[arg(long, default_value = "0.01:0.99:50")]
    pub eta_grid: Axis,
    #[arg(long, default_value_t = 0.0)]
    pub nb: f64,
    #[arg(long)]
    pub normalized: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn m_label(m: Bandwidth) -> Cell {
    match m {
        Bandwidth::Finite(m) => Cell::Int(m),
        Bandwidth::Infinite => Cell::Text("inf".into()),
    }
}

/// `total_ns,eta,m_opt,xi_opt,total_qfi,ratio_vs_coherent,ratio_vs_tmsv`.
pub fn cmd_sweep_total(a: &SweepTotalArgs) -> CliResult<Table> {
    if a.nb > 0.0 && !a.normalized {
        return Err(CliError::Invalid("total QFI diverges for N_B > 0 without --normalized".into()));
    }
    let inputs: Vec<(f64, f64)> =
        a.total_ns_grid.values().into_iter().flat_map(|n| a.eta_grid.values().into_iter().map(move |e| (n, e))).collect();
    let rows = par_rows(&inputs, |&(total, eta)| {
        let p = channel(eta, a.nb, a.normalized)?;
        let plan = optimize_bandwidth(total, &p, ProbeFamily::IdlerFree)?;
        let coh = optimize_bandwidth(total, &p, ProbeFamily::Coherent)?;
        let tm = optimize_bandwidth(total, &p, ProbeFamily::Tmsv)?;
        let v = plan.total_qfi.value();
        Ok(vec![
            total.into(),
            eta.into(),
            m_label(plan.m),
            plan.xi.into(),
            v.into(),
            (v / coh.total_qfi.value()).into(),
            (v / tm.total_qfi.value()).into(),
        ])
    })?;
    let mut t = Table::new(vec!["total_ns", "eta", "m_opt", "xi_opt", "total_qfi", "ratio_vs_coherent", "ratio_vs_tmsv"]);
    t.rows = rows;
    Ok(t)
}

#[derive(Debug, Clone, Args)]
pub struct AdvantageArgs {
    #[arg(long, default_value = "1e-4:0.99:41:log")]
    pub eta_grid: Axis,
    #[arg(long, default_value = "1e-3:10:41:log")]
    pub ns_grid: Axis,
    #[arg(long, default_value_t = 1000.0)]
    pub nb: f64,
    #[arg(long)]
    pub normalized: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// `eta,ns,ratio_tmsv_coh`, `eta` outer.
pub fn cmd_advantage(a: &AdvantageArgs) -> CliResult<Table> {
    let inputs: Vec<(f64, f64)> =
        a.eta_grid.values().into_iter().flat_map(|e| a.ns_grid.values().into_iter().map(move |n| (e, n))).collect();
    let rows = par_rows(&inputs, |&(eta, ns)| {
        let ratio = advantage_ratio(ProbeKind::Tmsv, ProbeKind::Coherent, &channel(eta, a.nb, a.normalized)?, ns)?;
        Ok(vec![eta.into(), ns.into(), ratio.into()])
    })?;
    let mut t = Table::new(vec!["eta", "ns", "ratio_tmsv_coh"]);
    t.rows = rows;
    Ok(t)
}

#[derive(Debug, Clone, Args)]
pub struct HypothesisArgs {
    #[arg(long)]
    pub eta_plus: f64,
    #[arg(long)]
    pub eta_minus: f64,
    /// Copy counts, comma separated; one row each.
    #[arg(long, value_delimiter = ',', required = true)]
    pub m: Vec<u64>,
    #[arg(long, default_value_t = 0.0)]
    pub nb: f64,
    #[arg(long)]
    pub normalized: bool,
    #[command(flatten)]
    pub probe: ProbeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// `eta_plus,eta_minus,m,fid_bound,qfi_approx,threshold_approx`. The QFI in
/// the approximations is taken at the midpoint transmission.
pub fn cmd_hypothesis(a: &HypothesisArgs) -> CliResult<Table> {
    let state = a.probe.state()?;
    let base = channel(a.eta_plus, a.nb, a.normalized)?;
    let mut t = Table::new(vec!["eta_plus", "eta_minus", "m", "fid_bound", "qfi_approx", "threshold_approx"]);
    for &m in &a.m {
        let spec = HypothesisSpec::new(a.eta_plus, a.eta_minus, m, state, base)?;
        let i_eta = qfi_sld(&state, &base.with_eta(spec.eta_mid()))?;
        let deta = spec.deta();
        t.push(vec![
            a.eta_plus.into(),
            a.eta_minus.into(),
            m.into(),
            fidelity_error_bound(&spec)?.into(),
            qfi_error_approx(deta, m, i_eta).into(),
            threshold_strategy_error(deta, m, i_eta).into(),
        ]);
    }
    Ok(t)
}
