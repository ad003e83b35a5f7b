use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "spinchain", version, about = "Scans of the alternating spin chain with CSV output")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Critical fields h1, h2, h3 and h13 against J3.
    #[command(args_override_self = true)]
    PhaseDiagram(PhaseDiagram),
    /// Branch energies on the momentum grid.
    #[command(args_override_self = true)]
    Dispersion(Dispersion),
    /// Information metric along a line of constant J3.
    #[command(args_override_self = true)]
    Metric(MetricArgs),
    /// Ricci scalar along a line of constant J3.
    #[command(args_override_self = true)]
    Ricci(RicciArgs),
    /// Unit-speed geodesic of the information metric.
    #[command(args_override_self = true)]
    Geodesic(GeodesicArgs),
    /// Fubini-Study complexity along a geodesic.
    #[command(args_override_self = true)]
    Fsc(FscArgs),
    /// Static Nielsen complexity against the target field.
    #[command(args_override_self = true)]
    NcStatic(NcStatic),
    /// Nielsen complexity and Loschmidt echo after one field quench.
    #[command(args_override_self = true)]
    Quench(QuenchArgs),
    /// Complexity under repeated quench cycles.
    #[command(args_override_self = true)]
    MultiQuench(MultiQuench),
    /// Half-chain entanglement entropy from the correlation matrix.
    #[command(args_override_self = true)]
    EeCorr(EeCorr),
    /// Half-chain entanglement entropy and energy from DMRG.
    #[command(args_override_self = true)]
    EeDmrg(EeDmrg),
    /// Complexity and echo of the transverse XY chain after a quench.
    #[command(args_override_self = true)]
    XyQuench(XyQuench),
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write the CSV to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// File of `key = value` lines read before the command-line flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct HAxis {
    #[arg(long = "h-min", allow_negative_numbers = true)]
    pub h_min: f64,
    #[arg(long = "h-max", allow_negative_numbers = true)]
    pub h_max: f64,
    #[arg(long)]
    pub step: f64,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct J3Axis {
    #[arg(long = "J3-min", default_value_t = 0.0, allow_negative_numbers = true)]
    pub j3_min: f64,
    #[arg(long = "J3-max", default_value_t = 3.0)]
    pub j3_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Total,
    PerCell,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// Sum over the grid modes, active set of each point.
    Modes,
    /// Integral over the active momentum intervals.
    Continuum,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modes {
    Full,
    TargetActive,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Reduced couplings `(h, J, J3)`.
    Reduced,
    /// Field `H` with exchanges `J1`, `J2` and three-spin `J3`.
    ThreeSpin,
}

#[derive(Args, Debug)]
pub struct PhaseDiagram {
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[command(flatten)]
    pub axis: J3Axis,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct Dispersion {
    #[arg(long, allow_negative_numbers = true)]
    pub h: f64,
    #[arg(long = "J3")]
    pub j3: f64,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[arg(long = "N", default_value_t = 101)]
    pub n: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct MetricArgs {
    #[arg(long = "J3")]
    pub j3: f64,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[command(flatten)]
    pub axis: HAxis,
    #[arg(long = "N", default_value_t = 101)]
    pub n: usize,
    /// Per-cell metric of the infinite chain; `N` is ignored.
    #[arg(long)]
    pub thermo: bool,
    #[arg(long, value_enum, default_value_t = Normalization::Total)]
    pub normalization: Normalization,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct RicciArgs {
    #[arg(long = "J3")]
    pub j3: f64,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[command(flatten)]
    pub axis: HAxis,
    #[arg(long = "N", default_value_t = 1001)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = MetricKind::Modes)]
    pub metric: MetricKind,
    #[arg(long, value_enum, default_value_t = Normalization::Total)]
    pub normalization: Normalization,
    /// Finite-difference step of the curvature stencil.
    #[arg(long = "fd-step", default_value_t = 1e-4)]
    pub fd_step: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct GeodesicArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub h0: f64,
    /// Initial J3.
    #[arg(long = "J3")]
    pub j3: f64,
    /// Initial dJ3/dtau; dh/dtau follows from unit speed.
    #[arg(long = "dJ3", default_value_t = 0.0, allow_negative_numbers = true)]
    pub dj3: f64,
    /// Hold J3 fixed and integrate along h only.
    #[arg(long = "fixed-J3")]
    pub fixed_j3: bool,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[arg(long = "N", default_value_t = 51)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Normalization::PerCell)]
    pub normalization: Normalization,
    #[arg(long, default_value_t = 1e-3)]
    pub dtau: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct FscArgs {
    #[command(flatten)]
    pub geodesic: GeodesicArgs,
    /// Spacing of the target fields.
    #[arg(long = "h-step", default_value_t = 0.01)]
    pub h_step: f64,
}

#[derive(Args, Debug)]
pub struct NcStatic {
    #[arg(long = "h-ref", allow_negative_numbers = true)]
    pub h_ref: f64,
    #[arg(long = "J3-ref")]
    pub j3_ref: f64,
    /// Target J3.
    #[arg(long = "J3")]
    pub j3: f64,
    #[command(flatten)]
    pub axis: HAxis,
    #[arg(long = "N", default_value_t = 101)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Modes::Full)]
    pub modes: Modes,
    /// Half-width of the central difference for the slope.
    #[arg(long, default_value_t = 1e-7)]
    pub dh: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct QuenchArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub h: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long = "J3")]
    pub j3: f64,
    #[arg(long = "N", default_value_t = 101)]
    pub n: usize,
    #[arg(long = "t-max")]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct MultiQuench {
    #[arg(long, allow_negative_numbers = true)]
    pub h0: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long = "J3")]
    pub j3: f64,
    #[arg(long = "N", default_value_t = 501)]
    pub n: usize,
    /// Duration of each quenched and each relaxed segment.
    #[arg(long, default_value_t = 15.0)]
    pub period: f64,
    #[arg(long, default_value_t = 2)]
    pub cycles: usize,
    #[arg(long = "t-max", default_value_t = 100.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
    #[command(flatten)]
    pub common: Common,
}

/// Couplings of an entanglement scan; which ones are needed depends on the
/// model.
#[derive(Args, Debug, Clone, Copy)]
pub struct Couplings {
    #[arg(long, value_enum, default_value_t = Model::Reduced)]
    pub model: Model,
    /// Reduced field.
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    #[arg(long = "J")]
    pub j: Option<f64>,
    /// Three-spin model field.
    #[arg(long = "H", allow_negative_numbers = true)]
    pub field: Option<f64>,
    #[arg(long = "J1", allow_negative_numbers = true)]
    pub j1: Option<f64>,
    #[arg(long = "J2", allow_negative_numbers = true)]
    pub j2: Option<f64>,
}

#[derive(Args, Debug)]
pub struct EeCorr {
    #[command(flatten)]
    pub couplings: Couplings,
    #[command(flatten)]
    pub axis: J3Axis,
    #[arg(long, default_value_t = 51)]
    pub cells: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct EeDmrg {
    #[command(flatten)]
    pub couplings: Couplings,
    #[command(flatten)]
    pub axis: J3Axis,
    #[arg(long, default_value_t = 51)]
    pub cells: usize,
    #[arg(long, default_value_t = 300)]
    pub chi: usize,
    /// Discarded weight allowed per truncation.
    #[arg(long, default_value_t = 1e-10)]
    pub cutoff: f64,
    #[arg(long = "max-sweeps", default_value_t = 20)]
    pub max_sweeps: usize,
    #[arg(long = "energy-tol", default_value_t = 1e-9)]
    pub energy_tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct XyQuench {
    #[arg(long, allow_negative_numbers = true)]
    pub h: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long = "N", default_value_t = 101)]
    pub n: usize,
    #[arg(long = "t-max")]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
    #[command(flatten)]
    pub common: Common,
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::PhaseDiagram(a) => &a.common,
            Command::Dispersion(a) => &a.common,
            Command::Metric(a) => &a.common,
            Command::Ricci(a) => &a.common,
            Command::Geodesic(a) => &a.common,
            Command::Fsc(a) => &a.geodesic.common,
            Command::NcStatic(a) => &a.common,
            Command::Quench(a) => &a.common,
            Command::MultiQuench(a) => &a.common,
            Command::EeCorr(a) => &a.common,
            Command::EeDmrg(a) => &a.common,
            Command::XyQuench(a) => &a.common,
        }
    }
}
