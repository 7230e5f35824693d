//! Run specifications. Each subcommand's options parse both from flags and
//! from the JSON run-spec; flag names equal the JSON field names.

use clap::{Args, Subcommand, ValueEnum};
use invsq::classical::PathPotential;
use invsq::model::{Profile, RegulatorKind};
use invsq::{derived_constants, ChainBoundary, ModelParams, Normalization, Regulator, Sign};
use serde::{Deserialize, Serialize};

#[derive(Subcommand, Deserialize, Clone, Debug)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunSpec {
    /// Fixed-point couplings, RG eigenvalues and the binding constant.
    FixedPoints(FixedPointsSpec),
    /// RG flow of gamma from b0 to b1.
    Flow(FlowSpec),
    /// Constant C+/C- contours in (xi, g).
    Contours(ContoursSpec),
    /// Ground-state energy and mean position over a coupling sweep.
    BoundState(BoundStateSpec),
    /// Binding-energy exponent near the critical coupling.
    Exponent(ExponentSpec),
    /// Propagator by spectral quadrature.
    Propagator(PropagatorSpec),
    /// Homogeneous-law and endpoint-scaling checks.
    ScalingCheck(ScalingCheckSpec),
    /// Scaling-function collapse near g_+.
    Collapse(CollapseSpec),
    /// Reflection amplitude and phase shift over a mu sweep.
    PhaseShift(PhaseShiftSpec),
    /// Curve of constant phase shift in (mu, g).
    PhaseCurve(PhaseCurveSpec),
    /// Feynman–Kac path sampling of W(x, t; y).
    FeynmanKac(FeynmanKacSpec),
    /// Transfer-matrix free energy and chain partition function.
    Chain(ChainRunSpec),
    /// Log-periodic coupling roots for alpha < -1/4.
    LimitCycle(LimitCycleSpec),
    /// Regenerate the golden CSVs with a provenance header.
    RegenGolden(RegenGoldenSpec),
}

impl RunSpec {
    pub fn name(&self) -> &'static str {
        match self {
            RunSpec::FixedPoints(_) => "fixed-points",
            RunSpec::Flow(_) => "flow",
            RunSpec::Contours(_) => "contours",
            RunSpec::BoundState(_) => "bound-state",
            RunSpec::Exponent(_) => "exponent",
            RunSpec::Propagator(_) => "propagator",
            RunSpec::ScalingCheck(_) => "scaling-check",
            RunSpec::Collapse(_) => "collapse",
            RunSpec::PhaseShift(_) => "phase-shift",
            RunSpec::PhaseCurve(_) => "phase-curve",
            RunSpec::FeynmanKac(_) => "feynman-kac",
            RunSpec::Chain(_) => "chain",
            RunSpec::LimitCycle(_) => "limit-cycle",
            RunSpec::RegenGolden(_) => "regen-golden",
        }
    }
}

/// Model parameters: alpha and the length unit x0. In JSON the full
/// ModelParams object is accepted; derived fields must agree with alpha.
#[derive(Args, Deserialize, Clone, Debug)]
#[serde(from = "ModelParams")]
pub struct ParamsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub x0: f64,
}

impl From<ModelParams> for ParamsArgs {
    fn from(p: ModelParams) -> Self {
        ParamsArgs { alpha: p.alpha, x0: p.x0 }
    }
}

impl ParamsArgs {
    pub fn model(&self) -> invsq::Result<ModelParams> {
        derived_constants(self.alpha)?.with_x0(self.x0)
    }
}

#[derive(ValueEnum, Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum KindArg {
    SquareWell,
    LinearWell,
    Generic,
}

impl From<RegulatorKind> for KindArg {
    fn from(k: RegulatorKind) -> Self {
        match k {
            RegulatorKind::SquareWell => KindArg::SquareWell,
            RegulatorKind::LinearWell => KindArg::LinearWell,
            RegulatorKind::Generic => KindArg::Generic,
        }
    }
}

impl From<KindArg> for RegulatorKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::SquareWell => RegulatorKind::SquareWell,
            KindArg::LinearWell => RegulatorKind::LinearWell,
            KindArg::Generic => RegulatorKind::Generic,
        }
    }
}

impl KindArg {
    pub fn label(self) -> &'static str {
        match self {
            KindArg::SquareWell => "square_well",
            KindArg::LinearWell => "linear_well",
            KindArg::Generic => "generic",
        }
    }
}

/// Regulator of depth g. A generic profile is only available through JSON.
#[derive(Args, Deserialize, Clone, Debug)]
#[serde(from = "Regulator")]
pub struct RegulatorArgs {
    #[arg(long, value_enum, default_value = "square_well")]
    pub kind: KindArg,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long)]
    pub g: f64,
    #[arg(skip)]
    pub profile: Option<Profile>,
}

impl From<Regulator> for RegulatorArgs {
    fn from(r: Regulator) -> Self {
        RegulatorArgs { kind: r.kind.into(), b: r.b, g: r.g, profile: r.profile }
    }
}

impl RegulatorArgs {
    pub fn model(&self) -> invsq::Result<Regulator> {
        let r = Regulator { kind: self.kind.into(), b: self.b, g: self.g, profile: self.profile.clone() };
        r.validate()?;
        Ok(r)
    }
}

/// Regulator shape without a depth, for commands that sweep g.
#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub struct ShapeArgs {
    #[arg(long, value_enum, default_value = "square_well")]
    #[serde(default = "square_well")]
    pub kind: KindArg,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "one")]
    pub b: f64,
    #[arg(skip)]
    #[serde(default)]
    pub profile: Option<Profile>,
}

impl ShapeArgs {
    /// Regulator with depth g.
    pub fn at(&self, g: f64) -> invsq::Result<Regulator> {
        RegulatorArgs { kind: self.kind, b: self.b, g, profile: self.profile.clone() }.model()
    }
}

fn square_well() -> KindArg {
    KindArg::SquareWell
}

fn one() -> f64 {
    1.0
}

#[derive(ValueEnum, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignArg {
    #[serde(rename = "+")]
    #[value(name = "+", alias = "plus")]
    Plus,
    #[serde(rename = "-")]
    #[value(name = "-", alias = "minus")]
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

impl SignArg {
    pub fn label(self) -> &'static str {
        match self {
            SignArg::Plus => "+",
            SignArg::Minus => "-",
        }
    }
}

#[derive(ValueEnum, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationArg {
    Physical,
    Frozen,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::Physical => Normalization::Physical,
            NormalizationArg::Frozen => Normalization::Frozen,
        }
    }
}

fn physical() -> NormalizationArg {
    NormalizationArg::Physical
}

#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
pub struct FixedPointsSpec {
    #[command(flatten)]
    pub params: ParamsArgs,
}

#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
#[command(rename_all = "snake_case")]
pub struct FlowSpec {
    #[command(flatten)]
    pub params: ParamsArgs,
    #[arg(long)]
    pub gamma0: f64,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "one")]
    pub b0: f64,
    #[arg(long)]
    pub b1: f64,
    #[arg(long, default_value_t = default_points())]
    #[serde(default = "default_points")]
    pub n_points: usize,
}

fn default_points() -> usize {
    50
}

#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
#[command(rename_all = "snake_case")]
pub struct ContoursSpec {
    #[command(flatten)]
    pub params: ParamsArgs,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0])]
    #[serde(default = "unit_ratio")]
    pub ratios: Vec<f64>,
    #[arg(long, default_value_t = 1e-4)]
    #[serde(default = "xi_min")]
    pub xi_min: f64,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "one")]
    pub xi_max: f64,
    #[arg(long, default_value_t = 30)]
    #[serde(default = "n_xi")]
    pub n_xi: usize,
}

fn unit_ratio() -> Vec<f64> {
    vec![1.0]
}

fn xi_min() -> f64 {
    1e-4
}

fn n_xi() -> usize {
    30
}

#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
#[command(rename_all = "snake_case")]
pub struct BoundStateSpec {
    #[command(flatten)]
    pub params: ParamsArgs,
    #[command(flatten)]
    pub regulator: RegulatorArgs,
    /// Couplings to sweep; the regulator's g when empty.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub g_values: Vec<f64>,
}

#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
#[command(rename_all = "snake_case")]
pub struct ExponentSpec {
    #[command(flatten)]
    pub params: ParamsArgs,
    #[command(flatten)]
    #[serde(default = "default_shape")]
    pub shape: ShapeArgs,
    #[arg(long, default_value_t = 1e-4)]
    #[serde(default = "dg_min")]
    pub dg_min: f64,
    #[arg(long, default_value_t = 1e-2)]
    #[serde(default = "dg_max")]
    pub dg_max: f64,
    #[arg(long, default_value_t = 20)]
    #[serde(default = "n_dg")]
    pub n_dg: usize,
}

pub fn default_shape() -> ShapeArgs {
    ShapeArgs { kind: KindArg::SquareWell, b: 1.0, profile: None }
}

pub fn dg_min() -> f64 {
    1e-4
}

pub fn dg_max() -> f64 {
    1e-2
}

pub fn n_dg() -> usize {
    20
}

#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
#[command(rename_all = "snake_case")]
pub struct PropagatorSpec {
    #[command(flatten)]
    pub params: ParamsArgs,
    #[arg(long, value_enum)]
    pub sign: SignArg,
    /// Reduced coupling from the chosen fixed point.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    #[serde(default)]
    pub u: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub y: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    #[arg(long, value_enum, default_value = "physical")]
    #[serde(default = "physical")]
    pub normalization: NormalizationArg,
}

#[derive(ValueEnum, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingMethod {
    /// Exact law G(lx, l^2 t; ly) = G_{b/l}(x, t; y) / l.
    Exact,
    /// Near-fixed-point law with l^{2 nu - 1}.
    Asymptotic,
    /// Scaling relation at fixed (x, y, t).
    Relation,
    /// Callan–Symanzik residual.
    CallanSymanzik,
    /// Endpoint scaling of W from path sampling.
    MonteCarlo,
}

#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
#[command(rename_all = "snake_case")]
pub struct ScalingCheckSpec {
    #[command(flatten)]
    pub params: ParamsArgs,
    #[arg(long, value_enum)]
    pub method: ScalingMethod,
    #[arg(long, value_enum)]
    pub sign: SignArg,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    #[serde(default)]
    pub u: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub y: f64,
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub lambda: f64,
    /// Second endpoint factor of the path-sampling check; lambda when absent.
    #[arg(long)]
    #[serde(default)]
    pub lambda_prime: Option<f64>,
    #[arg(long, value_enum, default_value = "frozen")]
    #[serde(default = "frozen")]
    pub normalization: NormalizationArg,
    /// Relative finite-difference step of the Callan–Symanzik residual.
    #[arg(long, default_value_t = 1e-3)]
    #[serde(default = "fd_step")]
    pub h: f64,
    #[arg(long, default_value_t = 4096)]
    #[serde(default = "n_steps", alias = "N")]
    pub n_steps: usize,
    #[arg(long, default_value_t = 100_000)]
    #[serde(default = "n_samples")]
    pub n_samples: usize,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub seed: u64,
}

fn frozen() -> NormalizationArg {
    NormalizationArg::Frozen
}

fn fd_step() -> f64 {
    1e-3
}

fn n_steps() -> usize {
    4096
}

fn n_samples() -> usize {
    100_000
}

#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
#[command(rename_all = "snake_case")]
pub struct CollapseSpec {
    #[command(flatten)]
    pub params: ParamsArgs,
    /// Reference reduced coupling defining Phi.
    #[arg(long, default_value_t = 1e-2)]
    #[serde(default = "u0")]
    pub u0: f64,
    /// Further rows compared with the reference; u0/2 and u0/4 when empty.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub u_values: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    #[serde(default = "b_min")]
    pub b_min: f64,
    #[arg(long, default_value_t = 0.5)]
    #[serde(default = "b_max")]
    pub b_max: f64,
    #[arg(long, default_value_t = 25)]
    #[serde(default = "n_b")]
    pub n_b: usize,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "one")]
    pub x: f64,
    #[arg(long, default_value_t = 1e4)]
    #[serde(default = "t_collapse")]
    pub t: f64,
}

pub fn u0() -> f64 {
    1e-2
}

pub fn b_min() -> f64 {
    1e-6
}

pub fn b_max() -> f64 {
    0.5
}

pub fn n_b() -> usize {
    25
}

pub fn t_collapse() -> f64 {
    1e4
}

#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
#[command(rename_all = "snake_case")]
pub struct PhaseShiftSpec {
    #[command(flatten)]
    pub params: ParamsArgs,
    #[arg(long)]
    pub g: f64,
    #[arg(long, default_value_t = 1e-4)]
    #[serde(default = "xi_min")]
    pub mu_min: f64,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "one")]
    pub mu_max: f64,
    #[arg(long, default_value_t = 41)]
    #[serde(default = "n_mu")]
    pub n_mu: usize,
}

fn n_mu() -> usize {
    41
}

#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
#[command(rename_all = "snake_case")]
pub struct PhaseCurveSpec {
    #[command(flatten)]
    pub params: ParamsArgs,
    #[arg(long)]
    pub mu0: f64,
    #[arg(long)]
    pub g0: f64,
    #[arg(long)]
    pub mu1: f64,
    #[arg(long, default_value_t = 30)]
    #[serde(default = "n_xi")]
    pub n_out: usize,
}

#[derive(ValueEnum, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialArg {
    Model,
    BarrierOnly,
    Free,
}

impl From<PotentialArg> for PathPotential {
    fn from(p: PotentialArg) -> Self {
        match p {
            PotentialArg::Model => PathPotential::Model,
            PotentialArg::BarrierOnly => PathPotential::BarrierOnly,
            PotentialArg::Free => PathPotential::Free,
        }
    }
}

fn model_potential() -> PotentialArg {
    PotentialArg::Model
}

#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
#[command(rename_all = "snake_case")]
pub struct FeynmanKacSpec {
    #[command(flatten)]
    pub params: ParamsArgs,
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub g: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub y: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long)]
    pub t: f64,
    #[arg(long, alias = "N")]
    #[serde(alias = "N")]
    pub n_steps: usize,
    #[arg(long)]
    pub n_samples: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "model")]
    #[serde(default = "model_potential")]
    pub potential: PotentialArg,
    #[arg(long, default_value_t = 0.0)]
    #[serde(default)]
    pub refine_tol: f64,
    #[arg(long, default_value_t = 12)]
    #[serde(default = "max_depth")]
    pub max_depth: u32,
}

fn max_depth() -> u32 {
    12
}

#[derive(ValueEnum, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryArg {
    Box,
    Tail,
}

impl From<BoundaryArg> for ChainBoundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Box => ChainBoundary::Box,
            BoundaryArg::Tail => ChainBoundary::Tail,
        }
    }
}

fn tail() -> BoundaryArg {
    BoundaryArg::Tail
}

#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
#[command(rename_all = "snake_case")]
pub struct ChainRunSpec {
    #[command(flatten)]
    pub params: ParamsArgs,
    #[command(flatten)]
    pub regulator: RegulatorArgs,
    #[arg(long)]
    pub epsilon: f64,
    /// Target grid spacing; adjusted to put a node on the regulator edge.
    #[arg(long, default_value_t = 0.02)]
    #[serde(default = "spacing")]
    pub h: f64,
    #[arg(long, default_value_t = 30.0)]
    #[serde(default = "x_max")]
    pub x_max: f64,
    #[arg(long, value_enum, default_value = "tail")]
    #[serde(default = "tail")]
    pub boundary: BoundaryArg,
    /// Extrapolate f from epsilon, epsilon/2, epsilon/4.
    #[arg(long)]
    #[serde(default)]
    pub extrapolate: bool,
    /// Couplings to sweep; the regulator's g when empty.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub g_values: Vec<f64>,
    /// Interior sites of the partition function Z_xy; skipped when absent.
    #[arg(long, alias = "N")]
    #[serde(default, alias = "N")]
    pub n_sites: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "one")]
    pub x: f64,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "one")]
    pub y: f64,
}

fn spacing() -> f64 {
    0.02
}

fn x_max() -> f64 {
    30.0
}

#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
#[command(rename_all = "snake_case")]
pub struct LimitCycleSpec {
    #[command(flatten)]
    pub params: ParamsArgs,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e-3])]
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 1e-2)]
    #[serde(default = "b_lc_min")]
    pub b_min: f64,
    #[arg(long, default_value_t = 1e2)]
    #[serde(default = "b_top")]
    pub b_max: f64,
    #[arg(long, default_value_t = 200)]
    #[serde(default = "n_lc")]
    pub n_b: usize,
}

fn default_eps() -> Vec<f64> {
    vec![1e-3]
}

fn b_lc_min() -> f64 {
    1e-2
}

fn b_top() -> f64 {
    1e2
}

fn n_lc() -> usize {
    200
}

#[derive(Args, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
#[command(rename_all = "snake_case")]
pub struct RegenGoldenSpec {
    #[arg(long, default_value_t = -3.0 / 16.0, allow_negative_numbers = true)]
    #[serde(default = "alpha316")]
    pub alpha: f64,
}

fn alpha316() -> f64 {
    -3.0 / 16.0
}
