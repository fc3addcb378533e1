use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "fepkit", version, about = "Classify non-Hermitian band degeneracies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify the degeneracy at one momentum.
    Classify(ClassifyArgs),
    /// Complex bands along a straight path, as CSV.
    Band(BandArgs),
    /// Smallest |E| over a 2D momentum grid, as CSV.
    Contour(ContourArgs),
    /// Grid scan for degeneracies, with refinement and classification.
    Scan(ScanArgs),
    /// Classified samples along the reciprocal Lieb degeneracy ring.
    Ring(RingArgs),
    /// Low-energy hinge states of an open HODSM slab.
    Hinge(HingeArgs),
    /// Exponent and decay-rate fits.
    Probe(ProbeArgs),
    /// Run the built-in acceptance checks.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// lieb:{hermitian,nh-symmetric,minimal-fep,reciprocal} or hodsm:{h,nh1,nh2,nh3,nh4}
    #[arg(long)]
    pub model: String,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    /// HODSM intracell coupling [default: -1]
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// HODSM intercell coupling [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub psi: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct TolArgs {
    /// Relative singular-value cutoff
    #[arg(long = "rank-tol", env = "FEPKIT_RANK_TOL")]
    pub rank_tol: Option<f64>,
    /// Eigenvalue clustering radius in units of 1 + |H|
    #[arg(long = "cluster-tol", env = "FEPKIT_CLUSTER_TOL")]
    pub cluster_tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    /// Momentum components, e.g. pi,-pi/2
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// kz for HODSM models; kx = ky = 0 unless --k gives them
    #[arg(long, allow_hyphen_values = true)]
    pub kz: Option<String>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub point: PointArgs,
    /// Energy as re or re,im
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub energy: String,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BandArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// axis=start:end:count, e.g. kz=-pi:pi:401
    #[arg(long, allow_hyphen_values = true)]
    pub path: String,
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ContourArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Points per axis
    #[arg(long, default_value_t = 128)]
    pub grid: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub kz: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Points per axis
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RingArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HingeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 20)]
    pub nx: usize,
    /// Defaults to --nx
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub kz: Option<String>,
    #[arg(long = "gram-threshold", default_value_t = fepkit::probes::hinge::DEFAULT_GRAM_THRESHOLD)]
    pub gram_threshold: f64,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Output directory for hinge.json and the per-state intensity CSVs
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeKind {
    Lineshape,
    Splitting,
    Decay,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisArg {
    X,
    Y,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CornerArg {
    A,
    B,
    C,
    D,
}

#[derive(Args, Debug)]
pub struct ProbeArgs {
    #[arg(long, value_enum)]
    pub kind: ProbeKind,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub energy: String,
    /// Largest partial multiplicity at the probed point
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long, value_enum, default_value = "b")]
    pub corner: CornerArg,
    #[arg(long, value_enum, default_value = "y")]
    pub axis: AxisArg,
    /// Decay geometry; defaults to 30 cells along the axis and 12 across
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Run only these criteria (1-10)
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
    #[command(flatten)]
    pub tol: TolArgs,
}
