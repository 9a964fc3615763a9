use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use szlab::scalar::parse_ratio;

#[derive(Parser, Debug)]
#[command(name = "szlab", version, about = "Finite experiments on progressions, colourings, regularity and removal")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Shorthand for `--format json`.
    #[arg(long, global = true, conflicts_with = "format")]
    pub json: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Master seed; every random object draws from its own derived stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Rational)]
    pub mode: Mode,
    /// Enumeration guard, overriding the command's default.
    #[arg(long, global = true)]
    pub guard: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Rational,
    Float,
}

/// Exact rationals are accepted as `p/q`, integers or decimals and kept in
/// normalized `p/q` form so the resolved config is canonical.
pub fn rational(s: &str) -> Result<String, String> {
    parse_ratio(s).map(|r| r.to_string()).ok_or_else(|| format!("not a rational number: {s:?}"))
}

pub fn to_ratio(s: &str) -> BigRational {
    parse_ratio(s).expect("validated at parse time")
}

fn natural(s: &str) -> Result<String, String> {
    let v: num_bigint::BigUint = s.parse().map_err(|e| format!("{e}"))?;
    Ok(v.to_string())
}

fn probability(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ordered k-AP counts (n, r), r = 0 included, in ℤ/Nℤ or [1, N].
    CountAps(CountAps),
    /// Behrend's 3AP-free digit-sphere set in [1, N].
    Behrend(Behrend),
    /// Bohr set {n ≤ N : ‖nα‖ ≤ θ}.
    Bohr(Bohr),
    /// Least r with ‖αr²‖ < ε.
    Qrec(Qrec),
    /// Van der Waerden number W(k, m) by exhaustive search.
    Vdw(Vdw),
    /// Schur triples x, y, x+y of one colour.
    Schur(Schur),
    /// Monochromatic or weakly monochromatic subspaces of a coloured cube.
    HalesJewett(HalesJewett),
    /// Ergodic averages on a finite measure-preserving permutation.
    Ergodic(Ergodic),
    /// Multiple recurrence averages ∫ f·Tʳf·…·T^{(k−1)r}f.
    Recurrence(Recurrence),
    /// Box norms □² of a 2-kernel or □³ of a 3-kernel.
    Boxnorm(Boxnorm),
    /// The triangle form Λ₃ or the tetrahedral form Λ₄.
    Lambda(Lambda),
    /// Strong regularity decomposition f = f₁ + f₂ + f₃.
    Regularize(Regularize),
    /// Strong triangle removal on kernels or a graph.
    TriangleRemoval(TriangleRemoval),
    /// Λ₃ of the tripartite encoding of A ⊆ ℤ/Nℤ against its 3AP count.
    Roth(Roth),
    /// A G(n, p) host graph and its normalized weight ν.
    Gnp(Gnp),
    /// Linear-forms (self-correlation) check of ν.
    LinearForms(LinearForms),
    /// Dense-model decomposition fν = f₁ + f₂ + f₃ relative to ν.
    Structure(Structure),
    /// Removal inside a sparse random host graph.
    RelativeRemoval(RelativeRemoval),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CountAps(_) => "count-aps",
            Command::Behrend(_) => "behrend",
            Command::Bohr(_) => "bohr",
            Command::Qrec(_) => "qrec",
            Command::Vdw(_) => "vdw",
            Command::Schur(_) => "schur",
            Command::HalesJewett(_) => "hales-jewett",
            Command::Ergodic(_) => "ergodic",
            Command::Recurrence(_) => "recurrence",
            Command::Boxnorm(_) => "boxnorm",
            Command::Lambda(_) => "lambda",
            Command::Regularize(_) => "regularize",
            Command::TriangleRemoval(_) => "triangle-removal",
            Command::Roth(_) => "roth",
            Command::Gnp(_) => "gnp",
            Command::LinearForms(_) => "linear-forms",
            Command::Structure(_) => "structure",
            Command::RelativeRemoval(_) => "relative-removal",
        }
    }

    pub fn parameters(&self) -> serde_json::Value {
        let v = match self {
            Command::CountAps(a) => serde_json::to_value(a),
            Command::Behrend(a) => serde_json::to_value(a),
            Command::Bohr(a) => serde_json::to_value(a),
            Command::Qrec(a) => serde_json::to_value(a),
            Command::Vdw(a) => serde_json::to_value(a),
            Command::Schur(a) => serde_json::to_value(a),
            Command::HalesJewett(a) => serde_json::to_value(a),
            Command::Ergodic(a) => serde_json::to_value(a),
            Command::Recurrence(a) => serde_json::to_value(a),
            Command::Boxnorm(a) => serde_json::to_value(a),
            Command::Lambda(a) => serde_json::to_value(a),
            Command::Regularize(a) => serde_json::to_value(a),
            Command::TriangleRemoval(a) => serde_json::to_value(a),
            Command::Roth(a) => serde_json::to_value(a),
            Command::Gnp(a) => serde_json::to_value(a),
            Command::LinearForms(a) => serde_json::to_value(a),
            Command::Structure(a) => serde_json::to_value(a),
            Command::RelativeRemoval(a) => serde_json::to_value(a),
        };
        v.expect("argument structs serialize")
    }
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["set", "density", "full"])))]
pub struct CountAps {
    /// Modulus (or interval length with --interval).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    /// Elements of A, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub set: Option<Vec<i64>>,
    /// Draw A at random with this density.
    #[arg(long, value_parser = probability)]
    pub density: Option<f64>,
    /// A is the whole ambient group.
    #[arg(long)]
    pub full: bool,
    /// Progression lengths; one CSV row each.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub k: Vec<usize>,
    /// Work in [1, N] without wraparound instead of ℤ/Nℤ.
    #[arg(long)]
    pub interval: bool,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("shape").required(true).args(["delta", "d"])))]
pub struct Behrend {
    #[arg(long)]
    pub n: u64,
    /// Choose d and M from a target density δ.
    #[arg(long, value_parser = positive_f64, conflicts_with_all = ["d", "m", "r"])]
    pub delta: Option<f64>,
    /// Constant C in d ≈ C·√(log N) for the automatic choice.
    #[arg(long, requires = "delta")]
    pub c: Option<f64>,
    /// Digit dimension.
    #[arg(long, requires = "m")]
    pub d: Option<u32>,
    /// Digit base (at least 10).
    #[arg(long, requires = "d")]
    pub m: Option<u64>,
    /// Sphere radius²; the largest shell by default.
    #[arg(long, requires = "d")]
    pub r: Option<u64>,
    /// Include the element list in the report.
    #[arg(long)]
    pub elements: bool,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("freq").required(true).args(["alpha", "alpha_real"])))]
pub struct Bohr {
    #[arg(long)]
    pub n: u64,
    /// Rational frequency p/q.
    #[arg(long, value_parser = rational)]
    pub alpha: Option<String>,
    /// Real frequency (double precision, with a guard band at θ).
    #[arg(long)]
    pub alpha_real: Option<f64>,
    #[arg(long, value_parser = rational)]
    pub theta: String,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("freq").required(true).args(["alpha", "alpha_real"])))]
pub struct Qrec {
    #[arg(long, value_parser = rational)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub alpha_real: Option<f64>,
    #[arg(long, value_parser = positive_f64)]
    pub eps: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub r_max: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct Vdw {
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub m: u32,
    /// Largest N searched before reporting a lower bound.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub limit: u64,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("input").required(true).args(["colouring", "n"])))]
pub struct Schur {
    /// Colours of 1, 2, …, N (1-based colour labels).
    #[arg(long, value_delimiter = ',')]
    pub colouring: Option<Vec<u32>>,
    /// Enumerate every colouring of [1, N].
    #[arg(long, requires = "m")]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexingArg {
    Inclusive,
    HalfOpen,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KindArg {
    Mono,
    Weak,
    /// Shelah's pigeonhole step (weakly monochromatic, dimension ≥ 1).
    Shelah,
}

#[derive(Args, Debug, Serialize)]
pub struct HalesJewett {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub m: u32,
    /// Subspace dimension.
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    #[arg(long, value_enum, default_value_t = KindArg::Mono)]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value_t = IndexingArg::Inclusive)]
    pub indexing: IndexingArg,
    /// Colours of the grid points in row-major order; random when absent.
    #[arg(long, value_delimiter = ',')]
    pub colouring: Option<Vec<u32>>,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("system").required(true).args(["cycle_type", "random_states"])))]
pub struct SystemArgs {
    /// Cycle lengths of the permutation, uniform measure.
    #[arg(long, value_delimiter = ',')]
    pub cycle_type: Option<Vec<usize>>,
    /// A random permutation of this many states with a random invariant measure.
    #[arg(long)]
    pub random_states: Option<usize>,
    /// Function values, one per state; random when absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = rational)]
    pub f: Option<Vec<String>>,
    /// Averaging length; the global period by default.
    #[arg(long, value_parser = natural)]
    pub length: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct Ergodic {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct Recurrence {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    /// Number of shifted copies f, Tʳf, …, T^{(k−1)r}f.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct KernelSource {
    /// Kernel files (CSV, or little-endian binary for `.bin`).
    #[arg(long = "kernel", value_delimiter = ',')]
    pub kernels: Vec<String>,
    /// Random kernels on uniform spaces of this size per axis.
    #[arg(long, conflicts_with = "kernels")]
    pub random: Option<usize>,
    /// Denominator of random rational values.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub den: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct Boxnorm {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: KernelSource,
    /// 2 for □² of a 2-kernel, 3 for □³ of a 3-kernel (random only).
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..=3))]
    pub order: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct Lambda {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: KernelSource,
    /// 3 for Λ₃(f, g, h), 4 for Λ₄ of four 3-kernels (random only).
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(3..=4))]
    pub order: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct Regularize {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: KernelSource,
    #[arg(long, value_parser = rational, default_value = "1/4")]
    pub tau: String,
    /// `affine:A,B` for F(M) = A·M + B, or `removal` for the removal-lemma growth.
    #[arg(long, default_value = "affine:1,1")]
    pub growth: String,
}

#[derive(Args, Debug, Serialize)]
pub struct TriangleRemoval {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: KernelSource,
    /// Graph form on G(n, p) instead of kernels.
    #[arg(long, conflicts_with_all = ["kernels", "random"], requires = "p")]
    pub graph: Option<usize>,
    #[arg(long, value_parser = rational)]
    pub p: Option<String>,
    /// Λ₃ threshold; defaults to Λ₃ + 1/1000 of the input.
    #[arg(long, value_parser = rational)]
    pub eps: Option<String>,
    /// Fixed τ instead of the default schedule.
    #[arg(long, value_parser = rational)]
    pub tau: Option<String>,
    /// Repair a non-vanishing product instead of failing.
    #[arg(long)]
    pub repair: bool,
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["set", "density", "full"])))]
pub struct Roth {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub set: Option<Vec<i64>>,
    #[arg(long, value_parser = probability)]
    pub density: Option<f64>,
    #[arg(long)]
    pub full: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct Gnp {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = rational)]
    pub p: String,
}

#[derive(Args, Debug, Serialize)]
pub struct LinearForms {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = rational)]
    pub p: String,
    #[arg(long, default_value_t = 0.15, value_parser = positive_f64)]
    pub tol: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subgraph {
    /// G = H.
    Host,
    /// Each host edge kept with probability 1/2.
    Half,
}

#[derive(Args, Debug, Serialize)]
pub struct Structure {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = rational)]
    pub p: String,
    #[arg(long, value_enum, default_value_t = Subgraph::Half)]
    pub subgraph: Subgraph,
    #[arg(long, value_parser = rational, default_value = "1/4")]
    pub sigma: String,
    #[arg(long, value_parser = rational, default_value = "1/20")]
    pub resolution: String,
    #[arg(long, value_parser = rational, default_value = "1")]
    pub kappa: String,
    #[arg(long, default_value_t = 16)]
    pub max_iter: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct RelativeRemoval {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = rational)]
    pub p: String,
    #[arg(long, value_enum, default_value_t = Subgraph::Host)]
    pub subgraph: Subgraph,
    #[arg(long, value_parser = rational, default_value = "1/20")]
    pub eps: String,
}
