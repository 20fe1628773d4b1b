use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "trajseg",
    version,
    about = "Masks as point trajectories: codec, rewards, metrics and data tools"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace a PNG mask and print its polygon text
    Encode(EncodeArgs),
    /// Rasterize polygon text into a PNG mask
    Decode(DecodeArgs),
    /// Score JSONL {"id","text"} records from stdin against PNG ground truth
    Reward(RewardArgs),
    /// Turn annotations into query-pair JSONL
    Convert(ConvertArgs),
    /// Score a predictions JSONL file against ground truth
    Evaluate(EvaluateArgs),
    /// Vertex count, length and round-trip IoU over a tolerance ladder (CSV)
    Sweep(SweepArgs),
    /// Simulated rollout groups with rewards and advantages (JSONL)
    Simulate(SimulateArgs),
    /// Draw a mask or polygon over an image
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct Jobs {
    /// Worker threads
    #[arg(long, env = "TRAJSEG_JOBS", default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
}

/// Where ground-truth instances come from.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct GtSourceArgs {
    /// COCO-style annotation JSON
    #[arg(long)]
    pub coco: Option<PathBuf>,
    /// Directory of `<id>.png` masks
    #[arg(long)]
    pub gt_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub mask: PathBuf,
    /// Simplification tolerance, relative to ring perimeter
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 3)]
    pub decimals: u8,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Polygon text, or `-` for stdin
    #[arg(long)]
    pub text: String,
    #[arg(long)]
    pub width: u32,
    #[arg(long)]
    pub height: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RewardArgs {
    #[arg(long)]
    pub gt_dir: PathBuf,
    /// key=value reward configuration; defaults when omitted
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[command(flatten)]
    pub source: GtSourceArgs,
    /// Comma-separated task kinds such as `mask->bbox`; all by default
    #[arg(long, value_delimiter = ',')]
    pub tasks: Vec<String>,
    /// Template file with `[task]` sections
    #[arg(long)]
    pub templates: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 3)]
    pub decimals: u8,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub jobs: Jobs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub source: GtSourceArgs,
    /// Predictions JSONL, one {"id","text"} per line
    #[arg(long)]
    pub preds: PathBuf,
    #[arg(long, default_value_t = trajseg::metrics::ACC_IOU_THRESHOLD)]
    pub acc_threshold: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub jobs: Jobs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, conflicts_with_all = ["gt_dir", "synthetic"])]
    pub coco: Option<PathBuf>,
    #[arg(long, conflicts_with = "synthetic")]
    pub gt_dir: Option<PathBuf>,
    /// Generate this many synthetic blob masks instead of reading files
    #[arg(long)]
    pub synthetic: Option<usize>,
    /// Side length of synthetic masks
    #[arg(long, default_value_t = 64)]
    pub size: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated, strictly ascending tolerances
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.001, 0.01])]
    pub epsilons: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    pub decimals: u8,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub jobs: Jobs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: GtSourceArgs,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Perturbation per group member, e.g. `jitter=0.02`, `shuffle`, `corrupt`;
    /// repeat once per member. A default ladder is used when omitted.
    #[arg(long = "perturb")]
    pub perturb: Vec<String>,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Background image; a black canvas of the mask size when omitted
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Mask PNG to overlay (its traced vertices are marked)
    #[arg(long, conflicts_with = "text", required_unless_present = "text")]
    pub mask: Option<PathBuf>,
    /// Polygon text to overlay, or `-` for stdin
    #[arg(long)]
    pub text: Option<String>,
    /// Canvas size for `--text` without `--image`
    #[arg(long, requires = "height")]
    pub width: Option<u32>,
    #[arg(long, requires = "width")]
    pub height: Option<u32>,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long)]
    pub out: PathBuf,
}
