use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mattekit",
    version,
    about = "Trimap, compositing, fusion and matting metrics toolkit"
)]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for batch work (defaults to all cores).
    #[arg(long, global = true, env = "MATTEKIT_THREADS")]
    pub threads: Option<usize>,

    /// Increase log detail on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Adaptive trimap from a coarse binary mask.
    Trimap(TrimapArgs),
    /// Erosion/dilation trimap from a ground-truth alpha.
    TrimapConv(TrimapConvArgs),
    /// Build a synthetic training set: manifest plus rendered triplets.
    Synth(SynthArgs),
    /// Composite a foreground over a background.
    Compose(ComposeArgs),
    /// Fuse a probabilistic trimap with a predicted alpha.
    Fuse(FuseArgs),
    /// Convert a probabilistic trimap to a hard trimap.
    Harden(HardenArgs),
    /// Compute SAD, MSE, gradient and connectivity errors.
    Eval(EvalArgs),
    /// Dump Laplacian pyramid levels as PNGs.
    Pyramid(PyramidArgs),
}

#[derive(Debug, Args)]
pub struct TrimapArgs {
    /// Binary mask PNG (pixels >= 0.5 are foreground).
    #[arg(long)]
    pub mask: PathBuf,
    /// Hair parsing mask; edge pixels nearest to it use the hair rate.
    #[arg(long, conflicts_with = "fur")]
    pub hair_mask: Option<PathBuf>,
    /// Treat the whole object boundary as fur.
    #[arg(long)]
    pub fur: bool,
    /// Dilation rates as hair,fur,solid fractions of the object scale.
    #[arg(long, default_value = "0.035,0.025,0.015")]
    pub rates: Rates,
    #[arg(long)]
    pub out: PathBuf,
}

/// Three comma-separated positive numbers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rates {
    pub hair: f64,
    pub fur: f64,
    pub solid: f64,
}

impl FromStr for Rates {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [hair, fur, solid] if parts.iter().all(|r| r.is_finite() && *r > 0.0) => {
                Ok(Rates { hair, fur, solid })
            }
            [_, _, _] => Err("rates must be positive".into()),
            _ => Err(format!(
                "expected hair,fur,solid; got {} value(s)",
                parts.len()
            )),
        }
    }
}

#[derive(Debug, Args)]
pub struct TrimapConvArgs {
    /// Alpha matte PNG.
    #[arg(long)]
    pub alpha: PathBuf,
    /// Fixed kernel radius. Without it a radius is drawn from
    /// --k-min..=--k-max using --seed.
    #[arg(long)]
    pub kernel: Option<u32>,
    #[arg(long, default_value_t = 3)]
    pub k_min: u32,
    #[arg(long, default_value_t = 25)]
    pub k_max: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub fg_dir: PathBuf,
    #[arg(long)]
    pub alpha_dir: PathBuf,
    /// Background directory; repeat to sample several pools equally.
    #[arg(long = "bg-dir", required = true)]
    pub bg_dirs: Vec<PathBuf>,
    /// Samples per foreground.
    #[arg(long, default_value_t = 1)]
    pub per_fg: usize,
    /// Receives composite/, alpha/ and trimap/ subdirectories.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// JSON Lines manifest to write.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value_t = 320)]
    pub out_size: usize,
    /// Per-channel color jitter strength.
    #[arg(long, default_value_t = 0.2)]
    pub jitter: f64,
    #[arg(long, default_value_t = 3)]
    pub k_min: u32,
    #[arg(long, default_value_t = 25)]
    pub k_max: u32,
    /// Write the manifest only.
    #[arg(long)]
    pub no_render: bool,
}

#[derive(Debug, Args)]
pub struct ComposeArgs {
    #[arg(long)]
    pub fg: PathBuf,
    #[arg(long)]
    pub bg: PathBuf,
    #[arg(long)]
    pub alpha: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    #[arg(long)]
    pub ptm: PathBuf,
    #[arg(long)]
    pub alpha: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct HardenArgs {
    #[arg(long)]
    pub ptm: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Region {
    Whole,
    Unknown,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted alpha PNG, or a directory of them.
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth alpha PNG, or a directory paired with --pred by stem.
    #[arg(long)]
    pub gt: PathBuf,
    /// Trimap PNG or directory; required for --region unknown.
    #[arg(long)]
    pub trimap: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Region::Whole)]
    pub region: Region,
    /// Append one row per image (and a mean row for batches).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PyramidArgs {
    /// Grayscale PNG.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}
