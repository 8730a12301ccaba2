//! `grayaug` command line interface.
//!
//! Precedence for every tunable is: explicit flag, then the optional
//! `--config` JSON file, then the built-in default shown in `--help`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::defense::{DefenseConfig, Size};
use crate::imagecore::{decode_image, encode_image, gray_to_rgb, to_grayscale, ImageFormat};
use crate::pipeline::{
    compute_stats, process_batch, read_manifest, walk_dataset, write_manifest, BatchOptions, Mode,
    RunStats,
};
use crate::transforms::{sketch, AugmentConfig, SketchOperator, SketchParams};

#[derive(Debug, Parser)]
#[command(
    name = "grayaug",
    version,
    about = "Grayscale patch augmentation and multi-modal defense for ReID images"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply GGPR, LGPR or both to every image under --input.
    Augment(AugmentArgs),
    /// Apply the multi-modal defense partition (training time).
    Defend(DefendArgs),
    /// Downscale then upscale every image (inference time).
    ResizeDefense(ResizeArgs),
    /// Convert a single image to a grayscale or sketch plane.
    Convert(ConvertArgs),
    /// Summarize a manifest as JSON on stdout.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Input directory, scanned recursively for PNG/JPEG files.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory; the input tree is mirrored as PNG.
    #[arg(long)]
    pub output: PathBuf,
    /// Master seed for the per-image random streams.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Manifest path [default: <output>/manifest.ndjson].
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// JSON file with "augment" and/or "defense" sections overriding the defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print run statistics as JSON on stdout.
    #[arg(long)]
    pub stats_json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AugmentMode {
    Ggpr,
    Lgpr,
    Both,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Which transform to apply; `both` runs the GGPR gate first, then LGPR.
    #[arg(long, value_enum, default_value_t = AugmentMode::Both)]
    pub mode: AugmentMode,
    /// GGPR probability.
    #[arg(long, default_value_t = 0.05)]
    pub p_g: f64,
    /// LGPR probability.
    #[arg(long, default_value_t = 0.4)]
    pub p_l: f64,
    /// Minimum patch area as a fraction of the image.
    #[arg(long, default_value_t = 0.02)]
    pub area_min: f64,
    /// Maximum patch area as a fraction of the image.
    #[arg(long, default_value_t = 0.4)]
    pub area_max: f64,
    /// Minimum patch aspect ratio (height / width).
    #[arg(long, default_value_t = 0.3)]
    pub aspect_min: f64,
    /// Maximum patch aspect ratio (height / width).
    #[arg(long, default_value_t = 3.33)]
    pub aspect_max: f64,
    /// Rectangle draws before LGPR gives up on an image.
    #[arg(long, default_value_t = 100)]
    pub max_attempts: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SketchOpArg {
    Dodge,
    Sobel,
}

impl From<SketchOpArg> for SketchOperator {
    fn from(op: SketchOpArg) -> Self {
        match op {
            SketchOpArg::Dodge => SketchOperator::Dodge,
            SketchOpArg::Sobel => SketchOperator::Sobel,
        }
    }
}

#[derive(Debug, Args)]
pub struct SketchArgs {
    /// Sketch operator.
    #[arg(long, value_enum, default_value_t = SketchOpArg::Dodge)]
    pub sketch_op: SketchOpArg,
    /// Gaussian sigma of the dodge sketch, in pixels.
    #[arg(long, default_value_t = 3.0)]
    pub sketch_sigma: f64,
}

#[derive(Debug, Args)]
pub struct DefendArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Share of images converted entirely to grayscale.
    #[arg(long, default_value_t = 0.1)]
    pub p_gray: f64,
    /// Share of images with 1-2 channels replaced by luma.
    #[arg(long, default_value_t = 0.05)]
    pub p_gray_fuse: f64,
    /// Share of images with 1-2 channels replaced by the sketch.
    #[arg(long, default_value_t = 0.05)]
    pub p_sketch_fuse: f64,
    /// Probability that a fusion replaces two channels rather than one.
    #[arg(long, default_value_t = 0.5)]
    pub two_channel_prob: f64,
    #[command(flatten)]
    pub sketch: SketchArgs,
}

#[derive(Debug, Args)]
pub struct ResizeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Intermediate size, WIDTHxHEIGHT.
    #[arg(long, default_value = "110x50", value_parser = parse_size)]
    pub down: Size,
    /// Final size, WIDTHxHEIGHT.
    #[arg(long, default_value = "384x128", value_parser = parse_size)]
    pub up: Size,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvertOp {
    Gray,
    Sketch,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Input image file.
    #[arg(long)]
    pub input: PathBuf,
    /// Output PNG file.
    #[arg(long)]
    pub output: PathBuf,
    /// Conversion to apply.
    #[arg(long, value_enum, default_value_t = ConvertOp::Gray)]
    pub op: ConvertOp,
    #[command(flatten)]
    pub sketch: SketchArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Manifest written by a previous run.
    #[arg(long)]
    pub manifest: PathBuf,
}

fn parse_size(s: &str) -> Result<Size, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    augment: AugmentConfig,
    defense: DefenseConfig,
}

fn load_config(path: Option<&Path>) -> anyhow::Result<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let file = File::open(path).with_context(|| format!("opening config {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file))
        .with_context(|| format!("parsing config {}", path.display()))
}

/// Flags typed on the command line win over the config file.
struct Explicit<'a>(&'a ArgMatches);

impl Explicit<'_> {
    fn set<T: Copy>(&self, id: &str, target: &mut T, value: T) {
        if self.0.value_source(id) == Some(ValueSource::CommandLine) {
            *target = value;
        }
    }
}

fn augment_config(args: &AugmentArgs, m: &ArgMatches, base: AugmentConfig) -> AugmentConfig {
    let flags = Explicit(m);
    let mut cfg = base;
    flags.set("p_g", &mut cfg.p_ggpr, args.p_g);
    flags.set("p_l", &mut cfg.p_lgpr, args.p_l);
    flags.set("area_min", &mut cfg.area_min, args.area_min);
    flags.set("area_max", &mut cfg.area_max, args.area_max);
    flags.set("aspect_min", &mut cfg.aspect_min, args.aspect_min);
    flags.set("aspect_max", &mut cfg.aspect_max, args.aspect_max);
    flags.set("max_attempts", &mut cfg.max_attempts, args.max_attempts);
    cfg
}

fn sketch_params(args: &SketchArgs, m: &ArgMatches, base: SketchParams) -> SketchParams {
    let flags = Explicit(m);
    let mut params = base;
    flags.set("sketch_op", &mut params.operator, args.sketch_op.into());
    flags.set("sketch_sigma", &mut params.sigma, args.sketch_sigma);
    params
}

fn defend_config(args: &DefendArgs, m: &ArgMatches, base: DefenseConfig) -> DefenseConfig {
    let flags = Explicit(m);
    let mut cfg = base;
    flags.set("p_gray", &mut cfg.p_gray, args.p_gray);
    flags.set("p_gray_fuse", &mut cfg.p_gray_fuse, args.p_gray_fuse);
    flags.set("p_sketch_fuse", &mut cfg.p_sketch_fuse, args.p_sketch_fuse);
    flags.set(
        "two_channel_prob",
        &mut cfg.two_channel_prob,
        args.two_channel_prob,
    );
    cfg.sketch = sketch_params(&args.sketch, m, cfg.sketch);
    cfg
}

fn resize_config(args: &ResizeArgs, m: &ArgMatches, base: DefenseConfig) -> DefenseConfig {
    let flags = Explicit(m);
    let mut cfg = base;
    flags.set("down", &mut cfg.down, args.down);
    flags.set("up", &mut cfg.up, args.up);
    cfg
}

fn run_batch(common: &CommonArgs, mut opts: BatchOptions) -> anyhow::Result<RunStats> {
    opts.workers = match common.workers {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    };
    opts.validate()?;
    if !common.input.is_dir() {
        bail!("input {} is not a directory", common.input.display());
    }

    let walk = walk_dataset(&common.input)?;
    for failure in &walk.failures {
        eprintln!("warning: {}: {}", failure.path.display(), failure.message);
    }
    let records = process_batch(&walk.entries, &common.input, &common.output, &opts)?;

    let manifest = common
        .manifest
        .clone()
        .unwrap_or_else(|| common.output.join("manifest.ndjson"));
    if let Some(parent) = manifest.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    let file =
        File::create(&manifest).with_context(|| format!("creating {}", manifest.display()))?;
    write_manifest(&records, BufWriter::new(file))?;

    let stats = compute_stats(&records);
    eprintln!(
        "{}: {} images, {} processed, {} skipped; manifest {}",
        opts.mode,
        stats.total,
        stats.processed,
        stats.skipped,
        manifest.display()
    );
    Ok(stats)
}

fn print_stats(stats: &RunStats) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, stats)?;
    writeln!(out)?;
    Ok(())
}

fn convert(args: &ConvertArgs, m: &ArgMatches) -> anyhow::Result<()> {
    let bytes =
        std::fs::read(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let img = decode_image(&bytes)?;
    let rgb = match img.channels() {
        1 => gray_to_rgb(&img)?,
        _ => img,
    };
    let out = match args.op {
        ConvertOp::Gray => to_grayscale(&rgb)?,
        ConvertOp::Sketch => {
            let params = sketch_params(&args.sketch, m, SketchParams::default());
            params.validate()?;
            sketch(&rgb, &params)?
        }
    };
    std::fs::write(&args.output, encode_image(&out, ImageFormat::Png)?)
        .with_context(|| format!("writing {}", args.output.display()))?;
    Ok(())
}

fn dispatch(cli: Cli, matches: &ArgMatches) -> anyhow::Result<()> {
    let sub = matches
        .subcommand()
        .map(|(_, m)| m)
        .expect("subcommand is required");
    match &cli.command {
        Command::Augment(args) => {
            let file = load_config(args.common.config.as_deref())?;
            let mode = match args.mode {
                AugmentMode::Ggpr => Mode::Ggpr,
                AugmentMode::Lgpr => Mode::Lgpr,
                AugmentMode::Both => Mode::Combined,
            };
            let mut opts = BatchOptions::new(mode, args.common.seed);
            opts.augment = augment_config(args, sub, file.augment);
            let stats = run_batch(&args.common, opts)?;
            if args.common.stats_json {
                print_stats(&stats)?;
            }
        }
        Command::Defend(args) => {
            let file = load_config(args.common.config.as_deref())?;
            let mut opts = BatchOptions::new(Mode::Mmd, args.common.seed);
            opts.defense = defend_config(args, sub, file.defense);
            let stats = run_batch(&args.common, opts)?;
            if args.common.stats_json {
                print_stats(&stats)?;
            }
        }
        Command::ResizeDefense(args) => {
            let file = load_config(args.common.config.as_deref())?;
            let mut opts = BatchOptions::new(Mode::ResizeDefense, args.common.seed);
            opts.defense = resize_config(args, sub, file.defense);
            let stats = run_batch(&args.common, opts)?;
            if args.common.stats_json {
                print_stats(&stats)?;
            }
        }
        Command::Convert(args) => convert(args, sub)?,
        Command::Stats(args) => {
            let file = File::open(&args.manifest)
                .with_context(|| format!("opening {}", args.manifest.display()))?;
            let records = read_manifest(BufReader::new(file))?;
            print_stats(&compute_stats(&records))?;
        }
    }
    Ok(())
}

/// Runs the CLI on `argv` (program name first) and returns the exit status:
/// 0 on success, 2 on usage errors, 1 on configuration or I/O failures.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli, &matches) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
