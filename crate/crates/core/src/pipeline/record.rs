use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::defense::{apply_outcome, resize_round_trip, DefenseConfig, DefenseOutcome, Size};
use crate::error::{Error, Result};
use crate::imagecore::{gray_to_rgb, to_grayscale, ImageBuffer};
use crate::transforms::{apply_gray_patch, GateDraw, LgprRecord, SketchParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Ggpr,
    Lgpr,
    /// GGPR gate first; LGPR only runs when GGPR did not fire.
    Combined,
    Mmd,
    ResizeDefense,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Ggpr => "ggpr",
            Mode::Lgpr => "lgpr",
            Mode::Combined => "combined",
            Mode::Mmd => "mmd",
            Mode::ResizeDefense => "resize_defense",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ggpr" => Ok(Mode::Ggpr),
            "lgpr" => Ok(Mode::Lgpr),
            "combined" | "both" => Ok(Mode::Combined),
            "mmd" => Ok(Mode::Mmd),
            "resize_defense" | "resize-defense" => Ok(Mode::ResizeDefense),
            other => Err(Error::config(format!("unknown mode {other:?}"))),
        }
    }
}

/// Multi-modal outcome plus the configuration needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefenseRecord {
    #[serde(flatten)]
    pub outcome: DefenseOutcome,
    pub p_gray: f64,
    pub p_gray_fuse: f64,
    pub p_sketch_fuse: f64,
    pub two_channel_prob: f64,
    pub sketch: SketchParams,
}

impl DefenseRecord {
    pub fn new(outcome: DefenseOutcome, cfg: &DefenseConfig) -> Self {
        Self {
            outcome,
            p_gray: cfg.p_gray,
            p_gray_fuse: cfg.p_gray_fuse,
            p_sketch_fuse: cfg.p_sketch_fuse,
            two_channel_prob: cfg.two_channel_prob,
            sketch: cfg.sketch,
        }
    }

    /// Partition probabilities as a config, for outcome-probability lookups.
    pub fn partition(&self) -> DefenseConfig {
        DefenseConfig {
            p_gray: self.p_gray,
            p_gray_fuse: self.p_gray_fuse,
            p_sketch_fuse: self.p_sketch_fuse,
            two_channel_prob: self.two_channel_prob,
            sketch: self.sketch,
            ..DefenseConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResizeRecord {
    pub down: Size,
    pub up: Size,
}

/// Everything a single image's transform decided. Stages that did not run
/// are `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TransformOutcome {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ggpr: Option<GateDraw>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lgpr: Option<LgprRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub defense: Option<DefenseRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub resize: Option<ResizeRecord>,
}

impl TransformOutcome {
    /// Single label used for per-outcome counts.
    pub fn label(&self) -> &'static str {
        if let Some(d) = &self.defense {
            return d.outcome.kind.name();
        }
        if self.resize.is_some() {
            return "resize_defense";
        }
        if self.ggpr.is_some_and(|g| g.fired) {
            return "ggpr";
        }
        match &self.lgpr {
            Some(l) if l.rect.is_some() => "lgpr",
            Some(l) if l.no_fit() => "lgpr_no_fit",
            _ => "identity",
        }
    }
}

/// One manifest line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub ordinal: u64,
    /// Source path relative to the input root.
    pub path: String,
    /// Written PNG relative to the output root; absent for skipped entries.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output: Option<String>,
    pub mode: Mode,
    /// Stream key as 16 hex digits.
    pub stream_key: String,
    #[serde(flatten)]
    pub outcome: TransformOutcome,
    /// Decode failure that caused the entry to be skipped.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl TransformRecord {
    pub fn is_skipped(&self) -> bool {
        self.error.is_some()
    }

    pub fn label(&self) -> &'static str {
        if self.is_skipped() {
            "skipped"
        } else {
            self.outcome.label()
        }
    }
}

/// Re-applies a recorded outcome to a decoded source image without drawing
/// any randomness. Single-channel sources are widened to RGB first, as the
/// pipeline does.
pub fn replay(outcome: &TransformOutcome, source: &ImageBuffer) -> Result<ImageBuffer> {
    let mut img = match source.channels() {
        1 => gray_to_rgb(source)?,
        _ => source.clone(),
    };
    if outcome.ggpr.is_some_and(|g| g.fired) {
        img = gray_to_rgb(&to_grayscale(&img)?)?;
    }
    if let Some(rect) = outcome.lgpr.and_then(|l| l.rect) {
        img = apply_gray_patch(&img, rect)?;
    }
    if let Some(d) = &outcome.defense {
        img = apply_outcome(&img, d.outcome.kind, d.outcome.channels, &d.sketch)?;
    }
    if let Some(r) = outcome.resize {
        img = resize_round_trip(&img, r.down, r.up)?;
    }
    Ok(img)
}
