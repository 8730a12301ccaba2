//! Multi-modal defense partition (training time) and the resize defense
//! (inference time).
//!
//! A single uniform draw `u` splits inputs four ways:
//!
//! | draw                               | outcome                    |
//! |------------------------------------|----------------------------|
//! | `u < p_sketch_fuse`                | sketch fused into 1-2 channels |
//! | `< p_sketch_fuse + p_gray_fuse`    | luma fused into 1-2 channels   |
//! | `< p_sketch_fuse + p_gray_fuse + p_gray` | whole image to grayscale |
//! | otherwise                          | unchanged                  |
//!
//! With the defaults (0.10 / 0.05 / 0.05) that is 10% pure gray, 5% gray
//! fusion, 5% sketch fusion and 80% pass-through.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagecore::{gray_to_rgb, resize_bilinear, to_grayscale, ImageBuffer};
use crate::stream::RandomStream;
use crate::transforms::{check_probability, fuse_channels, sketch, ChannelSet, SketchParams};

/// Image size in pixels, written `WxH`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Size {
    pub width: usize,
    pub height: usize,
}

impl Size {
    pub const fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

impl FromStr for Size {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::config(format!(
                "geometry must be WxH with positive integers, got {s:?}"
            ))
        };
        let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let width: usize = w.trim().parse().map_err(|_| bad())?;
        let height: usize = h.trim().parse().map_err(|_| bad())?;
        if width == 0 || height == 0 {
            return Err(bad());
        }
        Ok(Size { width, height })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DefenseConfig {
    /// Share of images converted entirely to grayscale.
    pub p_gray: f64,
    /// Share of images with 1-2 channels overwritten by their luma.
    pub p_gray_fuse: f64,
    /// Share of images with 1-2 channels overwritten by their sketch.
    pub p_sketch_fuse: f64,
    /// Probability that a fusion overwrites two channels instead of one.
    pub two_channel_prob: f64,
    pub sketch: SketchParams,
    /// Intermediate size of the resize defense.
    pub down: Size,
    /// Final size of the resize defense (the model input size).
    pub up: Size,
}

impl Default for DefenseConfig {
    fn default() -> Self {
        Self {
            p_gray: 0.10,
            p_gray_fuse: 0.05,
            p_sketch_fuse: 0.05,
            two_channel_prob: 0.5,
            sketch: SketchParams::default(),
            down: Size::new(110, 50),
            up: Size::new(384, 128),
        }
    }
}

impl DefenseConfig {
    pub fn validate(&self) -> Result<()> {
        check_probability("p_gray", self.p_gray)?;
        check_probability("p_gray_fuse", self.p_gray_fuse)?;
        check_probability("p_sketch_fuse", self.p_sketch_fuse)?;
        check_probability("two_channel_prob", self.two_channel_prob)?;
        let total = self.p_gray + self.p_gray_fuse + self.p_sketch_fuse;
        if total > 1.0 + 1e-12 {
            return Err(Error::config(format!(
                "p_gray + p_gray_fuse + p_sketch_fuse must not exceed 1, got {total}"
            )));
        }
        self.sketch.validate()?;
        if self.down.width >= self.up.width || self.down.height >= self.up.height {
            return Err(Error::config(format!(
                "resize defense must downscale: down {} is not smaller than up {}",
                self.down, self.up
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefenseKind {
    PassThrough,
    PureGray,
    GrayFuse,
    SketchFuse,
}

impl DefenseKind {
    pub const ALL: [DefenseKind; 4] = [
        DefenseKind::PassThrough,
        DefenseKind::PureGray,
        DefenseKind::GrayFuse,
        DefenseKind::SketchFuse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DefenseKind::PassThrough => "pass_through",
            DefenseKind::PureGray => "pure_gray",
            DefenseKind::GrayFuse => "gray_fuse",
            DefenseKind::SketchFuse => "sketch_fuse",
        }
    }

    /// Configured probability mass of this outcome.
    pub fn probability(self, cfg: &DefenseConfig) -> f64 {
        match self {
            DefenseKind::PassThrough => 1.0 - (cfg.p_gray + cfg.p_gray_fuse + cfg.p_sketch_fuse),
            DefenseKind::PureGray => cfg.p_gray,
            DefenseKind::GrayFuse => cfg.p_gray_fuse,
            DefenseKind::SketchFuse => cfg.p_sketch_fuse,
        }
    }

    pub fn is_fusion(self) -> bool {
        matches!(self, DefenseKind::GrayFuse | DefenseKind::SketchFuse)
    }
}

/// What [`mmd_apply`] did to one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefenseOutcome {
    pub kind: DefenseKind,
    /// Overwritten channels; present exactly for the fusion kinds.
    pub channels: Option<ChannelSet>,
    /// Uniform draws consumed: partition, then (for fusions) subset size and
    /// subset pick.
    pub draws: Vec<f64>,
}

/// Maps a uniform draw to its partition cell.
pub fn mmd_classify(u: f64, cfg: &DefenseConfig) -> DefenseKind {
    let sketch_end = cfg.p_sketch_fuse;
    let fuse_end = sketch_end + cfg.p_gray_fuse;
    let gray_end = fuse_end + cfg.p_gray;
    if u < sketch_end {
        DefenseKind::SketchFuse
    } else if u < fuse_end {
        DefenseKind::GrayFuse
    } else if u < gray_end {
        DefenseKind::PureGray
    } else {
        DefenseKind::PassThrough
    }
}

/// Picks the fusion subset: two channels when `u_size < two_channel_prob`,
/// otherwise one; `u_pick` then selects uniformly among the three subsets
/// of that size.
pub fn pick_channels(u_size: f64, u_pick: f64, two_channel_prob: f64) -> ChannelSet {
    let size = if u_size < two_channel_prob { 2 } else { 1 };
    let options = ChannelSet::of_size(size);
    let idx = ((u_pick * options.len() as f64) as usize).min(options.len() - 1);
    options[idx]
}

/// Applies a known outcome. Used both by [`mmd_apply`] and by manifest replay.
pub fn apply_outcome(
    img: &ImageBuffer,
    kind: DefenseKind,
    channels: Option<ChannelSet>,
    sketch_params: &SketchParams,
) -> Result<ImageBuffer> {
    img.expect_channels(3)?;
    let fused_channels = || channels.ok_or(Error::InvalidChannelSubset(0));
    match kind {
        DefenseKind::PassThrough => Ok(img.clone()),
        DefenseKind::PureGray => gray_to_rgb(&to_grayscale(img)?),
        DefenseKind::GrayFuse => fuse_channels(img, &to_grayscale(img)?, fused_channels()?),
        DefenseKind::SketchFuse => {
            fuse_channels(img, &sketch(img, sketch_params)?, fused_channels()?)
        }
    }
}

/// Training-time multi-modal transform of one RGB image.
pub fn mmd_apply(
    img: &ImageBuffer,
    cfg: &DefenseConfig,
    rng: &mut RandomStream,
) -> Result<(ImageBuffer, DefenseOutcome)> {
    img.expect_channels(3)?;
    let u = rng.uniform();
    let kind = mmd_classify(u, cfg);
    let mut draws = vec![u];
    let channels = if kind.is_fusion() {
        let (u_size, u_pick) = (rng.uniform(), rng.uniform());
        draws.extend([u_size, u_pick]);
        Some(pick_channels(u_size, u_pick, cfg.two_channel_prob))
    } else {
        None
    };
    let out = apply_outcome(img, kind, channels, &cfg.sketch)?;
    Ok((
        out,
        DefenseOutcome {
            kind,
            channels,
            draws,
        },
    ))
}

/// Inference-time resize defense with the geometry from `cfg`.
pub fn resize_defense(img: &ImageBuffer, cfg: &DefenseConfig) -> Result<ImageBuffer> {
    resize_round_trip(img, cfg.down, cfg.up)
}

/// Downscales to `down` then upscales to `up`, both bilinearly.
pub fn resize_round_trip(img: &ImageBuffer, down: Size, up: Size) -> Result<ImageBuffer> {
    let small = resize_bilinear(img, down.width, down.height)?;
    resize_bilinear(&small, up.width, up.height)
}
