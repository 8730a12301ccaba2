//! Training-time stochastic transforms: global grayscale (GGPR), local
//! grayscale patch replacement (LGPR), sketch rendering and channel fusion.

mod fuse;
mod patch;
mod rect;
mod sketch;

pub use fuse::{fuse_channels, Channel, ChannelSet};
pub use patch::{apply_gray_patch, ggpr, ggpr_gate, lgpr, GateDraw, LgprRecord};
pub use rect::{rect_dims, sample_rect, Rect, RectSample};
pub use sketch::{sketch, SketchOperator, SketchParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gate probabilities and rectangle-sampling ranges for GGPR/LGPR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    /// Probability that LGPR fires on an image.
    pub p_lgpr: f64,
    /// Probability that GGPR converts a whole image to grayscale.
    pub p_ggpr: f64,
    /// Lower bound of the patch-area / image-area ratio.
    pub area_min: f64,
    /// Upper bound of the patch-area / image-area ratio.
    pub area_max: f64,
    /// Lower bound of the patch aspect ratio (height / width).
    pub aspect_min: f64,
    /// Upper bound of the patch aspect ratio.
    pub aspect_max: f64,
    /// Rectangle draws before giving up with a no-fit.
    pub max_attempts: u32,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            p_lgpr: 0.4,
            p_ggpr: 0.05,
            area_min: 0.02,
            area_max: 0.4,
            aspect_min: 0.3,
            aspect_max: 3.33,
            max_attempts: 100,
        }
    }
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::config(format!("{name} must lie in [0, 1], got {p}")))
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        check_probability("p_lgpr", self.p_lgpr)?;
        check_probability("p_ggpr", self.p_ggpr)?;
        if !(self.area_min > 0.0 && self.area_min <= self.area_max && self.area_max <= 1.0) {
            return Err(Error::config(format!(
                "area range must satisfy 0 < min <= max <= 1, got [{}, {}]",
                self.area_min, self.area_max
            )));
        }
        if !(self.aspect_min > 0.0
            && self.aspect_min <= self.aspect_max
            && self.aspect_max.is_finite())
        {
            return Err(Error::config(format!(
                "aspect range must satisfy 0 < min <= max, got [{}, {}]",
                self.aspect_min, self.aspect_max
            )));
        }
        if self.max_attempts == 0 {
            return Err(Error::config("max_attempts must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        AugmentConfig::default().validate().unwrap();
    }

    #[test]
    fn invalid_configs() {
        let base = AugmentConfig::default();
        let bad = [
            AugmentConfig {
                p_lgpr: 1.5,
                ..base
            },
            AugmentConfig {
                p_ggpr: -0.1,
                ..base
            },
            AugmentConfig {
                p_ggpr: f64::NAN,
                ..base
            },
            AugmentConfig {
                area_min: 0.0,
                ..base
            },
            AugmentConfig {
                area_min: 0.5,
                area_max: 0.4,
                ..base
            },
            AugmentConfig {
                area_max: 1.2,
                ..base
            },
            AugmentConfig {
                aspect_min: 0.0,
                ..base
            },
            AugmentConfig {
                aspect_min: 4.0,
                ..base
            },
            AugmentConfig {
                max_attempts: 0,
                ..base
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg: AugmentConfig = serde_json::from_str(r#"{"p_lgpr": 0.7}"#).unwrap();
        assert_eq!(
            cfg,
            AugmentConfig {
                p_lgpr: 0.7,
                ..Default::default()
            }
        );
        assert!(serde_json::from_str::<AugmentConfig>(r#"{"p_l": 0.7}"#).is_err());
    }
}
