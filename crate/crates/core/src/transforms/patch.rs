use serde::{Deserialize, Serialize};

use super::{sample_rect, AugmentConfig, Rect};
use crate::error::{Error, Result};
use crate::imagecore::{gray_to_rgb, luma, to_grayscale, ImageBuffer};
use crate::stream::RandomStream;

/// One Bernoulli gate evaluation: fires when `u < p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateDraw {
    pub p: f64,
    pub u: f64,
    pub fired: bool,
}

impl GateDraw {
    pub fn evaluate(p: f64, u: f64) -> Self {
        Self { p, u, fired: u < p }
    }
}

/// GGPR for a given uniform draw: the whole image becomes 3-channel grayscale
/// when `u < p`, otherwise it is returned unchanged.
pub fn ggpr_gate(img: &ImageBuffer, p: f64, u: f64) -> Result<(ImageBuffer, bool)> {
    img.expect_channels(3)?;
    if u < p {
        Ok((gray_to_rgb(&to_grayscale(img)?)?, true))
    } else {
        Ok((img.clone(), false))
    }
}

/// GGPR drawing its gate from `rng`.
pub fn ggpr(
    img: &ImageBuffer,
    cfg: &AugmentConfig,
    rng: &mut RandomStream,
) -> Result<(ImageBuffer, GateDraw)> {
    let gate = GateDraw::evaluate(cfg.p_ggpr, rng.uniform());
    let (out, _) = ggpr_gate(img, gate.p, gate.u)?;
    Ok((out, gate))
}

/// Audit trail of one LGPR call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgprRecord {
    pub gate: GateDraw,
    /// Patch that was converted; `None` when the gate stayed closed or no
    /// rectangle fit within the attempt budget.
    pub rect: Option<Rect>,
    pub attempts: u32,
    /// Area and aspect draws of the final attempt, present when the gate fired.
    pub area: Option<f64>,
    pub aspect: Option<f64>,
}

impl LgprRecord {
    pub fn no_fit(&self) -> bool {
        self.gate.fired && self.rect.is_none()
    }
}

/// Replaces the pixels inside `rect` with their BT.601 luma in all three
/// channels. Pixels outside are copied untouched.
pub fn apply_gray_patch(img: &ImageBuffer, rect: Rect) -> Result<ImageBuffer> {
    img.expect_channels(3)?;
    if !rect.fits(img.width(), img.height()) {
        return Err(Error::config(format!(
            "rect {rect:?} does not fit a {}x{} image",
            img.width(),
            img.height()
        )));
    }
    let mut out = img.clone();
    for y in rect.y..rect.y + rect.h {
        for x in rect.x..rect.x + rect.w {
            let px = out.pixel_mut(x, y);
            let v = luma(px[0], px[1], px[2]);
            px.fill(v);
        }
    }
    Ok(out)
}

/// Local grayscale patch replacement.
///
/// Draws the gate first; when it fires a rectangle is sampled and converted
/// to grayscale in place. A no-fit leaves the image unchanged.
pub fn lgpr(
    img: &ImageBuffer,
    cfg: &AugmentConfig,
    rng: &mut RandomStream,
) -> Result<(ImageBuffer, LgprRecord)> {
    img.expect_channels(3)?;
    let gate = GateDraw::evaluate(cfg.p_lgpr, rng.uniform());
    if !gate.fired {
        let record = LgprRecord {
            gate,
            rect: None,
            attempts: 0,
            area: None,
            aspect: None,
        };
        return Ok((img.clone(), record));
    }

    let sample = sample_rect(img.width(), img.height(), cfg, rng);
    let record = LgprRecord {
        gate,
        rect: sample.rect,
        attempts: sample.attempts,
        area: Some(sample.area),
        aspect: Some(sample.aspect),
    };
    let out = match sample.rect {
        Some(rect) => apply_gray_patch(img, rect)?,
        None => img.clone(),
    };
    Ok((out, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::derive_stream;

    fn colorful(w: usize, h: usize) -> ImageBuffer {
        ImageBuffer::from_rgb_fn(w, h, |x, y| {
            [
                (x * 37 + y * 11) as u8,
                (x * 5 + y * 53) as u8,
                (x * y + 90) as u8,
            ]
        })
        .unwrap()
    }

    #[test]
    fn ggpr_gate_cases() {
        let img = colorful(8, 8);
        let (out, fired) = ggpr_gate(&img, 0.05, 0.5).unwrap();
        assert!(!fired);
        assert_eq!(out, img);

        let (out, fired) = ggpr_gate(&img, 0.05, 0.01).unwrap();
        assert!(fired);
        assert!(out.data().chunks(3).all(|p| p[0] == p[1] && p[1] == p[2]));
        assert_eq!(to_grayscale(&out).unwrap(), to_grayscale(&img).unwrap());

        for u in [0.0, 0.3, 0.999_999] {
            assert_eq!(ggpr_gate(&img, 0.0, u).unwrap(), (img.clone(), false));
        }
    }

    #[test]
    fn lgpr_zero_probability_is_identity() {
        let img = colorful(64, 128);
        let cfg = AugmentConfig {
            p_lgpr: 0.0,
            ..Default::default()
        };
        let mut rng = derive_stream(3, 3);
        for _ in 0..100 {
            let (out, rec) = lgpr(&img, &cfg, &mut rng).unwrap();
            assert_eq!(out, img);
            assert!(!rec.gate.fired && rec.rect.is_none());
        }
    }

    #[test]
    fn lgpr_on_gray_input_is_identity_but_records_rect() {
        let img = ImageBuffer::from_rgb_fn(64, 128, |x, y| {
            let v = (x * 3 + y) as u8;
            [v, v, v]
        })
        .unwrap();
        let cfg = AugmentConfig {
            p_lgpr: 1.0,
            ..Default::default()
        };
        let (out, rec) = lgpr(&img, &cfg, &mut derive_stream(8, 1)).unwrap();
        assert_eq!(out, img);
        assert!(rec.rect.is_some());
    }

    #[test]
    fn forced_patch_changes_interior_only() {
        let img = colorful(4, 4);
        let out = apply_gray_patch(&img, Rect::new(1, 1, 2, 2)).unwrap();
        let mut changed = 0;
        for y in 0..4 {
            for x in 0..4 {
                let (a, b) = (img.pixel(x, y), out.pixel(x, y));
                if (1..3).contains(&x) && (1..3).contains(&y) {
                    let f =
                        (299.0 * a[0] as f64 + 587.0 * a[1] as f64 + 114.0 * a[2] as f64) / 1000.0;
                    let expect = (f + 0.5).floor() as u8;
                    assert_eq!(b, &[expect; 3]);
                    changed += (a != b) as usize;
                } else {
                    assert_eq!(a, b);
                }
            }
        }
        assert_eq!(changed, 4);
    }

    #[test]
    fn patch_out_of_bounds_rejected() {
        let img = colorful(4, 4);
        assert!(apply_gray_patch(&img, Rect::new(3, 0, 2, 1)).is_err());
    }

    #[test]
    fn no_fit_keeps_input() {
        let img = colorful(64, 128);
        let cfg = AugmentConfig {
            p_lgpr: 1.0,
            area_min: 0.999,
            area_max: 0.999,
            aspect_min: 1.0,
            aspect_max: 1.0,
            max_attempts: 10,
            ..Default::default()
        };
        let (out, rec) = lgpr(&img, &cfg, &mut derive_stream(0, 0)).unwrap();
        assert_eq!(out, img);
        assert!(rec.no_fit());
        assert_eq!(rec.attempts, 10);
    }

    #[test]
    fn rejects_single_channel() {
        let plane = ImageBuffer::filled(4, 4, 1, 0).unwrap();
        assert!(lgpr(&plane, &AugmentConfig::default(), &mut derive_stream(0, 0)).is_err());
        assert!(ggpr_gate(&plane, 1.0, 0.0).is_err());
    }
}
