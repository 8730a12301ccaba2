use serde::{Deserialize, Serialize};

use super::AugmentConfig;
use crate::stream::RandomStream;

/// Axis-aligned patch, top-left corner plus size, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    /// True when the rect is non-empty and lies inside a `width x height` image.
    pub fn fits(&self, width: usize, height: usize) -> bool {
        self.w >= 1 && self.h >= 1 && self.x + self.w <= width && self.y + self.h <= height
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }
}

/// Patch `(width, height)` for a target area and aspect ratio:
/// `h = round(sqrt(area * aspect))`, `w = round(sqrt(area / aspect))`.
pub fn rect_dims(area: f64, aspect: f64) -> (usize, usize) {
    let h = (area * aspect).sqrt().round();
    let w = (area / aspect).sqrt().round();
    (w as usize, h as usize)
}

/// Result of a rectangle search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectSample {
    /// Accepted rectangle, `None` on no-fit.
    pub rect: Option<Rect>,
    /// Attempts consumed, including the accepted one.
    pub attempts: u32,
    /// Area draw `S_e` of the last attempt, in pixels.
    pub area: f64,
    /// Aspect draw of the last attempt.
    pub aspect: f64,
}

/// Rejection-samples a patch inside a `width x height` image.
///
/// Each attempt draws, in order: target area `U(area_min, area_max) * W * H`,
/// aspect `U(aspect_min, aspect_max)`, then the corner `x in [0, W)` and
/// `y in [0, H)`. The first rect that is non-empty and fits is accepted.
pub fn sample_rect(
    width: usize,
    height: usize,
    cfg: &AugmentConfig,
    rng: &mut RandomStream,
) -> RectSample {
    let total = (width * height) as f64;
    let mut last = RectSample {
        rect: None,
        attempts: 0,
        area: 0.0,
        aspect: 0.0,
    };
    for attempt in 1..=cfg.max_attempts {
        let area = rng.uniform_range(cfg.area_min, cfg.area_max) * total;
        let aspect = rng.uniform_range(cfg.aspect_min, cfg.aspect_max);
        let (w, h) = rect_dims(area, aspect);
        let x = rng.below(width as u64) as usize;
        let y = rng.below(height as u64) as usize;
        let rect = Rect::new(x, y, w, h);
        last = RectSample {
            rect: None,
            attempts: attempt,
            area,
            aspect,
        };
        if rect.fits(width, height) {
            last.rect = Some(rect);
            break;
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::derive_stream;

    #[test]
    fn dims_examples() {
        assert_eq!(rect_dims(1024.0, 1.0), (32, 32));
        assert_eq!(rect_dims(1024.0, 4.0), (16, 64));
    }

    #[test]
    fn oversized_area_never_fits() {
        // 0.999 * 64 * 128 = 8183.8 -> 90x90 sides; no placement of a 90-wide
        // patch fits a 64-wide image, so the acceptance probability is 0.
        let cfg = AugmentConfig {
            area_min: 0.999,
            area_max: 0.999,
            aspect_min: 1.0,
            aspect_max: 1.0,
            ..Default::default()
        };
        let (w, h) = rect_dims(0.999 * 64.0 * 128.0, 1.0);
        let fitting: usize = (0..64)
            .flat_map(|x| (0..128).map(move |y| (x, y)))
            .filter(|&(x, y)| Rect::new(x, y, w, h).fits(64, 128))
            .count();
        assert_eq!(fitting, 0);

        for ordinal in 0..50 {
            let s = sample_rect(64, 128, &cfg, &mut derive_stream(1, ordinal));
            assert_eq!(s.rect, None);
            assert_eq!(s.attempts, 100);
        }
    }

    #[test]
    fn accepted_rects_fit() {
        let cfg = AugmentConfig::default();
        let mut rng = derive_stream(17, 0);
        for _ in 0..2000 {
            let s = sample_rect(64, 128, &cfg, &mut rng);
            let r = s.rect.expect("defaults fit easily");
            assert!(r.fits(64, 128));
            assert_eq!(rect_dims(s.area, s.aspect), (r.w, r.h));
        }
    }

    #[test]
    fn one_pixel_image() {
        let cfg = AugmentConfig {
            area_min: 1.0,
            area_max: 1.0,
            aspect_min: 1.0,
            aspect_max: 1.0,
            ..Default::default()
        };
        let s = sample_rect(1, 1, &cfg, &mut derive_stream(0, 0));
        assert_eq!(s.rect, Some(Rect::new(0, 0, 1, 1)));
        assert_eq!(s.attempts, 1);
    }

    #[test]
    fn rect_predicates() {
        let r = Rect::new(1, 1, 2, 2);
        assert!(r.fits(4, 4) && !r.fits(2, 4));
        assert!(!Rect::new(0, 0, 0, 1).fits(4, 4));
        assert!(r.contains(2, 2) && !r.contains(3, 1));
        assert_eq!(r.area(), 4);
    }
}
