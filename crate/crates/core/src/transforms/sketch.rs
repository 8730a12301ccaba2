use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagecore::{gaussian_blur, to_grayscale, ImageBuffer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SketchOperator {
    /// Color-dodge of the luma plane by its blurred inverse (pencil sketch).
    Dodge,
    /// Inverted Sobel gradient magnitude of the luma plane.
    Sobel,
}

impl std::str::FromStr for SketchOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dodge" => Ok(SketchOperator::Dodge),
            "sobel" => Ok(SketchOperator::Sobel),
            other => Err(Error::config(format!("unknown sketch operator {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SketchParams {
    pub operator: SketchOperator,
    /// Blur width of the dodge operator, in pixels.
    pub sigma: f64,
}

impl Default for SketchParams {
    fn default() -> Self {
        Self {
            operator: SketchOperator::Dodge,
            sigma: 3.0,
        }
    }
}

impl SketchParams {
    pub fn validate(&self) -> Result<()> {
        if self.sigma > 0.0 && self.sigma.is_finite() {
            Ok(())
        } else {
            Err(Error::config(format!(
                "sketch sigma must be positive, got {}",
                self.sigma
            )))
        }
    }
}

/// Renders a single-channel sketch of an RGB image.
pub fn sketch(img: &ImageBuffer, params: &SketchParams) -> Result<ImageBuffer> {
    img.expect_channels(3)?;
    params.validate()?;
    let gray = to_grayscale(img)?;
    match params.operator {
        SketchOperator::Dodge => dodge(&gray, params.sigma),
        SketchOperator::Sobel => sobel_inverse(&gray),
    }
}

fn dodge(gray: &ImageBuffer, sigma: f64) -> Result<ImageBuffer> {
    let inverted = ImageBuffer::new(
        gray.width(),
        gray.height(),
        1,
        gray.data().iter().map(|&v| 255 - v).collect(),
    )?;
    let blurred = gaussian_blur(&inverted, sigma)?;
    let data = gray
        .data()
        .iter()
        .zip(blurred.data())
        .map(|(&g, &b)| {
            if b == 255 {
                255
            } else {
                (g as u32 * 255 / (255 - b as u32)).min(255) as u8
            }
        })
        .collect();
    ImageBuffer::new(gray.width(), gray.height(), 1, data)
}

fn sobel_inverse(gray: &ImageBuffer) -> Result<ImageBuffer> {
    let (w, h) = (gray.width() as isize, gray.height() as isize);
    let at = |x: isize, y: isize| {
        gray.pixel(x.clamp(0, w - 1) as usize, y.clamp(0, h - 1) as usize)[0] as i32
    };
    let mut data = Vec::with_capacity(gray.area());
    for y in 0..h {
        for x in 0..w {
            let gx = at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1)
                - at(x - 1, y - 1)
                - 2 * at(x - 1, y)
                - at(x - 1, y + 1);
            let gy = at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1)
                - at(x - 1, y - 1)
                - 2 * at(x, y - 1)
                - at(x + 1, y - 1);
            let mag = ((gx * gx + gy * gy) as f64).sqrt().round().min(255.0) as u8;
            data.push(255 - mag);
        }
    }
    ImageBuffer::new(gray.width(), gray.height(), 1, data)
}
