use super::ImageBuffer;
use crate::error::Result;

/// BT.601 luma of one RGB sample, rounded half-up.
///
/// Computed in fixed point (weights scaled by 1000) so the rounding is exact.
#[inline]
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    let sum = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((sum + 500) / 1000).min(255) as u8
}

/// Converts a 3-channel RGB image to a single BT.601 luma plane.
pub fn to_grayscale(img: &ImageBuffer) -> Result<ImageBuffer> {
    img.expect_channels(3)?;
    let data = img
        .data()
        .chunks_exact(3)
        .map(|p| luma(p[0], p[1], p[2]))
        .collect();
    ImageBuffer::new(img.width(), img.height(), 1, data)
}

/// Replicates a single plane into R, G and B.
pub fn gray_to_rgb(img: &ImageBuffer) -> Result<ImageBuffer> {
    img.expect_channels(1)?;
    let data = img.data().iter().flat_map(|&v| [v, v, v]).collect();
    ImageBuffer::new(img.width(), img.height(), 3, data)
}
