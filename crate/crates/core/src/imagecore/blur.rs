use super::ImageBuffer;
use crate::error::{Error, Result};

/// Normalized 1-D Gaussian weights over `[-r, r]` with `r = ceil(3 * sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Result<Vec<f64>> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidSigma(sigma));
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let denom = 2.0 * sigma * sigma;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / denom).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Separable Gaussian blur of a single plane with clamp-to-border edges.
///
/// Both passes run in `f64`; rounding happens once, at the end.
pub fn gaussian_blur(img: &ImageBuffer, sigma: f64) -> Result<ImageBuffer> {
    let data = blur_plane(img, sigma)?
        .into_iter()
        .map(|v| (v + 0.5).floor().clamp(0.0, 255.0) as u8)
        .collect();
    ImageBuffer::new(img.width(), img.height(), 1, data)
}

/// Unquantized blur output, row-major.
pub(crate) fn blur_plane(img: &ImageBuffer, sigma: f64) -> Result<Vec<f64>> {
    img.expect_channels(1)?;
    let kernel = gaussian_kernel(sigma)?;
    let radius = (kernel.len() / 2) as isize;
    let (w, h) = (img.width(), img.height());
    let src = img.data();
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;

    let mut horizontal = vec![0.0f64; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            horizontal[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, wt)| wt * row[clamp(x as isize + k as isize - radius, w)] as f64)
                .sum();
        }
    }

    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let v: f64 = kernel
                .iter()
                .enumerate()
                .map(|(k, wt)| wt * horizontal[clamp(y as isize + k as isize - radius, h) * w + x])
                .sum();
            data.push(v);
        }
    }
    Ok(data)
}
