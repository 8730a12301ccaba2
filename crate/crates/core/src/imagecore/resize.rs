use super::ImageBuffer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Tap {
    lo: usize,
    hi: usize,
    frac: f64,
}

/// Source taps for each output coordinate under half-pixel-center mapping,
/// `src = (dst + 0.5) * in / out - 0.5`, clamped to the valid sample range.
fn taps(input: usize, output: usize) -> Vec<Tap> {
    let scale = input as f64 / output as f64;
    let max = (input - 1) as f64;
    (0..output)
        .map(|d| {
            let src = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, max);
            let lo = src.floor() as usize;
            Tap {
                lo,
                hi: (lo + 1).min(input - 1),
                frac: src - lo as f64,
            }
        })
        .collect()
}

/// Bilinear resize with half-pixel centers. Same-size requests return a copy.
pub fn resize_bilinear(img: &ImageBuffer, out_w: usize, out_h: usize) -> Result<ImageBuffer> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidDimensions {
            width: out_w,
            height: out_h,
        });
    }
    if out_w == img.width() && out_h == img.height() {
        return Ok(img.clone());
    }

    let c = img.channels() as usize;
    let in_w = img.width();
    let src = img.data();
    let xs = taps(in_w, out_w);
    let ys = taps(img.height(), out_h);

    let mut data = Vec::with_capacity(out_w * out_h * c);
    for ty in &ys {
        let row0 = ty.lo * in_w;
        let row1 = ty.hi * in_w;
        for tx in &xs {
            for ch in 0..c {
                let at = |row: usize, col: usize| src[(row + col) * c + ch] as f64;
                let top = at(row0, tx.lo) * (1.0 - tx.frac) + at(row0, tx.hi) * tx.frac;
                let bottom = at(row1, tx.lo) * (1.0 - tx.frac) + at(row1, tx.hi) * tx.frac;
                let v = top * (1.0 - ty.frac) + bottom * ty.frac;
                data.push((v + 0.5).floor().clamp(0.0, 255.0) as u8);
            }
        }
    }
    ImageBuffer::new(out_w, out_h, img.channels(), data)
}
