use std::io::Cursor;

use image::{ColorType, ExtendedColorType, ImageEncoder};

use super::ImageBuffer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Jpeg,
}

impl ImageFormat {
    /// Maps a file extension (case-insensitive) to a supported input format.
    pub fn from_extension(ext: &str) -> Option<Self> {
        match ext.to_ascii_lowercase().as_str() {
            "png" => Some(ImageFormat::Png),
            "jpg" | "jpeg" => Some(ImageFormat::Jpeg),
            _ => None,
        }
    }
}

/// Decodes PNG or JPEG bytes.
///
/// Luma sources decode to one channel, everything else to RGB. Alpha is
/// dropped and 16-bit samples are reduced to 8 bits.
pub fn decode_image(bytes: &[u8]) -> Result<ImageBuffer> {
    let format = image::guess_format(bytes).map_err(|e| Error::Decode(e.to_string()))?;
    if !matches!(format, image::ImageFormat::Png | image::ImageFormat::Jpeg) {
        return Err(Error::Decode(format!("unsupported format {format:?}")));
    }
    let decoded = image::load_from_memory_with_format(bytes, format)
        .map_err(|e| Error::Decode(e.to_string()))?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    match decoded.color() {
        ColorType::L8 | ColorType::La8 | ColorType::L16 | ColorType::La16 => {
            ImageBuffer::new(w, h, 1, decoded.into_luma8().into_raw())
        }
        _ => ImageBuffer::new(w, h, 3, decoded.into_rgb8().into_raw()),
    }
}

/// Encodes an image. Only PNG output is supported so that written pixels
/// round-trip exactly.
pub fn encode_image(img: &ImageBuffer, format: ImageFormat) -> Result<Vec<u8>> {
    if format != ImageFormat::Png {
        return Err(Error::Encode(format!("{format:?} output is not supported")));
    }
    let color = match img.channels() {
        1 => ExtendedColorType::L8,
        _ => ExtendedColorType::Rgb8,
    };
    let mut out = Vec::new();
    image::codecs::png::PngEncoder::new(Cursor::new(&mut out))
        .write_image(img.data(), img.width() as u32, img.height() as u32, color)
        .map_err(|e| Error::Encode(e.to_string()))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_red_pixel() {
        let img = ImageBuffer::new(1, 1, 3, vec![255, 0, 0]).unwrap();
        let bytes = encode_image(&img, ImageFormat::Png).unwrap();
        assert_eq!(&bytes[..8], b"\x89PNG\r\n\x1a\n");
        assert_eq!(decode_image(&bytes).unwrap(), img);
    }

    #[test]
    fn png_round_trip_random() {
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let img = ImageBuffer::from_rgb_fn(64, 128, |_, _| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let b = state.to_le_bytes();
            [b[0], b[1], b[2]]
        })
        .unwrap();
        let back = decode_image(&encode_image(&img, ImageFormat::Png).unwrap()).unwrap();
        assert_eq!(back, img);

        let plane = crate::imagecore::to_grayscale(&img).unwrap();
        let back = decode_image(&encode_image(&plane, ImageFormat::Png).unwrap()).unwrap();
        assert_eq!(back, plane);
    }

    #[test]
    fn truncated_stream_fails() {
        let img = ImageBuffer::filled(16, 16, 3, 40).unwrap();
        let bytes = encode_image(&img, ImageFormat::Png).unwrap();
        let cut = &bytes[..bytes.len() / 2];
        assert!(matches!(decode_image(cut), Err(Error::Decode(_))));
        assert!(matches!(decode_image(&[]), Err(Error::Decode(_))));
        assert!(matches!(
            decode_image(b"not an image"),
            Err(Error::Decode(_))
        ));
    }

    #[test]
    fn jpeg_decodes_and_jpeg_output_is_refused() {
        let img = ImageBuffer::filled(8, 8, 3, 128).unwrap();
        let mut jpeg = Vec::new();
        image::codecs::jpeg::JpegEncoder::new(&mut jpeg)
            .write_image(img.data(), 8, 8, ExtendedColorType::Rgb8)
            .unwrap();
        let back = decode_image(&jpeg).unwrap();
        assert_eq!((back.width(), back.height(), back.channels()), (8, 8, 3));
        assert!(back.data().iter().all(|&v| v.abs_diff(128) <= 2));
        assert!(matches!(
            encode_image(&img, ImageFormat::Jpeg),
            Err(Error::Encode(_))
        ));
    }

    #[test]
    fn extensions() {
        assert_eq!(ImageFormat::from_extension("JPG"), Some(ImageFormat::Jpeg));
        assert_eq!(ImageFormat::from_extension("jpeg"), Some(ImageFormat::Jpeg));
        assert_eq!(ImageFormat::from_extension("png"), Some(ImageFormat::Png));
        assert_eq!(ImageFormat::from_extension("bmp"), None);
    }
}
