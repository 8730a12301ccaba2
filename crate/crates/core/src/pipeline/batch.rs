use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;

use super::dataset::DatasetEntry;
use super::record::{DefenseRecord, Mode, ResizeRecord, TransformOutcome, TransformRecord};
use crate::defense::{mmd_apply, resize_defense, DefenseConfig};
use crate::error::{Error, Result};
use crate::imagecore::{decode_image, encode_image, gray_to_rgb, ImageBuffer, ImageFormat};
use crate::stream::{derive_stream, RandomStream};
use crate::transforms::{ggpr, lgpr, AugmentConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchOptions {
    pub mode: Mode,
    pub augment: AugmentConfig,
    pub defense: DefenseConfig,
    pub master_seed: u64,
    pub workers: usize,
}

impl BatchOptions {
    pub fn new(mode: Mode, master_seed: u64) -> Self {
        Self {
            mode,
            augment: AugmentConfig::default(),
            defense: DefenseConfig::default(),
            master_seed,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::config("workers must be at least 1"));
        }
        match self.mode {
            Mode::Ggpr | Mode::Lgpr | Mode::Combined => self.augment.validate(),
            Mode::Mmd | Mode::ResizeDefense => self.defense.validate(),
        }
    }
}

fn apply_mode(
    img: &ImageBuffer,
    opts: &BatchOptions,
    rng: &mut RandomStream,
) -> Result<(ImageBuffer, TransformOutcome)> {
    let mut outcome = TransformOutcome::default();
    let out = match opts.mode {
        Mode::Ggpr => {
            let (out, gate) = ggpr(img, &opts.augment, rng)?;
            outcome.ggpr = Some(gate);
            out
        }
        Mode::Lgpr => {
            let (out, rec) = lgpr(img, &opts.augment, rng)?;
            outcome.lgpr = Some(rec);
            out
        }
        Mode::Combined => {
            let (out, gate) = ggpr(img, &opts.augment, rng)?;
            outcome.ggpr = Some(gate);
            if gate.fired {
                out
            } else {
                let (out, rec) = lgpr(&out, &opts.augment, rng)?;
                outcome.lgpr = Some(rec);
                out
            }
        }
        Mode::Mmd => {
            let (out, o) = mmd_apply(img, &opts.defense, rng)?;
            outcome.defense = Some(DefenseRecord::new(o, &opts.defense));
            out
        }
        Mode::ResizeDefense => {
            outcome.resize = Some(ResizeRecord {
                down: opts.defense.down,
                up: opts.defense.up,
            });
            resize_defense(img, &opts.defense)?
        }
    };
    Ok((out, outcome))
}

/// Transforms one in-memory image as entry `ordinal` of a run.
///
/// Single-channel inputs are widened to RGB. The returned record has no
/// `output` path; [`process_batch`] fills it in.
pub fn process_image(
    ordinal: u64,
    path: &str,
    img: &ImageBuffer,
    opts: &BatchOptions,
) -> Result<(ImageBuffer, TransformRecord)> {
    let rgb = match img.channels() {
        1 => gray_to_rgb(img)?,
        _ => img.clone(),
    };
    let mut rng = derive_stream(opts.master_seed, ordinal);
    let (out, outcome) = apply_mode(&rgb, opts, &mut rng)?;
    let record = TransformRecord {
        ordinal,
        path: path.to_string(),
        output: None,
        mode: opts.mode,
        stream_key: format!("{:016x}", rng.key()),
        outcome,
        error: None,
    };
    Ok((out, record))
}

/// Output location for an input path: same relative directory, `.png`
/// extension.
pub fn output_path(relative: &str) -> String {
    let (dir, name) = match relative.rsplit_once('/') {
        Some((dir, name)) => (Some(dir), name),
        None => (None, relative),
    };
    let stem = match name.rsplit_once('.') {
        Some((stem, _)) if !stem.is_empty() => stem,
        _ => name,
    };
    match dir {
        Some(dir) => format!("{dir}/{stem}.png"),
        None => format!("{stem}.png"),
    }
}

fn process_entry(
    entry: &DatasetEntry,
    input_root: &Path,
    output_root: &Path,
    opts: &BatchOptions,
) -> Result<TransformRecord> {
    let skipped = |message: String| TransformRecord {
        ordinal: entry.ordinal,
        path: entry.path.clone(),
        output: None,
        mode: opts.mode,
        stream_key: format!(
            "{:016x}",
            derive_stream(opts.master_seed, entry.ordinal).key()
        ),
        outcome: TransformOutcome::default(),
        error: Some(message),
    };

    let source = input_root.join(&entry.path);
    let img = match std::fs::read(&source) {
        Ok(bytes) => match decode_image(&bytes) {
            Ok(img) => img,
            Err(e) => return Ok(skipped(e.to_string())),
        },
        Err(e) => return Ok(skipped(format!("read failed: {e}"))),
    };

    let (out, mut record) = process_image(entry.ordinal, &entry.path, &img, opts)?;
    let rel = output_path(&entry.path);
    let target = output_root.join(&rel);
    if let Some(parent) = target.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let bytes = encode_image(&out, ImageFormat::Png)?;
    std::fs::write(&target, bytes).map_err(|e| Error::io(&target, e))?;
    record.output = Some(rel);
    Ok(record)
}

/// Processes every entry on `opts.workers` threads and returns the records
/// in ordinal order.
///
/// Unreadable or undecodable inputs become skipped records. Any failure to
/// write an output aborts the run.
pub fn process_batch(
    entries: &[DatasetEntry],
    input_root: &Path,
    output_root: &Path,
    opts: &BatchOptions,
) -> Result<Vec<TransformRecord>> {
    opts.validate()?;

    let mut owners: HashMap<String, &str> = HashMap::with_capacity(entries.len());
    for entry in entries {
        if let Some(previous) = owners.insert(output_path(&entry.path), &entry.path) {
            return Err(Error::config(format!(
                "{} and {} would both be written to {}",
                previous,
                entry.path,
                output_path(&entry.path)
            )));
        }
    }

    std::fs::create_dir_all(output_root).map_err(|e| Error::io(output_root, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))?;

    let mut records = pool.install(|| {
        entries
            .par_iter()
            .map(|entry| process_entry(entry, input_root, output_root, opts))
            .collect::<Result<Vec<_>>>()
    })?;
    records.sort_by_key(|r| r.ordinal);
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_paths() {
        assert_eq!(output_path("a/b.jpg"), "a/b.png");
        assert_eq!(output_path("x.png"), "x.png");
        assert_eq!(output_path("dir.v2/file"), "dir.v2/file.png");
        assert_eq!(
            output_path("0001_c1s1_000151_01.jpeg"),
            "0001_c1s1_000151_01.png"
        );
    }

    #[test]
    fn process_image_is_deterministic() {
        let img =
            ImageBuffer::from_rgb_fn(16, 32, |x, y| [(x * 9) as u8, (y * 5) as u8, 60]).unwrap();
        let mut opts = BatchOptions::new(Mode::Combined, 99);
        opts.augment.p_lgpr = 1.0;
        let a = process_image(4, "p.png", &img, &opts).unwrap();
        let b = process_image(4, "p.png", &img, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.1.stream_key,
            format!("{:016x}", crate::stream::stream_key(99, 4))
        );
    }

    #[test]
    fn gray_input_is_widened() {
        let plane = ImageBuffer::filled(8, 8, 1, 33).unwrap();
        let opts = BatchOptions::new(Mode::Ggpr, 0);
        let (out, _) = process_image(0, "g.png", &plane, &opts).unwrap();
        assert_eq!(out.channels(), 3);
        assert!(out.data().iter().all(|&v| v == 33));
    }

    #[test]
    fn invalid_options_rejected() {
        let mut opts = BatchOptions::new(Mode::Lgpr, 0);
        opts.workers = 0;
        assert!(opts.validate().is_err());
        opts.workers = 2;
        opts.augment.p_lgpr = 2.0;
        assert!(opts.validate().is_err());
    }
}
