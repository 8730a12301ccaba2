use std::io::{BufRead, Write};

use super::record::TransformRecord;
use crate::error::{Error, Result};

/// Writes one JSON object per record, one per line, in the given order.
pub fn write_manifest<W: Write>(records: &[TransformRecord], mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::io("<manifest>", e);
    for record in records {
        serde_json::to_writer(&mut out, record).map_err(|e| Error::Manifest {
            line: record.ordinal as usize + 1,
            message: e.to_string(),
        })?;
        out.write_all(b"\n").map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Parses a manifest; blank lines are ignored. Errors name the 1-based line.
pub fn read_manifest<R: BufRead>(input: R) -> Result<Vec<TransformRecord>> {
    let mut records = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Manifest {
            line: idx + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::Manifest {
            line: idx + 1,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}
