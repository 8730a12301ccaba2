//! Deterministic batch processing over a directory tree.
//!
//! Every entry gets its own stream, `derive_stream(master_seed, ordinal)`,
//! so outputs do not depend on scheduling or worker count. Records are
//! emitted in ordinal order as one JSON object per line.

mod batch;
mod dataset;
mod manifest;
mod record;
mod stats;

pub use batch::{output_path, process_batch, process_image, BatchOptions};
pub use dataset::{parse_reid_name, walk_dataset, DatasetEntry, DatasetWalk, WalkFailure};
pub use manifest::{read_manifest, write_manifest};
pub use record::{replay, DefenseRecord, Mode, ResizeRecord, TransformOutcome, TransformRecord};
pub use stats::{compute_stats, BinomialCheck, RunStats};
