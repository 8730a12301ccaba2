//! Deterministic grayscale-patch augmentation and multi-modal input defense
//! for person re-identification images.
//!
//! The crate is organised bottom-up:
//!
//! - [`imagecore`] - 8-bit raster type, luma conversion, bilinear resize,
//!   Gaussian blur and PNG/JPEG codecs.
//! - [`transforms`] - global and local grayscale patch replacement, sketch
//!   rendering and channel fusion.
//! - [`defense`] - the multi-modal training partition and the inference-time
//!   resize defense.
//! - [`stream`] - reproducible per-image random streams.
//! - [`pipeline`] - dataset walking, parallel batch processing, manifests and
//!   run statistics.
//! - [`cli`] - the `grayaug` command line front end.
//!
//! Every stochastic operation takes an explicit [`stream::RandomStream`], so
//! a `(master_seed, ordinal)` pair fully determines an image's output.

pub mod cli;
pub mod defense;
pub mod error;
pub mod imagecore;
pub mod pipeline;
pub mod stream;
pub mod transforms;

pub use error::{Error, Result};
pub use imagecore::ImageBuffer;
pub use stream::{derive_stream, RandomStream};
