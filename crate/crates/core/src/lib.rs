//! Polar codes decoded by belief propagation on permuted factor graphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`crc`] and [`code`]: CRC handling, Bhattacharyya construction and the
//!   natural-order polar transform.
//! - [`trellis`]: the factor-graph wiring as a [`trellis::StrideSchedule`],
//!   full and partial stage permutations, and modified-node accounting.
//! - [`engine`]: LLR message passing over a schedule.
//! - [`decoders`]: standard BP, fully permuted multi-trellis BP, partially
//!   permuted multi-trellis BP, noise-aided BP, and an SC reference decoder.
//! - [`sim`]: QPSK/AWGN channel, trial execution, error classification and
//!   sweep statistics.
//! - [`config`] and [`selftest`]: the pieces behind the `polar-bp` binary.

pub mod code;
pub mod config;
pub mod crc;
pub mod decoders;
pub mod engine;
mod error;
pub mod selftest;
pub mod sim;
pub mod trellis;

pub use code::CodeSpec;
pub use crc::CrcConfig;
pub use decoders::{DecodeOutcome, Decoder, DecoderParams, Variant};
pub use engine::{BoxplusMode, MessageState};
pub use error::{Error, Result};
pub use trellis::{PermutationEvent, StrideSchedule};

/// Hard bits are stored one per byte, 0 or 1.
pub type Bits = Vec<u8>;
