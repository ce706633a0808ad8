//! Failure taxonomy from the tail of the hard-decision trace.

use crate::{Error, Result};

/// Trailing iterations inspected.
pub const WINDOW: usize = 16;
/// Longest oscillation period detected.
pub const MAX_PERIOD: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorClass {
    None,
    FalseConverged,
    Oscillation,
    Unconverged,
}

/// Classifies an erroneous frame. A frame whose decision passed the CRC, or
/// whose last [`WINDOW`] decisions are identical, converged to a wrong word;
/// a tail that repeats with period `2..=MAX_PERIOD` oscillates; anything
/// else is unconverged.
pub fn classify_error(trace: &[u64], stopped_early: bool, crc_pass_final: bool) -> Result<ErrorClass> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    if stopped_early || crc_pass_final {
        return Ok(ErrorClass::FalseConverged);
    }
    let tail = &trace[trace.len().saturating_sub(WINDOW)..];
    if tail.iter().all(|&d| d == tail[0]) {
        return Ok(ErrorClass::FalseConverged);
    }
    let periodic = (2..=MAX_PERIOD)
        .filter(|&p| tail.len() >= 2 * p)
        .any(|p| tail.iter().zip(&tail[p..]).all(|(a, b)| a == b));
    Ok(if periodic { ErrorClass::Oscillation } else { ErrorClass::Unconverged })
}
