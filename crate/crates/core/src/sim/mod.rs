//! Monte Carlo link simulation: QPSK over AWGN, trial execution, error
//! classification and per-point statistics.

mod channel;
mod classify;
mod output;
mod stats;
mod sweep;

pub use channel::{awgn_llr, modulate_qpsk, ChannelConfig, QPSK_AMPLITUDE};
pub use classify::{classify_error, ErrorClass, MAX_PERIOD, WINDOW};
pub use output::{csv_header, csv_row, dat_header, dat_row, ResultWriter};
pub use stats::{wilson_interval, PointStats};
pub use sweep::{run_trial, sweep, StopRule, TrialRecord};
