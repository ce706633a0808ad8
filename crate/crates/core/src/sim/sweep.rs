use rand::Rng;
use rayon::prelude::*;

use crate::decoders::{rng_for, DecodeOutcome, Decoder};
use crate::{Bits, Error, Result};

use super::channel::{awgn_llr, modulate_qpsk, ChannelConfig};
use super::classify::{classify_error, ErrorClass};
use super::stats::PointStats;

/// When a sweep point is finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// Exactly this many trials.
    Trials(u64),
    /// Stop at the trial that brings the frame-error count to
    /// `min_frame_errors`, or after `max_trials`.
    FrameErrors { min_frame_errors: u64, max_trials: u64 },
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule::FrameErrors { min_frame_errors: 100, max_trials: 1_000_000 }
    }
}

impl StopRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StopRule::Trials(0) => Err(Error::InvalidStopRule("trial count must be at least 1".into())),
            StopRule::FrameErrors { min_frame_errors: 0, .. } => {
                Err(Error::InvalidStopRule("frame-error target must be at least 1".into()))
            }
            StopRule::FrameErrors { max_trials: 0, .. } => {
                Err(Error::InvalidStopRule("max_trials must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    fn max_trials(&self) -> u64 {
        match *self {
            StopRule::Trials(t) => t,
            StopRule::FrameErrors { max_trials, .. } => max_trials,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub seed: u64,
    pub info: Bits,
    pub outcome: DecodeOutcome,
    pub frame_error: bool,
    pub bit_errors: usize,
    pub error_class: ErrorClass,
}

/// One frame end to end. The generator for `(master_seed, trial_index)` is
/// consumed in order: payload bits, channel noise, decoder draws.
pub fn run_trial(decoder: &Decoder, channel: &ChannelConfig, trial_index: u64, master_seed: u64) -> Result<TrialRecord> {
    run_trial_inner(decoder, channel, trial_index, master_seed, false)
}

fn run_trial_inner(
    decoder: &Decoder,
    channel: &ChannelConfig,
    trial_index: u64,
    master_seed: u64,
    traced: bool,
) -> Result<TrialRecord> {
    let spec = decoder.spec();
    let mut rng = rng_for(master_seed, trial_index);
    let info: Bits = (0..spec.payload_len()).map(|_| rng.random_range(0..2u8)).collect();
    let u = spec.assemble_u(&info, decoder.crc())?;
    let x = spec.encode(&u)?;
    let mut llr = awgn_llr(&modulate_qpsk(&x), channel, &mut rng);
    llr.truncate(spec.block_len);
    let outcome = if traced {
        decoder.decode_traced(&llr, &mut rng)?
    } else {
        decoder.decode(&llr, &mut rng)?
    };
    let bit_errors = info.iter().zip(&outcome.info_hat).filter(|(a, b)| a != b).count();
    let frame_error = bit_errors > 0;
    let error_class = if !frame_error {
        ErrorClass::None
    } else if outcome.tail.is_empty() {
        ErrorClass::Unconverged
    } else {
        classify_error(&outcome.tail, outcome.stopped_early, outcome.crc_pass)?
    };
    Ok(TrialRecord { trial_index, seed: master_seed, info, outcome, frame_error, bit_errors, error_class })
}

/// Runs every Eb/N0 point until `stop` is met. Trials are scheduled in
/// fixed index order and reduced into integer counters, so the result does
/// not depend on `parallelism`. `on_point` sees each finished point, and
/// `on_trial` every trial (with a full iteration trace) whose index is below
/// `trace_trials`.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    decoder: &Decoder,
    ebn0_db: &[f64],
    stop: StopRule,
    master_seed: u64,
    parallelism: usize,
    trace_trials: u64,
    on_trial: &mut dyn FnMut(f64, &TrialRecord),
    on_point: &mut dyn FnMut(&PointStats) -> Result<()>,
) -> Result<Vec<PointStats>> {
    stop.validate()?;
    if ebn0_db.is_empty() {
        return Err(Error::Config("no Eb/N0 points given".into()));
    }
    if parallelism == 0 {
        return Err(Error::Config("parallelism must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let spec = decoder.spec();
    let batch = (256 * parallelism) as u64;
    let mut points = Vec::with_capacity(ebn0_db.len());
    for &db in ebn0_db {
        let channel = ChannelConfig::new(db, spec.energy_rate())?;
        let mut stats = PointStats::new(decoder.params().variant, spec.block_len, spec.k, spec.crc_len, db, master_seed);
        let mut next = 0u64;
        'point: while next < stop.max_trials() {
            let end = (next + batch).min(stop.max_trials());
            let records: Vec<Result<TrialRecord>> = pool.install(|| {
                (next..end)
                    .into_par_iter()
                    .map(|i| run_trial_inner(decoder, &channel, i, master_seed, i < trace_trials))
                    .collect()
            });
            for rec in records {
                let rec = rec?;
                if rec.trial_index < trace_trials {
                    on_trial(db, &rec);
                }
                stats.record(&rec);
                if let StopRule::FrameErrors { min_frame_errors, .. } = stop {
                    if stats.frame_errors >= min_frame_errors {
                        break 'point;
                    }
                }
            }
            next = end;
        }
        on_point(&stats)?;
        points.push(stats);
    }
    Ok(points)
}
