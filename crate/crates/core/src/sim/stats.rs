use crate::decoders::Variant;

use super::classify::ErrorClass;
use super::sweep::TrialRecord;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Integer counters for one (decoder, Eb/N0) point. Ratios are only formed
/// on read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointStats {
    pub decoder: Variant,
    pub block_len: usize,
    pub k: usize,
    pub crc_len: usize,
    /// Eb/N0 in hundredths of a dB, kept integral so points compare exactly.
    pub ebn0_centi_db: i64,
    pub seed: u64,
    pub trials: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub iterations: u64,
    pub n_false_conv: u64,
    pub n_osc: u64,
    pub n_unconv: u64,
}

impl PointStats {
    pub fn new(decoder: Variant, block_len: usize, k: usize, crc_len: usize, ebn0_db: f64, seed: u64) -> Self {
        PointStats {
            decoder,
            block_len,
            k,
            crc_len,
            ebn0_centi_db: (ebn0_db * 100.0).round() as i64,
            seed,
            trials: 0,
            frame_errors: 0,
            bit_errors: 0,
            iterations: 0,
            n_false_conv: 0,
            n_osc: 0,
            n_unconv: 0,
        }
    }

    pub fn ebn0_db(&self) -> f64 {
        self.ebn0_centi_db as f64 / 100.0
    }

    pub fn record(&mut self, t: &TrialRecord) {
        self.trials += 1;
        self.frame_errors += u64::from(t.frame_error);
        self.bit_errors += t.bit_errors as u64;
        self.iterations += t.outcome.iterations_used as u64;
        match t.error_class {
            ErrorClass::None => {}
            ErrorClass::FalseConverged => self.n_false_conv += 1,
            ErrorClass::Oscillation => self.n_osc += 1,
            ErrorClass::Unconverged => self.n_unconv += 1,
        }
    }

    pub fn merge(&mut self, other: &PointStats) {
        self.trials += other.trials;
        self.frame_errors += other.frame_errors;
        self.bit_errors += other.bit_errors;
        self.iterations += other.iterations;
        self.n_false_conv += other.n_false_conv;
        self.n_osc += other.n_osc;
        self.n_unconv += other.n_unconv;
    }

    pub fn fer(&self) -> f64 {
        ratio(self.frame_errors, self.trials)
    }

    /// Bit errors over payload bits (CRC excluded).
    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors, self.trials * (self.k - self.crc_len) as u64)
    }

    pub fn avg_iterations(&self) -> f64 {
        ratio(self.iterations, self.trials)
    }

    pub fn fer_interval(&self) -> (f64, f64) {
        wilson_interval(self.frame_errors, self.trials)
    }

    /// Share of frame errors that oscillated.
    pub fn oscillation_share(&self) -> f64 {
        ratio(self.n_osc, self.frame_errors)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}
