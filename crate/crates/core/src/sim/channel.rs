use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Per-dimension amplitude of unit-energy Gray QPSK.
pub const QPSK_AMPLITUDE: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    /// Information bits per coded bit, CRC excluded: `(K - crc_len) / N`.
    pub rate_for_energy: f64,
    pub noise_variance_per_dim: f64,
}

impl ChannelConfig {
    /// Unit symbol energy carries two coded bits, so `Eb = 1 / (2 R)` and
    /// the per-dimension variance is `N0 / 2 = 1 / (4 R Eb/N0)`.
    pub fn new(ebn0_db: f64, rate_for_energy: f64) -> Result<Self> {
        if !(rate_for_energy > 0.0 && rate_for_energy <= 1.0) {
            return Err(Error::InvalidChannel(format!("energy rate {rate_for_energy} outside (0, 1]")));
        }
        let var = 1.0 / (4.0 * rate_for_energy * 10f64.powf(ebn0_db / 10.0));
        Self::with_variance(ebn0_db, rate_for_energy, var)
    }

    pub fn with_variance(ebn0_db: f64, rate_for_energy: f64, noise_variance_per_dim: f64) -> Result<Self> {
        if !(noise_variance_per_dim > 0.0 && noise_variance_per_dim.is_finite()) {
            return Err(Error::InvalidChannel(format!(
                "noise variance must be positive, got {noise_variance_per_dim}"
            )));
        }
        Ok(ChannelConfig { ebn0_db, rate_for_energy, noise_variance_per_dim })
    }

    /// LLR of a received component `y`: `2 a y / sigma^2`.
    pub fn llr_scale(&self) -> f64 {
        2.0 * QPSK_AMPLITUDE / self.noise_variance_per_dim
    }
}

/// Gray QPSK: bit pairs map to `((1 - 2 b0) a, (1 - 2 b1) a)`, returned as
/// interleaved I/Q components in bit order. An odd tail is padded with 0.
pub fn modulate_qpsk(bits: &[u8]) -> Vec<f64> {
    let mut out: Vec<f64> = bits
        .iter()
        .map(|&b| if b == 0 { QPSK_AMPLITUDE } else { -QPSK_AMPLITUDE })
        .collect();
    if out.len() % 2 == 1 {
        out.push(QPSK_AMPLITUDE);
    }
    out
}

/// Adds Gaussian noise per dimension and demaps to bit LLRs
/// (positive means 0).
pub fn awgn_llr<R: Rng + ?Sized>(components: &[f64], cfg: &ChannelConfig, rng: &mut R) -> Vec<f64> {
    let sigma = cfg.noise_variance_per_dim.sqrt();
    let scale = cfg.llr_scale();
    components
        .iter()
        .map(|&s| {
            let n: f64 = rng.sample(StandardNormal);
            scale * (s + sigma * n)
        })
        .collect()
}
