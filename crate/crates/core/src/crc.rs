//! Bit-serial CRC over hard-bit vectors.

use crate::{Bits, Error, Result};

/// CRC parameters in the usual Rocksoft/"reveng" vocabulary, with the
/// generator written out in full (including the `x^length` term).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrcConfig {
    pub length: usize,
    pub generator: u64,
    pub init: u64,
    pub reflect_in: bool,
    pub reflect_out: bool,
    pub xor_out: u64,
}

impl CrcConfig {
    pub fn new(length: usize, generator: u64, init: u64) -> Result<Self> {
        let cfg = CrcConfig {
            length,
            generator,
            init,
            reflect_in: false,
            reflect_out: false,
            xor_out: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// LTE CRC24A, x^24 + x^23 + x^18 + x^17 + x^14 + x^11 + x^10 + x^7 + x^6
    /// + x^5 + x^4 + x^3 + x + 1, zero init, no reflection, no final XOR.
    pub fn crc24a() -> Self {
        CrcConfig {
            length: 24,
            generator: 0x186_4CFB,
            init: 0,
            reflect_in: false,
            reflect_out: false,
            xor_out: 0,
        }
    }

    /// Disabled CRC: attaches nothing and always checks.
    pub fn none() -> Self {
        CrcConfig {
            length: 0,
            generator: 1,
            init: 0,
            reflect_in: false,
            reflect_out: false,
            xor_out: 0,
        }
    }

    /// Default configuration for a given parity length: CRC24A for 24, the
    /// disabled CRC for 0, otherwise an error (other lengths need an explicit
    /// generator).
    pub fn for_length(length: usize) -> Result<Self> {
        match length {
            0 => Ok(Self::none()),
            24 => Ok(Self::crc24a()),
            _ => Err(Error::InvalidCrc(format!(
                "no default generator for a {length}-bit CRC; give one explicitly"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length > 63 {
            return Err(Error::InvalidCrc(format!("length {} exceeds 63", self.length)));
        }
        if self.generator >> self.length != 1 {
            return Err(Error::InvalidCrc(format!(
                "generator {:#x} does not have degree {}",
                self.generator, self.length
            )));
        }
        if self.length > 0 && (self.init | self.xor_out) >> self.length != 0 {
            return Err(Error::InvalidCrc("init/xor_out wider than the register".into()));
        }
        Ok(())
    }

    fn mask(&self) -> u64 {
        (1u64 << self.length) - 1
    }

    /// Remainder of `payload` as an integer (bit `length-1` is transmitted first).
    pub fn remainder(&self, payload: &[u8]) -> Result<u64> {
        if self.length == 0 {
            return Ok(0);
        }
        if self.reflect_in && !payload.len().is_multiple_of(8) {
            return Err(Error::InvalidCrc(
                "reflected input needs a whole number of bytes".into(),
            ));
        }
        let mask = self.mask();
        let low = self.generator & mask;
        let top = self.length - 1;
        let mut reg = self.init;
        let mut feed = |bit: u8| {
            let fb = ((reg >> top) & 1) ^ u64::from(bit & 1);
            reg = (reg << 1) & mask;
            if fb == 1 {
                reg ^= low;
            }
        };
        if self.reflect_in {
            for byte in payload.chunks(8) {
                byte.iter().rev().for_each(|&b| feed(b));
            }
        } else {
            payload.iter().for_each(|&b| feed(b));
        }
        if self.reflect_out {
            reg = reg.reverse_bits() >> (64 - self.length);
        }
        Ok(reg ^ self.xor_out)
    }

    fn parity_bits(&self, payload: &[u8]) -> Result<Bits> {
        let rem = self.remainder(payload)?;
        Ok((0..self.length)
            .rev()
            .map(|i| ((rem >> i) & 1) as u8)
            .collect())
    }

    /// Appends `length` parity bits to `payload`.
    pub fn attach(&self, payload: &[u8]) -> Result<Bits> {
        let mut out = payload.to_vec();
        out.extend(self.parity_bits(payload)?);
        Ok(out)
    }

    /// True iff the trailing `length` bits are the CRC of the rest.
    pub fn check(&self, bits: &[u8]) -> Result<bool> {
        if bits.len() < self.length {
            return Err(Error::LengthMismatch {
                expected: self.length,
                got: bits.len(),
            });
        }
        let (payload, parity) = bits.split_at(bits.len() - self.length);
        Ok(self.parity_bits(payload)? == parity)
    }
}

impl Default for CrcConfig {
    fn default() -> Self {
        Self::crc24a()
    }
}
