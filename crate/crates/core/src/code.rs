//! Polar code construction and the natural-order transform `x = u F^{⊗n}`.

use std::fmt::Write as _;
use std::path::Path;

use crate::crc::CrcConfig;
use crate::{Bits, Error, Result};

/// A constructed polar code: block length, frozen mask and CRC bookkeeping.
///
/// `k` counts every non-frozen position, CRC bits included, so the code rate
/// is `k / block_len`. The energy rate used for channel normalisation is
/// `(k - crc_len) / block_len`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    pub block_len: usize,
    pub stages: usize,
    pub k: usize,
    pub crc_len: usize,
    pub design_ebn0_db: f64,
    frozen: Vec<bool>,
    info_positions: Vec<usize>,
}

impl CodeSpec {
    /// Bhattacharyya-bound construction at `design_ebn0_db`.
    pub fn construct(block_len: usize, k: usize, crc_len: usize, design_ebn0_db: f64) -> Result<Self> {
        let stages = log2_exact(block_len)?;
        if k == 0 || k > block_len {
            return Err(Error::InvalidDimension { n: block_len, k });
        }
        let z = bhattacharyya(stages, design_z0(design_ebn0_db));
        let mut order: Vec<usize> = (0..block_len).collect();
        // stable sort keeps the lower index first on ties
        order.sort_by(|&a, &b| z[a].total_cmp(&z[b]));
        let mut frozen = vec![true; block_len];
        for &i in &order[..k] {
            frozen[i] = false;
        }
        Self::from_mask(frozen, crc_len, design_ebn0_db)
    }

    /// Builds a spec from an explicit frozen mask (`true` = frozen).
    pub fn from_mask(frozen: Vec<bool>, crc_len: usize, design_ebn0_db: f64) -> Result<Self> {
        let block_len = frozen.len();
        let stages = log2_exact(block_len)?;
        let info_positions: Vec<usize> = (0..block_len).filter(|&i| !frozen[i]).collect();
        let k = info_positions.len();
        if k == 0 {
            return Err(Error::InvalidDimension { n: block_len, k });
        }
        if crc_len > 0 && crc_len >= k {
            return Err(Error::InvalidCrc(format!("crc_len {crc_len} must be below K = {k}")));
        }
        Ok(CodeSpec {
            block_len,
            stages,
            k,
            crc_len,
            design_ebn0_db,
            frozen,
            info_positions,
        })
    }

    pub fn frozen(&self) -> &[bool] {
        &self.frozen
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    /// Non-frozen positions in ascending order.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn frozen_count(&self) -> usize {
        self.block_len - self.k
    }

    /// Payload bits carried per frame (CRC excluded).
    pub fn payload_len(&self) -> usize {
        self.k - self.crc_len
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.block_len as f64
    }

    pub fn energy_rate(&self) -> f64 {
        self.payload_len() as f64 / self.block_len as f64
    }

    /// `x = u G_N`, rejecting inputs that set a frozen position.
    pub fn encode(&self, u: &[u8]) -> Result<Bits> {
        if u.len() != self.block_len {
            return Err(Error::LengthMismatch { expected: self.block_len, got: u.len() });
        }
        if let Some(i) = (0..self.block_len).find(|&i| self.frozen[i] && u[i] != 0) {
            return Err(Error::NonzeroFrozenBit(i));
        }
        let mut x = u.to_vec();
        polar_transform(&mut x);
        Ok(x)
    }

    /// Places `crc.attach(info)` on the non-frozen positions, zeros elsewhere.
    pub fn assemble_u(&self, info: &[u8], crc: &CrcConfig) -> Result<Bits> {
        if info.len() != self.payload_len() {
            return Err(Error::LengthMismatch { expected: self.payload_len(), got: info.len() });
        }
        if crc.length != self.crc_len {
            return Err(Error::InvalidCrc(format!(
                "code expects {} CRC bits, config has {}",
                self.crc_len, crc.length
            )));
        }
        let word = crc.attach(info)?;
        let mut u = vec![0u8; self.block_len];
        for (&pos, &b) in self.info_positions.iter().zip(&word) {
            u[pos] = b;
        }
        Ok(u)
    }

    /// Bits on the non-frozen positions (payload followed by CRC).
    pub fn extract_nonfrozen(&self, u: &[u8]) -> Bits {
        self.info_positions.iter().map(|&i| u[i]).collect()
    }

    /// Payload bits with the CRC stripped.
    pub fn extract_payload(&self, u: &[u8]) -> Bits {
        self.info_positions[..self.payload_len()].iter().map(|&i| u[i]).collect()
    }

    pub fn frozen_hex(&self) -> String {
        mask_to_hex(&self.frozen)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# polar code specification\n");
        let _ = writeln!(s, "n = {}", self.block_len);
        let _ = writeln!(s, "k = {}", self.k);
        let _ = writeln!(s, "crc_len = {}", self.crc_len);
        let _ = writeln!(s, "design_ebn0_db = {}", self.design_ebn0_db);
        let _ = writeln!(s, "frozen = {}", self.frozen_hex());
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (mut n, mut k, mut crc_len, mut design, mut frozen) = (None, None, None, None, None);
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected `key = value`, got `{body}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Parse { line, msg: format!("invalid {what} `{value}`") };
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad("n"))?),
                "k" => k = Some(value.parse::<usize>().map_err(|_| bad("k"))?),
                "crc_len" => crc_len = Some(value.parse::<usize>().map_err(|_| bad("crc_len"))?),
                "design_ebn0_db" => design = Some(value.parse::<f64>().map_err(|_| bad("design_ebn0_db"))?),
                "frozen" => frozen = Some((line, value.to_string())),
                _ => return Err(Error::Parse { line, msg: format!("unknown key `{key}`") }),
            }
        }
        let missing = |f: &str| Error::Parse { line: 0, msg: format!("missing field `{f}`") };
        let n = n.ok_or_else(|| missing("n"))?;
        let k = k.ok_or_else(|| missing("k"))?;
        let (fline, fhex) = frozen.ok_or_else(|| missing("frozen"))?;
        let mask = hex_to_mask(&fhex, n).map_err(|msg| Error::Parse { line: fline, msg })?;
        let spec = Self::from_mask(mask, crc_len.unwrap_or(0), design.unwrap_or(0.0))?;
        if spec.k != k {
            return Err(Error::Parse {
                line: fline,
                msg: format!("frozen mask leaves {} positions open but k = {k}", spec.k),
            });
        }
        Ok(spec)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

pub(crate) fn log2_exact(block_len: usize) -> Result<usize> {
    if block_len < 2 || !block_len.is_power_of_two() {
        return Err(Error::InvalidBlockLength(block_len));
    }
    Ok(block_len.trailing_zeros() as usize)
}

/// Initial Bhattacharyya parameter at a design point: `exp(-Eb/N0)`.
pub fn design_z0(design_ebn0_db: f64) -> f64 {
    (-(10f64.powf(design_ebn0_db / 10.0))).exp()
}

/// Bhattacharyya parameters of the `2^stages` synthetic channels in natural
/// order. The first half of a length-2M code combines two copies of each
/// length-M channel into the worse channel, `2Z - Z^2`; the second half
/// into the better one, `Z^2`.
pub fn bhattacharyya(stages: usize, z0: f64) -> Vec<f64> {
    let mut z = vec![z0];
    for _ in 0..stages {
        let bad = z.iter().map(|&v| 2.0 * v - v * v);
        let good = z.iter().map(|&v| v * v);
        z = bad.chain(good).collect();
    }
    z
}

/// In-place butterfly evaluation of `x = u F^{⊗n}` in natural order.
/// The transform is its own inverse over GF(2).
pub fn polar_transform(v: &mut [u8]) {
    let n = v.len();
    let mut half = 1;
    while half < n {
        for block in v.chunks_mut(2 * half) {
            let (upper, lower) = block.split_at_mut(half);
            for (a, b) in upper.iter_mut().zip(lower.iter()) {
                *a ^= *b;
            }
        }
        half *= 2;
    }
}

fn mask_to_hex(mask: &[bool]) -> String {
    let digits = mask.len().div_ceil(4);
    (0..digits)
        .rev()
        .map(|d| {
            let nib = (0..4)
                .filter(|&b| mask.get(4 * d + b).copied().unwrap_or(false))
                .fold(0u32, |acc, b| acc | (1 << b));
            char::from_digit(nib, 16).unwrap()
        })
        .collect()
}

fn hex_to_mask(hex: &str, len: usize) -> std::result::Result<Vec<bool>, String> {
    let hex = hex.trim_start_matches("0x");
    let digits = len.div_ceil(4);
    if hex.len() != digits {
        return Err(format!("frozen mask needs {digits} hex digits for n = {len}, got {}", hex.len()));
    }
    let mut mask = vec![false; len];
    for (i, c) in hex.chars().rev().enumerate() {
        let nib = c.to_digit(16).ok_or_else(|| format!("bad hex digit `{c}` in frozen mask"))?;
        for b in 0..4 {
            if nib >> b & 1 == 1 {
                let pos = 4 * i + b;
                if pos >= len {
                    return Err("frozen mask sets bits beyond n".into());
                }
                mask[pos] = true;
            }
        }
    }
    Ok(mask)
}
