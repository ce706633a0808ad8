//! LLR message passing over a [`StrideSchedule`].
//!
//! `l[c][r]` travels from the channel side toward the priors and sits at
//! variable column `c`; `r[c][r]` travels the other way. Column 0 of `l`
//! holds the channel LLRs and column `n` of `r` the frozen-bit priors; both
//! are fixed for the lifetime of a decode.

use crate::code::{polar_transform, CodeSpec};
use crate::crc::CrcConfig;
use crate::trellis::StrideSchedule;
use crate::{Bits, Error, Result};

pub const DEFAULT_LLR_MAX: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoxplusMode {
    Exact,
    #[default]
    MinSum,
}

impl std::str::FromStr for BoxplusMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(BoxplusMode::Exact),
            "minsum" | "min-sum" => Ok(BoxplusMode::MinSum),
            _ => Err(Error::Config(format!("unknown boxplus mode `{s}` (exact | minsum)"))),
        }
    }
}

impl std::fmt::Display for BoxplusMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoxplusMode::Exact => "exact",
            BoxplusMode::MinSum => "minsum",
        })
    }
}

/// Early-stopping test applied after each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopCheck {
    /// CRC over the non-frozen hard decisions.
    #[default]
    Crc,
    /// Re-encode the u-side decisions and compare with the channel-side ones.
    Reencode,
}

#[inline]
fn clip(x: f64, max: f64) -> f64 {
    x.clamp(-max, max)
}

#[inline]
fn minsum(x: f64, y: f64) -> f64 {
    let m = x.abs().min(y.abs());
    if (x < 0.0) ^ (y < 0.0) {
        -m
    } else {
        m
    }
}

/// `x ⊞ y`, clipped to `±llr_max`.
#[inline]
pub fn boxplus(x: f64, y: f64, mode: BoxplusMode, llr_max: f64) -> f64 {
    let v = match mode {
        BoxplusMode::MinSum => minsum(x, y),
        // min-sum plus the two log correction terms of 2 atanh(tanh(x/2) tanh(y/2))
        BoxplusMode::Exact => {
            minsum(x, y) + (-(x + y).abs()).exp().ln_1p() - (-(x - y).abs()).exp().ln_1p()
        }
    };
    clip(v, llr_max)
}

/// The four processing-element equations. Returns
/// `(r_out1, r_out2, l_out1, l_out2)`; index 1 is the upper (XOR) row.
pub fn pe_update(
    r_in1: f64,
    r_in2: f64,
    l_in1: f64,
    l_in2: f64,
    mode: BoxplusMode,
    llr_max: f64,
) -> (f64, f64, f64, f64) {
    let f = |x, y| boxplus(x, y, mode, llr_max);
    let shared = f(r_in1, l_in1);
    (
        f(r_in1, clip(l_in2 + r_in2, llr_max)),
        clip(shared + r_in2, llr_max),
        f(l_in1, clip(l_in2 + r_in2, llr_max)),
        clip(shared + l_in2, llr_max),
    )
}

/// Per-column `(upper, lower)` row pairs, flattened from a schedule.
#[derive(Debug, Clone)]
pub struct Wiring {
    block_len: usize,
    pairs: Vec<Vec<(u32, u32)>>,
}

impl Wiring {
    pub fn new(sched: &StrideSchedule) -> Self {
        let pairs = (0..sched.stages())
            .map(|c| sched.column_pairs(c).map(|(a, b)| (a as u32, b as u32)).collect())
            .collect();
        Wiring { block_len: sched.block_len(), pairs }
    }

    pub fn stages(&self) -> usize {
        self.pairs.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MessageState {
    block_len: usize,
    stages: usize,
    llr_max: f64,
    l: Vec<f64>,
    r: Vec<f64>,
}

impl MessageState {
    /// Channel LLRs on the channel column, `+llr_max` priors on frozen rows,
    /// zeros everywhere else.
    pub fn init(spec: &CodeSpec, channel_llr: &[f64], llr_max: f64) -> Result<Self> {
        let n = spec.block_len;
        if channel_llr.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: channel_llr.len() });
        }
        let cols = spec.stages + 1;
        let mut st = MessageState {
            block_len: n,
            stages: spec.stages,
            llr_max,
            l: vec![0.0; cols * n],
            r: vec![0.0; cols * n],
        };
        st.set_channel(channel_llr);
        let base = spec.stages * n;
        for (j, &f) in spec.frozen().iter().enumerate() {
            st.r[base + j] = if f { llr_max } else { 0.0 };
        }
        Ok(st)
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    pub fn llr_max(&self) -> f64 {
        self.llr_max
    }

    pub fn l(&self, col: usize, row: usize) -> f64 {
        self.l[col * self.block_len + row]
    }

    pub fn r(&self, col: usize, row: usize) -> f64 {
        self.r[col * self.block_len + row]
    }

    pub fn l_column(&self, col: usize) -> &[f64] {
        &self.l[col * self.block_len..(col + 1) * self.block_len]
    }

    pub fn r_column(&self, col: usize) -> &[f64] {
        &self.r[col * self.block_len..(col + 1) * self.block_len]
    }

    /// Overwrites the channel column (clipped).
    pub fn set_channel(&mut self, channel_llr: &[f64]) {
        let max = self.llr_max;
        for (d, &v) in self.l[..self.block_len].iter_mut().zip(channel_llr) {
            *d = clip(v, max);
        }
    }

    /// Zeros every message except the channel and prior columns.
    pub fn reset_interior(&mut self) {
        let n = self.block_len;
        self.l[n..].fill(0.0);
        let top = self.stages * n;
        self.r[..top].fill(0.0);
    }

    /// Zeros both messages at the given `(variable column, row)` nodes.
    /// Boundary columns are left alone.
    pub fn zero_nodes(&mut self, nodes: &[(usize, usize)]) {
        for &(c, r) in nodes {
            if c == 0 || c >= self.stages {
                continue;
            }
            let i = c * self.block_len + r;
            self.l[i] = 0.0;
            self.r[i] = 0.0;
        }
    }

    /// Sum of |message| over the non-boundary entries.
    pub fn interior_magnitude(&self) -> f64 {
        let n = self.block_len;
        let top = self.stages * n;
        self.l[n..].iter().chain(&self.r[..top]).map(|v| v.abs()).sum()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.l.iter().chain(&self.r).fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// One round trip: the L sweep runs PE columns from the channel side up to
/// the priors, then the R sweep runs back down.
pub fn bp_iteration(state: &mut MessageState, wiring: &Wiring, mode: BoxplusMode) {
    debug_assert_eq!(state.block_len, wiring.block_len);
    let n = state.block_len;
    let max = state.llr_max;
    let f = |x: f64, y: f64| boxplus(x, y, mode, max);
    for (c, pairs) in wiring.pairs.iter().enumerate() {
        let (lo, hi) = (c * n, (c + 1) * n);
        for &(a, b) in pairs {
            let (a, b) = (a as usize, b as usize);
            let (r1, r2) = (state.r[hi + a], state.r[hi + b]);
            let (l1, l2) = (state.l[lo + a], state.l[lo + b]);
            state.l[hi + a] = f(l1, clip(l2 + r2, max));
            state.l[hi + b] = clip(f(r1, l1) + l2, max);
        }
    }
    for (c, pairs) in wiring.pairs.iter().enumerate().rev() {
        let (lo, hi) = (c * n, (c + 1) * n);
        for &(a, b) in pairs {
            let (a, b) = (a as usize, b as usize);
            let (r1, r2) = (state.r[hi + a], state.r[hi + b]);
            let (l1, l2) = (state.l[lo + a], state.l[lo + b]);
            state.r[lo + a] = f(r1, clip(l2 + r2, max));
            state.r[lo + b] = clip(f(r1, l1) + r2, max);
        }
    }
}

/// u-side decisions: bit `j` is 0 iff `R + L >= 0` at the prior column;
/// frozen rows are forced to 0.
pub fn hard_decision(state: &MessageState, spec: &CodeSpec) -> Bits {
    let mut out = vec![0u8; state.block_len];
    hard_decision_into(state, spec, &mut out);
    out
}

pub fn hard_decision_into(state: &MessageState, spec: &CodeSpec, out: &mut [u8]) {
    let col = state.stages;
    for (j, o) in out.iter_mut().enumerate() {
        *o = u8::from(!spec.is_frozen(j) && state.r(col, j) + state.l(col, j) < 0.0);
    }
}

/// Channel-side decisions from `R + L` at column 0.
pub fn codeword_decision(state: &MessageState) -> Bits {
    (0..state.block_len)
        .map(|j| u8::from(state.r(0, j) + state.l(0, j) < 0.0))
        .collect()
}

/// Stopping test after iteration `iter` (1-based). Never fires during the
/// first `warmup` iterations.
pub fn check_stop(
    state: &MessageState,
    spec: &CodeSpec,
    crc: &CrcConfig,
    u_hat: &[u8],
    iter: usize,
    warmup: usize,
    rule: StopCheck,
) -> bool {
    if iter <= warmup {
        return false;
    }
    match rule {
        StopCheck::Crc => crc.check(&spec.extract_nonfrozen(u_hat)).unwrap_or(false),
        StopCheck::Reencode => {
            let mut x = u_hat.to_vec();
            polar_transform(&mut x);
            x == codeword_decision(state)
        }
    }
}

/// Rolling 64-bit digest of a hard-decision vector.
pub fn digest_bits(bits: &[u8]) -> u64 {
    let mut h = 0x9e37_79b9_7f4a_7c15u64;
    for chunk in bits.chunks(64) {
        let word = chunk.iter().enumerate().fold(0u64, |w, (i, &b)| w | (u64::from(b & 1) << i));
        h = (h ^ word).wrapping_mul(0xbf58_476d_1ce4_e5b9).rotate_left(31);
    }
    h ^= h >> 29;
    h = h.wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 32)
}
