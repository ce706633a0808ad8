//! Decoder variants mapping channel LLRs to a [`DecodeOutcome`].
//!
//! Every variant shares the iteration loop in [`run`]: one round-trip BP
//! iteration, a hard decision, the stopping test, then a variant-specific
//! hook that may rewire the graph or perturb the channel column.
//!
//! Randomness comes from one [`DecodeRng`] per decode. The order of draws is
//! fixed: PP-BP takes `rho_range`, the level draw `x`, the subgraph and the
//! stage order for each event (redrawing from `rho_range` when no subgraph
//! admits the window); FP-BP shuffles one stage order per new trellis; NA-BP
//! draws one Gaussian per channel position per injection.

mod sc;

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::code::CodeSpec;
use crate::crc::CrcConfig;
use crate::engine::{
    bp_iteration, check_stop, digest_bits, hard_decision_into, BoxplusMode, MessageState,
    StopCheck, Wiring, DEFAULT_LLR_MAX,
};
use crate::trellis::{PermutationEvent, StrideSchedule};
use crate::{Bits, Error, Result};

pub use sc::decode_sc;

pub type DecodeRng = ChaCha8Rng;

/// Hard-decision digests kept for error classification.
pub const TAIL_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Bp,
    Fpbp,
    Ppbp,
    Nabp,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Bp, Variant::Fpbp, Variant::Ppbp, Variant::Nabp];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Bp => "bp",
            Variant::Fpbp => "fpbp",
            Variant::Ppbp => "ppbp",
            Variant::Nabp => "nabp",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown decoder `{s}` (bp | fpbp | ppbp | nabp)")))
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderParams {
    pub variant: Variant,
    /// N_it,max.
    pub max_iters: usize,
    /// FP-BP iterations per trellis, N_it,reset.
    pub reset_iters: usize,
    /// FP-BP trellis count.
    pub q_max: usize,
    pub p_range: usize,
    pub p_level: usize,
    pub d: usize,
    pub n_min: usize,
    pub sigma2_noise: f64,
    /// NA-BP re-injects after a failed stop check every this many iterations.
    pub noise_interval: usize,
    pub warmup: usize,
    pub mode: BoxplusMode,
    pub stop: StopCheck,
    pub llr_max: f64,
}

impl DecoderParams {
    /// Defaults for `variant` at `stages = log2 N`: 200 iterations, the
    /// limited-iteration PP-BP row scaled to the block (`P_range = 2`,
    /// `P_level = min(6, n - 1)`, `D = 8`, `N_min = 4`), `sigma^2 = 0.36`.
    pub fn new(variant: Variant, stages: usize) -> Self {
        DecoderParams {
            variant,
            max_iters: 200,
            reset_iters: 200,
            q_max: 1,
            p_range: 2,
            p_level: 6.min(stages.saturating_sub(1)).max(1),
            d: 8,
            n_min: 4,
            sigma2_noise: 0.36,
            noise_interval: 50,
            warmup: 2,
            mode: BoxplusMode::MinSum,
            stop: StopCheck::Crc,
            llr_max: DEFAULT_LLR_MAX,
        }
    }

    /// FP-BP with `q_max` trellises of `reset_iters` iterations each.
    pub fn fpbp(stages: usize, q_max: usize, reset_iters: usize) -> Self {
        DecoderParams {
            q_max,
            reset_iters,
            max_iters: q_max * reset_iters,
            ..Self::new(Variant::Fpbp, stages)
        }
    }

    pub fn validate(&self, stages: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(self.llr_max > 0.0 && self.llr_max.is_finite()) {
            return bad(format!("llr_max must be positive and finite, got {}", self.llr_max));
        }
        match self.variant {
            Variant::Bp => {}
            Variant::Fpbp => {
                if self.q_max == 0 || self.reset_iters == 0 {
                    return bad("q_max and reset must both be at least 1".into());
                }
                if self.max_iters != self.q_max * self.reset_iters {
                    return bad(format!(
                        "FP-BP needs max_iters = reset x q_max = {}, got {}",
                        self.q_max * self.reset_iters,
                        self.max_iters
                    ));
                }
            }
            Variant::Ppbp => {
                if stages < 2 {
                    return bad("PP-BP needs N >= 4".into());
                }
                if self.p_range < 2 || self.p_range > stages {
                    return bad(format!("p_range {} outside 2..={stages}", self.p_range));
                }
                if self.p_level < 1 || self.p_level > stages - 1 {
                    return bad(format!("p_level {} outside 1..={}", self.p_level, stages - 1));
                }
                if self.d < 1 || self.n_min < 1 {
                    return bad("d and n_min must both be at least 1".into());
                }
            }
            Variant::Nabp => {
                if !(self.sigma2_noise >= 0.0 && self.sigma2_noise.is_finite()) {
                    return bad(format!("sigma2_noise must be >= 0, got {}", self.sigma2_noise));
                }
                if self.noise_interval == 0 {
                    return bad("noise_interval must be at least 1".into());
                }
            }
        }
        Ok(())
    }

    /// PP-BP's first reset point: the reset rule applied to a full-graph
    /// permutation, `max(N_min, floor(N (n - 1) / D))`, but no later than
    /// `max(N_min, floor(N_it,max / 2))` so that a small iteration budget
    /// still leaves room for permutations.
    pub fn initial_reset(&self, block_len: usize, stages: usize) -> usize {
        let full = self.n_min.max(block_len * (stages - 1) / self.d);
        full.min(self.n_min.max(self.max_iters / 2))
    }

    /// Iterations until the next PP-BP permutation after invalidating
    /// `n_zero` nodes.
    pub fn reset_gap(&self, n_zero: usize) -> usize {
        self.n_min.max(n_zero / self.d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PermutationRecord {
    /// FP-BP switched to a new uniform stage order after `iteration`.
    Full { iteration: usize, order: Vec<usize> },
    /// PP-BP applied `event` after `iteration`.
    Partial { iteration: usize, event: PermutationEvent },
}

impl PermutationRecord {
    pub fn iteration(&self) -> usize {
        match self {
            PermutationRecord::Full { iteration, .. } | PermutationRecord::Partial { iteration, .. } => *iteration,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub schedule_digest: u64,
    pub decision_digest: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub u_hat: Bits,
    /// Payload with the CRC stripped.
    pub info_hat: Bits,
    pub stopped_early: bool,
    pub iterations_used: usize,
    /// Trellises tried (FP-BP) or partial permutations applied (PP-BP).
    pub permutations_used: usize,
    pub permutations: Vec<PermutationRecord>,
    /// Digests of the last [`TAIL_LEN`] hard decisions, oldest first.
    pub tail: Vec<u64>,
    /// Whether the final decision passes the CRC.
    pub crc_pass: bool,
    /// Full per-iteration trace, only when requested.
    pub iteration_trace: Option<Vec<TraceRecord>>,
}

/// Snapshot handed to an observer around each PP-BP permutation.
pub struct PermutationSnapshot<'a> {
    pub iteration: usize,
    pub event: &'a PermutationEvent,
    pub modified: &'a [(usize, usize)],
    pub before: &'a MessageState,
    pub after: &'a MessageState,
}

#[derive(Debug, Clone)]
pub struct Decoder {
    spec: CodeSpec,
    crc: CrcConfig,
    params: DecoderParams,
    identity: StrideSchedule,
    identity_wiring: Wiring,
}

impl Decoder {
    pub fn new(spec: CodeSpec, crc: CrcConfig, params: DecoderParams) -> Result<Self> {
        params.validate(spec.stages)?;
        crc.validate()?;
        if crc.length != spec.crc_len {
            return Err(Error::InvalidCrc(format!(
                "code expects {} CRC bits, config has {}",
                spec.crc_len, crc.length
            )));
        }
        let identity = StrideSchedule::identity(spec.block_len)?;
        let identity_wiring = Wiring::new(&identity);
        Ok(Decoder { spec, crc, params, identity, identity_wiring })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn crc(&self) -> &CrcConfig {
        &self.crc
    }

    pub fn params(&self) -> &DecoderParams {
        &self.params
    }

    pub fn decode(&self, channel_llr: &[f64], rng: &mut DecodeRng) -> Result<DecodeOutcome> {
        self.run(channel_llr, rng, false, None)
    }

    pub fn decode_traced(&self, channel_llr: &[f64], rng: &mut DecodeRng) -> Result<DecodeOutcome> {
        self.run(channel_llr, rng, true, None)
    }

    /// Like [`decode`](Self::decode) but calls `observer` around every
    /// PP-BP permutation with the message state before and after the reset.
    pub fn decode_observed(
        &self,
        channel_llr: &[f64],
        rng: &mut DecodeRng,
        observer: &mut dyn FnMut(&PermutationSnapshot<'_>),
    ) -> Result<DecodeOutcome> {
        self.run(channel_llr, rng, false, Some(observer))
    }

    fn run(
        &self,
        channel_llr: &[f64],
        rng: &mut DecodeRng,
        trace: bool,
        mut observer: Option<&mut dyn FnMut(&PermutationSnapshot<'_>)>,
    ) -> Result<DecodeOutcome> {
        let spec = &self.spec;
        let p = &self.params;
        let (big_n, n) = (spec.block_len, spec.stages);
        let mut state = MessageState::init(spec, channel_llr, p.llr_max)?;

        let sigma2 = match p.variant {
            Variant::Nabp if p.sigma2_noise > 0.0 => Some(p.sigma2_noise),
            _ => None,
        };
        let mut perturbed = vec![0.0; big_n];
        let mut inject = |state: &mut MessageState, rng: &mut DecodeRng| {
            if let Some(s2) = sigma2 {
                perturb_channel(channel_llr, s2, rng, &mut perturbed);
                state.set_channel(&perturbed);
            }
        };
        inject(&mut state, rng);

        let mut sched: Option<StrideSchedule> = None;
        let mut wiring: Option<Wiring> = None;
        let mut sched_digest = self.identity.digest();
        let mut next_reset = match p.variant {
            Variant::Ppbp => p.initial_reset(big_n, n),
            _ => usize::MAX,
        };
        let mut permutations = Vec::new();
        let mut permutations_used = usize::from(p.variant == Variant::Fpbp && p.max_iters > 0);
        let mut trellis_start = 0;
        let mut tail: VecDeque<u64> = VecDeque::with_capacity(TAIL_LEN);
        let mut full_trace = trace.then(Vec::new);
        let mut u_hat = vec![0u8; big_n];
        hard_decision_into(&state, spec, &mut u_hat);
        let mut stopped_early = false;
        let mut iterations_used = p.max_iters;

        for iter in 1..=p.max_iters {
            bp_iteration(&mut state, wiring.as_ref().unwrap_or(&self.identity_wiring), p.mode);
            hard_decision_into(&state, spec, &mut u_hat);
            let digest = digest_bits(&u_hat);
            if tail.len() == TAIL_LEN {
                tail.pop_front();
            }
            tail.push_back(digest);
            if let Some(t) = full_trace.as_mut() {
                t.push(TraceRecord { iteration: iter, schedule_digest: sched_digest, decision_digest: digest });
            }
            let local_iter = iter - trellis_start;
            if check_stop(&state, spec, &self.crc, &u_hat, local_iter, p.warmup, p.stop) {
                stopped_early = true;
                iterations_used = iter;
                break;
            }
            match p.variant {
                Variant::Bp => {}
                Variant::Nabp => {
                    if iter % p.noise_interval == 0 && iter < p.max_iters {
                        inject(&mut state, rng);
                    }
                }
                Variant::Fpbp => {
                    if iter % p.reset_iters == 0 && iter < p.max_iters {
                        let mut order: Vec<usize> = (0..n).collect();
                        order.shuffle(rng);
                        let s = self.identity.full_permute(&order)?;
                        wiring = Some(Wiring::new(&s));
                        sched_digest = s.digest();
                        sched = Some(s);
                        state.reset_interior();
                        trellis_start = iter;
                        permutations_used += 1;
                        permutations.push(PermutationRecord::Full { iteration: iter, order });
                    }
                }
                Variant::Ppbp => {
                    if iter == next_reset {
                        let current = sched.as_ref().unwrap_or(&self.identity);
                        let event = sample_event(current, p, rng)?;
                        let modified = current.modified_nodes(&event);
                        let next = current.partial_permute(&event)?;
                        let before = observer.is_some().then(|| state.clone());
                        state.zero_nodes(&modified);
                        if let (Some(obs), Some(before)) = (observer.as_mut(), before.as_ref()) {
                            obs(&PermutationSnapshot {
                                iteration: iter,
                                event: &event,
                                modified: &modified,
                                before,
                                after: &state,
                            });
                        }
                        wiring = Some(Wiring::new(&next));
                        sched_digest = next.digest();
                        sched = Some(next);
                        next_reset = iter + p.reset_gap(event.n_zero);
                        permutations_used += 1;
                        permutations.push(PermutationRecord::Partial { iteration: iter, event });
                    }
                }
            }
        }

        let info_hat = spec.extract_payload(&u_hat);
        let crc_pass = self.crc.check(&spec.extract_nonfrozen(&u_hat))?;
        Ok(DecodeOutcome {
            u_hat,
            info_hat,
            stopped_early,
            iterations_used,
            permutations_used,
            permutations,
            tail: tail.into(),
            crc_pass,
            iteration_trace: full_trace,
        })
    }
}

/// Draws one PP-BP event on `sched`: `rho_range` uniform on `2..=P_range`,
/// `x` uniform on `1..=P_level`, `rho_level = min(x, n - rho_range + 1)`,
/// a subgraph uniform among those whose window strides are uniform, and a
/// uniform derangement of the window stages.
pub fn sample_event(sched: &StrideSchedule, p: &DecoderParams, rng: &mut DecodeRng) -> Result<PermutationEvent> {
    let n = sched.stages();
    // (2, 1) is always admissible, so this terminates; the cap only bounds
    // pathological parameter sets.
    for _ in 0..10_000 {
        let range = rng.random_range(2..=p.p_range);
        let x = rng.random_range(1..=p.p_level);
        let level = x.min(n - range + 1);
        let eligible = sched.eligible_subgraphs(level, range);
        if eligible.is_empty() {
            continue;
        }
        let sub = eligible[rng.random_range(0..eligible.len())];
        let order = random_derangement(rng, range);
        return PermutationEvent::new(n, range, level, sub, order);
    }
    Err(Error::InvalidEvent("no admissible partial permutation found".into()))
}

/// Writes `llr + n` into `out`, `n ~ N(0, sigma2)` drawn once per position.
pub fn perturb_channel(llr: &[f64], sigma2: f64, rng: &mut DecodeRng, out: &mut [f64]) {
    let dist = Normal::new(0.0, sigma2.sqrt()).expect("finite non-negative variance");
    for (d, &v) in out.iter_mut().zip(llr) {
        *d = v + dist.sample(rng);
    }
}

fn random_derangement(rng: &mut DecodeRng, len: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..len).collect();
    loop {
        p.shuffle(rng);
        if p.iter().enumerate().all(|(i, &s)| i != s) {
            return p;
        }
    }
}

pub fn decode_bp(spec: &CodeSpec, crc: &CrcConfig, params: &DecoderParams, llr: &[f64]) -> Result<DecodeOutcome> {
    expect_variant(params, Variant::Bp)?;
    Decoder::new(spec.clone(), *crc, params.clone())?.decode(llr, &mut rng_for(0, 0))
}

pub fn decode_fpbp(
    spec: &CodeSpec,
    crc: &CrcConfig,
    params: &DecoderParams,
    llr: &[f64],
    rng: &mut DecodeRng,
) -> Result<DecodeOutcome> {
    expect_variant(params, Variant::Fpbp)?;
    Decoder::new(spec.clone(), *crc, params.clone())?.decode(llr, rng)
}

pub fn decode_ppbp(
    spec: &CodeSpec,
    crc: &CrcConfig,
    params: &DecoderParams,
    llr: &[f64],
    rng: &mut DecodeRng,
) -> Result<DecodeOutcome> {
    expect_variant(params, Variant::Ppbp)?;
    Decoder::new(spec.clone(), *crc, params.clone())?.decode(llr, rng)
}

pub fn decode_nabp(
    spec: &CodeSpec,
    crc: &CrcConfig,
    params: &DecoderParams,
    llr: &[f64],
    rng: &mut DecodeRng,
) -> Result<DecodeOutcome> {
    expect_variant(params, Variant::Nabp)?;
    Decoder::new(spec.clone(), *crc, params.clone())?.decode(llr, rng)
}

fn expect_variant(params: &DecoderParams, v: Variant) -> Result<()> {
    if params.variant != v {
        return Err(Error::InvalidParams(format!("expected variant {v}, got {}", params.variant)));
    }
    Ok(())
}

/// Counter-based generator for one decode: stream `index` of `seed`.
pub fn rng_for(seed: u64, index: u64) -> DecodeRng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
