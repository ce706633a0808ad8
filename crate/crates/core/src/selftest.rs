//! Fast invariant suite behind `polar-bp selftest`.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::code::{polar_transform, CodeSpec};
use crate::crc::CrcConfig;
use crate::decoders::{decode_sc, rng_for, DecodeRng, Decoder, DecoderParams, Variant};
use crate::engine::{boxplus, BoxplusMode, DEFAULT_LLR_MAX};
use crate::sim::{run_trial, ChannelConfig};
use crate::trellis::{n_zero, rederived_diff, PermutationEvent, StrideSchedule};

/// Soft wall-clock budget; exceeding it only produces a warning.
pub const SOFT_BUDGET: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, Default)]
pub struct SelftestOptions {
    /// Negative control: damage one stride of every schedule checked by the
    /// encoding test, which must then fail.
    pub corrupt_strides: bool,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
    pub elapsed: Duration,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn over_budget(&self) -> bool {
        self.elapsed > SOFT_BUDGET
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out += &format!(
                "[{}] {:<22} {:>8.2?}  {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.elapsed,
                c.detail
            );
        }
        if self.over_budget() {
            out += &format!("warning: self-test took {:.1?}, over the {:?} budget\n", self.elapsed, SOFT_BUDGET);
        }
        out += if self.passed() { "all checks passed\n" } else { "self-test FAILED\n" };
        out
    }
}

type Check = fn(&SelftestOptions) -> Result<String, String>;

pub fn run(opts: &SelftestOptions) -> SelftestReport {
    let checks: [(&'static str, Check); 4] = [
        ("encoding invariance", encoding_invariance),
        ("N_zero equivalence", n_zero_equivalence),
        ("boxplus identities", boxplus_identities),
        ("noiseless decode", noiseless_decode),
    ];
    let start = Instant::now();
    let checks = checks
        .into_iter()
        .map(|(name, f)| {
            let t = Instant::now();
            let r = f(opts);
            let elapsed = t.elapsed();
            match r {
                Ok(detail) => CheckResult { name, passed: true, detail, elapsed },
                Err(detail) => CheckResult { name, passed: false, detail, elapsed },
            }
        })
        .collect();
    SelftestReport { checks, elapsed: start.elapsed() }
}

fn random_event(rng: &mut DecodeRng, s: &StrideSchedule) -> PermutationEvent {
    let n = s.stages();
    loop {
        let range = rng.random_range(2..=n);
        let level = rng.random_range(1..=n - range + 1);
        let ok = s.eligible_subgraphs(level, range);
        if ok.is_empty() {
            continue;
        }
        let sub = ok[rng.random_range(0..ok.len())];
        let order = derangement(rng, range);
        return PermutationEvent::new(n, range, level, sub, order).expect("sampled event is valid");
    }
}

fn derangement(rng: &mut DecodeRng, len: usize) -> Vec<usize> {
    loop {
        let mut p: Vec<usize> = (0..len).collect();
        p.shuffle(rng);
        if p.iter().enumerate().all(|(i, &s)| i != s) {
            return p;
        }
    }
}

/// Identity, full and chained partial permutations all encode like the
/// butterfly transform.
fn encoding_invariance(opts: &SelftestOptions) -> Result<String, String> {
    let mut rng = rng_for(0x5e1f, 0);
    let mut cases = 0;
    for n in [8usize, 16, 32, 64] {
        let stages = n.trailing_zeros() as usize;
        for chain in 0..50 {
            let mut s = StrideSchedule::identity(n).map_err(|e| e.to_string())?;
            if chain % 2 == 1 {
                let mut order: Vec<usize> = (0..stages).collect();
                order.shuffle(&mut rng);
                s = s.full_permute(&order).map_err(|e| e.to_string())?;
            }
            for _ in 0..(chain % 11) {
                let ev = random_event(&mut rng, &s);
                s = s.partial_permute(&ev).map_err(|e| e.to_string())?;
            }
            if opts.corrupt_strides {
                let wrong = (s.stride(0, 0).trailing_zeros() as u8 + 1) % stages as u8;
                s.corrupt_for_test(0, 0, wrong);
            }
            for _ in 0..20 {
                let u: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
                let mut x = u.clone();
                polar_transform(&mut x);
                let got = s.graph_encode(&u).map_err(|e| e.to_string())?;
                if got != x {
                    return Err(format!("N={n}: graph encoding differs from the butterfly transform"));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} encodings"))
}

/// Every event's modified-node count matches the closed form and a
/// symbolic re-derivation.
fn n_zero_equivalence(_: &SelftestOptions) -> Result<String, String> {
    let mut rng = rng_for(0x5e1f, 1);
    let mut events = 0;
    for n in [8usize, 16, 32] {
        let stages = n.trailing_zeros() as usize;
        let id = StrideSchedule::identity(n).map_err(|e| e.to_string())?;
        for range in 2..=stages {
            for level in 1..=stages - range + 1 {
                for sub in 0..n >> (level + range - 1) {
                    let ev = PermutationEvent::new(stages, range, level, sub, derangement(&mut rng, range))
                        .map_err(|e| e.to_string())?;
                    let after = id.partial_permute(&ev).map_err(|e| e.to_string())?;
                    let mut nodes = id.modified_nodes(&ev);
                    nodes.sort_unstable();
                    let expect = n_zero(level, range);
                    if nodes.len() != expect || nodes != rederived_diff(&id, &after) {
                        return Err(format!("N={n} level={level} range={range} subgraph={sub}"));
                    }
                    events += 1;
                }
            }
        }
    }
    Ok(format!("{events} events"))
}

fn boxplus_identities(_: &SelftestOptions) -> Result<String, String> {
    let m = DEFAULT_LLR_MAX;
    let mut rng = rng_for(0x5e1f, 2);
    for _ in 0..10_000 {
        let x = rng.random_range(-20.0..20.0);
        let y = rng.random_range(-20.0..20.0);
        for mode in [BoxplusMode::Exact, BoxplusMode::MinSum] {
            let v = boxplus(x, y, mode, m);
            if v != boxplus(y, x, mode, m) {
                return Err(format!("{mode} not commutative at ({x}, {y})"));
            }
            if (boxplus(-x, y, mode, m) + v).abs() > 1e-12 {
                return Err(format!("{mode} sign flip fails at ({x}, {y})"));
            }
            if v.abs() > x.abs().min(y.abs()) + 1e-12 {
                return Err(format!("{mode} exceeds min magnitude at ({x}, {y})"));
            }
            if boxplus(x, 0.0, mode, m) != 0.0 || (boxplus(x, m, mode, m) - x).abs() > 1e-6 {
                return Err(format!("{mode} neutral/absorbing element fails at {x}"));
            }
        }
        let t = 2.0 * ((x / 2.0).tanh() * (y / 2.0).tanh()).atanh();
        if t.is_finite() && (boxplus(x, y, BoxplusMode::Exact, m) - t).abs() > 1e-9 * (1.0 + t.abs()) {
            return Err(format!("exact boxplus disagrees with tanh form at ({x}, {y})"));
        }
    }
    Ok("20000 pairs".into())
}

fn noiseless_decode(_: &SelftestOptions) -> Result<String, String> {
    let spec = CodeSpec::construct(64, 40, 24, 0.0).map_err(|e| e.to_string())?;
    let crc = CrcConfig::crc24a();
    let channel = ChannelConfig::with_variance(f64::INFINITY, spec.energy_rate(), 1e-6).map_err(|e| e.to_string())?;
    let mut frames = 0;
    for v in Variant::ALL {
        let params = match v {
            Variant::Fpbp => DecoderParams::fpbp(spec.stages, 4, 50),
            _ => DecoderParams::new(v, spec.stages),
        };
        let dec = Decoder::new(spec.clone(), crc, params).map_err(|e| e.to_string())?;
        for i in 0..20 {
            let t = run_trial(&dec, &channel, i, 0x5e1f).map_err(|e| e.to_string())?;
            if t.frame_error {
                return Err(format!("{v} failed noiseless trial {i}"));
            }
            frames += 1;
        }
    }
    let mut rng = rng_for(0x5e1f, 3);
    for _ in 0..20 {
        let info: Vec<u8> = (0..spec.payload_len()).map(|_| rng.random_range(0..2)).collect();
        let u = spec.assemble_u(&info, &crc).map_err(|e| e.to_string())?;
        let llr: Vec<f64> = spec
            .encode(&u)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|&b| if b == 0 { 20.0 } else { -20.0 })
            .collect();
        if decode_sc(&spec, &llr).map_err(|e| e.to_string())? != u {
            return Err("SC reference failed a noiseless frame".into());
        }
        frames += 1;
    }
    Ok(format!("{frames} frames"))
}
