//! Acceptance suite: every criterion at its stated tolerance, one PASS/FAIL
//! line each. Runs as a plain binary so the lines always reach the console.
//!
//! `cargo test --test acceptance` runs everything; pass criterion ids to run
//! a subset, e.g. `cargo test --test acceptance -- 3 7 osc`.

use std::collections::HashSet;
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;

use polar_bp::code::polar_transform;
use polar_bp::decoders::{decode_sc, rng_for, DecodeRng, PermutationRecord, PermutationSnapshot};
use polar_bp::sim::{
    awgn_llr, modulate_qpsk, run_trial, sweep, wilson_interval, ChannelConfig, PointStats, ResultWriter, StopRule,
    TrialRecord,
};
use polar_bp::trellis::{n_zero, rederived_diff};
use polar_bp::{CodeSpec, CrcConfig, Decoder, DecoderParams, PermutationEvent, StrideSchedule, Variant};

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bits(rng: &mut DecodeRng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
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

/// Every derangement of `0..len`, lexicographic.
fn all_derangements(len: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let len = used.len();
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for s in 0..len {
            if !used[s] && s != prefix.len() {
                used[s] = true;
                prefix.push(s);
                go(prefix, used, out);
                prefix.pop();
                used[s] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; len], &mut out);
    out
}

/// `G_N = F^{(x)n}` by repeated Kronecker products with `F = [[1, 0], [1, 1]]`.
fn dense_generator(n: usize) -> Vec<Vec<u8>> {
    const F: [[u8; 2]; 2] = [[1, 0], [1, 1]];
    let mut g = vec![vec![1u8]];
    while g.len() < n {
        let m = g.len();
        g = (0..2 * m)
            .map(|i| (0..2 * m).map(|j| F[i / m][j / m] & g[i % m][j % m]).collect())
            .collect();
    }
    g
}

fn dense_encode(g: &[Vec<u8>], u: &[u8]) -> Vec<u8> {
    let n = u.len();
    (0..n).map(|j| (0..n).fold(0u8, |acc, i| acc ^ (u[i] & g[i][j]))).collect()
}

fn reference_encode(u: &[u8]) -> Vec<u8> {
    let mut x = u.to_vec();
    polar_transform(&mut x);
    x
}

fn criterion_1() -> Verdict {
    let mut rng = rng_for(1, 0);
    let mut cases = 0usize;
    for n in [2usize, 4, 8, 16, 32, 64] {
        let g = dense_generator(n);
        let sched = StrideSchedule::identity(n).map_err(|e| e.to_string())?;
        let inputs: Vec<Vec<u8>> = if n <= 8 {
            (0..1u32 << n).map(|w| (0..n).map(|i| ((w >> i) & 1) as u8).collect()).collect()
        } else {
            (0..1000).map(|_| bits(&mut rng, n)).collect()
        };
        for u in &inputs {
            let x = sched.graph_encode(u).map_err(|e| e.to_string())?;
            ensure(x == dense_encode(&g, u), || format!("N={n}: graph encoding differs from u G_N"))?;
        }
        cases += inputs.len();
    }
    Ok(format!("{cases} inputs, N = 2..64, exact"))
}

fn criterion_2() -> Verdict {
    let mut rng = rng_for(2, 0);
    let (mut full, mut partial) = (0usize, 0usize);
    for n in [8usize, 16, 32] {
        let stages = n.trailing_zeros() as usize;
        let id = StrideSchedule::identity(n).map_err(|e| e.to_string())?;
        for comp in 0..500 {
            let mut s = id.clone();
            for _ in 0..10 {
                if rng.random_bool(0.3) {
                    // a full permutation rewires the original graph
                    let mut order: Vec<usize> = (0..stages).collect();
                    order.shuffle(&mut rng);
                    s = id.full_permute(&order).map_err(|e| e.to_string())?;
                    full += 1;
                } else {
                    let range = rng.random_range(2..=stages);
                    let level = rng.random_range(1..=stages - range + 1);
                    let eligible = s.eligible_subgraphs(level, range);
                    let Some(&sub) = eligible.get(rng.random_range(0..eligible.len().max(1))) else {
                        continue;
                    };
                    let ev = PermutationEvent::new(stages, range, level, sub, derangement(&mut rng, range))
                        .map_err(|e| e.to_string())?;
                    s = s.partial_permute(&ev).map_err(|e| e.to_string())?;
                    partial += 1;
                }
                s.validate().map_err(|e| format!("N={n} composition {comp}: {e}"))?;
            }
            let inputs: Vec<Vec<u8>> = if n == 8 {
                (0..256u32).map(|w| (0..8).map(|i| ((w >> i) & 1) as u8).collect()).collect()
            } else {
                (0..32).map(|_| bits(&mut rng, n)).collect()
            };
            for u in &inputs {
                let x = s.graph_encode(u).map_err(|e| e.to_string())?;
                ensure(x == reference_encode(u), || format!("N={n} composition {comp}: encoding changed"))?;
            }
        }
    }
    Ok(format!("1500 compositions ({full} full, {partial} partial events), exact"))
}

fn criterion_3() -> Verdict {
    let mut rng = rng_for(3, 0);
    let mut events = 0usize;
    for n in [8usize, 16, 32, 64] {
        let stages = n.trailing_zeros() as usize;
        let id = StrideSchedule::identity(n).map_err(|e| e.to_string())?;
        // a few non-trivial base graphs as well as the original one
        let mut bases = vec![id.clone()];
        for _ in 0..3 {
            let mut s = id.clone();
            for _ in 0..4 {
                let range = rng.random_range(2..=stages);
                let level = rng.random_range(1..=stages - range + 1);
                let eligible = s.eligible_subgraphs(level, range);
                if let Some(&sub) = eligible.first() {
                    let ev = PermutationEvent::new(stages, range, level, sub, derangement(&mut rng, range))
                        .map_err(|e| e.to_string())?;
                    s = s.partial_permute(&ev).map_err(|e| e.to_string())?;
                }
            }
            bases.push(s);
        }
        for (b, base) in bases.iter().enumerate() {
            for range in 2..=stages {
                let orders = all_derangements(range);
                for level in 1..=stages - range + 1 {
                    let count = n >> (level + range - 1);
                    for sub in 0..count {
                        if !base.window_is_uniform(level, range, sub) {
                            ensure(b > 0, || format!("N={n}: original graph rejects a window"))?;
                            continue;
                        }
                        // the closed form depends only on (level, range)
                        let expect = 1usize << (level + range - 1);
                        let expect = expect * (range - 1);
                        for order in &orders {
                            let ev = PermutationEvent::new(stages, range, level, sub, order.clone())
                                .map_err(|e| e.to_string())?;
                            ensure(ev.n_zero == expect && n_zero(level, range) == expect, || {
                                format!("N={n} level={level} range={range}: N_zero formula")
                            })?;
                            let after = base.partial_permute(&ev).map_err(|e| e.to_string())?;
                            let mut nodes = base.modified_nodes(&ev);
                            nodes.sort_unstable();
                            ensure(nodes.len() == expect, || {
                                format!("N={n} level={level} range={range} sub={sub}: {} nodes, want {expect}", nodes.len())
                            })?;
                            ensure(nodes == rederived_diff(base, &after), || {
                                format!("N={n} level={level} range={range} sub={sub} order={order:?}: brute-force diff differs")
                            })?;
                            events += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{events} (event, stage order) cases over 16 base graphs, exact"))
}

/// Shared by criteria 4 and 5: seeded PP-BP decodes at N = 256 that run to
/// the iteration limit, with every permutation observed.
struct PpbpAudit {
    runs: usize,
    events: usize,
    gaps: usize,
    gap_error: Option<String>,
    retention_error: Option<String>,
    nodes_checked: usize,
}

fn ppbp_audit() -> Result<PpbpAudit, String> {
    let spec = CodeSpec::construct(256, 152, 24, 0.0).map_err(|e| e.to_string())?;
    let crc = CrcConfig::crc24a();
    let n = spec.stages;
    // the large-budget row (full-width permutations allowed) and the
    // limited-budget row, both scaled to N = 256
    let long = DecoderParams {
        max_iters: 1000,
        p_range: n,
        p_level: n - 1,
        d: 256 * (n - 1) / 100,
        n_min: 15,
        ..DecoderParams::new(Variant::Ppbp, n)
    };
    let short = DecoderParams { max_iters: 200, p_range: 2, p_level: n - 2, d: 8, n_min: 4, ..long.clone() };
    let mut audit = PpbpAudit { runs: 0, events: 0, gaps: 0, gap_error: None, retention_error: None, nodes_checked: 0 };
    let channel = ChannelConfig::new(0.5, spec.energy_rate()).map_err(|e| e.to_string())?;
    for params in [long, short] {
        let dec = Decoder::new(spec.clone(), crc, params.clone()).map_err(|e| e.to_string())?;
        let mut exhausted = 0;
        let mut trial = 0u64;
        while exhausted < 50 {
            let mut rng = rng_for(4, trial);
            trial += 1;
            let info = bits(&mut rng, spec.payload_len());
            let u = spec.assemble_u(&info, &crc).map_err(|e| e.to_string())?;
            let x = spec.encode(&u).map_err(|e| e.to_string())?;
            let llr = awgn_llr(&modulate_qpsk(&x), &channel, &mut rng);
            let mut retention: Option<String> = None;
            let mut nodes = 0usize;
            let mut observer = |snap: &PermutationSnapshot<'_>| {
                let modified: HashSet<(usize, usize)> = snap.modified.iter().copied().collect();
                for c in 0..=n {
                    for r in 0..spec.block_len {
                        let (bl, br) = (snap.before.l(c, r), snap.before.r(c, r));
                        let (al, ar) = (snap.after.l(c, r), snap.after.r(c, r));
                        let ok = if modified.contains(&(c, r)) {
                            al == 0.0 && ar == 0.0
                        } else {
                            al.to_bits() == bl.to_bits() && ar.to_bits() == br.to_bits()
                        };
                        if !ok && retention.is_none() {
                            retention = Some(format!("iteration {} node ({c}, {r})", snap.iteration));
                        }
                        nodes += 1;
                    }
                }
            };
            let out = dec.decode_observed(&llr, &mut rng, &mut observer).map_err(|e| e.to_string())?;
            if out.stopped_early {
                continue;
            }
            exhausted += 1;
            audit.runs += 1;
            audit.nodes_checked += nodes;
            if audit.retention_error.is_none() {
                audit.retention_error = retention;
            }
            // gap audit from the permutation trace
            let mut expected = params.initial_reset(spec.block_len, n);
            for rec in &out.permutations {
                let PermutationRecord::Partial { iteration, event } = rec else {
                    audit.gap_error.get_or_insert("PP-BP recorded a full permutation".into());
                    continue;
                };
                if *iteration != expected && audit.gap_error.is_none() {
                    audit.gap_error = Some(format!("event at {iteration}, expected {expected}"));
                }
                expected = iteration + params.n_min.max(event.n_zero / params.d);
                audit.events += 1;
                audit.gaps += 1;
            }
            // no reset point was skipped before the budget ran out
            if expected <= params.max_iters && audit.gap_error.is_none() {
                audit.gap_error = Some(format!("missing event at {expected}"));
            }
            if out.permutations_used != out.permutations.len() {
                audit.gap_error.get_or_insert("permutations_used disagrees with the trace".into());
            }
        }
    }
    Ok(audit)
}

fn criterion_4(audit: &Result<PpbpAudit, String>) -> Verdict {
    let a = audit.as_ref().map_err(Clone::clone)?;
    ensure(a.runs == 100, || format!("only {} exhausted runs", a.runs))?;
    ensure(a.events > 100, || format!("only {} permutation events", a.events))?;
    match &a.gap_error {
        Some(e) => Err(e.clone()),
        None => Ok(format!("{} runs, {} gaps all equal max(N_min, floor(N_zero / D)), exact", a.runs, a.gaps)),
    }
}

fn criterion_5(audit: &Result<PpbpAudit, String>) -> Verdict {
    let a = audit.as_ref().map_err(Clone::clone)?;
    match &a.retention_error {
        Some(e) => Err(format!("state retention violated at {e}")),
        None => Ok(format!(
            "{} events, {} node snapshots: outside bit-identical, inside zero",
            a.events, a.nodes_checked
        )),
    }
}

fn criterion_6() -> Verdict {
    let crc = CrcConfig::crc24a();
    let mut frames = 0usize;
    let mut worst_bp = 0usize;
    for (big_n, k) in [(64usize, 40usize), (256, 152)] {
        let spec = CodeSpec::construct(big_n, k, 24, 0.0).map_err(|e| e.to_string())?;
        let n = spec.stages;
        let channel = ChannelConfig::with_variance(f64::INFINITY, spec.energy_rate(), 1e-6).map_err(|e| e.to_string())?;
        for v in Variant::ALL {
            let params = match v {
                Variant::Fpbp => DecoderParams::fpbp(n, 100, 200),
                _ => DecoderParams::new(v, n),
            };
            let warmup = params.warmup;
            let dec = Decoder::new(spec.clone(), crc, params).map_err(|e| e.to_string())?;
            for i in 0..200 {
                let t = run_trial(&dec, &channel, i, 6).map_err(|e| e.to_string())?;
                ensure(!t.frame_error, || format!("{v} N={big_n} trial {i} failed"))?;
                if v == Variant::Bp {
                    ensure(t.outcome.stopped_early && t.outcome.iterations_used <= warmup + n, || {
                        format!("BP N={big_n} trial {i} took {} iterations", t.outcome.iterations_used)
                    })?;
                    worst_bp = worst_bp.max(t.outcome.iterations_used);
                }
                frames += 1;
            }
        }
        let mut rng = rng_for(6, big_n as u64);
        for i in 0..200 {
            let info = bits(&mut rng, spec.payload_len());
            let u = spec.assemble_u(&info, &crc).map_err(|e| e.to_string())?;
            let x = spec.encode(&u).map_err(|e| e.to_string())?;
            let llr = awgn_llr(&modulate_qpsk(&x), &channel, &mut rng);
            let u_hat = decode_sc(&spec, &llr[..big_n]).map_err(|e| e.to_string())?;
            ensure(u_hat == u, || format!("SC N={big_n} trial {i} failed"))?;
            frames += 1;
        }
    }
    Ok(format!("{frames} frames, 100% recovered; BP stopped by iteration {worst_bp}"))
}

fn criterion_7() -> Verdict {
    let channel = ChannelConfig::new(2.0, 0.5).map_err(|e| e.to_string())?;
    let mut rng = rng_for(7, 0);
    let samples = 1_000_000;
    let b = bits(&mut rng, samples);
    let llr = awgn_llr(&modulate_qpsk(&b), &channel, &mut rng);
    // fold both symbols onto the bit-0 distribution
    let v: Vec<f64> = llr.iter().zip(&b).map(|(&l, &bit)| if bit == 0 { l } else { -l }).collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let a2 = 0.5;
    let s2 = channel.noise_variance_per_dim;
    let (mu, sig2) = (2.0 * a2 / s2, 4.0 * a2 / s2);
    let se_mean = (sig2 / n).sqrt();
    let se_var = sig2 * (2.0 / (n - 1.0)).sqrt();
    let (zm, zv) = ((mean - mu) / se_mean, (var - sig2) / se_var);
    let detail = format!("mean {mean:.5} vs {mu:.5} ({zm:+.2} SE), variance {var:.5} vs {sig2:.5} ({zv:+.2} SE)");
    ensure(zm.abs() <= 3.0 && zv.abs() <= 3.0, || detail.clone())?;
    Ok(detail)
}

fn run_sweep(
    dec: &Decoder,
    points: &[f64],
    stop: StopRule,
    seed: u64,
    threads: usize,
    csv: Option<&Path>,
) -> Result<Vec<PointStats>, String> {
    let mut writer = match csv {
        Some(p) => Some(ResultWriter::create(p).map_err(|e| e.to_string())?),
        None => None,
    };
    let mut on_trial = |_: f64, _: &TrialRecord| {};
    let mut on_point = |s: &PointStats| match writer.as_mut() {
        Some(w) => w.append(s),
        None => Ok(()),
    };
    sweep(dec, points, stop, seed, threads, 0, &mut on_trial, &mut on_point).map_err(|e| e.to_string())
}

fn fmt_point(s: &PointStats) -> String {
    let (lo, hi) = s.fer_interval();
    format!("{:.1} dB FER {:.4} [{:.4}, {:.4}] ({} / {})", s.ebn0_db(), s.fer(), lo, hi, s.frame_errors, s.trials)
}

fn bp_128() -> Result<Decoder, String> {
    let spec = CodeSpec::construct(128, 88, 24, 0.0).map_err(|e| e.to_string())?;
    Decoder::new(spec, CrcConfig::crc24a(), DecoderParams::new(Variant::Bp, 7)).map_err(|e| e.to_string())
}

const SWEEP_SEED: u64 = 0x0c8;

fn criterion_8(dir: &Path) -> Verdict {
    let dec = bp_128()?;
    let pts = run_sweep(&dec, &[1.0, 2.0, 3.0], StopRule::Trials(10_000), SWEEP_SEED, 1, Some(&dir.join("p1.csv")))?;
    let detail = pts.iter().map(fmt_point).collect::<Vec<_>>().join("; ");
    ensure(pts[0].fer() > pts[1].fer() && pts[1].fer() > pts[2].fer(), || format!("not decreasing: {detail}"))?;
    ensure(pts[0].fer_interval().0 > pts[2].fer_interval().1, || format!("intervals overlap: {detail}"))?;
    Ok(detail)
}

fn criterion_11(dir: &Path) -> Verdict {
    let p1 = dir.join("p1.csv");
    if !p1.exists() {
        let dec = bp_128()?;
        run_sweep(&dec, &[1.0, 2.0, 3.0], StopRule::Trials(10_000), SWEEP_SEED, 1, Some(&p1))?;
    }
    let dec = bp_128()?;
    run_sweep(&dec, &[1.0, 2.0, 3.0], StopRule::Trials(10_000), SWEEP_SEED, 8, Some(&dir.join("p8.csv")))?;
    let read = |name: &str| std::fs::read(dir.join(name)).map_err(|e| e.to_string());
    ensure(read("p1.csv")? == read("p8.csv")?, || "CSV differs between 1 and 8 threads".into())?;
    ensure(read("p1.dat")? == read("p8.dat")?, || ".dat differs between 1 and 8 threads".into())?;
    Ok(format!("{} byte CSV identical at parallelism 1 and 8", read("p1.csv")?.len()))
}

fn criterion_9() -> Verdict {
    let spec = CodeSpec::construct(256, 152, 24, 0.0).map_err(|e| e.to_string())?;
    let stop = StopRule::FrameErrors { min_frame_errors: 100, max_trials: 1_000_000 };
    let mut res = Vec::new();
    for iters in [100usize, 400] {
        let params = DecoderParams { max_iters: iters, ..DecoderParams::new(Variant::Bp, spec.stages) };
        let dec = Decoder::new(spec.clone(), CrcConfig::crc24a(), params).map_err(|e| e.to_string())?;
        res.push(run_sweep(&dec, &[2.5], stop, 9, 1, None)?.remove(0));
    }
    let ((lo1, hi1), (lo4, hi4)) = (res[0].fer_interval(), res[1].fer_interval());
    let detail = format!("N_it,max 100: {}; 400: {}", fmt_point(&res[0]), fmt_point(&res[1]));
    ensure(res.iter().all(|s| s.frame_errors >= 100), || format!("too few errors: {detail}"))?;
    ensure(lo1 <= hi4 && lo4 <= hi1, || format!("intervals disjoint: {detail}"))?;
    Ok(detail)
}

fn criterion_10() -> Verdict {
    let spec = CodeSpec::construct(256, 152, 24, 0.0).map_err(|e| e.to_string())?;
    let n = spec.stages;
    let bp = DecoderParams::new(Variant::Bp, n);
    let pp = DecoderParams { p_range: 2, p_level: n - 2, d: 8, n_min: 4, ..DecoderParams::new(Variant::Ppbp, n) };
    let (low, high) = (1.5, 3.5);
    let mut hi_pts = Vec::new();
    let mut lo_pts = Vec::new();
    for params in [bp, pp] {
        let dec = Decoder::new(spec.clone(), CrcConfig::crc24a(), params).map_err(|e| e.to_string())?;
        let errors = StopRule::FrameErrors { min_frame_errors: 300, max_trials: 1_000_000 };
        hi_pts.push(run_sweep(&dec, &[high], errors, 10, 1, None)?.remove(0));
        lo_pts.push(run_sweep(&dec, &[low], StopRule::Trials(1000), 10, 1, None)?.remove(0));
    }
    let ratio = hi_pts[1].fer() / hi_pts[0].fer();
    let lat = lo_pts[1].avg_iterations() / lo_pts[0].avg_iterations();
    let detail = format!(
        "high point BP {} vs PP-BP {} (ratio {ratio:.3}); low point avg iterations BP {:.2} vs PP-BP {:.2} (ratio {lat:.3})",
        fmt_point(&hi_pts[0]),
        fmt_point(&hi_pts[1]),
        lo_pts[0].avg_iterations(),
        lo_pts[1].avg_iterations()
    );
    ensure(ratio <= 1.2, || format!("FER ratio above 1.2: {detail}"))?;
    ensure(lat <= 1.1, || format!("latency ratio above 1.1: {detail}"))?;
    Ok(detail)
}

/// Oscillation share of BP errors grows from 1 dB to 4 dB at N = 128.
fn oscillation_share() -> Verdict {
    let dec = bp_128()?;
    let stop = StopRule::FrameErrors { min_frame_errors: 300, max_trials: 1_000_000 };
    let pts = run_sweep(&dec, &[1.0, 4.0], stop, 12, 1, None)?;
    let share = |s: &PointStats| s.oscillation_share();
    let detail = format!(
        "1 dB: {}/{} oscillating ({:.3}); 4 dB: {}/{} ({:.3})",
        pts[0].n_osc,
        pts[0].frame_errors,
        share(&pts[0]),
        pts[1].n_osc,
        pts[1].frame_errors,
        share(&pts[1])
    );
    ensure(pts.iter().all(|s| s.frame_errors >= 100), || format!("too few errors: {detail}"))?;
    ensure(share(&pts[1]) > share(&pts[0]), || detail.clone())?;
    // the two shares differ by more than sampling noise
    let (_, hi1) = wilson_interval(pts[0].n_osc, pts[0].frame_errors);
    let (lo4, _) = wilson_interval(pts[1].n_osc, pts[1].frame_errors);
    Ok(format!("{detail}; intervals {}", if lo4 > hi1 { "disjoint" } else { "overlap" }))
}

fn main() {
    let wanted: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let run = |id: &str| wanted.is_empty() || wanted.iter().any(|w| w == id);
    let dir = tempfile::tempdir().expect("temporary directory");
    let started = Instant::now();
    let mut failures = 0;
    let mut report = |id: &str, name: &str, f: &mut dyn FnMut() -> Verdict| {
        if !run(id) {
            return;
        }
        let t = Instant::now();
        let verdict = f();
        let secs = t.elapsed().as_secs_f64();
        match verdict {
            Ok(d) => println!("PASS [{id:>3}] {name} ({secs:.1}s): {d}"),
            Err(d) => {
                failures += 1;
                println!("FAIL [{id:>3}] {name} ({secs:.1}s): {d}");
            }
        }
    };
    report("1", "encoding oracle", &mut criterion_1);
    report("2", "over-complete representation", &mut criterion_2);
    report("3", "N_zero equivalence", &mut criterion_3);
    let audit = if run("4") || run("5") { ppbp_audit() } else { Err("skipped".into()) };
    report("4", "reset-gap trace audit", &mut || criterion_4(&audit));
    report("5", "state retention", &mut || criterion_5(&audit));
    report("6", "noiseless decode", &mut criterion_6);
    report("7", "channel LLR moments", &mut criterion_7);
    report("8", "FER monotonicity", &mut || criterion_8(dir.path()));
    report("9", "BP iteration saturation", &mut criterion_9);
    report("10", "PP-BP does no harm", &mut criterion_10);
    report("11", "parallelism determinism", &mut || criterion_11(dir.path()));
    report("osc", "oscillation share grows with SNR", &mut oscillation_share);
    println!("acceptance: {} failure(s) in {:.1}s", failures, started.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
