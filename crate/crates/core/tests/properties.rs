use proptest::prelude::*;

use polar_bp::code::polar_transform;
use polar_bp::config::RunConfig;
use polar_bp::sim::{classify_error, wilson_interval, ErrorClass, WINDOW};
use polar_bp::{CrcConfig, PermutationEvent, StrideSchedule};

fn bit_vec(len: impl Into<prop::collection::SizeRange>) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, len)
}

/// A chain of partial-permutation choices, resolved against whatever
/// subgraphs are eligible when each step is applied.
fn event_choices() -> impl Strategy<Value = Vec<(usize, usize, usize, Vec<usize>)>> {
    prop::collection::vec((0usize..64, 0usize..64, 0usize..64, Just(()).prop_perturb(|_, mut rng| {
        let mut p: Vec<usize> = (0..6).collect();
        loop {
            for i in (1..p.len()).rev() {
                p.swap(i, rng.random_range(0..=i));
            }
            if p.iter().enumerate().all(|(i, &s)| i != s) {
                return p;
            }
        }
    })), 0..12)
}

/// Restricts a derangement of `0..6` to `0..len` while keeping it fixed-point free.
fn shrink_derangement(p: &[usize], len: usize) -> Vec<usize> {
    let mut order: Vec<usize> = p.iter().copied().filter(|&s| s < len).collect();
    // a cyclic shift has no fixed points; fall back to it when the
    // restriction happens to fix one
    if order.iter().enumerate().any(|(i, &s)| i == s) {
        order = (0..len).map(|i| (i + 1) % len).collect();
    }
    order
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn crc_attach_then_check_passes(payload in bit_vec(1..200)) {
        let crc = CrcConfig::crc24a();
        let word = crc.attach(&payload).unwrap();
        prop_assert_eq!(word.len(), payload.len() + 24);
        prop_assert_eq!(&word[..payload.len()], &payload[..]);
        prop_assert!(crc.check(&word).unwrap());
    }

    #[test]
    fn crc_detects_single_flips(payload in bit_vec(1..200), pos in any::<prop::sample::Index>()) {
        let crc = CrcConfig::crc24a();
        let mut word = crc.attach(&payload).unwrap();
        let i = pos.index(word.len());
        word[i] ^= 1;
        prop_assert!(!crc.check(&word).unwrap());
    }

    #[test]
    fn transform_is_an_involution(u in (1usize..7).prop_flat_map(|n| bit_vec(1usize << n))) {
        let mut x = u.clone();
        polar_transform(&mut x);
        polar_transform(&mut x);
        prop_assert_eq!(x, u);
    }

    #[test]
    fn permuted_graphs_encode_like_the_transform(
        n in 3usize..7,
        full in prop::option::of(Just(()).prop_perturb(|_, mut rng| rng.random::<u64>())),
        chain in event_choices(),
        seed in any::<u64>(),
    ) {
        let big_n = 1usize << n;
        let mut s = StrideSchedule::identity(big_n).unwrap();
        if let Some(key) = full {
            // any stage order: sort stage indices by a hashed key
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&i| (key.rotate_left(i as u32 * 7)) ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            s = s.full_permute(&order).unwrap();
        }
        for (a, b, c, p) in chain {
            let range = 2 + a % (n - 1);
            let level = 1 + b % (n - range + 1);
            let eligible = s.eligible_subgraphs(level, range);
            if eligible.is_empty() {
                continue;
            }
            let sub = eligible[c % eligible.len()];
            let ev = PermutationEvent::new(n, range, level, sub, shrink_derangement(&p, range)).unwrap();
            let before = s.modified_nodes(&ev).len();
            prop_assert_eq!(before, ev.n_zero);
            s = s.partial_permute(&ev).unwrap();
            prop_assert!(s.validate().is_ok());
        }
        let u: Vec<u8> = (0..big_n).map(|i| ((seed >> (i % 64)) & 1) as u8 ^ (i as u8 & 1)).collect();
        let mut x = u.clone();
        polar_transform(&mut x);
        prop_assert_eq!(s.graph_encode(&u).unwrap(), x);
    }

    #[test]
    fn classifier_partitions_traces(
        trace in prop::collection::vec(0u64..4, 1..60),
        stopped in any::<bool>(),
        crc_pass in any::<bool>(),
    ) {
        let class = classify_error(&trace, stopped, crc_pass).unwrap();
        prop_assert_ne!(class, ErrorClass::None);
        let tail = &trace[trace.len().saturating_sub(WINDOW)..];
        let constant = tail.iter().all(|&d| d == tail[0]);
        if stopped || crc_pass || constant {
            prop_assert_eq!(class, ErrorClass::FalseConverged);
        } else {
            prop_assert_ne!(class, ErrorClass::FalseConverged);
        }
    }

    #[test]
    fn wilson_interval_brackets_the_estimate(trials in 1u64..100_000, frac in 0.0f64..=1.0) {
        let k = ((trials as f64) * frac).round() as u64;
        let (lo, hi) = wilson_interval(k, trials);
        let p = k as f64 / trials as f64;
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
        prop_assert!(hi - lo > 0.0);
    }

    #[test]
    fn config_text_round_trips(
        max_iters in 1usize..10_000,
        d in 1usize..64,
        n_min in 1usize..64,
        seed in any::<u64>(),
        db in prop::collection::vec(-20i32..100, 1..6),
        trials in prop::option::of(1u64..1_000_000),
    ) {
        let cfg = RunConfig {
            max_iters,
            d,
            n_min,
            seed,
            ebn0: Some(db.iter().map(|&v| v as f64 / 4.0).collect()),
            trials,
            ..RunConfig::default()
        };
        let back = RunConfig::from_text(&cfg.to_text()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
