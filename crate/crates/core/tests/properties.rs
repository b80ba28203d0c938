use parasort::adaptive::{find_q, is_bitonic};
use parasort::bench::{sequence_lengths, sort_rate, speedup};
use parasort::distribution::generate;
use parasort::partition::PivotRule;
use parasort::radix::{counting_sort_pass, extract_digit, RadixConfig};
use parasort::{
    check_stability, multiset_equal, reference_sort, sort, verify_sorted, AlgorithmId, DistributionKind,
    DistributionSpec, Exec, Mode, PayloadMode, Runtime, SortConfig, SortKey, SortSequence,
};
use proptest::prelude::*;

fn small_config() -> SortConfig {
    SortConfig {
        small_threshold: 32,
        bucket_count: 8,
        oversampling: 4,
        ..SortConfig::default()
    }
}

/// Small chunks so parallel code paths run at proptest sizes.
fn runtime(workers: usize) -> Runtime {
    Runtime::with_chunk_size(workers, 64).unwrap()
}

fn keys32(max_len: usize) -> impl Strategy<Value = Vec<u32>> {
    prop_oneof![
        prop::collection::vec(any::<u32>(), 0..max_len),
        prop::collection::vec(0u32..8, 0..max_len),
    ]
}

fn keys64(max_len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop_oneof![
        prop::collection::vec(any::<u64>(), 0..max_len),
        prop::collection::vec(0u64..8, 0..max_len),
    ]
}

fn check_all<K: SortKey>(keys: Vec<K>, rt: &Runtime, cfg: &SortConfig) -> Result<(), TestCaseError> {
    for payload in [false, true] {
        let input = if payload {
            SortSequence::with_index_values(keys.clone())
        } else {
            SortSequence::keys_only(keys.clone())
        };
        for algo in AlgorithmId::ALL {
            for mode in Mode::ALL {
                let out = sort(algo, input.clone(), mode.exec(rt), cfg).unwrap().sequence;
                prop_assert!(verify_sorted(&out), "{algo} {mode} unsorted");
                prop_assert!(multiset_equal(&input, &out).unwrap(), "{algo} {mode} lost elements");
                if payload && algo.is_stable() {
                    prop_assert!(check_stability(&input, &out).unwrap(), "{algo} {mode} unstable");
                    prop_assert_eq!(&out, &reference_sort(&input));
                }
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_sort_sorts_u32(keys in keys32(700)) {
        check_all(keys, &runtime(3), &small_config())?;
    }

    #[test]
    fn every_sort_sorts_u64(keys in keys64(700)) {
        check_all(keys, &runtime(2), &small_config())?;
    }

    #[test]
    fn reference_sort_is_a_stable_sort(keys in keys32(500)) {
        let input = SortSequence::with_index_values(keys);
        let out = reference_sort(&input);
        prop_assert!(verify_sorted(&out));
        prop_assert!(check_stability(&input, &out).unwrap());
    }

    #[test]
    fn output_does_not_depend_on_worker_count(keys in keys32(1500), pivot in prop_oneof![Just(PivotRule::MinMax), Just(PivotRule::Median3)]) {
        let cfg = SortConfig { pivot, ..small_config() };
        let input = SortSequence::with_index_values(keys);
        let rts: Vec<Runtime> = [1, 2, 4, 8].into_iter().map(runtime).collect();
        for algo in AlgorithmId::ALL {
            let first = sort(algo, input.clone(), Exec::Parallel(&rts[0]), &cfg).unwrap().sequence;
            for rt in &rts[1..] {
                let other = sort(algo, input.clone(), Exec::Parallel(rt), &cfg).unwrap().sequence;
                prop_assert_eq!(&first, &other, "{} with {} workers", algo, rt.workers());
            }
            let seq = sort(algo, input.clone(), Exec::Sequential, &cfg).unwrap().sequence;
            prop_assert_eq!(first.keys(), seq.keys(), "{}", algo);
            if algo.is_stable() {
                prop_assert_eq!(&first, &seq, "{}", algo);
            }
        }
    }

    #[test]
    fn radix_digit_width_does_not_change_output(keys in keys64(600)) {
        let input = SortSequence::with_index_values(keys);
        let rt = runtime(2);
        let base = sort(AlgorithmId::Radix, input.clone(), Exec::Sequential, &small_config()).unwrap().sequence;
        for r in [1, 4, 8, 11, 16] {
            let cfg = SortConfig { radix: RadixConfig::new(r).unwrap(), ..small_config() };
            for mode in Mode::ALL {
                let out = sort(AlgorithmId::Radix, input.clone(), mode.exec(&rt), &cfg).unwrap().sequence;
                prop_assert_eq!(&out, &base, "r={} {}", r, mode);
            }
        }
    }

    #[test]
    fn radix_pass_sorts_by_low_bits(keys in prop::collection::vec(any::<u32>(), 0..600), r in 1u32..=12) {
        let cfg = RadixConfig::new(r).unwrap();
        let rt = runtime(3);
        let mut seq = SortSequence::with_index_values(keys);
        for i in 0..cfg.digit_count(32) {
            let s = counting_sort_pass(&seq, i, &cfg, Exec::Sequential).unwrap();
            let p = counting_sort_pass(&seq, i, &cfg, Exec::Parallel(&rt)).unwrap();
            prop_assert_eq!(&s, &p);
            let bits = ((i + 1) * r).min(32);
            let low = |k: u32| if bits == 32 { k } else { k & ((1u32 << bits) - 1) };
            prop_assert!(s.keys().windows(2).all(|w| low(w[0]) <= low(w[1])), "pass {}", i);
            seq = s;
        }
    }

    #[test]
    fn digits_reassemble_the_key(key in any::<u64>(), r in 1u32..=16) {
        let cfg = RadixConfig::new(r).unwrap();
        let mut rebuilt = 0u64;
        for i in 0..cfg.digit_count(64) {
            rebuilt |= (extract_digit(key, i, r).unwrap() as u64) << (i * r);
        }
        prop_assert_eq!(rebuilt, key);
    }

    #[test]
    fn scan_differences_are_the_counts(counts in prop::collection::vec(0u64..1_000_000, 0..3000), w in 1usize..6) {
        let rt = runtime(w);
        let scan = rt.exclusive_scan(&counts).unwrap();
        prop_assert_eq!(scan.len(), counts.len());
        if let Some(&first) = scan.first() {
            prop_assert_eq!(first, 0);
        }
        for i in 1..counts.len() {
            prop_assert_eq!(scan[i] - scan[i - 1], counts[i - 1]);
        }
    }

    #[test]
    fn min_max_matches_fold(keys in prop::collection::vec(any::<u32>(), 1..4096), w in 1usize..9) {
        let rt = runtime(w);
        let expected = (*keys.iter().min().unwrap(), *keys.iter().max().unwrap());
        prop_assert_eq!(rt.reduce_min_max(&keys).unwrap(), expected);
    }

    #[test]
    fn find_q_separates_the_halves(
        len in prop_oneof![Just(16usize), Just(32usize)],
        seed in prop::collection::vec(0u32..20, 32),
        peak in 0usize..32,
        rot in 0usize..32,
    ) {
        let mut up: Vec<u32> = seed[..len].to_vec();
        let peak = peak % len;
        up[..peak].sort_unstable();
        up[peak..].sort_unstable_by(|a, b| b.cmp(a));
        up.rotate_left(rot % len);
        prop_assume!(is_bitonic(&up));
        let m = len / 2;
        let (h1, h2) = up.split_at(m);
        let shift = find_q(h1, h2).unwrap();
        let mut a = h1.to_vec();
        let mut b = h2.to_vec();
        for i in shift.exchanged(m) {
            std::mem::swap(&mut a[i], &mut b[i]);
        }
        prop_assert!(a.iter().max() <= b.iter().min(), "q={} does not separate {:?}", shift.q, up);
        prop_assert!(is_bitonic(&a) && is_bitonic(&b));
    }

    #[test]
    fn generation_is_pure(seed in any::<u64>(), n in 0usize..2000, k in 0usize..6) {
        let spec = DistributionSpec::new(DistributionKind::ALL[k], seed);
        let a = generate::<u32>(&spec, n, PayloadMode::KeyValue).unwrap();
        let b = generate::<u32>(&spec, n, PayloadMode::KeyValue).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn length_schedule(min in 1u32..20, extra in 0u32..8, nonregular in any::<bool>()) {
        let max = min + extra;
        let lens = sequence_lengths(min, max, nonregular);
        let regular = (max - min + 1) as usize;
        prop_assert_eq!(lens.len(), if nonregular { 2 * regular - 1 } else { regular });
        prop_assert!(lens.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(*lens.last().unwrap(), 1usize << max);
    }

    #[test]
    fn rate_and_speedup_formulas(n in 1usize..1 << 30, t in 1e-6f64..10.0, s in 1e-3f64..1e4) {
        let rate = sort_rate(n, t).unwrap();
        let expected = n as f64 / t / 1e6;
        prop_assert!(((rate - expected) / expected).abs() < 1e-9);
        let sp = speedup(rate * s, rate).unwrap();
        prop_assert!(((sp - s) / s).abs() < 1e-9);
    }
}
