//! Acceptance suite: one line per criterion. Run with
//! `cargo test -p parasort --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use parasort::adaptive::{adaptive_bitonic_merge, build_bitonic_tree, find_q, is_bitonic, Direction, QShift};
use parasort::bench::{join_speedups, sequence_lengths, sort_rate, speedup};
use parasort::bitonic::{bitonic_sort_par, bitonic_sort_seq, multistep_bitonic_sort, schedule};
use parasort::distribution::generate;
use parasort::report::{read_csv_from, write_csv_to};
use parasort::rng::{Mt19937, Mt19937_64};
use parasort::{
    check_stability, multiset_equal, reference_sort, run_benchmark, sort, verify_sorted, AlgorithmId,
    BenchmarkConfig, DistributionKind, DistributionSpec, ElementWidth, Exec, Measurement, Mode, PayloadMode,
    Runtime, SortConfig, SortKey, SortSequence,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn grid_width<K: SortKey>(rt: &Runtime, cfg: &SortConfig, lengths: &[usize]) -> Result<usize, String> {
    let mut runs = 0;
    for payload in [PayloadMode::KeysOnly, PayloadMode::KeyValue] {
        for (d, kind) in DistributionKind::ALL.into_iter().enumerate() {
            for &n in lengths {
                let spec = DistributionSpec::new(kind, 1000 + d as u64);
                let input = generate::<K>(&spec, n, payload).map_err(|e| e.to_string())?;
                for algo in AlgorithmId::ALL {
                    for mode in Mode::ALL {
                        let out = sort(algo, input.clone(), mode.exec(rt), cfg).map_err(|e| e.to_string())?;
                        let cell = || format!("{algo} {mode} {}-bit {payload} {kind} n={n}", K::BITS);
                        ensure(verify_sorted(&out.sequence), || format!("{} is not sorted", cell()))?;
                        ensure(multiset_equal(&input, &out.sequence).unwrap(), || {
                            format!("{} is not a permutation", cell())
                        })?;
                        runs += 1;
                    }
                }
            }
        }
    }
    Ok(runs)
}

fn correctness_grid() -> Outcome {
    let rt = Runtime::new(4).unwrap();
    let cfg = SortConfig::default();
    let lengths = [0, 1, 2, 3, 10, 1023, 1024, 1025, 1 << 15, (1 << 15) + (1 << 14)];
    let runs = grid_width::<u32>(&rt, &cfg, &lengths)? + grid_width::<u64>(&rt, &cfg, &lengths)?;
    Ok(format!("{runs} sorts verified"))
}

fn stability() -> Outcome {
    let rt = Runtime::new(4).unwrap();
    let cfg = SortConfig::default();
    let mut rng = Mt19937::new(7);
    let keys: Vec<u32> = (0..1 << 14).map(|_| rng.next_u32() % 16).collect();
    let keys64: Vec<u64> = keys.iter().map(|&k| k as u64 * 0x1_0000_0001).collect();
    let input = SortSequence::with_index_values(keys);
    let input64 = SortSequence::with_index_values(keys64);
    let expected = reference_sort(&input);
    let expected64 = reference_sort(&input64);
    for algo in [AlgorithmId::Merge, AlgorithmId::Radix] {
        for mode in Mode::ALL {
            let out = sort(algo, input.clone(), mode.exec(&rt), &cfg).unwrap().sequence;
            ensure(check_stability(&input, &out).unwrap(), || format!("{algo} {mode} is unstable"))?;
            ensure(out == expected, || format!("{algo} {mode} differs from the reference"))?;
            let out = sort(algo, input64.clone(), mode.exec(&rt), &cfg).unwrap().sequence;
            ensure(out == expected64, || format!("{algo} {mode} 64-bit differs from the reference"))?;
        }
    }
    Ok("merge and radix match the stable reference in both modes".into())
}

fn apply_schedule(bits: &mut [u8]) {
    for step in schedule(bits.len()) {
        for (i, j) in step.pairs(bits.len()) {
            if bits[i] > bits[j] {
                bits.swap(i, j);
            }
        }
    }
}

fn network_certification() -> Outcome {
    for n in [2usize, 4, 8, 16] {
        for mask in 0u32..1 << n {
            let input: Vec<u8> = (0..n).map(|i| (mask >> i & 1) as u8).collect();
            let mut bits = input.clone();
            apply_schedule(&mut bits);
            ensure(bits.windows(2).all(|w| w[0] <= w[1]), || format!("schedule fails on {input:?}"))?;
            let keys: Vec<u32> = input.iter().map(|&b| b as u32).collect();
            let out = bitonic_sort_seq(SortSequence::keys_only(keys)).sequence;
            ensure(verify_sorted(&out), || format!("sort fails on {input:?}"))?;
        }
    }
    for k in 0..=10u32 {
        let n = 1usize << k;
        let enumerated: u64 = schedule(n).iter().map(|s| s.pairs(n).len() as u64).sum();
        let formula = (n as u64) * k as u64 * (k as u64 + 1) / 4;
        let keys: Vec<u32> = (0..n as u32).rev().collect();
        let counted = bitonic_sort_seq(SortSequence::keys_only(keys)).comparator_count;
        ensure(enumerated == formula && counted == formula, || {
            format!("k={k}: enumerated {enumerated}, counted {counted}, formula {formula}")
        })?;
    }
    Ok("0-1 principle for n=2,4,8,16; comparator counts for k<=10".into())
}

fn multistep_equivalence() -> Outcome {
    let rt = Runtime::with_chunk_size(4, 256).unwrap();
    let mut rng = Mt19937_64::new(11);
    for case in 0..200 {
        let e = 8 + (rng.next_u64() % 5) as u32;
        let fusion = 2 + (rng.next_u64() % 3) as usize;
        let keys: Vec<u64> = (0..1usize << e).map(|_| rng.next_u64() % 1000).collect();
        let input = SortSequence::with_index_values(keys);
        let single = bitonic_sort_par(input.clone(), &rt);
        let fused = multistep_bitonic_sort(input, Exec::Parallel(&rt), fusion).unwrap();
        ensure(fused.sequence == single.sequence, || format!("case {case}: n=2^{e} M={fusion} differs"))?;
        ensure(fused.stats.phase_count < single.stats.phase_count, || {
            format!(
                "case {case}: fused {} phases, unfused {}",
                fused.stats.phase_count, single.stats.phase_count
            )
        })?;
    }
    Ok("200 inputs bit-identical with fewer phases".into())
}

fn random_bitonic(rng: &mut Mt19937, len: usize) -> Vec<u32> {
    let mut v: Vec<u32> = (0..len).map(|_| rng.next_u32() % 24).collect();
    let peak = rng.next_u32() as usize % (len + 1);
    v[..peak].sort_unstable();
    v[peak..].sort_unstable_by(|a, b| b.cmp(a));
    v.rotate_left(rng.next_u32() as usize % len);
    v
}

fn separates(h1: &[u32], h2: &[u32], shift: QShift) -> bool {
    let m = h1.len();
    let (mut a, mut b) = (h1.to_vec(), h2.to_vec());
    for i in shift.exchanged(m) {
        std::mem::swap(&mut a[i], &mut b[i]);
    }
    a.iter().max() <= b.iter().min()
}

fn adaptive_bitonic() -> Outcome {
    let mut rng = Mt19937::new(13);
    for case in 0..1000 {
        let len = if case % 2 == 0 { 16 } else { 32 };
        let seq = random_bitonic(&mut rng, len);
        let m = len / 2;
        let (h1, h2) = seq.split_at(m);
        let got = find_q(h1, h2).map_err(|e| e.to_string())?;
        let brute = (0..=m)
            .map(|q| QShift {
                q,
                orientation: got.orientation,
            })
            .find(|&s| separates(h1, h2, s));
        ensure(brute == Some(got), || format!("{seq:?}: find_q {got:?}, brute force {brute:?}"))?;
    }
    let mut checked = 0;
    for mask in 0u32..1 << 16 {
        let keys: Vec<u32> = (0..16).map(|i| mask >> i & 1).collect();
        if !is_bitonic(&keys) {
            continue;
        }
        for dir in [Direction::Ascending, Direction::Descending] {
            let mut tree = build_bitonic_tree(&keys).unwrap();
            adaptive_bitonic_merge(&mut tree, dir);
            let out = tree.to_vec();
            let ok = match dir {
                Direction::Ascending => out.windows(2).all(|w| w[0] <= w[1]),
                Direction::Descending => out.windows(2).all(|w| w[0] >= w[1]),
            };
            ensure(ok, || format!("{keys:?} {dir:?} gives {out:?}"))?;
        }
        checked += 1;
    }
    let mut rng = Mt19937::new(17);
    let mut growth = Vec::new();
    for k in 4..=16u32 {
        let seq = random_bitonic(&mut rng, 1 << k);
        let mut tree = build_bitonic_tree(&seq).unwrap();
        let stats = adaptive_bitonic_merge(&mut tree, Direction::Ascending);
        ensure(stats.max_touches <= 2 * k as u64 + 2, || {
            format!("n=2^{k}: {} touches in one walk", stats.max_touches)
        })?;
        growth.push(format!("2^{k}:{}", stats.max_touches));
    }
    Ok(format!(
        "1000 shifts match brute force; {checked} 0-1 sequences merged; max touches per walk {}",
        growth.join(" ")
    ))
}

fn quicksort_fast_path() -> Outcome {
    let rt = Runtime::new(4).unwrap();
    let cfg = SortConfig::default();
    let spec = DistributionSpec::new(DistributionKind::Zero, 1);
    for n in [0usize, 1, 2, 1000, 1 << 15, (1 << 15) + (1 << 14), 1 << 20] {
        for mode in Mode::ALL {
            let input = generate::<u32>(&spec, n, PayloadMode::KeysOnly).unwrap();
            let out = sort(AlgorithmId::Quick, input, mode.exec(&rt), &cfg).unwrap();
            ensure(out.partition_pass_count == 0, || {
                format!("{mode} n={n}: {} partition passes", out.partition_pass_count)
            })?;
            let input = generate::<u64>(&spec, n, PayloadMode::KeyValue).unwrap();
            let out = sort(AlgorithmId::Quick, input, mode.exec(&rt), &cfg).unwrap();
            ensure(out.partition_pass_count == 0, || format!("{mode} 64-bit n={n}: passes taken"))?;
        }
    }
    Ok("zero input needs no partition pass up to n=2^20".into())
}

fn determinism_case<K: SortKey>(input: &SortSequence<K>, rts: &[Runtime], cfg: &SortConfig) -> Result<(), String> {
    for algo in AlgorithmId::ALL {
        let first = sort(algo, input.clone(), Exec::Parallel(&rts[0]), cfg).unwrap().sequence;
        for rt in &rts[1..] {
            let other = sort(algo, input.clone(), Exec::Parallel(rt), cfg).unwrap().sequence;
            ensure(other.keys() == first.keys(), || format!("{algo}: keys differ with {} workers", rt.workers()))?;
        }
        if algo.is_stable() {
            let seq = sort(algo, input.clone(), Exec::Sequential, cfg).unwrap().sequence;
            ensure(seq == first, || format!("{algo}: parallel output differs from sequential"))?;
        }
    }
    Ok(())
}

fn parallel_determinism() -> Outcome {
    let cfg = SortConfig::default();
    let mut cases = 0;
    for chunk in [4096, 256] {
        let rts: Vec<Runtime> = [1, 2, 4, 8]
            .into_iter()
            .map(|w| Runtime::with_chunk_size(w, chunk).unwrap())
            .collect();
        for kind in [DistributionKind::Uniform, DistributionKind::Gaussian, DistributionKind::Bucket] {
            let spec = DistributionSpec::new(kind, 21);
            let n = (1 << 16) + (1 << 15);
            determinism_case(&generate::<u32>(&spec, n, PayloadMode::KeyValue).unwrap(), &rts, &cfg)?;
            determinism_case(&generate::<u64>(&spec, n, PayloadMode::KeyValue).unwrap(), &rts, &cfg)?;
            cases += 2;
        }
        let mut rng = Mt19937::new(23);
        let dup: Vec<u32> = (0..50_000).map(|_| rng.next_u32() % 16).collect();
        determinism_case(&SortSequence::with_index_values(dup), &rts, &cfg)?;
        cases += 1;
    }
    Ok(format!("{cases} inputs identical across 1, 2, 4 and 8 workers"))
}

fn rng_conformance() -> Outcome {
    let mut mt = Mt19937::new(5489);
    let first = mt.next_u32();
    let tenth_thousand = (1..10_000).map(|_| mt.next_u32()).last().unwrap();
    let mut mt64 = Mt19937_64::new(5489);
    let tenth_thousand64 = (0..10_000).map(|_| mt64.next_u64()).last().unwrap();
    ensure(first == 3_499_211_612, || format!("first output {first}"))?;
    ensure(tenth_thousand == 4_123_659_995, || format!("10000th output {tenth_thousand}"))?;
    ensure(tenth_thousand64 == 9_981_545_732_273_789_042, || format!("64-bit 10000th output {tenth_thousand64}"))?;
    Ok("reference vectors reproduced".into())
}

fn close(a: f64, b: f64) -> bool {
    ((a - b) / b).abs() < 1e-9
}

fn harness_math() -> Outcome {
    let lens = sequence_lengths(15, 25, true);
    let mut expected = Vec::new();
    for e in 15..=25 {
        expected.push(1usize << e);
        if e < 25 {
            expected.push(3usize << (e - 1));
        }
    }
    ensure(lens == expected && lens.len() == 21, || format!("schedule {lens:?}"))?;
    ensure(sequence_lengths(15, 24, true).len() == 19, || "64-bit schedule length".into())?;
    for (n, t, rate) in [(1usize << 20, 0.010, 104.8576), (1_000_000, 1.0, 1.0), (49152, 0.001, 49.152)] {
        let got = sort_rate(n, t).unwrap();
        ensure(close(got, rate), || format!("sort_rate({n}, {t}) = {got}"))?;
    }
    ensure(sort_rate(10, 0.0).is_err() && sort_rate(10, -1.0).is_err(), || "non-positive time accepted".into())?;
    ensure(close(speedup(100.0, 10.0).unwrap(), 10.0) && close(speedup(5.0, 5.0).unwrap(), 1.0), || {
        "speedup formula".into()
    })?;

    let config = BenchmarkConfig {
        algorithms: vec![AlgorithmId::Radix, AlgorithmId::Merge],
        widths: vec![ElementWidth::W32],
        payloads: vec![PayloadMode::KeysOnly],
        distributions: vec![DistributionSpec::new(DistributionKind::Uniform, 1)],
        min_exp: 10,
        max_exp: 12,
        repetitions: 3,
        workers: 2,
        ..BenchmarkConfig::default()
    };
    let ms: Vec<Measurement> = run_benchmark(&config).map_err(|e| e.to_string())?;
    ensure(ms.iter().all(|m| m.is_valid()), || "invalid benchmark row".into())?;
    let joined = join_speedups(&ms).map_err(|e| e.to_string())?;
    ensure(joined.len() == ms.len() / 2, || format!("{} speedups for {} rows", joined.len(), ms.len()))?;
    let mut buf = Vec::new();
    write_csv_to(&ms, &mut buf).map_err(|e| e.to_string())?;
    let rows = read_csv_from(buf.as_slice()).map_err(|e| e.to_string())?;
    ensure(rows.len() == ms.len(), || "row count changed".into())?;
    for row in &rows {
        let recomputed = row.n as f64 / (row.mean_ms / 1e3) / 1e6;
        // Half a unit in the last place of each column, carried through the formula.
        let precision = 5e-4 + recomputed * 5e-7 / row.mean_ms + 1e-9;
        ensure((recomputed - row.sort_rate_mps).abs() <= precision, || {
            format!("n={} rate column {} recomputed {recomputed}", row.n, row.sort_rate_mps)
        })?;
    }
    Ok(format!("21 lengths; formulas exact; {} CSV rows round-trip", rows.len()))
}

fn performance() -> Outcome {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).max(4);
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let base = BenchmarkConfig {
        modes: Mode::ALL.to_vec(),
        widths: vec![ElementWidth::W32],
        payloads: vec![PayloadMode::KeysOnly],
        distributions: vec![DistributionSpec::new(DistributionKind::Uniform, 5489)],
        min_exp: 22,
        max_exp: 22,
        include_nonregular: false,
        repetitions: 3,
        warmup_runs: 1,
        workers,
        ..BenchmarkConfig::default()
    };
    let parallel = BenchmarkConfig {
        algorithms: vec![AlgorithmId::Radix, AlgorithmId::Merge, AlgorithmId::Sample],
        ..base.clone()
    };
    let bitonic = BenchmarkConfig {
        algorithms: vec![AlgorithmId::Bitonic],
        modes: vec![Mode::Sequential],
        ..base
    };
    let ms = run_benchmark(&parallel).map_err(|e| e.to_string())?;
    let bm = run_benchmark(&bitonic).map_err(|e| e.to_string())?;
    let mut problems = Vec::new();
    let mut report = Vec::new();
    for s in join_speedups(&ms).map_err(|e| e.to_string())? {
        report.push(format!("{} {:.2}x", s.cell.algorithm, s.speedup));
        if s.speedup < 1.5 {
            problems.push(format!("{} speedup {:.2} < 1.5", s.cell.algorithm, s.speedup));
        }
    }
    let radix_seq = ms
        .iter()
        .find(|m| m.algorithm == AlgorithmId::Radix && m.mode == Mode::Sequential)
        .map(|m| m.sort_rate)
        .unwrap_or(f64::NAN);
    let bitonic_seq = bm[0].sort_rate;
    let ratio = radix_seq / bitonic_seq;
    report.push(format!("radix/bitonic sequential {ratio:.2}x"));
    if ratio.is_nan() || ratio < 2.0 {
        problems.push(format!("sequential radix only {ratio:.2}x bitonic"));
    }
    let detail = format!("{workers} workers on {cores} core(s): {}", report.join(", "));
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", problems.join("; ")))
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    /// A soft criterion reports its result without failing the suite.
    soft: bool,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "correctness grid", soft: false, run: correctness_grid },
        Criterion { id: 2, name: "stability", soft: false, run: stability },
        Criterion { id: 3, name: "sorting network certification", soft: false, run: network_certification },
        Criterion { id: 4, name: "multistep equivalence", soft: false, run: multistep_equivalence },
        Criterion { id: 5, name: "adaptive bitonic", soft: false, run: adaptive_bitonic },
        Criterion { id: 6, name: "quicksort fast path", soft: false, run: quicksort_fast_path },
        Criterion { id: 7, name: "parallel determinism", soft: false, run: parallel_determinism },
        Criterion { id: 8, name: "RNG conformance", soft: false, run: rng_conformance },
        Criterion { id: 9, name: "harness math", soft: false, run: harness_math },
        Criterion { id: 10, name: "performance sanity (soft)", soft: true, run: performance },
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut hard_failures = 0;
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.contains(&c.id)) {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {} ({detail}) [{secs:.1}s]", c.id, c.name),
            Err(why) => {
                println!("criterion {:>2} FAIL  {} ({why}) [{secs:.1}s]", c.id, c.name);
                if !c.soft {
                    hard_failures += 1;
                }
            }
        }
    }
    if hard_failures > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
