//! Benchmark harness: length schedule, timed repetitions, sort rates and
//! speedups.

use std::collections::HashMap;
use std::time::Instant;

use crate::algorithm::{sort_any, AlgorithmId, Mode, SortConfig};
use crate::distribution::{generate_any, DistributionKind, DistributionSpec};
use crate::error::{Error, Result};
use crate::key::ElementWidth;
use crate::partition::PivotRule;
use crate::rng::DEFAULT_SEED;
use crate::runtime::{default_workers, Runtime};
use crate::sequence::{AnySequence, PayloadMode};

pub const DEFAULT_REPETITIONS: usize = 50;
pub const DEFAULT_WARMUP_RUNS: usize = 1;
pub const MIN_EXP: u32 = 15;
pub const FULL_MAX_EXP_W32: u32 = 25;
pub const FULL_MAX_EXP_W64: u32 = 24;
pub const DESK_MAX_EXP: u32 = 18;
/// Largest exponent the harness accepts.
pub const MAX_EXP_LIMIT: u32 = 30;

/// Lengths `2^e` for `e` in `[min_exp, max_exp]`, plus `2^e + 2^(e-1)` for
/// `e` in `[min_exp, max_exp - 1]` when `include_nonregular`, ascending.
pub fn sequence_lengths(min_exp: u32, max_exp: u32, include_nonregular: bool) -> Vec<usize> {
    let mut out = Vec::new();
    for e in min_exp..=max_exp {
        out.push(1usize << e);
        if include_nonregular && e < max_exp {
            out.push((1usize << e) + (1usize << e.saturating_sub(1)));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub algorithms: Vec<AlgorithmId>,
    pub modes: Vec<Mode>,
    pub widths: Vec<ElementWidth>,
    pub payloads: Vec<PayloadMode>,
    pub distributions: Vec<DistributionSpec>,
    pub min_exp: u32,
    pub max_exp: u32,
    /// Cap for 64-bit keys; `None` means `min(max_exp, 24)`.
    pub max_exp_w64: Option<u32>,
    pub include_nonregular: bool,
    pub repetitions: usize,
    pub warmup_runs: usize,
    pub seed: u64,
    pub workers: usize,
    /// Reuse one input for every repetition of a cell.
    pub fixed_input: bool,
    pub sort: SortConfig,
}

impl Default for BenchmarkConfig {
    /// The full grid at desk scale (exponents 15 to 18).
    fn default() -> Self {
        BenchmarkConfig {
            algorithms: AlgorithmId::ALL.to_vec(),
            modes: Mode::ALL.to_vec(),
            widths: vec![ElementWidth::W32, ElementWidth::W64],
            payloads: vec![PayloadMode::KeysOnly, PayloadMode::KeyValue],
            distributions: DistributionKind::ALL
                .into_iter()
                .map(|k| DistributionSpec::new(k, DEFAULT_SEED))
                .collect(),
            min_exp: MIN_EXP,
            max_exp: DESK_MAX_EXP,
            max_exp_w64: None,
            include_nonregular: true,
            repetitions: DEFAULT_REPETITIONS,
            warmup_runs: DEFAULT_WARMUP_RUNS,
            seed: DEFAULT_SEED,
            workers: default_workers(),
            fixed_input: false,
            sort: SortConfig::default(),
        }
    }
}

impl BenchmarkConfig {
    /// The grid over the full published length range.
    pub fn full_scale() -> Self {
        BenchmarkConfig {
            max_exp: FULL_MAX_EXP_W32,
            ..BenchmarkConfig::default()
        }
    }

    pub fn max_exp_for(&self, width: ElementWidth) -> u32 {
        match width {
            ElementWidth::W32 => self.max_exp,
            ElementWidth::W64 => self.max_exp_w64.unwrap_or(self.max_exp.min(FULL_MAX_EXP_W64)),
        }
    }

    pub fn lengths_for(&self, width: ElementWidth) -> Vec<usize> {
        let max = self.max_exp_for(width);
        if max < self.min_exp {
            return Vec::new();
        }
        sequence_lengths(self.min_exp, max, self.include_nonregular)
    }

    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("algorithms", self.algorithms.is_empty()),
            ("modes", self.modes.is_empty()),
            ("widths", self.widths.is_empty()),
            ("payloads", self.payloads.is_empty()),
            ("distributions", self.distributions.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::Config(format!("no {name} selected")));
        }
        if self.min_exp > self.max_exp {
            return Err(Error::Config(format!(
                "min exponent {} exceeds max exponent {}",
                self.min_exp, self.max_exp
            )));
        }
        if self.max_exp.max(self.max_exp_w64.unwrap_or(0)) > MAX_EXP_LIMIT {
            return Err(Error::Config(format!("exponents above {MAX_EXP_LIMIT} are not supported")));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        for d in &self.distributions {
            d.validate()?;
        }
        self.sort.validate()
    }
}

/// Timing summary of one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub algorithm: AlgorithmId,
    pub mode: Mode,
    pub width: ElementWidth,
    pub payload: PayloadMode,
    pub distribution: DistributionKind,
    pub n: usize,
    pub repetitions: usize,
    /// Seconds.
    pub mean_time: f64,
    /// Population standard deviation over the measured repetitions, seconds.
    pub stddev_time: f64,
    /// Millions of elements per second.
    pub sort_rate: f64,
    pub workers: usize,
    pub pivot: PivotRule,
    pub fusion: usize,
    pub radix_bits: u32,
    /// Why the cell was rejected; `None` for an accepted measurement.
    pub failure: Option<String>,
}

impl Measurement {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }

    /// Identity of the cell, independent of mode.
    pub fn cell_key(&self) -> CellKey {
        CellKey {
            algorithm: self.algorithm,
            width: self.width,
            payload: self.payload,
            distribution: self.distribution,
            n: self.n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub algorithm: AlgorithmId,
    pub width: ElementWidth,
    pub payload: PayloadMode,
    pub distribution: DistributionKind,
    pub n: usize,
}

impl std::fmt::Display for CellKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}/{}-bit/{}/{}/n={}",
            self.algorithm, self.width, self.payload, self.distribution, self.n
        )
    }
}

/// Millions of elements per second.
pub fn sort_rate(n: usize, mean_time_seconds: f64) -> Result<f64> {
    if mean_time_seconds.is_nan() || mean_time_seconds <= 0.0 {
        return Err(Error::NonPositiveTime(mean_time_seconds));
    }
    Ok(n as f64 / mean_time_seconds / 1e6)
}

pub fn speedup(parallel_rate: f64, sequential_rate: f64) -> Result<f64> {
    if parallel_rate.is_nan() || sequential_rate.is_nan() || parallel_rate <= 0.0 || sequential_rate <= 0.0 {
        return Err(Error::Config(format!(
            "speedup needs positive rates, got {parallel_rate} and {sequential_rate}"
        )));
    }
    Ok(parallel_rate / sequential_rate)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Speedup {
    pub cell: CellKey,
    pub parallel_rate: f64,
    pub sequential_rate: f64,
    pub speedup: f64,
}

/// Pairs every valid row with its counterpart in the other mode.
pub fn join_speedups(measurements: &[Measurement]) -> Result<Vec<Speedup>> {
    let mut seq = HashMap::new();
    let mut par = HashMap::new();
    for m in measurements.iter().filter(|m| m.is_valid()) {
        match m.mode {
            Mode::Sequential => seq.insert(m.cell_key(), m.sort_rate),
            Mode::Parallel => par.insert(m.cell_key(), m.sort_rate),
        };
    }
    if let Some(cell) = seq.keys().filter(|c| !par.contains_key(c)).min() {
        return Err(Error::UnmatchedCell {
            cell: cell.to_string(),
            missing: Mode::Parallel.name().into(),
        });
    }
    if let Some(cell) = par.keys().filter(|c| !seq.contains_key(c)).min() {
        return Err(Error::UnmatchedCell {
            cell: cell.to_string(),
            missing: Mode::Sequential.name().into(),
        });
    }
    let mut out = Vec::with_capacity(par.len());
    for (cell, &p) in &par {
        let s = seq[cell];
        out.push(Speedup {
            cell: *cell,
            parallel_rate: p,
            sequential_rate: s,
            speedup: speedup(p, s)?,
        });
    }
    out.sort_by_key(|s| s.cell);
    Ok(out)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Input seed for repetition `rep` of the input cell. All algorithms and
/// modes see the same inputs for a given cell.
pub fn repetition_seed(
    seed: u64,
    width: ElementWidth,
    payload: PayloadMode,
    distribution: DistributionKind,
    n: usize,
    rep: u64,
) -> u64 {
    let dist = DistributionKind::ALL.iter().position(|&d| d == distribution).unwrap_or(0) as u64;
    let cell = [width.bits() as u64, payload as u64, dist, n as u64, rep];
    cell.iter().fold(splitmix64(seed), |h, &x| splitmix64(h ^ x))
}

fn mean_and_stddev(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

struct Cell {
    algorithm: AlgorithmId,
    mode: Mode,
    width: ElementWidth,
    payload: PayloadMode,
    distribution: DistributionSpec,
    n: usize,
}

/// Runs one repetition: generate, sort under the timer, verify.
fn timed_run(cell: &Cell, seed: u64, rt: &Runtime, cfg: &SortConfig) -> Result<f64, String> {
    let spec = cell.distribution.with_seed(seed);
    let input = generate_any(&spec, cell.n, cell.width, cell.payload).map_err(|e| e.to_string())?;
    let working: AnySequence = input.clone();
    let exec = cell.mode.exec(rt);
    let start = Instant::now();
    let result = sort_any(cell.algorithm, working, exec, cfg);
    let elapsed = start.elapsed().as_secs_f64();
    let (output, _) = result.map_err(|e| e.to_string())?;
    if !output.verify_sorted() {
        return Err("output is not sorted".into());
    }
    match input.multiset_equal(&output) {
        Ok(true) => Ok(elapsed),
        Ok(false) => Err("output is not a permutation of the input".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn measure(cell: &Cell, config: &BenchmarkConfig, rt: &Runtime) -> Measurement {
    let seed_for = |rep: u64| {
        let rep = if config.fixed_input { 0 } else { rep };
        repetition_seed(config.seed, cell.width, cell.payload, cell.distribution.kind, cell.n, rep)
    };
    let mut failure = None;
    for w in 0..config.warmup_runs {
        if let Err(e) = timed_run(cell, seed_for(u32::MAX as u64 + w as u64), rt, &config.sort) {
            failure = Some(format!("warmup: {e}"));
            break;
        }
    }
    let mut samples = Vec::with_capacity(config.repetitions);
    if failure.is_none() {
        for rep in 0..config.repetitions {
            match timed_run(cell, seed_for(rep as u64), rt, &config.sort) {
                Ok(t) => samples.push(t),
                Err(e) => {
                    failure = Some(format!("repetition {rep}: {e}"));
                    break;
                }
            }
        }
    }
    let (mean_time, stddev_time) = if failure.is_none() {
        mean_and_stddev(&samples)
    } else {
        (f64::NAN, f64::NAN)
    };
    let sort_rate = if failure.is_none() {
        match sort_rate(cell.n, mean_time) {
            Ok(r) => r,
            Err(e) => {
                failure = Some(e.to_string());
                f64::NAN
            }
        }
    } else {
        f64::NAN
    };
    Measurement {
        algorithm: cell.algorithm,
        mode: cell.mode,
        width: cell.width,
        payload: cell.payload,
        distribution: cell.distribution.kind,
        n: cell.n,
        repetitions: config.repetitions,
        mean_time,
        stddev_time,
        sort_rate,
        workers: match cell.mode {
            Mode::Sequential => 1,
            Mode::Parallel => rt.workers(),
        },
        pivot: config.sort.pivot,
        fusion: config.sort.fusion,
        radix_bits: config.sort.radix.digit_bits,
        failure,
    }
}

/// Runs every cell of the grid, one at a time, calling `progress` after each.
pub fn run_benchmark_with(config: &BenchmarkConfig, mut progress: impl FnMut(&Measurement)) -> Result<Vec<Measurement>> {
    config.validate()?;
    let rt = Runtime::new(config.workers)?;
    let mut out = Vec::new();
    for &width in &config.widths {
        for &payload in &config.payloads {
            for &distribution in &config.distributions {
                for n in config.lengths_for(width) {
                    for &algorithm in &config.algorithms {
                        for &mode in &config.modes {
                            let cell = Cell {
                                algorithm,
                                mode,
                                width,
                                payload,
                                distribution,
                                n,
                            };
                            let m = measure(&cell, config, &rt);
                            progress(&m);
                            out.push(m);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn run_benchmark(config: &BenchmarkConfig) -> Result<Vec<Measurement>> {
    run_benchmark_with(config, |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(algorithms: Vec<AlgorithmId>, modes: Vec<Mode>) -> BenchmarkConfig {
        BenchmarkConfig {
            algorithms,
            modes,
            widths: vec![ElementWidth::W32],
            payloads: vec![PayloadMode::KeysOnly],
            distributions: vec![DistributionSpec::new(DistributionKind::Uniform, 1)],
            min_exp: 10,
            max_exp: 10,
            include_nonregular: false,
            repetitions: 3,
            warmup_runs: 0,
            workers: 2,
            ..BenchmarkConfig::default()
        }
    }

    #[test]
    fn length_schedule() {
        assert_eq!(sequence_lengths(15, 16, true), [32768, 49152, 65536]);
        assert_eq!(sequence_lengths(15, 15, false), [32768]);
        let full = sequence_lengths(15, 25, true);
        assert_eq!(full.len(), 21);
        assert_eq!(*full.last().unwrap(), 1 << 25);
        let full = BenchmarkConfig::full_scale();
        assert_eq!(full.lengths_for(ElementWidth::W32).len(), 21);
        assert_eq!(full.lengths_for(ElementWidth::W64).len(), 19);
    }

    #[test]
    fn rate_and_speedup_formulas() {
        assert!((sort_rate(1 << 20, 0.010).unwrap() - 104.8576).abs() < 1e-9);
        assert!((sort_rate(1_000_000, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((sort_rate(49152, 0.001).unwrap() - 49.152).abs() < 1e-9);
        assert!(sort_rate(10, 0.0).is_err());
        assert!(sort_rate(10, -1.0).is_err());
        assert_eq!(speedup(100.0, 10.0).unwrap(), 10.0);
        assert_eq!(speedup(5.0, 5.0).unwrap(), 1.0);
        assert!(speedup(0.0, 1.0).is_err());
    }

    #[test]
    fn one_cell_one_measurement() {
        let ms = run_benchmark(&tiny(vec![AlgorithmId::Radix], vec![Mode::Parallel])).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].repetitions, 3);
        assert!(ms[0].is_valid());
        assert!(ms[0].mean_time > 0.0);
    }

    #[test]
    fn single_repetition_has_zero_stddev() {
        let mut cfg = tiny(vec![AlgorithmId::Merge], vec![Mode::Sequential]);
        cfg.repetitions = 1;
        let ms = run_benchmark(&cfg).unwrap();
        assert_eq!(ms[0].stddev_time, 0.0);
        assert!((ms[0].sort_rate - sort_rate(1024, ms[0].mean_time).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn seeds_are_deterministic_and_cell_specific() {
        let s = |n, rep| repetition_seed(7, ElementWidth::W32, PayloadMode::KeysOnly, DistributionKind::Uniform, n, rep);
        assert_eq!(s(1024, 0), s(1024, 0));
        assert_ne!(s(1024, 0), s(1024, 1));
        assert_ne!(s(1024, 0), s(2048, 0));
    }

    #[test]
    fn speedup_join() {
        let cfg = tiny(vec![AlgorithmId::Radix, AlgorithmId::Sample], Mode::ALL.to_vec());
        let ms = run_benchmark(&cfg).unwrap();
        let joined = join_speedups(&ms).unwrap();
        assert_eq!(joined.len(), 2);
        for s in &joined {
            assert!((s.speedup - s.parallel_rate / s.sequential_rate).abs() <= 1e-9 * s.speedup);
        }
        let only_par: Vec<_> = ms.iter().filter(|m| m.mode == Mode::Parallel).cloned().collect();
        match join_speedups(&only_par) {
            Err(Error::UnmatchedCell { cell, missing }) => {
                assert!(cell.contains("radix"));
                assert_eq!(missing, "seq");
            }
            other => panic!("expected unmatched cell, got {other:?}"),
        }
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = tiny(vec![], vec![Mode::Sequential]);
        assert!(cfg.validate().is_err());
        cfg.algorithms = vec![AlgorithmId::Merge];
        cfg.min_exp = 12;
        assert!(cfg.validate().is_err());
        cfg.min_exp = 10;
        cfg.repetitions = 0;
        assert!(cfg.validate().is_err());
    }
}
