//! Command-line flags and their mapping onto a benchmark configuration.

use std::path::PathBuf;

use clap::Parser;
use parasort::bench::{BenchmarkConfig, MAX_EXP_LIMIT};
use parasort::bitonic::MAX_FUSION;
use parasort::partition::PivotRule;
use parasort::radix::{RadixConfig, MAX_DIGIT_BITS};
use parasort::runtime::{parse_workers, workers_from_env};
use parasort::{AlgorithmId, DistributionKind, DistributionSpec, ElementWidth, Mode, PayloadMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pick<T> {
    All,
    One(T),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Seq,
    Par,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidthArg {
    W32,
    W64,
    Both,
}

fn algo_pick(s: &str) -> Result<Pick<AlgorithmId>, String> {
    if s == "all" {
        return Ok(Pick::All);
    }
    AlgorithmId::from_name(s).map(Pick::One).ok_or_else(|| {
        let names: Vec<_> = AlgorithmId::ALL.iter().map(|a| a.name()).collect();
        format!("unknown algorithm {s:?}, expected 'all' or one of {}", names.join(", "))
    })
}

fn dist_pick(s: &str) -> Result<Pick<DistributionKind>, String> {
    if s == "all" {
        return Ok(Pick::All);
    }
    DistributionKind::from_name(s).map(Pick::One).ok_or_else(|| {
        let names: Vec<_> = DistributionKind::ALL.iter().map(|d| d.name()).collect();
        format!("unknown distribution {s:?}, expected 'all' or one of {}", names.join(", "))
    })
}

fn mode_arg(s: &str) -> Result<ModeArg, String> {
    match s {
        "seq" => Ok(ModeArg::Seq),
        "par" => Ok(ModeArg::Par),
        "both" => Ok(ModeArg::Both),
        _ => Err(format!("expected seq, par or both, got {s:?}")),
    }
}

fn width_arg(s: &str) -> Result<WidthArg, String> {
    match s {
        "32" => Ok(WidthArg::W32),
        "64" => Ok(WidthArg::W64),
        "both" => Ok(WidthArg::Both),
        _ => Err(format!("expected 32, 64 or both, got {s:?}")),
    }
}

fn pivot_arg(s: &str) -> Result<PivotRule, String> {
    PivotRule::from_name(s).ok_or_else(|| format!("expected minmax or median3, got {s:?}"))
}

fn workers_arg(s: &str) -> Result<usize, String> {
    parse_workers(s).map_err(|e| e.to_string())
}

fn exponent(s: &str) -> Result<u32, String> {
    let e: u32 = s.parse().map_err(|_| format!("expected an integer, got {s:?}"))?;
    if e > MAX_EXP_LIMIT {
        return Err(format!("must be at most {MAX_EXP_LIMIT}"));
    }
    Ok(e)
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("expected an integer >= 1, got {s:?}")),
    }
}

fn power_of_two(s: &str) -> Result<usize, String> {
    let v = positive(s)?;
    if !v.is_power_of_two() {
        return Err(format!("expected a power of two, got {v}"));
    }
    Ok(v)
}

fn fusion_arg(s: &str) -> Result<usize, String> {
    let v = positive(s)?;
    if v > MAX_FUSION {
        return Err(format!("must be in 1..={MAX_FUSION}, got {v}"));
    }
    Ok(v)
}

fn radix_bits_arg(s: &str) -> Result<u32, String> {
    let v: u32 = s.parse().map_err(|_| format!("expected an integer, got {s:?}"))?;
    if !(1..=MAX_DIGIT_BITS).contains(&v) {
        return Err(format!("must be in 1..={MAX_DIGIT_BITS}, got {v}"));
    }
    Ok(v)
}

/// Benchmark seven sorting algorithms in sequential and parallel form.
///
/// Without arguments the full grid runs at exponents 15 to 18.
#[derive(Debug, Parser)]
#[command(name = "parasort", version)]
pub struct Args {
    /// Algorithms, comma separated: ibr, bitonic, multistep, merge, quick, radix, sample, or all.
    #[arg(long, value_delimiter = ',', value_parser = algo_pick)]
    pub algo: Vec<Pick<AlgorithmId>>,

    /// seq, par or both.
    #[arg(long, value_parser = mode_arg)]
    pub mode: Option<ModeArg>,

    /// Key width in bits: 32, 64 or both.
    #[arg(long, value_parser = width_arg)]
    pub width: Option<WidthArg>,

    /// Sort (key, value) pairs instead of bare keys.
    #[arg(long)]
    pub pairs: bool,

    /// Input distributions, comma separated: uniform, gaussian, zero, bucket, sorted, sorted-desc, or all.
    #[arg(long, value_delimiter = ',', value_parser = dist_pick)]
    pub dist: Vec<Pick<DistributionKind>>,

    #[arg(long, value_parser = exponent)]
    pub min_exp: Option<u32>,

    #[arg(long, value_parser = exponent)]
    pub max_exp: Option<u32>,

    /// Also run lengths 2^e + 2^(e-1).
    #[arg(long)]
    pub nonregular: bool,

    /// Timed repetitions per cell.
    #[arg(long, value_parser = positive)]
    pub reps: Option<usize>,

    /// Discarded runs before timing each cell.
    #[arg(long)]
    pub warmup: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Worker threads for parallel mode. Falls back to PARASORT_WORKERS, then the core count.
    #[arg(long, value_parser = workers_arg)]
    pub workers: Option<usize>,

    /// Bitonic steps fused per phase in the multistep sort.
    #[arg(long, value_parser = fusion_arg)]
    pub fusion: Option<usize>,

    /// Quicksort pivot rule: minmax or median3.
    #[arg(long, value_parser = pivot_arg)]
    pub pivot: Option<PivotRule>,

    /// Bits per radix digit.
    #[arg(long, value_parser = radix_bits_arg)]
    pub radix_bits: Option<u32>,

    /// Merge sort tile size (a power of two).
    #[arg(long, value_parser = power_of_two)]
    pub tile: Option<usize>,

    /// Sample sort bucket count.
    #[arg(long, value_parser = positive)]
    pub buckets: Option<usize>,

    /// Sample sort oversampling factor.
    #[arg(long, value_parser = positive)]
    pub oversample: Option<usize>,

    /// Segment length below which quicksort and sample sort finish sequentially.
    #[arg(long, value_parser = positive)]
    pub small_threshold: Option<usize>,

    /// Sort the same input in every repetition of a cell.
    #[arg(long)]
    pub fixed_input: bool,

    /// CSV output path. Rows go to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Write SVG figures to <PREFIX>_<figure>.svg.
    #[arg(long, value_name = "PREFIX")]
    pub plot: Option<String>,
}

fn expand<T: Copy + PartialEq>(picks: &[Pick<T>], all: &[T]) -> Vec<T> {
    let mut out = Vec::new();
    for p in picks {
        match p {
            Pick::All => out.extend_from_slice(all),
            Pick::One(t) => out.push(*t),
        }
    }
    let mut seen = Vec::new();
    out.retain(|t| {
        let fresh = !seen.contains(t);
        seen.push(*t);
        fresh
    });
    out
}

impl Args {
    /// The configuration these flags describe. `bare` marks an invocation
    /// without arguments, which selects the full default grid.
    pub fn to_config(&self, bare: bool) -> Result<BenchmarkConfig, String> {
        let mut cfg = BenchmarkConfig::default();
        if !bare {
            cfg.include_nonregular = self.nonregular;
            cfg.payloads = vec![if self.pairs {
                PayloadMode::KeyValue
            } else {
                PayloadMode::KeysOnly
            }];
        }
        if !self.algo.is_empty() {
            cfg.algorithms = expand(&self.algo, &AlgorithmId::ALL);
        }
        if !self.dist.is_empty() {
            cfg.distributions = expand(&self.dist, &DistributionKind::ALL)
                .into_iter()
                .map(|k| DistributionSpec::new(k, cfg.seed))
                .collect();
        }
        if let Some(m) = self.mode {
            cfg.modes = match m {
                ModeArg::Seq => vec![Mode::Sequential],
                ModeArg::Par => vec![Mode::Parallel],
                ModeArg::Both => Mode::ALL.to_vec(),
            };
        }
        if let Some(w) = self.width {
            cfg.widths = match w {
                WidthArg::W32 => vec![ElementWidth::W32],
                WidthArg::W64 => vec![ElementWidth::W64],
                WidthArg::Both => vec![ElementWidth::W32, ElementWidth::W64],
            };
        }
        if let Some(e) = self.min_exp {
            cfg.min_exp = e;
        }
        if let Some(e) = self.max_exp {
            cfg.max_exp = e;
        }
        if cfg.min_exp > cfg.max_exp {
            return Err(format!(
                "--min-exp {} exceeds --max-exp {}",
                cfg.min_exp, cfg.max_exp
            ));
        }
        if let Some(r) = self.reps {
            cfg.repetitions = r;
        }
        if let Some(w) = self.warmup {
            cfg.warmup_runs = w;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.fixed_input = self.fixed_input;
        cfg.workers = match self.workers {
            Some(w) => w,
            None => workers_from_env()
                .map_err(|e| e.to_string())?
                .unwrap_or(cfg.workers),
        };
        if let Some(f) = self.fusion {
            cfg.sort.fusion = f;
        }
        if let Some(p) = self.pivot {
            cfg.sort.pivot = p;
        }
        if let Some(b) = self.radix_bits {
            cfg.sort.radix = RadixConfig::new(b).map_err(|e| format!("--radix-bits: {e}"))?;
        }
        if let Some(t) = self.tile {
            cfg.sort.merge.tile_size = t;
            cfg.sort.merge.rank_stride = cfg.sort.merge.rank_stride.min(t);
        }
        if let Some(b) = self.buckets {
            cfg.sort.bucket_count = b;
            cfg.sort.sample().validate().map_err(|e| format!("--buckets: {e}"))?;
        }
        if let Some(o) = self.oversample {
            cfg.sort.oversampling = o;
        }
        if let Some(t) = self.small_threshold {
            cfg.sort.small_threshold = t;
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}
