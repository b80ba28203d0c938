//! Deterministic sample sort with regular sampling.
//!
//! Splitters are drawn from an evenly spaced sample. Every splitter value
//! gets a bucket of its own holding exactly the keys equal to it, so runs of
//! duplicates are finished the moment they are classified.

use crate::error::{Error, Result};
use crate::key::{Record, SortKey};
use crate::runtime::{Exec, Runtime, SharedSlice};
use crate::sequence::{sort_with, RecordJob, SortOutcome, SortSequence, SortStats};

use super::merge::merge_sort_seq;
use super::DEFAULT_SMALL_THRESHOLD;

pub const DEFAULT_BUCKET_COUNT: usize = 32;
pub const DEFAULT_OVERSAMPLING: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    /// Range buckets per distribution step (`k`).
    pub bucket_count: usize,
    /// Sample elements drawn per bucket (`a`).
    pub oversampling: usize,
    /// Buckets up to this size are merge sorted instead of split again.
    pub small_threshold: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            bucket_count: DEFAULT_BUCKET_COUNT,
            oversampling: DEFAULT_OVERSAMPLING,
            small_threshold: DEFAULT_SMALL_THRESHOLD,
        }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bucket_count < 2 {
            return Err(Error::Config(format!(
                "sample sort needs at least 2 buckets, got {}",
                self.bucket_count
            )));
        }
        if self.oversampling < 1 {
            return Err(Error::Config("sample sort oversampling must be at least 1".into()));
        }
        if self.small_threshold < 1 {
            return Err(Error::Config("sample sort small threshold must be at least 1".into()));
        }
        Ok(())
    }

    /// Sample size `k * a`.
    pub fn sample_size(&self) -> usize {
        self.bucket_count * self.oversampling
    }
}

/// `k - 1` splitters: every `a`-th element of the sorted regular sample.
pub(crate) fn choose_splitters<R: Record>(data: &[R], cfg: &SampleConfig) -> Vec<R::Key> {
    let n = data.len();
    let s = cfg.sample_size();
    let mut sample: Vec<R::Key> = (0..s).map(|i| data[(2 * i + 1) * n / (2 * s)].key()).collect();
    sample.sort_unstable();
    (1..cfg.bucket_count)
        .map(|j| sample[j * cfg.oversampling])
        .collect()
}

/// Bucket of `key`: `2b + 1` when it equals splitter `b`, otherwise `2b`
/// where `b` counts the splitters below it.
#[inline]
pub(crate) fn classify<K: Ord>(splitters: &[K], key: &K) -> usize {
    let b = splitters.partition_point(|s| s < key);
    if b < splitters.len() && splitters[b] == *key {
        2 * b + 1
    } else {
        2 * b
    }
}

fn is_equality_bucket(b: usize) -> bool {
    b % 2 == 1
}

/// Distributes `data` into its buckets (through `tmp`) and returns the bucket
/// boundaries.
fn distribute_seq<R: Record>(data: &mut [R], tmp: &mut [R], splitters: &[R::Key]) -> Vec<usize> {
    let buckets = 2 * splitters.len() + 1;
    let ids: Vec<u32> = data.iter().map(|r| classify(splitters, &r.key()) as u32).collect();
    let mut starts = vec![0usize; buckets + 1];
    for &b in &ids {
        starts[b as usize + 1] += 1;
    }
    for b in 0..buckets {
        starts[b + 1] += starts[b];
    }
    let mut at = starts.clone();
    for (r, &b) in data.iter().zip(&ids) {
        tmp[at[b as usize]] = *r;
        at[b as usize] += 1;
    }
    data.copy_from_slice(tmp);
    starts
}

fn distribute_par<R: Record>(data: &mut [R], tmp: &mut [R], splitters: &[R::Key], rt: &Runtime) -> Vec<usize> {
    let buckets = 2 * splitters.len() + 1;
    let chunk = rt.chunk_size();
    let classified = rt.map_chunks(data, chunk, |_, c| {
        let ids: Vec<u32> = c.iter().map(|r| classify(splitters, &r.key()) as u32).collect();
        let mut hist = vec![0usize; buckets];
        for &b in &ids {
            hist[b as usize] += 1;
        }
        (ids, hist)
    });
    let chunks = classified.len();
    let mut matrix = vec![0usize; buckets * chunks];
    for (c, (_, hist)) in classified.iter().enumerate() {
        for (b, &count) in hist.iter().enumerate() {
            matrix[b * chunks + c] = count;
        }
    }
    let offsets = rt
        .exclusive_scan(&matrix)
        .expect("bucket counts are bounded by the input length");
    let out = SharedSlice::new(tmp);
    rt.map_chunks(data, chunk, |c, part| {
        let ids = &classified[c].0;
        let mut at: Vec<usize> = (0..buckets).map(|b| offsets[b * chunks + c]).collect();
        for (r, &b) in part.iter().zip(ids) {
            // SAFETY: the scan gives every element its own slot in `tmp`.
            unsafe { out.write(at[b as usize], *r) };
            at[b as usize] += 1;
        }
    });
    rt.copy(tmp, data);
    let mut starts: Vec<usize> = (0..buckets).map(|b| offsets[b * chunks]).collect();
    starts.push(data.len());
    starts
}

fn sample_seq<R: Record>(data: &mut [R], tmp: &mut [R], cfg: &SampleConfig, depth: u64, stats: &mut SortStats) {
    stats.max_depth = stats.max_depth.max(depth);
    let n = data.len();
    if n <= cfg.small_threshold || n < cfg.sample_size() {
        merge_sort_seq(data);
        return;
    }
    let splitters = choose_splitters(data, cfg);
    let starts = distribute_seq(data, tmp, &splitters);
    if depth == 0 {
        stats.max_bucket_len = largest_bucket(&starts);
    }
    for b in 0..starts.len() - 1 {
        let range = starts[b]..starts[b + 1];
        if is_equality_bucket(b) || range.len() < 2 {
            continue;
        }
        sample_seq(&mut data[range.clone()], &mut tmp[range], cfg, depth + 1, stats);
    }
}

fn largest_bucket(starts: &[usize]) -> u64 {
    starts.windows(2).map(|w| (w[1] - w[0]) as u64).max().unwrap_or(0)
}

fn sample_par<R: Record>(data: &mut [R], cfg: &SampleConfig, rt: &Runtime, stats: &mut SortStats) {
    let n = data.len();
    if n <= cfg.small_threshold || n < cfg.sample_size() {
        merge_sort_seq(data);
        return;
    }
    let mut tmp = data.to_vec();
    let splitters = choose_splitters(data, cfg);
    let starts = distribute_par(data, &mut tmp, &splitters, rt);
    stats.max_bucket_len = largest_bucket(&starts);
    let mut items = Vec::new();
    let (mut rest, mut rest_tmp) = (data, tmp.as_mut_slice());
    for b in 0..starts.len() - 1 {
        let len = starts[b + 1] - starts[b];
        let (seg, tail) = rest.split_at_mut(len);
        let (seg_tmp, tail_tmp) = rest_tmp.split_at_mut(len);
        (rest, rest_tmp) = (tail, tail_tmp);
        if !is_equality_bucket(b) && len > 1 {
            items.push((seg, seg_tmp));
        }
    }
    let partial = rt.map_items(items, |(seg, seg_tmp)| {
        let mut s = SortStats::default();
        sample_seq(seg, seg_tmp, cfg, 1, &mut s);
        s.max_depth
    });
    stats.max_depth = partial.into_iter().max().unwrap_or(0);
}

pub(crate) fn sample_records<R: Record>(data: &mut [R], exec: Exec<'_>, cfg: &SampleConfig) -> SortStats {
    let mut stats = SortStats::default();
    match exec {
        Exec::Sequential => {
            let mut tmp = data.to_vec();
            sample_seq(data, &mut tmp, cfg, 0, &mut stats);
        }
        Exec::Parallel(rt) => {
            let before = rt.phase_count();
            sample_par(data, cfg, rt, &mut stats);
            stats.phase_count = rt.phase_count() - before;
        }
    }
    stats
}

struct SampleJob<'a> {
    exec: Exec<'a>,
    cfg: SampleConfig,
}

impl RecordJob for SampleJob<'_> {
    fn run<R: Record>(&self, data: &mut [R]) -> SortStats {
        sample_records(data, self.exec, &self.cfg)
    }
}

/// Sample sort; inputs shorter than the sample go straight to merge sort.
pub fn sample_sort<K: SortKey>(seq: SortSequence<K>, exec: Exec<'_>, cfg: &SampleConfig) -> Result<SortOutcome<K>> {
    cfg.validate()?;
    Ok(sort_with(seq, &SampleJob { exec, cfg: *cfg }))
}
