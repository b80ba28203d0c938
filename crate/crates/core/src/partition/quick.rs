//! Quicksort with a min/max-average pivot and three-way partitioning.
//!
//! The parallel form works level by level: segments long enough to be worth
//! splitting across workers are partitioned with per-chunk counts, an
//! exclusive scan and a scatter; the rest are handed out as independent
//! sequential work items.

use crate::bitonic;
use crate::error::{Error, Result};
use crate::key::{Record, SortKey};
use crate::runtime::{min_max_seq, Exec, Runtime, SharedSlice};
use crate::sequence::{sort_with, RecordJob, SortOutcome, SortSequence, SortStats};

use super::DEFAULT_SMALL_THRESHOLD;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Average of the segment's minimum and maximum key.
    #[default]
    MinMax,
    /// Median of the first, middle and last key.
    Median3,
}

impl PivotRule {
    pub fn name(self) -> &'static str {
        match self {
            PivotRule::MinMax => "minmax",
            PivotRule::Median3 => "median3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "minmax" => Some(PivotRule::MinMax),
            "median3" => Some(PivotRule::Median3),
            _ => None,
        }
    }
}

impl std::fmt::Display for PivotRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuickConfig {
    pub pivot: PivotRule,
    /// Segments shorter than this are finished with the bitonic network.
    pub small_threshold: usize,
}

impl Default for QuickConfig {
    fn default() -> Self {
        QuickConfig {
            pivot: PivotRule::MinMax,
            small_threshold: DEFAULT_SMALL_THRESHOLD,
        }
    }
}

impl QuickConfig {
    pub fn validate(&self) -> Result<()> {
        if self.small_threshold == 0 {
            return Err(Error::Config("quicksort small threshold must be at least 1".into()));
        }
        Ok(())
    }
}

/// `floor((min_key + max_key) / 2)` without overflow.
pub fn select_pivot<K: SortKey>(min_key: K, max_key: K) -> K {
    debug_assert!(min_key <= max_key);
    min_key + (max_key - min_key) / (K::one() + K::one())
}

fn median3<K: SortKey>(a: K, b: K, c: K) -> K {
    a.max(b).min(a.min(b).max(c))
}

/// A segment still to be sorted, with the exact key range it holds.
#[derive(Debug, Clone, Copy)]
struct Task<K> {
    lo: usize,
    hi: usize,
    min: K,
    max: K,
    depth: u64,
}

fn pivot_for<R: Record>(seg: &[R], task: &Task<R::Key>, rule: PivotRule) -> R::Key {
    match rule {
        PivotRule::MinMax => select_pivot(task.min, task.max),
        PivotRule::Median3 => median3(
            seg[0].key(),
            seg[seg.len() / 2].key(),
            seg[seg.len() - 1].key(),
        ),
    }
}

/// Key range of each class found while partitioning.
#[derive(Debug, Clone, Copy)]
struct Split<K> {
    lt: usize,
    gt: usize,
    lt_range: Option<(K, K)>,
    gt_range: Option<(K, K)>,
}

fn widen<K: Ord + Copy>(r: Option<(K, K)>, k: K) -> Option<(K, K)> {
    Some(match r {
        None => (k, k),
        Some((lo, hi)) => (lo.min(k), hi.max(k)),
    })
}

fn merge_ranges<K: Ord + Copy>(a: Option<(K, K)>, b: Option<(K, K)>) -> Option<(K, K)> {
    match (a, b) {
        (None, r) | (r, None) => r,
        (Some((a0, a1)), Some((b0, b1))) => Some((a0.min(b0), a1.max(b1))),
    }
}

/// In-place three-way partition: `[0, lt)` < pivot, `[lt, gt)` == pivot,
/// `[gt, len)` > pivot.
fn partition3<R: Record>(seg: &mut [R], pivot: R::Key) -> Split<R::Key> {
    let (mut lt, mut i, mut gt) = (0, 0, seg.len());
    let (mut lt_range, mut gt_range) = (None, None);
    while i < gt {
        let k = seg[i].key();
        if k < pivot {
            seg.swap(lt, i);
            lt_range = widen(lt_range, k);
            lt += 1;
            i += 1;
        } else if k > pivot {
            gt -= 1;
            seg.swap(i, gt);
            gt_range = widen(gt_range, k);
        } else {
            i += 1;
        }
    }
    Split { lt, gt, lt_range, gt_range }
}

#[cfg(debug_assertions)]
fn check_partition<R: Record>(seg: &[R], pivot: R::Key, split: &Split<R::Key>) {
    debug_assert!(seg[..split.lt].iter().all(|r| r.key() < pivot));
    debug_assert!(seg[split.lt..split.gt].iter().all(|r| r.key() == pivot));
    debug_assert!(seg[split.gt..].iter().all(|r| r.key() > pivot));
}

fn children<K: SortKey>(task: &Task<K>, split: &Split<K>) -> impl Iterator<Item = Task<K>> {
    let left = split.lt_range.map(|(min, max)| Task {
        lo: task.lo,
        hi: task.lo + split.lt,
        min,
        max,
        depth: task.depth + 1,
    });
    let right = split.gt_range.map(|(min, max)| Task {
        lo: task.lo + split.gt,
        hi: task.hi,
        min,
        max,
        depth: task.depth + 1,
    });
    left.into_iter().chain(right)
}

/// Sorts the segment `task` of `data` with an explicit stack.
fn quick_seq<R: Record>(data: &mut [R], root: Task<R::Key>, cfg: &QuickConfig, stats: &mut SortStats) {
    let mut stack = vec![root];
    while let Some(task) = stack.pop() {
        stats.max_depth = stats.max_depth.max(task.depth);
        let seg = &mut data[task.lo..task.hi];
        if task.min == task.max {
            continue;
        }
        if seg.len() < cfg.small_threshold {
            bitonic::sort_records(seg, Exec::Sequential);
            continue;
        }
        let pivot = pivot_for(seg, &task, cfg.pivot);
        let split = partition3(seg, pivot);
        #[cfg(debug_assertions)]
        check_partition(seg, pivot, &split);
        stats.partition_pass_count += 1;
        stack.extend(children(&task, &split));
    }
}

/// One parallel three-way partition of `seg` through `tmp`.
fn partition_par<R: Record>(seg: &mut [R], tmp: &mut [R], pivot: R::Key, rt: &Runtime) -> Split<R::Key> {
    let chunk = rt.chunk_size();
    let counts = rt.map_chunks(seg, chunk, |_, c| {
        let mut n = [0usize; 3];
        let (mut lt_range, mut gt_range) = (None, None);
        for r in c {
            let k = r.key();
            if k < pivot {
                n[0] += 1;
                lt_range = widen(lt_range, k);
            } else if k > pivot {
                n[2] += 1;
                gt_range = widen(gt_range, k);
            } else {
                n[1] += 1;
            }
        }
        (n, lt_range, gt_range)
    });
    let chunks = counts.len();
    let mut matrix = vec![0usize; 3 * chunks];
    for (c, (n, _, _)) in counts.iter().enumerate() {
        for class in 0..3 {
            matrix[class * chunks + c] = n[class];
        }
    }
    let offsets = rt
        .exclusive_scan(&matrix)
        .expect("class counts are bounded by the segment length");
    let out = SharedSlice::new(tmp);
    rt.map_chunks(seg, chunk, |c, part| {
        let mut at = [offsets[c], offsets[chunks + c], offsets[2 * chunks + c]];
        for r in part {
            let k = r.key();
            let class = if k < pivot {
                0
            } else if k > pivot {
                2
            } else {
                1
            };
            // SAFETY: the scan gives every element its own slot in `tmp`.
            unsafe { out.write(at[class], *r) };
            at[class] += 1;
        }
    });
    rt.copy(tmp, seg);
    let lt = offsets[chunks];
    let gt = offsets[2 * chunks];
    let (lt_range, gt_range) = counts
        .iter()
        .fold((None, None), |(l, g), (_, cl, cg)| (merge_ranges(l, *cl), merge_ranges(g, *cg)));
    Split { lt, gt, lt_range, gt_range }
}

fn quick_par<R: Record>(data: &mut [R], root: Task<R::Key>, cfg: &QuickConfig, rt: &Runtime, stats: &mut SortStats) {
    let cutoff = (4 * rt.chunk_size()).max(cfg.small_threshold);
    let mut tmp = data.to_vec();
    let mut level = vec![root];
    let mut independent = Vec::new();
    while !level.is_empty() {
        let mut next = Vec::new();
        for task in level {
            stats.max_depth = stats.max_depth.max(task.depth);
            if task.min == task.max {
                continue;
            }
            if task.hi - task.lo < cutoff {
                independent.push(task);
                continue;
            }
            let seg = &mut data[task.lo..task.hi];
            let pivot = pivot_for(seg, &task, cfg.pivot);
            let split = partition_par(seg, &mut tmp[task.lo..task.hi], pivot, rt);
            #[cfg(debug_assertions)]
            check_partition(seg, pivot, &split);
            stats.partition_pass_count += 1;
            next.extend(children(&task, &split));
        }
        level = next;
    }
    independent.sort_by_key(|t| t.lo);
    let mut items = Vec::with_capacity(independent.len());
    let mut rest = data;
    let mut offset = 0;
    for task in independent {
        let (_, tail) = rest.split_at_mut(task.lo - offset);
        let (seg, tail) = tail.split_at_mut(task.hi - task.lo);
        items.push((seg, task));
        rest = tail;
        offset = task.hi;
    }
    let partial = rt.map_items(items, |(seg, task)| {
        let mut s = SortStats::default();
        let local = Task { lo: 0, hi: seg.len(), ..task };
        quick_seq(seg, local, cfg, &mut s);
        s
    });
    for s in partial {
        stats.partition_pass_count += s.partition_pass_count;
        stats.max_depth = stats.max_depth.max(s.max_depth);
    }
}

pub(crate) fn quick_records<R: Record>(data: &mut [R], exec: Exec<'_>, cfg: &QuickConfig) -> SortStats {
    let mut stats = SortStats::default();
    let before = exec.runtime().map(|rt| rt.phase_count());
    let range = match exec {
        Exec::Sequential => min_max_seq(data, |r| r.key()),
        Exec::Parallel(rt) => rt.reduce_min_max_by(data, |r| r.key()).ok(),
    };
    let Some((min, max)) = range else {
        return stats;
    };
    let root = Task {
        lo: 0,
        hi: data.len(),
        min,
        max,
        depth: 0,
    };
    match exec {
        Exec::Sequential => quick_seq(data, root, cfg, &mut stats),
        Exec::Parallel(rt) => {
            if min != max {
                quick_par(data, root, cfg, rt, &mut stats);
            }
            stats.phase_count = rt.phase_count() - before.unwrap_or(0);
        }
    }
    stats
}

struct QuickJob<'a> {
    exec: Exec<'a>,
    cfg: QuickConfig,
}

impl RecordJob for QuickJob<'_> {
    fn run<R: Record>(&self, data: &mut [R]) -> SortStats {
        quick_records(data, self.exec, &self.cfg)
    }
}

/// Quicksort. Constant input is detected by the initial min/max reduction
/// and returned without any partition pass.
pub fn quicksort<K: SortKey>(seq: SortSequence<K>, exec: Exec<'_>, cfg: &QuickConfig) -> Result<SortOutcome<K>> {
    cfg.validate()?;
    Ok(sort_with(seq, &QuickJob { exec, cfg: *cfg }))
}
