//! Bitonic sorting network, sequential and parallel, and the multistep
//! variant that fuses several merge steps into one parallel phase.
//!
//! The network is laid out so that every comparator sorts ascending: the
//! first step of merge phase `p` pairs each element with its mirror inside a
//! block of `2^p` (`i XOR (2^p - 1)`), the remaining steps pair `i` with
//! `i XOR 2^(s-1)`. Arbitrary lengths are handled by treating indices
//! `>= n` as `+inf`; with ascending comparators such a comparator never moves
//! anything, so nothing outside `[0, n)` is ever touched.

use crate::error::{Error, Result};
use crate::key::{compare_exchange, Record, SortKey};
use crate::runtime::{Exec, Runtime};
use crate::sequence::{sort_with, RecordJob, SortOutcome, SortSequence, SortStats};

pub const DEFAULT_FUSION: usize = 4;
pub const MAX_FUSION: usize = 5;

/// One step of the network: merge phase `phase` (blocks of `2^phase`),
/// step `step` (`phase` down to 1). The step equal to its phase is the
/// mirror step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComparatorStep {
    pub phase: u32,
    pub step: u32,
}

impl ComparatorStep {
    pub fn is_mirror(&self) -> bool {
        self.step == self.phase
    }

    /// Distance from a block's lower half to its upper half.
    pub fn half(&self) -> usize {
        1 << (self.step - 1)
    }

    /// The element compared with `i`.
    pub fn partner(&self, i: usize) -> usize {
        if self.is_mirror() {
            i ^ ((1 << self.phase) - 1)
        } else {
            i ^ self.half()
        }
    }

    /// Comparator pairs `(lo, hi)` with `lo < hi < n`.
    pub fn pairs(&self, n: usize) -> Vec<(usize, usize)> {
        (0..n)
            .filter_map(|i| {
                let j = self.partner(i);
                (i < j && j < n).then_some((i, j))
            })
            .collect()
    }
}

/// Number of merge phases for `n` elements: `ceil(log2 n)`.
pub fn phase_count_for(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// The full step schedule for `n` elements.
pub fn schedule(n: usize) -> Vec<ComparatorStep> {
    (1..=phase_count_for(n))
        .flat_map(|phase| (1..=phase).rev().map(move |step| ComparatorStep { phase, step }))
        .collect()
}

/// Exact comparator count of the network on `n = 2^k` elements.
pub fn comparator_count_pow2(k: u32) -> u64 {
    let n = 1u64 << k;
    n * k as u64 * (k as u64 + 1) / 4
}

fn pair_straight<R: Record>(lo: &mut [R], hi: &mut [R]) -> u64 {
    let mut swaps = 0;
    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
        compare_exchange(a, b);
        swaps += 1;
    }
    swaps
}

/// Pairs `lo[u]` with `hi[len - 1 - u]`.
fn pair_mirror<R: Record>(lo: &mut [R], hi: &mut [R]) -> u64 {
    debug_assert_eq!(lo.len(), hi.len());
    let h = hi.len();
    for u in 0..h {
        compare_exchange(&mut lo[u], &mut hi[h - 1 - u]);
    }
    h as u64
}

/// Applies one step to a single block of (at most) `2 * half` elements.
fn apply_block<R: Record>(block: &mut [R], half: usize, mirror: bool) -> u64 {
    if block.len() <= half {
        return 0;
    }
    let (lo, hi) = block.split_at_mut(half);
    let h = hi.len();
    if mirror {
        pair_mirror(&mut lo[half - h..], hi)
    } else {
        pair_straight(&mut lo[..h], hi)
    }
}

fn apply_step_seq<R: Record>(data: &mut [R], step: ComparatorStep) -> u64 {
    let half = step.half();
    data.chunks_mut(2 * half)
        .map(|b| apply_block(b, half, step.is_mirror()))
        .sum()
}

enum StepItem<'a, R> {
    /// Whole blocks of the step.
    Blocks(&'a mut [R]),
    /// Matching slices of one block's halves.
    Halves(&'a mut [R], &'a mut [R]),
}

fn step_items<R: Record>(data: &mut [R], step: ComparatorStep, chunk: usize) -> Vec<StepItem<'_, R>> {
    let half = step.half();
    let block = 2 * half;
    if block <= chunk {
        let width = chunk / block * block;
        return data.chunks_mut(width).map(StepItem::Blocks).collect();
    }
    let piece = (chunk / 2).max(1);
    let mut items = Vec::new();
    for b in data.chunks_mut(block) {
        if b.len() <= half {
            continue;
        }
        let (lo, hi) = b.split_at_mut(half);
        let h = hi.len();
        if step.is_mirror() {
            let lo = &mut lo[half - h..];
            for (l, r) in lo.chunks_mut(piece).zip(hi.rchunks_mut(piece)) {
                items.push(StepItem::Halves(l, r));
            }
        } else {
            for (l, r) in lo[..h].chunks_mut(piece).zip(hi.chunks_mut(piece)) {
                items.push(StepItem::Halves(l, r));
            }
        }
    }
    items
}

fn apply_step_par<R: Record>(data: &mut [R], step: ComparatorStep, rt: &Runtime) -> u64 {
    let half = step.half();
    let mirror = step.is_mirror();
    let items = step_items(data, step, rt.chunk_size());
    rt.map_items(items, |item| match item {
        StepItem::Blocks(c) => c.chunks_mut(2 * half).map(|b| apply_block(b, half, mirror)).sum(),
        StepItem::Halves(lo, hi) if mirror => pair_mirror(lo, hi),
        StepItem::Halves(lo, hi) => pair_straight(lo, hi),
    })
    .into_iter()
    .sum()
}

/// Runs the unfused network, one phase per step when parallel.
pub fn sort_records<R: Record>(data: &mut [R], exec: Exec<'_>) -> SortStats {
    let mut stats = SortStats::default();
    for step in schedule(data.len()) {
        stats.comparator_count += match exec {
            Exec::Sequential => apply_step_seq(data, step),
            Exec::Parallel(rt) => apply_step_par(data, step, rt),
        };
        stats.phase_count += 1;
    }
    stats
}

/// Applies `levels` consecutive non-mirror steps, the largest with half
/// distance `2^(levels-1) * stride`, to windows of `2^levels` elements. Each
/// window takes the element at offset `u` from every segment.
fn apply_windows<R: Record>(segments: &mut [&mut [R]], levels: u32, buf: &mut Vec<R>) -> u64 {
    let width = segments.first().map_or(0, |s| s.len());
    let mut count = 0;
    for u in 0..width {
        buf.clear();
        buf.extend(segments.iter().map_while(|s| s.get(u).copied()));
        let v = buf.len();
        for t in (0..levels).rev() {
            let h = 1usize << t;
            for m in 0..v {
                if m & h == 0 && m + h < v {
                    let (a, b) = buf.split_at_mut(m + h);
                    compare_exchange(&mut a[m], &mut b[0]);
                    count += 1;
                }
            }
        }
        for (s, x) in segments.iter_mut().zip(buf.iter()) {
            s[u] = *x;
        }
    }
    count
}

/// A fused group of `levels` steps whose largest step is `top`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct FusedGroup {
    top: u32,
    levels: u32,
}

impl FusedGroup {
    fn stride(&self) -> usize {
        1 << (self.top - self.levels)
    }

    fn block(&self) -> usize {
        1 << self.top
    }
}

fn apply_group_to_block<R: Record>(block: &mut [R], g: FusedGroup, buf: &mut Vec<R>) -> u64 {
    let mut segments: Vec<&mut [R]> = block.chunks_mut(g.stride()).collect();
    apply_windows(&mut segments, g.levels, buf)
}

fn apply_group_seq<R: Record>(data: &mut [R], g: FusedGroup) -> u64 {
    let mut buf = Vec::with_capacity(1 << g.levels);
    data.chunks_mut(g.block())
        .map(|b| apply_group_to_block(b, g, &mut buf))
        .sum()
}

fn apply_group_par<R: Record>(data: &mut [R], g: FusedGroup, rt: &Runtime) -> u64 {
    let chunk = rt.chunk_size();
    let block = g.block();
    if block <= chunk {
        let width = chunk / block * block;
        return rt
            .map_chunks_mut(data, width, |_, c| apply_group_seq(c, g))
            .into_iter()
            .sum();
    }
    let piece = (chunk >> g.levels).clamp(1, g.stride());
    let mut items: Vec<Vec<&mut [R]>> = Vec::new();
    for b in data.chunks_mut(block) {
        let first = items.len();
        for seg in b.chunks_mut(g.stride()) {
            for (k, p) in seg.chunks_mut(piece).enumerate() {
                if first + k == items.len() {
                    items.push(Vec::with_capacity(1 << g.levels));
                }
                items[first + k].push(p);
            }
        }
    }
    rt.map_items(items, |mut segments| {
        let mut buf = Vec::with_capacity(1 << g.levels);
        apply_windows(&mut segments, g.levels, &mut buf)
    })
    .into_iter()
    .sum()
}

/// Runs the network with up to `fusion` merge steps per phase. The mirror
/// step of each merge phase runs on its own.
pub fn multistep_records<R: Record>(data: &mut [R], exec: Exec<'_>, fusion: usize) -> Result<SortStats> {
    if !(1..=MAX_FUSION).contains(&fusion) {
        return Err(Error::Config(format!(
            "fusion degree must be in 1..={MAX_FUSION}, got {fusion}"
        )));
    }
    let mut stats = SortStats::default();
    for phase in 1..=phase_count_for(data.len()) {
        let mirror = ComparatorStep { phase, step: phase };
        stats.comparator_count += match exec {
            Exec::Sequential => apply_step_seq(data, mirror),
            Exec::Parallel(rt) => apply_step_par(data, mirror, rt),
        };
        stats.phase_count += 1;
        let mut top = phase - 1;
        while top >= 1 {
            let g = FusedGroup {
                top,
                levels: top.min(fusion as u32),
            };
            stats.comparator_count += match exec {
                Exec::Sequential => apply_group_seq(data, g),
                Exec::Parallel(rt) => apply_group_par(data, g, rt),
            };
            stats.phase_count += 1;
            top -= g.levels;
        }
    }
    Ok(stats)
}

struct NetworkJob<'a> {
    exec: Exec<'a>,
    fusion: Option<usize>,
}

impl RecordJob for NetworkJob<'_> {
    fn run<R: Record>(&self, data: &mut [R]) -> SortStats {
        match self.fusion {
            None => sort_records(data, self.exec),
            Some(m) => multistep_records(data, self.exec, m).expect("fusion degree validated"),
        }
    }
}

/// Sequential bitonic sort.
pub fn bitonic_sort_seq<K: SortKey>(seq: SortSequence<K>) -> SortOutcome<K> {
    sort_with(
        seq,
        &NetworkJob {
            exec: Exec::Sequential,
            fusion: None,
        },
    )
}

/// Parallel bitonic sort: one barrier phase per network step.
pub fn bitonic_sort_par<K: SortKey>(seq: SortSequence<K>, rt: &Runtime) -> SortOutcome<K> {
    sort_with(
        seq,
        &NetworkJob {
            exec: Exec::Parallel(rt),
            fusion: None,
        },
    )
}

/// Multistep bitonic sort with fusion degree `fusion` (1..=5).
pub fn multistep_bitonic_sort<K: SortKey>(
    seq: SortSequence<K>,
    exec: Exec<'_>,
    fusion: usize,
) -> Result<SortOutcome<K>> {
    if !(1..=MAX_FUSION).contains(&fusion) {
        return Err(Error::Config(format!(
            "fusion degree must be in 1..={MAX_FUSION}, got {fusion}"
        )));
    }
    Ok(sort_with(
        seq,
        &NetworkJob {
            exec,
            fusion: Some(fusion),
        },
    ))
}
