//! Stable merge sort. The parallel form sorts fixed-size tiles, then merges
//! pairs of runs pass by pass, cutting each merge into independent
//! fixed-size output ranges located by co-rank binary searches.

use crate::error::{Error, Result};
use crate::key::{Record, SortKey};
use crate::runtime::{Exec, Runtime};
use crate::sequence::{sort_with, RecordJob, SortOutcome, SortSequence, SortStats};

pub const DEFAULT_TILE_SIZE: usize = 512;
pub const DEFAULT_RANK_STRIDE: usize = 256;
const INSERTION_TILE_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeConfig {
    /// Elements per tile sorted before the first merge pass.
    pub tile_size: usize,
    /// Output elements per merge work item.
    pub rank_stride: usize,
}

impl Default for MergeConfig {
    fn default() -> Self {
        MergeConfig {
            tile_size: DEFAULT_TILE_SIZE,
            rank_stride: DEFAULT_RANK_STRIDE,
        }
    }
}

impl MergeConfig {
    pub fn validate(&self) -> Result<()> {
        let (t, r) = (self.tile_size, self.rank_stride);
        if !t.is_power_of_two() || !r.is_power_of_two() {
            return Err(Error::Config(format!(
                "merge tile size and rank stride must be powers of two, got {t} and {r}"
            )));
        }
        if r > t {
            return Err(Error::Config(format!(
                "merge rank stride {r} exceeds tile size {t}"
            )));
        }
        Ok(())
    }
}

pub(crate) fn insertion_sort<R: Record>(data: &mut [R]) {
    for i in 1..data.len() {
        let x = data[i];
        let mut j = i;
        while j > 0 && data[j - 1].key() > x.key() {
            data[j] = data[j - 1];
            j -= 1;
        }
        data[j] = x;
    }
}

/// Stable merge of `a` and `b` into `out`; ties take from `a`.
pub(crate) fn merge_into<R: Record>(a: &[R], b: &[R], out: &mut [R]) {
    debug_assert_eq!(a.len() + b.len(), out.len());
    let (mut i, mut j) = (0, 0);
    for slot in out.iter_mut() {
        if j >= b.len() || (i < a.len() && a[i].key() <= b[j].key()) {
            *slot = a[i];
            i += 1;
        } else {
            *slot = b[j];
            j += 1;
        }
    }
}

/// Number of elements of `a` among the first `k` outputs of
/// `merge_into(a, b)`.
pub(crate) fn co_rank<R: Record>(k: usize, a: &[R], b: &[R]) -> usize {
    let mut lo = k.saturating_sub(b.len());
    let mut hi = k.min(a.len());
    while lo < hi {
        let i = (lo + hi) / 2;
        let j = k - i;
        // a[i] precedes b[j - 1] in the merge, so more of `a` is taken.
        if j > 0 && a[i].key() <= b[j - 1].key() {
            lo = i + 1;
        } else {
            hi = i;
        }
    }
    lo
}

fn merge_pass_seq<R: Record>(src: &[R], dst: &mut [R], width: usize) {
    for (s, d) in src.chunks(2 * width).zip(dst.chunks_mut(2 * width)) {
        let mid = width.min(s.len());
        merge_into(&s[..mid], &s[mid..], d);
    }
}

/// Classic bottom-up stable merge sort.
pub(crate) fn merge_sort_seq<R: Record>(data: &mut [R]) {
    let n = data.len();
    if n < 2 {
        return;
    }
    let mut buf = data.to_vec();
    let mut in_data = true;
    let mut width = 1;
    while width < n {
        if in_data {
            merge_pass_seq(data, &mut buf, width);
        } else {
            merge_pass_seq(&buf, data, width);
        }
        in_data = !in_data;
        width *= 2;
    }
    if !in_data {
        data.copy_from_slice(&buf);
    }
}

fn merge_pass_par<R: Record>(src: &[R], dst: &mut [R], width: usize, stride: usize, rt: &Runtime) {
    let pair = 2 * width;
    rt.for_each_chunk_mut(dst, stride, |c, out| {
        let start = c * stride;
        let base = start / pair * pair;
        let run = &src[base..(base + pair).min(src.len())];
        let mid = width.min(run.len());
        let (a, b) = run.split_at(mid);
        let k0 = start - base;
        let k1 = k0 + out.len();
        let (i0, i1) = (co_rank(k0, a, b), co_rank(k1, a, b));
        merge_into(&a[i0..i1], &b[k0 - i0..k1 - i1], out);
    });
}

fn merge_sort_par<R: Record>(data: &mut [R], cfg: &MergeConfig, rt: &Runtime) {
    let n = data.len();
    let tile = cfg.tile_size;
    rt.for_each_chunk_mut(data, tile, |_, t| {
        if tile <= INSERTION_TILE_LIMIT {
            insertion_sort(t);
        } else {
            merge_sort_seq(t);
        }
    });
    if n <= tile {
        return;
    }
    let mut buf = data.to_vec();
    let mut in_data = true;
    let mut width = tile;
    while width < n {
        if in_data {
            merge_pass_par(data, &mut buf, width, cfg.rank_stride, rt);
        } else {
            merge_pass_par(&buf, data, width, cfg.rank_stride, rt);
        }
        in_data = !in_data;
        width *= 2;
    }
    if !in_data {
        rt.copy(&buf, data);
    }
}

pub(crate) fn merge_records<R: Record>(data: &mut [R], exec: Exec<'_>, cfg: &MergeConfig) -> SortStats {
    match exec {
        Exec::Sequential => {
            merge_sort_seq(data);
            SortStats::default()
        }
        Exec::Parallel(rt) => {
            let before = rt.phase_count();
            merge_sort_par(data, cfg, rt);
            SortStats {
                phase_count: rt.phase_count() - before,
                ..SortStats::default()
            }
        }
    }
}

struct MergeJob<'a> {
    exec: Exec<'a>,
    cfg: MergeConfig,
}

impl RecordJob for MergeJob<'_> {
    fn run<R: Record>(&self, data: &mut [R]) -> SortStats {
        merge_records(data, self.exec, &self.cfg)
    }
}

/// Stable merge sort.
pub fn merge_sort<K: SortKey>(seq: SortSequence<K>, exec: Exec<'_>, cfg: &MergeConfig) -> Result<SortOutcome<K>> {
    cfg.validate()?;
    Ok(sort_with(seq, &MergeJob { exec, cfg: *cfg }))
}
