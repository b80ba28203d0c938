//! Barrier-phase execution substrate for the parallel sorts.
//!
//! A parallel sort is a sequence of phases. Each phase splits its index range
//! into fixed-size work items that run concurrently on the worker pool and
//! must write disjoint locations; the next phase starts only after every item
//! of the previous one has finished. Work decomposition depends on the chunk
//! size only, never on the worker count, so results are identical for any
//! number of workers.

use std::marker::PhantomData;
use std::ops::Range;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::{CheckedAdd, PrimInt, Unsigned};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_CHUNK_SIZE: usize = 4096;

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "PARASORT_WORKERS";

type PhaseBody<'a> = Box<dyn Fn(Range<usize>) + Send + Sync + 'a>;

/// One barrier-delimited phase: `body` is called once per `chunk_size`-wide
/// slice of `range`.
pub struct Phase<'a> {
    range: Range<usize>,
    chunk_size: usize,
    body: PhaseBody<'a>,
}

impl Phase<'_> {
    fn items(&self) -> Vec<Range<usize>> {
        let Range { start, end } = self.range.clone();
        let step = self.chunk_size.max(1);
        (start..end)
            .step_by(step)
            .map(|lo| lo..(lo + step).min(end))
            .collect()
    }
}

/// An ordered list of phases.
#[derive(Default)]
pub struct PhasePlan<'a> {
    phases: Vec<Phase<'a>>,
}

impl<'a> PhasePlan<'a> {
    pub fn new() -> Self {
        PhasePlan { phases: Vec::new() }
    }

    pub fn phase(
        mut self,
        range: Range<usize>,
        chunk_size: usize,
        body: impl Fn(Range<usize>) + Send + Sync + 'a,
    ) -> Self {
        self.phases.push(Phase {
            range,
            chunk_size,
            body: Box::new(body),
        });
        self
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

/// Fixed worker pool executing barrier-separated phases.
pub struct Runtime {
    pool: rayon::ThreadPool,
    workers: usize,
    chunk_size: usize,
    phases: AtomicU64,
}

impl std::fmt::Debug for Runtime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Runtime")
            .field("workers", &self.workers)
            .field("chunk_size", &self.chunk_size)
            .finish()
    }
}

impl Runtime {
    pub fn new(workers: usize) -> Result<Self> {
        Self::with_chunk_size(workers, DEFAULT_CHUNK_SIZE)
    }

    pub fn with_chunk_size(workers: usize, chunk_size: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        if chunk_size == 0 {
            return Err(Error::Config("chunk size must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("parasort-worker-{i}"))
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
        Ok(Runtime {
            pool,
            workers,
            chunk_size,
            phases: AtomicU64::new(0),
        })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn chunk_size(&self) -> usize {
        self.chunk_size
    }

    /// Total phases executed by this runtime so far.
    pub fn phase_count(&self) -> u64 {
        self.phases.load(Ordering::Relaxed)
    }

    fn tick(&self) {
        self.phases.fetch_add(1, Ordering::Relaxed);
    }

    /// Executes the plan's phases in order. A panicking work item fails the
    /// plan after every worker has left the phase; items not yet started are
    /// skipped.
    pub fn run_phases(&self, plan: PhasePlan<'_>) -> Result<()> {
        for (index, phase) in plan.phases.iter().enumerate() {
            let items = phase.items();
            self.tick();
            let outcome = catch_unwind(AssertUnwindSafe(|| {
                self.pool
                    .install(|| items.into_par_iter().for_each(|r| (phase.body)(r)))
            }));
            if let Err(payload) = outcome {
                let message = payload
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| payload.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "unknown panic".into());
                return Err(Error::PhasePanicked {
                    phase: index,
                    message,
                });
            }
        }
        Ok(())
    }

    /// One phase over the given work items.
    pub fn for_each_item<I: Send>(&self, items: Vec<I>, body: impl Fn(I) + Send + Sync) {
        self.tick();
        self.pool.install(|| items.into_par_iter().for_each(body));
    }

    /// One phase over the given work items, collecting results in item order.
    pub fn map_items<I: Send, U: Send>(
        &self,
        items: Vec<I>,
        body: impl Fn(I) -> U + Send + Sync,
    ) -> Vec<U> {
        self.tick();
        self.pool.install(|| items.into_par_iter().map(body).collect())
    }

    /// One phase handing each `chunk`-wide slice of `data` to `body` with its chunk index.
    pub fn for_each_chunk_mut<T: Send>(
        &self,
        data: &mut [T],
        chunk: usize,
        body: impl Fn(usize, &mut [T]) + Send + Sync,
    ) {
        self.tick();
        self.pool.install(|| {
            data.par_chunks_mut(chunk.max(1))
                .enumerate()
                .for_each(|(i, c)| body(i, c))
        });
    }

    /// [`Runtime::for_each_chunk_mut`], collecting a result per chunk in order.
    pub fn map_chunks_mut<T: Send, U: Send>(
        &self,
        data: &mut [T],
        chunk: usize,
        body: impl Fn(usize, &mut [T]) -> U + Send + Sync,
    ) -> Vec<U> {
        self.tick();
        self.pool.install(|| {
            data.par_chunks_mut(chunk.max(1))
                .enumerate()
                .map(|(i, c)| body(i, c))
                .collect()
        })
    }

    /// One read-only phase over `chunk`-wide slices, collecting results in order.
    pub fn map_chunks<T: Sync, U: Send>(
        &self,
        data: &[T],
        chunk: usize,
        body: impl Fn(usize, &[T]) -> U + Send + Sync,
    ) -> Vec<U> {
        self.tick();
        self.pool.install(|| {
            data.par_chunks(chunk.max(1))
                .enumerate()
                .map(|(i, c)| body(i, c))
                .collect()
        })
    }

    /// Copies `src` into `dst` as one phase.
    pub fn copy<T: Copy + Send + Sync>(&self, src: &[T], dst: &mut [T]) {
        assert_eq!(src.len(), dst.len());
        let chunk = self.chunk_size * 16;
        self.for_each_chunk_mut(dst, chunk, |i, d| {
            let lo = i * chunk;
            d.copy_from_slice(&src[lo..lo + d.len()]);
        });
    }

    /// Exact minimum and maximum of `data` by `key`: a reduction within each
    /// chunk, then across the chunk results.
    pub fn reduce_min_max_by<T: Sync, K: Ord + Copy + Send>(
        &self,
        data: &[T],
        key: impl Fn(&T) -> K + Send + Sync,
    ) -> Result<(K, K)> {
        if data.is_empty() {
            return Err(Error::EmptyReduction);
        }
        let partial = self.map_chunks(data, self.chunk_size, |_, c| min_max_seq(c, &key));
        Ok(partial
            .into_iter()
            .flatten()
            .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
            .expect("non-empty input"))
    }

    pub fn reduce_min_max<K: Ord + Copy + Send + Sync>(&self, keys: &[K]) -> Result<(K, K)> {
        self.reduce_min_max_by(keys, |k| *k)
    }

    /// Exclusive prefix sum: per-chunk totals, a scan of the chunk totals,
    /// then a fix-up phase writing each chunk's offsets.
    pub fn exclusive_scan<C>(&self, counts: &[C]) -> Result<Vec<C>>
    where
        C: PrimInt + Unsigned + CheckedAdd + Send + Sync,
    {
        let chunk = self.chunk_size;
        let totals = self.map_chunks(counts, chunk, |i, c| {
            c.iter()
                .enumerate()
                .try_fold(C::zero(), |acc, (j, &x)| acc.checked_add(&x).ok_or(i * chunk + j))
        });
        let mut bases = Vec::with_capacity(totals.len());
        let mut running = C::zero();
        for (i, t) in totals.into_iter().enumerate() {
            let t = t.map_err(|index| Error::ScanOverflow { index })?;
            bases.push(running);
            running = running
                .checked_add(&t)
                .ok_or(Error::ScanOverflow { index: (i + 1) * chunk - 1 })?;
        }
        let mut out = vec![C::zero(); counts.len()];
        self.for_each_chunk_mut(&mut out, chunk, |i, o| {
            let mut acc = bases[i];
            for (dst, &c) in o.iter_mut().zip(&counts[i * chunk..]) {
                *dst = acc;
                acc = acc + c;
            }
        });
        Ok(out)
    }

    /// Stable partition: elements whose predicate is false come first, each
    /// class keeping its input order. Positions come from a scan of the 0/1
    /// predicate flags.
    pub fn split_by_bit<T: Copy + Send + Sync>(
        &self,
        data: &[T],
        predicate: impl Fn(&T) -> bool + Send + Sync,
    ) -> Vec<T> {
        let mut out = data.to_vec();
        self.split_by_bit_into(data, &mut out, predicate);
        out
    }

    pub(crate) fn split_by_bit_into<T: Copy + Send + Sync>(
        &self,
        src: &[T],
        dst: &mut [T],
        predicate: impl Fn(&T) -> bool + Send + Sync,
    ) {
        assert_eq!(src.len(), dst.len());
        let chunk = self.chunk_size;
        let ones = self.map_chunks(src, chunk, |_, c| c.iter().filter(|x| predicate(x)).count());
        let ones_before = self
            .exclusive_scan(&ones)
            .expect("flag counts are bounded by the input length");
        let total_ones: usize = ones.iter().sum();
        let zeros_total = src.len() - total_ones;
        let out = SharedSlice::new(dst);
        self.map_chunks(src, chunk, |i, c| {
            let mut one_at = zeros_total + ones_before[i];
            let mut zero_at = i * chunk - ones_before[i];
            for &x in c {
                // SAFETY: the scan assigns every element a distinct output slot.
                unsafe {
                    if predicate(&x) {
                        out.write(one_at, x);
                        one_at += 1;
                    } else {
                        out.write(zero_at, x);
                        zero_at += 1;
                    }
                }
            }
        });
    }
}

/// Sequential min/max by key, `None` for an empty slice.
pub(crate) fn min_max_seq<T, K: Ord + Copy>(data: &[T], key: impl Fn(&T) -> K) -> Option<(K, K)> {
    let mut it = data.iter().map(key);
    let first = it.next()?;
    Some(it.fold((first, first), |(lo, hi), k| (lo.min(k), hi.max(k))))
}

/// Where a sort's work runs.
#[derive(Debug, Clone, Copy)]
pub enum Exec<'a> {
    Sequential,
    Parallel(&'a Runtime),
}

impl<'a> Exec<'a> {
    pub fn runtime(&self) -> Option<&'a Runtime> {
        match self {
            Exec::Sequential => None,
            Exec::Parallel(rt) => Some(rt),
        }
    }
}

/// A mutable slice shared across the work items of one phase, for scatter
/// writes whose targets are disjoint by construction but not contiguous.
pub struct SharedSlice<'a, T> {
    ptr: *mut T,
    len: usize,
    _borrow: PhantomData<&'a mut [T]>,
}

unsafe impl<T: Send> Send for SharedSlice<'_, T> {}
unsafe impl<T: Send> Sync for SharedSlice<'_, T> {}

impl<'a, T> SharedSlice<'a, T> {
    pub fn new(slice: &'a mut [T]) -> Self {
        SharedSlice {
            ptr: slice.as_mut_ptr(),
            len: slice.len(),
            _borrow: PhantomData,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// # Safety
    /// No other work item of the current phase may access index `i`.
    #[inline(always)]
    pub unsafe fn write(&self, i: usize, value: T) {
        assert!(i < self.len, "shared write out of bounds: {i} >= {}", self.len);
        self.ptr.add(i).write(value);
    }
}

/// Parses a worker count (an integer >= 1).
pub fn parse_workers(value: &str) -> Result<usize> {
    match value.trim().parse::<usize>() {
        Ok(w) if w >= 1 => Ok(w),
        _ => Err(Error::Config(format!(
            "worker count must be an integer >= 1, got {value:?}"
        ))),
    }
}

/// Worker count from [`WORKERS_ENV`], if set.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => parse_workers(&v)
            .map(Some)
            .map_err(|e| Error::Config(format!("{WORKERS_ENV}: {e}"))),
    }
}

/// Worker count used when neither a flag nor the environment sets one.
pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}
