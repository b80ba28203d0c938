//! Adaptive bitonic sorting on a bitonic tree.
//!
//! A sequence of `N = 2^k` elements is held as a complete binary tree of
//! `N - 1` nodes whose in-order traversal gives the first `N - 1` elements,
//! plus a spare node for the last one. Merging a bitonic tree walks one
//! root-to-leaf path per subtree, exchanging values and swapping whole
//! subtrees by pointer instead of moving elements one at a time.
//!
//! Nodes live in one contiguous pool; node `i` starts at in-order position
//! `i`, and the spare is the last node. Merges only permute pointers among
//! the nodes of the subtree being merged, so at every level the subtrees
//! (with their spares) occupy disjoint, contiguous stretches of the pool.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::key::{Record, SortKey};
use crate::runtime::Exec;
use crate::sequence::{sort_with, RecordJob, SortOutcome, SortSequence, SortStats};

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Ascending,
    Descending,
}

impl Direction {
    fn is_up(self) -> bool {
        self == Direction::Ascending
    }
}

#[derive(Debug, Clone, Copy)]
struct Node<R> {
    rec: R,
    /// Padding past the real input; orders after every real key.
    pad: bool,
    /// Tie-breaker that makes equal keys distinct.
    id: u64,
    left: u32,
    right: u32,
}

/// Counters from adaptive merges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MergeStats {
    /// Root-to-leaf walks performed (one per merged subtree).
    pub walks: u64,
    /// Nodes read over all walks.
    pub total_touches: u64,
    /// Largest number of nodes read by a single walk.
    pub max_touches: u64,
    pub comparisons: u64,
}

impl MergeStats {
    fn absorb(&mut self, other: MergeStats) {
        self.walks += other.walks;
        self.total_touches += other.total_touches;
        self.max_touches = self.max_touches.max(other.max_touches);
        self.comparisons += other.comparisons;
    }
}

/// In-order children of node `i` in a complete tree laid out by position.
fn initial_children(i: usize) -> (u32, u32) {
    let h = (i + 1).trailing_zeros();
    if h == 0 {
        (NIL, NIL)
    } else {
        let d = 1usize << (h - 1);
        ((i - d) as u32, (i + d) as u32)
    }
}

fn build_pool<R: Record>(records: &[R], padded_len: usize, ids: impl Fn(usize) -> u64) -> Vec<Node<R>> {
    (0..padded_len)
        .map(|i| {
            let (left, right) = if i + 1 == padded_len { (NIL, NIL) } else { initial_children(i) };
            Node {
                rec: records[i.min(records.len() - 1)],
                pad: i >= records.len(),
                id: ids(i),
                left,
                right,
            }
        })
        .collect()
}

fn in_order<R: Record>(nodes: &[Node<R>], root: u32, out: &mut Vec<Node<R>>) {
    let mut stack = Vec::new();
    let mut cur = root;
    while cur != NIL || !stack.is_empty() {
        while cur != NIL {
            stack.push(cur);
            cur = nodes[cur as usize].left;
        }
        let top = stack.pop().expect("non-empty stack");
        out.push(nodes[top as usize]);
        cur = nodes[top as usize].right;
    }
}

/// A sequence of `2^k` elements as a bitonic tree plus spare.
#[derive(Debug, Clone)]
pub struct BitonicTree<R> {
    nodes: Vec<Node<R>>,
}

impl<R: Record> BitonicTree<R> {
    fn root_index(&self) -> usize {
        self.nodes.len() / 2 - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> R {
        self.nodes[self.root_index()].rec
    }

    pub fn spare(&self) -> R {
        self.nodes[self.nodes.len() - 1].rec
    }

    /// In-order traversal followed by the spare.
    pub fn to_vec(&self) -> Vec<R> {
        let mut out = Vec::with_capacity(self.nodes.len());
        in_order(&self.nodes, self.root_index() as u32, &mut out);
        out.push(self.nodes[self.nodes.len() - 1]);
        out.into_iter().map(|n| n.rec).collect()
    }
}

/// Builds the tree for `records`, whose length must be a power of two ≥ 2.
pub fn build_bitonic_tree<R: Record>(records: &[R]) -> Result<BitonicTree<R>> {
    let n = records.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Contract(format!(
            "bitonic tree needs a power-of-two length of at least 2, got {n}"
        )));
    }
    if n > u32::MAX as usize {
        return Err(Error::Contract(format!("bitonic tree length {n} exceeds the node index range")));
    }
    let keys: Vec<R::Key> = records.iter().map(|r| r.key()).collect();
    let ids = shape_ids(&keys);
    Ok(BitonicTree {
        nodes: build_pool(records, n, |i| ids[i]),
    })
}

/// Tie-breakers under which a bitonic `keys` becomes strictly bitonic:
/// increasing through the ascending run, decreasing through the descending
/// one.
fn shape_ids<K: Ord>(keys: &[K]) -> Vec<u64> {
    let n = keys.len();
    let run = |asc: bool| {
        (1..n)
            .find(|&j| if asc { keys[j] < keys[j - 1] } else { keys[j] > keys[j - 1] })
            .unwrap_or(n)
    };
    let rest_ok = |from: usize, asc: bool| {
        (from.max(1)..n).all(|j| if asc { keys[j] >= keys[j - 1] } else { keys[j] <= keys[j - 1] })
    };
    let up_len = run(true);
    let down_len = run(false);
    let (first_asc, split) = if rest_ok(up_len, false) {
        (true, up_len)
    } else if rest_ok(down_len, true) {
        (false, down_len)
    } else {
        (true, n)
    };
    let far = 2 * n as u64;
    (0..n)
        .map(|j| {
            let asc = (j < split) == first_asc;
            if asc {
                j as u64
            } else {
                far - j as u64
            }
        })
        .collect()
}

#[inline]
fn out_of_order<R: Record>(x: &Node<R>, y: &Node<R>, up: bool) -> bool {
    let a = (x.pad, x.rec.key(), x.id);
    let b = (y.pad, y.rec.key(), y.id);
    if up {
        a > b
    } else {
        a < b
    }
}

fn swap_values<R: Record>(nodes: &mut [Node<R>], a: usize, b: usize) {
    let (ra, pa, ia) = (nodes[a].rec, nodes[a].pad, nodes[a].id);
    nodes[a].rec = nodes[b].rec;
    nodes[a].pad = nodes[b].pad;
    nodes[a].id = nodes[b].id;
    nodes[b].rec = ra;
    nodes[b].pad = pa;
    nodes[b].id = ia;
}

/// Merges the bitonic sequence held by the subtree at `root` plus `spare`.
/// `nodes` is a stretch of the pool starting at pool index `base`.
fn bimerge<R: Record>(nodes: &mut [Node<R>], base: usize, root: usize, spare: usize, up: bool, stats: &mut MergeStats) {
    let local = |i: u32| i as usize - base;
    let (r, s) = (root - base, spare - base);
    let mut touches = 2u64;
    let suffix = out_of_order(&nodes[r], &nodes[s], up);
    stats.comparisons += 1;
    if suffix {
        swap_values(nodes, r, s);
    }
    let (mut pl, mut pr) = (nodes[r].left, nodes[r].right);
    while pl != NIL {
        let (a, b) = (local(pl), local(pr));
        touches += 2;
        stats.comparisons += 1;
        let exchange = out_of_order(&nodes[a], &nodes[b], up);
        if exchange {
            swap_values(nodes, a, b);
        }
        match (suffix, exchange) {
            (true, true) => {
                let t = nodes[a].right;
                nodes[a].right = nodes[b].right;
                nodes[b].right = t;
                (pl, pr) = (nodes[a].left, nodes[b].left);
            }
            (true, false) => (pl, pr) = (nodes[a].right, nodes[b].right),
            (false, true) => {
                let t = nodes[a].left;
                nodes[a].left = nodes[b].left;
                nodes[b].left = t;
                (pl, pr) = (nodes[a].right, nodes[b].right);
            }
            (false, false) => (pl, pr) = (nodes[a].left, nodes[b].left),
        }
    }
    stats.walks += 1;
    stats.total_touches += touches;
    stats.max_touches = stats.max_touches.max(touches);
    let (left, right) = (nodes[r].left, nodes[r].right);
    if left != NIL {
        bimerge(nodes, base, left as usize, root, up, stats);
        bimerge(nodes, base, right as usize, spare, up, stats);
    }
}

/// Merges a tree holding a bitonic sequence (ascending-then-descending or
/// descending-then-ascending) into `direction` order.
pub fn adaptive_bitonic_merge<R: Record>(tree: &mut BitonicTree<R>, direction: Direction) -> MergeStats {
    let mut stats = MergeStats::default();
    let (root, spare) = (tree.root_index(), tree.nodes.len() - 1);
    bimerge(&mut tree.nodes, 0, root, spare, direction.is_up(), &mut stats);
    stats
}

/// Which end of the halves a [`QShift`] exchanges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Positions `[q, m)` are exchanged.
    Suffix,
    /// Positions `[0, q)` are exchanged.
    Prefix,
}

/// Where the two halves of a bitonic sequence switch between "keep" and
/// "exchange". Ring-shifting both halves by `q` makes the exchanged
/// positions contiguous at one end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QShift {
    pub q: usize,
    pub orientation: Orientation,
}

impl QShift {
    /// Positions exchanged between halves of length `m`.
    pub fn exchanged(&self, m: usize) -> Range<usize> {
        match self.orientation {
            Orientation::Suffix => self.q..m,
            Orientation::Prefix => 0..self.q,
        }
    }
}

/// True when `keys` is a cyclic rotation of an ascending-then-descending run.
pub fn is_bitonic<K: Ord>(keys: &[K]) -> bool {
    let n = keys.len();
    if n < 3 {
        return true;
    }
    let signs: Vec<std::cmp::Ordering> = (0..n)
        .map(|i| keys[i].cmp(&keys[(i + 1) % n]))
        .filter(|o| o.is_ne())
        .collect();
    let changes = (0..signs.len())
        .filter(|&i| signs[i] != signs[(i + 1) % signs.len()])
        .count();
    changes <= 2
}

/// Finds the smallest shift `q` separating the halves of an
/// ascending-then-descending (or descending-then-ascending) sequence for an
/// ascending merge, with `O(log m)` probes.
pub fn find_q<K: Ord + Copy>(half1: &[K], half2: &[K]) -> Result<QShift> {
    let m = half1.len();
    if m == 0 || half2.len() != m {
        return Err(Error::Contract(format!(
            "halves must be non-empty and of equal length, got {} and {}",
            half1.len(),
            half2.len()
        )));
    }
    debug_assert!(
        is_bitonic(&[half1, half2].concat()),
        "find_q input is not bitonic"
    );
    if half1[m - 1] > half2[m - 1] {
        let q = first_false(m, |i| half1[i] < half2[i]);
        Ok(QShift {
            q,
            orientation: Orientation::Suffix,
        })
    } else {
        let q = first_false(m, |i| half1[i] > half2[i]);
        Ok(QShift {
            q,
            orientation: Orientation::Prefix,
        })
    }
}

/// Smallest `i` in `0..m` where `pred` fails, given a true-then-false `pred`.
fn first_false(m: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, m);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

fn sort_levels<R: Record>(nodes: &mut [Node<R>], exec: Exec<'_>) -> MergeStats {
    let total = nodes.len();
    let k = total.trailing_zeros();
    let mut stats = MergeStats::default();
    for level in 1..=k {
        let block = 1usize << level;
        let merge_run = |idx: usize, run: &mut [Node<R>], width: usize| {
            let mut s = MergeStats::default();
            let start = idx * width;
            for (b, sub) in run.chunks_mut(block).enumerate() {
                let base = start + b * block;
                let up = ((base / block).count_ones() & 1) == 0;
                bimerge(sub, base, base + block / 2 - 1, base + block - 1, up, &mut s);
            }
            s
        };
        match exec {
            Exec::Sequential => stats.absorb(merge_run(0, nodes, total)),
            Exec::Parallel(rt) => {
                let width = block * (rt.chunk_size() / block).max(1);
                for s in rt.map_chunks_mut(nodes, width, |i, run| merge_run(i, run, width)) {
                    stats.absorb(s);
                }
            }
        }
    }
    stats
}

/// Sorts `data` ascending by building a padded bitonic tree and merging it
/// bottom-up, one level per phase. Equal keys keep their input order.
pub fn ibr_records<R: Record>(data: &mut [R], exec: Exec<'_>) -> SortStats {
    let n = data.len();
    if n < 2 {
        return SortStats::default();
    }
    let padded = n.next_power_of_two();
    let mut nodes = build_pool(data, padded, |i| i as u64);
    let merge = sort_levels(&mut nodes, exec);
    let mut out = Vec::with_capacity(padded);
    in_order(&nodes, (padded / 2 - 1) as u32, &mut out);
    out.push(nodes[padded - 1]);
    for (dst, node) in data.iter_mut().zip(&out) {
        debug_assert!(!node.pad);
        *dst = node.rec;
    }
    SortStats {
        comparator_count: merge.comparisons,
        phase_count: padded.trailing_zeros() as u64,
        max_depth: padded.trailing_zeros() as u64,
        ..SortStats::default()
    }
}

struct IbrJob<'a>(Exec<'a>);

impl RecordJob for IbrJob<'_> {
    fn run<R: Record>(&self, data: &mut [R]) -> SortStats {
        ibr_records(data, self.0)
    }
}

/// Adaptive bitonic sort of an arbitrary-length sequence.
pub fn ibr_sort<K: SortKey>(seq: SortSequence<K>, exec: Exec<'_>) -> SortOutcome<K> {
    sort_with(seq, &IbrJob(exec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Mt19937;
    use crate::runtime::Runtime;
    use crate::sequence::{multiset_equal, reference_sort, verify_sorted};

    fn random(n: usize, seed: u32, modulus: u32) -> Vec<u32> {
        let mut mt = Mt19937::new(seed);
        (0..n).map(|_| mt.next_u32() % modulus).collect()
    }

    fn merged(keys: &[u32], dir: Direction) -> (Vec<u32>, MergeStats) {
        let mut tree = build_bitonic_tree(keys).unwrap();
        let stats = adaptive_bitonic_merge(&mut tree, dir);
        (tree.to_vec(), stats)
    }

    #[test]
    fn build_examples() {
        let t = build_bitonic_tree(&[1u32, 2, 3, 4]).unwrap();
        assert_eq!(t.to_vec(), [1, 2, 3, 4]);
        assert_eq!((t.root(), t.spare()), (2, 4));
        let t = build_bitonic_tree(&[9u32, 4]).unwrap();
        assert_eq!((t.root(), t.spare()), (9, 4));
        assert!(build_bitonic_tree(&[1u32, 2, 3]).is_err());
        assert!(build_bitonic_tree(&[1u32]).is_err());
    }

    #[test]
    fn round_trip() {
        for k in 1..=10 {
            for seed in 0..5 {
                let x = random(1 << k, seed * 31 + k, u32::MAX);
                assert_eq!(build_bitonic_tree(&x).unwrap().to_vec(), x);
            }
        }
    }

    #[test]
    fn merge_examples() {
        let (out, _) = merged(&[1, 3, 5, 7, 6, 4, 2, 0], Direction::Ascending);
        assert_eq!(out, [0, 1, 2, 3, 4, 5, 6, 7]);
        let (out, _) = merged(&[1, 3, 5, 7, 6, 4, 2, 0], Direction::Descending);
        assert_eq!(out, [7, 6, 5, 4, 3, 2, 1, 0]);
        let sorted: Vec<u32> = (0..16).collect();
        assert_eq!(merged(&sorted, Direction::Ascending).0, sorted);
    }

    #[test]
    fn merge_all_bitonic_zero_one_sequences() {
        let n = 16;
        for ones in 0..=n {
            let base: Vec<u32> = (0..n).map(|i| (i >= n - ones) as u32).collect();
            for rot in 0..n {
                let mut x = base.clone();
                x.rotate_left(rot);
                let mut expected = x.clone();
                expected.sort();
                assert_eq!(merged(&x, Direction::Ascending).0, expected, "{x:?}");
                expected.reverse();
                assert_eq!(merged(&x, Direction::Descending).0, expected, "{x:?}");
            }
        }
    }

    #[test]
    fn merge_up_down_with_duplicates() {
        for seed in 0..500 {
            let n = 1 << (1 + seed % 6);
            let mut x = random(n, seed, 5);
            let split = (seed as usize * 7) % (n + 1);
            x[..split].sort();
            x[split..].sort_by(|a, b| b.cmp(a));
            if seed % 2 == 1 {
                x.reverse();
            }
            let mut expected = x.clone();
            expected.sort();
            assert_eq!(merged(&x, Direction::Ascending).0, expected, "{x:?}");
        }
    }

    #[test]
    fn walks_touch_logarithmically_many_nodes() {
        for k in 2..=12u32 {
            let n = 1usize << k;
            let mut x = random(n, k, u32::MAX);
            x[..n / 2].sort();
            x[n / 2..].sort_by(|a, b| b.cmp(a));
            let (_, stats) = merged(&x, Direction::Ascending);
            assert!(stats.max_touches <= 2 * k as u64 + 2, "k={k} {stats:?}");
            assert_eq!(stats.walks, n as u64 - 1);
            assert!(stats.total_touches <= 4 * n as u64);
        }
    }

    fn separates(h1: &[u32], h2: &[u32], exchanged: Range<usize>) -> bool {
        let (mut a, mut b) = (h1.to_vec(), h2.to_vec());
        for i in exchanged {
            std::mem::swap(&mut a[i], &mut b[i]);
        }
        a.iter().max() <= b.iter().min()
    }

    #[test]
    fn find_q_examples() {
        let s = find_q(&[1u32, 3, 5, 7], &[6, 4, 2, 0]).unwrap();
        assert!(separates(&[1, 3, 5, 7], &[6, 4, 2, 0], s.exchanged(4)));
        assert_eq!(s, QShift { q: 2, orientation: Orientation::Suffix });
        assert_eq!(find_q(&[0u32, 1, 2, 3], &[7, 6, 5, 4]).unwrap().q, 0);
        assert_eq!(find_q(&[5u32; 4], &[5; 4]).unwrap().q, 0);
        assert!(find_q(&[1u32], &[1, 2]).is_err());
    }

    #[test]
    fn find_q_agrees_with_brute_force() {
        for seed in 0..1000u32 {
            let n = if seed % 2 == 0 { 16 } else { 32 };
            let m = n / 2;
            let mut x = random(n, seed, if seed % 3 == 0 { 4 } else { 1000 });
            let split = (seed as usize * 13) % (n + 1);
            x[..split].sort();
            x[split..].sort_by(|a, b| b.cmp(a));
            if seed % 5 == 0 {
                x.reverse();
            }
            let (h1, h2) = x.split_at(m);
            let s = find_q(h1, h2).unwrap();
            assert!(s.q < m);
            assert!(separates(h1, h2, s.exchanged(m)), "{x:?} {s:?}");
            for smaller in 0..s.q {
                let alt = QShift { q: smaller, ..s };
                assert!(!separates(h1, h2, alt.exchanged(m)), "{x:?} q={smaller}");
            }
        }
    }

    #[test]
    fn bitonic_shape_check() {
        assert!(is_bitonic(&[1, 3, 5, 4, 2]));
        assert!(is_bitonic(&[4, 2, 1, 3, 5]));
        assert!(is_bitonic(&[5, 5, 5]));
        assert!(!is_bitonic(&[1, 3, 2, 4]));
    }

    #[test]
    fn sorts_various_lengths() {
        let rt = Runtime::with_chunk_size(3, 8).unwrap();
        for n in [0usize, 1, 2, 3, 5, 8, 17, 100, 1 << 10, 3 << 13] {
            let seq = SortSequence::with_index_values(random(n, n as u32, u32::MAX));
            let expected = reference_sort(&seq);
            let a = ibr_sort(seq.clone(), Exec::Sequential);
            assert_eq!(a.sequence.keys(), expected.keys(), "n={n}");
            assert!(multiset_equal(&seq, &a.sequence).unwrap());
            let b = ibr_sort(seq.clone(), Exec::Parallel(&rt));
            assert_eq!(b.sequence, a.sequence);
        }
    }

    #[test]
    fn sorts_with_many_duplicates() {
        let seq = SortSequence::keys_only(random(5000, 4, 3));
        let out = ibr_sort(seq.clone(), Exec::Sequential);
        assert!(verify_sorted(&out.sequence));
        assert_eq!(out.sequence, reference_sort(&seq));
    }
}
