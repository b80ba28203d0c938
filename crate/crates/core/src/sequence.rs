//! Sequence data model and the correctness oracles every test relies on.

use crate::error::{Error, Result};
use crate::key::{ElementWidth, KeyValue, Record, SortKey};

/// Whether a sequence carries a value per key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PayloadMode {
    KeysOnly,
    KeyValue,
}

impl PayloadMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PayloadMode::KeysOnly => "keys",
            PayloadMode::KeyValue => "pairs",
        }
    }
}

impl std::fmt::Display for PayloadMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A buffer of keys, optionally paired with same-width values.
///
/// Keys and values live in two parallel arrays so that keys-only and
/// key-value sequences share the same key storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortSequence<K> {
    keys: Vec<K>,
    values: Option<Vec<K>>,
}

impl<K: SortKey> SortSequence<K> {
    pub fn keys_only(keys: Vec<K>) -> Self {
        SortSequence { keys, values: None }
    }

    pub fn with_values(keys: Vec<K>, values: Vec<K>) -> Result<Self> {
        if keys.len() != values.len() {
            return Err(Error::Contract(format!(
                "{} keys but {} values",
                keys.len(),
                values.len()
            )));
        }
        Ok(SortSequence {
            keys,
            values: Some(values),
        })
    }

    /// Pairs every key with its original position, for stability checks.
    pub fn with_index_values(keys: Vec<K>) -> Self {
        let values = (0..keys.len()).map(K::from_usize_truncating).collect();
        SortSequence {
            keys,
            values: Some(values),
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn width(&self) -> ElementWidth {
        K::WIDTH
    }

    pub fn payload(&self) -> PayloadMode {
        if self.values.is_some() {
            PayloadMode::KeyValue
        } else {
            PayloadMode::KeysOnly
        }
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn values(&self) -> Option<&[K]> {
        self.values.as_deref()
    }

    pub fn into_parts(self) -> (Vec<K>, Option<Vec<K>>) {
        (self.keys, self.values)
    }

    /// Key-value records in sequence order (values default to zero for keys-only).
    pub fn pairs(&self) -> Vec<KeyValue<K>> {
        match &self.values {
            Some(v) => self
                .keys
                .iter()
                .zip(v)
                .map(|(&key, &value)| KeyValue { key, value })
                .collect(),
            None => self
                .keys
                .iter()
                .map(|&key| KeyValue {
                    key,
                    value: K::zero(),
                })
                .collect(),
        }
    }
}

/// Instrumentation collected by a sort. Counters an algorithm does not
/// define stay zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SortStats {
    /// Compare-exchange operations executed by the bitonic sorts.
    pub comparator_count: u64,
    /// Partition passes executed by quicksort.
    pub partition_pass_count: u64,
    /// Barrier-separated phases issued to the runtime. The bitonic network
    /// sorts report their step count in sequential mode as well.
    pub phase_count: u64,
    /// Largest bucket produced by the top-level sample-sort distribution.
    pub max_bucket_len: u64,
    /// Deepest recursion level reached (quicksort, sample sort).
    pub max_depth: u64,
}

/// A sorted sequence together with the sort's counters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortOutcome<K> {
    pub sequence: SortSequence<K>,
    pub comparator_count: u64,
    pub partition_pass_count: u64,
    pub stats: SortStats,
}

/// A sort body written once over [`Record`], instantiated for bare keys and
/// for key-value pairs.
pub(crate) trait RecordJob {
    fn run<R: Record>(&self, data: &mut [R]) -> SortStats;
}

/// Runs `job` over the sequence, packing key-value sequences into records
/// for the duration of the sort.
pub(crate) fn sort_with<K: SortKey, J: RecordJob>(seq: SortSequence<K>, job: &J) -> SortOutcome<K> {
    let (mut keys, values) = seq.into_parts();
    let (sequence, stats) = match values {
        None => {
            let stats = job.run(&mut keys);
            (SortSequence::keys_only(keys), stats)
        }
        Some(mut values) => {
            let mut recs: Vec<KeyValue<K>> = keys
                .iter()
                .zip(&values)
                .map(|(&key, &value)| KeyValue { key, value })
                .collect();
            let stats = job.run(&mut recs);
            for ((k, v), r) in keys.iter_mut().zip(values.iter_mut()).zip(&recs) {
                *k = r.key;
                *v = r.value;
            }
            (
                SortSequence {
                    keys,
                    values: Some(values),
                },
                stats,
            )
        }
    };
    SortOutcome {
        sequence,
        comparator_count: stats.comparator_count,
        partition_pass_count: stats.partition_pass_count,
        stats,
    }
}

/// True iff the keys are non-decreasing.
pub fn verify_sorted<K: SortKey>(seq: &SortSequence<K>) -> bool {
    is_sorted_by_key(seq.keys())
}

pub(crate) fn is_sorted_by_key<R: Record>(data: &[R]) -> bool {
    data.windows(2).all(|w| w[0].key() <= w[1].key())
}

/// True iff both sequences hold the same multiset of keys (keys-only) or of
/// (key, value) pairs (key-value).
pub fn multiset_equal<K: SortKey>(a: &SortSequence<K>, b: &SortSequence<K>) -> Result<bool> {
    if a.payload() != b.payload() {
        return Err(Error::Contract(format!(
            "payload mismatch: {} vs {}",
            a.payload(),
            b.payload()
        )));
    }
    if a.len() != b.len() {
        return Ok(false);
    }
    match (a.values(), b.values()) {
        (Some(_), Some(_)) => {
            let mut pa: Vec<(K, K)> = a.pairs().into_iter().map(|p| (p.key, p.value)).collect();
            let mut pb: Vec<(K, K)> = b.pairs().into_iter().map(|p| (p.key, p.value)).collect();
            pa.sort_unstable();
            pb.sort_unstable();
            Ok(pa == pb)
        }
        _ => {
            let mut ka = a.keys().to_vec();
            let mut kb = b.keys().to_vec();
            ka.sort_unstable();
            kb.sort_unstable();
            Ok(ka == kb)
        }
    }
}

/// Checks that equal keys in `output` carry increasing original positions.
///
/// `input` must carry its original indices `0..n` as values, and `output`'s
/// values must be a permutation of them.
pub fn check_stability<K: SortKey>(input: &SortSequence<K>, output: &SortSequence<K>) -> Result<bool> {
    let (Some(in_vals), Some(out_vals)) = (input.values(), output.values()) else {
        return Err(Error::Contract(
            "stability check needs key-value sequences".into(),
        ));
    };
    let n = input.len();
    if output.len() != n {
        return Err(Error::Contract("input and output lengths differ".into()));
    }
    if in_vals
        .iter()
        .enumerate()
        .any(|(i, v)| v.as_u64() != i as u64)
    {
        return Err(Error::Contract("input values are not the indices 0..n".into()));
    }
    let mut seen = vec![false; n];
    for v in out_vals {
        let i = v.as_u64() as usize;
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Contract(
                "output values are not a permutation of 0..n".into(),
            ));
        }
    }
    let keys = output.keys();
    Ok((1..n).all(|i| keys[i - 1] != keys[i] || out_vals[i - 1] < out_vals[i]))
}

/// Stable ascending sort by key; the ground truth for every test.
pub fn reference_sort<K: SortKey>(seq: &SortSequence<K>) -> SortSequence<K> {
    match seq.values() {
        None => {
            let mut keys = seq.keys().to_vec();
            keys.sort();
            SortSequence::keys_only(keys)
        }
        Some(_) => {
            let mut pairs = seq.pairs();
            pairs.sort_by_key(|p| p.key);
            let (keys, values) = pairs.into_iter().map(|p| (p.key, p.value)).unzip();
            SortSequence {
                keys,
                values: Some(values),
            }
        }
    }
}

/// A sequence of either width, for code that picks the width at run time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnySequence {
    W32(SortSequence<u32>),
    W64(SortSequence<u64>),
}

impl AnySequence {
    pub fn width(&self) -> ElementWidth {
        match self {
            AnySequence::W32(_) => ElementWidth::W32,
            AnySequence::W64(_) => ElementWidth::W64,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnySequence::W32(s) => s.len(),
            AnySequence::W64(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn payload(&self) -> PayloadMode {
        match self {
            AnySequence::W32(s) => s.payload(),
            AnySequence::W64(s) => s.payload(),
        }
    }

    pub fn verify_sorted(&self) -> bool {
        match self {
            AnySequence::W32(s) => verify_sorted(s),
            AnySequence::W64(s) => verify_sorted(s),
        }
    }

    /// Multiset equality; mismatched widths or payloads are a contract violation.
    pub fn multiset_equal(&self, other: &AnySequence) -> Result<bool> {
        match (self, other) {
            (AnySequence::W32(a), AnySequence::W32(b)) => multiset_equal(a, b),
            (AnySequence::W64(a), AnySequence::W64(b)) => multiset_equal(a, b),
            _ => Err(Error::Contract(format!(
                "width mismatch: {} vs {}",
                self.width(),
                other.width()
            ))),
        }
    }
}
