//! The six benchmark input distributions.

use crate::error::{Error, Result};
use crate::key::SortKey;
use crate::rng::{Mt19937, Mt19937_64, Twister};
use crate::sequence::{AnySequence, PayloadMode, SortSequence};
use crate::key::ElementWidth;

pub const DEFAULT_BUCKET_COUNT: usize = 16;
pub const DEFAULT_GAUSSIAN_SAMPLES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistributionKind {
    Uniform,
    Gaussian,
    Zero,
    Bucket,
    SortedAsc,
    SortedDesc,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 6] = [
        DistributionKind::Uniform,
        DistributionKind::Gaussian,
        DistributionKind::Zero,
        DistributionKind::Bucket,
        DistributionKind::SortedAsc,
        DistributionKind::SortedDesc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistributionKind::Uniform => "uniform",
            DistributionKind::Gaussian => "gaussian",
            DistributionKind::Zero => "zero",
            DistributionKind::Bucket => "bucket",
            DistributionKind::SortedAsc => "sorted",
            DistributionKind::SortedDesc => "sorted-desc",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.name() == name)
    }
}

impl std::fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A distribution with its parameters and seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    /// Sub-ranges of the key domain (bucket only).
    pub bucket_count: usize,
    /// Uniform draws averaged per element (gaussian only).
    pub gaussian_samples: usize,
    pub seed: u64,
}

impl DistributionSpec {
    pub fn new(kind: DistributionKind, seed: u64) -> Self {
        DistributionSpec {
            kind,
            bucket_count: DEFAULT_BUCKET_COUNT,
            gaussian_samples: DEFAULT_GAUSSIAN_SAMPLES,
            seed,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        DistributionSpec { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            DistributionKind::Bucket if self.bucket_count < 2 => Err(Error::Config(format!(
                "bucket distribution needs at least 2 buckets, got {}",
                self.bucket_count
            ))),
            DistributionKind::Gaussian if self.gaussian_samples < 2 => Err(Error::Config(
                format!(
                    "gaussian distribution needs at least 2 samples, got {}",
                    self.gaussian_samples
                ),
            )),
            _ => Ok(()),
        }
    }
}

/// Sub-range `index` of a `bits`-wide key domain split into `buckets` equal
/// parts, as `(start, length)`.
pub fn bucket_range(bits: u32, buckets: usize, index: usize) -> (u64, u128) {
    let domain = 1u128 << bits;
    let lo = domain * index as u128 / buckets as u128;
    let hi = domain * (index as u128 + 1) / buckets as u128;
    (lo as u64, hi - lo)
}

fn draw_keys<K: SortKey, T: Twister>(spec: &DistributionSpec, n: usize) -> Vec<K> {
    let mut rng = T::from_seed(spec.seed);
    match spec.kind {
        DistributionKind::Zero => vec![K::zero(); n],
        DistributionKind::Uniform | DistributionKind::SortedAsc | DistributionKind::SortedDesc => {
            let mut keys: Vec<K> = (0..n)
                .map(|_| K::from_u64_truncating(rng.next_word()))
                .collect();
            match spec.kind {
                DistributionKind::SortedAsc => keys.sort_unstable(),
                DistributionKind::SortedDesc => keys.sort_unstable_by(|a, b| b.cmp(a)),
                _ => {}
            }
            keys
        }
        DistributionKind::Gaussian => {
            let g = spec.gaussian_samples as u128;
            (0..n)
                .map(|_| {
                    let sum: u128 = (0..g).map(|_| rng.next_word() as u128).sum();
                    K::from_u64_truncating((sum / g) as u64)
                })
                .collect()
        }
        DistributionKind::Bucket => {
            let b = spec.bucket_count;
            (0..n)
                .map(|i| {
                    let j = (i as u128 * b as u128 / n as u128) as usize;
                    let (lo, span) = bucket_range(K::BITS, b, j);
                    let offset = (rng.next_word() as u128 % span) as u64;
                    K::from_u64_truncating(lo + offset)
                })
                .collect()
        }
    }
}

/// Generates `n` keys of width `K` (MT19937 for 32-bit keys, MT19937-64 for
/// 64-bit keys). Key-value payloads carry the original indices as values.
pub fn generate<K: SortKey>(spec: &DistributionSpec, n: usize, payload: PayloadMode) -> Result<SortSequence<K>> {
    spec.validate()?;
    let keys = match K::WIDTH {
        ElementWidth::W32 => draw_keys::<K, Mt19937>(spec, n),
        ElementWidth::W64 => draw_keys::<K, Mt19937_64>(spec, n),
    };
    Ok(match payload {
        PayloadMode::KeysOnly => SortSequence::keys_only(keys),
        PayloadMode::KeyValue => SortSequence::with_index_values(keys),
    })
}

/// [`generate`] with the width chosen at run time.
pub fn generate_any(
    spec: &DistributionSpec,
    n: usize,
    width: ElementWidth,
    payload: PayloadMode,
) -> Result<AnySequence> {
    Ok(match width {
        ElementWidth::W32 => AnySequence::W32(generate(spec, n, payload)?),
        ElementWidth::W64 => AnySequence::W64(generate(spec, n, payload)?),
    })
}
