//! One entry point for all seven sorts.

use crate::adaptive::ibr_sort;
use crate::bitonic::{self, bitonic_sort_par, bitonic_sort_seq, multistep_bitonic_sort};
use crate::error::{Error, Result};
use crate::key::SortKey;
use crate::partition::{merge_sort, quicksort, sample_sort, MergeConfig, PivotRule, QuickConfig, SampleConfig};
use crate::radix::{radix_sort, RadixConfig};
use crate::runtime::{Exec, Runtime};
use crate::sequence::{AnySequence, SortOutcome, SortSequence, SortStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmId {
    IbrBitonic,
    Bitonic,
    MultistepBitonic,
    Merge,
    Quick,
    Radix,
    Sample,
}

impl AlgorithmId {
    /// All algorithms in legend order.
    pub const ALL: [AlgorithmId; 7] = [
        AlgorithmId::IbrBitonic,
        AlgorithmId::Bitonic,
        AlgorithmId::MultistepBitonic,
        AlgorithmId::Merge,
        AlgorithmId::Quick,
        AlgorithmId::Radix,
        AlgorithmId::Sample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::IbrBitonic => "ibr",
            AlgorithmId::Bitonic => "bitonic",
            AlgorithmId::MultistepBitonic => "multistep",
            AlgorithmId::Merge => "merge",
            AlgorithmId::Quick => "quick",
            AlgorithmId::Radix => "radix",
            AlgorithmId::Sample => "sample",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AlgorithmId::IbrBitonic => "IBR bitonic sort",
            AlgorithmId::Bitonic => "Bitonic sort",
            AlgorithmId::MultistepBitonic => "Multistep bitonic sort",
            AlgorithmId::Merge => "Merge sort",
            AlgorithmId::Quick => "Quicksort",
            AlgorithmId::Radix => "Radix sort",
            AlgorithmId::Sample => "Sample sort",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    /// Whether equal keys keep their input order in both modes.
    pub fn is_stable(self) -> bool {
        matches!(self, AlgorithmId::Merge | AlgorithmId::Radix)
    }
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Sequential,
    Parallel,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Sequential, Mode::Parallel];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Sequential => "seq",
            Mode::Parallel => "par",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    pub fn exec(self, rt: &Runtime) -> Exec<'_> {
        match self {
            Mode::Sequential => Exec::Sequential,
            Mode::Parallel => Exec::Parallel(rt),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Tuning knobs of every algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SortConfig {
    pub fusion: usize,
    pub pivot: PivotRule,
    pub radix: RadixConfig,
    pub merge: MergeConfig,
    pub bucket_count: usize,
    pub oversampling: usize,
    /// Shared by quicksort and sample sort.
    pub small_threshold: usize,
}

impl Default for SortConfig {
    fn default() -> Self {
        let sample = SampleConfig::default();
        SortConfig {
            fusion: bitonic::DEFAULT_FUSION,
            pivot: PivotRule::default(),
            radix: RadixConfig::default(),
            merge: MergeConfig::default(),
            bucket_count: sample.bucket_count,
            oversampling: sample.oversampling,
            small_threshold: sample.small_threshold,
        }
    }
}

impl SortConfig {
    pub fn quick(&self) -> QuickConfig {
        QuickConfig {
            pivot: self.pivot,
            small_threshold: self.small_threshold,
        }
    }

    pub fn sample(&self) -> SampleConfig {
        SampleConfig {
            bucket_count: self.bucket_count,
            oversampling: self.oversampling,
            small_threshold: self.small_threshold,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=bitonic::MAX_FUSION).contains(&self.fusion) {
            return Err(Error::Config(format!(
                "fusion degree must be in 1..={}, got {}",
                bitonic::MAX_FUSION,
                self.fusion
            )));
        }
        self.radix.validate()?;
        self.merge.validate()?;
        self.quick().validate()?;
        self.sample().validate()
    }
}

/// Sorts `seq` ascending with `algo`.
pub fn sort<K: SortKey>(
    algo: AlgorithmId,
    seq: SortSequence<K>,
    exec: Exec<'_>,
    cfg: &SortConfig,
) -> Result<SortOutcome<K>> {
    Ok(match algo {
        AlgorithmId::IbrBitonic => ibr_sort(seq, exec),
        AlgorithmId::Bitonic => match exec {
            Exec::Sequential => bitonic_sort_seq(seq),
            Exec::Parallel(rt) => bitonic_sort_par(seq, rt),
        },
        AlgorithmId::MultistepBitonic => multistep_bitonic_sort(seq, exec, cfg.fusion)?,
        AlgorithmId::Merge => merge_sort(seq, exec, &cfg.merge)?,
        AlgorithmId::Quick => quicksort(seq, exec, &cfg.quick())?,
        AlgorithmId::Radix => radix_sort(seq, exec, &cfg.radix)?,
        AlgorithmId::Sample => sample_sort(seq, exec, &cfg.sample())?,
    })
}

/// [`sort`] for a sequence whose width is known only at run time.
pub fn sort_any(
    algo: AlgorithmId,
    seq: AnySequence,
    exec: Exec<'_>,
    cfg: &SortConfig,
) -> Result<(AnySequence, SortStats)> {
    Ok(match seq {
        AnySequence::W32(s) => {
            let out = sort(algo, s, exec, cfg)?;
            (AnySequence::W32(out.sequence), out.stats)
        }
        AnySequence::W64(s) => {
            let out = sort(algo, s, exec, cfg)?;
            (AnySequence::W64(out.sequence), out.stats)
        }
    })
}
