//! Sequential and data-parallel sorting algorithms with a reproducible
//! benchmark harness.
//!
//! Every algorithm is generic over the key scalar ([`SortKey`], implemented
//! for `u32` and `u64`); the aliases below name the two concrete widths.

pub mod adaptive;
pub mod algorithm;
pub mod bench;
pub mod bitonic;
pub mod distribution;
pub mod error;
pub mod key;
pub mod partition;
pub mod radix;
pub mod report;
pub mod rng;
pub mod runtime;
pub mod sequence;

pub use algorithm::{sort, sort_any, AlgorithmId, Mode, SortConfig};
pub use bench::{run_benchmark, BenchmarkConfig, Measurement};
pub use distribution::{DistributionKind, DistributionSpec};
pub use error::{Error, Result};
pub use key::{ElementWidth, KeyValue, Record, SortKey};
pub use runtime::{Exec, PhasePlan, Runtime};
pub use sequence::{
    check_stability, multiset_equal, reference_sort, verify_sorted, AnySequence, PayloadMode,
    SortOutcome, SortSequence, SortStats,
};

/// A sequence of 32-bit keys (and values).
pub type Seq32 = SortSequence<u32>;
/// A sequence of 64-bit keys (and values).
pub type Seq64 = SortSequence<u64>;
pub type Outcome32 = SortOutcome<u32>;
pub type Outcome64 = SortOutcome<u64>;
