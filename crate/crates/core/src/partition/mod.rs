//! Divide-and-conquer sorts: merge sort, quicksort and sample sort.

pub mod merge;
pub mod quick;
pub mod sample;

pub use merge::{merge_sort, MergeConfig};
pub use quick::{quicksort, select_pivot, PivotRule, QuickConfig};
pub use sample::{sample_sort, SampleConfig};

/// Segments at or below this length are finished by a simpler sort.
pub const DEFAULT_SMALL_THRESHOLD: usize = 1024;
