//! Key scalar abstraction and the record types the algorithms operate on.

use std::fmt::Debug;
use std::hash::Hash;

use num_traits::{PrimInt, Unsigned, WrappingAdd};

/// Bit width of every key and value in a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementWidth {
    W32,
    W64,
}

impl ElementWidth {
    pub fn bits(self) -> u32 {
        match self {
            ElementWidth::W32 => 32,
            ElementWidth::W64 => 64,
        }
    }
}

impl std::fmt::Display for ElementWidth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.bits())
    }
}

/// Unsigned key scalar. Implemented for `u32` and `u64`; a bare key is
/// also a [`Record`] of itself.
pub trait SortKey:
    PrimInt + Unsigned + WrappingAdd + Hash + Debug + Default + Send + Sync + 'static + Record<Key = Self>
{
    const WIDTH: ElementWidth;
    const BITS: u32;

    fn as_u64(self) -> u64;
    /// Keeps the low `BITS` bits of `v`.
    fn from_u64_truncating(v: u64) -> Self;
    fn from_usize_truncating(v: usize) -> Self {
        Self::from_u64_truncating(v as u64)
    }
}

macro_rules! impl_sort_key {
    ($t:ty, $w:expr) => {
        impl SortKey for $t {
            const WIDTH: ElementWidth = $w;
            const BITS: u32 = <$t>::BITS;

            #[inline(always)]
            fn as_u64(self) -> u64 {
                self as u64
            }

            #[inline(always)]
            fn from_u64_truncating(v: u64) -> Self {
                v as $t
            }
        }
    };
}

impl_sort_key!(u32, ElementWidth::W32);
impl_sort_key!(u64, ElementWidth::W64);

/// An element moved by a sort: a bare key, or a key carrying a value.
///
/// Every algorithm is written once against this trait. Comparisons only ever
/// look at [`Record::key`].
pub trait Record: Copy + Send + Sync + Debug + 'static {
    type Key: SortKey;

    fn key(&self) -> Self::Key;
}

macro_rules! impl_record_for_key {
    ($t:ty) => {
        impl Record for $t {
            type Key = $t;

            #[inline(always)]
            fn key(&self) -> $t {
                *self
            }
        }
    };
}

impl_record_for_key!(u32);
impl_record_for_key!(u64);

/// A key with its same-width value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct KeyValue<K> {
    pub key: K,
    pub value: K,
}

impl<K: SortKey> Record for KeyValue<K> {
    type Key = K;

    #[inline(always)]
    fn key(&self) -> K {
        self.key
    }
}

/// Compare-exchange into ascending order. Returns true when the pair was swapped.
#[inline(always)]
pub(crate) fn compare_exchange<R: Record>(lo: &mut R, hi: &mut R) -> bool {
    if hi.key() < lo.key() {
        std::mem::swap(lo, hi);
        true
    } else {
        false
    }
}
