//! LSD radix sort: stable counting-sort passes over `r`-bit digits, least
//! significant first, ping-ponging between two buffers.

use crate::error::{Error, Result};
use crate::key::{Record, SortKey};
use crate::runtime::{Exec, Runtime, SharedSlice};
use crate::sequence::{sort_with, RecordJob, SortOutcome, SortSequence, SortStats};

pub const DEFAULT_DIGIT_BITS: u32 = 8;
pub const MAX_DIGIT_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadixConfig {
    pub digit_bits: u32,
}

impl Default for RadixConfig {
    fn default() -> Self {
        RadixConfig {
            digit_bits: DEFAULT_DIGIT_BITS,
        }
    }
}

impl RadixConfig {
    pub fn new(digit_bits: u32) -> Result<Self> {
        let cfg = RadixConfig { digit_bits };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_DIGIT_BITS).contains(&self.digit_bits) {
            return Err(Error::Config(format!(
                "radix digit bits must be in 1..={MAX_DIGIT_BITS}, got {}",
                self.digit_bits
            )));
        }
        Ok(())
    }

    /// Passes needed for `width_bits`-wide keys: `ceil(width / r)`.
    pub fn digit_count(&self, width_bits: u32) -> u32 {
        width_bits.div_ceil(self.digit_bits)
    }

    pub fn histogram_len(&self) -> usize {
        1 << self.digit_bits
    }
}

/// Digit `i` of `key`: `(key >> i*r) & (2^r - 1)`.
pub fn extract_digit<K: SortKey>(key: K, digit_index: u32, digit_bits: u32) -> Result<usize> {
    let cfg = RadixConfig::new(digit_bits).map_err(|e| Error::Contract(e.to_string()))?;
    let d = cfg.digit_count(K::BITS);
    if digit_index >= d {
        return Err(Error::Contract(format!(
            "digit index {digit_index} out of range for {}-bit keys with {digit_bits}-bit digits ({d} digits)",
            K::BITS
        )));
    }
    Ok(digit(&key, digit_index * digit_bits, mask(digit_bits)))
}

fn mask(bits: u32) -> u64 {
    (1u64 << bits) - 1
}

#[inline(always)]
fn digit<R: Record>(r: &R, shift: u32, mask: u64) -> usize {
    ((r.key() >> shift as usize).as_u64() & mask) as usize
}

/// Digit counts of one stretch of input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitHistogram {
    pub counts: Vec<usize>,
    pub offsets: Vec<usize>,
}

impl DigitHistogram {
    fn of<R: Record>(data: &[R], shift: u32, bits: u32) -> Self {
        let mut counts = vec![0usize; 1 << bits];
        let m = mask(bits);
        for r in data {
            counts[digit(r, shift, m)] += 1;
        }
        let mut offsets = Vec::with_capacity(counts.len());
        let mut acc = 0;
        for &c in &counts {
            offsets.push(acc);
            acc += c;
        }
        DigitHistogram { counts, offsets }
    }
}

fn pass_seq<R: Record>(src: &[R], dst: &mut [R], shift: u32, bits: u32) {
    let mut at = DigitHistogram::of(src, shift, bits).offsets;
    let m = mask(bits);
    for r in src {
        let d = digit(r, shift, m);
        dst[at[d]] = *r;
        at[d] += 1;
    }
}

fn pass_par<R: Record>(src: &[R], dst: &mut [R], shift: u32, bits: u32, rt: &Runtime) {
    if bits == 1 {
        rt.split_by_bit_into(src, dst, |r| digit(r, shift, 1) == 1);
        return;
    }
    let radix = 1usize << bits;
    let chunk = rt.chunk_size().max(16 * radix);
    let hists = rt.map_chunks(src, chunk, |_, c| DigitHistogram::of(c, shift, bits).counts);
    let chunks = hists.len();
    let mut matrix = vec![0usize; radix * chunks];
    for (c, h) in hists.iter().enumerate() {
        for (d, &count) in h.iter().enumerate() {
            matrix[d * chunks + c] = count;
        }
    }
    let offsets = rt
        .exclusive_scan(&matrix)
        .expect("digit counts are bounded by the input length");
    let m = mask(bits);
    let out = SharedSlice::new(dst);
    rt.map_chunks(src, chunk, |c, part| {
        let mut at: Vec<usize> = (0..radix).map(|d| offsets[d * chunks + c]).collect();
        for r in part {
            let d = digit(r, shift, m);
            // SAFETY: rank = digit offset + earlier chunks + earlier in this
            // chunk, distinct for every element.
            unsafe { out.write(at[d], *r) };
            at[d] += 1;
        }
    });
}

/// One stable counting-sort pass on digit `digit_index`, from `src` into `dst`.
pub(crate) fn pass_records<R: Record>(src: &[R], dst: &mut [R], digit_index: u32, cfg: &RadixConfig, exec: Exec<'_>) {
    assert_eq!(src.len(), dst.len());
    let shift = digit_index * cfg.digit_bits;
    let bits = cfg.digit_bits.min(<R::Key as SortKey>::BITS - shift);
    match exec {
        Exec::Sequential => pass_seq(src, dst, shift, bits),
        Exec::Parallel(rt) => pass_par(src, dst, shift, bits, rt),
    }
}

pub(crate) fn radix_records<R: Record>(data: &mut [R], exec: Exec<'_>, cfg: &RadixConfig) -> SortStats {
    let before = exec.runtime().map(|rt| rt.phase_count());
    if data.len() > 1 {
        let mut buf = data.to_vec();
        let passes = cfg.digit_count(<R::Key as SortKey>::BITS);
        for i in 0..passes {
            if i % 2 == 0 {
                pass_records(data, &mut buf, i, cfg, exec);
            } else {
                pass_records(&buf, data, i, cfg, exec);
            }
        }
        if passes % 2 == 1 {
            match exec {
                Exec::Sequential => data.copy_from_slice(&buf),
                Exec::Parallel(rt) => rt.copy(&buf, data),
            }
        }
    }
    SortStats {
        phase_count: match (exec, before) {
            (Exec::Parallel(rt), Some(b)) => rt.phase_count() - b,
            _ => 0,
        },
        ..SortStats::default()
    }
}

/// One counting-sort pass over a whole sequence.
pub fn counting_sort_pass<K: SortKey>(
    seq: &SortSequence<K>,
    digit_index: u32,
    cfg: &RadixConfig,
    exec: Exec<'_>,
) -> Result<SortSequence<K>> {
    cfg.validate()?;
    let d = cfg.digit_count(K::BITS);
    if digit_index >= d {
        return Err(Error::Contract(format!(
            "digit index {digit_index} out of range ({d} digits)"
        )));
    }
    struct PassJob<'a> {
        digit_index: u32,
        cfg: RadixConfig,
        exec: Exec<'a>,
    }
    impl RecordJob for PassJob<'_> {
        fn run<R: Record>(&self, data: &mut [R]) -> SortStats {
            let src = data.to_vec();
            pass_records(&src, data, self.digit_index, &self.cfg, self.exec);
            SortStats::default()
        }
    }
    Ok(sort_with(seq.clone(), &PassJob { digit_index, cfg: *cfg, exec }).sequence)
}

struct RadixJob<'a> {
    exec: Exec<'a>,
    cfg: RadixConfig,
}

impl RecordJob for RadixJob<'_> {
    fn run<R: Record>(&self, data: &mut [R]) -> SortStats {
        radix_records(data, self.exec, &self.cfg)
    }
}

/// Stable LSD radix sort.
pub fn radix_sort<K: SortKey>(seq: SortSequence<K>, exec: Exec<'_>, cfg: &RadixConfig) -> Result<SortOutcome<K>> {
    cfg.validate()?;
    Ok(sort_with(seq, &RadixJob { exec, cfg: *cfg }))
}
