//! MT19937 and MT19937-64 Mersenne Twister generators.
//!
//! Both follow the canonical Matsumoto-Nishimura recurrences and seeding, so
//! a default-seeded generator reproduces `std::mt19937` / `std::mt19937_64`.

const N32: usize = 624;
const M32: usize = 397;
const MATRIX_A32: u32 = 0x9908_b0df;
const UPPER_MASK32: u32 = 0x8000_0000;
const LOWER_MASK32: u32 = 0x7fff_ffff;

const N64: usize = 312;
const M64: usize = 156;
const MATRIX_A64: u64 = 0xb502_6f5a_a966_19e9;
const UPPER_MASK64: u64 = 0xffff_ffff_8000_0000;
const LOWER_MASK64: u64 = 0x7fff_ffff;

/// Seed used by the reference implementations when none is given.
pub const DEFAULT_SEED: u64 = 5489;

/// A word generator the distribution layer can draw from.
pub trait Twister {
    fn from_seed(seed: u64) -> Self;
    /// Next tempered output, zero-extended to 64 bits.
    fn next_word(&mut self) -> u64;
}

/// 32-bit Mersenne Twister.
#[derive(Clone)]
pub struct Mt19937 {
    state: [u32; N32],
    index: usize,
}

impl Mt19937 {
    pub fn new(seed: u32) -> Self {
        let mut state = [0u32; N32];
        state[0] = seed;
        for i in 1..N32 {
            let prev = state[i - 1];
            state[i] = 1_812_433_253u32
                .wrapping_mul(prev ^ (prev >> 30))
                .wrapping_add(i as u32);
        }
        Mt19937 { state, index: N32 }
    }

    fn twist(&mut self) {
        for i in 0..N32 {
            let y = (self.state[i] & UPPER_MASK32) | (self.state[(i + 1) % N32] & LOWER_MASK32);
            let mut next = self.state[(i + M32) % N32] ^ (y >> 1);
            if y & 1 != 0 {
                next ^= MATRIX_A32;
            }
            self.state[i] = next;
        }
        self.index = 0;
    }

    pub fn next_u32(&mut self) -> u32 {
        if self.index >= N32 {
            self.twist();
        }
        let mut y = self.state[self.index];
        self.index += 1;
        y ^= y >> 11;
        y ^= (y << 7) & 0x9d2c_5680;
        y ^= (y << 15) & 0xefc6_0000;
        y ^ (y >> 18)
    }
}

impl Default for Mt19937 {
    fn default() -> Self {
        Mt19937::new(DEFAULT_SEED as u32)
    }
}

impl Twister for Mt19937 {
    /// Seeds from the low 32 bits.
    fn from_seed(seed: u64) -> Self {
        Mt19937::new(seed as u32)
    }

    fn next_word(&mut self) -> u64 {
        self.next_u32() as u64
    }
}

/// 64-bit Mersenne Twister.
#[derive(Clone)]
pub struct Mt19937_64 {
    state: [u64; N64],
    index: usize,
}

impl Mt19937_64 {
    pub fn new(seed: u64) -> Self {
        let mut state = [0u64; N64];
        state[0] = seed;
        for i in 1..N64 {
            let prev = state[i - 1];
            state[i] = 6_364_136_223_846_793_005u64
                .wrapping_mul(prev ^ (prev >> 62))
                .wrapping_add(i as u64);
        }
        Mt19937_64 { state, index: N64 }
    }

    fn twist(&mut self) {
        for i in 0..N64 {
            let x = (self.state[i] & UPPER_MASK64) | (self.state[(i + 1) % N64] & LOWER_MASK64);
            let mut next = self.state[(i + M64) % N64] ^ (x >> 1);
            if x & 1 != 0 {
                next ^= MATRIX_A64;
            }
            self.state[i] = next;
        }
        self.index = 0;
    }

    pub fn next_u64(&mut self) -> u64 {
        if self.index >= N64 {
            self.twist();
        }
        let mut x = self.state[self.index];
        self.index += 1;
        x ^= (x >> 29) & 0x5555_5555_5555_5555;
        x ^= (x << 17) & 0x71d6_7fff_eda6_0000;
        x ^= (x << 37) & 0xfff7_eee0_0000_0000;
        x ^ (x >> 43)
    }
}

impl Default for Mt19937_64 {
    fn default() -> Self {
        Mt19937_64::new(DEFAULT_SEED)
    }
}

impl Twister for Mt19937_64 {
    fn from_seed(seed: u64) -> Self {
        Mt19937_64::new(seed)
    }

    fn next_word(&mut self) -> u64 {
        self.next_u64()
    }
}
