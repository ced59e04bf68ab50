//! The simulator's random source: xorshift64*.
//!
//! ```text
//! x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27;
//! output = x * 0x2545_F491_4F6C_DD1D   (mod 2^64)
//! ```
//!
//! Streams are seeded from `(seed, stream)` through the splitmix64 finalizer:
//!
//! ```text
//! z = seed + (stream + 1) * 0x9E37_79B9_7F4A_7C15
//! z = (z ^ (z >> 30)) * 0xBF58_476D_1CE4_E5B9
//! z = (z ^ (z >> 27)) * 0x94D0_49BB_1331_11EB
//! state = z ^ (z >> 31)          (0 is replaced by 0x9E37_79B9_7F4A_7C15)
//! ```
//!
//! All arithmetic wraps mod 2^64. Uniform integers below `n <= 2^32` take the
//! high 32 bits of an output and reject the biased tail; uniform reals in
//! `[0, 1)` take the high 53 bits. The sequence is fixed so that simulation
//! reports can be reproduced outside this crate.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const MULTIPLIER: u64 = 0x2545_F491_4F6C_DD1D;

fn splitmix_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    /// Stream `stream` of the generator family keyed by `seed`.
    pub fn new(seed: u64, stream: u64) -> Self {
        let z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(GOLDEN));
        let state = match splitmix_mix(z) {
            0 => GOLDEN,
            s => s,
        };
        Self { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(MULTIPLIER)
    }

    /// Uniform integer in `[0, n)`, `1 <= n <= 2^32`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!((1..=1 << 32).contains(&n), "range {n} unsupported");
        let span = 1u64 << 32;
        let limit = span - span % n;
        loop {
            let x = self.next_u64() >> 32;
            if x < limit {
                return x % n;
            }
        }
    }

    /// Uniform real in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
