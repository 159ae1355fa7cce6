//! Deterministic random number generation.
//!
//! Everything random in this crate flows through [`SplitMix64`] or the
//! counter-based [`stream_u64`]/[`stream_unit`] helpers, so any fixed seed
//! reproduces results bit for bit on every platform. The counter-based form
//! keys each draw on (seed, index, salt) independently of evaluation order,
//! which is what the edge sampler and the block-model generator need.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix(self.state)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [-1, 1).
    pub fn next_signed(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    /// Uniform in 0..n. Uses the widening-multiply trick; the modulo bias is
    /// below 2^-32 for any n that fits a graph here.
    pub fn next_range(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One draw of a counter-based stream keyed on (seed, index, salt).
pub fn stream_u64(seed: u64, index: u64, salt: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = mix(z);
    mix(z.wrapping_add(0x9E37_79B9_7F4A_7C15))
}

/// Counter-based uniform in [0, 1).
pub fn stream_unit(seed: u64, index: u64, salt: u64) -> f64 {
    (stream_u64(seed, index, salt) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Derives an independent seed, e.g. one per restart or per sweep cell.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    stream_u64(seed, index, 0x5EED)
}
