//! SplitMix64, the 64-bit generator from Steele, Lea and Flood.
//!
//! Implemented here from its published algorithm so any other implementation
//! of the scenario format can reproduce the exact sample stream:
//!
//! ```text
//! state = state + 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! return z ^ (z >> 31)
//! ```
//!
//! Uniform doubles take the top 53 bits: `(z >> 11) * 2^-53`, in `[0, 1)`.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..bound`; `bound` must be positive.
    pub fn next_below(&mut self, bound: usize) -> usize {
        // multiply-shift keeps the mapping defined by a single draw
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }
}

/// Stream offsets so points, lambdas and pair subsets never share draws.
pub(crate) const POINT_STREAM: u64 = 0;
pub(crate) const LAMBDA_STREAM: u64 = 0x4C41_4D42_4441_0001;
pub(crate) const PAIR_STREAM: u64 = 0x5041_4952_5300_0002;

pub(crate) fn stream(seed: u64, offset: u64) -> SplitMix64 {
    SplitMix64::new(seed ^ offset)
}
