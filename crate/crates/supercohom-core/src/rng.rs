//! Deterministic, version-stable RNG for the `random` splitting strategy.
//!
//! The splitting strategies are part of the reproducibility contract: a run
//! with `random(seed)` must produce byte-identical output forever. General
//! RNG crates document their seeded generators as non-portable across
//! releases, so a fixed splitmix64 is embedded here instead; its output
//! sequence is pinned by tests.

/// splitmix64 (Steele–Lea–Flood); full 2^64 period, passes BigCrush as a
/// 64-bit mixer. Entirely sufficient for picking starting monomials.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..n` via rejection sampling (no modulo bias).
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "empty range");
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }
}
