//! Counter-based randomness. Every random quantity in this crate is a pure
//! function of a 64-bit seed and a canonical integer key (edge coordinates,
//! site coordinates, sample index), so values can be produced in any order,
//! from any thread, with identical results.
//!
//! The mixer is the SplitMix64 finalizer; keyed values absorb their key words
//! through full mixing rounds, and sequential draws (`Stream`) advance a
//! SplitMix64 state. Statistical quality is ample for Monte Carlo use.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

// Domain constants keep independent uses of the same seed uncorrelated.
pub(crate) const DOMAIN_EDGE: u64 = 0xE06D_6C64_8115_27AD;
pub(crate) const DOMAIN_SITE: u64 = 0x51BE_0F6F_55C1_39B1;
pub(crate) const DOMAIN_STREAM: u64 = 0x5785_2B09_ACF2_91E6;
pub(crate) const DOMAIN_SAMPLE: u64 = 0xA24B_AED4_963E_E407;

/// SplitMix64 finalizer: a 64-bit permutation with strong avalanche.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of `(seed, domain, words)`, mixing fully between absorbed words.
#[inline]
pub fn keyed(seed: u64, domain: u64, words: &[u64]) -> u64 {
    let mut h = mix(seed ^ domain);
    for &w in words {
        h = mix(h.wrapping_add(GOLDEN).wrapping_add(w));
    }
    h
}

/// Seed for the `index`-th derived stream (one per Monte Carlo sample).
#[inline]
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    keyed(seed, DOMAIN_SAMPLE, &[index])
}

/// Map 64 random bits to a double in `[0, 1)` (53-bit resolution).
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Map 64 random bits to a double in `(0, 1]`; safe under `ln`.
#[inline]
fn unit_open_f64(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal from two independent 64-bit words (Box–Muller).
#[inline]
pub fn gaussian(bits1: u64, bits2: u64) -> f64 {
    let r = (-2.0 * unit_open_f64(bits1).ln()).sqrt();
    let theta = std::f64::consts::TAU * unit_f64(bits2);
    r * theta.cos()
}

/// Sequential SplitMix64 stream for the few places that need a stream of
/// draws rather than keyed values (e.g. random animal growth).
#[derive(Clone, Debug)]
pub struct Stream {
    state: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream {
            state: mix(seed ^ DOMAIN_STREAM),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        unit_f64(self.next_u64())
    }

    /// Uniform draw in `0..n` (multiply-high; bias is O(n / 2^64)).
    #[inline]
    pub fn next_below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyed_values_are_deterministic_and_key_sensitive() {
        let a = keyed(7, DOMAIN_EDGE, &[1, 2, 3]);
        assert_eq!(a, keyed(7, DOMAIN_EDGE, &[1, 2, 3]));
        assert_ne!(a, keyed(8, DOMAIN_EDGE, &[1, 2, 3]));
        assert_ne!(a, keyed(7, DOMAIN_SITE, &[1, 2, 3]));
        assert_ne!(a, keyed(7, DOMAIN_EDGE, &[1, 2, 4]));
        assert_ne!(a, keyed(7, DOMAIN_EDGE, &[2, 1, 3]));
    }

    #[test]
    fn unit_values_lie_in_range() {
        let mut s = Stream::new(123);
        for _ in 0..10_000 {
            let u = s.next_unit();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn unit_mean_is_near_half() {
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|i| unit_f64(keyed(99, DOMAIN_EDGE, &[i])))
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn gaussian_moments_are_plausible() {
        let n = 200_000u64;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for i in 0..n {
            let z = gaussian(
                keyed(5, DOMAIN_SITE, &[i, 0]),
                keyed(5, DOMAIN_SITE, &[i, 1]),
            );
            sum += z;
            sum2 += z * z;
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn next_below_respects_bound() {
        let mut s = Stream::new(1);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            let v = s.next_below(7);
            assert!(v < 7);
            seen[v as usize] = true;
        }
        assert!(seen.iter().all(|&b| b));
    }
}
