//! Counter-based uniform draws.
//!
//! A draw is a pure function of `(seed, level, sweep, node)`, so the
//! acceptance decisions do not depend on how nodes are split among threads
//! or in which order they are visited.

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform draw in `[0, 1)` with 53 bits of resolution.
pub fn uniform(seed: u64, level: u64, sweep: u64, node: u64) -> f64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ level);
    h = splitmix64(h ^ sweep);
    h = splitmix64(h ^ node);
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::uniform;

    #[test]
    fn draws_are_keyed() {
        let a = uniform(7, 0, 0, 0);
        assert_eq!(a, uniform(7, 0, 0, 0));
        assert_ne!(a, uniform(7, 0, 0, 1));
        assert_ne!(a, uniform(7, 0, 1, 0));
        assert_ne!(a, uniform(7, 1, 0, 0));
        assert_ne!(a, uniform(8, 0, 0, 0));
    }

    #[test]
    fn roughly_uniform() {
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|i| uniform(1, 2, 3, i)).collect();
        assert!(draws.iter().all(|&u| (0.0..1.0).contains(&u)));
        let mean = draws.iter().sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
        let below = draws.iter().filter(|&&u| u < 0.25).count() as f64 / n as f64;
        assert!((below - 0.25).abs() < 0.01, "{below}");
    }
}
