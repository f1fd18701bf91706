//! Seeded random sampling of phase-space points.
//!
//! A seed fully determines every point drawn through these helpers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::e3::E3State;
use crate::C64;

/// Half-width of the default sampling box `[−2, 2]⁶`.
pub const DEFAULT_RANGE: f64 = 2.0;

/// The generator behind every seeded draw.
pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    SampleRng::seed_from_u64(seed)
}

/// A state with every component uniform in `[−range, range]`.
pub fn uniform_state(rng: &mut impl Rng, range: f64) -> E3State {
    let mut c = [0.0; 6];
    for x in &mut c {
        *x = rng.random_range(-range..=range);
    }
    E3State::new([c[0], c[1], c[2]], [c[3], c[4], c[5]])
}

/// `n` states uniform in `[−2, 2]⁶` from a fixed seed.
pub fn uniform_states(seed: u64, n: usize) -> Vec<E3State> {
    let mut r = rng(seed);
    (0..n).map(|_| uniform_state(&mut r, DEFAULT_RANGE)).collect()
}

/// A spectral parameter with modulus uniform in `[0.5, 2]` and uniform argument.
pub fn spectral_parameter(rng: &mut impl Rng) -> C64 {
    let r = rng.random_range(0.5..=2.0);
    let phi = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    C64::from_polar(r, phi)
}

/// Draws uniform states until `accept` holds.
pub fn uniform_state_where(rng: &mut impl Rng, range: f64, accept: impl Fn(&E3State) -> bool) -> E3State {
    loop {
        let s = uniform_state(rng, range);
        if accept(&s) {
            return s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let a = uniform_states(42, 50);
        let b = uniform_states(42, 50);
        assert_eq!(a, b);
        assert_ne!(a, uniform_states(43, 50));
        assert!(a.iter().all(|s| s.to_vec6().amax() <= DEFAULT_RANGE));
    }
}
