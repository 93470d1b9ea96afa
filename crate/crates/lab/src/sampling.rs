//! Seeded random sampling for property checks.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semiflat_core::sl2z::IntMatrix2;
use semiflat_core::Complex64 as C;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// A random element of SL(2,Z) with first column entries in `[-bound, bound]`.
pub fn random_sl2z(rng: &mut impl Rng, bound: i64) -> IntMatrix2 {
    loop {
        let (a, c) = (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
        let (g, x, y) = ext_gcd(a, c);
        if g != 1 {
            continue;
        }
        // a·x + c·y = 1, so (a -y; c x) has determinant 1.
        let k = rng.gen_range(-3..=3);
        let (b, d) = (-y + k * a, x + k * c);
        if let Ok(p) = IntMatrix2::new(a, b, c, d) {
            return p;
        }
    }
}

/// Uniform point in the annulus `r0 ≤ |s| ≤ r1` (uniform in `log|s|`).
pub fn annulus_point(rng: &mut impl Rng, r0: f64, r1: f64) -> C {
    let r = (rng.gen_range(r0.ln()..=r1.ln())).exp();
    C::from_polar(r, rng.gen_range(-3.1..3.1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2z_samples_have_det_one() {
        let mut g = rng(7);
        for _ in 0..200 {
            let [a, b, c, d] = random_sl2z(&mut g, 50).entries();
            assert_eq!(a * d - b * c, 1);
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let a: Vec<_> = (0..5).map(|_| random_sl2z(&mut rng(3), 20)).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
    }
}
