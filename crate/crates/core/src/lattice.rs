//! Lagrange-Gauss reduction of planar lattices given by complex bases.

use num_complex::Complex64 as C;

/// A reduced basis: `|v1| ≤ |v2|` and `|Re(v2·v̄1)| ≤ |v1|²/2`, so `v1` is a
/// shortest nonzero vector of the lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedBasis {
    pub v1: C,
    pub v2: C,
}

pub fn gauss_reduce(mut a: C, mut b: C) -> ReducedBasis {
    for _ in 0..10_000 {
        if b.norm_sqr() < a.norm_sqr() {
            core::mem::swap(&mut a, &mut b);
        }
        let k = ((b * a.conj()).re / a.norm_sqr()).round();
        if k == 0.0 || !k.is_finite() {
            break;
        }
        b -= a * k;
    }
    if b.norm_sqr() < a.norm_sqr() {
        core::mem::swap(&mut a, &mut b);
    }
    ReducedBasis { v1: a, v2: b }
}
