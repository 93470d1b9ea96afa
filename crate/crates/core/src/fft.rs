//! In-place radix-2 complex FFT and its application along the axes of a
//! periodic grid.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64 as C;

#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    twiddles: Vec<C>,
    rev: Vec<usize>,
}

impl Fft {
    /// `None` unless `n` is a power of two.
    pub fn new(n: usize) -> Option<Self> {
        if n == 0 || !n.is_power_of_two() {
            return None;
        }
        let bits = n.trailing_zeros();
        let rev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        let twiddles = (0..n / 2)
            .map(|k| {
                let (s, c) = (-TAU * k as f64 / n as f64).sin_cos();
                C::new(c, s)
            })
            .collect();
        Some(Fft { n, twiddles, rev })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `X_k = Σ x_j e^{-2πijk/n}`, or the conjugate transform when `inverse`
    /// (unnormalized).
    pub fn transform(&self, buf: &mut [C], inverse: bool) {
        let n = self.n;
        debug_assert_eq!(buf.len(), n);
        for i in 0..n {
            let j = self.rev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let step = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..len / 2 {
                    let w = self.twiddles[k * step];
                    let w = if inverse { w.conj() } else { w };
                    let a = buf[start + k];
                    let b = buf[start + k + len / 2] * w;
                    buf[start + k] = a + b;
                    buf[start + k + len / 2] = a - b;
                }
            }
            len <<= 1;
        }
    }

    /// Transform along every axis of a `dims`-dimensional grid with `n` points
    /// per axis, stored with the last axis fastest.
    pub fn transform_grid(&self, data: &mut [C], dims: usize, inverse: bool) {
        let n = self.n;
        let total = data.len();
        debug_assert_eq!(total, n.pow(dims as u32));
        for axis in 0..dims {
            let stride = n.pow((dims - 1 - axis) as u32);
            for block in data.chunks_exact_mut(stride * n) {
                if stride == 1 {
                    self.transform(block, inverse);
                } else {
                    self.transform_rows(block, stride, inverse);
                }
            }
        }
    }

    /// Transforms the `n` rows of length `stride` in `block` against each
    /// other, one butterfly per contiguous row pair.
    fn transform_rows(&self, block: &mut [C], stride: usize, inverse: bool) {
        let n = self.n;
        for i in 0..n {
            let j = self.rev[i];
            if i < j {
                let (lo, hi) = block.split_at_mut(j * stride);
                lo[i * stride..(i + 1) * stride].swap_with_slice(&mut hi[..stride]);
            }
        }
        let mut len = 2;
        while len <= n {
            let step = n / len;
            let half = len / 2;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * step];
                    let w = if inverse { w.conj() } else { w };
                    let (lo, hi) = block.split_at_mut((start + k + half) * stride);
                    let ra = &mut lo[(start + k) * stride..(start + k + 1) * stride];
                    let rb = &mut hi[..stride];
                    for (a, b) in ra.iter_mut().zip(rb.iter_mut()) {
                        let t = *b * w;
                        *b = *a - t;
                        *a += t;
                    }
                }
            }
            len <<= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dft(x: &[C]) -> Vec<C> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| {
                        let (s, c) = (-TAU * (j * k) as f64 / n as f64).sin_cos();
                        v * C::new(c, s)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_direct_dft() {
        for n in [1usize, 2, 8, 32] {
            let x: Vec<C> = (0..n).map(|j| C::new((j as f64 * 0.7).sin(), (j * j) as f64 * 0.01)).collect();
            let mut y = x.clone();
            Fft::new(n).unwrap().transform(&mut y, false);
            for (a, b) in y.iter().zip(dft(&x)) {
                assert!((a - b).norm() < 1e-12 * n as f64);
            }
        }
    }

    #[test]
    fn grid_round_trip() {
        let n = 8;
        let plan = Fft::new(n).unwrap();
        let x: Vec<C> = (0..n * n * n).map(|j| C::new((j as f64).cos(), 0.0)).collect();
        let mut y = x.clone();
        plan.transform_grid(&mut y, 3, false);
        plan.transform_grid(&mut y, 3, true);
        for (a, b) in y.iter().zip(&x) {
            assert!((a / (n * n * n) as f64 - b).norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Fft::new(12).is_none());
        assert!(Fft::new(0).is_none());
    }
}
