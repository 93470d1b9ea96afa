//! Built-in Monge-Ampère problems.

use semiflat_core::ma::{MaError, TorusGrid};
use semiflat_core::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Fixture {
    /// `f ≡ 0`.
    Zero,
    /// A smooth sinusoid of small amplitude.
    Sinusoid,
    /// `f` generated from a known smooth solution (`m = 2` only).
    Manufactured,
}

/// Amplitude of the manufactured solution.
pub const MANUFACTURED_AMP: f64 = 0.012;
pub const SINUSOID_AMP: f64 = 0.05;

/// `a·(sin 2πx1·cos 2πy2 + ½cos 2π(x2 + y1))` and its real Hessian in
/// `(x1, y1, x2, y2)`.
pub fn manufactured_solution(a: f64, p: [f64; 4]) -> (f64, [[f64; 4]; 4]) {
    let [x1, y1, x2, y2] = p.map(|t| TAU * t);
    let k2 = TAU * TAU;
    let u = a * (x1.sin() * y2.cos() + 0.5 * (x2 + y1).cos());
    let mut h = [[0.0; 4]; 4];
    h[0][0] = -a * k2 * x1.sin() * y2.cos();
    h[3][3] = h[0][0];
    h[0][3] = -a * k2 * x1.cos() * y2.sin();
    h[3][0] = h[0][3];
    let c = -0.5 * a * k2 * (x2 + y1).cos();
    for (i, j) in [(1, 1), (2, 2), (1, 2), (2, 1)] {
        h[i][j] += c;
    }
    (u, h)
}

/// `log(det(½δ + u_{jk̄}) / ¼)` from a real Hessian in `(x1, y1, x2, y2)`.
fn log_det_ratio(h: &[[f64; 4]; 4]) -> f64 {
    let a = 0.5 + 0.25 * (h[0][0] + h[1][1]);
    let d = 0.5 + 0.25 * (h[2][2] + h[3][3]);
    let re = 0.25 * (h[0][2] + h[1][3]);
    let im = 0.25 * (h[0][3] - h[1][2]);
    ((a * d - re * re - im * im) / 0.25).ln()
}

/// `(f, exact u)` for the manufactured fixture on an `n⁴` grid.
pub fn manufactured(n: usize) -> Result<(Vec<f64>, Vec<f64>), MaError> {
    let grid = TorusGrid::new(2, n)?;
    Ok((0..grid.len())
        .map(|i| {
            let (u, h) = manufactured_solution(MANUFACTURED_AMP, grid.point(i));
            (log_det_ratio(&h), u)
        })
        .unzip())
}

pub fn sinusoid(m: usize, n: usize, amp: f64) -> Result<Vec<f64>, MaError> {
    let grid = TorusGrid::new(m, n)?;
    Ok((0..grid.len())
        .map(|i| {
            let p = grid.point(i);
            amp * ((TAU * p[0]).sin() + 0.5 * (TAU * (p[1] + p[2 % grid.dims()])).cos())
        })
        .collect())
}

/// Right-hand side of a fixture, with the exact solution when known.
pub fn fixture_data(fixture: Fixture, m: usize, n: usize) -> Result<(Vec<f64>, Option<Vec<f64>>), MaError> {
    match fixture {
        Fixture::Zero => Ok((vec![0.0; TorusGrid::new(m, n)?.len()], None)),
        Fixture::Sinusoid => Ok((sinusoid(m, n, SINUSOID_AMP)?, None)),
        Fixture::Manufactured => {
            if m != 2 {
                return Err(MaError::BadDimension(m));
            }
            let (f, u) = manufactured(n)?;
            Ok((f, Some(u)))
        }
    }
}
