//! Semi-flat Calabi-Yau metrics on elliptic surfaces near a singular fiber.
//!
//! The crate is `no_std` (it needs `alloc`). Modules, bottom up:
//!
//! * [`sl2z`]: exact integer monodromy matrices and Kodaira classification.
//! * [`fiber`]: local period models, one per Kodaira type.
//! * [`semiflat`]: the semi-flat metric and its fiberwise flat tori.
//! * [`curvature`]: Chern curvature and the pointwise norm of the Riemann tensor.
//! * [`asymptotics`]: radial distance, volume growth, cone angles, ALH decay.
//! * [`ma`]: a Newton solver for the complex Monge-Ampere equation on flat
//!   tori.
//! * [`sobolev`]: a numerical probe of a weighted Sobolev inequality.
//!
//! Numerical helpers (quadrature, FFT, fits, lattice reduction) are public
//! because the front end and the tests use them directly.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod curvature;
pub mod fft;
pub mod fiber;
pub mod fit;
pub mod lattice;
pub mod ma;
pub mod quad;
pub mod semiflat;
pub mod sl2z;
pub mod sobolev;

pub use num_complex::Complex64;

/// `2π`.
pub const TAU: f64 = core::f64::consts::TAU;
