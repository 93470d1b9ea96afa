//! Empirical probe of the weighted Sobolev inequality
//! `(∫|u|^{2α}(1+r)^{α(β-2)-β})^{1/α} ≤ C ∫|∇u|²` on flat `R^β` for radial,
//! compactly supported, piecewise-smooth `u`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use thiserror::Error;

use crate::quad::{integrate, QuadError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SobolevError {
    #[error("dimension must be 3 or 4, got {0}")]
    BadDimension(f64),
    #[error("alpha = {alpha} outside [1, {max}]")]
    AlphaOutOfRange { alpha: f64, max: f64 },
    #[error("dilation must be positive and finite, got {0}")]
    BadDilation(f64),
    #[error("profile {0} is not integrable")]
    NonIntegrable(&'static str),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Radial profiles supported in the unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialProfile {
    Zero,
    /// `(1 - r)₊`
    Tent,
    /// `(1 - r²)²₊`
    Quartic,
    /// `cos²(πr/2)` on `[0, 1]`
    Cosine,
    /// 1 on `[0, ½]`, then linear down to 0 at `r = 1`
    Plateau,
    /// `exp(1 - 1/(1 - r²))`
    Bump,
}

impl RadialProfile {
    /// The non-trivial family used by [`sobolev_probe`] by default.
    pub const FAMILY: [RadialProfile; 5] = [
        RadialProfile::Tent,
        RadialProfile::Quartic,
        RadialProfile::Cosine,
        RadialProfile::Plateau,
        RadialProfile::Bump,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RadialProfile::Zero => "zero",
            RadialProfile::Tent => "tent",
            RadialProfile::Quartic => "quartic",
            RadialProfile::Cosine => "cosine",
            RadialProfile::Plateau => "plateau",
            RadialProfile::Bump => "bump",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [RadialProfile::Zero].iter().chain(&Self::FAMILY).copied().find(|p| p.name() == s)
    }

    pub fn value(self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        match self {
            RadialProfile::Zero => 0.0,
            RadialProfile::Tent => 1.0 - r,
            RadialProfile::Quartic => (1.0 - r * r) * (1.0 - r * r),
            RadialProfile::Cosine => (0.5 * PI * r).cos().powi(2),
            RadialProfile::Plateau => {
                if r <= 0.5 {
                    1.0
                } else {
                    2.0 * (1.0 - r)
                }
            }
            RadialProfile::Bump => (1.0 - 1.0 / (1.0 - r * r)).exp(),
        }
    }

    /// `du/dr`, one-sided from the left at kinks.
    pub fn derivative(self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        match self {
            RadialProfile::Zero => 0.0,
            RadialProfile::Tent => -1.0,
            RadialProfile::Quartic => -4.0 * r * (1.0 - r * r),
            RadialProfile::Cosine => -0.5 * PI * (PI * r).sin(),
            RadialProfile::Plateau => {
                if r <= 0.5 {
                    0.0
                } else {
                    -2.0
                }
            }
            RadialProfile::Bump => {
                let q = 1.0 - r * r;
                self.value(r) * (-2.0 * r / (q * q))
            }
        }
    }

    /// Interior radii where the profile fails to be smooth.
    fn kinks(self) -> &'static [f64] {
        match self {
            RadialProfile::Plateau => &[0.5],
            _ => &[],
        }
    }
}

/// `|S^{β-1}|`.
pub fn sphere_area(beta: u32) -> Option<f64> {
    match beta {
        3 => Some(4.0 * PI),
        4 => Some(2.0 * PI * PI),
        _ => None,
    }
}

/// `α(β - 2) - β`.
pub fn weight_exponent(beta: f64, alpha: f64) -> f64 {
    alpha * (beta - 2.0) - beta
}

/// One evaluation of both sides for `u(λ·)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevSample {
    pub profile: RadialProfile,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `None` for the excluded `0/0` case.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevReport {
    pub beta: u32,
    pub alpha: f64,
    pub samples: Vec<SobolevSample>,
    /// Profiles whose ratio is `0/0`.
    pub excluded: Vec<RadialProfile>,
    /// Largest ratio over all profiles and dilations.
    pub sup_ratio: f64,
    /// Largest `max_λ ratio / min_λ ratio` over the profiles.
    pub stability_factor: f64,
}

const QUAD_REL_TOL: f64 = 1e-11;

fn check_params(beta: u32, alpha: f64) -> Result<f64, SobolevError> {
    let area = sphere_area(beta).ok_or(SobolevError::BadDimension(beta as f64))?;
    let max = beta as f64 / (beta as f64 - 2.0);
    if !(alpha >= 1.0 && alpha <= max) {
        return Err(SobolevError::AlphaOutOfRange { alpha, max });
    }
    Ok(area)
}

fn split_integral(
    f: impl Fn(f64) -> f64,
    support: f64,
    kinks: impl Iterator<Item = f64>,
) -> Result<f64, QuadError> {
    let mut total = 0.0;
    let mut lo = 0.0;
    for hi in kinks.chain(core::iter::once(support)) {
        total += integrate(&f, lo, hi, QUAD_REL_TOL, 0.0)?.value;
        lo = hi;
    }
    Ok(total)
}

/// Both sides of the inequality for `u(λ·)` on `R^β`.
pub fn sobolev_sides(
    beta: u32,
    alpha: f64,
    profile: RadialProfile,
    lambda: f64,
) -> Result<SobolevSample, SobolevError> {
    let area = check_params(beta, alpha)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(SobolevError::BadDilation(lambda));
    }
    let w = weight_exponent(beta as f64, alpha);
    let b1 = beta as i32 - 1;
    let support = 1.0 / lambda;
    let kinks = || profile.kinks().iter().map(|k| k / lambda);
    let lhs_int = split_integral(
        |r| profile.value(lambda * r).abs().powf(2.0 * alpha) * (1.0 + r).powf(w) * r.powi(b1),
        support,
        kinks(),
    )?;
    let rhs_int = split_integral(
        |r| {
            let d = lambda * profile.derivative(lambda * r);
            d * d * r.powi(b1)
        },
        support,
        kinks(),
    )?;
    let lhs = (area * lhs_int).powf(1.0 / alpha);
    let rhs = area * rhs_int;
    if !(lhs.is_finite() && rhs.is_finite()) {
        return Err(SobolevError::NonIntegrable(profile.name()));
    }
    let ratio = if lhs == 0.0 && rhs == 0.0 {
        None
    } else if rhs == 0.0 {
        return Err(SobolevError::NonIntegrable(profile.name()));
    } else {
        Some(lhs / rhs)
    };
    Ok(SobolevSample { profile, lambda, lhs, rhs, ratio })
}

/// The dilations `2⁻⁴, 2⁻³, …, 2⁴`.
pub fn default_dilations() -> Vec<f64> {
    (-4..=4).map(|k| 2f64.powi(k)).collect()
}

/// Ratios over every profile and dilation, with the sup and the dilation
/// stability factor.
pub fn sobolev_probe(
    beta: u32,
    alpha: f64,
    profiles: &[RadialProfile],
    dilations: &[f64],
) -> Result<SobolevReport, SobolevError> {
    check_params(beta, alpha)?;
    let mut samples = Vec::with_capacity(profiles.len() * dilations.len());
    let mut excluded = Vec::new();
    let mut sup_ratio = 0.0f64;
    let mut stability_factor = 1.0f64;
    for &p in profiles {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        let mut any = false;
        for &l in dilations {
            let s = sobolev_sides(beta, alpha, p, l)?;
            if let Some(q) = s.ratio {
                any = true;
                lo = lo.min(q);
                hi = hi.max(q);
            }
            samples.push(s);
        }
        if any {
            sup_ratio = sup_ratio.max(hi);
            stability_factor = stability_factor.max(hi / lo);
        } else {
            excluded.push(p);
        }
    }
    Ok(SobolevReport { beta, alpha, samples, excluded, sup_ratio, stability_factor })
}
