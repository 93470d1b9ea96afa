//! Radial geometry of the base: distances, ball volumes, cone angles,
//! injectivity proxies and the exponential approach to a flat cylinder.
//!
//! Radial quantities are integrated in `x = -ln|s|` so that radii far below
//! the `f64` range (the `I_b` end reaches `|z| ~ e^{-24000}`) stay usable.

use alloc::vec::Vec;

use num_complex::Complex64 as C;
use thiserror::Error;

use crate::fiber::{Chart, FiberModel, ModelError, PoleFlag, TauFunction};
use crate::fit::{exponential_fit, power_law_fit, FitError, GrowthFit};
use crate::quad::{integrate, integrate_to_infinity, QuadError};
use crate::sl2z::KodairaType;
use crate::semiflat::fiber_flat_data_from_log;
use crate::TAU;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("the base metric of this model is not radial")]
    NonRadial,
    #[error("operation needs {0}")]
    WrongModel(&'static str),
    #[error("radius {0} outside (0, 1)")]
    BadRadius(f64),
    #[error("distance {0} is not reached inside the disk")]
    DistanceOutOfRange(f64),
}

/// Base radius of every scan.
pub const R_BASE: f64 = 0.5;
/// Relative tolerance of the radial quadratures.
pub const RADIAL_REL_TOL: f64 = 1e-10;
/// Relative tolerance of the distance inversion.
pub const INVERSION_TOL: f64 = 1e-10;
/// Ratio `q` between the two radii of the complete-end secant.
pub const SECANT_RATIO: f64 = 10.0;

const MAX_X: f64 = 1e7;

/// Radial conformal factor `λ` of the base metric `λ|ds|²` in the chart
/// coordinate, `λ = |g|²·Im(τ̄1τ2)/ε`.
#[derive(Debug, Clone)]
pub struct BaseMetric {
    model: FiberModel,
    log_prefactor: f64,
    power: i32,
    angle: f64,
}

impl BaseMetric {
    /// Fails with [`AsymptoticsError::NonRadial`] unless `k` is constant and the
    /// pairing depends on `|s|` only.
    pub fn new(model: &FiberModel) -> Result<Self, AsymptoticsError> {
        if !model.has_constant_k() || model.log_pairing_radial(1.0).is_none() {
            return Err(AsymptoticsError::NonRadial);
        }
        let k0 = model.k0().norm_sqr();
        Ok(BaseMetric {
            model: model.clone(),
            log_prefactor: (model.alpha() * k0 / model.epsilon()).ln(),
            power: model.g_power(),
            angle: match model.chart() {
                Chart::Z => 1.0,
                Chart::U => 0.5,
            },
        })
    }

    pub fn model(&self) -> &FiberModel {
        &self.model
    }

    /// Fraction of the full circle covered by the chart (½ on the `u` half-disk).
    pub fn angle_factor(&self) -> f64 {
        self.angle
    }

    /// `ln λ` at `|s| = e^{-x}`.
    pub fn log_lambda(&self, x: f64) -> f64 {
        let lp = self.model.log_pairing_radial(x).unwrap_or(f64::NAN);
        self.log_prefactor + 2.0 * self.power as f64 * x + lp
    }

    pub fn lambda(&self, r: f64) -> f64 {
        self.log_lambda(-r.ln()).exp()
    }

    /// `√λ·t` at `t = e^{-x}`: the distance density in `x`.
    pub fn length_density(&self, x: f64) -> f64 {
        (0.5 * self.log_lambda(x) - x).exp()
    }

    /// `λ·t²` at `t = e^{-x}`: the area density in `x` per unit angle.
    pub fn area_density(&self, x: f64) -> f64 {
        (self.log_lambda(x) - 2.0 * x).exp()
    }

    /// Length of the circle `|s| = e^{-x}` inside the chart.
    pub fn circumference(&self, x: f64) -> f64 {
        self.angle * TAU * self.length_density(x)
    }

    pub fn is_complete(&self) -> bool {
        self.model.pole() == PoleFlag::MinusD
    }
}

fn x_of(r: f64) -> Result<f64, AsymptoticsError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(AsymptoticsError::BadRadius(r));
    }
    Ok(-r.ln())
}

/// Distance between the circles `|s| = e^{-x0}` and `|s| = e^{-x1}`, `x0 ≤ x1`.
pub fn radial_distance_log(base: &BaseMetric, x0: f64, x1: f64) -> Result<f64, AsymptoticsError> {
    if x1 <= x0 {
        return Ok(0.0);
    }
    let q = integrate(|x| base.length_density(x), x0, x1, RADIAL_REL_TOL, 0.0)?;
    Ok(q.value)
}

/// `∫_{r1}^{r0} √λ(t) dt` for `0 < r1 ≤ r0 < 1`.
pub fn radial_distance(base: &BaseMetric, r0: f64, r1: f64) -> Result<f64, AsymptoticsError> {
    let (x0, x1) = (x_of(r0)?, x_of(r1)?);
    radial_distance_log(base, x0, x1)
}

/// Distance from `|s| = e^{-x}` to the puncture (finite only on incomplete ends).
pub fn distance_to_puncture_log(base: &BaseMetric, x: f64) -> Result<f64, AsymptoticsError> {
    let q = integrate_to_infinity(|y| base.length_density(y), x, RADIAL_REL_TOL, 0.0)?;
    Ok(q.value)
}

/// `x` with `radial_distance_log(base, x0, x) = d`, by bisection.
pub fn invert_distance(base: &BaseMetric, x0: f64, d: f64) -> Result<f64, AsymptoticsError> {
    if d <= 0.0 {
        return Ok(x0);
    }
    let mut lo = x0;
    let mut step = 1.0;
    let mut hi = x0 + step;
    while radial_distance_log(base, x0, hi)? < d {
        lo = hi;
        step *= 2.0;
        hi = x0 + step;
        if hi > MAX_X {
            return Err(AsymptoticsError::DistanceOutOfRange(d));
        }
    }
    // The distance is increasing in x; keep it bracketed between lo and hi.
    while hi - lo > INVERSION_TOL * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if radial_distance_log(base, x0, mid)? < d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Volume of the preimage of the ball of radius `s` about `|z| = ½`, taken
/// toward the puncture: `ε·∫ λ dA` over `R(s) ≤ |z| ≤ ½`.
pub fn ball_volume(base: &BaseMetric, s: f64) -> Result<f64, AsymptoticsError> {
    let x0 = -R_BASE.ln();
    let x1 = invert_distance(base, x0, s)?;
    let area = integrate(|x| base.area_density(x), x0, x1, RADIAL_REL_TOL, 0.0)?.value;
    Ok(base.model.epsilon() * base.angle * TAU * area)
}

/// Ball volumes at the given radii and their power-law fit.
pub fn volume_growth_scan(base: &BaseMetric, radii: &[f64]) -> Result<GrowthFit, AsymptoticsError> {
    let samples = radii.iter().map(|&s| ball_volume(base, s).map(|v| (s, v))).collect::<Result<Vec<_>, _>>()?;
    Ok(power_law_fit(&samples)?)
}

fn secant_angle(base: &BaseMetric, x: f64) -> Result<f64, AsymptoticsError> {
    let x2 = x + SECANT_RATIO.ln();
    let dc = base.circumference(x2) - base.circumference(x);
    let dr = radial_distance_log(base, x, x2)?;
    Ok(dc / (TAU * dr))
}

/// Tangent-cone angle estimate `θ` at radius `r`.
///
/// Incomplete ends (`div Ω = 0`): circumference over `2π` times the distance
/// to the puncture. Complete ends: the secant `ΔC/(2π ΔD)` between `r` and
/// `r/q`, which removes the offset of the base point. A complete end whose
/// secant keeps shrinking (compared at `x` and `2x`) is a half-line and gives 0.
pub fn cone_angle_numeric(base: &BaseMetric, r: f64) -> Result<f64, AsymptoticsError> {
    let x = x_of(r)?;
    if !base.is_complete() {
        let radius = distance_to_puncture_log(base, x)?;
        return Ok(base.circumference(x) / (TAU * radius));
    }
    let near = secant_angle(base, x)?;
    let far = secant_angle(base, 2.0 * x)?;
    if near.abs() < 1e-9 || far < 0.75 * near {
        return Ok(0.0);
    }
    Ok(near)
}

/// Fiber loop statistics against the base distance from `|z| = ½`.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectivityScan {
    /// `(r, x, shortest loop, diameter proxy)` per radius.
    pub rows: Vec<(f64, f64, f64, f64)>,
    pub shortest_vs_r: GrowthFit,
    pub shortest_vs_log_r: GrowthFit,
    pub diameter_vs_r: GrowthFit,
}

/// Shortest fiber loop and fiber diameter at base distance `r` for each `r`
/// in `radii` (distances, each > 1), with power-law fits against `r` and `log r`.
pub fn injectivity_proxy_scan(model: &FiberModel, radii: &[f64]) -> Result<InjectivityScan, AsymptoticsError> {
    if !matches!(model.kodaira_type(), KodairaType::I(b) | KodairaType::IStar(b) if b > 0) {
        return Err(AsymptoticsError::WrongModel("an I_b or I_b* model with b > 0"));
    }
    if model.pole() != PoleFlag::MinusD {
        return Err(AsymptoticsError::WrongModel("a complete end (div Ω = -D)"));
    }
    let base = BaseMetric::new(model)?;
    let x0 = -R_BASE.ln();
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let x = invert_distance(&base, x0, r)?;
        let f = fiber_flat_data_from_log(model, C::new(-x, 0.0))?;
        rows.push((r, x, f.shortest_vector, f.diameter_proxy));
    }
    let by = |a: fn(&(f64, f64, f64, f64)) -> (f64, f64)| rows.iter().map(a).collect::<Vec<_>>();
    Ok(InjectivityScan {
        shortest_vs_r: power_law_fit(&by(|r| (r.0, r.2)))?,
        shortest_vs_log_r: power_law_fit(&by(|r| (r.0.ln(), r.2)))?,
        diameter_vs_r: power_law_fit(&by(|r| (r.0, r.3)))?,
        rows,
    })
}

/// Approach of an `I_0` end with `div Ω = -D` to the flat cylinder.
#[derive(Debug, Clone, PartialEq)]
pub struct AlhReport {
    /// `√α·|k(0)|·(2 Im τ(0))^{1/2}`.
    pub mu: f64,
    /// Length of the `S¹` factor of the limiting cylinder.
    pub circle_length: f64,
    /// `√ε/μ`.
    pub rate_target: f64,
    /// `(t, deviation)` with `t = Re u`.
    pub samples: Vec<(f64, f64)>,
    /// Exponential fit of the deviation; `None` when every deviation vanishes.
    pub fit: Option<GrowthFit>,
}

impl AlhReport {
    /// Fitted decay rate (minus the fitted exponent).
    pub fn rate(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| -f.exponent)
    }
}

const ALH_ANGLES: usize = 8;
const ALH_CELL: usize = 6;

/// Relative deviation of the metric at cylinder depth `x = -ln|z|` from
/// the flat product, maximized over the circle and the fiber cell.
fn alh_deviation(model: &FiberModel, tau: &TauFunction, mu: f64, x: f64) -> Result<f64, AsymptoticsError> {
    let eps = model.epsilon();
    let tau0 = tau.value(C::new(0.0, 0.0));
    let hww0 = eps / (2.0 * tau0.im);
    let mut worst: f64 = 0.0;
    for j in 0..ALH_ANGLES {
        let phi = TAU * (j as f64 + 0.5) / ALH_ANGLES as f64;
        let z = C::from_polar((-x).exp(), phi);
        let dtau = tau.increment(z);
        let t = tau0 + dtau;
        let pairing = t.im;
        let b = eps / (2.0 * pairing);
        // dz/du = -(√ε/μ) z
        let dzdu = -z * (eps.sqrt() / mu);
        let dev_ww = (dtau.im / pairing).abs();
        for a in 0..ALH_CELL {
            for c in 0..ALH_CELL {
                let w = (a as f64 + 0.5) / ALH_CELL as f64 + t * ((c as f64 + 0.5) / ALH_CELL as f64);
                let gz = tau.derivative(z) * (w.im / pairing) * dzdu;
                // h_uu = ½ Im τ(z)/Im τ(0) + B|Γ dz/du|², flat value ½
                let dev_uu = (dtau.im / tau0.im + 2.0 * b * gz.norm_sqr()).abs();
                let dev_uw = b * gz.norm() / (0.5 * hww0).sqrt();
                worst = worst.max(dev_uu).max(dev_ww).max(dev_uw);
            }
        }
    }
    Ok(worst)
}

/// Deviation from the flat cylinder at cylinder depths `t_samples`, with an
/// exponential fit of the decay.
pub fn alh_decay(model: &FiberModel, t_samples: &[f64]) -> Result<AlhReport, AsymptoticsError> {
    if model.kodaira_type() != KodairaType::I(0) || model.pole() != PoleFlag::MinusD {
        return Err(AsymptoticsError::WrongModel("an I_0 model with div Ω = -D"));
    }
    if !model.has_constant_k() {
        return Err(AsymptoticsError::NonRadial);
    }
    let tau = model.tau_function().ok_or(ModelError::MissingTau(model.kodaira_type()))?;
    let eps = model.epsilon();
    let tau0 = tau.value(C::new(0.0, 0.0));
    let mu = model.alpha().sqrt() * model.k0().norm() * (2.0 * tau0.im).sqrt();
    let scale = mu / eps.sqrt();
    let mut samples = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        samples.push((t, alh_deviation(model, &tau, mu, t / scale)?));
    }
    let fit = if samples.iter().all(|s| s.1 == 0.0) { None } else { Some(exponential_fit(&samples)?) };
    Ok(AlhReport { mu, circle_length: TAU * scale, rate_target: 1.0 / scale, samples, fit })
}

/// Circumference of `|z| = e^{-x}` measured by the Kähler-form normalization
/// `ω = (i/2)·2λ dz∧dz̄` used for the cylinder, which tends to the `S¹` length.
pub fn cylinder_circumference(base: &BaseMetric, x: f64) -> f64 {
    core::f64::consts::SQRT_2 * base.circumference(x)
}
