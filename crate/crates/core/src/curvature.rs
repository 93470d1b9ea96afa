//! Chern curvature `Θ = ∂(h⁻¹∂̄h)` of the semi-flat metric and its pointwise norm.
//!
//! The inner `h⁻¹∂̄h` comes from the closed-form metric derivatives of
//! [`metric_jet`]; only the outer `∂` is a (fourth-order) central difference. A fully nested
//! difference mode is kept for cross-checking at moderate radii.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C;
use thiserror::Error;

use crate::fiber::{FiberModel, ModelError, PoleFlag};
use crate::semiflat::{
    default_step, fiber_step, mat_inv, mat_mul, metric_at, metric_jet, wirtinger_fd, wirtinger_fd4,
    CMat2,
};
use crate::sl2z::KodairaType;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    WrongModel(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    /// Closed-form `∂̄h`, one layer of differencing.
    ClosedForm,
    /// Both layers by central differences.
    NestedFd,
}

/// Curvature components `k[l][m] = ∂_l(h⁻¹ ∂_{m̄} h)` with `l, m ∈ {z, w}`,
/// together with the metric matrix at the point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernCurvature {
    pub h: CMat2,
    pub k: [[CMat2; 2]; 2],
}

const ZERO: C = C::new(0.0, 0.0);

fn connection_bar(model: &FiberModel, s: C, w: C, mode: DerivativeMode, step: f64, hw: f64) -> Result<[CMat2; 2], ModelError> {
    let (h, dzb, dwb) = match mode {
        DerivativeMode::ClosedForm => {
            let j = metric_jet(model, s, w)?;
            (j.h, j.d[1], j.d[3])
        }
        DerivativeMode::NestedFd => {
            let h = metric_at(model, s, w)?.matrix.to_matrix();
            let (_, dzb) = wirtinger_fd(|x| Ok(metric_at(model, x, w)?.matrix.to_matrix()), s, step)?;
            let (_, dwb) = wirtinger_fd(|y| Ok(metric_at(model, s, y)?.matrix.to_matrix()), w, hw)?;
            (h, dzb, dwb)
        }
    };
    let hi = mat_inv(&h);
    Ok([mat_mul(&hi, &dzb), mat_mul(&hi, &dwb)])
}

/// All sixteen components of `Θ` at `(s, w)`; `step` is the base-direction
/// difference step (the fiber step is scaled to the period lengths).
pub fn chern_curvature(model: &FiberModel, s: C, w: C, mode: DerivativeMode, step: f64) -> Result<ChernCurvature, ModelError> {
    let hw = fiber_step(model, s, w, step)?;
    let h = metric_at(model, s, w)?.matrix.to_matrix();
    let mut k = [[[[ZERO; 2]; 2]; 2]; 2];
    let outer = |f: &dyn Fn(C) -> Result<CMat2, ModelError>, x: C, h: f64| match mode {
        DerivativeMode::ClosedForm => wirtinger_fd4(f, x, h),
        DerivativeMode::NestedFd => wirtinger_fd(f, x, h),
    };
    for m in 0..2 {
        let (dz, _) = outer(&|x| Ok(connection_bar(model, x, w, mode, step, hw)?[m]), s, step)?;
        let (dw, _) = outer(&|y| Ok(connection_bar(model, s, y, mode, step, hw)?[m]), w, hw)?;
        k[0][m] = dz;
        k[1][m] = dw;
    }
    Ok(ChernCurvature { h, k })
}

fn transpose(a: &CMat2) -> CMat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

fn conj(a: &CMat2) -> CMat2 {
    [[a[0][0].conj(), a[0][1].conj()], [a[1][0].conj(), a[1][1].conj()]]
}

impl ChernCurvature {
    /// `Σ_{j,k} g^{jj̄} g^{kk̄} tr(g⁻¹ Θ_{jk̄}ᵀ g Θ̄_{jk̄})`, valid where `h` is diagonal (`w = 0`).
    pub fn norm_sq(&self) -> f64 {
        let hi = mat_inv(&self.h);
        let mut acc = 0.0;
        for j in 0..2 {
            for k in 0..2 {
                let a = &self.k[j][k];
                let prod = mat_mul(&mat_mul(&mat_mul(&hi, &transpose(a)), &self.h), &conj(a));
                let tr = prod[0][0] + prod[1][1];
                acc += tr.re / (self.h[j][j].re * self.h[k][k].re);
            }
        }
        acc
    }

    pub fn max_component(&self) -> f64 {
        self.k.iter().flatten().flatten().flatten().fold(0.0, |m, x| m.max(x.norm()))
    }
}

/// `|Θ|²` at `(s, 0)` with closed-form inner derivatives and the default step.
pub fn theta_norm_sq(model: &FiberModel, s: C) -> Result<f64, ModelError> {
    theta_norm_sq_with(model, s, DerivativeMode::ClosedForm, default_step(s))
}

pub fn theta_norm_sq_with(model: &FiberModel, s: C, mode: DerivativeMode, step: f64) -> Result<f64, ModelError> {
    let v = chern_curvature(model, s, ZERO, mode, step)?.norm_sq();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ModelError::NonFinite)
    }
}

/// Natural size of `|Θ|²` at `s`: `(h_{zz̄}|s|²)⁻²`.
pub fn curvature_scale(model: &FiberModel, s: C) -> Result<f64, ModelError> {
    let h = metric_at(model, s, ZERO)?.matrix.h_zz;
    Ok((1.0 / (h * s.norm_sqr())).powi(2))
}

/// Leading asymptotic `|Θ|²` at `s` for the complete `I_b` and `I_b*` ends,
/// `0` for flat models, `None` when no closed form is known.
pub fn asymptotic_target(model: &FiberModel, s: C) -> Option<f64> {
    if model.is_flat() {
        return Some(0.0);
    }
    if model.pole() != PoleFlag::MinusD {
        return None;
    }
    let eps = model.epsilon();
    let k4 = (model.alpha() * model.k0().norm_sqr()).powi(2);
    let l = s.norm().ln().abs();
    match model.kodaira_type() {
        KodairaType::I(b) if b > 0 => Some(6.0 * PI * PI * eps * eps / ((b * b) as f64 * k4) / l.powi(6)),
        KodairaType::IStar(b) if b > 0 => {
            Some(PI * PI * eps * eps / (2.0 * (b * b) as f64 * k4) * s.norm().powi(4) / l.powi(4))
        }
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSample {
    pub z: C,
    pub theta_norm_sq: f64,
    pub target: Option<f64>,
    /// `theta_norm_sq / target` when the target is positive.
    pub ratio: Option<f64>,
}

pub fn curvature_sample(model: &FiberModel, s: C) -> Result<CurvatureSample, ModelError> {
    let theta = theta_norm_sq(model, s)?;
    let target = asymptotic_target(model, s);
    let ratio = target.filter(|t| *t > 0.0).map(|t| theta / t);
    Ok(CurvatureSample { z: s, theta_norm_sq: theta, target, ratio })
}

/// One sample per radius on the positive real axis, in input order.
pub fn curvature_decay_scan(model: &FiberModel, radii: &[f64]) -> Result<Vec<CurvatureSample>, ModelError> {
    radii.iter().map(|&r| curvature_sample(model, C::new(r, 0.0))).collect()
}

/// `|-∂_z∂_z̄ log Im τ - |τ'|²/(4 (Im τ)²)|` for the period map of an `I_0`
/// model, the Laplacian by the 5-point stencil with spacing `step`.
pub fn wp_residual(model: &FiberModel, z: C, step: f64) -> Result<f64, CurvatureError> {
    if !matches!(model.kodaira_type(), KodairaType::I(0) | KodairaType::IStar(0)) {
        return Err(CurvatureError::WrongModel("the Weil-Petersson identity needs an I_0 model"));
    }
    let tau = model.tau_function().ok_or(ModelError::MissingTau(model.kodaira_type()))?;
    if tau.is_constant() {
        return Ok(0.0);
    }
    let im0 = tau.value(z).im;
    if im0 <= 0.0 {
        return Err(ModelError::NonPositivePairing.into());
    }
    let mut lap = 0.0;
    for off in [C::new(step, 0.0), C::new(-step, 0.0), C::new(0.0, step), C::new(0.0, -step)] {
        let d = tau.difference(z, off).im / im0;
        lap += -d.ln_1p();
    }
    let lhs = lap / (4.0 * step * step);
    let rhs = tau.derivative(z).norm_sqr() / (4.0 * im0 * im0);
    Ok((lhs - rhs).abs())
}
