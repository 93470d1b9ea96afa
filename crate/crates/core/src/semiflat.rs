//! The semi-flat Kähler metric of a [`FiberModel`].
//!
//! With `P = Im(τ̄1τ2)` and `Ω = g dz∧dw`,
//!
//! ```text
//! ω = i A dz∧dz̄ + (i/2)(ε/P)(dw - Γ dz)∧(dw̄ - Γ̄ dz̄),
//! A = |g|² P/ε,   B = ε/(2P),
//! Γ = (Im(τ̄1 w) τ2' - Im(τ̄2 w) τ1')/P,
//! ```
//!
//! so `h_{zz̄} = A + B|Γ|²`, `h_{ww̄} = B`, `h_{zw̄} = -BΓ` and
//! `det h = AB = |g|²/2`. All points are in the model's chart coordinate.

use num_complex::Complex64 as C;

use crate::fiber::{FiberModel, ModelError};
use crate::lattice::gauss_reduce;

/// A complex 2x2 matrix, row-major.
pub type CMat2 = [[C; 2]; 2];

const ZERO: C = C::new(0.0, 0.0);
const I: C = C::new(0.0, 1.0);

pub fn mat_mul(a: &CMat2, b: &CMat2) -> CMat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat_inv(a: &CMat2) -> CMat2 {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]]
}

pub fn mat_sub(a: &CMat2, b: &CMat2) -> CMat2 {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

pub fn mat_scale(a: &CMat2, s: C) -> CMat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn mat_norm(a: &CMat2) -> f64 {
    a.iter().flatten().fold(0.0, |m, x| m.max(x.norm()))
}

/// Metric coefficients `h_{jk̄}` in coordinates `(z, w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMatrix2 {
    pub h_zz: f64,
    pub h_ww: f64,
    /// Coefficient of `i dz∧dw̄`; the `i dw∧dz̄` coefficient is its conjugate.
    pub h_zw: C,
}

impl HermitianMatrix2 {
    pub fn det(&self) -> f64 {
        self.h_zz * self.h_ww - self.h_zw.norm_sqr()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = 0.5 * (self.h_zz + self.h_ww);
        let d = 0.5 * (self.h_zz - self.h_ww);
        m - (d * d + self.h_zw.norm_sqr()).sqrt()
    }

    pub fn is_positive(&self) -> bool {
        self.h_zz > 0.0 && self.h_ww > 0.0 && self.det() > 0.0
    }

    pub fn to_matrix(&self) -> CMat2 {
        [[C::new(self.h_zz, 0.0), self.h_zw], [self.h_zw.conj(), C::new(self.h_ww, 0.0)]]
    }

    pub fn max_abs(&self) -> f64 {
        self.h_zz.abs().max(self.h_ww.abs()).max(self.h_zw.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricPoint {
    pub z: C,
    pub w: C,
    pub matrix: HermitianMatrix2,
    pub a_coeff: f64,
    pub b_coeff: f64,
    pub gamma: C,
    /// `g` at the point, so `a_coeff·b_coeff = |g|²/2` can be checked.
    pub g: C,
}

/// Im(τ̄ w)
fn im_conj_mul(t: C, w: C) -> f64 {
    t.re * w.im - t.im * w.re
}

pub fn gamma(model: &FiberModel, s: C, w: C) -> Result<C, ModelError> {
    gamma_winding(model, s, w, 0)
}

fn gamma_winding(model: &FiberModel, s: C, w: C, winding: i32) -> Result<C, ModelError> {
    let j = model.jet(s, winding)?;
    let n = im_conj_mul(j.tau[0], w) * j.d1[1] - im_conj_mul(j.tau[1], w) * j.d1[0];
    Ok(n / j.pairing)
}

pub fn metric_at(model: &FiberModel, s: C, w: C) -> Result<MetricPoint, ModelError> {
    metric_at_winding(model, s, w, 0)
}

/// [`metric_at`] with the periods continued `winding` times around the puncture.
pub fn metric_at_winding(model: &FiberModel, s: C, w: C, winding: i32) -> Result<MetricPoint, ModelError> {
    let j = model.jet(s, winding)?;
    let (g, _) = model.g_jet(s)?;
    let eps = model.epsilon();
    let p = j.pairing;
    let gam = (im_conj_mul(j.tau[0], w) * j.d1[1] - im_conj_mul(j.tau[1], w) * j.d1[0]) / p;
    let a = g.norm_sqr() * p / eps;
    let b = eps / (2.0 * p);
    let matrix = HermitianMatrix2 { h_zz: a + b * gam.norm_sqr(), h_ww: b, h_zw: -b * gam };
    if !(a.is_finite() && b.is_finite() && gam.is_finite()) {
        return Err(ModelError::NonFinite);
    }
    Ok(MetricPoint { z: s, w, matrix, a_coeff: a, b_coeff: b, gamma: gam, g })
}

/// Metric matrix with its four Wirtinger derivatives `∂_z, ∂_z̄, ∂_w, ∂_w̄`,
/// all in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricJet {
    pub h: CMat2,
    /// Indexed as `d[k]` with `k = 0: ∂_z, 1: ∂_z̄, 2: ∂_w, 3: ∂_w̄`.
    pub d: [CMat2; 4],
}

pub fn metric_jet(model: &FiberModel, s: C, w: C) -> Result<MetricJet, ModelError> {
    let j = model.jet(s, 0)?;
    let (g, dg) = model.g_jet(s)?;
    let eps = model.epsilon();
    let [t1, t2] = j.tau;
    let [d1, d2] = j.d1;
    let [e1, e2] = j.d2;
    let p = j.pairing;
    let two_i = C::new(0.0, 2.0);

    // ∂_z P, with ∂_z̄ P its conjugate
    let dp = (t1.conj() * d2 - d1 * t2.conj()) / two_i;
    let dps = [dp, dp.conj(), ZERO, ZERO];

    let g2 = g.norm_sqr();
    let dg2 = dg * g.conj();
    let a = g2 * p / eps;
    let da = (dg2 * p + g2 * dp) / eps;
    let das = [da, da.conj(), ZERO, ZERO];
    let b = eps / (2.0 * p);
    let dbs = dps.map(|x| -eps * x / (2.0 * p * p));

    // Im(τ̄_i w) and its derivatives
    let im = [im_conj_mul(t1, w), im_conj_mul(t2, w)];
    let dim = |t: C, dt: C| -> [C; 4] {
        let dz = -dt * w.conj() / two_i;
        let dw = t.conj() / two_i;
        [dz, dz.conj(), dw, dw.conj()]
    };
    let di1 = dim(t1, d1);
    let di2 = dim(t2, d2);

    let n = im[0] * d2 - im[1] * d1;
    let mut dn = [ZERO; 4];
    for k in 0..4 {
        dn[k] = di1[k] * d2 - di2[k] * d1;
    }
    dn[0] += im[0] * e2 - im[1] * e1;

    let gam = n / p;
    let dgam: [C; 4] = core::array::from_fn(|k| (dn[k] - gam * dps[k]) / p);
    // derivatives of Γ̄: ∂_z Γ̄ = conj(∂_z̄ Γ) and so on
    let dgamc = [dgam[1].conj(), dgam[0].conj(), dgam[3].conj(), dgam[2].conj()];

    let h = [[C::new(a + b * gam.norm_sqr(), 0.0), -b * gam], [-b * gam.conj(), C::new(b, 0.0)]];
    let d = core::array::from_fn(|k| {
        let dzz = das[k] + dbs[k] * gam.norm_sqr() + b * (dgam[k] * gam.conj() + gam * dgamc[k]);
        let dzw = -(dbs[k] * gam + b * dgam[k]);
        let dwz = -(dbs[k] * gam.conj() + b * dgamc[k]);
        [[dzz, dzw], [dwz, dbs[k]]]
    });
    if !a.is_finite() || !gam.is_finite() {
        return Err(ModelError::NonFinite);
    }
    Ok(MetricJet { h, d })
}

/// The flat metric on the fiber over a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberFlatData {
    /// Lagrange-Gauss reduced basis of the fiber lattice, scaled by `√(2B)`.
    pub v1: C,
    pub v2: C,
    pub area: f64,
    pub shortest_vector: f64,
    /// Half the sum of the reduced basis lengths.
    pub diameter_proxy: f64,
}

fn flat_data(tau: [C; 2], eps: f64) -> FiberFlatData {
    let p = (tau[0].conj() * tau[1]).im;
    let b = eps / (2.0 * p);
    let scale = (2.0 * b).sqrt();
    let r = gauss_reduce(tau[0] * scale, tau[1] * scale);
    FiberFlatData {
        v1: r.v1,
        v2: r.v2,
        area: 2.0 * b * p,
        shortest_vector: r.v1.norm(),
        diameter_proxy: 0.5 * (r.v1.norm() + r.v2.norm()),
    }
}

pub fn fiber_flat_data(model: &FiberModel, s: C) -> Result<FiberFlatData, ModelError> {
    let j = model.jet(s, 0)?;
    Ok(flat_data(j.tau, model.epsilon()))
}

/// [`fiber_flat_data`] at `s = exp(log_s)`, usable far below the `f64` range.
pub fn fiber_flat_data_from_log(model: &FiberModel, log_s: C) -> Result<FiberFlatData, ModelError> {
    let tau = model.periods_from_log(log_s)?;
    if (tau[0].conj() * tau[1]).im <= 0.0 {
        return Err(ModelError::NonPositivePairing);
    }
    Ok(flat_data(tau, model.epsilon()))
}

/// A finite-difference defect together with the magnitude it should be compared to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        self.value / self.scale
    }
}

/// Default finite-difference step at chart point `s`: `10⁻⁴·|s|`.
pub fn default_step(s: C) -> f64 {
    1e-4 * s.norm()
}

/// Central Wirtinger differences `(∂F, ∂̄F)` of a matrix-valued map.
pub fn wirtinger_fd<F>(mut f: F, x: C, h: f64) -> Result<(CMat2, CMat2), ModelError>
where
    F: FnMut(C) -> Result<CMat2, ModelError>,
{
    let fx = mat_sub(&f(x + h)?, &f(x - h)?);
    let fy = mat_sub(&f(x + I * h)?, &f(x - I * h)?);
    let k = 1.0 / (4.0 * h);
    let d = mat_scale(&mat_sub(&fx, &mat_scale(&fy, I)), C::new(k, 0.0));
    let db = mat_scale(&[[fx[0][0] + I * fy[0][0], fx[0][1] + I * fy[0][1]], [fx[1][0] + I * fy[1][0], fx[1][1] + I * fy[1][1]]], C::new(k, 0.0));
    Ok((d, db))
}

/// Fourth-order central Wirtinger differences `(∂F, ∂̄F)`.
pub fn wirtinger_fd4<F>(mut f: F, x: C, h: f64) -> Result<(CMat2, CMat2), ModelError>
where
    F: FnMut(C) -> Result<CMat2, ModelError>,
{
    let mut dx = [[ZERO; 2]; 2];
    let mut dy = [[ZERO; 2]; 2];
    for (k, wgt) in [(1.0, 8.0), (2.0, -1.0)] {
        let ax = mat_sub(&f(x + k * h)?, &f(x - k * h)?);
        let ay = mat_sub(&f(x + I * (k * h))?, &f(x - I * (k * h))?);
        for i in 0..2 {
            for j in 0..2 {
                dx[i][j] += ax[i][j] * wgt;
                dy[i][j] += ay[i][j] * wgt;
            }
        }
    }
    let k = 1.0 / (24.0 * h);
    let d = core::array::from_fn(|i| core::array::from_fn(|j| (dx[i][j] - I * dy[i][j]) * k));
    let db = core::array::from_fn(|i| core::array::from_fn(|j| (dx[i][j] + I * dy[i][j]) * k));
    Ok((d, db))
}

/// Step used for the fiber direction: relative to the larger of `|w|` and the period lengths.
pub fn fiber_step(model: &FiberModel, s: C, w: C, step: f64) -> Result<f64, ModelError> {
    let j = model.jet(s, 0)?;
    let scale = w.norm().max(j.tau[0].norm()).max(j.tau[1].norm());
    Ok(step / s.norm() * scale)
}

/// Closedness defect of `ω` by central differences: the largest of
/// `|∂_w h_{zz̄} - ∂_z h_{wz̄}|`, `|∂_w h_{zw̄} - ∂_z h_{ww̄}|` and the two
/// conjugate relations. `step` is the absolute step in the base direction; the
/// fiber step is the same fraction of the fiber scale.
pub fn kahler_residual(model: &FiberModel, s: C, w: C, step: f64) -> Result<Residual, ModelError> {
    let hw = fiber_step(model, s, w, step)?;
    let (dz, dzb) = wirtinger_fd(|x| Ok(metric_at(model, x, w)?.matrix.to_matrix()), s, step)?;
    let (dw, dwb) = wirtinger_fd(|y| Ok(metric_at(model, s, y)?.matrix.to_matrix()), w, hw)?;
    let defects = [
        dw[0][0] - dz[1][0],
        dw[0][1] - dz[1][1],
        dwb[0][0] - dzb[0][1],
        dwb[1][0] - dzb[1][1],
    ];
    let value = defects.iter().fold(0.0f64, |m, d| m.max(d.norm()));
    let scale = metric_at(model, s, w)?.matrix.max_abs() / s.norm();
    Ok(Residual { value, scale })
}

/// Signed 5-point value of `∂_z∂_z̄ log det h` at `w = 0`, computed on
/// `log(det h(s+δ)/det h(s))` to keep round-off relative to the center.
fn ddbar_log_det(model: &FiberModel, s: C, step: f64) -> Result<f64, ModelError> {
    let d = |x: C| -> Result<f64, ModelError> { Ok(metric_at(model, x, ZERO)?.matrix.det()) };
    let d0 = d(s)?;
    let mut acc = 0.0;
    for off in [C::new(step, 0.0), C::new(-step, 0.0), C::new(0.0, step), C::new(0.0, -step)] {
        acc += ((d(s + off)? - d0) / d0).ln_1p();
    }
    Ok(acc / (4.0 * step * step))
}

/// `|∂_z∂_z̄ log det h|` by the 5-point Laplacian; compared against `1/|s|²`.
pub fn ricci_residual(model: &FiberModel, s: C, step: f64) -> Result<Residual, ModelError> {
    Ok(Residual { value: ddbar_log_det(model, s, step)?.abs(), scale: 1.0 / s.norm_sqr() })
}

/// [`ricci_residual`] with one Richardson extrapolation from steps `step` and `step/2`.
pub fn ricci_residual_richardson(model: &FiberModel, s: C, step: f64) -> Result<Residual, ModelError> {
    let coarse = ddbar_log_det(model, s, step)?;
    let fine = ddbar_log_det(model, s, 0.5 * step)?;
    Ok(Residual { value: ((4.0 * fine - coarse) / 3.0).abs(), scale: 1.0 / s.norm_sqr() })
}
