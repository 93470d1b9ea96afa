//! Local models of an elliptic fibration near a singular fiber.
//!
//! A [`FiberModel`] fixes a Kodaira type and the data entering the
//! semi-flat metric: the multiplicity `m` of the functional invariant, the
//! fiber area `ε`, the holomorphic factor `k(z)` of `Ω = g dz∧dw`, the choice
//! `div Ω ∈ {0, -D}`, and for `I_0`/`I_0*` the period map `τ(z)`.
//!
//! Evaluators work in the *chart coordinate* `s`. This is `z` for every type
//! except `I_b*` (including `I_0*`), where it is the half-disk coordinate `u`
//! with `z = u²`, `Re u > 0`. The square-root presentation in `z` is still
//! available through [`generators_z_presentation`] for monodromy checks.
//!
//! All fractional powers and logarithms use the principal branch. Analytic
//! continuation around the puncture is requested with an integer `winding`,
//! which adds `2πi·winding` to `log s`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::fmt;

use num_complex::Complex64 as C;
use thiserror::Error;

use crate::sl2z::{representative, KodairaType, Order};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error("alpha must be positive and finite, got {0}")]
    BadAlpha(f64),
    #[error("k(0) must be nonzero")]
    ZeroK0,
    #[error("multiplicity m = {m} is incompatible with type {kind}")]
    Congruence { kind: KodairaType, m: u32 },
    #[error("type {0} needs a period map tau(z)")]
    MissingTau(KodairaType),
    #[error("type {0} does not take a period map")]
    UnexpectedTau(KodairaType),
    #[error("tau(0) must lie in the upper half plane")]
    TauOutsideUpperHalfPlane,
    #[error("evaluation point is the puncture")]
    AtPuncture,
    #[error("evaluation point lies outside the unit disk")]
    OutsideDisk,
    #[error("evaluation point lies on the branch cut (-inf, 0]")]
    OnBranchCut,
    #[error("I_b* models are evaluated on the half disk Re u > 0")]
    OutsideHalfDisk,
    #[error("period pairing Im(conj(tau1) tau2) is not positive here")]
    NonPositivePairing,
    #[error("non-finite value encountered")]
    NonFinite,
}

/// `div Ω = 0` (incomplete base) or `div Ω = -D` (complete base).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoleFlag {
    Zero,
    MinusD,
}

/// Multiplicity `m` of the functional invariant at 0; `Isotrivial` means `z^m ≡ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JMultiplicity {
    Finite(u32),
    Isotrivial,
}

/// Holomorphic period map for the `I_0` and `I_0*` models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauFunction {
    /// `τ(z) = τ0 + slope·z`
    Affine { tau0: C, slope: C },
    /// `τ(z) = scale·exp(rate·z)`
    Exponential { scale: C, rate: C },
}

fn cexpm1(w: C) -> C {
    let (s, c) = w.im.sin_cos();
    let half = (0.5 * w.im).sin();
    C::new(w.re.exp_m1() * c - 2.0 * half * half, w.re.exp() * s)
}

impl TauFunction {
    pub fn constant(tau0: C) -> Self {
        TauFunction::Affine { tau0, slope: C::new(0.0, 0.0) }
    }

    pub fn value(&self, z: C) -> C {
        match *self {
            TauFunction::Affine { tau0, slope } => tau0 + slope * z,
            TauFunction::Exponential { scale, rate } => scale * (rate * z).exp(),
        }
    }

    pub fn derivative(&self, z: C) -> C {
        match *self {
            TauFunction::Affine { slope, .. } => slope,
            TauFunction::Exponential { scale, rate } => scale * rate * (rate * z).exp(),
        }
    }

    pub fn second_derivative(&self, z: C) -> C {
        match *self {
            TauFunction::Affine { .. } => C::new(0.0, 0.0),
            TauFunction::Exponential { scale, rate } => scale * rate * rate * (rate * z).exp(),
        }
    }

    /// `τ(z) - τ(0)` without cancellation.
    pub fn increment(&self, z: C) -> C {
        match *self {
            TauFunction::Affine { slope, .. } => slope * z,
            TauFunction::Exponential { scale, rate } => scale * cexpm1(rate * z),
        }
    }

    /// `τ(z + dz) - τ(z)` without cancellation.
    pub fn difference(&self, z: C, dz: C) -> C {
        match *self {
            TauFunction::Affine { slope, .. } => slope * dz,
            TauFunction::Exponential { scale, rate } => scale * (rate * z).exp() * cexpm1(rate * dz),
        }
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            TauFunction::Affine { slope, .. } => slope == C::new(0.0, 0.0),
            TauFunction::Exponential { scale, rate } => rate == C::new(0.0, 0.0) || scale == C::new(0.0, 0.0),
        }
    }
}

/// Which coordinate the evaluators take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// The base coordinate `z` on the punctured disk.
    Z,
    /// `u` with `z = u²` on the half disk `Re u > 0`.
    U,
}

/// Periods and their first derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodSample {
    pub tau1: C,
    pub tau2: C,
    pub dtau1: C,
    pub dtau2: C,
    pub pairing: f64,
}

/// Periods with first and second derivatives in the chart coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodJet {
    pub tau: [C; 2],
    pub d1: [C; 2],
    pub d2: [C; 2],
    pub pairing: f64,
}

impl PeriodJet {
    pub fn sample(&self) -> PeriodSample {
        PeriodSample { tau1: self.tau[0], tau2: self.tau[1], dtau1: self.d1[0], dtau2: self.d1[1], pairing: self.pairing }
    }
}

/// A rational cone angle as tabulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio(pub u32, pub u32);

impl Ratio {
    pub fn value(&self) -> f64 {
        self.0 as f64 / self.1 as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 == 1 {
            write!(f, "{}", self.0)
        } else {
            write!(f, "{}/{}", self.0, self.1)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberModel {
    kind: KodairaType,
    m: JMultiplicity,
    epsilon: f64,
    k: Vec<C>,
    pole: PoleFlag,
    tau: Option<TauFunction>,
    alpha: f64,
}

#[derive(Debug, Clone)]
pub struct FiberModelBuilder {
    model: FiberModel,
}

impl FiberModelBuilder {
    pub fn j_multiplicity(mut self, m: JMultiplicity) -> Self {
        self.model.m = m;
        self
    }

    pub fn epsilon(mut self, eps: f64) -> Self {
        self.model.epsilon = eps;
        self
    }

    pub fn k0(mut self, k0: C) -> Self {
        self.model.k = vec![k0];
        self
    }

    /// Polynomial `k(z) = Σ coeffs[j] zʲ`.
    pub fn k_poly(mut self, coeffs: Vec<C>) -> Self {
        self.model.k = coeffs;
        self
    }

    pub fn pole(mut self, pole: PoleFlag) -> Self {
        self.model.pole = pole;
        self
    }

    pub fn tau(mut self, tau: TauFunction) -> Self {
        self.model.tau = Some(tau);
        self
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.model.alpha = alpha;
        self
    }

    pub fn build(self) -> Result<FiberModel, ModelError> {
        let m = self.model;
        if !(m.epsilon.is_finite() && m.epsilon > 0.0) {
            return Err(ModelError::BadEpsilon(m.epsilon));
        }
        if !(m.alpha.is_finite() && m.alpha > 0.0) {
            return Err(ModelError::BadAlpha(m.alpha));
        }
        if m.k.first().is_none_or(|k0| *k0 == C::new(0.0, 0.0) || !k0.is_finite()) {
            return Err(ModelError::ZeroK0);
        }
        if let JMultiplicity::Finite(j) = m.m {
            let ok = match m.kind {
                KodairaType::II | KodairaType::IVStar => j % 3 == 1,
                KodairaType::IIStar | KodairaType::IV => j % 3 == 2,
                KodairaType::III | KodairaType::IIIStar => j % 2 == 1,
                _ => true,
            };
            if !ok {
                return Err(ModelError::Congruence { kind: m.kind, m: j });
            }
        }
        let needs_tau = matches!(m.kind, KodairaType::I(0) | KodairaType::IStar(0));
        match (needs_tau, m.tau) {
            (true, None) => return Err(ModelError::MissingTau(m.kind)),
            (false, Some(_)) => return Err(ModelError::UnexpectedTau(m.kind)),
            (true, Some(t)) if t.value(C::new(0.0, 0.0)).im <= 0.0 => {
                return Err(ModelError::TauOutsideUpperHalfPlane)
            }
            _ => {}
        }
        Ok(m)
    }
}

/// Fractional-power data of the finite-monodromy rows:
/// `τ1 = c1 (1 - κ1 x) s^e`, `τ2 = c2 (1 - κ2 x) s^e`, `x = s^q`.
struct PowerRow {
    e: f64,
    q_per_m: f64,
    c2: C,
    kappa2: C,
    pairing_const: f64,
}

fn zeta3() -> C {
    C::new(-0.5, 0.75f64.sqrt())
}

fn power_row(kind: KodairaType) -> Option<PowerRow> {
    let z3 = PowerRow { e: 0.0, q_per_m: 1.0 / 3.0, c2: zeta3(), kappa2: zeta3(), pairing_const: 0.75f64.sqrt() };
    let i4 = PowerRow { e: 0.0, q_per_m: 0.5, c2: C::new(0.0, 1.0), kappa2: C::new(-1.0, 0.0), pairing_const: 1.0 };
    match kind {
        KodairaType::II => Some(PowerRow { e: 5.0 / 6.0, ..z3 }),
        KodairaType::IVStar => Some(PowerRow { e: 1.0 / 3.0, ..z3 }),
        KodairaType::IIStar => Some(PowerRow { e: 1.0 / 6.0, ..z3 }),
        KodairaType::IV => Some(PowerRow { e: 2.0 / 3.0, ..z3 }),
        KodairaType::III => Some(PowerRow { e: 0.75, ..i4 }),
        KodairaType::IIIStar => Some(PowerRow { e: 0.25, ..i4 }),
        _ => None,
    }
}

impl FiberModel {
    /// Starts a model with defaults `m = ∞`, `ε = 1`, `k ≡ 1`, `div Ω = -D`, `α = 1`.
    pub fn builder(kind: KodairaType) -> FiberModelBuilder {
        FiberModelBuilder {
            model: FiberModel {
                kind,
                m: JMultiplicity::Isotrivial,
                epsilon: 1.0,
                k: vec![C::new(1.0, 0.0)],
                pole: PoleFlag::MinusD,
                tau: None,
                alpha: 1.0,
            },
        }
    }

    pub fn kodaira_type(&self) -> KodairaType {
        self.kind
    }
    pub fn j_multiplicity(&self) -> JMultiplicity {
        self.m
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn k0(&self) -> C {
        self.k[0]
    }
    pub fn k_coefficients(&self) -> &[C] {
        &self.k
    }
    pub fn has_constant_k(&self) -> bool {
        self.k[1..].iter().all(|c| *c == C::new(0.0, 0.0))
    }
    pub fn pole(&self) -> PoleFlag {
        self.pole
    }
    pub fn tau_function(&self) -> Option<TauFunction> {
        self.tau
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `b` for the `I_b` and `I_b*` families, `None` otherwise.
    pub fn b(&self) -> Option<u32> {
        match self.kind {
            KodairaType::I(b) | KodairaType::IStar(b) => Some(b),
            _ => None,
        }
    }

    pub fn chart(&self) -> Chart {
        match self.kind {
            KodairaType::IStar(_) => Chart::U,
            _ => Chart::Z,
        }
    }

    /// Whether the semi-flat metric of this model is flat (isotrivial finite monodromy,
    /// or `I_0`/`I_0*` with constant `τ` and `k`).
    pub fn is_flat(&self) -> bool {
        match self.kind {
            KodairaType::I(0) | KodairaType::IStar(0) => {
                self.tau.is_some_and(|t| t.is_constant()) && self.has_constant_k()
            }
            KodairaType::I(_) | KodairaType::IStar(_) => false,
            _ => self.m == JMultiplicity::Isotrivial && self.has_constant_k(),
        }
    }

    /// Exponent `q` of the correction term `x = s^q`, or `None` when isotrivial.
    fn correction_power(&self, row: &PowerRow) -> Option<f64> {
        match self.m {
            JMultiplicity::Finite(m) => Some(row.q_per_m * m as f64),
            JMultiplicity::Isotrivial => None,
        }
    }

    fn check_domain(&self, s: C, winding: i32) -> Result<(), ModelError> {
        if !s.is_finite() {
            return Err(ModelError::NonFinite);
        }
        if s == C::new(0.0, 0.0) {
            return Err(ModelError::AtPuncture);
        }
        if s.norm() >= 1.0 {
            return Err(ModelError::OutsideDisk);
        }
        match self.chart() {
            Chart::U if s.re <= 0.0 => Err(ModelError::OutsideHalfDisk),
            Chart::Z if winding == 0 && s.im == 0.0 && s.re < 0.0 => Err(ModelError::OnBranchCut),
            _ => Ok(()),
        }
    }

    /// `k(ζ)` and `dk/dζ` in the base coordinate.
    fn k_jet(&self, zeta: C) -> (C, C) {
        let mut v = C::new(0.0, 0.0);
        let mut d = C::new(0.0, 0.0);
        for c in self.k.iter().rev() {
            d = d * zeta + v;
            v = v * zeta + c;
        }
        (v, d)
    }

    /// Power `p` in `g = √α k s^{-p}`.
    pub fn g_power(&self) -> i32 {
        match (self.chart(), self.pole) {
            (Chart::U, PoleFlag::MinusD) => 2,
            (Chart::U, PoleFlag::Zero) => 0,
            (Chart::Z, PoleFlag::MinusD) => multiplicity_n(self) as i32 + 1,
            (Chart::Z, PoleFlag::Zero) => multiplicity_n(self) as i32,
        }
    }

    /// `g(s)` and `g'(s)` in the chart coordinate.
    pub fn g_jet(&self, s: C) -> Result<(C, C), ModelError> {
        if s == C::new(0.0, 0.0) {
            return Err(ModelError::AtPuncture);
        }
        let sa = self.alpha.sqrt();
        let p = self.g_power();
        let (k, dk) = match self.chart() {
            Chart::Z => self.k_jet(s),
            Chart::U => {
                let (k, dk) = self.k_jet(s * s);
                (k, dk * 2.0 * s)
            }
        };
        let sp = s.powi(-p);
        let g = sa * k * sp;
        let dg = sa * (dk * sp - k * (p as f64) * sp / s);
        Ok((g, dg))
    }

    /// Periods with two derivatives at the chart point `s`.
    pub fn jet(&self, s: C, winding: i32) -> Result<PeriodJet, ModelError> {
        self.check_domain(s, winding)?;
        let log_s = s.ln() + C::new(0.0, TAU * winding as f64);
        let zero = C::new(0.0, 0.0);
        let one = C::new(1.0, 0.0);
        let (tau, d1, d2) = match self.kind {
            KodairaType::I(0) => {
                let t = self.tau.ok_or(ModelError::MissingTau(self.kind))?;
                ([one, t.value(s)], [zero, t.derivative(s)], [zero, t.second_derivative(s)])
            }
            KodairaType::IStar(0) => {
                let t = self.tau.ok_or(ModelError::MissingTau(self.kind))?;
                let z = s * s;
                let (d, dd) = (t.derivative(z), t.second_derivative(z));
                ([one, t.value(z)], [zero, 2.0 * s * d], [zero, 2.0 * d + 4.0 * z * dd])
            }
            KodairaType::I(b) => {
                let c = C::new(0.0, -(b as f64) / TAU);
                ([one, c * log_s], [zero, c / s], [zero, -c / (s * s)])
            }
            KodairaType::IStar(b) => {
                let c = C::new(0.0, -(b as f64) / PI);
                ([one, c * log_s], [zero, c / s], [zero, -c / (s * s)])
            }
            _ => {
                let row = power_row(self.kind).ok_or(ModelError::NonFinite)?;
                let cs = [one, row.c2];
                let ks = [one, row.kappa2];
                let e = row.e;
                let pw = |p: f64| (log_s * p).exp();
                let mut tau = [zero; 2];
                let mut d1 = [zero; 2];
                let mut d2 = [zero; 2];
                let base = pw(e);
                let base1 = pw(e - 1.0) * e;
                let base2 = pw(e - 2.0) * (e * (e - 1.0));
                match self.correction_power(&row) {
                    None => {
                        for i in 0..2 {
                            tau[i] = cs[i] * base;
                            d1[i] = cs[i] * base1;
                            d2[i] = cs[i] * base2;
                        }
                    }
                    Some(q) => {
                        let f = e + q;
                        let (c0, c1, c2) = (pw(f), pw(f - 1.0) * f, pw(f - 2.0) * (f * (f - 1.0)));
                        for i in 0..2 {
                            tau[i] = cs[i] * (base - ks[i] * c0);
                            d1[i] = cs[i] * (base1 - ks[i] * c1);
                            d2[i] = cs[i] * (base2 - ks[i] * c2);
                        }
                    }
                }
                (tau, d1, d2)
            }
        };
        let pairing = (tau[0].conj() * tau[1]).im;
        if !pairing.is_finite() {
            return Err(ModelError::NonFinite);
        }
        if pairing <= 0.0 {
            return Err(ModelError::NonPositivePairing);
        }
        Ok(PeriodJet { tau, d1, d2, pairing })
    }

    /// Periods from `log s` only, for radii far below `f64` range. Only the
    /// `I_b`/`I_b*` families with `b > 0` are supported here.
    pub fn periods_from_log(&self, log_s: C) -> Result<[C; 2], ModelError> {
        let one = C::new(1.0, 0.0);
        match self.kind {
            KodairaType::I(b) if b > 0 => Ok([one, C::new(0.0, -(b as f64) / TAU) * log_s]),
            KodairaType::IStar(b) if b > 0 => Ok([one, C::new(0.0, -(b as f64) / PI) * log_s]),
            _ => self.jet(log_s.exp(), 0).map(|j| j.tau),
        }
    }

    /// Closed-form pairing `Im(τ̄1 τ2)` for radial evaluation at `|s| = e^{-x}`,
    /// returned as a logarithm. `None` for non-radial models.
    pub fn log_pairing_radial(&self, x: f64) -> Option<f64> {
        match self.kind {
            KodairaType::I(0) | KodairaType::IStar(0) => {
                let t = self.tau?;
                if !t.is_constant() {
                    return None;
                }
                Some(t.value(C::new(0.0, 0.0)).im.ln())
            }
            KodairaType::I(b) => Some((b as f64 / TAU * x).ln()),
            KodairaType::IStar(b) => Some((b as f64 / PI * x).ln()),
            _ => {
                let row = power_row(self.kind)?;
                let mut lp = row.pairing_const.ln() - 2.0 * row.e * x;
                if let Some(q) = self.correction_power(&row) {
                    lp += (-(-2.0 * q * x).exp_m1()).ln();
                }
                Some(lp)
            }
        }
    }
}

/// Periods `(τ1, τ2)` with first derivatives at the chart point `s`.
pub fn generators(model: &FiberModel, s: C, winding: i32) -> Result<PeriodSample, ModelError> {
    model.jet(s, winding).map(|j| j.sample())
}

/// Periods in the `z`-presentation of the table: identical to [`generators`]
/// except for `I_b*`, whose generators are `z^{1/2}` and `z^{1/2}·(b/2πi) log z`
/// (`z^{1/2}τ(z)` for `b = 0`).
pub fn generators_z_presentation(model: &FiberModel, z: C, winding: i32) -> Result<PeriodSample, ModelError> {
    let b = match model.kodaira_type() {
        KodairaType::IStar(b) => b,
        _ => return generators(model, z, winding),
    };
    if z == C::new(0.0, 0.0) {
        return Err(ModelError::AtPuncture);
    }
    if z.norm() >= 1.0 {
        return Err(ModelError::OutsideDisk);
    }
    if winding == 0 && z.im == 0.0 && z.re < 0.0 {
        return Err(ModelError::OnBranchCut);
    }
    let log_z = z.ln() + C::new(0.0, TAU * winding as f64);
    let h = (0.5 * log_z).exp();
    let dh = h / (2.0 * z);
    let (f, df) = if b == 0 {
        let t = model.tau_function().ok_or(ModelError::MissingTau(model.kodaira_type()))?;
        (t.value(z), t.derivative(z))
    } else {
        let c = C::new(0.0, -(b as f64) / TAU);
        (c * log_z, c / z)
    };
    let tau1 = h;
    let tau2 = h * f;
    let pairing = (tau1.conj() * tau2).im;
    if pairing <= 0.0 {
        return Err(ModelError::NonPositivePairing);
    }
    Ok(PeriodSample { tau1, tau2, dtau1: dh, dtau2: dh * f + h * df, pairing })
}

/// Pole order `N` of the table: 0 for `I_b` (`b ≥ 0`), 1 otherwise.
pub fn multiplicity_n(model: &FiberModel) -> u32 {
    multiplicity_n_of(model.kodaira_type())
}

pub fn multiplicity_n_of(kind: KodairaType) -> u32 {
    match kind {
        KodairaType::I(_) => 0,
        _ => 1,
    }
}

/// Tabulated tangent-cone angles `(θ for div Ω = 0, θ for div Ω = -D)`.
pub fn cone_angles_of(kind: KodairaType) -> (Ratio, Ratio) {
    match kind {
        KodairaType::I(_) => (Ratio(1, 1), Ratio(0, 1)),
        KodairaType::IStar(_) => (Ratio(1, 2), Ratio(1, 2)),
        KodairaType::II => (Ratio(5, 6), Ratio(1, 6)),
        KodairaType::IVStar => (Ratio(1, 3), Ratio(2, 3)),
        KodairaType::IIStar => (Ratio(1, 6), Ratio(5, 6)),
        KodairaType::IV => (Ratio(2, 3), Ratio(1, 3)),
        KodairaType::III => (Ratio(3, 4), Ratio(1, 4)),
        KodairaType::IIIStar => (Ratio(1, 4), Ratio(3, 4)),
    }
}

pub fn cone_angles(model: &FiberModel) -> (f64, f64) {
    let (a, b) = cone_angles_of(model.kodaira_type());
    (a.value(), b.value())
}

/// `g(s) = √α k z^{-N-1}` (`div Ω = -D`) or `√α k z^{-N}` (`div Ω = 0`).
///
/// For `I_b*` the argument is the chart coordinate `u` and the result is the
/// half-disk density `√α u^{-2} k(u²)` (resp. `√α k(u²)`).
pub fn volume_density_g(model: &FiberModel, s: C) -> Result<C, ModelError> {
    model.g_jet(s).map(|(g, _)| g)
}

/// Relative defect `max_i |T(winding 1)_i - (T·A)_i| / max_i |T_i|` of the
/// monodromy transformation, `A` the type's representative matrix.
pub fn monodromy_consistency(model: &FiberModel, z: C) -> Result<f64, ModelError> {
    let t0 = generators_z_presentation(model, z, 0)?;
    let t1 = generators_z_presentation(model, z, 1)?;
    let a = representative(model.kodaira_type()).map_err(|_| ModelError::NonFinite)?;
    let [a11, a12, a21, a22] = a.entries().map(|x| x as f64);
    let expect1 = t0.tau1 * a11 + t0.tau2 * a21;
    let expect2 = t0.tau1 * a12 + t0.tau2 * a22;
    let scale = t0.tau1.norm().max(t0.tau2.norm());
    let res = (t1.tau1 - expect1).norm().max((t1.tau2 - expect2).norm());
    Ok(res / scale)
}

/// Family of a table row; `I_b` rows are parametrized by `b ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowFamily {
    Fixed(KodairaType),
    Ib,
    IbStar,
}

impl RowFamily {
    pub fn instantiate(&self, b: u32) -> KodairaType {
        match *self {
            RowFamily::Fixed(t) => t,
            RowFamily::Ib => KodairaType::I(b),
            RowFamily::IbStar => KodairaType::IStar(b),
        }
    }
}

/// One row of the Kodaira table with the data entering the semi-flat metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub j_value: &'static str,
    pub j_multiplicity: &'static str,
    pub family: RowFamily,
    pub type_label: &'static str,
    pub matrix: &'static str,
    pub order: Order,
    pub tau1: &'static str,
    pub tau2: &'static str,
    pub n: u32,
    pub theta_incomplete: Ratio,
    pub theta_complete: Ratio,
}

const fn row(
    j_value: &'static str,
    j_multiplicity: &'static str,
    family: RowFamily,
    type_label: &'static str,
    matrix: &'static str,
    order: Order,
    gens: (&'static str, &'static str),
    n: u32,
    angles: (Ratio, Ratio),
) -> TableRow {
    TableRow {
        j_value,
        j_multiplicity,
        family,
        type_label,
        matrix,
        order,
        tau1: gens.0,
        tau2: gens.1,
        n,
        theta_incomplete: angles.0,
        theta_complete: angles.1,
    }
}

const I0_GENS: (&str, &str) = ("1", "tau(z)");
const I0S_GENS: (&str, &str) = ("z^(1/2)", "z^(1/2)*tau(z)");
const I0_ROW: (RowFamily, &str, &str, Order) = (RowFamily::Fixed(KodairaType::I(0)), "I_0", "+1", Order::Finite(1));
const I0S_ROW: (RowFamily, &str, &str, Order) =
    (RowFamily::Fixed(KodairaType::IStar(0)), "I_0*", "-1", Order::Finite(2));

macro_rules! trivial_pair {
    ($j:expr, $mult:expr) => {
        [
            row($j, $mult, I0_ROW.0, I0_ROW.1, I0_ROW.2, I0_ROW.3, I0_GENS, 0, (Ratio(1, 1), Ratio(0, 1))),
            row($j, $mult, I0S_ROW.0, I0S_ROW.1, I0S_ROW.2, I0S_ROW.3, I0S_GENS, 1, (Ratio(1, 2), Ratio(1, 2))),
        ]
    };
}

/// The Kodaira table, one entry per printed row (14 rows).
pub fn table_rows() -> Vec<TableRow> {
    use KodairaType::*;
    let [g0, g0s] = trivial_pair!("generic", "any");
    let [t0, t0s] = trivial_pair!("0", "0 mod 3");
    let [o0, o0s] = trivial_pair!("1", "0 mod 2");
    vec![
        g0,
        g0s,
        row(
            "0",
            "1 mod 3",
            RowFamily::Fixed(II),
            "II",
            "+(0 1; -1 1)",
            Order::Finite(6),
            ("(1-z^(m/3))*z^(5/6)", "zeta3*(1-zeta3*z^(m/3))*z^(5/6)"),
            1,
            (Ratio(5, 6), Ratio(1, 6)),
        ),
        row(
            "0",
            "1 mod 3",
            RowFamily::Fixed(IVStar),
            "IV*",
            "-(0 1; -1 1)",
            Order::Finite(3),
            ("(1-z^(m/3))*z^(1/3)", "zeta3*(1-zeta3*z^(m/3))*z^(1/3)"),
            1,
            (Ratio(1, 3), Ratio(2, 3)),
        ),
        row(
            "0",
            "2 mod 3",
            RowFamily::Fixed(IIStar),
            "II*",
            "+(1 -1; 1 0)",
            Order::Finite(6),
            ("(1-z^(m/3))*z^(1/6)", "zeta3*(1-zeta3*z^(m/3))*z^(1/6)"),
            1,
            (Ratio(1, 6), Ratio(5, 6)),
        ),
        row(
            "0",
            "2 mod 3",
            RowFamily::Fixed(IV),
            "IV",
            "-(1 -1; 1 0)",
            Order::Finite(3),
            ("(1-z^(m/3))*z^(2/3)", "zeta3*(1-zeta3*z^(m/3))*z^(2/3)"),
            1,
            (Ratio(2, 3), Ratio(1, 3)),
        ),
        t0,
        t0s,
        row(
            "1",
            "1 mod 2",
            RowFamily::Fixed(III),
            "III",
            "+(0 1; -1 0)",
            Order::Finite(4),
            ("(1-z^(m/2))*z^(3/4)", "i*(1+z^(m/2))*z^(3/4)"),
            1,
            (Ratio(3, 4), Ratio(1, 4)),
        ),
        row(
            "1",
            "1 mod 2",
            RowFamily::Fixed(IIIStar),
            "III*",
            "-(0 1; -1 0)",
            Order::Finite(4),
            ("(1-z^(m/2))*z^(1/4)", "i*(1+z^(m/2))*z^(1/4)"),
            1,
            (Ratio(1, 4), Ratio(3, 4)),
        ),
        o0,
        o0s,
        row(
            "inf",
            "-b",
            RowFamily::Ib,
            "I_b",
            "+(1 b; 0 1)",
            Order::Infinite,
            ("1", "b/(2*pi*i)*log(z)"),
            0,
            (Ratio(1, 1), Ratio(0, 1)),
        ),
        row(
            "inf",
            "-b",
            RowFamily::IbStar,
            "I_b*",
            "-(1 b; 0 1)",
            Order::Infinite,
            ("z^(1/2)", "b/(2*pi*i)*z^(1/2)*log(z)"),
            1,
            (Ratio(1, 2), Ratio(1, 2)),
        ),
    ]
}

/// Parses a table matrix cell such as `-(0 1; -1 1)`, `+1` or `+(1 b; 0 1)`,
/// substituting `b`.
pub fn parse_matrix_cell(cell: &str, b: i64) -> Option<[i64; 4]> {
    let cell = cell.trim();
    let (sign, rest) = match cell.as_bytes().first()? {
        b'+' => (1, &cell[1..]),
        b'-' => (-1, &cell[1..]),
        _ => (1, cell),
    };
    let base = if rest == "1" {
        [1, 0, 0, 1]
    } else {
        let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
        let mut out = [0i64; 4];
        let mut i = 0;
        for tok in inner.split(|c: char| c == ';' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            if i >= 4 {
                return None;
            }
            out[i] = match tok {
                "b" => b,
                "-b" => -b,
                t => t.parse().ok()?,
            };
            i += 1;
        }
        if i != 4 {
            return None;
        }
        out
    };
    Some(base.map(|x| sign * x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2z::{classify, order};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn model(kind: KodairaType) -> FiberModel {
        let b = FiberModel::builder(kind);
        match kind {
            KodairaType::I(0) | KodairaType::IStar(0) => b.tau(TauFunction::constant(c(0.1, 1.2))).build().unwrap(),
            _ => b.build().unwrap(),
        }
    }

    #[test]
    fn isotrivial_ii_ratio_is_zeta3() {
        let g = generators(&model(KodairaType::II), c(0.37, 0.0), 0).unwrap();
        let r = g.tau2 / g.tau1;
        assert!((r - zeta3()).norm() < 1e-15);
    }

    #[test]
    fn isotrivial_ii_pairing() {
        let g = generators(&model(KodairaType::II), c(0.5, 0.0), 0).unwrap();
        let expect = 0.75f64.sqrt() * 0.5f64.powf(5.0 / 3.0);
        assert!((g.pairing / expect - 1.0).abs() < 1e-14);
    }

    #[test]
    fn i1_pairing_at_tenth() {
        let g = generators(&model(KodairaType::I(1)), c(0.1, 0.0), 0).unwrap();
        // τ2 = log(0.1)/(2πi) = -i·log(0.1)/2π, so Im τ2 = log(10)/2π
        assert!((g.pairing - 10f64.ln() / TAU).abs() < 1e-15);
    }

    #[test]
    fn finite_m_ii_pairing_closed_form() {
        for m in [1u32, 4, 7] {
            let mdl = FiberModel::builder(KodairaType::II).j_multiplicity(JMultiplicity::Finite(m)).build().unwrap();
            for z in [c(0.3, 0.2), c(-0.2, 0.5), c(0.05, -0.01)] {
                let g = generators(&mdl, z, 0).unwrap();
                let r = z.norm();
                let expect = 0.75f64.sqrt() * r.powf(5.0 / 3.0) * (1.0 - r.powf(2.0 * m as f64 / 3.0));
                assert!((g.pairing / expect - 1.0).abs() < 1e-12, "m={m} z={z}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        let mdl = model(KodairaType::I(1));
        assert_eq!(generators(&mdl, c(0.0, 0.0), 0), Err(ModelError::AtPuncture));
        assert_eq!(generators(&mdl, c(1.0, 0.0), 0), Err(ModelError::OutsideDisk));
        assert_eq!(generators(&mdl, c(-0.5, 0.0), 0), Err(ModelError::OnBranchCut));
        assert!(generators(&mdl, c(-0.5, 0.0), 1).is_ok());
        let star = model(KodairaType::IStar(1));
        assert_eq!(generators(&star, c(-0.1, 0.1), 0), Err(ModelError::OutsideHalfDisk));
    }

    #[test]
    fn builder_validation() {
        assert!(matches!(
            FiberModel::builder(KodairaType::II).j_multiplicity(JMultiplicity::Finite(2)).build(),
            Err(ModelError::Congruence { .. })
        ));
        assert!(FiberModel::builder(KodairaType::IV).j_multiplicity(JMultiplicity::Finite(5)).build().is_ok());
        assert!(FiberModel::builder(KodairaType::III).j_multiplicity(JMultiplicity::Finite(4)).build().is_err());
        assert_eq!(FiberModel::builder(KodairaType::I(0)).build(), Err(ModelError::MissingTau(KodairaType::I(0))));
        assert_eq!(FiberModel::builder(KodairaType::I(1)).epsilon(0.0).build(), Err(ModelError::BadEpsilon(0.0)));
        assert_eq!(FiberModel::builder(KodairaType::I(1)).k0(c(0.0, 0.0)).build(), Err(ModelError::ZeroK0));
        assert_eq!(
            FiberModel::builder(KodairaType::I(0)).tau(TauFunction::constant(c(0.0, -1.0))).build(),
            Err(ModelError::TauOutsideUpperHalfPlane)
        );
    }

    #[test]
    fn n_and_angles() {
        assert_eq!(multiplicity_n(&model(KodairaType::I(0))), 0);
        assert_eq!(multiplicity_n(&model(KodairaType::II)), 1);
        assert_eq!(multiplicity_n(&model(KodairaType::IStar(2))), 1);
        assert_eq!(cone_angles(&model(KodairaType::II)), (5.0 / 6.0, 1.0 / 6.0));
        assert_eq!(cone_angles(&model(KodairaType::IStar(0))), (0.5, 0.5));
        assert_eq!(cone_angles(&model(KodairaType::I(3))), (1.0, 0.0));
    }

    #[test]
    fn g_examples() {
        let i1 = model(KodairaType::I(1));
        assert!((volume_density_g(&i1, c(0.2, 0.0)).unwrap() - c(5.0, 0.0)).norm() < 1e-14);
        let ii = FiberModel::builder(KodairaType::II).pole(PoleFlag::Zero).build().unwrap();
        assert!((volume_density_g(&ii, c(0.5, 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-14);
        let i0 = FiberModel::builder(KodairaType::I(0))
            .k0(c(2.0, 0.0))
            .tau(TauFunction::constant(c(0.0, 1.0)))
            .build()
            .unwrap();
        assert!((volume_density_g(&i0, c(0.1, 0.0)).unwrap() - c(20.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn monodromy_examples() {
        assert!(monodromy_consistency(&model(KodairaType::I(1)), c(0.3, 0.0)).unwrap() < 1e-12);
        assert!(monodromy_consistency(&model(KodairaType::II), c(0.25, 0.0)).unwrap() < 1e-12);
        assert_eq!(monodromy_consistency(&model(KodairaType::I(0)), c(0.25, 0.1)).unwrap(), 0.0);
    }

    #[test]
    fn table_rows_are_self_consistent() {
        let rows = table_rows();
        assert_eq!(rows.len(), 14);
        for r in &rows {
            for b in 1..=3u32 {
                let t = r.family.instantiate(b);
                let cell = parse_matrix_cell(r.matrix, b as i64).unwrap();
                let rep = representative(t).unwrap();
                assert_eq!(rep.entries(), cell, "{}", r.type_label);
                assert_eq!(order(&rep), r.order);
                assert_eq!(classify(&rep).unwrap().kodaira_type, t);
                assert_eq!(multiplicity_n_of(t), r.n);
                assert_eq!(cone_angles_of(t), (r.theta_incomplete, r.theta_complete));
            }
        }
    }

    #[test]
    fn matrix_cell_parsing() {
        assert_eq!(parse_matrix_cell("-(0 1; -1 1)", 0), Some([0, -1, 1, -1]));
        assert_eq!(parse_matrix_cell("+(1 b; 0 1)", 4), Some([1, 4, 0, 1]));
        assert_eq!(parse_matrix_cell("-1", 0), Some([-1, 0, 0, -1]));
        assert_eq!(parse_matrix_cell("(1 2 3)", 0), None);
    }
}
