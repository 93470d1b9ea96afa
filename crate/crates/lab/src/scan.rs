//! Radial scans over a model, one CSV row per radius, with optional
//! built-in tolerance checks.

use rayon::prelude::*;
use semiflat_core::asymptotics::{
    alh_decay, ball_volume, cone_angle_numeric, injectivity_proxy_scan, BaseMetric,
};
use semiflat_core::curvature::{curvature_sample, curvature_scale};
use semiflat_core::fiber::{cone_angles, Chart, FiberModel, PoleFlag};
use semiflat_core::fit::power_law_fit;
use semiflat_core::sl2z::KodairaType;
use semiflat_core::Complex64 as C;
use serde_json::Value;

use crate::error::Result;
use crate::output::{json_f64, Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScanKind {
    Curvature,
    Volume,
    ConeAngle,
    Inj,
    Alh,
}

/// A named built-in check and whether it held.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn abs(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, target, tolerance, pass: (value - target).abs() <= tolerance }
    }

    fn rel(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, target, tolerance, pass: (value / target - 1.0).abs() <= tolerance }
    }

    fn below(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, target: bound, tolerance: 0.0, pass: value < bound }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutput {
    pub table: Table,
    pub checks: Vec<Check>,
}

impl ScanOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Records the checks in the table summary.
    fn summarize_checks(mut self) -> Self {
        for c in &self.checks {
            self.table.summarize(&format!("check_{}", c.name), c.pass);
        }
        self
    }
}

pub fn run_scan(kind: ScanKind, model: &FiberModel, radii: &[f64]) -> Result<ScanOutput> {
    let out = match kind {
        ScanKind::Curvature => curvature_scan(model, radii)?,
        ScanKind::Volume => volume_scan(model, radii)?,
        ScanKind::ConeAngle => cone_angle_scan(model, radii)?,
        ScanKind::Inj => inj_scan(model, radii)?,
        ScanKind::Alh => alh_scan(model, radii)?,
    };
    Ok(out.summarize_checks())
}

fn last_by_radius(radii: &[f64]) -> usize {
    // the sample nearest the puncture
    (0..radii.len()).min_by(|&a, &b| radii[a].total_cmp(&radii[b])).unwrap_or(0)
}

pub fn curvature_scan(model: &FiberModel, radii: &[f64]) -> Result<ScanOutput> {
    let rows = radii
        .par_iter()
        .map(|&r| {
            let s = C::new(r, 0.0);
            Ok((curvature_sample(model, s)?, curvature_scale(model, s)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["r", "z_abs", "theta_sq", "target", "ratio"]);
    for (&r, (s, _)) in radii.iter().zip(&rows) {
        let z_abs = if model.chart() == Chart::U { r * r } else { r };
        table.push(vec![r.into(), z_abs.into(), s.theta_norm_sq.into(), s.target.into(), s.ratio.into()]);
    }
    let mut checks = Vec::new();
    if model.is_flat() {
        let worst = rows.iter().map(|(s, scale)| s.theta_norm_sq / scale).fold(0.0, f64::max);
        checks.push(Check::below("flat", worst, 1e-10));
    } else if let Some(ratio) = rows.get(last_by_radius(radii)).and_then(|(s, _)| s.ratio) {
        checks.push(Check::abs("ratio", ratio, 1.0, 0.15));
    }
    Ok(ScanOutput { table, checks })
}

/// Expected growth exponent of ball volumes on a complete end.
pub fn expected_volume_exponent(kind: KodairaType) -> f64 {
    match kind {
        KodairaType::I(b) if b > 0 => 4.0 / 3.0,
        _ => 2.0,
    }
}

pub fn volume_scan(model: &FiberModel, radii: &[f64]) -> Result<ScanOutput> {
    let base = BaseMetric::new(model)?;
    let samples =
        radii.par_iter().map(|&s| Ok((s, ball_volume(&base, s)?))).collect::<Result<Vec<_>>>()?;
    let fit = power_law_fit(&samples).map_err(semiflat_core::asymptotics::AsymptoticsError::from)?;
    let mut table = Table::new(&["s", "volume"]);
    for &(s, v) in &samples {
        table.push(vec![s.into(), v.into()]);
    }
    table.summarize("exponent", json_f64(fit.exponent));
    table.summarize("r_squared", json_f64(fit.r_squared));
    let mut checks = Vec::new();
    if model.pole() == PoleFlag::MinusD {
        checks.push(Check::abs("exponent", fit.exponent, expected_volume_exponent(model.kodaira_type()), 0.05));
    }
    Ok(ScanOutput { table, checks })
}

/// The tabulated angle for the model's pole flag.
pub fn tabulated_angle(model: &FiberModel) -> f64 {
    let (inc, comp) = cone_angles(model);
    if model.pole() == PoleFlag::Zero {
        inc
    } else {
        comp
    }
}

pub fn cone_angle_scan(model: &FiberModel, radii: &[f64]) -> Result<ScanOutput> {
    let base = BaseMetric::new(model)?;
    let target = tabulated_angle(model);
    let thetas = radii.par_iter().map(|&r| Ok(cone_angle_numeric(&base, r)?)).collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&["r", "theta", "target", "ratio"]);
    for (&r, &th) in radii.iter().zip(&thetas) {
        let ratio = if target > 0.0 { Cell::from(th / target) } else { Cell::Empty };
        table.push(vec![r.into(), th.into(), target.into(), ratio]);
    }
    let mut checks = Vec::new();
    if let Some(&th) = thetas.get(last_by_radius(radii)) {
        checks.push(if target == 0.0 { Check::abs("theta", th, 0.0, 0.0) } else { Check::rel("theta", th, target, 0.02) });
    }
    Ok(ScanOutput { table, checks })
}

pub fn inj_scan(model: &FiberModel, radii: &[f64]) -> Result<ScanOutput> {
    let scan = injectivity_proxy_scan(model, radii)?;
    let mut table = Table::new(&["r", "x", "shortest", "diameter"]);
    for &(r, x, a, d) in &scan.rows {
        table.push(vec![r.into(), x.into(), a.into(), d.into()]);
    }
    table.summarize("shortest_vs_r", json_f64(scan.shortest_vs_r.exponent));
    table.summarize("shortest_vs_log_r", json_f64(scan.shortest_vs_log_r.exponent));
    table.summarize("diameter_vs_r", json_f64(scan.diameter_vs_r.exponent));
    let checks = match model.kodaira_type() {
        KodairaType::I(_) => vec![
            Check::abs("shortest_vs_r", scan.shortest_vs_r.exponent, -1.0 / 3.0, 0.03),
            Check::abs("diameter_vs_r", scan.diameter_vs_r.exponent, 1.0 / 3.0, 0.03),
        ],
        _ => vec![Check::abs("shortest_vs_log_r", scan.shortest_vs_log_r.exponent, -0.5, 0.05)],
    };
    Ok(ScanOutput { table, checks })
}

/// The radii are cylinder depths `t`.
pub fn alh_scan(model: &FiberModel, radii: &[f64]) -> Result<ScanOutput> {
    let rep = alh_decay(model, radii)?;
    let mut table = Table::new(&["t", "deviation"]);
    for &(t, d) in &rep.samples {
        table.push(vec![t.into(), d.into()]);
    }
    let rate = rep.rate();
    table.summarize("mu", json_f64(rep.mu));
    table.summarize("circle_length", json_f64(rep.circle_length));
    table.summarize("rate", rate.map_or(Value::Null, json_f64));
    table.summarize("rate_target", json_f64(rep.rate_target));
    let checks = match rate {
        Some(r) => vec![Check::rel("rate", r, rep.rate_target, 0.05)],
        None => Vec::new(),
    };
    Ok(ScanOutput { table, checks })
}
