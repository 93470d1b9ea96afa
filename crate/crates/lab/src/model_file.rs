//! Key-value model description files.
//!
//! One `key = value` pair per line; `#` starts a comment; blank lines are
//! ignored. Keys:
//!
//! | key | value | default |
//! |-----|-------|---------|
//! | `type` | Kodaira label (`II`, `IV*`, `I_3`, `I_2*`) or `I` / `I*` together with `b` | required |
//! | `b` | non-negative integer; must agree with `type` when both give it | |
//! | `m` | positive integer or `inf` | `inf` |
//! | `epsilon` | positive real | `1` |
//! | `k0_re`, `k0_im` | real | `1`, `0` |
//! | `pole_flag` | `zero` or `minus-D` | `minus-D` |
//! | `alpha` | positive real | `1` |
//! | `tau0_re`, `tau0_im`, `tau_slope_re`, `tau_slope_im` | real; `I_0`/`I_0*` only, `τ(z) = τ0 + slope·z` | `0` |
//!
//! Unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use semiflat_core::fiber::{FiberModel, JMultiplicity, PoleFlag, TauFunction};
use semiflat_core::sl2z::KodairaType;
use semiflat_core::Complex64 as C;

use crate::error::{LabError, Result};

const KEYS: [&str; 12] = [
    "type",
    "b",
    "m",
    "epsilon",
    "k0_re",
    "k0_im",
    "pole_flag",
    "alpha",
    "tau0_re",
    "tau0_im",
    "tau_slope_re",
    "tau_slope_im",
];

fn real(map: &BTreeMap<&str, (usize, &str)>, key: &str, default: f64) -> Result<f64> {
    match map.get(key) {
        None => Ok(default),
        Some((line, v)) => {
            let x: f64 = v.parse().map_err(|_| LabError::input(format!("line {line}: {key} = {v:?} is not a number")))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(LabError::input(format!("line {line}: {key} must be finite")))
            }
        }
    }
}

fn kodaira(map: &BTreeMap<&str, (usize, &str)>) -> Result<KodairaType> {
    let (line, label) = *map.get("type").ok_or_else(|| LabError::input("missing key `type`"))?;
    let b = match map.get("b") {
        None => None,
        Some((l, v)) => Some(v.parse::<u32>().map_err(|_| LabError::input(format!("line {l}: b = {v:?} is not a non-negative integer")))?),
    };
    let kind = match (label, b) {
        ("I", Some(b)) => KodairaType::I(b),
        ("I*", Some(b)) => KodairaType::IStar(b),
        ("I" | "I*", None) => return Err(LabError::input(format!("line {line}: type {label} needs `b`"))),
        _ => label.parse().map_err(|_| LabError::input(format!("line {line}: unknown Kodaira type {label:?}")))?,
    };
    if let Some(b) = b {
        match kind {
            KodairaType::I(x) | KodairaType::IStar(x) if x == b => {}
            _ => return Err(LabError::input(format!("b = {b} disagrees with type {label}"))),
        }
    }
    Ok(kind)
}

/// Parses a model description.
pub fn parse_model(text: &str) -> Result<FiberModel> {
    let mut map: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| LabError::input(format!("line {}: expected `key = value`", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(LabError::input(format!("line {}: unknown key {k:?}", i + 1)));
        }
        if map.insert(k, (i + 1, v)).is_some() {
            return Err(LabError::input(format!("line {}: repeated key {k:?}", i + 1)));
        }
    }
    let kind = kodaira(&map)?;
    let mut builder = FiberModel::builder(kind)
        .epsilon(real(&map, "epsilon", 1.0)?)
        .k0(C::new(real(&map, "k0_re", 1.0)?, real(&map, "k0_im", 0.0)?))
        .alpha(real(&map, "alpha", 1.0)?);
    if let Some((line, v)) = map.get("m") {
        let m = if *v == "inf" {
            JMultiplicity::Isotrivial
        } else {
            match v.parse::<u32>() {
                Ok(m) if m > 0 => JMultiplicity::Finite(m),
                _ => return Err(LabError::input(format!("line {line}: m = {v:?} is not a positive integer or inf"))),
            }
        };
        builder = builder.j_multiplicity(m);
    }
    if let Some((line, v)) = map.get("pole_flag") {
        let pole = match *v {
            "zero" => PoleFlag::Zero,
            "minus-D" => PoleFlag::MinusD,
            _ => return Err(LabError::input(format!("line {line}: pole_flag must be zero or minus-D, got {v:?}"))),
        };
        builder = builder.pole(pole);
    }
    if ["tau0_re", "tau0_im", "tau_slope_re", "tau_slope_im"].iter().any(|k| map.contains_key(k)) {
        builder = builder.tau(TauFunction::Affine {
            tau0: C::new(real(&map, "tau0_re", 0.0)?, real(&map, "tau0_im", 0.0)?),
            slope: C::new(real(&map, "tau_slope_re", 0.0)?, real(&map, "tau_slope_im", 0.0)?),
        });
    }
    Ok(builder.build()?)
}

pub fn read_model(path: &Path) -> Result<FiberModel> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    parse_model(&text)
}

/// Writes `model` back in the file format. Only the constant term of `k` and
/// affine period maps are representable.
pub fn model_to_text(model: &FiberModel) -> Result<String> {
    let mut s = String::new();
    let r = |x: f64| format!("{x:?}");
    let _ = writeln!(s, "type = {}", model.kodaira_type());
    if let JMultiplicity::Finite(m) = model.j_multiplicity() {
        let _ = writeln!(s, "m = {m}");
    }
    let _ = writeln!(s, "epsilon = {}", r(model.epsilon()));
    let _ = writeln!(s, "k0_re = {}", r(model.k0().re));
    let _ = writeln!(s, "k0_im = {}", r(model.k0().im));
    let pole = match model.pole() {
        PoleFlag::Zero => "zero",
        PoleFlag::MinusD => "minus-D",
    };
    let _ = writeln!(s, "pole_flag = {pole}");
    let _ = writeln!(s, "alpha = {}", r(model.alpha()));
    match model.tau_function() {
        None => {}
        Some(TauFunction::Affine { tau0, slope }) => {
            let _ = writeln!(s, "tau0_re = {}", r(tau0.re));
            let _ = writeln!(s, "tau0_im = {}", r(tau0.im));
            let _ = writeln!(s, "tau_slope_re = {}", r(slope.re));
            let _ = writeln!(s, "tau_slope_im = {}", r(slope.im));
        }
        Some(TauFunction::Exponential { .. }) => {
            return Err(LabError::input("exponential period maps have no file representation"));
        }
    }
    if model.k_coefficients().len() > 1 {
        return Err(LabError::input("non-constant k has no file representation"));
    }
    Ok(s)
}
