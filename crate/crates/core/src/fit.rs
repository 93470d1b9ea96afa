//! Least-squares exponent fits.

use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("need at least two samples")]
    TooFewSamples,
    #[error("sample scales must be strictly monotone")]
    NotMonotone,
    #[error("log fit needs positive finite values")]
    NonPositive,
}

/// `log value ≈ exponent·log scale + intercept` (power law) or
/// `log value ≈ exponent·scale + intercept` (exponential).
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Fits with `r² < 0.999` are not trusted.
pub const MIN_R_SQUARED: f64 = 0.999;

impl GrowthFit {
    pub fn is_reliable(&self) -> bool {
        self.r_squared >= MIN_R_SQUARED
    }
}

/// Ordinary least squares; returns `(slope, intercept, r²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, my - slope * mx, r2)
}

fn check(samples: &[(f64, f64)]) -> Result<(), FitError> {
    if samples.len() < 2 {
        return Err(FitError::TooFewSamples);
    }
    let up = samples[1].0 > samples[0].0;
    if !samples.windows(2).all(|w| if up { w[1].0 > w[0].0 } else { w[1].0 < w[0].0 }) {
        return Err(FitError::NotMonotone);
    }
    if samples.iter().any(|s| !(s.1 > 0.0 && s.1.is_finite())) {
        return Err(FitError::NonPositive);
    }
    Ok(())
}

pub fn power_law_fit(samples: &[(f64, f64)]) -> Result<GrowthFit, FitError> {
    check(samples)?;
    if samples.iter().any(|s| !(s.0 > 0.0)) {
        return Err(FitError::NonPositive);
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let (exponent, intercept, r_squared) = linear_fit(&xs, &ys);
    Ok(GrowthFit { exponent, intercept, r_squared, samples: samples.to_vec() })
}

pub fn exponential_fit(samples: &[(f64, f64)]) -> Result<GrowthFit, FitError> {
    check(samples)?;
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let (exponent, intercept, r_squared) = linear_fit(&xs, &ys);
    Ok(GrowthFit { exponent, intercept, r_squared, samples: samples.to_vec() })
}

/// `n ≥ 2` logarithmically spaced points from `a` to `b` inclusive.
pub fn log_spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

pub fn lin_spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let s: Vec<(f64, f64)> = log_spaced(1.0, 1e4, 16).into_iter().map(|x| (x, 3.0 * x.powf(-0.4))).collect();
        let f = power_law_fit(&s).unwrap();
        assert!((f.exponent + 0.4).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.is_reliable());
    }

    #[test]
    fn exponential() {
        let s: Vec<(f64, f64)> = lin_spaced(0.0, 5.0, 8).into_iter().map(|t| (t, (-1.5 * t).exp())).collect();
        assert!((exponential_fit(&s).unwrap().exponent + 1.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_samples() {
        assert_eq!(power_law_fit(&[(1.0, 1.0)]), Err(FitError::TooFewSamples));
        assert_eq!(power_law_fit(&[(1.0, 1.0), (1.0, 2.0)]), Err(FitError::NotMonotone));
        assert_eq!(power_law_fit(&[(1.0, 1.0), (2.0, 0.0)]), Err(FitError::NonPositive));
    }

    #[test]
    fn noisy_fit_flagged() {
        let s = [(1.0, 1.0), (2.0, 5.0), (3.0, 0.5), (4.0, 3.0)];
        assert!(!power_law_fit(&s).unwrap().is_reliable());
    }
}
