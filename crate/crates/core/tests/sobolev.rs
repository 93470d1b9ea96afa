use std::f64::consts::PI;

use proptest::prelude::*;
use semiflat_core::sobolev::*;

/// Composite Simpson on `[0, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, b: f64, n: usize) -> f64 {
    let h = b / n as f64;
    let mut s = f(0.0) + f(b);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn tent_ratios_in_closed_form() {
    // β = 4, α = 2: (2π² B(4,5))^{1/2} / (2π²/4), B(4,5) = 1/280.
    let r = sobolev_sides(4, 2.0, RadialProfile::Tent, 1.0).unwrap();
    let exact = (2.0 * PI * PI / 280.0).sqrt() / (PI * PI / 2.0);
    assert!((r.ratio.unwrap() / exact - 1.0).abs() < 1e-10);
    // β = 3, α = 3: (4π B(3,7))^{1/3} / (4π/3), B(3,7) = 1/252.
    let r = sobolev_sides(3, 3.0, RadialProfile::Tent, 1.0).unwrap();
    let exact = (4.0 * PI / 252.0).cbrt() / (4.0 * PI / 3.0);
    assert!((r.ratio.unwrap() / exact - 1.0).abs() < 1e-10);
}

#[test]
fn weighted_sides_against_simpson() {
    for (beta, alpha) in [(3u32, 1.0), (3, 2.0), (4, 1.5)] {
        let area = if beta == 3 { 4.0 * PI } else { 2.0 * PI * PI };
        let w = alpha * (beta as f64 - 2.0) - beta as f64;
        for p in [RadialProfile::Cosine, RadialProfile::Quartic, RadialProfile::Bump] {
            for lambda in [0.25, 1.0, 4.0] {
                let s = sobolev_sides(beta, alpha, p, lambda).unwrap();
                let b = 1.0 / lambda;
                let lhs = (area
                    * simpson(
                        |r| p.value(lambda * r).powf(2.0 * alpha) * (1.0 + r).powf(w) * r.powi(beta as i32 - 1),
                        b,
                        20000,
                    ))
                .powf(1.0 / alpha);
                let rhs = area * simpson(|r| (lambda * p.derivative(lambda * r)).powi(2) * r.powi(beta as i32 - 1), b, 20000);
                assert!((s.lhs / lhs - 1.0).abs() < 1e-8, "{p:?} {lambda} {} {lhs}", s.lhs);
                assert!((s.rhs / rhs - 1.0).abs() < 1e-8, "{p:?} {lambda} {} {rhs}", s.rhs);
            }
        }
    }
}

#[test]
fn plateau_split_at_the_kink() {
    // ∫|u'|² over R^3 = 4π ∫_{1/2}^1 4 r² dr = 16π·7/24.
    let s = sobolev_sides(3, 1.0, RadialProfile::Plateau, 1.0).unwrap();
    assert!((s.rhs / (16.0 * PI * 7.0 / 24.0) - 1.0).abs() < 1e-12);
}

#[test]
fn zero_profile_is_excluded() {
    let s = sobolev_sides(4, 2.0, RadialProfile::Zero, 1.0).unwrap();
    assert_eq!(s.ratio, None);
    let rep = sobolev_probe(4, 2.0, &[RadialProfile::Zero, RadialProfile::Tent], &default_dilations()).unwrap();
    assert_eq!(rep.excluded, vec![RadialProfile::Zero]);
    assert!(rep.sup_ratio.is_finite() && rep.sup_ratio > 0.0);
}

#[test]
fn critical_cases_are_dilation_invariant() {
    for (beta, alpha) in [(4u32, 2.0), (3, 3.0)] {
        assert_eq!(weight_exponent(beta as f64, alpha), 0.0);
        let rep = sobolev_probe(beta, alpha, &RadialProfile::FAMILY, &default_dilations()).unwrap();
        assert!(rep.stability_factor < 1.0 + 1e-8, "{}", rep.stability_factor);
        assert_eq!(rep.samples.len(), 45);
    }
}

#[test]
fn alpha_one_respects_hardy() {
    // (1+r)^{-2} ≤ r^{-2}, and Hardy's constant on R^β is 4/(β-2)².
    for beta in [3u32, 4] {
        let hardy = 4.0 / ((beta as f64 - 2.0) * (beta as f64 - 2.0));
        let dil: Vec<f64> = (-8..=8).map(|k| 2f64.powi(k)).collect();
        let rep = sobolev_probe(beta, 1.0, &RadialProfile::FAMILY, &dil).unwrap();
        assert!(rep.sup_ratio < hardy, "{beta} {}", rep.sup_ratio);
        // concentrating profiles see the weight as 1, and the ratio decays
        for p in RadialProfile::FAMILY {
            let r: Vec<f64> = rep.samples.iter().filter(|s| s.profile == p).map(|s| s.ratio.unwrap()).collect();
            assert!(r.windows(2).skip(8).all(|w| w[1] < w[0]), "{p:?} {r:?}");
        }
    }
}

#[test]
fn parameter_errors() {
    assert!(matches!(sobolev_probe(4, 2.5, &RadialProfile::FAMILY, &[1.0]), Err(SobolevError::AlphaOutOfRange { .. })));
    assert!(matches!(sobolev_probe(3, 0.5, &RadialProfile::FAMILY, &[1.0]), Err(SobolevError::AlphaOutOfRange { .. })));
    assert!(matches!(sobolev_probe(5, 1.0, &RadialProfile::FAMILY, &[1.0]), Err(SobolevError::BadDimension(_))));
    assert!(matches!(sobolev_sides(4, 1.0, RadialProfile::Tent, 0.0), Err(SobolevError::BadDilation(_))));
    for p in RadialProfile::FAMILY {
        assert_eq!(RadialProfile::from_name(p.name()), Some(p));
    }
}

proptest! {
    #[test]
    fn critical_ratio_ignores_dilation(lambda in 0.01f64..100.0, k in 0usize..5) {
        let p = RadialProfile::FAMILY[k];
        let a = sobolev_sides(4, 2.0, p, 1.0).unwrap().ratio.unwrap();
        let b = sobolev_sides(4, 2.0, p, lambda).unwrap().ratio.unwrap();
        prop_assert!((a / b - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ratio_is_positive(alpha in 1.0f64..2.0, lambda in 0.05f64..20.0, k in 0usize..5) {
        let s = sobolev_sides(4, alpha, RadialProfile::FAMILY[k], lambda).unwrap();
        prop_assert!(s.ratio.unwrap() > 0.0 && s.lhs > 0.0 && s.rhs > 0.0);
    }
}
