use semiflat_core::asymptotics::*;
use semiflat_core::fiber::{cone_angles, FiberModel, JMultiplicity, PoleFlag, TauFunction};
use semiflat_core::fit::log_spaced;
use semiflat_core::sl2z::KodairaType;
use semiflat_core::{Complex64 as C, TAU};

fn model(kind: KodairaType, pole: PoleFlag) -> FiberModel {
    let b = FiberModel::builder(kind).pole(pole);
    match kind {
        KodairaType::I(0) | KodairaType::IStar(0) => b.tau(TauFunction::constant(C::new(0.1, 1.2))),
        _ => b,
    }
    .build()
    .unwrap()
}

#[test]
fn ib_distance_against_closed_form() {
    for (b, eps, k0) in [(1u32, 1.0, 1.0), (2, 0.5, 2.0), (3, 1.0, 0.5)] {
        let m = FiberModel::builder(KodairaType::I(b)).epsilon(eps).k0(C::new(k0, 0.0)).build().unwrap();
        let base = BaseMetric::new(&m).unwrap();
        let pref = k0 * (b as f64 / (TAU * eps)).sqrt() * 2.0 / 3.0;
        for r in [1e-3, 1e-10, 1e-100, 1e-300] {
            let l = |t: f64| (-t.ln()).powf(1.5);
            let exact = pref * (l(r) - l(0.5));
            let d = radial_distance(&base, 0.5, r).unwrap();
            assert!((d / exact - 1.0).abs() < 1e-6, "{b} {r} {d} {exact}");
        }
    }
}

#[test]
fn ib_star_distance_leading_term() {
    // √λ = |k0| √(b/πε) u^{-1} |log u|^{1/2} in the u chart, so the distance
    // to |u| = r grows like |k0| √(b/πε) r^{-1} |log r|^{1/2}.
    let m = FiberModel::builder(KodairaType::IStar(1)).build().unwrap();
    let base = BaseMetric::new(&m).unwrap();
    let mut last = f64::INFINITY;
    for r in [1e-4, 1e-8, 1e-16, 1e-64] {
        let d = radial_distance(&base, 0.5, r).unwrap();
        let lead = (1.0 / std::f64::consts::PI).sqrt() * (-r.ln()).sqrt() / r;
        let dev = (d / lead - 1.0).abs();
        assert!(dev < last, "{r} {dev}");
        last = dev;
    }
    assert!(last < 0.01);
}

#[test]
fn ib_area_against_closed_forms() {
    // I_b: ∫ 2π t λ dt = |k0|² b/ε ∫ (1/t) log(1/t) dt; I_b*: half disk, λ ∝ u^{-4} log(1/u).
    let m = FiberModel::builder(KodairaType::I(2)).build().unwrap();
    let base = BaseMetric::new(&m).unwrap();
    let x0 = -(0.5f64).ln();
    let s = 500.0;
    let x1 = invert_distance(&base, x0, s).unwrap();
    let exact = 2.0 * 0.5 * (x1 * x1 - x0 * x0);
    assert!((ball_volume(&base, s).unwrap() / exact - 1.0).abs() < 1e-8);

    let m = FiberModel::builder(KodairaType::IStar(1)).build().unwrap();
    let base = BaseMetric::new(&m).unwrap();
    let x1 = invert_distance(&base, x0, s).unwrap();
    let anti = |x: f64| {
        let t = (-x).exp();
        -(1.0 / (2.0 * t * t)) * x + 1.0 / (4.0 * t * t)
    };
    // π·(b/π)·∫ t^{-3} log(1/t) dt from t1 up to ½
    let exact = anti(x0) - anti(x1);
    let v = ball_volume(&base, s).unwrap();
    assert!((v / exact - 1.0).abs() < 1e-8, "{v} {exact}");
}

#[test]
fn ball_volume_is_increasing() {
    let base = BaseMetric::new(&model(KodairaType::I(1), PoleFlag::MinusD)).unwrap();
    let vs: Vec<f64> = log_spaced(1.0, 1e5, 12).iter().map(|&s| ball_volume(&base, s).unwrap()).collect();
    assert!(vs.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn volume_growth_exponents() {
    let radii = log_spaced(1e2, 1e6, 16);
    for (kind, target) in [(KodairaType::I(1), 4.0 / 3.0), (KodairaType::IStar(1), 2.0), (KodairaType::II, 2.0)] {
        let base = BaseMetric::new(&model(kind, PoleFlag::MinusD)).unwrap();
        let fit = volume_growth_scan(&base, &radii).unwrap();
        assert!((fit.exponent - target).abs() < 0.05, "{kind} {}", fit.exponent);
        assert!(fit.is_reliable());
        let half = volume_growth_scan(&base, &log_spaced(1e2, 1e4, 16)).unwrap();
        assert!((half.exponent - fit.exponent).abs() < 0.02, "{kind} {} {}", half.exponent, fit.exponent);
    }
}

#[test]
fn ii_complete_volume_is_a_cone() {
    // Far out, a cone of angle θ has area θπs².
    let base = BaseMetric::new(&model(KodairaType::II, PoleFlag::MinusD)).unwrap();
    let (s1, s2) = (1e5, 2e5);
    let dv = ball_volume(&base, s2).unwrap() - ball_volume(&base, s1).unwrap();
    let cone = std::f64::consts::PI / 6.0 * (s2 * s2 - s1 * s1);
    assert!((dv / cone - 1.0).abs() < 1e-3, "{}", dv / cone);
}

#[test]
fn cone_angles_match_the_table() {
    let kinds = [
        KodairaType::II,
        KodairaType::III,
        KodairaType::IV,
        KodairaType::IIStar,
        KodairaType::IIIStar,
        KodairaType::IVStar,
        KodairaType::IStar(0),
        KodairaType::I(0),
    ];
    for kind in kinds {
        for pole in [PoleFlag::Zero, PoleFlag::MinusD] {
            let m = model(kind, pole);
            let (inc, comp) = cone_angles(&m);
            let target = if pole == PoleFlag::Zero { inc } else { comp };
            let th = cone_angle_numeric(&BaseMetric::new(&m).unwrap(), 1e-8).unwrap();
            if target == 0.0 {
                assert_eq!(th, 0.0, "{kind}");
            } else {
                assert!((th / target - 1.0).abs() < 0.02, "{kind} {pole:?} {th} {target}");
            }
        }
    }
}

#[test]
fn cone_angles_converge_monotonically() {
    let ii = FiberModel::builder(KodairaType::II).j_multiplicity(JMultiplicity::Finite(1)).build().unwrap();
    let i1 = model(KodairaType::I(1), PoleFlag::Zero);
    for m in [ii, i1] {
        let (kind, pole) = (m.kodaira_type(), m.pole());
        let base = BaseMetric::new(&m).unwrap();
        let (inc, comp) = cone_angles(&m);
        let target = if pole == PoleFlag::Zero { inc } else { comp };
        let errs: Vec<f64> =
            [1e-6, 1e-7, 1e-8].iter().map(|&r| (cone_angle_numeric(&base, r).unwrap() - target).abs()).collect();
        assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{kind} {errs:?}");
    }
}

#[test]
fn injectivity_proxies() {
    let radii = log_spaced(1e2, 1e6, 16);
    let scan = injectivity_proxy_scan(&model(KodairaType::I(1), PoleFlag::MinusD), &radii).unwrap();
    assert!((scan.shortest_vs_r.exponent + 1.0 / 3.0).abs() < 0.03, "{}", scan.shortest_vs_r.exponent);
    assert!((scan.diameter_vs_r.exponent - 1.0 / 3.0).abs() < 0.03, "{}", scan.diameter_vs_r.exponent);
    let scan = injectivity_proxy_scan(&model(KodairaType::IStar(1), PoleFlag::MinusD), &radii).unwrap();
    assert!((scan.shortest_vs_log_r.exponent + 0.5).abs() < 0.05, "{}", scan.shortest_vs_log_r.exponent);
    assert!(injectivity_proxy_scan(&model(KodairaType::II, PoleFlag::MinusD), &radii).is_err());
}

fn alh_model(tau: TauFunction, k0: f64, eps: f64) -> FiberModel {
    FiberModel::builder(KodairaType::I(0)).tau(tau).k0(C::new(k0, 0.0)).epsilon(eps).build().unwrap()
}

#[test]
fn alh_rate_and_circle() {
    let configs = [
        (TauFunction::Affine { tau0: C::new(0.0, 1.0), slope: C::new(0.25, 0.0) }, 1.0, 1.0),
        (TauFunction::Exponential { scale: C::new(0.0, 1.5), rate: C::new(0.3, 0.2) }, 2.0, 0.5),
    ];
    for (tau, k0, eps) in configs {
        let m = alh_model(tau, k0, eps);
        let tau0 = tau.value(C::new(0.0, 0.0));
        let mu = k0 * (2.0 * tau0.im).sqrt();
        let ts = log_spaced(5.0 * mu, 40.0 * mu, 16);
        let rep = alh_decay(&m, &ts).unwrap();
        assert!((rep.mu / mu - 1.0).abs() < 1e-14);
        assert!((rep.circle_length / (TAU * mu / eps.sqrt()) - 1.0).abs() < 1e-12);
        let rate = rep.rate().unwrap();
        assert!((rate / rep.rate_target - 1.0).abs() < 0.05, "{rate} {}", rep.rate_target);
        assert!(rep.samples.windows(2).all(|w| w[1].1 < w[0].1));
        // The Kähler-normalized circumference tends to the circle length.
        let base = BaseMetric::new(&alh_model(TauFunction::constant(tau0), k0, eps)).unwrap();
        let c = cylinder_circumference(&base, 10.0);
        assert!((c / rep.circle_length - 1.0).abs() < 1e-12);
    }
}
