use proptest::prelude::*;
use semiflat_core::curvature::theta_norm_sq;
use semiflat_core::fiber::{Chart, FiberModel, JMultiplicity, PoleFlag, TauFunction};
use semiflat_core::semiflat::{fiber_flat_data, gamma, metric_at, metric_at_winding};
use semiflat_core::sl2z::*;
use semiflat_core::Complex64 as C;

fn types() -> Vec<KodairaType> {
    KodairaType::sample(&[0, 1, 2, 3, 7])
}

/// SL(2,Z) matrices with entries in [-50, 50], built from a coprime first column.
fn sl2z_matrix() -> impl Strategy<Value = IntMatrix2> {
    (-50i64..=50, -50i64..=50, -3i64..=3).prop_filter_map("not unimodular", |(a, c, k)| {
        let (g, x, y) = ext_gcd(a, c);
        if g != 1 {
            return None;
        }
        // a·x + c·y = 1, so (a, -y; c, x) has determinant 1; shift the second column by k·(a, c).
        let (b, d) = (-y + k * a, x + k * c);
        if b.abs() > 50 || d.abs() > 50 {
            return None;
        }
        IntMatrix2::new(a, b, c, d).ok()
    })
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

fn integer_rank(m: [i64; 4]) -> u8 {
    if m.iter().all(|&x| x == 0) {
        0
    } else if m[0] * m[3] - m[1] * m[2] == 0 {
        1
    } else {
        2
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conjugates_of_representatives_classify_back(p in sl2z_matrix(), k in 0usize..16) {
        let ts = types();
        let t = ts[k % ts.len()];
        let a = representative(t).unwrap().conjugate_by(&p).unwrap();
        let cl = classify(&a).unwrap();
        prop_assert_eq!(cl.kodaira_type, t);
        if let Some(q) = cl.conjugator {
            prop_assert_eq!(representative(t).unwrap().conjugate_by(&q).unwrap(), a);
        }
        prop_assert_eq!(order(&a), order(&representative(t).unwrap()));
    }

    #[test]
    fn classify_is_conjugation_invariant(p in sl2z_matrix(), q in sl2z_matrix(), k in 0usize..16) {
        let ts = types();
        let a = representative(ts[k % ts.len()]).unwrap().conjugate_by(&p).unwrap();
        if let Ok(b) = a.conjugate_by(&q) {
            prop_assert_eq!(classify(&a).unwrap().kodaira_type, classify(&b).unwrap().kodaira_type);
        }
    }

    #[test]
    fn parabolic_b_ignores_the_sign_of_v(p in sl2z_matrix(), b in 1u32..8, star in any::<bool>()) {
        let t = if star { KodairaType::IStar(b) } else { KodairaType::I(b) };
        let a = representative(t).unwrap().conjugate_by(&p).unwrap();
        let fixed = if star { a.negate().unwrap() } else { a };
        let (rank, v) = invariant_vector_rank(&fixed);
        prop_assert_eq!(rank, 1);
        let v = v.unwrap();
        let (b1, _) = parabolic_normal_form(&fixed, v).unwrap();
        let (b2, _) = parabolic_normal_form(&fixed, [-v[0], -v[1]]).unwrap();
        prop_assert_eq!(b1, b2);
        prop_assert_eq!(b1.unsigned_abs(), b as u64);
    }

    #[test]
    fn invariant_rank_is_two_minus_rank(p in sl2z_matrix(), k in 0usize..16) {
        let ts = types();
        let a = representative(ts[k % ts.len()]).unwrap().conjugate_by(&p).unwrap();
        let [x, y, z, w] = a.entries();
        let (rank, _) = invariant_vector_rank(&a);
        prop_assert_eq!(rank, 2 - integer_rank([x - 1, y, z, w - 1]));
    }

    #[test]
    fn random_unimodular_matrices_round_trip(a in sl2z_matrix()) {
        let [x, y, z, w] = a.entries();
        let (rank, _) = invariant_vector_rank(&a);
        prop_assert_eq!(rank, 2 - integer_rank([x - 1, y, z, w - 1]));
        prop_assert_eq!(order(&a), order_by_powers(&a, 12));
        if let Ok(cl) = classify(&a) {
            let back = representative(cl.kodaira_type).unwrap();
            if let Some(q) = cl.conjugator {
                prop_assert_eq!(back.conjugate_by(&q).unwrap(), a);
            }
        } else {
            prop_assert!(a.trace().abs() > 2);
        }
    }
}

fn models() -> Vec<FiberModel> {
    let mut v = Vec::new();
    for kind in KodairaType::sample(&[1, 2, 3]) {
        for pole in [PoleFlag::Zero, PoleFlag::MinusD] {
            v.push(FiberModel::builder(kind).pole(pole).epsilon(0.7).k0(C::new(1.3, -0.4)).build().unwrap());
        }
    }
    for (kind, m) in [
        (KodairaType::II, 1),
        (KodairaType::II, 4),
        (KodairaType::IV, 2),
        (KodairaType::III, 3),
        (KodairaType::IIStar, 5),
        (KodairaType::IIIStar, 1),
        (KodairaType::IVStar, 1),
    ] {
        v.push(FiberModel::builder(kind).j_multiplicity(JMultiplicity::Finite(m)).build().unwrap());
    }
    let taus = [
        TauFunction::constant(C::new(0.2, 1.1)),
        TauFunction::Affine { tau0: C::new(0.0, 1.0), slope: C::new(0.25, 0.1) },
        TauFunction::Exponential { scale: C::new(0.0, 1.5), rate: C::new(0.3, 0.2) },
    ];
    for tau in taus {
        for kind in [KodairaType::I(0), KodairaType::IStar(0)] {
            v.push(FiberModel::builder(kind).tau(tau).k_poly(vec![C::new(1.0, 0.0), C::new(0.3, 0.2)]).build().unwrap());
        }
    }
    v
}

/// A point of the model's chart domain from `(log10 radius, angle fraction)`.
fn chart_point(m: &FiberModel, lr: f64, t: f64) -> C {
    let r = 10f64.powf(lr);
    let half = match m.chart() {
        Chart::U => 0.5 * std::f64::consts::PI,
        Chart::Z => std::f64::consts::PI,
    };
    C::from_polar(r, (2.0 * t - 1.0) * 0.98 * half)
}

fn fiber_point(m: &FiberModel, s: C, a: f64, b: f64) -> C {
    let j = m.jet(s, 0).unwrap();
    j.tau[0] * a + j.tau[1] * b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pairing_is_positive(k in 0usize..64, lr in -8.0f64..-0.1, t in 0.0f64..1.0) {
        let ms = models();
        let m = &ms[k % ms.len()];
        let s = chart_point(m, lr, t);
        prop_assert!(m.jet(s, 0).unwrap().pairing > 0.0);
    }

    #[test]
    fn pairing_is_monodromy_invariant(k in 0usize..64, lr in -6.0f64..-0.5, t in 0.0f64..1.0) {
        let ms = models();
        let m = &ms[k % ms.len()];
        let s = chart_point(m, lr, t);
        let (p0, p1) = (m.jet(s, 0).unwrap().pairing, m.jet(s, 1).unwrap().pairing);
        prop_assert!((p0 - p1).abs() <= 1e-12 * p0, "{} {}", p0, p1);
    }

    #[test]
    fn period_derivatives_match_central_differences(k in 0usize..64, lr in -2.0f64..-1.0, t in 0.0f64..1.0) {
        let ms = models();
        let m = &ms[k % ms.len()];
        let s = chart_point(m, lr, t);
        let h = 1e-4 * s.norm();
        let j = m.jet(s, 0).unwrap();
        for dir in [C::new(1.0, 0.0), C::new(0.0, 1.0)] {
            let (p, q) = (m.jet(s + dir * h, 0).unwrap(), m.jet(s - dir * h, 0).unwrap());
            for i in 0..2 {
                let fd = (p.tau[i] - q.tau[i]) / (2.0 * h);
                let scale = j.d1[i].norm() + j.tau[i].norm() / s.norm();
                prop_assert!((fd - j.d1[i] * dir).norm() <= 1e-6 * scale);
            }
        }
    }

    #[test]
    fn volume_identity_and_fiber_area(k in 0usize..64, lr in -8.0f64..-0.1, t in 0.0f64..1.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let ms = models();
        let m = &ms[k % ms.len()];
        let s = chart_point(m, lr, t);
        let p = metric_at(m, s, fiber_point(m, s, a, b)).unwrap();
        let target = 0.5 * p.g.norm_sqr();
        prop_assert!((p.a_coeff * p.b_coeff - target).abs() <= 1e-14 * target);
        prop_assert!((fiber_flat_data(m, s).unwrap().area - m.epsilon()).abs() <= 1e-14 * m.epsilon());
    }

    #[test]
    fn metric_is_positive(k in 0usize..64, lr in -8.0f64..-0.1, t in 0.0f64..1.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let ms = models();
        let m = &ms[k % ms.len()];
        let s = chart_point(m, lr, t);
        let h = metric_at(m, s, fiber_point(m, s, a, b)).unwrap().matrix;
        prop_assert!(h.is_positive());
        // det = A·B is the cancellation-free form of the determinant
        let p = metric_at(m, s, fiber_point(m, s, a, b)).unwrap();
        prop_assert!((h.det() - p.a_coeff * p.b_coeff).abs() <= 1e-8 * h.h_zz * h.h_ww);
    }

    #[test]
    fn gamma_is_real_linear(k in 0usize..64, lr in -6.0f64..-0.1, t in 0.0f64..1.0,
                            w1 in (-1.0f64..1.0, -1.0f64..1.0), w2 in (-1.0f64..1.0, -1.0f64..1.0), lam in -5.0f64..5.0) {
        let ms = models();
        let m = &ms[k % ms.len()];
        let s = chart_point(m, lr, t);
        let (w1, w2) = (C::new(w1.0, w1.1), C::new(w2.0, w2.1));
        let (g1, g2) = (gamma(m, s, w1).unwrap(), gamma(m, s, w2).unwrap());
        let g12 = gamma(m, s, w1 + w2).unwrap();
        let scale = g1.norm() + g2.norm() + 1e-300;
        prop_assert!((g12 - g1 - g2).norm() <= 1e-12 * scale);
        prop_assert!((gamma(m, s, w1 * lam).unwrap() - g1 * lam).norm() <= 1e-12 * g1.norm() * lam.abs().max(1.0));
    }

    #[test]
    fn metric_is_single_valued(k in 0usize..64, lr in -5.0f64..-0.5, t in 0.0f64..1.0, wr in -1.0f64..1.0, wi in -1.0f64..1.0) {
        let ms = models();
        let m = &ms[k % ms.len()];
        let s = chart_point(m, lr, t);
        let w = C::new(wr, wi) * s.norm().sqrt();
        let a = metric_at_winding(m, s, w, 0).unwrap().matrix;
        let b = metric_at_winding(m, s, w, 1).unwrap().matrix;
        let scale = a.max_abs();
        prop_assert!((a.h_zz - b.h_zz).abs() <= 1e-10 * scale);
        prop_assert!((a.h_ww - b.h_ww).abs() <= 1e-10 * scale);
        prop_assert!((a.h_zw - b.h_zw).norm() <= 1e-10 * scale);
    }

    #[test]
    fn curvature_norm_is_non_negative(k in 0usize..64, lr in -5.0f64..-0.3, t in 0.0f64..1.0) {
        let ms = models();
        let m = &ms[k % ms.len()];
        let s = chart_point(m, lr, t);
        prop_assert!(theta_norm_sq(m, s).unwrap() >= 0.0);
    }
}
