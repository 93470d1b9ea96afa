use crate::acceptance::{run_criterion, Suite};
use semiflat_core::fiber::Ratio;
use semiflat_core::sl2z::Order;

#[test]
fn registry_passes_criterion_one() {
    let r = run_criterion(1, &Suite::default()).unwrap();
    assert!(r.pass(), "{}", r.line());
}

#[test]
fn corrupted_cone_angle_fails_criterion_one() {
    let mut suite = Suite::default();
    let row = suite.rows.iter_mut().find(|r| r.type_label == "III*").unwrap();
    row.theta_complete = Ratio(2, 3);
    let r = run_criterion(1, &suite).unwrap();
    assert!(!r.pass());
    assert!(r.outcome.detail.contains("III*"), "{}", r.line());
}

#[test]
fn corrupted_order_fails_criterion_one() {
    let mut suite = Suite::default();
    suite.rows.iter_mut().find(|r| r.type_label == "IV").unwrap().order = Order::Finite(6);
    assert!(!run_criterion(1, &suite).unwrap().pass());
}

#[test]
fn corrupted_golden_fails_criterion_one() {
    let mut suite = Suite::default();
    suite.golden = suite.golden.replace("II*,+(1 -1; 1 0)", "II*,+(1 1; -1 0)");
    let r = run_criterion(1, &suite).unwrap();
    assert!(!r.pass());
    assert_eq!(r.outcome.measured, 1.0);
}

#[test]
fn seed_changes_samples_not_verdicts() {
    for seed in [1, 2] {
        let r = run_criterion(5, &Suite::with_seed(seed)).unwrap();
        assert!(r.pass(), "{}", r.line());
    }
}
