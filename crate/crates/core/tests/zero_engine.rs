use std::time::Instant;

use cubegap_core::CheckMode;
use cubegap_core::zeros::{
    check_explicit_formula, check_no_sign_change, check_nt_bound, check_prop91, check_prop92, check_prop94_left_line,
    check_smooth_count, check_zero_moduli, find_zeros, U_ASSOCIATE,
};

#[test]
fn zeros_to_500() {
    let t0 = Instant::now();
    let zs = find_zeros(500.0).unwrap();
    eprintln!("find_zeros(500): {} zeros in {:?}", zs.gammas.len(), t0.elapsed());
    assert!(zs.complete_below_flag, "deviation {}", zs.max_smooth_deviation);
    // N(500) from published zero tables
    assert_eq!(zs.gammas.len(), 269);
    assert!((zs.gammas[0] - 14.134_725_141_734_693).abs() < 1e-6);
    for t in [20.0, 50.0, 100.0, 200.0, 500.0] {
        assert!(check_nt_bound(t, &zs).unwrap().holds());
        assert!(check_smooth_count(t, &zs).holds());
    }
    assert!(check_zero_moduli(&zs).unwrap().holds());
    for t in [0.0, 10.0, 14.1347, 50.0, 100.0] {
        assert!(!check_prop91(t, &zs).unwrap().fails());
        let (a, b) = check_prop92(t, U_ASSOCIATE, &zs).unwrap();
        assert!(!a.fails() && !b.fails());
    }
    let (means, recs) = check_explicit_formula(&zs).unwrap();
    assert!(means.windows(2).all(|w| w[1].1 < w[0].1), "{means:?}");
    assert!(recs.iter().filter(|r| r.mode == CheckMode::MustHold).all(|r| r.holds()));
    let diag = check_prop94_left_line(&[0.0, 5.0, 12.0, 20.0, 50.0, 100.0]).unwrap();
    assert!(diag.iter().all(|r| r.mode == CheckMode::Diagnostic && r.lhs.is_finite()));
}

#[test]
fn no_sign_change_below_14() {
    assert!(check_no_sign_change(14.0, 0.01).unwrap().holds());
}
