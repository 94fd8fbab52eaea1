use std::time::Instant;

use cubegap_core::primes::{check_cube_scan, cube_gap_scan, pi_count, short_interval_check, ScanMode};

#[test]
fn exhaustive_cube_scan_to_1000() {
    let t = Instant::now();
    let rows = cube_gap_scan(2, 1000, ScanMode::Exhaustive).unwrap();
    assert_eq!(rows.len(), 999);
    assert!(check_cube_scan(&rows, "exhaustive").holds());
    let min = rows.iter().map(|r| r.census.prime_count).min().unwrap();
    assert_eq!(min, 5);
    eprintln!("exhaustive scan {:?}", t.elapsed());
}

#[test]
fn sampled_cube_scan() {
    let rows = cube_gap_scan(2, 10_000, ScanMode::Sampled).unwrap();
    assert_eq!(rows.iter().map(|r| r.root).collect::<Vec<_>>(), vec![2000, 5000, 10_000]);
    assert!(rows.iter().all(|r| r.census.prime_count > 0));
}

#[test]
fn short_intervals_at_sampled_scales() {
    for x in [1_000_000u64, 100_000_000, 10_000_000_000] {
        let s = short_interval_check(x, None).unwrap();
        assert!(s.census.prime_count >= 1, "x = {x}");
        assert!(s.census.psi_increment >= s.census.theta_increment);
        assert!(s.epsilon_empirical.abs() < 0.1, "x = {x}: {}", s.epsilon_empirical);
    }
}

#[test]
fn pi_is_monotone_on_samples() {
    let xs = [0u64, 1, 2, 3, 100, 1000, 7919, 7920, 104_729, 1_000_000];
    let pis: Vec<u64> = xs.iter().map(|&x| pi_count(x).unwrap()).collect();
    assert!(pis.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(pis[7], 1000);
    assert_eq!(pis[8], 10_000);
}
