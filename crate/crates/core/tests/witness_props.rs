use std::collections::HashSet;

use theta_kernel::quadform::HalfIntegralForm;
use theta_kernel::witness::*;

fn primes_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
}

/// Euler's criterion for odd prime `m`.
fn legendre(a: i64, m: u64) -> i64 {
    let mut r = 1u128;
    let mut b = a.rem_euclid(m as i64) as u128;
    let mut e = (m - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    if r == 1 { 1 } else if r == 0 { 0 } else { -1 }
}

fn minors(t: &HalfIntegralForm) -> [i128; 3] {
    let g = |i, j| t.g(i, j) as i128;
    let m1 = g(0, 0);
    let m2 = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    let m3 = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
        + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
    [m1, m2, m3]
}

#[test]
fn every_prime_up_to_500() {
    let mut seen = HashSet::new();
    for p in primes_to(500) {
        let w = ternary_witness(p).unwrap();
        let [m1, m2, m3] = minors(&w.form);
        assert!(m1 > 0 && m2 > 0 && m3 > 0, "p = {p}");
        assert_eq!(m3, 2 * p as i128, "p = {p}");
        assert_eq!(w.branch, WitnessBranch::of(p));
        match w.auxiliary {
            Some((q, a)) => {
                assert_eq!(w.branch, WitnessBranch::OneMod8);
                assert!(primes_to(q).last() == Some(&q) && q % 4 == 3 && q < AUX_PRIME_CAP);
                assert_eq!(legendre(p as i64, q), -1);
                assert_eq!(legendre(q as i64, p), -1);
                assert_eq!((a * a + p as i64).rem_euclid(q as i64), 0);
            }
            None => assert_ne!(w.branch, WitnessBranch::OneMod8),
        }
        assert!(w.verify());
        seen.insert(w.branch);
    }
    assert_eq!(seen.len(), 4);
}

#[test]
fn padded_witnesses_keep_d() {
    for p in [3u64, 5, 17, 41] {
        let t = ternary_witness(p).unwrap().form;
        let padded = pad_witness(&t, 19).unwrap();
        assert_eq!(padded.d_of().unwrap(), p as i128);
        assert!(padded.is_positive_definite());
    }
}
