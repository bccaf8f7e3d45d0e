//! Ternary local polynomials against the published table for D(T) ≤ 13.

use std::collections::{BTreeMap, BTreeSet};

use theta_kernel::exactnt::prime_divisors;
use theta_kernel::quadform::{enumerate_reduced, eta, PlaceTag};
use theta_kernel::siegelseries::{
    check_functional_equation, compare_with_table, global_polynomial, key_lemma_prime,
    reference_table, siegel_series_polynomial, vanishing_primes,
};

#[test]
fn products_match_table() {
    let mut seen: BTreeMap<i64, BTreeSet<Vec<i64>>> = BTreeMap::new();
    for t in enumerate_reduced(3, 13).unwrap() {
        let d = t.d_of().unwrap() as i64;
        seen.entry(d).or_default().insert(global_polynomial(&t).unwrap());
    }
    let mut table: BTreeMap<i64, BTreeSet<Vec<i64>>> = BTreeMap::new();
    for e in reference_table() {
        table.entry(e.d).or_default().insert(e.product);
    }
    assert_eq!(seen, table);
    let cmp = compare_with_table().unwrap();
    assert!(cmp.pass);
    assert_eq!(cmp.records.len(), 18);
}

#[test]
fn labelled_entries() {
    let t = reference_table();
    let by_label = |l: &str| t.iter().find(|e| e.label == l).unwrap().product.clone();
    assert_eq!(by_label("8_2"), vec![1, 0, 0, -64]);
    assert_eq!(by_label("6_1"), vec![1, -5, -36]);
    assert_eq!(by_label("12_3"), vec![1, -9, 16, -144]);
}

#[test]
fn functional_equation_and_sign_linkage() {
    for t in enumerate_reduced(3, 13).unwrap() {
        let d = t.d_of().unwrap();
        let mut minus = Vec::new();
        for q in prime_divisors(d as u128) {
            let f = siegel_series_polynomial(&t, q).unwrap();
            assert!(check_functional_equation(&f, &t, q).unwrap(), "{t} q={q}");
            if eta(&t, PlaceTag::Finite(q)).unwrap() == -1 {
                minus.push(q);
            }
        }
        assert_eq!(vanishing_primes(&t).unwrap(), minus, "{t}");
        assert!(minus.contains(&key_lemma_prime(&t).unwrap()));
    }
}

#[test]
fn key_lemma_examples() {
    let six_one: Vec<_> = enumerate_reduced(3, 6)
        .unwrap()
        .into_iter()
        .filter(|t| t.d_of().unwrap() == 6 && global_polynomial(t).unwrap() == vec![1, -5, -36])
        .collect();
    assert!(!six_one.is_empty());
    for t in six_one {
        assert_eq!(key_lemma_prime(&t).unwrap(), 3);
    }
    let ten_two: Vec<_> = enumerate_reduced(3, 10)
        .unwrap()
        .into_iter()
        .filter(|t| t.d_of().unwrap() == 10 && global_polynomial(t).unwrap() == vec![1, -21, -100])
        .collect();
    assert!(!ten_two.is_empty());
    for t in ten_two {
        assert_eq!(key_lemma_prime(&t).unwrap(), 5);
    }
}
