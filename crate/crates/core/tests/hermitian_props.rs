use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use theta_kernel::exactnt::{is_fundamental_discriminant, is_prime, kronecker};
use theta_kernel::hermitian::*;
use theta_kernel::quadform::PlaceTag;

fn fields() -> Vec<u64> {
    (3..=200u64).filter(|&d| is_fundamental_discriminant(-(d as i64))).collect()
}

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `w / √(-D_K)` for `w = (u + v√(-D_K))/2 ∈ O_K`.
fn off_diagonal(u: i64, v: i64, k: ImagQuadField) -> FieldElement {
    let d = k.d_k() as i64;
    let u = if (u - v * d).rem_euclid(2) == 0 { u } else { u + 1 };
    FieldElement::new(r(v, 2), r(-u, 2 * d), k)
}

fn random_lambda(m: usize, diag: &[i64], off: &[(i64, i64)], k: ImagQuadField) -> HermitianForm {
    let mut rows = vec![vec![FieldElement::zero(k); m]; m];
    let mut it = off.iter();
    for j in 0..m {
        rows[j][j] = FieldElement::from_ints(diag[j], 0, k);
        for l in j + 1..m {
            let &(u, v) = it.next().unwrap();
            let h = off_diagonal(u, v, k);
            rows[l][j] = h.conj();
            rows[j][l] = h;
        }
    }
    HermitianForm::new(k, rows).unwrap()
}

#[test]
fn beta_nonpositive_on_hypothesis_grid() {
    for d_k in [4u64, 3, 7] {
        let field = ImagQuadField::new(d_k).unwrap();
        for p in [5u64, 7, 11] {
            if d_k % p == 0 {
                continue;
            }
            for t in 1..=2i64 {
                let k = 2 + (p as i64 - 1) * t;
                assert!(beta_p(2, k, p, field).unwrap() <= 0, "D_K = {d_k}, p = {p}, t = {t}");
            }
        }
    }
    assert_eq!(beta_p(2, 6, 5, ImagQuadField::new(4).unwrap()).unwrap(), -1);
}

#[test]
fn ikeda_route_is_declared_unsupported() {
    let k = ImagQuadField::new(4).unwrap();
    assert!(ikeda_polynomial(&HermitianForm::identity(2, k), 2).is_err());
}

proptest! {
    #[test]
    fn chi_k_product_formula(x in -1000i64..=1000, idx in 0usize..1000) {
        prop_assume!(x != 0);
        let fs = fields();
        let field = ImagQuadField::new(fs[idx % fs.len()]).unwrap();
        let prod: i32 = local_symbol_table(field, x).unwrap().iter().map(|&(_, s)| s).product();
        prop_assert_eq!(prod, 1);
    }

    #[test]
    fn unramified_consistency(start in 3u64..2000, idx in 0usize..1000) {
        let q = (start..).find(|&q| is_prime(q)).unwrap();
        let fs = fields();
        let d_k = fs[idx % fs.len()];
        prop_assume!(d_k % q != 0);
        let field = ImagQuadField::new(d_k).unwrap();
        prop_assert_eq!(
            chi_k_local(field, q as i64, PlaceTag::Finite(q)).unwrap(),
            kronecker(-(d_k as i64), q as i64)
        );
    }

    #[test]
    fn key_lemma_witness_exists(gamma in -5000i64..=-1, idx in 0usize..1000) {
        let fs = fields();
        let field = ImagQuadField::new(fs[idx % fs.len()]).unwrap();
        let q = key_lemma_h_witness(gamma, field).unwrap();
        prop_assert_eq!(chi_k_local(field, gamma, PlaceTag::Finite(q)).unwrap(), -1);
    }

    #[test]
    fn determinant_real_and_gamma_integral(
        m in 1usize..=3,
        diag in prop::collection::vec(-6i64..=6, 3),
        off in prop::collection::vec((-6i64..=6, -6i64..=6), 3),
        idx in 0usize..3,
    ) {
        let field = ImagQuadField::new([4u64, 3, 7][idx]).unwrap();
        let h = random_lambda(m, &diag, &off, field);
        let det = det_hermitian(&h).unwrap();
        if det != BigRational::from_integer(0.into()) {
            gamma_h(&h).unwrap();
        }
    }

    #[test]
    fn field_arithmetic_is_exact(a in -20i64..=20, b in -20i64..=20, c in -20i64..=20, e in -20i64..=20) {
        let k = ImagQuadField::new(7).unwrap();
        let x = FieldElement::from_ints(a, b, k);
        let y = FieldElement::from_ints(c, e, k);
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
        if !y.is_zero() {
            prop_assert_eq!(&(&x * &y) * &y.inv().unwrap(), x);
        }
    }
}
