//! Siegel-series polynomials `F_q(T, X)` for nondegenerate forms of rank ≤ 3.
//!
//! `F_q` is recovered from exact local densities `α_q(H_k, T)` at
//! `X = q^{-k}` after dividing out the normalizing factor `γ_q`, then
//! interpolated and checked.

mod cache;
mod density;
mod residue;
mod table;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use cache::{CacheRecord, FqCache};
pub use density::{
    hyperbolic_density, local_density_hyperbolic, primitive_density, superlattices, DensityPath,
};
pub use residue::{count_injective, count_maps, ResidueForm};
pub use table::{compare_with_table, reference_table, TableComparison, TableEntry, TableRecord};

use crate::error::{Error, Result};
use crate::exactnt::{self, ord_int};
use crate::poly;
use crate::quadform::{eta, HalfIntegralForm, PlaceTag};

/// `F_q(T, X)` as ascending integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalPolynomial {
    pub q: u64,
    pub coeffs: Vec<i64>,
    pub subject_rank: usize,
    pub subject_d: i64,
}

impl LocalPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        poly::eval_int(&self.coeffs, x)
    }

    /// `F_q(T, q^{e})`.
    pub fn eval_at_power(&self, e: i64) -> BigRational {
        self.eval(&poly::rat_pow(self.q as i64, e))
    }
}

/// A single fixed-precision density evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityRequest {
    pub t: HalfIntegralForm,
    pub q: u64,
    pub k: u32,
    pub nu: u32,
}

impl DensityRequest {
    pub fn new(t: HalfIntegralForm, q: u64, k: u32, nu: u32) -> Result<Self> {
        if nu == 0 {
            return Err(Error::InvalidArgument("precision ν must be ≥ 1".into()));
        }
        if (k as usize) <= t.degree() {
            return Err(Error::InvalidArgument(format!("need k > n, got k = {k}")));
        }
        if t.rank() != t.degree() {
            return Err(Error::Degenerate(format!("{t}")));
        }
        Ok(DensityRequest { t, q, k, nu })
    }

    pub fn evaluate(&self, path: DensityPath) -> Result<BigRational> {
        local_density_hyperbolic(&self.t, self.q, self.k, self.nu, path)
    }
}

/// `γ_q(X)` at `X = q^{-k}`.
fn gamma_factor(t: &HalfIntegralForm, q: u64, k: u32) -> Result<BigRational> {
    let n = t.degree();
    let x = poly::rat_pow(q as i64, -(k as i64));
    let one = BigRational::one();
    let mut g = &one - &x;
    for i in 1..=n / 2 {
        g *= &one - poly::rat_pow(q as i64, 2 * i as i64) * &x * &x;
    }
    if n % 2 == 0 {
        let chi = t.chi_t()?.eval(q as i64);
        let denom = &one - BigRational::from_integer(chi.into()) * poly::rat_pow(q as i64, n as i64 / 2) * &x;
        g /= denom;
    }
    Ok(g)
}

fn to_i64(x: &BigInt, what: &str) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Unsupported(format!("{what} {x} exceeds 64 bits")))
}

/// Computes `F_q(T, X)` directly, without the cache.
pub fn compute_siegel_series_polynomial(t: &HalfIntegralForm, q: u64) -> Result<LocalPolynomial> {
    let n = t.degree();
    if n == 0 || n > 3 {
        return Err(Error::Unsupported(format!("rank {n} outside 1..=3")));
    }
    if !exactnt::is_prime(q) {
        return Err(Error::InvalidArgument(format!("{q} is not prime")));
    }
    if t.rank() != n {
        return Err(Error::Degenerate(format!("{t}")));
    }
    let c = t.c_of()?;
    let d_val = t.d_of()?;
    let subject_d = d_val
        .to_i64()
        .ok_or_else(|| Error::Unsupported(format!("D(T) = {d_val} exceeds 64 bits")))?;
    let deg = ord_int(&BigInt::from(c), q).unwrap_or(0) as usize;
    let lattices = superlattices(t, q)?;
    let first = n as u32 + 1;
    let points: Vec<(BigRational, BigRational)> = (0..deg as u32 + 2)
        .map(|i| {
            let k = first + i;
            let alpha = density::hyperbolic_density_at(&lattices, n, q, k)?;
            Ok((poly::rat_pow(q as i64, -(k as i64)), alpha / gamma_factor(t, q, k)?))
        })
        .collect::<Result<_>>()?;
    let fitted = poly::interpolate(&points);
    let describe = || format!("{t} at q = {q}");
    if !fitted[deg + 1].is_zero() {
        return Err(Error::Calibration(format!("extra point not reproduced for {}", describe())));
    }
    if !fitted.iter().all(|c| c.is_integer()) {
        return Err(Error::Calibration(format!("non-integral coefficient for {}", describe())));
    }
    if !fitted[0].is_one() {
        return Err(Error::Calibration(format!("constant term {} for {}", fitted[0], describe())));
    }
    if fitted[deg].is_zero() {
        return Err(Error::Calibration(format!("degree below {deg} for {}", describe())));
    }
    let coeffs = fitted[..=deg]
        .iter()
        .map(|c| to_i64(&c.to_integer(), "coefficient"))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalPolynomial { q, coeffs, subject_rank: n, subject_d })
}

/// `F_q(T, X)` through the process-wide cache.
pub fn siegel_series_polynomial(t: &HalfIntegralForm, q: u64) -> Result<LocalPolynomial> {
    FqCache::global().get_or_compute(t, q)
}

/// `∏_{q | C(T)} F_q(T, X)`, product of the local polynomials.
pub fn global_polynomial(t: &HalfIntegralForm) -> Result<Vec<i64>> {
    let c = t.c_of()?;
    let mut prod = vec![1i64];
    for q in exactnt::prime_divisors(c.unsigned_abs()) {
        prod = poly::mul_int(&prod, &siegel_series_polynomial(t, q)?.coeffs);
    }
    Ok(prod)
}

/// `F(q^{-n-1}/X) = η_q(T) (q^{(n+1)/2} X)^{-ord_q D(T)} F(X)` checked at
/// `ord_q D(T) + 2` sample points.
pub fn check_functional_equation(f: &LocalPolynomial, t: &HalfIntegralForm, q: u64) -> Result<bool> {
    let n = t.degree();
    if n % 2 == 0 {
        return Err(Error::InvalidArgument("functional equation needs odd degree".into()));
    }
    let d = t.d_of()?;
    let ord = ord_int(&BigInt::from(d), q).unwrap_or(0) as i64;
    let sign = BigRational::from_integer(eta(t, PlaceTag::Finite(q))?.into());
    let shift = poly::rat_pow(q as i64, -(n as i64) - 1);
    let half = poly::rat_pow(q as i64, (n as i64 + 1) / 2);
    for j in 0..ord + 2 {
        let x = BigRational::new(BigInt::from(j + 2), BigInt::from(2 * j + 3));
        let lhs = f.eval(&(&shift / &x));
        let scale = (&half * &x).pow(-ord as i32);
        let rhs = &sign * scale * f.eval(&x);
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The smallest prime `q | D(T)` with `F_q(T, q^{-(n+1)/2}) = 0`.
pub fn key_lemma_prime(t: &HalfIntegralForm) -> Result<u64> {
    let n = t.degree();
    if !matches!(n % 8, 3 | 5) {
        return Err(Error::InvalidArgument(format!("degree {n} is not ±3 mod 8")));
    }
    if !t.is_positive_definite() {
        return Err(Error::InvalidArgument(format!("{t} is not positive definite")));
    }
    let d = t.d_of()?;
    for q in exactnt::prime_divisors(d.unsigned_abs()) {
        let f = siegel_series_polynomial(t, q)?;
        if f.eval_at_power(-(n as i64 + 1) / 2).is_zero() {
            return Ok(q);
        }
    }
    Err(Error::Consistency(format!("no prime divisor of D(T) = {d} annihilates F_q for {t}")))
}

/// Primes `q | D(T)` with `F_q(T, q^{-(n+1)/2}) = 0`, ascending.
pub fn vanishing_primes(t: &HalfIntegralForm) -> Result<Vec<u64>> {
    let n = t.degree() as i64;
    let d = t.d_of()?;
    let mut out = Vec::new();
    for q in exactnt::prime_divisors(d.unsigned_abs()) {
        if siegel_series_polynomial(t, q)?.eval_at_power(-(n + 1) / 2).is_zero() {
            out.push(q);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(rows: &[&[i64]]) -> HalfIntegralForm {
        HalfIntegralForm::from_doubled_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn unary_closed_form() {
        for t in 1..=20i64 {
            for q in exactnt::prime_divisors(t as u128) {
                let f = compute_siegel_series_polynomial(&HalfIntegralForm::unary(t), q).unwrap();
                let e = ord_int(&BigInt::from(t), q).unwrap() as u32;
                let expected: Vec<i64> = (0..=e).map(|i| (q as i64).pow(i)).collect();
                assert_eq!(f.coeffs, expected, "t = {t}, q = {q}");
            }
        }
    }

    #[test]
    fn unimodular_unary_at_two() {
        let f = compute_siegel_series_polynomial(&HalfIntegralForm::unary(1), 2).unwrap();
        assert_eq!(f.coeffs, vec![1]);
    }

    #[test]
    fn ternary_examples() {
        let t = form(&[&[2, 1, 1], &[1, 2, 0], &[1, 0, 2]]);
        let f = compute_siegel_series_polynomial(&t, 2).unwrap();
        assert_eq!(f.coeffs, vec![1, -4]);
        assert!(check_functional_equation(&f, &t, 2).unwrap());
        assert_eq!(key_lemma_prime(&t).unwrap(), 2);
        let f5 = compute_siegel_series_polynomial(&t, 5).unwrap();
        assert_eq!(f5.coeffs, vec![1]);
        assert!(check_functional_equation(&f5, &t, 5).unwrap());
    }

    #[test]
    fn sum_of_three_squares() {
        let t = HalfIntegralForm::identity(3);
        let f = compute_siegel_series_polynomial(&t, 2).unwrap();
        assert_eq!(f.subject_d, 4);
        assert_eq!(f.coeffs, vec![1, 0, -16]);
        assert!(check_functional_equation(&f, &t, 2).unwrap());
    }

    #[test]
    fn functional_equation_detects_wrong_sign() {
        let t = form(&[&[2, 1, 1], &[1, 2, 0], &[1, 0, 2]]);
        let wrong = LocalPolynomial { q: 2, coeffs: vec![1, 4], subject_rank: 3, subject_d: 2 };
        assert!(!check_functional_equation(&wrong, &t, 2).unwrap());
    }

    #[test]
    fn density_request_validation() {
        assert!(DensityRequest::new(HalfIntegralForm::unary(1), 3, 2, 0).is_err());
        assert!(DensityRequest::new(HalfIntegralForm::unary(1), 3, 1, 1).is_err());
        let r = DensityRequest::new(HalfIntegralForm::unary(1), 3, 2, 1).unwrap();
        assert_eq!(
            r.evaluate(DensityPath::Direct).unwrap(),
            r.evaluate(DensityPath::CharacterSum).unwrap()
        );
    }
}
