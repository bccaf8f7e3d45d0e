//! Dense univariate polynomials over `Z` and `Q`, ascending coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn eval_rat(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

pub fn eval_int(coeffs: &[i64], x: &BigRational) -> BigRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, &c| acc * x + BigRational::from_integer(c.into()))
}

pub fn mul_int(a: &[i64], b: &[i64]) -> Vec<i64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim_int(out)
}

pub fn trim_int(mut v: Vec<i64>) -> Vec<i64> {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

/// Coefficients of the unique polynomial of degree `< points.len()` through
/// the given points (distinct abscissae).
pub fn interpolate(points: &[(BigRational, BigRational)]) -> Vec<BigRational> {
    let n = points.len();
    let mut result = vec![BigRational::zero(); n];
    for (i, (xi, yi)) in points.iter().enumerate() {
        // basis polynomial ∏_{j≠i} (X - x_j) / (x_i - x_j)
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * xj;
            }
            basis = next;
            denom *= xi - xj;
        }
        let scale = yi / denom;
        for (k, c) in basis.iter().enumerate() {
            result[k] += c * &scale;
        }
    }
    result
}

pub fn rat_pow(base: i64, exp: i64) -> BigRational {
    let b = BigInt::from(base);
    if exp >= 0 {
        BigRational::from_integer(num_traits::pow(b, exp as usize))
    } else {
        BigRational::new(BigInt::one(), num_traits::pow(b, (-exp) as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let coeffs = [r(1), r(-4), r(0), r(7)];
        let pts: Vec<_> = [r(2), rat_pow(3, -1), r(-5), rat_pow(2, -3)]
            .into_iter()
            .map(|x| {
                let y = eval_rat(&coeffs, &x);
                (x, y)
            })
            .collect();
        assert_eq!(interpolate(&pts), coeffs.to_vec());
    }

    #[test]
    fn integer_products() {
        assert_eq!(mul_int(&[1, -4], &[1, 9]), vec![1, 5, -36]);
        assert_eq!(mul_int(&[1, 2], &[1, -2]), vec![1, 0, -4]);
        assert_eq!(eval_int(&[1, -4], &rat_pow(2, -2)), r(0));
    }
}
