//! Exact number theory: Bernoulli numbers, generalized Bernoulli numbers of
//! quadratic characters, special values of zeta and Dirichlet L-functions at
//! nonpositive integers, Kronecker symbols, modular square roots, primality
//! and p-adic valuations of rationals.
//!
//! Everything here is a pure function of its arguments. The Bernoulli table is
//! memoized behind a lock; filling it is idempotent.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

static BERNOULLI: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();

/// Bernoulli number `B_k` with the convention `B_1 = -1/2`.
///
/// Computed by the Akiyama–Tanigawa transform (which yields `B_1 = +1/2`,
/// corrected here) and cached.
pub fn bernoulli(k: usize) -> BigRational {
    let table = BERNOULLI.get_or_init(|| Mutex::new(Vec::new()));
    {
        let t = table.lock();
        if k < t.len() {
            return t[k].clone();
        }
    }
    let n = (k + 1).max(table.lock().len());
    let values = akiyama_tanigawa(n);
    let mut t = table.lock();
    if t.len() < values.len() {
        *t = values;
    }
    t[k].clone()
}

fn akiyama_tanigawa(count: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(count);
    let mut row: Vec<BigRational> = Vec::with_capacity(count);
    for m in 0..count {
        row.push(rat(1, m as i64 + 1));
        for j in (1..=m).rev() {
            let diff = &row[j - 1] - &row[j];
            row[j - 1] = diff * BigInt::from(j as i64);
        }
        out.push(row[0].clone());
    }
    if count > 1 {
        out[1] = -out[1].clone();
    }
    out
}

/// `ζ(1 - k)` for even `k ≥ 2`, i.e. `-B_k / k`.
pub fn zeta_neg(k: i64) -> Result<BigRational> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "zeta_neg needs an even k >= 2, got {k}"
        )));
    }
    Ok(-bernoulli(k as usize) / BigInt::from(k))
}

/// Value `ζ(s)` at a nonpositive integer `s = 1 - k` (`k ≥ 1`), allowing odd `k`.
/// `ζ(1-k) = 0` for odd `k ≥ 3` and `ζ(0) = -1/2`.
pub fn zeta_at_nonpositive(s: i64) -> Result<BigRational> {
    if s > 0 {
        return Err(Error::InvalidArgument(format!("s = {s} is positive")));
    }
    let k = 1 - s;
    if k == 1 {
        return Ok(rat(-1, 2));
    }
    Ok(-bernoulli(k as usize) / BigInt::from(k))
}

/// A primitive quadratic Dirichlet character, identified by its fundamental
/// discriminant (`1` for the trivial character).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadCharacter {
    discriminant: i64,
}

impl QuadCharacter {
    pub fn new(discriminant: i64) -> Result<Self> {
        if !is_fundamental_discriminant(discriminant) {
            return Err(Error::InvalidArgument(format!(
                "{discriminant} is not a fundamental discriminant"
            )));
        }
        Ok(QuadCharacter { discriminant })
    }

    pub fn trivial() -> Self {
        QuadCharacter { discriminant: 1 }
    }

    /// The character attached to `Q(√n)` for a nonzero integer `n`.
    pub fn of_field(n: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("Q(sqrt 0) is not a field".into()));
        }
        Ok(QuadCharacter {
            discriminant: fundamental_discriminant_of(n),
        })
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    pub fn conductor(&self) -> u64 {
        self.discriminant.unsigned_abs()
    }

    pub fn is_trivial(&self) -> bool {
        self.discriminant == 1
    }

    pub fn eval(&self, n: i64) -> i32 {
        kronecker(self.discriminant, n)
    }
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    if d.rem_euclid(4) == 1 {
        return is_squarefree(d.unsigned_abs());
    }
    if d.rem_euclid(4) == 0 {
        let m = d / 4;
        let r = m.rem_euclid(4);
        return (r == 2 || r == 3) && is_squarefree(m.unsigned_abs());
    }
    false
}

/// Discriminant of `Q(√n)`; `1` when `n` is a perfect square.
pub fn fundamental_discriminant_of(n: i64) -> i64 {
    let s = squarefree_part(n as i128) as i64;
    if s == 1 {
        1
    } else if s.rem_euclid(4) == 1 {
        s
    } else {
        4 * s
    }
}

/// Bernoulli polynomial `B_m(x) = Σ_j C(m, j) B_j x^{m-j}`.
pub fn bernoulli_polynomial(m: usize, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut binom = BigInt::one();
    for j in 0..=m {
        acc += bernoulli(j) * &binom * pow_rat(x, (m - j) as u32);
        binom = binom * BigInt::from((m - j) as i64) / BigInt::from(j as i64 + 1);
    }
    acc
}

pub fn pow_rat(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow::pow(x.clone(), e as usize)
}

/// Generalized Bernoulli number `B_{m,χ} = f^{m-1} Σ_{a=1}^{f} χ(a) B_m(a/f)`.
///
/// For the trivial character the ordinary `B_m` is returned, keeping the
/// `B_1 = -1/2` convention (the finite sum would give `+1/2` at `m = 1`).
pub fn gen_bernoulli(chi: QuadCharacter, m: u32) -> BigRational {
    if chi.is_trivial() {
        return bernoulli(m as usize);
    }
    let f = chi.conductor() as i64;
    let mut acc = BigRational::zero();
    for a in 1..=f {
        let c = chi.eval(a);
        if c == 0 {
            continue;
        }
        let b = bernoulli_polynomial(m as usize, &rat(a, f));
        if c > 0 {
            acc += b;
        } else {
            acc -= b;
        }
    }
    acc * BigInt::from(f).pow(m - 1)
}

/// `L(1 - m, χ) = -B_{m,χ} / m`.
pub fn dirichlet_l_neg(chi: QuadCharacter, m: u32) -> Result<BigRational> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    Ok(-gen_bernoulli(chi, m) / BigInt::from(m))
}

/// Whether `(χ, m)` falls into the exceptional set of Carlitz's integrality
/// theorem for `L(1-m, χ)`: conductor an odd prime `p` with `m` an odd multiple
/// of `(p-1)/2`, or conductor 4 (where the value only has a 2 in the
/// denominator).
pub fn carlitz_exception(chi: QuadCharacter, m: u32) -> bool {
    let f = chi.conductor();
    if f == 4 {
        return true;
    }
    if f > 2 && is_prime(f) {
        let h = (f - 1) / 2;
        let m = m as u64;
        return m % h == 0 && (m / h) % 2 == 1;
    }
    false
}

/// Kronecker symbol `(d / n)`.
///
/// Extended to `n ≤ 0` by `(d/0) = [d = ±1]` and `(d/-1) = sign(d)`.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if d < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    n >>= twos;
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            let r = d.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    result * jacobi(d.rem_euclid(n), n)
}

/// Jacobi symbol `(a / m)` for odd positive `m`.
pub fn jacobi(a: i64, m: i64) -> i32 {
    debug_assert!(m > 0 && m % 2 == 1);
    let mut a = a.rem_euclid(m);
    let mut m = m;
    let mut result = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = m % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            result = -result;
        }
        a %= m;
    }
    if m == 1 {
        result
    } else {
        0
    }
}

/// p-adic valuation of a rational; `Infinite` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_nonnegative(&self) -> bool {
        match self {
            Valuation::Finite(v) => *v >= 0,
            Valuation::Infinite => true,
        }
    }
}

pub fn ord_int(x: &BigInt, p: u64) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        x = q;
        v += 1;
    }
}

pub fn ord_rat(x: &BigRational, p: u64) -> Valuation {
    match ord_int(x.numer(), p) {
        None => Valuation::Infinite,
        Some(n) => Valuation::Finite(n as i64 - ord_int(x.denom(), p).unwrap_or(0) as i64),
    }
}

/// Returns `ord_p(x)` and, when that is nonnegative, the residue of `x` mod `p`.
pub fn ord_and_reduce(x: &BigRational, p: u64) -> (Valuation, Option<u64>) {
    let v = ord_rat(x, p);
    if !v.is_nonnegative() {
        return (v, None);
    }
    if x.is_zero() {
        return (v, Some(0));
    }
    let pb = BigInt::from(p);
    let num = x.numer().mod_floor(&pb).to_u64().unwrap();
    let den = x.denom().mod_floor(&pb).to_u64().unwrap();
    if den == 0 {
        // numerator and denominator both divisible by p cannot happen in lowest terms
        unreachable!("reduced rational with p | num and p | den");
    }
    let inv = pow_mod(den, p - 2, p);
    (v, Some(mul_mod(num, inv, p)))
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Square root of `a` modulo an odd prime `q` (Tonelli–Shanks), in `[0, q)`.
/// Returns the smaller of the two roots.
pub fn sqrt_mod(a: i64, q: u64) -> Option<u64> {
    let a = a.rem_euclid(q as i64) as u64;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (q - 1) / 2, q) != 1 {
        return None;
    }
    let mut s = 0;
    let mut odd = q - 1;
    while odd % 2 == 0 {
        odd /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (q - 1) / 2, q) != q - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, odd, q);
    let mut t = pow_mod(a, odd, q);
    let mut r = pow_mod(a, odd.div_ceil(2), q);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, q);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), q);
        m = i;
        c = mul_mod(b, b, q);
        t = mul_mod(t, c, q);
        r = mul_mod(r, b, q);
    }
    Some(r.min(q - r))
}

/// Deterministic Miller–Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division; `n ≥ 1`.
pub fn factorize(mut n: u128) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p: u128 = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n as u64, 1));
    }
    out
}

pub fn prime_divisors(n: u128) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n as u128).iter().all(|&(_, e)| e == 1)
}

/// Signed squarefree kernel: `n = s · m²` with `s` squarefree, same sign as `n`.
pub fn squarefree_part(n: i128) -> i128 {
    assert!(n != 0, "squarefree part of zero");
    let s: i128 = factorize(n.unsigned_abs())
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p as i128)
        .product();
    if n < 0 {
        -s
    } else {
        s
    }
}

/// Squarefree integer in the square class of a nonzero rational.
pub fn squarefree_part_rat(x: &BigRational) -> i128 {
    let n = (x.numer() * x.denom())
        .to_i128()
        .expect("square class representative out of range");
    squarefree_part(n)
}

/// Sum of `d^e` over positive divisors `d` of `n`.
pub fn sigma(e: u32, n: u64) -> BigInt {
    let mut acc = BigInt::zero();
    for d in 1..=n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(e);
        }
    }
    acc
}
