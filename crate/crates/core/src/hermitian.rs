//! Imaginary quadratic fields, Hermitian forms over them, and the L-value
//! and character data attached to Hermitian Eisenstein series.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnt::{self, dirichlet_l_neg, is_fundamental_discriminant, zeta_neg, QuadCharacter, Valuation};
use crate::poly::rat_pow;
use crate::quadform::{hilbert_symbol, PlaceTag};

/// `K = Q(√(-D_K))` with `-D_K` a fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImagQuadField {
    d_k: u64,
}

impl ImagQuadField {
    pub fn new(d_k: u64) -> Result<Self> {
        if d_k == 0 || !is_fundamental_discriminant(-(d_k as i64)) {
            return Err(Error::InvalidArgument(format!("-{d_k} is not a fundamental discriminant")));
        }
        Ok(ImagQuadField { d_k })
    }

    pub fn d_k(&self) -> u64 {
        self.d_k
    }

    pub fn character(&self) -> QuadCharacter {
        QuadCharacter::new(-(self.d_k as i64)).expect("checked fundamental")
    }
}

/// `x + y√(-D_K)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    pub x: BigRational,
    pub y: BigRational,
    pub d_k: u64,
}

impl FieldElement {
    pub fn new(x: BigRational, y: BigRational, k: ImagQuadField) -> Self {
        FieldElement { x, y, d_k: k.d_k }
    }

    pub fn rational(x: BigRational, k: ImagQuadField) -> Self {
        FieldElement { x, y: BigRational::zero(), d_k: k.d_k }
    }

    pub fn from_ints(x: i64, y: i64, k: ImagQuadField) -> Self {
        Self::new(BigRational::from_integer(x.into()), BigRational::from_integer(y.into()), k)
    }

    /// `√(-D_K)`.
    pub fn sqrt_disc(k: ImagQuadField) -> Self {
        Self::from_ints(0, 1, k)
    }

    pub fn zero(k: ImagQuadField) -> Self {
        Self::from_ints(0, 0, k)
    }

    pub fn one(k: ImagQuadField) -> Self {
        Self::from_ints(1, 0, k)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn conj(&self) -> Self {
        FieldElement { x: self.x.clone(), y: -&self.y, d_k: self.d_k }
    }

    pub fn norm(&self) -> BigRational {
        &self.x * &self.x + &self.y * &self.y * BigInt::from(self.d_k)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("inverse of zero".into()));
        }
        let n = self.norm();
        Ok(FieldElement { x: &self.x / &n, y: -&self.y / &n, d_k: self.d_k })
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        FieldElement { x: &self.x + &o.x, y: &self.y + &o.y, d_k: self.d_k }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        FieldElement { x: &self.x - &o.x, y: &self.y - &o.y, d_k: self.d_k }
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, o: &FieldElement) -> FieldElement {
        let d = BigInt::from(self.d_k);
        FieldElement {
            x: &self.x * &o.x - &self.y * &o.y * d,
            y: &self.x * &o.y + &self.y * &o.x,
            d_k: self.d_k,
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { x: -&self.x, y: -&self.y, d_k: self.d_k }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·√-{}", self.x, self.y, self.d_k)
    }
}

/// `z ∈ O_K`: `z = (u + v√(-D_K))/2` with `u, v ∈ Z` and `u ≡ v·D_K (mod 2)`.
pub fn ok_membership(z: &FieldElement, k: ImagQuadField) -> bool {
    let u = &z.x * BigInt::from(2);
    let v = &z.y * BigInt::from(2);
    if !u.is_integer() || !v.is_integer() {
        return false;
    }
    let parity = u.to_integer() - v.to_integer() * BigInt::from(k.d_k);
    (parity % 2u32).is_zero()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianForm {
    m: usize,
    field: ImagQuadField,
    entries: Vec<FieldElement>,
}

impl HermitianForm {
    /// Checks `H* = H`, `h_jj ∈ Z` and `√(-D_K) h_jl ∈ O_K`.
    pub fn new(field: ImagQuadField, rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidArgument("Hermitian matrix must be square".into()));
        }
        let s = FieldElement::sqrt_disc(field);
        for j in 0..m {
            for l in 0..m {
                let h = &rows[j][l];
                if h.d_k != field.d_k {
                    return Err(Error::InvalidArgument("entry from another field".into()));
                }
                if rows[l][j] != h.conj() {
                    return Err(Error::InvalidArgument(format!("H* ≠ H at ({j}, {l})")));
                }
                if j == l && !h.x.is_integer() {
                    return Err(Error::InvalidArgument(format!("h_{j}{j} = {h} is not an integer")));
                }
                if !ok_membership(&(&s * h), field) {
                    return Err(Error::InvalidArgument(format!("√(-D_K)·h_{j}{l} ∉ O_K for {h}")));
                }
            }
        }
        Ok(HermitianForm { m, field, entries: rows.into_iter().flatten().collect() })
    }

    pub fn identity(m: usize, field: ImagQuadField) -> Self {
        let entries = (0..m * m)
            .map(|i| if i % (m + 1) == 0 { FieldElement::one(field) } else { FieldElement::zero(field) })
            .collect();
        HermitianForm { m, field, entries }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn field(&self) -> ImagQuadField {
        self.field
    }

    pub fn entry(&self, j: usize, l: usize) -> &FieldElement {
        &self.entries[j * self.m + l]
    }
}

/// Determinant by Gaussian elimination over `K`; real for Hermitian input.
pub fn det_hermitian(h: &HermitianForm) -> Result<BigRational> {
    let m = h.m;
    let k = h.field;
    let mut a = h.entries.clone();
    let mut det = FieldElement::one(k);
    for c in 0..m {
        let Some(p) = (c..m).find(|&r| !a[r * m + c].is_zero()) else {
            return Ok(BigRational::zero());
        };
        if p != c {
            for j in 0..m {
                a.swap(p * m + j, c * m + j);
            }
            det = -&det;
        }
        let pivot = a[c * m + c].clone();
        det = &det * &pivot;
        let inv = pivot.inv()?;
        for r in c + 1..m {
            let f = &a[r * m + c] * &inv;
            if f.is_zero() {
                continue;
            }
            for j in c..m {
                let v = &a[r * m + j] - &(&f * &a[c * m + j]);
                a[r * m + j] = v;
            }
        }
    }
    if !det.y.is_zero() {
        return Err(Error::Consistency(format!("determinant {det} of a Hermitian matrix is not real")));
    }
    Ok(det.x)
}

/// `γ(H) = (-D_K)^{[m/2]} det(H)`, an integer for `H ∈ Λ_m(O_K)`.
pub fn gamma_h(h: &HermitianForm) -> Result<BigInt> {
    let det = det_hermitian(h)?;
    if det.is_zero() {
        return Err(Error::Degenerate("γ(H) needs a nondegenerate H".into()));
    }
    let g = det * rat_pow(-(h.field.d_k as i64), (h.m / 2) as i64);
    if !g.is_integer() {
        return Err(Error::Consistency(format!("γ(H) = {g} is not an integer")));
    }
    Ok(g.to_integer())
}

/// `χ_{K,v}(x) = (x, -D_K)_v`.
pub fn chi_k_local(k: ImagQuadField, x: i64, v: PlaceTag) -> Result<i32> {
    if x == 0 {
        return Err(Error::InvalidArgument("χ_K at zero".into()));
    }
    Ok(hilbert_symbol(x, -(k.d_k as i64), v))
}

/// `∏_{i=1}^{r} L(i-k, χ_K^{i-1})^{-1}`, with `ζ` for odd `i`.
pub fn b_factor_hermitian(r: usize, k: i64, field: ImagQuadField) -> Result<BigRational> {
    let mut acc = BigRational::one();
    for value in l_values(r, k, field)? {
        if value.is_zero() {
            return Err(Error::InvalidArgument(format!("vanishing L-value in B_{{{r},{k}}}")));
        }
        acc /= value;
    }
    Ok(acc)
}

/// `L(i-k, χ_K^{i-1})` for `i = 1..=r`.
pub fn l_values(r: usize, k: i64, field: ImagQuadField) -> Result<Vec<BigRational>> {
    (1..=r as i64)
        .map(|i| {
            let s = k - i + 1;
            if s < 1 {
                return Err(Error::WeightTooSmall { k, n: r });
            }
            if i % 2 == 1 {
                zeta_neg(s)
            } else {
                dirichlet_l_neg(field.character(), s as u32)
            }
        })
        .collect()
}

/// `ord_p B_{m,k}` for `k = m + (p-1)t`.
pub fn beta_p(m: usize, k: i64, p: u64, field: ImagQuadField) -> Result<i64> {
    if !exactnt::is_prime(p) || p as usize <= m + 1 || field.d_k % p == 0 {
        return Err(Error::InvalidArgument(format!(
            "need prime p > m + 1 not dividing D_K, got p = {p}, m = {m}, D_K = {}",
            field.d_k
        )));
    }
    let shift = k - m as i64;
    if shift <= 0 || shift % (p as i64 - 1) != 0 {
        return Err(Error::InvalidArgument(format!("k = {k} is not m + (p-1)t")));
    }
    match exactnt::ord_rat(&b_factor_hermitian(m, k, field)?, p) {
        Valuation::Finite(v) if v <= 0 => Ok(v),
        v => Err(Error::Consistency(format!("β_{p}({m},{k}) = {v:?}, expected ≤ 0"))),
    }
}

/// Smallest prime `q` with `χ_{K,q}(γ) = -1`, for `γ < 0`.
pub fn key_lemma_h_witness(gamma: i64, field: ImagQuadField) -> Result<u64> {
    if gamma >= 0 {
        return Err(Error::InvalidArgument(format!("γ = {gamma} must be negative")));
    }
    let candidates = 2u128 * gamma.unsigned_abs() as u128 * field.d_k as u128;
    for q in exactnt::prime_divisors(candidates) {
        if chi_k_local(field, gamma, PlaceTag::Finite(q))? == -1 {
            return Ok(q);
        }
    }
    Err(Error::Consistency(format!("no prime q with χ_K,q({gamma}) = -1 for D_K = {}", field.d_k)))
}

/// Local symbols `(v, χ_{K,v}(x))` over `∞` and the primes dividing `2 x D_K`.
pub fn local_symbol_table(field: ImagQuadField, x: i64) -> Result<Vec<(PlaceTag, i32)>> {
    let mut out = vec![(PlaceTag::Infinity, chi_k_local(field, x, PlaceTag::Infinity)?)];
    let support = 2u128 * x.unsigned_abs() as u128 * field.d_k as u128;
    for q in exactnt::prime_divisors(support) {
        out.push((PlaceTag::Finite(q), chi_k_local(field, x, PlaceTag::Finite(q))?));
    }
    Ok(out)
}

/// Ikeda's local polynomial `ℱ_q(H, X)`. Only the interface is provided: no
/// evaluation route for Hermitian local densities exists in this crate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IkedaPolynomial {
    pub q: u64,
    pub coeffs: Vec<i64>,
}

pub fn ikeda_polynomial(_h: &HermitianForm, q: u64) -> Result<IkedaPolynomial> {
    Err(Error::Unsupported(format!("Hermitian local polynomials at q = {q} are not implemented")))
}

pub fn check_ikeda_functional_equation(_f: &IkedaPolynomial, _h: &HermitianForm) -> Result<bool> {
    Err(Error::Unsupported("Hermitian functional equation is not implemented".into()))
}
