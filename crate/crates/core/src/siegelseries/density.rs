//! Local densities of half-integral forms by `k` hyperbolic planes.
//!
//! Three evaluation routes:
//!
//! * [`DensityPath::Direct`]: count `X ∈ M_{2k,n}(Z/q^ν)` with `S[X] ≡ T`
//!   by convolving the per-plane value distribution. Tiny cases only.
//! * [`DensityPath::CharacterSum`]: the Gauss-sum formula over
//!   `σ ∈ Sym_n(Z/q^ν)`, where each hyperbolic plane contributes
//!   `q^{νn} N_ν(σ)`.
//! * [`hyperbolic_density`]: the limit value, via the decomposition of every
//!   representation as a primitive one composed with `G ∈ GL_n(Z_q)\M_n(Z_q)`:
//!   `α(T) = Σ_G q^{(n+1-2k) ord det G} α_pr(T[G⁻¹])`. Primitive densities by an
//!   even unimodular lattice are already stable modulo `q`, so `α_pr` is a
//!   count over `F_q` (see [`super::residue`]).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{pow, One, Zero};
use rayon::prelude::*;

use super::residue::{count_injective, ResidueForm};
use crate::error::{Error, Result};
use crate::exactnt::{self, ord_int};
use crate::quadform::HalfIntegralForm;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityPath {
    Direct,
    CharacterSum,
}

fn check_request(t: &HalfIntegralForm, q: u64, k: u32) -> Result<BigInt> {
    let n = t.degree();
    if n == 0 || n > 3 {
        return Err(Error::Unsupported(format!("local densities need 1 ≤ rank ≤ 3, got {n}")));
    }
    if (k as usize) <= n {
        return Err(Error::InvalidArgument(format!("need k > n, got k = {k}, n = {n}")));
    }
    if !exactnt::is_prime(q) {
        return Err(Error::InvalidArgument(format!("{q} is not prime")));
    }
    let det = t.det_doubled();
    if det.is_zero() {
        return Err(Error::Degenerate(format!("{t}")));
    }
    Ok(det)
}

/// Normalized count `q^{-ν(2kn - n(n+1)/2)} #{X mod q^ν : S[X] ≡ T}` at a fixed
/// precision `ν`.
pub fn local_density_hyperbolic(
    t: &HalfIntegralForm,
    q: u64,
    k: u32,
    nu: u32,
    path: DensityPath,
) -> Result<BigRational> {
    check_request(t, q, k)?;
    if nu == 0 {
        return Err(Error::InvalidArgument("precision ν must be ≥ 1".into()));
    }
    let n = t.degree();
    let modulus = pow(q, nu as usize);
    let count = match path {
        DensityPath::Direct => {
            let cells = pow(modulus, 2 * n);
            if n > 2 || modulus > 9 || k > 3 || cells > 10_000 {
                return Err(Error::Unsupported(
                    "direct enumeration needs n ≤ 2, q^ν ≤ 9, k ≤ 3".into(),
                ));
            }
            direct_count(t, modulus, k)
        }
        DensityPath::CharacterSum => character_sum_count(t, q, nu, k),
    };
    let exponent = nu as i64 * (2 * k as i64 * n as i64 - (n * (n + 1) / 2) as i64);
    Ok(BigRational::new(count, pow(BigInt::from(q), exponent as usize)))
}

/// Target coordinates `(t_11, …, t_nn, g_12, g_13, …)` reduced mod `modulus`.
fn target(t: &HalfIntegralForm, modulus: u64) -> Vec<u64> {
    let n = t.degree();
    let m = modulus as i64;
    let mut v: Vec<u64> = (0..n).map(|i| t.t_diag(i).rem_euclid(m) as u64).collect();
    for i in 0..n {
        for j in i + 1..n {
            v.push(t.g(i, j).rem_euclid(m) as u64);
        }
    }
    v
}

fn direct_count(t: &HalfIntegralForm, modulus: u64, k: u32) -> BigInt {
    let n = t.degree();
    let slots = n * (n + 1) / 2;
    let size = pow(modulus as usize, slots);
    let index = |vals: &[u64]| vals.iter().rev().fold(0usize, |acc, &v| acc * modulus as usize + v as usize);
    // one hyperbolic plane: (x, y) ∈ (Z/M)^n × (Z/M)^n ↦ (x_i y_i, x_i y_j + x_j y_i)
    let mut plane = vec![0u64; size];
    let vars = 2 * n;
    for idx in 0..pow(modulus, vars) {
        let mut z = idx;
        let mut xy = vec![0u64; vars];
        for e in xy.iter_mut() {
            *e = z % modulus;
            z /= modulus;
        }
        let (x, y) = xy.split_at(n);
        let mut vals: Vec<u64> = (0..n).map(|i| x[i] * y[i] % modulus).collect();
        for i in 0..n {
            for j in i + 1..n {
                vals.push((x[i] * y[j] + x[j] * y[i]) % modulus);
            }
        }
        plane[index(&vals)] += 1;
    }
    let decode = |mut idx: usize| {
        let mut v = vec![0u64; slots];
        for e in v.iter_mut() {
            *e = (idx % modulus as usize) as u64;
            idx /= modulus as usize;
        }
        v
    };
    let mut dist: Vec<BigInt> = vec![BigInt::zero(); size];
    dist[0] = BigInt::one();
    for _ in 0..k {
        let mut next = vec![BigInt::zero(); size];
        for (a, da) in dist.iter().enumerate() {
            if da.is_zero() {
                continue;
            }
            let va = decode(a);
            for (b, &pb) in plane.iter().enumerate() {
                if pb == 0 {
                    continue;
                }
                let vb = decode(b);
                let sum: Vec<u64> = va.iter().zip(&vb).map(|(x, y)| (x + y) % modulus).collect();
                next[index(&sum)] += da * pb;
            }
        }
        dist = next;
    }
    dist[index(&target(t, modulus))].clone()
}

/// `ord_q` of the invariant factors of a symmetric integer matrix, via
/// determinantal divisors; `None` for a zero invariant factor.
fn invariant_factor_orders(s: &[i64], n: usize, q: u64) -> Vec<Option<u64>> {
    let minors_gcd = |size: usize| -> BigInt {
        let mut g = BigInt::zero();
        let idx: Vec<Vec<usize>> = subsets(n, size);
        for rows in &idx {
            for cols in &idx {
                let m: Vec<Vec<BigInt>> = rows
                    .iter()
                    .map(|&r| cols.iter().map(|&c| BigInt::from(s[r * n + c])).collect())
                    .collect();
                g = num_integer::Integer::gcd(&g, &crate::quadform::bareiss_det(m));
            }
        }
        g
    };
    let mut prev: Option<u64> = Some(0);
    let mut out = Vec::with_capacity(n);
    for size in 1..=n {
        let g = minors_gcd(size);
        let cur = ord_int(&g, q);
        out.push(match (cur, prev) {
            (Some(c), Some(p)) => Some(c - p),
            _ => None,
        });
        prev = cur;
    }
    out
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..n).filter(|&i| m & (1 << i) != 0).collect())
        .collect()
}

fn character_sum_count(t: &HalfIntegralForm, q: u64, nu: u32, k: u32) -> BigInt {
    let n = t.degree();
    let modulus = pow(q, nu as usize);
    let slots = n * (n + 1) / 2;
    let tv = target(t, modulus);
    // C[(log_q N, ord_q pairing)] = number of σ
    let classes: HashMap<(u64, u64), u64> = (0..modulus)
        .into_par_iter()
        .map(|first| {
            let mut local: HashMap<(u64, u64), u64> = HashMap::new();
            let rest = pow(modulus, slots - 1);
            let mut e = vec![0u64; slots];
            e[0] = first;
            for idx in 0..rest {
                let mut z = idx;
                for x in e.iter_mut().skip(1) {
                    *x = z % modulus;
                    z /= modulus;
                }
                let mut sigma = vec![0i64; n * n];
                for i in 0..n {
                    sigma[i * n + i] = e[i] as i64;
                }
                let mut s = n;
                for i in 0..n {
                    for j in i + 1..n {
                        sigma[i * n + j] = e[s] as i64;
                        sigma[j * n + i] = e[s] as i64;
                        s += 1;
                    }
                }
                let pairing = e.iter().zip(&tv).map(|(a, b)| a * b % modulus).sum::<u64>() % modulus;
                let ord_pair = if pairing == 0 {
                    nu as u64
                } else {
                    ord_int(&BigInt::from(pairing), q).unwrap()
                };
                let log_kernel: u64 = invariant_factor_orders(&sigma, n, q)
                    .into_iter()
                    .map(|o| o.map_or(nu as u64, |o| o.min(nu as u64)))
                    .sum();
                *local.entry((log_kernel, ord_pair)).or_default() += 1;
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (key, v) in b {
                *a.entry(key).or_default() += v;
            }
            a
        });
    // Σ over a in the unit orbit of ord j of e(-a/q^ν) is 1 (j = ν), -1 (j = ν-1), else 0.
    let qb = BigInt::from(q);
    let mut total = BigRational::zero();
    for ((log_kernel, ord_pair), count) in classes {
        let weight = if ord_pair == nu as u64 {
            BigRational::from_integer(count.into())
        } else if ord_pair + 1 == nu as u64 {
            -BigRational::new(count.into(), BigInt::from(q - 1))
        } else {
            continue;
        };
        // (q^{νn} N_ν(σ))^k
        let plane = pow(qb.clone(), (nu as usize * n + log_kernel as usize) * k as usize);
        total += weight * BigRational::from_integer(plane);
    }
    let total = total / BigRational::from_integer(pow(qb, nu as usize * slots));
    debug_assert!(total.is_integer());
    total.to_integer()
}

/// Superlattices `T[G⁻¹] ∈ Λ_n` over `Z_q`, as `(ord_q det G, T[G⁻¹])`, with
/// `G` running over upper-triangular Hermite normal forms of `q`-power
/// determinant.
pub fn superlattices(t: &HalfIntegralForm, q: u64) -> Result<Vec<(u32, HalfIntegralForm)>> {
    let n = t.degree();
    let det = t.det_doubled();
    let max_e = ord_int(&det, q).ok_or_else(|| Error::Degenerate(format!("{t}")))? / 2;
    let mut out = Vec::new();
    let mut exps = vec![0u32; n];
    enumerate_exponents(&mut exps, 0, max_e as u32, &mut |exps| {
        for g in hermite_forms(exps, q) {
            if let Some(f) = apply_inverse(t, &g) {
                out.push((exps.iter().sum(), f));
            }
        }
    });
    Ok(out)
}

fn enumerate_exponents(exps: &mut Vec<u32>, pos: usize, budget: u32, f: &mut dyn FnMut(&[u32])) {
    if pos == exps.len() {
        f(exps);
        return;
    }
    for e in 0..=budget {
        exps[pos] = e;
        enumerate_exponents(exps, pos + 1, budget - e, f);
    }
    exps[pos] = 0;
}

/// Upper-triangular `G` with diagonal `q^{e_i}` and `0 ≤ g_ij < q^{e_j}`.
fn hermite_forms(exps: &[u32], q: u64) -> Vec<Vec<i128>> {
    let n = exps.len();
    let diag: Vec<i128> = exps.iter().map(|&e| pow(q as i128, e as usize)).collect();
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    let mut out = Vec::new();
    let total: i128 = slots.iter().map(|&(_, j)| diag[j]).product();
    for idx in 0..total {
        let mut g = vec![0i128; n * n];
        for i in 0..n {
            g[i * n + i] = diag[i];
        }
        let mut z = idx;
        for &(i, j) in &slots {
            g[i * n + j] = z % diag[j];
            z /= diag[j];
        }
        out.push(g);
    }
    out
}

/// `T[G⁻¹]` when it lies in `Λ_n`.
fn apply_inverse(t: &HalfIntegralForm, g: &[i128]) -> Option<HalfIntegralForm> {
    let n = t.degree();
    let adj = adjugate(g, n);
    let det: i128 = (0..n).map(|i| g[i * n + i]).product();
    let d2 = det * det;
    // adjᵗ · 2T · adj
    let mut tmp = vec![0i128; n * n];
    for i in 0..n {
        for j in 0..n {
            tmp[i * n + j] = (0..n).map(|k| t.g(i, k) as i128 * adj[k * n + j]).sum();
        }
    }
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            let v: i128 = (0..n).map(|k| adj[k * n + i] * tmp[k * n + j]).sum();
            if v % d2 != 0 {
                return None;
            }
            out[i * n + j] = (v / d2) as i64;
        }
    }
    HalfIntegralForm::from_doubled(n, out).ok()
}

fn adjugate(g: &[i128], n: usize) -> Vec<i128> {
    match n {
        1 => vec![1],
        2 => vec![g[3], -g[1], -g[2], g[0]],
        3 => {
            let a = |i: usize, j: usize| g[i * 3 + j];
            let mut out = vec![0i128; 9];
            for i in 0..3 {
                for j in 0..3 {
                    // cofactor C_ji goes to position (i, j)
                    let (r0, r1) = others(j);
                    let (c0, c1) = others(i);
                    let minor = a(r0, c0) * a(r1, c1) - a(r0, c1) * a(r1, c0);
                    out[i * 3 + j] = if (i + j) % 2 == 0 { minor } else { -minor };
                }
            }
            out
        }
        _ => unreachable!("degree checked by caller"),
    }
}

fn others(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn residue_form(t: &HalfIntegralForm, q: u64) -> ResidueForm {
    let n = t.degree();
    let diag = (0..n).map(|i| t.t_diag(i)).collect();
    let mut off = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            off.push(t.g(i, j));
        }
    }
    ResidueForm::new(q, n, diag, off)
}

/// Primitive density `q^{-(2kn - n(n+1)/2)} #{X mod q primitive : S[X] ≡ T}`.
pub fn primitive_density(t: &HalfIntegralForm, q: u64, k: u32) -> BigRational {
    let n = t.degree() as i64;
    let count = count_injective(&residue_form(t, q), k);
    let exponent = 2 * k as i64 * n - n * (n + 1) / 2;
    BigRational::new(count, pow(BigInt::from(q), exponent as usize))
}

/// The limit `α_q(H_k, T) = lim_ν` of [`local_density_hyperbolic`].
pub fn hyperbolic_density(t: &HalfIntegralForm, q: u64, k: u32) -> Result<BigRational> {
    check_request(t, q, k)?;
    hyperbolic_density_at(&superlattices(t, q)?, t.degree(), q, k)
}

/// Same as [`hyperbolic_density`] with the superlattice list precomputed.
pub fn hyperbolic_density_at(
    lattices: &[(u32, HalfIntegralForm)],
    n: usize,
    q: u64,
    k: u32,
) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for (e, f) in lattices {
        let scale_exp = (n as i64 + 1 - 2 * k as i64) * *e as i64;
        total += crate::poly::rat_pow(q as i64, scale_exp) * primitive_density(f, q, k);
    }
    Ok(total)
}
