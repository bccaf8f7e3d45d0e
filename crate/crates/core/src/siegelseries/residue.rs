//! Representation counts over `F_q` by `k` hyperbolic planes.
//!
//! For a quadratic form `W` on `F_q^m` (diagonal values `t_ii`, off-diagonal
//! bilinear values `g_ij`, possibly degenerate), the number of linear maps
//! `X: F_q^m → H^k` with Gram data `W` is
//!
//! ```text
//! A_k(W) = q^{-m(m+1)/2} Σ_{σ ∈ Sym_m(F_q)} e(-⟨σ, W⟩/q) q^{k(2m - rank σ)}
//! ```
//!
//! Scaling `σ` by a unit preserves its rank and scales the pairing, so the
//! character sum over rank-`r` matrices collapses to
//! `zero_r - (total_r - zero_r)/(q - 1)`, an integer.
//!
//! Injective maps are counted from `A_k` by Möbius inversion over the subspaces
//! of the totally singular radical of `W`.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{pow, Zero};
use parking_lot::Mutex;
use rayon::prelude::*;

/// A quadratic form on `F_q^m` given by `t_ii mod q` and `g_ij mod q` (`i < j`,
/// row-major).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueForm {
    pub q: u64,
    pub m: usize,
    pub diag: Vec<u64>,
    pub off: Vec<u64>,
}

impl ResidueForm {
    pub fn new(q: u64, m: usize, diag: Vec<i64>, off: Vec<i64>) -> Self {
        let r = |x: i64| x.rem_euclid(q as i64) as u64;
        ResidueForm {
            q,
            m,
            diag: diag.into_iter().map(r).collect(),
            off: off.into_iter().map(r).collect(),
        }
    }

    fn off_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        // row-major strict upper triangle
        i * self.m - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Bilinear value `B(e_i, e_j)` (`2 t_ii` on the diagonal).
    pub fn bilinear(&self, i: usize, j: usize) -> u64 {
        if i == j {
            2 * self.diag[i] % self.q
        } else {
            self.off[self.off_index(i, j)]
        }
    }

    fn quad_value(&self, x: &[u64]) -> u64 {
        let q = self.q;
        let mut acc = 0;
        for i in 0..self.m {
            acc = (acc + self.diag[i] * x[i] % q * x[i]) % q;
            for j in i + 1..self.m {
                acc = (acc + self.off[self.off_index(i, j)] * x[i] % q * x[j]) % q;
            }
        }
        acc
    }

    /// Restriction to the coordinate subspace spanned by `coords`.
    fn restrict(&self, coords: &[usize]) -> ResidueForm {
        let m = coords.len();
        let diag = coords.iter().map(|&i| self.diag[i]).collect();
        let mut off = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                off.push(self.bilinear(coords[a], coords[b]));
            }
        }
        ResidueForm {
            q: self.q,
            m,
            diag,
            off,
        }
    }

    fn in_singular_radical(&self, x: &[u64]) -> bool {
        let q = self.q;
        (0..self.m).all(|j| (0..self.m).map(|i| x[i] * self.bilinear(i, j)).sum::<u64>() % q == 0)
            && self.quad_value(x) == 0
    }
}

fn rank_mod(mut a: [[u64; 3]; 3], m: usize, q: u64) -> usize {
    let mut rank = 0;
    for c in 0..m {
        let Some(p) = (rank..m).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let inv = crate::exactnt::pow_mod(a[rank][c], q - 2, q);
        for i in rank + 1..m {
            if a[i][c] != 0 {
                let f = a[i][c] * inv % q;
                for j in c..m {
                    a[i][j] = (a[i][j] + (q - f) * a[rank][j]) % q;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// For odd `q`, a representative `⟨1, …, 1, δ, 0, …, 0⟩` of the isometry
/// class of `w` (rank and square class of the nondegenerate part determine
/// it). Even `q` is returned unchanged.
fn isometry_representative(w: &ResidueForm) -> ResidueForm {
    let q = w.q;
    if q == 2 {
        return w.clone();
    }
    let m = w.m;
    let mut b = [[0u64; 3]; 3];
    for i in 0..m {
        for j in 0..m {
            b[i][j] = w.bilinear(i, j);
        }
    }
    let mut pivots = Vec::new();
    let mut active: Vec<usize> = (0..m).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| b[i][i] != 0);
        let i = match pivot {
            Some(i) => i,
            None => {
                let Some((i, j)) = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && b[i][j] != 0)
                else {
                    break;
                };
                // e_i ← e_i + e_j makes B(e_i, e_i) = 2 B(e_i, e_j) ≠ 0
                for k in 0..m {
                    b[i][k] = (b[i][k] + b[j][k]) % q;
                }
                for k in 0..m {
                    b[k][i] = (b[k][i] + b[k][j]) % q;
                }
                i
            }
        };
        let d = b[i][i];
        let inv = crate::exactnt::pow_mod(d, q - 2, q);
        pivots.push(d);
        active.retain(|&x| x != i);
        for &r in &active {
            let f = b[r][i] * inv % q;
            for k in 0..m {
                b[r][k] = (b[r][k] + (q - f) * b[i][k]) % q;
            }
            for k in 0..m {
                b[k][r] = (b[k][r] + (q - f) * b[k][i]) % q;
            }
        }
    }
    let delta = pivots.iter().fold(1u64, |acc, &d| acc * d % q);
    let square = crate::exactnt::pow_mod(delta, (q - 1) / 2, q) == 1;
    let nonresidue = (2..q)
        .find(|&x| crate::exactnt::pow_mod(x, (q - 1) / 2, q) != 1)
        .expect("odd prime has a nonresidue");
    let inv2 = (q + 1) / 2;
    let rank = pivots.len();
    let mut diag = vec![0u64; m];
    for (i, d) in diag.iter_mut().enumerate().take(rank) {
        let b_ii = if i + 1 == rank && !square { nonresidue } else { 1 };
        *d = b_ii * inv2 % q;
    }
    ResidueForm { q, m, diag, off: vec![0; m * m.saturating_sub(1) / 2] }
}

/// `S_r = Σ_{rank σ = r} e(-⟨σ, W⟩/q)` for `r = 0..=m`.
fn rank_character_sums(w: &ResidueForm) -> Vec<i128> {
    static MEMO: OnceLock<Mutex<HashMap<ResidueForm, Vec<i128>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    let w = &isometry_representative(w);
    if let Some(v) = memo.lock().get(w) {
        return v.clone();
    }
    let sums = enumerate_character_sums(w);
    memo.lock().insert(w.clone(), sums.clone());
    sums
}

fn enumerate_character_sums(w: &ResidueForm) -> Vec<i128> {
    let q = w.q;
    let m = w.m;
    let free = m * (m + 1) / 2;
    assert!(m <= 3, "residue forms of dimension > 3 are unsupported");
    if m == 0 {
        return vec![1];
    }
    // counts[r] = (total, pairing zero)
    let counts = (0..q)
        .into_par_iter()
        .map(|first| {
            let mut counts = vec![(0i128, 0i128); m + 1];
            let rest = pow(q, free - 1);
            let mut entries = vec![0u64; free];
            entries[0] = first;
            for idx in 0..rest {
                let mut x = idx;
                for e in entries.iter_mut().skip(1) {
                    *e = x % q;
                    x /= q;
                }
                // entries: σ_11..σ_mm then σ_ij (i<j)
                let mut mat = [[0u64; 3]; 3];
                let mut pairing = 0;
                for i in 0..m {
                    mat[i][i] = entries[i];
                    pairing += entries[i] * w.diag[i];
                }
                let mut k = m;
                for i in 0..m {
                    for j in i + 1..m {
                        mat[i][j] = entries[k];
                        mat[j][i] = entries[k];
                        pairing += entries[k] * w.off[k - m];
                        k += 1;
                    }
                }
                let r = rank_mod(mat, m, q);
                counts[r].0 += 1;
                if pairing % q == 0 {
                    counts[r].1 += 1;
                }
            }
            counts
        })
        .reduce(
            || vec![(0, 0); m + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    x.0 += y.0;
                    x.1 += y.1;
                }
                a
            },
        );
    let sums: Vec<i128> = counts
        .iter()
        .map(|&(total, zero)| {
            let nonzero = total - zero;
            debug_assert_eq!(nonzero % (q as i128 - 1), 0);
            zero - nonzero / (q as i128 - 1)
        })
        .collect();
    sums
}

/// Number of linear maps `F_q^m → H^k(F_q)` with Gram data `w`.
pub fn count_maps(w: &ResidueForm, k: u32) -> BigInt {
    let q = BigInt::from(w.q);
    let m = w.m as u32;
    let sums = rank_character_sums(w);
    let mut acc = BigInt::zero();
    for (r, s) in sums.iter().enumerate() {
        acc += BigInt::from(*s) * pow(q.clone(), (k * (2 * m - r as u32)) as usize);
    }
    let scale = pow(q, (m * (m + 1) / 2) as usize);
    debug_assert!((&acc % &scale).is_zero());
    acc / scale
}

/// Reduced row echelon bases of every subspace of `F_q^m`, with their pivot
/// columns.
fn subspaces(q: u64, m: usize) -> Vec<(Vec<Vec<u64>>, Vec<usize>)> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << m) {
        let pivots: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
        // free positions: (row r, column c) with c > pivot[r] and c not a pivot
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| {
                let pivots = &pivots;
                (p + 1..m)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let combos = pow(q, free.len());
        for idx in 0..combos {
            let mut basis = vec![vec![0u64; m]; pivots.len()];
            for (r, &p) in pivots.iter().enumerate() {
                basis[r][p] = 1;
            }
            let mut x = idx;
            for &(r, c) in &free {
                basis[r][c] = x % q;
                x /= q;
            }
            out.push((basis, pivots.clone()));
        }
    }
    out
}

/// Number of injective linear maps `F_q^m → H^k(F_q)` with Gram data `w`.
pub fn count_injective(w: &ResidueForm, k: u32) -> BigInt {
    let q = w.q;
    let mut acc = BigInt::zero();
    for (basis, pivots) in subspaces(q, w.m) {
        if !basis.iter().all(|v| w.in_singular_radical(v)) {
            continue;
        }
        let d = pivots.len();
        let complement: Vec<usize> = (0..w.m).filter(|c| !pivots.contains(c)).collect();
        let term = count_maps(&w.restrict(&complement), k)
            * pow(BigInt::from(q), d * d.saturating_sub(1) / 2);
        if d % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct enumeration of `X ∈ M_{2k,m}(F_q)` for tiny cases.
    fn brute(w: &ResidueForm, k: usize, injective: bool) -> i64 {
        let q = w.q;
        let m = w.m;
        let vars = 2 * k * m;
        let mut count = 0;
        for idx in 0..pow(q, vars) {
            let mut x = idx;
            // columns X_i = (x-part, y-part) ∈ F_q^{2k}
            let mut cols = vec![vec![0u64; 2 * k]; m];
            for col in cols.iter_mut() {
                for e in col.iter_mut() {
                    *e = x % q;
                    x /= q;
                }
            }
            let qf = |a: &[u64]| (0..k).map(|l| a[l] * a[k + l]).sum::<u64>() % q;
            let bf = |a: &[u64], b: &[u64]| {
                (0..k).map(|l| a[l] * b[k + l] + a[k + l] * b[l]).sum::<u64>() % q
            };
            let ok = (0..m).all(|i| qf(&cols[i]) == w.diag[i])
                && (0..m).all(|i| (i + 1..m).all(|j| bf(&cols[i], &cols[j]) == w.bilinear(i, j)));
            if !ok {
                continue;
            }
            if injective {
                // rank of the 2k × m matrix
                let mut rows: Vec<Vec<u64>> = (0..2 * k).map(|r| (0..m).map(|c| cols[c][r]).collect()).collect();
                let mut rank = 0;
                for c in 0..m {
                    if let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] != 0) {
                        rows.swap(rank, p);
                        let inv = crate::exactnt::pow_mod(rows[rank][c], q - 2, q);
                        for i in 0..rows.len() {
                            if i != rank && rows[i][c] != 0 {
                                let f = rows[i][c] * inv % q;
                                for j in 0..m {
                                    rows[i][j] = (rows[i][j] + (q - f) * rows[rank][j]) % q;
                                }
                            }
                        }
                        rank += 1;
                    }
                }
                if rank < m {
                    continue;
                }
            }
            count += 1;
        }
        count
    }

    #[test]
    fn counts_match_enumeration() {
        let cases = [
            ResidueForm::new(2, 1, vec![1], vec![]),
            ResidueForm::new(2, 1, vec![0], vec![]),
            ResidueForm::new(3, 1, vec![0], vec![]),
            ResidueForm::new(3, 1, vec![2], vec![]),
            ResidueForm::new(2, 2, vec![1, 1], vec![1]),
            ResidueForm::new(2, 2, vec![0, 0], vec![0]),
            ResidueForm::new(2, 2, vec![1, 0], vec![0]),
            ResidueForm::new(3, 2, vec![1, 0], vec![0]),
            ResidueForm::new(3, 2, vec![0, 0], vec![0]),
        ];
        for w in &cases {
            for k in 1..=2usize {
                if pow(w.q, 2 * k * w.m) > 600_000 {
                    continue;
                }
                assert_eq!(count_maps(w, k as u32), BigInt::from(brute(w, k, false)), "{w:?} k={k}");
                assert_eq!(count_injective(w, k as u32), BigInt::from(brute(w, k, true)), "{w:?} k={k}");
            }
        }
    }

    #[test]
    fn character_sums_depend_only_on_isometry_class() {
        let mut rng = 0x9e3779b97f4a7c15u64;
        let mut next = |bound: u64| {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            (rng % bound) as i64
        };
        for q in [3u64, 5] {
            for m in 1..=3usize {
                for _ in 0..6 {
                    let diag = (0..m).map(|_| next(q)).collect();
                    let off = (0..m * (m - 1) / 2).map(|_| next(q)).collect();
                    let w = ResidueForm::new(q, m, diag, off);
                    assert_eq!(
                        enumerate_character_sums(&w),
                        enumerate_character_sums(&isometry_representative(&w)),
                        "{w:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn isotropic_vector_count() {
        // vectors with Q = 0 in H^k over F_q: q^{2k-1} + q^k - q^{k-1}
        for q in [2u64, 3, 5, 7] {
            for k in 1..5u32 {
                let w = ResidueForm::new(q, 1, vec![0], vec![]);
                let expected = BigInt::from(q).pow(2 * k - 1) + BigInt::from(q).pow(k)
                    - BigInt::from(q).pow(k - 1);
                assert_eq!(count_maps(&w, k), expected);
            }
        }
    }

    #[test]
    fn subspace_count() {
        // 1 + (q²+q+1) + (q²+q+1) + 1 subspaces of F_q^3
        for q in [2u64, 3, 5] {
            assert_eq!(subspaces(q, 3).len() as u64, 2 * (q * q + q + 1) + 2);
        }
    }
}
