//! Half-integral symmetric matrices and their arithmetic invariants.
//!
//! A form `T ∈ Λ_n` is stored as its doubled matrix `G = 2T`, an integral
//! symmetric matrix with even diagonal. Everything that needs `T` itself
//! converts explicitly.

mod enumerate;
mod hilbert;

pub use enumerate::enumerate_reduced;
pub use hilbert::{eta, hasse_invariant, hasse_invariant_with, hilbert_symbol, HasseConvention, PlaceTag};

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnt::{self, QuadCharacter};

/// `T ∈ Λ_n` in doubled representation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfIntegralForm {
    n: usize,
    /// Row-major `n × n` doubled matrix `G = 2T`.
    doubled: Vec<i64>,
}

impl HalfIntegralForm {
    /// Builds a form from the rows of its doubled matrix.
    pub fn from_doubled_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut doubled = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::InvalidArgument("doubled matrix is not square".into()));
            }
            doubled.extend_from_slice(row);
        }
        Self::from_doubled(n, doubled)
    }

    pub fn from_doubled(n: usize, doubled: Vec<i64>) -> Result<Self> {
        if doubled.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for degree {n}, got {}",
                n * n,
                doubled.len()
            )));
        }
        for i in 0..n {
            if doubled[i * n + i] % 2 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "diagonal entry {} of the doubled matrix is odd",
                    doubled[i * n + i]
                )));
            }
            for j in 0..i {
                if doubled[i * n + j] != doubled[j * n + i] {
                    return Err(Error::InvalidArgument("doubled matrix is not symmetric".into()));
                }
            }
        }
        Ok(HalfIntegralForm { n, doubled })
    }

    /// The unary form `(t)`.
    pub fn unary(t: i64) -> Self {
        HalfIntegralForm {
            n: 1,
            doubled: vec![2 * t],
        }
    }

    pub fn zero(n: usize) -> Self {
        HalfIntegralForm {
            n,
            doubled: vec![0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut doubled = vec![0; n * n];
        for i in 0..n {
            doubled[i * n + i] = 2;
        }
        HalfIntegralForm { n, doubled }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)` of `G = 2T`.
    pub fn g(&self, i: usize, j: usize) -> i64 {
        self.doubled[i * self.n + j]
    }

    /// Diagonal entry `t_ii` of `T`.
    pub fn t_diag(&self, i: usize) -> i64 {
        self.g(i, i) / 2
    }

    pub fn doubled(&self) -> &[i64] {
        &self.doubled
    }

    pub fn doubled_rows(&self) -> Vec<Vec<i64>> {
        self.doubled.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.doubled.iter().all(|&x| x == 0)
    }

    /// `det(2T)` as an exact integer.
    pub fn det_doubled(&self) -> BigInt {
        let rows: Vec<Vec<BigInt>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| BigInt::from(self.g(i, j))).collect())
            .collect();
        bareiss_det(rows)
    }

    /// `det(T) = det(2T) / 2^n`.
    pub fn det_t(&self) -> BigRational {
        BigRational::new(self.det_doubled(), BigInt::one() << self.n)
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<BigRational>> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| BigRational::from_integer(self.g(i, j).into()))
                    .collect()
            })
            .collect();
        rational_rank(&mut rows)
    }

    fn require_nondegenerate(&self) -> Result<BigInt> {
        let d = self.det_doubled();
        if d.is_zero() {
            return Err(Error::Degenerate(format!("det(2T) = 0 for {self}")));
        }
        Ok(d)
    }

    /// `D(T) = 2^{2[n/2]} det(T)`.
    pub fn d_of(&self) -> Result<i128> {
        let d = self.require_nondegenerate()?;
        let value = if self.n % 2 == 0 {
            d
        } else {
            if (&d % 2u32) != BigInt::zero() {
                return Err(Error::Consistency(format!("D(T) not integral for {self}")));
            }
            d / 2
        };
        value
            .to_i128()
            .ok_or_else(|| Error::Unsupported("D(T) exceeds 128 bits".into()))
    }

    /// The character `χ_T` of `K_T = Q(√((-1)^{n/2} det(2T)))`; `n` even.
    pub fn chi_t(&self) -> Result<QuadCharacter> {
        if self.n % 2 != 0 {
            return Err(Error::InvalidArgument("χ_T needs even degree".into()));
        }
        let d = self.require_nondegenerate()?;
        let signed = if (self.n / 2) % 2 == 1 { -d } else { d };
        let signed = signed
            .to_i64()
            .ok_or_else(|| Error::Unsupported("discriminant exceeds 64 bits".into()))?;
        QuadCharacter::of_field(signed)
    }

    /// `C(T) = D(T)/𝔡_T` for even `n`, `D(T)` for odd `n`.
    pub fn c_of(&self) -> Result<i128> {
        let d = self.d_of()?;
        if self.n % 2 == 1 {
            return Ok(d);
        }
        let disc = self.chi_t()?.conductor() as i128;
        if d % disc != 0 {
            return Err(Error::Consistency(format!(
                "D(T) = {d} not divisible by |d_T| = {disc}"
            )));
        }
        Ok((d / disc).abs())
    }

    /// True iff every leading principal minor of `G` is positive.
    pub fn is_positive_definite(&self) -> bool {
        (1..=self.n).all(|m| {
            let rows: Vec<Vec<BigInt>> = (0..m)
                .map(|i| (0..m).map(|j| BigInt::from(self.g(i, j))).collect())
                .collect();
            bareiss_det(rows).is_positive()
        })
    }

    /// Squarefree integers `a_i` with `T ≅ Σ a_i x_i²` over `Q`.
    pub fn rational_diagonalization(&self) -> Result<Vec<i64>> {
        let n = self.n;
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| BigRational::from_integer(self.g(i, j).into()) * &half)
                    .collect()
            })
            .collect();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if a[i][i].is_zero() {
                if let Some(j) = (i + 1..n).find(|&j| !a[j][j].is_zero()) {
                    a.swap(i, j);
                    for row in a.iter_mut() {
                        row.swap(i, j);
                    }
                } else if let Some(j) = (i + 1..n).find(|&j| !a[i][j].is_zero()) {
                    // e_i <- e_i + e_j
                    for c in 0..n {
                        let v = a[j][c].clone();
                        a[i][c] += v;
                    }
                    for row in a.iter_mut() {
                        let v = row[j].clone();
                        row[i] += v;
                    }
                } else {
                    return Err(Error::Degenerate(format!("{self} has a null direction")));
                }
            }
            let pivot = a[i][i].clone();
            for j in i + 1..n {
                if a[j][i].is_zero() {
                    continue;
                }
                let f = &a[j][i] / &pivot;
                for c in 0..n {
                    let v = &f * &a[i][c];
                    a[j][c] -= v;
                }
                for row in a.iter_mut() {
                    let v = &f * &row[i];
                    row[j] -= v;
                }
            }
            out.push(exactnt::squarefree_part_rat(&pivot) as i64);
        }
        Ok(out)
    }

    /// `T[U] = Uᵗ T U` for an integral `n × n` matrix `U` (row-major).
    pub fn transform(&self, u: &[i64]) -> HalfIntegralForm {
        let n = self.n;
        let mut gu = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                gu[i * n + j] = (0..n).map(|k| self.g(i, k) * u[k * n + j]).sum();
            }
        }
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| u[k * n + i] * gu[k * n + j]).sum();
            }
        }
        HalfIntegralForm { n, doubled: out }
    }

    /// Serializes as `n`, the diagonal of `G`, then the strict upper triangle
    /// of `G` row by row.
    pub fn to_text(&self) -> String {
        let mut parts = vec![self.n.to_string()];
        for i in 0..self.n {
            parts.push(self.g(i, i).to_string());
        }
        for i in 0..self.n {
            for j in i + 1..self.n {
                parts.push(self.g(i, j).to_string());
            }
        }
        parts.join(" ")
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let nums: Vec<i64> = s
            .split_whitespace()
            .map(|w| w.parse::<i64>().map_err(|e| Error::Parse(format!("{w:?}: {e}"))))
            .collect::<Result<_>>()?;
        let (&n, rest) = nums
            .split_first()
            .ok_or_else(|| Error::Parse("empty form".into()))?;
        if n < 0 {
            return Err(Error::Parse("negative degree".into()));
        }
        let n = n as usize;
        if rest.len() != n * (n + 1) / 2 {
            return Err(Error::Parse(format!(
                "degree {n} needs {} entries, got {}",
                n * (n + 1) / 2,
                rest.len()
            )));
        }
        let mut doubled = vec![0; n * n];
        for i in 0..n {
            doubled[i * n + i] = rest[i];
        }
        let mut k = n;
        for i in 0..n {
            for j in i + 1..n {
                doubled[i * n + j] = rest[k];
                doubled[j * n + i] = rest[k];
                k += 1;
            }
        }
        Self::from_doubled(n, doubled)
    }
}

impl fmt::Display for HalfIntegralForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G=[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.g(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Fraction-free Gaussian elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

fn rational_rank(rows: &mut [Vec<BigRational>]) -> usize {
    let n = rows.len();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..n).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        for i in 0..n {
            if i != rank && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[rank][c];
                for j in c..cols {
                    let v = &f * &rows[rank][j];
                    rows[i][j] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Block-diagonal sum `T1 ⊥ T2`.
pub fn direct_sum(a: &HalfIntegralForm, b: &HalfIntegralForm) -> HalfIntegralForm {
    let n = a.n + b.n;
    let mut doubled = vec![0; n * n];
    for i in 0..a.n {
        for j in 0..a.n {
            doubled[i * n + j] = a.g(i, j);
        }
    }
    for i in 0..b.n {
        for j in 0..b.n {
            doubled[(a.n + i) * n + a.n + j] = b.g(i, j);
        }
    }
    HalfIntegralForm { n, doubled }
}

/// `½U` for `U` the `E₈` root lattice Gram matrix (even unimodular, rank 8).
pub fn gram_e8() -> HalfIntegralForm {
    // Dynkin diagram: chain 0-1-2-3-4-5-6 with node 7 attached to node 4.
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)];
    let mut doubled = vec![0; 64];
    for i in 0..8 {
        doubled[i * 8 + i] = 2;
    }
    for (a, b) in edges {
        doubled[a * 8 + b] = -1;
        doubled[b * 8 + a] = -1;
    }
    HalfIntegralForm { n: 8, doubled }
}

/// Result of splitting a positive semidefinite form as `T[U] = T1 ⊥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegenerateSplit {
    pub t1: HalfIntegralForm,
    pub rank: usize,
    /// Row-major unimodular `U` with `T[U] = T1 ⊥ 0_{n-r}`.
    pub u: Vec<i64>,
}

/// Splits off the radical of a positive semidefinite form.
///
/// Column-reduces `G` by unimodular operations to `G·U = [H | 0]`; the last
/// `n - r` columns of `U` then form a basis of the (saturated) integral kernel.
pub fn split_degenerate(t: &HalfIntegralForm) -> Result<DegenerateSplit> {
    let n = t.n;
    let mut m: Vec<i128> = t.doubled.iter().map(|&x| x as i128).collect();
    let mut u: Vec<i128> = vec![0; n * n];
    for i in 0..n {
        u[i * n + i] = 1;
    }
    let col_op = |mat: &mut Vec<i128>, rows: usize, a: usize, b: usize, x: [i128; 4]| {
        // (col_a, col_b) <- (x0·col_a + x1·col_b, x2·col_a + x3·col_b)
        for r in 0..rows {
            let ca = mat[r * n + a];
            let cb = mat[r * n + b];
            mat[r * n + a] = x[0] * ca + x[1] * cb;
            mat[r * n + b] = x[2] * ca + x[3] * cb;
        }
    };
    let mut pivot_col = 0;
    for row in 0..n {
        if pivot_col == n {
            break;
        }
        for c in pivot_col + 1..n {
            let a = m[row * n + pivot_col];
            let b = m[row * n + c];
            if b == 0 {
                continue;
            }
            let (g, x, y) = ext_gcd(a, b);
            let ops = [x, y, -b / g, a / g];
            col_op(&mut m, n, pivot_col, c, ops);
            col_op(&mut u, n, pivot_col, c, ops);
        }
        if m[row * n + pivot_col] != 0 {
            pivot_col += 1;
        }
    }
    let r = pivot_col;
    let u64s: Vec<i64> = u
        .iter()
        .map(|&x| i64::try_from(x).map_err(|_| Error::Unsupported("basis change overflow".into())))
        .collect::<Result<_>>()?;
    let transformed = t.transform(&u64s);
    for i in 0..n {
        for j in 0..n {
            if (i >= r || j >= r) && transformed.g(i, j) != 0 {
                return Err(Error::InvalidArgument(format!(
                    "{t} is not positive semidefinite"
                )));
            }
        }
    }
    let mut doubled = Vec::with_capacity(r * r);
    for i in 0..r {
        for j in 0..r {
            doubled.push(transformed.g(i, j));
        }
    }
    let t1 = HalfIntegralForm { n: r, doubled };
    if !t1.is_positive_definite() {
        return Err(Error::InvalidArgument(format!(
            "{t} is not positive semidefinite"
        )));
    }
    Ok(DegenerateSplit { t1, rank: r, u: u64s })
}

/// Extended gcd with `g > 0` whenever `(a, b) ≠ (0, 0)`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(rows: &[&[i64]]) -> HalfIntegralForm {
        HalfIntegralForm::from_doubled_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(HalfIntegralForm::from_doubled_rows(&[vec![1, 0], vec![0, 2]]).is_err());
        assert!(HalfIntegralForm::from_doubled_rows(&[vec![2, 1], vec![0, 2]]).is_err());
        assert!(HalfIntegralForm::from_doubled_rows(&[vec![2, 1]]).is_err());
    }

    #[test]
    fn determinants() {
        assert_eq!(HalfIntegralForm::identity(3).det_t(), rat(1, 1));
        let t = form(&[&[2, 1, 1], &[1, 2, 0], &[1, 0, 2]]);
        assert_eq!(t.det_t(), rat(1, 2));
        assert_eq!(form(&[&[2, 1], &[1, 12]]).det_t(), rat(23, 4));
    }

    #[test]
    fn d_and_c() {
        let t = form(&[&[2, 1, 1], &[1, 2, 0], &[1, 0, 2]]);
        assert_eq!(t.d_of().unwrap(), 2);
        assert_eq!(t.c_of().unwrap(), 2);
        let i2 = HalfIntegralForm::identity(2);
        assert_eq!(i2.d_of().unwrap(), 4);
        assert_eq!(i2.c_of().unwrap(), 1);
        assert_eq!(HalfIntegralForm::unary(7).d_of().unwrap(), 7);
        assert!(HalfIntegralForm::zero(2).d_of().is_err());
        // D = 48 = 3 · 4², K_T = Q(√-3)
        let t = form(&[&[2, 0], &[0, 24]]);
        assert_eq!(t.d_of().unwrap(), 48);
        assert_eq!(t.c_of().unwrap(), 16);
    }

    #[test]
    fn characters() {
        assert_eq!(form(&[&[2, 1], &[1, 12]]).chi_t().unwrap().discriminant(), -23);
        assert_eq!(HalfIntegralForm::identity(2).chi_t().unwrap().discriminant(), -4);
        assert_eq!(form(&[&[2, 0], &[0, -2]]).chi_t().unwrap().discriminant(), 1);
        assert!(HalfIntegralForm::identity(3).chi_t().is_err());
    }

    #[test]
    fn positivity() {
        assert!(HalfIntegralForm::identity(3).is_positive_definite());
        assert!(!form(&[&[2, 1], &[1, 0]]).is_positive_definite());
        assert!(form(&[&[14, -2, -4], &[-2, 2, 3], &[-4, 3, 6]]).is_positive_definite());
    }

    #[test]
    fn diagonalization() {
        assert_eq!(
            HalfIntegralForm::identity(3).rational_diagonalization().unwrap(),
            vec![1, 1, 1]
        );
        assert_eq!(
            form(&[&[0, 1], &[1, 0]]).rational_diagonalization().unwrap(),
            vec![1, -1]
        );
        assert_eq!(
            form(&[&[2, 1], &[1, 2]]).rational_diagonalization().unwrap(),
            vec![1, 3]
        );
        assert!(form(&[&[2, 2], &[2, 2]]).rational_diagonalization().is_err());
    }

    #[test]
    fn text_roundtrip() {
        let t = form(&[&[14, -2, -4], &[-2, 2, 3], &[-4, 3, 6]]);
        assert_eq!(t.to_text(), "3 14 2 6 -2 -4 3");
        assert_eq!(HalfIntegralForm::from_text(&t.to_text()).unwrap(), t);
        assert!(HalfIntegralForm::from_text("2 2 2").is_err());
        assert!(HalfIntegralForm::from_text("2 2 x 1").is_err());
        assert!(HalfIntegralForm::from_text("1 3").is_err());
    }

    #[test]
    fn e8_and_sums() {
        let e8 = gram_e8();
        assert_eq!(e8.det_doubled(), BigInt::one());
        assert!(e8.is_positive_definite());
        let t = form(&[&[2, 1, 1], &[1, 2, 0], &[1, 0, 2]]);
        assert_eq!(direct_sum(&t, &HalfIntegralForm::zero(0)), t);
        let padded = direct_sum(&t, &e8);
        assert_eq!(padded.degree(), 11);
        assert_eq!(padded.d_of().unwrap(), t.d_of().unwrap());
    }

    #[test]
    fn splitting() {
        let s = split_degenerate(&form(&[&[2, 2], &[2, 2]])).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.t1, HalfIntegralForm::unary(1));

        let z = split_degenerate(&HalfIntegralForm::zero(3)).unwrap();
        assert_eq!(z.rank, 0);

        let t = form(&[&[2, 1], &[1, 12]]);
        let padded = direct_sum(&t, &HalfIntegralForm::zero(1));
        let s = split_degenerate(&padded).unwrap();
        assert_eq!(s.rank, 2);
        assert_eq!(s.t1.det_doubled(), t.det_doubled());

        assert!(split_degenerate(&form(&[&[2, 3], &[3, 2]])).is_err());
        assert!(split_degenerate(&form(&[&[-2, 0], &[0, 0]])).is_err());
    }
}
