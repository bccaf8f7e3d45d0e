//! Hilbert symbols, Hasse invariants and the sign `η_q(T)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::HalfIntegralForm;
use crate::error::{Error, Result};
use crate::exactnt::{self, jacobi};

/// A place of `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlaceTag {
    Finite(u64),
    Infinity,
}

impl PlaceTag {
    pub fn prime(q: u64) -> Result<Self> {
        if !exactnt::is_prime(q) {
            return Err(Error::InvalidArgument(format!("{q} is not prime")));
        }
        Ok(PlaceTag::Finite(q))
    }
}

impl fmt::Display for PlaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceTag::Finite(q) => write!(f, "{q}"),
            PlaceTag::Infinity => write!(f, "inf"),
        }
    }
}

fn split_power(mut a: i64, p: i64) -> (u32, i64) {
    let mut e = 0;
    while a % p == 0 {
        a /= p;
        e += 1;
    }
    (e, a)
}

/// Hilbert symbol `(a, b)_v` for nonzero integers.
pub fn hilbert_symbol(a: i64, b: i64, v: PlaceTag) -> i32 {
    assert!(a != 0 && b != 0, "Hilbert symbol of zero");
    match v {
        PlaceTag::Infinity => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        PlaceTag::Finite(2) => {
            let (alpha, u) = split_power(a, 2);
            let (beta, w) = split_power(b, 2);
            let eps = |x: i64| ((x.rem_euclid(8) - 1) / 2) % 2;
            let omega = |x: i64| {
                let r = x.rem_euclid(8);
                if r == 3 || r == 5 {
                    1
                } else {
                    0
                }
            };
            let e = eps(u) * eps(w) + alpha as i64 * omega(w) + beta as i64 * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        PlaceTag::Finite(p) => {
            let pi = p as i64;
            let (alpha, u) = split_power(a, pi);
            let (beta, w) = split_power(b, pi);
            let mut s = 1;
            if (alpha * beta) % 2 == 1 && (pi - 1) / 2 % 2 == 1 {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= jacobi(u, pi);
            }
            if alpha % 2 == 1 {
                s *= jacobi(w, pi);
            }
            s
        }
    }
}

/// Which pairs enter the Hasse invariant of a diagonal form `⟨a_1, …, a_n⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HasseConvention {
    /// `∏_{i<j} (a_i, a_j)`
    StrictUpper,
    /// `∏_{i≤j} (a_i, a_j)`
    WithDiagonal,
}

/// Convention used by [`hasse_invariant`] and [`eta`]. With the strict
/// product the sign of the functional equation of `F_q` comes out wrong for
/// about half of the small ternary forms; the sign-linkage tests freeze this
/// choice.
pub const HASSE_CONVENTION: HasseConvention = HasseConvention::WithDiagonal;

pub fn hasse_invariant(t: &HalfIntegralForm, v: PlaceTag) -> Result<i32> {
    hasse_invariant_with(t, v, HASSE_CONVENTION)
}

pub fn hasse_invariant_with(
    t: &HalfIntegralForm,
    v: PlaceTag,
    convention: HasseConvention,
) -> Result<i32> {
    let a = t.rational_diagonalization()?;
    let mut h = 1;
    for i in 0..a.len() {
        let start = match convention {
            HasseConvention::StrictUpper => i + 1,
            HasseConvention::WithDiagonal => i,
        };
        for j in start..a.len() {
            h *= hilbert_symbol(a[i], a[j], v);
        }
    }
    Ok(h)
}

/// `η_v(T) = h_v(T) (d, (-1)^{(n-1)/2} d)_v (-1,-1)_v^{(n²-1)/8}` for odd `n`,
/// with `d` the squarefree representative of `det(T)`.
pub fn eta(t: &HalfIntegralForm, v: PlaceTag) -> Result<i32> {
    let n = t.degree();
    if n % 2 == 0 {
        return Err(Error::InvalidArgument("η is defined for odd degree".into()));
    }
    let det = t.det_t();
    if num_traits::Zero::is_zero(&det) {
        return Err(Error::Degenerate(format!("det(T) = 0 for {t}")));
    }
    let d = exactnt::squarefree_part_rat(&det) as i64;
    let h = hasse_invariant(t, v)?;
    let sign_d = if ((n - 1) / 2) % 2 == 1 { -d } else { d };
    let mut e = h * hilbert_symbol(d, sign_d, v);
    if ((n * n - 1) / 8) % 2 == 1 {
        e *= hilbert_symbol(-1, -1, v);
    }
    Ok(e)
}
