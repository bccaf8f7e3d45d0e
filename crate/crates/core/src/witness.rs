//! Ternary forms with `D(T) = p` for every prime `p`, and padding to degree
//! `8s + 3` by `E_8` blocks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnt::{is_prime, jacobi, sqrt_mod};
use crate::quadform::{direct_sum, gram_e8, HalfIntegralForm};

/// Search cap for the auxiliary prime in the `p ≡ 1 (mod 8)` branch.
pub const AUX_PRIME_CAP: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WitnessBranch {
    #[serde(rename = "p=2")]
    Two,
    #[serde(rename = "p≡3 mod 4")]
    ThreeMod4,
    #[serde(rename = "p≡5 mod 8")]
    FiveMod8,
    #[serde(rename = "p≡1 mod 8")]
    OneMod8,
}

impl WitnessBranch {
    pub fn of(p: u64) -> Self {
        match p {
            2 => WitnessBranch::Two,
            _ if p % 4 == 3 => WitnessBranch::ThreeMod4,
            _ if p % 8 == 5 => WitnessBranch::FiveMod8,
            _ => WitnessBranch::OneMod8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub p: u64,
    pub branch: WitnessBranch,
    /// `(q, a)` of the `p ≡ 1 (mod 8)` construction.
    pub auxiliary: Option<(u64, i64)>,
    pub form: HalfIntegralForm,
}

impl WitnessRecord {
    /// Rechecks positivity, `D = p` and the auxiliary side conditions.
    pub fn verify(&self) -> bool {
        if !self.form.is_positive_definite() || self.form.d_of().ok() != Some(self.p as i128) {
            return false;
        }
        match (self.branch, self.auxiliary) {
            (WitnessBranch::OneMod8, Some((q, a))) => aux_conditions(self.p, q) && (a * a + self.p as i64) % q as i64 == 0,
            (WitnessBranch::OneMod8, None) => false,
            (_, aux) => aux.is_none(),
        }
    }
}

fn aux_conditions(p: u64, q: u64) -> bool {
    is_prime(q) && q % 4 == 3 && jacobi(p as i64, q as i64) == -1 && jacobi(q as i64, p as i64) == -1
}

fn rows(g: [[i64; 3]; 3]) -> Result<HalfIntegralForm> {
    HalfIntegralForm::from_doubled_rows(&g.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

pub fn ternary_witness(p: u64) -> Result<WitnessRecord> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let branch = WitnessBranch::of(p);
    let pi = p as i64;
    let (form, auxiliary) = match branch {
        WitnessBranch::Two => (rows([[2, 1, 1], [1, 2, 0], [1, 0, 2]])?, None),
        WitnessBranch::ThreeMod4 => (rows([[2, 0, 0], [0, 2, 1], [0, 1, (pi + 1) / 2]])?, None),
        WitnessBranch::FiveMod8 => (rows([[2, 0, 1], [0, 4, 1], [1, 1, (pi + 3) / 4]])?, None),
        WitnessBranch::OneMod8 => {
            let q = (3..AUX_PRIME_CAP)
                .step_by(4)
                .find(|&q| aux_conditions(p, q))
                .ok_or_else(|| {
                    Error::Consistency(format!("no auxiliary prime below {AUX_PRIME_CAP} for p = {p}"))
                })?;
            let a = sqrt_mod(-pi, q).ok_or_else(|| {
                Error::Consistency(format!("-{p} is not a square mod {q}"))
            })? as i64;
            let qi = q as i64;
            let top = a * a * qi + a * a + pi;
            if top % qi != 0 || (qi * (qi + 1)) % 2 != 0 {
                return Err(Error::Consistency(format!("non-integral doubled entry for p = {p}, q = {q}")));
            }
            let g = [
                [2 * top / qi, -2 * a, -a * (qi + 1)],
                [-2 * a, 2, qi],
                [-a * (qi + 1), qi, qi * (qi + 1) / 2],
            ];
            (rows(g)?, Some((q, a)))
        }
    };
    let rec = WitnessRecord { p, branch, auxiliary, form };
    if !rec.verify() {
        return Err(Error::Consistency(format!("witness for p = {p} failed its checks: {}", rec.form)));
    }
    Ok(rec)
}

/// `T1 ⊥ E_8 ⊥ … ⊥ E_8` of degree `n = 8s + 3`.
pub fn pad_witness(t1: &HalfIntegralForm, n: usize) -> Result<HalfIntegralForm> {
    if t1.degree() != 3 || n < 3 || (n - 3) % 8 != 0 {
        return Err(Error::InvalidArgument(format!(
            "padding needs a ternary form and n ≡ 3 mod 8, got degree {} and n = {n}",
            t1.degree()
        )));
    }
    let e8 = gram_e8();
    Ok((0..(n - 3) / 8).fold(t1.clone(), |acc, _| direct_sum(&acc, &e8)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_examples() {
        assert_eq!(ternary_witness(2).unwrap().form.doubled(), &[2, 1, 1, 1, 2, 0, 1, 0, 2]);
        assert_eq!(ternary_witness(5).unwrap().form.doubled(), &[2, 0, 1, 0, 4, 1, 1, 1, 2]);
        let w = ternary_witness(17).unwrap();
        assert_eq!(w.auxiliary, Some((3, 1)));
        assert_eq!(w.form.doubled(), &[14, -2, -4, -2, 2, 3, -4, 3, 6]);
        assert_eq!(w.form.det_doubled(), 34.into());
    }

    #[test]
    fn padding() {
        let t = ternary_witness(7).unwrap().form;
        assert_eq!(pad_witness(&t, 3).unwrap(), t);
        let big = pad_witness(&t, 11).unwrap();
        assert_eq!(big.degree(), 11);
        assert_eq!(big.d_of().unwrap(), 7);
        assert!(big.is_positive_definite());
        assert!(pad_witness(&t, 5).is_err());
    }

    #[test]
    fn rejects_composites_and_tampering() {
        assert!(ternary_witness(15).is_err());
        let mut w = ternary_witness(41).unwrap();
        w.auxiliary = Some((5, 1));
        assert!(!w.verify());
    }
}
