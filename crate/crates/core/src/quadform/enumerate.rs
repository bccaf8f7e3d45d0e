use super::HalfIntegralForm;
use crate::error::{Error, Result};

/// Positive-definite binary or ternary forms with `D(T) ≤ bound`, at least
/// one per `GL_n(Z)` class.
///
/// Candidates satisfy `t_11 ≤ t_22 ≤ t_33`, `|2 t_ij| ≤ t_ii` and a diagonal
/// product bound (reduced forms have `t_11 t_22 ≤ D/3` for binary and
/// `t_11 t_22 t_33 ≤ D/2` for ternary; the scan uses `≤ D`). Classes may
/// repeat. Output is sorted by the doubled entries.
pub fn enumerate_reduced(n: usize, bound: i64) -> Result<Vec<HalfIntegralForm>> {
    let mut out = match n {
        2 => binary(bound),
        3 => ternary(bound),
        _ => {
            return Err(Error::Unsupported(format!(
                "enumeration only for degree 2 or 3, got {n}"
            )))
        }
    };
    out.sort();
    out.dedup();
    Ok(out)
}

fn binary(bound: i64) -> Vec<HalfIntegralForm> {
    let mut out = Vec::new();
    for a in 1..=bound {
        if a * a > bound {
            break;
        }
        for c in a..=bound / a {
            for b in 0..=a {
                let d = 4 * a * c - b * b;
                if d > 0 && d <= bound {
                    out.push(HalfIntegralForm {
                        n: 2,
                        doubled: vec![2 * a, b, b, 2 * c],
                    });
                }
            }
        }
    }
    out
}

fn ternary(bound: i64) -> Vec<HalfIntegralForm> {
    let mut out = Vec::new();
    for a in 1..=bound {
        if a * a * a > bound {
            break;
        }
        for b in a..=bound {
            if a * b * b > bound {
                break;
            }
            for c in b..=bound / (a * b) {
                // sign normalization: flipping basis vectors makes g12, g13 ≥ 0
                for g12 in 0..=a {
                    for g13 in 0..=a {
                        for g23 in -b..=b {
                            let f = HalfIntegralForm {
                                n: 3,
                                doubled: vec![2 * a, g12, g13, g12, 2 * b, g23, g13, g23, 2 * c],
                            };
                            if !f.is_positive_definite() {
                                continue;
                            }
                            let d = f.d_of().expect("positive definite form is nondegenerate");
                            if d <= bound as i128 {
                                out.push(f);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}
