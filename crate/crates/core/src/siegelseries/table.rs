//! Published products `∏_q F_q(T, X)` for ternary classes with `D(T) ≤ 13`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::global_polynomial;
use crate::error::Result;
use crate::poly::mul_int;
use crate::quadform::enumerate_reduced;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    #[serde(rename = "D")]
    pub d: i64,
    pub label: String,
    /// Factors as printed, ascending coefficients.
    pub factors: Vec<Vec<i64>>,
    pub product: Vec<i64>,
}

fn entry(d: i64, label: &str, factors: &[&[i64]]) -> TableEntry {
    let product = factors.iter().fold(vec![1], |acc, f| mul_int(&acc, f));
    TableEntry {
        d,
        label: label.to_string(),
        factors: factors.iter().map(|f| f.to_vec()).collect(),
        product,
    }
}

pub fn reference_table() -> Vec<TableEntry> {
    vec![
        entry(2, "2", &[&[1, -4]]),
        entry(3, "3", &[&[1, -9]]),
        entry(4, "4", &[&[1, 0, -16]]),
        entry(5, "5", &[&[1, -25]]),
        entry(6, "6_1", &[&[1, 4], &[1, -9]]),
        entry(6, "6_2", &[&[1, -4], &[1, 9]]),
        entry(7, "7", &[&[1, -49]]),
        entry(8, "8_1", &[&[1, -4], &[1, 0, 16]]),
        entry(8, "8_2", &[&[1, 0, 0, -64]]),
        entry(9, "9", &[&[1, 0, -81]]),
        entry(10, "10_1", &[&[1, -4], &[1, 25]]),
        entry(10, "10_2", &[&[1, 4], &[1, -25]]),
        entry(11, "11", &[&[1, -121]]),
        entry(12, "12_1", &[&[1, -4, 16], &[1, -9]]),
        entry(12, "12_2", &[&[1, 4, 16], &[1, -9]]),
        entry(12, "12_3", &[&[1, 0, 16], &[1, -9]]),
        entry(12, "12_4", &[&[1, 0, -16], &[1, 9]]),
        entry(13, "13", &[&[1, -169]]),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRecord {
    #[serde(flatten)]
    pub entry: TableEntry,
    /// Number of enumerated representatives whose product equals this entry.
    pub representatives: usize,
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableComparison {
    pub records: Vec<TableRecord>,
    /// Computed products absent from the table, as `(D, product)`.
    pub unexpected: Vec<(i64, Vec<i64>)>,
    pub pass: bool,
}

/// Recomputes the products for every enumerated ternary form with
/// `D(T) ≤ 13` and compares, per `D`, the set of distinct products with the
/// table.
pub fn compare_with_table() -> Result<TableComparison> {
    let mut computed: BTreeMap<i64, BTreeMap<Vec<i64>, usize>> = BTreeMap::new();
    for t in enumerate_reduced(3, 13)? {
        let d = t.d_of()? as i64;
        *computed.entry(d).or_default().entry(global_polynomial(&t)?).or_default() += 1;
    }
    let table = reference_table();
    let expected: BTreeSet<(i64, Vec<i64>)> = table.iter().map(|e| (e.d, e.product.clone())).collect();
    let records: Vec<TableRecord> = table
        .into_iter()
        .map(|e| {
            let representatives = computed.get(&e.d).and_then(|m| m.get(&e.product)).copied().unwrap_or(0);
            TableRecord { entry: e, representatives, matched: representatives > 0 }
        })
        .collect();
    let unexpected: Vec<(i64, Vec<i64>)> = computed
        .iter()
        .flat_map(|(&d, m)| m.keys().map(move |p| (d, p.clone())))
        .filter(|key| !expected.contains(key))
        .collect();
    let pass = unexpected.is_empty() && records.iter().all(|r| r.matched);
    Ok(TableComparison { records, unexpected, pass })
}
