//! Friedman rank test and Nemenyi critical difference over an
//! N-datasets × K-methods result matrix.

mod gamma;

pub use gamma::{chi_square_sf, gamma_p, gamma_q, ln_gamma};

use crate::error::{Error, Result};

/// Two-tailed Nemenyi critical values `q_0.05` for K = 2..=10
/// (studentized range statistic divided by √2).
pub const Q_ALPHA_005: [(usize, f64); 9] = [
    (2, 1.960),
    (3, 2.343),
    (4, 2.569),
    (5, 2.728),
    (6, 2.850),
    (7, 2.949),
    (8, 3.031),
    (9, 3.102),
    (10, 3.164),
];

/// `q_0.05` for `k` methods, when tabulated.
pub fn q_alpha_005(k: usize) -> Option<f64> {
    Q_ALPHA_005.iter().find(|(kk, _)| *kk == k).map(|&(_, q)| q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub values: Vec<Vec<f64>>,
    /// Per row, 1 = best; ties share the average of their positions.
    pub ranks: Vec<Vec<f64>>,
    /// Column means of `ranks`.
    pub mean_ranks: Vec<f64>,
    pub higher_is_better: bool,
}

impl RankTable {
    pub fn n_datasets(&self) -> usize {
        self.ranks.len()
    }

    pub fn n_methods(&self) -> usize {
        self.mean_ranks.len()
    }
}

/// Ranks a single row; ties receive the mean of the positions they span.
pub fn rank_row(row: &[f64], higher_is_better: bool) -> Vec<f64> {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (row[a], row[b]);
        if higher_is_better {
            y.total_cmp(&x)
        } else {
            x.total_cmp(&y)
        }
    });
    let mut ranks = vec![0.0; row.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && row[order[end]] == row[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

pub fn rank_rows(values: &[Vec<f64>], higher_is_better: bool) -> Result<RankTable> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Insufficient(format!("need at least 2 datasets, got {n}")));
    }
    let k = values[0].len();
    if k < 2 {
        return Err(Error::Insufficient(format!("need at least 2 methods, got {k}")));
    }
    for (r, row) in values.iter().enumerate() {
        if row.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: row.len() });
        }
        if let Some(c) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: r, col: c });
        }
    }
    let ranks: Vec<Vec<f64>> = values.iter().map(|row| rank_row(row, higher_is_better)).collect();
    let mean_ranks = (0..k)
        .map(|j| ranks.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    Ok(RankTable {
        values: values.to_vec(),
        ranks,
        mean_ranks,
        higher_is_better,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FriedmanResult {
    pub chi2: f64,
    pub p_value: f64,
    pub dof: usize,
}

/// `χ²_F = 12N/(K(K+1)) · (Σ_j R_j² − K(K+1)²/4)`, with its upper-tail
/// p-value under `χ²(K − 1)`.
pub fn friedman(rt: &RankTable) -> FriedmanResult {
    friedman_from_mean_ranks(&rt.mean_ranks, rt.n_datasets())
}

pub fn friedman_from_mean_ranks(mean_ranks: &[f64], n_datasets: usize) -> FriedmanResult {
    let k = mean_ranks.len() as f64;
    let n = n_datasets as f64;
    let sum_sq: f64 = mean_ranks.iter().map(|r| r * r).sum();
    let raw = 12.0 * n / (k * (k + 1.0)) * (sum_sq - k * (k + 1.0) * (k + 1.0) / 4.0);
    // rounding can leave a tiny negative value when all ranks are equal
    let chi2 = if raw.abs() < 1e-9 { 0.0 } else { raw.max(0.0) };
    let dof = mean_ranks.len().saturating_sub(1);
    FriedmanResult {
        chi2,
        p_value: chi_square_sf(chi2, dof as f64),
        dof,
    }
}

/// `CD = q_α · √(K(K+1)/(6N))`.
pub fn nemenyi_cd(k: usize, n: usize, q_alpha: f64) -> Result<f64> {
    if k < 2 || n < 1 || !(q_alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "nemenyi_cd needs K >= 2, N >= 1, q > 0 (got K={k}, N={n}, q={q_alpha})"
        )));
    }
    let (k, n) = (k as f64, n as f64);
    Ok(q_alpha * (k * (k + 1.0) / (6.0 * n)).sqrt())
}

/// Entry `(i, j)` is true iff `|R_i − R_j| > cd`.
pub fn pairwise_significance(rt: &RankTable, cd: f64) -> Vec<Vec<bool>> {
    significance_from_mean_ranks(&rt.mean_ranks, cd)
}

pub fn significance_from_mean_ranks(mean_ranks: &[f64], cd: f64) -> Vec<Vec<bool>> {
    mean_ranks
        .iter()
        .map(|a| mean_ranks.iter().map(|b| (a - b).abs() > cd).collect())
        .collect()
}
