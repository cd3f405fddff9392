//! Paired classifier comparisons: win/tie/loss, the Wilcoxon signed-rank
//! test, mean ranks and groups of statistically indistinguishable classifiers.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Largest effective sample size for which the exact null distribution is used.
pub const EXACT_WILCOXON_MAX_N: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub dataset: String,
    pub acc_a: f64,
    pub acc_b: f64,
}

/// Accuracies of two classifiers over the same datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedAccuracies {
    rows: Vec<PairRow>,
}

impl PairedAccuracies {
    pub fn new(rows: Vec<PairRow>) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &rows {
            if !seen.insert(r.dataset.as_str()) {
                return Err(Error::usage(format!(
                    "dataset {:?} appears twice",
                    r.dataset
                )));
            }
            for acc in [r.acc_a, r.acc_b] {
                if !(0.0..=1.0).contains(&acc) {
                    return Err(Error::usage(format!(
                        "accuracy {acc} for {:?} is outside [0, 1]",
                        r.dataset
                    )));
                }
            }
        }
        Ok(Self { rows })
    }

    /// Builds rows named `d0`, `d1`, ... from two accuracy columns.
    pub fn from_columns(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::usage("accuracy columns differ in length"));
        }
        Self::new(
            a.iter()
                .zip(b)
                .enumerate()
                .map(|(i, (&acc_a, &acc_b))| PairRow {
                    dataset: format!("d{i}"),
                    acc_a,
                    acc_b,
                })
                .collect(),
        )
    }

    pub fn rows(&self) -> &[PairRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn swapped(&self) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| PairRow {
                    dataset: r.dataset.clone(),
                    acc_a: r.acc_b,
                    acc_b: r.acc_a,
                })
                .collect(),
        }
    }

    fn differences(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.acc_a - r.acc_b).collect()
    }
}

/// `(wins_a, ties, wins_b)` under exact comparison.
pub fn win_tie_loss(pairs: &PairedAccuracies) -> Result<(usize, usize, usize)> {
    if pairs.is_empty() {
        return Err(Error::usage("win/tie/loss needs at least one pair"));
    }
    Ok(pairs.rows().iter().fold((0, 0, 0), |(w, t, l), r| {
        if r.acc_a > r.acc_b {
            (w + 1, t, l)
        } else if r.acc_a < r.acc_b {
            (w, t, l + 1)
        } else {
            (w, t + 1, l)
        }
    }))
}

/// Average ranks (1-based). `descending` ranks the largest value first.
pub fn average_ranks(values: &[f64], descending: bool) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| {
        let c = values[i].total_cmp(&values[j]);
        if descending {
            c.reverse()
        } else {
            c
        }
    });
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end share the mean of ranks start+1..=end.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    pub p_value: f64,
    pub n_effective: usize,
    /// Sum of the ranks of positive differences (A better than B).
    pub w_plus: f64,
}

/// Two-sided Wilcoxon signed-rank test on `acc_a − acc_b`.
///
/// Zero differences are discarded and tied magnitudes share averaged ranks.
/// Up to [`EXACT_WILCOXON_MAX_N`] nonzero differences the p-value comes from
/// the exact permutation distribution of the rank sum; beyond that a normal
/// approximation with tie-corrected variance and continuity correction is used.
pub fn wilcoxon_signed_rank(pairs: &PairedAccuracies) -> Result<WilcoxonResult> {
    if pairs.is_empty() {
        return Err(Error::usage("the Wilcoxon test needs at least one pair"));
    }
    let diffs: Vec<f64> = pairs
        .differences()
        .into_iter()
        .filter(|&d| d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            p_value: 1.0,
            n_effective: 0,
            w_plus: 0.0,
        });
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&magnitudes, false);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let p_value = if n <= EXACT_WILCOXON_MAX_N {
        exact_p(&ranks, w_plus)
    } else {
        normal_p(&ranks, w_plus)
    };
    Ok(WilcoxonResult {
        p_value,
        n_effective: n,
        w_plus,
    })
}

/// `P(|W − μ| ≥ |w − μ|)` under random signs, by dynamic programming over
/// doubled ranks (averaged ranks are multiples of 1/2).
fn exact_p(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    for &r in &doubled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let observed = (w_plus * 2.0).round() as i64;
    let total = total as i64;
    let threshold = (2 * observed - total).abs();
    let extreme: f64 = counts
        .iter()
        .enumerate()
        .filter(|(s, _)| (2 * *s as i64 - total).abs() >= threshold)
        .map(|(_, c)| c)
        .sum();
    (extreme / 2f64.powi(ranks.len() as i32)).min(1.0)
}

fn normal_p(ranks: &[f64], w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

/// Accuracies of `k` classifiers (columns) over a set of datasets (rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyMatrix {
    pub classifiers: Vec<String>,
    pub datasets: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl AccuracyMatrix {
    pub fn new(
        classifiers: Vec<String>,
        datasets: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if classifiers.len() < 2 {
            return Err(Error::usage("ranking needs at least two classifiers"));
        }
        if datasets.len() != rows.len() {
            return Err(Error::usage("one accuracy row is needed per dataset"));
        }
        if rows.is_empty() {
            return Err(Error::usage("ranking needs at least one dataset"));
        }
        if let Some((i, _)) = rows
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != classifiers.len())
        {
            return Err(Error::usage(format!(
                "dataset {:?} has {} accuracies, expected {}",
                datasets[i],
                rows[i].len(),
                classifiers.len()
            )));
        }
        Ok(Self {
            classifiers,
            datasets,
            rows,
        })
    }

    pub fn k(&self) -> usize {
        self.classifiers.len()
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[c]).collect()
    }

    pub fn pair(&self, a: usize, b: usize) -> Result<PairedAccuracies> {
        PairedAccuracies::new(
            self.datasets
                .iter()
                .zip(&self.rows)
                .map(|(d, r)| PairRow {
                    dataset: d.clone(),
                    acc_a: r[a],
                    acc_b: r[b],
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub classifiers: Vec<String>,
    pub mean_ranks: Vec<f64>,
    /// Per-dataset ranks, one row per dataset.
    pub ranks: Vec<Vec<f64>>,
}

/// Ranks classifiers on every dataset (rank 1 = most accurate, ties averaged)
/// and averages over datasets.
pub fn mean_ranks(matrix: &AccuracyMatrix) -> RankTable {
    let ranks: Vec<Vec<f64>> = matrix.rows.iter().map(|r| average_ranks(r, true)).collect();
    let n = ranks.len() as f64;
    let mean_ranks = (0..matrix.k())
        .map(|c| ranks.iter().map(|r| r[c]).sum::<f64>() / n)
        .collect();
    RankTable {
        classifiers: matrix.classifiers.clone(),
        mean_ranks,
        ranks,
    }
}

/// Maximal groups (size ≥ 2) of classifiers in which no pair differs
/// significantly under the Wilcoxon test at `alpha`. Groups are sorted
/// index lists, ordered lexicographically.
#[allow(clippy::needless_range_loop)]
pub fn cliques(matrix: &AccuracyMatrix, alpha: f64) -> Result<Vec<Vec<usize>>> {
    let k = matrix.k();
    let mut similar = vec![vec![false; k]; k];
    for a in 0..k {
        for b in a + 1..k {
            let p = wilcoxon_signed_rank(&matrix.pair(a, b)?)?.p_value;
            similar[a][b] = p >= alpha;
            similar[b][a] = p >= alpha;
        }
    }
    let mut out = Vec::new();
    bron_kerbosch(&similar, Vec::new(), (0..k).collect(), Vec::new(), &mut out);
    let mut out: Vec<Vec<usize>> = out.into_iter().filter(|c| c.len() >= 2).collect();
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    Ok(out)
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r);
        return;
    }
    while let Some(v) = p.pop() {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let x2 = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r2, p2, x2, out);
        x.push(v);
    }
}
