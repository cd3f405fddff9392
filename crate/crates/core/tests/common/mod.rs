//! Independent reference implementations used by the integration and
//! acceptance tests. Everything here is written from the definitions, with
//! no shared code paths with the library kernels.
#![allow(dead_code)]

use elastika::data::{Dataset, Series, Split};
use elastika::stats::{wilcoxon_signed_rank, AccuracyMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn pow_cost(a: f64, b: f64, gamma: f64) -> f64 {
    (a - b).abs().powf(gamma)
}

type Visit<'a> = dyn FnMut(&[(usize, usize)]) + 'a;

/// Calls `visit` with every monotone, continuous warping path from `(0, 0)`
/// to `(len-1, len-1)` whose cells satisfy `allowed`.
pub fn for_each_path(len: usize, allowed: &dyn Fn(usize, usize) -> bool, visit: &mut Visit) {
    fn walk(
        len: usize,
        path: &mut Vec<(usize, usize)>,
        allowed: &dyn Fn(usize, usize) -> bool,
        visit: &mut Visit,
    ) {
        let (i, j) = *path.last().unwrap();
        if i == len - 1 && j == len - 1 {
            visit(path);
            return;
        }
        for (di, dj) in [(1, 1), (1, 0), (0, 1)] {
            let (ni, nj) = (i + di, j + dj);
            if ni < len && nj < len && allowed(ni, nj) {
                path.push((ni, nj));
                walk(len, path, allowed, visit);
                path.pop();
            }
        }
    }
    let mut path = vec![(0, 0)];
    walk(len, &mut path, allowed, visit);
}

/// Minimum over all paths of `Σ cell_cost + omega × (non-diagonal steps)`.
pub fn min_path(
    len: usize,
    allowed: &dyn Fn(usize, usize) -> bool,
    cell_cost: &dyn Fn(usize, usize) -> f64,
    omega: f64,
) -> f64 {
    let mut best = f64::INFINITY;
    for_each_path(len, allowed, &mut |path| {
        let mut total: f64 = path.iter().map(|&(i, j)| cell_cost(i, j)).sum();
        for step in path.windows(2) {
            let diagonal = step[1].0 == step[0].0 + 1 && step[1].1 == step[0].1 + 1;
            if !diagonal {
                total += omega;
            }
        }
        best = best.min(total);
    });
    best
}

pub fn brute_dtw(s: &[f64], t: &[f64], w: usize, gamma: f64) -> f64 {
    min_path(
        s.len(),
        &|i, j| i.abs_diff(j) <= w,
        &|i, j| pow_cost(s[i], t[j], gamma),
        0.0,
    )
}

pub fn brute_adtw(s: &[f64], t: &[f64], omega: f64, gamma: f64) -> f64 {
    min_path(
        s.len(),
        &|_, _| true,
        &|i, j| pow_cost(s[i], t[j], gamma),
        omega,
    )
}

pub fn brute_wdtw(s: &[f64], t: &[f64], g: f64, gamma: f64) -> f64 {
    let half = s.len() as f64 / 2.0;
    let weight = |d: usize| 1.0 / (1.0 + (-g * (d as f64 - half)).exp());
    min_path(
        s.len(),
        &|_, _| true,
        &|i, j| weight(i.abs_diff(j)) * pow_cost(s[i], t[j], gamma),
        0.0,
    )
}

/// Longest common subsequence where `i` and `j` may pair when within `epsilon`
/// and `|i − j| <= w`, by plain recursion; returns `1 − lcs / L`.
pub fn naive_lcss(s: &[f64], t: &[f64], epsilon: f64, w: usize) -> f64 {
    fn lcs(s: &[f64], t: &[f64], i: usize, j: usize, eps: f64, w: usize) -> usize {
        if i == 0 || j == 0 {
            return 0;
        }
        if (i - 1).abs_diff(j - 1) <= w && (s[i - 1] - t[j - 1]).abs() <= eps {
            1 + lcs(s, t, i - 1, j - 1, eps, w)
        } else {
            lcs(s, t, i - 1, j, eps, w).max(lcs(s, t, i, j - 1, eps, w))
        }
    }
    1.0 - lcs(s, t, s.len(), t.len(), epsilon, w) as f64 / s.len() as f64
}

/// ERP over the full matrix: interior cells outside the band are unreachable,
/// the first row and column are plain gap sums.
pub fn naive_erp(s: &[f64], t: &[f64], gap: f64, w: usize) -> f64 {
    let n = s.len();
    let mut d = vec![vec![f64::INFINITY; n + 1]; n + 1];
    d[0][0] = 0.0;
    for i in 1..=n {
        d[i][0] = d[i - 1][0] + (s[i - 1] - gap).abs();
        d[0][i] = d[0][i - 1] + (t[i - 1] - gap).abs();
    }
    for i in 1..=n {
        for j in 1..=n {
            if i.abs_diff(j) > w {
                continue;
            }
            let m = d[i - 1][j - 1] + (s[i - 1] - t[j - 1]).abs();
            let del = d[i - 1][j] + (s[i - 1] - gap).abs();
            let ins = d[i][j - 1] + (t[j - 1] - gap).abs();
            d[i][j] = m.min(del).min(ins);
        }
    }
    d[n][n]
}

fn msm_c(x: f64, y: f64, z: f64, c: f64) -> f64 {
    if (y <= x && x <= z) || (y >= x && x >= z) {
        c
    } else {
        c + (x - y).abs().min((x - z).abs())
    }
}

/// Move-split-merge by direct recursion on the published definition
/// (1-based indices).
pub fn naive_msm(x: &[f64], y: &[f64], c: f64) -> f64 {
    fn rec(x: &[f64], y: &[f64], i: usize, j: usize, c: f64) -> f64 {
        let (xi, yj) = (x[i - 1], y[j - 1]);
        match (i, j) {
            (1, 1) => (xi - yj).abs(),
            (_, 1) => rec(x, y, i - 1, 1, c) + msm_c(xi, x[i - 2], yj, c),
            (1, _) => rec(x, y, 1, j - 1, c) + msm_c(yj, xi, y[j - 2], c),
            _ => {
                let mv = rec(x, y, i - 1, j - 1, c) + (xi - yj).abs();
                let split = rec(x, y, i - 1, j, c) + msm_c(xi, x[i - 2], yj, c);
                let merge = rec(x, y, i, j - 1, c) + msm_c(yj, xi, y[j - 2], c);
                mv.min(split).min(merge)
            }
        }
    }
    rec(x, y, x.len(), y.len(), c)
}

/// Time-warp edit distance over the full matrix, with timestamps `1..=L`
/// and a zero sample at time 0 in front of both series.
pub fn naive_twe(a: &[f64], b: &[f64], nu: f64, lambda: f64) -> f64 {
    let n = a.len();
    let pa: Vec<f64> = std::iter::once(0.0).chain(a.iter().copied()).collect();
    let pb: Vec<f64> = std::iter::once(0.0).chain(b.iter().copied()).collect();
    let ts = |k: usize| k as f64;
    let mut d = vec![vec![f64::INFINITY; n + 1]; n + 1];
    d[0][0] = 0.0;
    for i in 1..=n {
        for j in 1..=n {
            let del_a = d[i - 1][j] + (pa[i] - pa[i - 1]).abs() + nu * (ts(i) - ts(i - 1)) + lambda;
            let del_b = d[i][j - 1] + (pb[j] - pb[j - 1]).abs() + nu * (ts(j) - ts(j - 1)) + lambda;
            let matched = d[i - 1][j - 1]
                + (pa[i] - pb[j]).abs()
                + (pa[i - 1] - pb[j - 1]).abs()
                + nu * ((ts(i) - ts(j)).abs() + (ts(i - 1) - ts(j - 1)).abs());
            d[i][j] = matched.min(del_a).min(del_b);
        }
    }
    d[n][n]
}

/// Leave-one-out 1-NN correct count, recomputing every distance on demand.
pub fn naive_loocv(ds: &Dataset, dist: &dyn Fn(&[f64], &[f64]) -> f64) -> usize {
    let n = ds.len();
    let mut correct = 0;
    for i in 0..n {
        let mut best: Option<(f64, usize)> = None;
        for k in 0..n {
            if k == i {
                continue;
            }
            let d = dist(ds.series()[i].values(), ds.series()[k].values());
            match best {
                Some((bd, _)) if d >= bd => {}
                _ => best = Some((d, k)),
            }
        }
        if ds.labels()[best.unwrap().1] == ds.labels()[i] {
            correct += 1;
        }
    }
    correct
}

/// Maximal cliques of size >= 2 by checking every subset of classifiers.
#[allow(clippy::needless_range_loop)]
pub fn naive_cliques(matrix: &AccuracyMatrix, alpha: f64) -> Vec<Vec<usize>> {
    let k = matrix.k();
    let mut linked = vec![vec![false; k]; k];
    for a in 0..k {
        for b in a + 1..k {
            let p = wilcoxon_signed_rank(&matrix.pair(a, b).unwrap())
                .unwrap()
                .p_value;
            linked[a][b] = p >= alpha;
            linked[b][a] = p >= alpha;
        }
    }
    let members = |mask: u32| -> Vec<usize> { (0..k).filter(|&i| mask >> i & 1 == 1).collect() };
    let is_clique = |mask: u32| {
        let m = members(mask);
        m.iter().all(|&a| m.iter().all(|&b| a == b || linked[a][b]))
    };
    let cliques: Vec<u32> = (1u32..1 << k)
        .filter(|m| m.count_ones() >= 2 && is_clique(*m))
        .collect();
    let mut maximal: Vec<Vec<usize>> = cliques
        .iter()
        .filter(|&&m| !cliques.iter().any(|&o| o != m && o & m == m))
        .map(|&m| members(m))
        .collect();
    maximal.sort();
    maximal
}

/// Two-sided signed-rank p by enumerating every sign pattern. Zero
/// differences are dropped and tied magnitudes share averaged ranks.
pub fn enumerated_wilcoxon_p(diffs: &[f64]) -> f64 {
    let d: Vec<f64> = diffs.iter().copied().filter(|&x| x != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return 1.0;
    }
    let mag: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let ranks: Vec<f64> = mag
        .iter()
        .map(|&m| {
            let below = mag.iter().filter(|&&o| o < m).count() as f64;
            let equal = mag.iter().filter(|&&o| o == m).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let total: f64 = ranks.iter().sum();
    let observed: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(x, _)| **x > 0.0)
        .map(|(_, r)| r)
        .sum();
    let dev = (observed - total / 2.0).abs();
    let mut extreme = 0u64;
    for mask in 0u64..1 << n {
        let w: f64 = (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| ranks[i])
            .sum();
        if (w - total / 2.0).abs() >= dev - 1e-9 {
            extreme += 1;
        }
    }
    extreme as f64 / (1u64 << n) as f64
}

pub fn uniform_series(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

pub fn dataset(name: &str, split: Split, items: Vec<(Vec<f64>, i64)>) -> Dataset {
    Dataset::new(
        name,
        split,
        items.into_iter().map(|(v, l)| (Series::new(v).unwrap(), l)),
    )
    .unwrap()
}

/// Two classes of noisy constant series at levels 0 and 10.
pub fn separable(rng: &mut ChaCha8Rng, per_class: usize, len: usize, split: Split) -> Dataset {
    let mut items = Vec::new();
    for (label, level) in [(1, 0.0), (2, 10.0)] {
        for _ in 0..per_class {
            let v = (0..len).map(|_| level + rng.gen_range(-0.5..0.5)).collect();
            items.push((v, label));
        }
    }
    dataset("separable", split, items)
}

/// Series in the shape of the cost-exponent motivating example:
/// `s` has a tall head and a small-amplitude tail, `u` keeps the head and
/// flattens the tail, `t` flattens the head and keeps the tail.
pub struct HeadTail {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub u: Vec<f64>,
}

pub fn head_tail() -> HeadTail {
    let head = [0.0, 5.0, 0.0, -5.0, 0.0];
    let tail: Vec<f64> = (0..15)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    let s: Vec<f64> = head.iter().copied().chain(tail.iter().copied()).collect();
    let mut u = head.to_vec();
    u.resize(20, 0.0);
    let mut t = vec![0.0; 5];
    t.extend_from_slice(&tail);
    HeadTail { s, t, u }
}

/// Two-class dataset built around [`head_tail`]: class 1 items are noisy
/// copies of `s`, class 2 items randomly resemble either `t` or `u`.
pub fn head_tail_dataset(rng: &mut ChaCha8Rng, per_class: usize, split: Split) -> Dataset {
    let ht = head_tail();
    let jitter = |rng: &mut ChaCha8Rng, v: &[f64], amp: f64| -> Vec<f64> {
        v.iter().map(|x| x + rng.gen_range(-amp..amp)).collect()
    };
    let mut items = Vec::new();
    for _ in 0..per_class {
        items.push((jitter(rng, &ht.s, 0.3), 1));
        let base = if rng.gen_bool(0.5) { &ht.t } else { &ht.u };
        items.push((jitter(rng, base, 0.3), 2));
    }
    dataset("headtail", split, items)
}
