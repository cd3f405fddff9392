//! DTW, ADTW, WDTW, direct alignment and the derivative composites.

use crate::cost::{with_point_cost, CostExponent, PointCost};
use crate::data::derivative_values;
use crate::error::{Error, Result};

use super::{check_lengths, AlignmentResult, Penalty, WarpingWindow};

const INF: f64 = f64::INFINITY;

/// Rolling two-row warping recurrence over the band `|i - j| <= w`.
///
/// `M(i, j) = cost(i, j) + min(M(i-1, j-1), M(i-1, j) + ω, M(i, j-1) + ω)`
/// with `+∞` borders and `+∞` outside the band. With `PENALISED = false` the
/// `ω` terms are omitted entirely. When `COUNT` is set, `cells` accumulates
/// the number of matrix cells evaluated.
#[inline(always)]
fn warp_rolling<F, const PENALISED: bool, const COUNT: bool>(
    len: usize,
    w: usize,
    omega: f64,
    cost: F,
    cells: &mut u64,
) -> f64
where
    F: Fn(usize, usize) -> f64,
{
    let mut prev = vec![INF; len + 1];
    let mut curr = vec![INF; len + 1];
    prev[0] = 0.0;
    for i in 1..=len {
        let lo = i.saturating_sub(w).max(1);
        let hi = (i + w).min(len);
        curr[lo - 1] = INF;
        for j in lo..=hi {
            let best = if PENALISED {
                prev[j - 1].min(prev[j] + omega).min(curr[j - 1] + omega)
            } else {
                prev[j - 1].min(prev[j]).min(curr[j - 1])
            };
            curr[j] = cost(i - 1, j - 1) + best;
        }
        if hi < len {
            curr[hi + 1] = INF;
        }
        if COUNT {
            *cells += (hi + 1 - lo) as u64;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[len]
}

/// Full `(L+1) × (L+1)` matrix for path recovery, same recurrence as [`warp_rolling`].
fn warp_full<F>(len: usize, w: usize, omega: f64, cost: F) -> Vec<f64>
where
    F: Fn(usize, usize) -> f64,
{
    let n = len + 1;
    let mut m = vec![INF; n * n];
    m[0] = 0.0;
    for i in 1..=len {
        let lo = i.saturating_sub(w).max(1);
        let hi = (i + w).min(len);
        for j in lo..=hi {
            let best = m[(i - 1) * n + j - 1]
                .min(m[(i - 1) * n + j] + omega)
                .min(m[i * n + j - 1] + omega);
            m[i * n + j] = cost(i - 1, j - 1) + best;
        }
    }
    m
}

/// Backtracks an optimal path. Equal predecessors resolve to the diagonal,
/// then `(i-1, j)`, then `(i, j-1)`.
fn backtrack(m: &[f64], len: usize, omega: f64) -> Vec<(usize, usize)> {
    let n = len + 1;
    let (mut i, mut j) = (len, len);
    let mut path = vec![(i - 1, j - 1)];
    while i > 1 || j > 1 {
        let diag = m[(i - 1) * n + j - 1];
        let up = m[(i - 1) * n + j] + omega;
        let left = m[i * n + j - 1] + omega;
        if diag <= up && diag <= left {
            i -= 1;
            j -= 1;
        } else if up <= left {
            i -= 1;
        } else {
            j -= 1;
        }
        path.push((i - 1, j - 1));
    }
    path.reverse();
    path
}

pub(crate) fn dtw_value(s: &[f64], t: &[f64], w: usize, gamma: CostExponent) -> f64 {
    let mut cells = 0;
    with_point_cost!(gamma, c => warp_rolling::<_, false, false>(
        s.len(),
        w,
        0.0,
        |i, j| c.eval(s[i], t[j]),
        &mut cells,
    ))
}

pub(crate) fn adtw_value(s: &[f64], t: &[f64], omega: f64, gamma: CostExponent) -> f64 {
    let mut cells = 0;
    with_point_cost!(gamma, c => warp_rolling::<_, true, false>(
        s.len(),
        s.len(),
        omega,
        |i, j| c.eval(s[i], t[j]),
        &mut cells,
    ))
}

pub(crate) fn direct_value(s: &[f64], t: &[f64], gamma: CostExponent) -> f64 {
    fn sum<C: PointCost>(s: &[f64], t: &[f64], c: C) -> f64 {
        let mut acc = 0.0;
        for (&a, &b) in s.iter().zip(t) {
            acc += c.eval(a, b);
        }
        acc
    }
    with_point_cost!(gamma, c => sum(s, t, c))
}

pub(crate) fn wdtw_value(s: &[f64], t: &[f64], weights: &[f64], gamma: CostExponent) -> f64 {
    let mut cells = 0;
    with_point_cost!(gamma, c => warp_rolling::<_, false, false>(
        s.len(),
        s.len(),
        0.0,
        |i, j| weights[i.abs_diff(j)] * c.eval(s[i], t[j]),
        &mut cells,
    ))
}

/// DTW with a Sakoe-Chiba band; optionally recovers an optimal warping path.
pub fn dtw(
    s: &[f64],
    t: &[f64],
    window: WarpingWindow,
    gamma: CostExponent,
    want_path: bool,
) -> Result<AlignmentResult> {
    check_lengths(s, t)?;
    let w = window.effective(s.len());
    if !want_path {
        return Ok(AlignmentResult {
            value: dtw_value(s, t, w, gamma),
            path: None,
        });
    }
    let m = warp_full(s.len(), w, 0.0, |i, j| gamma.eval(s[i], t[j]));
    let n = s.len() + 1;
    Ok(AlignmentResult {
        value: m[n * n - 1],
        path: Some(backtrack(&m, s.len(), 0.0)),
    })
}

/// Banded DTW value together with the number of matrix cells evaluated.
pub fn dtw_cell_count(
    s: &[f64],
    t: &[f64],
    window: WarpingWindow,
    gamma: CostExponent,
) -> Result<(f64, u64)> {
    check_lengths(s, t)?;
    let w = window.effective(s.len());
    let mut cells = 0;
    let value = with_point_cost!(gamma, c => warp_rolling::<_, false, true>(
        s.len(),
        w,
        0.0,
        |i, j| c.eval(s[i], t[j]),
        &mut cells,
    ));
    Ok((value, cells))
}

/// Amerced DTW: unbanded, every non-diagonal step pays `ω`.
pub fn adtw(
    s: &[f64],
    t: &[f64],
    omega: Penalty,
    gamma: CostExponent,
    want_path: bool,
) -> Result<AlignmentResult> {
    check_lengths(s, t)?;
    let omega = omega.value();
    if !want_path {
        return Ok(AlignmentResult {
            value: adtw_value(s, t, omega, gamma),
            path: None,
        });
    }
    let len = s.len();
    let m = warp_full(len, len, omega, |i, j| gamma.eval(s[i], t[j]));
    let n = len + 1;
    Ok(AlignmentResult {
        value: m[n * n - 1],
        path: Some(backtrack(&m, len, omega)),
    })
}

/// `Σ_i |S_i − T_i|^γ`, the diagonal alignment. Also serves as SQED^γ.
pub fn direct_alignment(s: &[f64], t: &[f64], gamma: CostExponent) -> Result<f64> {
    check_lengths(s, t)?;
    Ok(direct_value(s, t, gamma))
}

/// Logistic weights `1 / (1 + exp(-g (d - L/2)))` for `d = 0..L`.
pub fn wdtw_weights(len: usize, g: f64) -> Vec<f64> {
    let half = len as f64 / 2.0;
    (0..len)
        .map(|d| 1.0 / (1.0 + (-g * (d as f64 - half)).exp()))
        .collect()
}

/// Weighted DTW (unbanded); each aligned pair's cost is scaled by the
/// logistic weight of its index offset.
pub fn wdtw(s: &[f64], t: &[f64], g: f64, gamma: CostExponent) -> Result<f64> {
    check_lengths(s, t)?;
    if !g.is_finite() || g < 0.0 {
        return Err(Error::usage(format!(
            "wdtw weight g must be nonnegative, got {g}"
        )));
    }
    Ok(wdtw_value(s, t, &wdtw_weights(s.len(), g), gamma))
}

/// DTW on derivative series.
pub fn ddtw(s: &[f64], t: &[f64], window: WarpingWindow, gamma: CostExponent) -> Result<f64> {
    check_lengths(s, t)?;
    let (ds, dt) = (derivative_values(s)?, derivative_values(t)?);
    Ok(dtw_value(&ds, &dt, window.effective(ds.len()), gamma))
}

/// WDTW on derivative series.
pub fn dwdtw(s: &[f64], t: &[f64], g: f64, gamma: CostExponent) -> Result<f64> {
    check_lengths(s, t)?;
    let (ds, dt) = (derivative_values(s)?, derivative_values(t)?);
    wdtw(&ds, &dt, g, gamma)
}
