//! Edit-family distances: LCSS, ERP, MSM and TWE.
//!
//! These keep their original pointwise costs; the cost exponent is not threaded
//! through them.

use crate::error::{Error, Result};

use super::{check_lengths, WarpingWindow};

const INF: f64 = f64::INFINITY;

/// `1 − LCSS / L`, where points match when `|S_i − T_j| <= epsilon` and `|i − j| <= w`.
pub fn lcss(s: &[f64], t: &[f64], epsilon: f64, window: WarpingWindow) -> Result<f64> {
    check_lengths(s, t)?;
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::usage(format!(
            "lcss epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(lcss_unchecked(s, t, epsilon, window.effective(s.len())))
}

pub(crate) fn lcss_unchecked(s: &[f64], t: &[f64], epsilon: f64, w: usize) -> f64 {
    let len = s.len();
    // Out-of-band cells read as zero. The diagonal carry keeps narrow bands
    // from losing earlier matches.
    let mut prev = vec![0u32; len + 1];
    let mut curr = vec![0u32; len + 1];
    for i in 1..=len {
        let lo = i.saturating_sub(w).max(1);
        let hi = (i + w).min(len);
        curr[lo - 1] = 0;
        let si = s[i - 1];
        for j in lo..=hi {
            curr[j] = if (si - t[j - 1]).abs() <= epsilon {
                prev[j - 1] + 1
            } else {
                prev[j].max(curr[j - 1]).max(prev[j - 1])
            };
        }
        if hi < len {
            curr[hi + 1] = 0;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    1.0 - f64::from(prev[len]) / len as f64
}

/// Edit distance with real penalty. Gaps cost `|x − gap|`, matches `|S_i − T_j|`.
/// Interior cells with `|i − j| > w` are unreachable; the border rows
/// accumulate gap costs without a band.
pub fn erp(s: &[f64], t: &[f64], gap: f64, window: WarpingWindow) -> Result<f64> {
    check_lengths(s, t)?;
    if !gap.is_finite() || gap < 0.0 {
        return Err(Error::usage(format!(
            "erp gap value must be nonnegative, got {gap}"
        )));
    }
    Ok(erp_unchecked(s, t, gap, window.effective(s.len())))
}

pub(crate) fn erp_unchecked(s: &[f64], t: &[f64], gap: f64, w: usize) -> f64 {
    let len = s.len();
    let mut prev = vec![INF; len + 1];
    let mut curr = vec![INF; len + 1];
    prev[0] = 0.0;
    for j in 1..=len {
        prev[j] = prev[j - 1] + (t[j - 1] - gap).abs();
    }
    let mut border = 0.0;
    for i in 1..=len {
        let si = s[i - 1];
        let gap_s = (si - gap).abs();
        border += gap_s;
        let lo = i.saturating_sub(w).max(1);
        let hi = (i + w).min(len);
        curr[0] = border;
        if lo > 1 {
            curr[lo - 1] = INF;
        }
        for j in lo..=hi {
            let tj = t[j - 1];
            curr[j] = (prev[j - 1] + (si - tj).abs())
                .min(prev[j] + gap_s)
                .min(curr[j - 1] + (tj - gap).abs());
        }
        if hi < len {
            curr[hi + 1] = INF;
        }
        std::mem::swap(&mut prev, &mut curr);
        if i == 1 {
            // Drop the unbanded border row before the buffer is reused.
            curr.fill(INF);
        }
    }
    prev[len]
}

/// Split/merge cost of inserting `x` between neighbours `y` and `z`.
#[inline]
fn msm_split(x: f64, y: f64, z: f64, c: f64) -> f64 {
    if (y <= x && x <= z) || (z <= x && x <= y) {
        c
    } else {
        c + (x - y).abs().min((x - z).abs())
    }
}

/// Move-split-merge distance with split/merge cost `c`.
pub fn msm(s: &[f64], t: &[f64], c: f64) -> Result<f64> {
    check_lengths(s, t)?;
    if !c.is_finite() || c < 0.0 {
        return Err(Error::usage(format!(
            "msm cost must be nonnegative, got {c}"
        )));
    }
    Ok(msm_unchecked(s, t, c))
}

pub(crate) fn msm_unchecked(s: &[f64], t: &[f64], c: f64) -> f64 {
    let len = s.len();
    let mut prev = vec![0.0; len];
    let mut curr = vec![0.0; len];
    prev[0] = (s[0] - t[0]).abs();
    for j in 1..len {
        prev[j] = prev[j - 1] + msm_split(t[j], s[0], t[j - 1], c);
    }
    for i in 1..len {
        let (si, si_1) = (s[i], s[i - 1]);
        curr[0] = prev[0] + msm_split(si, si_1, t[0], c);
        for j in 1..len {
            let tj = t[j];
            curr[j] = (prev[j - 1] + (si - tj).abs())
                .min(prev[j] + msm_split(si, si_1, tj, c))
                .min(curr[j - 1] + msm_split(tj, si, t[j - 1], c));
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[len - 1]
}

/// Time-warp edit distance with stiffness `nu` and edit penalty `lambda`.
/// Timestamps are the sample indices; both series are padded with a leading zero.
pub fn twe(s: &[f64], t: &[f64], nu: f64, lambda: f64) -> Result<f64> {
    check_lengths(s, t)?;
    if !nu.is_finite() || nu < 0.0 || !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::usage(format!(
            "twe parameters must be nonnegative, got nu={nu} lambda={lambda}"
        )));
    }
    Ok(twe_unchecked(s, t, nu, lambda))
}

pub(crate) fn twe_unchecked(s: &[f64], t: &[f64], nu: f64, lambda: f64) -> f64 {
    let len = s.len();
    let at = |x: &[f64], k: usize| if k == 0 { 0.0 } else { x[k - 1] };
    let mut prev = vec![INF; len + 1];
    let mut curr = vec![INF; len + 1];
    prev[0] = 0.0;
    for i in 1..=len {
        let (si, si_1) = (at(s, i), at(s, i - 1));
        let del_s = (si - si_1).abs() + nu + lambda;
        curr[0] = INF;
        for j in 1..=len {
            let (tj, tj_1) = (at(t, j), at(t, j - 1));
            let del_t = (tj - tj_1).abs() + nu + lambda;
            let matched = (si - tj).abs() + (si_1 - tj_1).abs() + 2.0 * nu * i.abs_diff(j) as f64;
            curr[j] = (prev[j - 1] + matched)
                .min(prev[j] + del_s)
                .min(curr[j - 1] + del_t);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[len]
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNL: WarpingWindow = WarpingWindow::Unlimited;

    #[test]
    fn identical_series_are_at_distance_zero() {
        let s = [0.5, -0.25, 1.0, 3.0, 2.0];
        for w in [0, 2] {
            assert_eq!(lcss(&s, &s, 0.01, WarpingWindow::Bounded(w)).unwrap(), 0.0);
            assert_eq!(erp(&s, &s, 0.3, WarpingWindow::Bounded(w)).unwrap(), 0.0);
        }
        assert_eq!(msm(&s, &s, 0.5).unwrap(), 0.0);
        assert_eq!(twe(&s, &s, 0.01, 0.05).unwrap(), 0.0);
    }

    #[test]
    fn lcss_counts_matches() {
        // Only positions 0 and 2 match within epsilon without warping.
        let s = [0.0, 5.0, 1.0];
        let t = [0.05, -5.0, 1.0];
        let d = lcss(&s, &t, 0.1, WarpingWindow::Bounded(0)).unwrap();
        assert!((d - (1.0 - 2.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn msm_single_points() {
        assert_eq!(msm(&[1.0], &[4.0], 0.5).unwrap(), 3.0);
        // Moving both points beats any split/merge when c is large.
        assert_eq!(msm(&[0.0, 1.0], &[0.0, 2.0], 10.0).unwrap(), 1.0);
    }

    #[test]
    fn erp_without_band_matches_hand_value() {
        // Match (0,0) then (1,1): |1-2| = 1; gaps cost at least |x - 0| >= 1.
        assert_eq!(erp(&[0.0, 1.0], &[0.0, 2.0], 0.0, UNL).unwrap(), 1.0);
    }

    #[test]
    fn twe_single_points() {
        // Match of (s1, t1) plus padded (0, 0): |1 - 3| + 0 + 0.
        assert_eq!(twe(&[1.0], &[3.0], 0.5, 0.5).unwrap(), 2.0);
    }

    #[test]
    fn parameter_validation() {
        assert!(lcss(&[1.0], &[1.0], 0.0, UNL).is_err());
        assert!(erp(&[1.0], &[1.0], -1.0, UNL).is_err());
        assert!(msm(&[1.0], &[1.0], f64::NAN).is_err());
        assert!(twe(&[1.0], &[1.0], -0.1, 0.0).is_err());
        assert!(matches!(
            msm(&[1.0], &[1.0, 2.0], 1.0),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
