//! Dynamic-programming distance kernels.
//!
//! All kernels keep two rolling rows of the cost matrix; the full matrix is
//! only materialised when a warping path is requested. Indices in returned
//! paths are zero-based: a path runs from `(0, 0)` to `(L - 1, L - 1)`.

mod edit;
mod warp;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use edit::{erp, lcss, msm, twe};
pub(crate) use edit::{erp_unchecked, lcss_unchecked, msm_unchecked, twe_unchecked};
pub use warp::{adtw, ddtw, direct_alignment, dtw, dtw_cell_count, dwdtw, wdtw, wdtw_weights};
pub(crate) use warp::{adtw_value, direct_value, dtw_value, wdtw_value};

use crate::cost::CostExponent;
use crate::data::derivative_values;
use crate::error::{Error, Result};

/// Sakoe-Chiba band half-width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WarpingWindow {
    Bounded(usize),
    Unlimited,
}

impl WarpingWindow {
    /// Band half-width actually applied to series of length `len`. Windows
    /// wider than `len - 2` place no constraint and become `len - 1`.
    pub fn effective(self, len: usize) -> usize {
        let full = len.saturating_sub(1);
        match self {
            WarpingWindow::Bounded(w) if len >= 2 && w <= len - 2 => w,
            _ => full,
        }
    }
}

impl fmt::Display for WarpingWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WarpingWindow::Bounded(w) => write!(f, "{w}"),
            WarpingWindow::Unlimited => f.write_str("unlimited"),
        }
    }
}

/// Additive ADTW penalty `ω ≥ 0` for every non-diagonal step.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Penalty(f64);

impl Penalty {
    pub const ZERO: Penalty = Penalty(0.0);

    pub fn new(omega: f64) -> Result<Self> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(Error::Domain(format!(
                "penalty must be a finite nonnegative real, got {omega}"
            )));
        }
        Ok(Self(omega))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Penalty {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Penalty::new(v)
    }
}

impl From<Penalty> for f64 {
    fn from(p: Penalty) -> f64 {
        p.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult {
    pub value: f64,
    pub path: Option<Vec<(usize, usize)>>,
}

pub(crate) fn check_lengths(s: &[f64], t: &[f64]) -> Result<()> {
    if s.len() != t.len() {
        return Err(Error::LengthMismatch {
            left: s.len(),
            right: t.len(),
        });
    }
    if s.is_empty() {
        return Err(Error::usage("series must not be empty"));
    }
    Ok(())
}

/// The distance families, without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceKind {
    Sqed,
    Dtw,
    Ddtw,
    Adtw,
    Wdtw,
    Dwdtw,
    Lcss,
    Erp,
    Msm,
    Twe,
}

impl DistanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DistanceKind::Sqed => "sqed",
            DistanceKind::Dtw => "dtw",
            DistanceKind::Ddtw => "ddtw",
            DistanceKind::Adtw => "adtw",
            DistanceKind::Wdtw => "wdtw",
            DistanceKind::Dwdtw => "dwdtw",
            DistanceKind::Lcss => "lcss",
            DistanceKind::Erp => "erp",
            DistanceKind::Msm => "msm",
            DistanceKind::Twe => "twe",
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "sqed" => DistanceKind::Sqed,
            "dtw" => DistanceKind::Dtw,
            "ddtw" => DistanceKind::Ddtw,
            "adtw" => DistanceKind::Adtw,
            "wdtw" => DistanceKind::Wdtw,
            "dwdtw" => DistanceKind::Dwdtw,
            "lcss" => DistanceKind::Lcss,
            "erp" => DistanceKind::Erp,
            "msm" => DistanceKind::Msm,
            "twe" => DistanceKind::Twe,
            other => return Err(Error::usage(format!("unknown distance {other:?}"))),
        })
    }
}

/// A fully parameterised distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Distance {
    Sqed {
        gamma: CostExponent,
    },
    Dtw {
        window: WarpingWindow,
        gamma: CostExponent,
    },
    Ddtw {
        window: WarpingWindow,
        gamma: CostExponent,
    },
    Adtw {
        penalty: Penalty,
        gamma: CostExponent,
    },
    Wdtw {
        g: f64,
        gamma: CostExponent,
    },
    Dwdtw {
        g: f64,
        gamma: CostExponent,
    },
    Lcss {
        epsilon: f64,
        window: WarpingWindow,
    },
    Erp {
        gap: f64,
        window: WarpingWindow,
    },
    Msm {
        cost: f64,
    },
    Twe {
        nu: f64,
        lambda: f64,
    },
}

impl Distance {
    pub fn kind(&self) -> DistanceKind {
        match self {
            Distance::Sqed { .. } => DistanceKind::Sqed,
            Distance::Dtw { .. } => DistanceKind::Dtw,
            Distance::Ddtw { .. } => DistanceKind::Ddtw,
            Distance::Adtw { .. } => DistanceKind::Adtw,
            Distance::Wdtw { .. } => DistanceKind::Wdtw,
            Distance::Dwdtw { .. } => DistanceKind::Dwdtw,
            Distance::Lcss { .. } => DistanceKind::Lcss,
            Distance::Erp { .. } => DistanceKind::Erp,
            Distance::Msm { .. } => DistanceKind::Msm,
            Distance::Twe { .. } => DistanceKind::Twe,
        }
    }

    /// The cost exponent, for the families that use one.
    pub fn gamma(&self) -> Option<CostExponent> {
        match *self {
            Distance::Sqed { gamma }
            | Distance::Dtw { gamma, .. }
            | Distance::Ddtw { gamma, .. }
            | Distance::Adtw { gamma, .. }
            | Distance::Wdtw { gamma, .. }
            | Distance::Dwdtw { gamma, .. } => Some(gamma),
            _ => None,
        }
    }

    pub fn uses_derivative(&self) -> bool {
        matches!(self, Distance::Ddtw { .. } | Distance::Dwdtw { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::usage(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )))
            }
        };
        match *self {
            Distance::Wdtw { g, .. } | Distance::Dwdtw { g, .. } => nonneg("g", g),
            Distance::Lcss { epsilon, .. } => {
                if epsilon.is_finite() && epsilon > 0.0 {
                    Ok(())
                } else {
                    Err(Error::usage(format!(
                        "epsilon must be positive, got {epsilon}"
                    )))
                }
            }
            Distance::Erp { gap, .. } => nonneg("gap value", gap),
            Distance::Msm { cost } => nonneg("cost", cost),
            Distance::Twe { nu, lambda } => nonneg("nu", nu).and(nonneg("lambda", lambda)),
            _ => Ok(()),
        }
    }

    /// Evaluates on raw series; derivative families transform their inputs first.
    pub fn eval(&self, s: &[f64], t: &[f64]) -> Result<f64> {
        check_lengths(s, t)?;
        self.validate()?;
        if self.uses_derivative() {
            let ds = derivative_values(s)?;
            let dt = derivative_values(t)?;
            Ok(self.eval_prepared(&ds, &dt))
        } else {
            Ok(self.eval_prepared(s, t))
        }
    }

    /// Evaluates without validation. Derivative families expect already
    /// transformed inputs, so callers can reuse a precomputed derivative set.
    pub(crate) fn eval_prepared(&self, s: &[f64], t: &[f64]) -> f64 {
        match *self {
            Distance::Sqed { gamma } => direct_value(s, t, gamma),
            Distance::Dtw { window, gamma } | Distance::Ddtw { window, gamma } => {
                dtw_value(s, t, window.effective(s.len()), gamma)
            }
            Distance::Adtw { penalty, gamma } => adtw_value(s, t, penalty.value(), gamma),
            Distance::Wdtw { g, gamma } | Distance::Dwdtw { g, gamma } => {
                wdtw_value(s, t, &wdtw_weights(s.len(), g), gamma)
            }
            Distance::Lcss { epsilon, window } => {
                lcss_unchecked(s, t, epsilon, window.effective(s.len()))
            }
            Distance::Erp { gap, window } => erp_unchecked(s, t, gap, window.effective(s.len())),
            Distance::Msm { cost } => msm_unchecked(s, t, cost),
            Distance::Twe { nu, lambda } => twe_unchecked(s, t, nu, lambda),
        }
    }
}
