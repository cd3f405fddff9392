//! The pointwise cost family `λ_γ(a, b) = |a - b|^γ` and the named exponent grids.
//!
//! Exponents 0.5, 1 and 2 are evaluated with `sqrt`, `abs` and a multiply
//! respectively; every other exponent goes through `powf`. Distance kernels are
//! monomorphised over [`PointCost`] so the fast paths survive into the inner
//! loops.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evaluation strategy derived from an exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FastPath {
    Sqrt,
    Abs,
    Square,
    GeneralPow,
}

/// A validated cost exponent `γ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct CostExponent {
    gamma: f64,
}

impl CostExponent {
    pub const SQRT: CostExponent = CostExponent { gamma: 0.5 };
    pub const ABS: CostExponent = CostExponent { gamma: 1.0 };
    pub const SQUARE: CostExponent = CostExponent { gamma: 2.0 };

    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::Domain(format!(
                "cost exponent must be a positive finite real, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    #[inline]
    pub fn gamma(self) -> f64 {
        self.gamma
    }

    #[inline]
    pub fn fast_path(self) -> FastPath {
        if self.gamma == 0.5 {
            FastPath::Sqrt
        } else if self.gamma == 1.0 {
            FastPath::Abs
        } else if self.gamma == 2.0 {
            FastPath::Square
        } else {
            FastPath::GeneralPow
        }
    }

    /// `|a - b|^γ` through the fast path, without input validation.
    #[inline]
    pub fn eval(self, a: f64, b: f64) -> f64 {
        let d = a - b;
        match self.fast_path() {
            FastPath::Sqrt => d.abs().sqrt(),
            FastPath::Abs => d.abs(),
            FastPath::Square => d * d,
            FastPath::GeneralPow => d.abs().powf(self.gamma),
        }
    }

    /// `|a - b|^γ` forced through `powf`, bypassing the fast paths.
    #[inline]
    pub fn eval_general(self, a: f64, b: f64) -> f64 {
        (a - b).abs().powf(self.gamma)
    }
}

impl TryFrom<f64> for CostExponent {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        CostExponent::new(value)
    }
}

impl From<CostExponent> for f64 {
    fn from(value: CostExponent) -> Self {
        value.gamma
    }
}

impl fmt::Display for CostExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gamma)
    }
}

/// Checked `|a - b|^γ`.
pub fn cost(a: f64, b: f64, gamma: CostExponent) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("non-finite cost input ({a}, {b})")));
    }
    Ok(gamma.eval(a, b))
}

/// A pointwise cost specialised at compile time.
pub trait PointCost: Copy + Send + Sync {
    fn of_diff(self, d: f64) -> f64;

    #[inline]
    fn eval(self, a: f64, b: f64) -> f64 {
        self.of_diff(a - b)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SqrtCost;

#[derive(Debug, Clone, Copy)]
pub struct AbsCost;

#[derive(Debug, Clone, Copy)]
pub struct SquareCost;

#[derive(Debug, Clone, Copy)]
pub struct PowCost(pub f64);

impl PointCost for SqrtCost {
    #[inline]
    fn of_diff(self, d: f64) -> f64 {
        d.abs().sqrt()
    }
}

impl PointCost for AbsCost {
    #[inline]
    fn of_diff(self, d: f64) -> f64 {
        d.abs()
    }
}

impl PointCost for SquareCost {
    #[inline]
    fn of_diff(self, d: f64) -> f64 {
        d * d
    }
}

impl PointCost for PowCost {
    #[inline]
    fn of_diff(self, d: f64) -> f64 {
        d.abs().powf(self.0)
    }
}

/// Binds `$c` to the [`PointCost`] matching `$gamma`'s fast path and evaluates `$body`.
macro_rules! with_point_cost {
    ($gamma:expr, $c:ident => $body:expr) => {{
        let gamma: $crate::cost::CostExponent = $gamma;
        match gamma.fast_path() {
            $crate::cost::FastPath::Sqrt => {
                let $c = $crate::cost::SqrtCost;
                $body
            }
            $crate::cost::FastPath::Abs => {
                let $c = $crate::cost::AbsCost;
                $body
            }
            $crate::cost::FastPath::Square => {
                let $c = $crate::cost::SquareCost;
                $body
            }
            $crate::cost::FastPath::GeneralPow => {
                let $c = $crate::cost::PowCost(gamma.gamma());
                $body
            }
        }
    }};
}
pub(crate) use with_point_cost;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentSetName {
    A,
    B,
    C,
    Custom,
}

impl fmt::Display for ExponentSetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExponentSetName::A => "a",
            ExponentSetName::B => "b",
            ExponentSetName::C => "c",
            ExponentSetName::Custom => "custom",
        })
    }
}

impl FromStr for ExponentSetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(ExponentSetName::A),
            "b" => Ok(ExponentSetName::B),
            "c" => Ok(ExponentSetName::C),
            other => Err(Error::usage(format!(
                "unknown exponent set {other:?} (expected a, b or c)"
            ))),
        }
    }
}

/// An ordered, strictly increasing grid of exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    name: ExponentSetName,
    exponents: Vec<CostExponent>,
}

impl ExponentSet {
    /// The grids `a`, `b` and `c`. Reciprocals are stored as `1.0 / n`.
    pub fn named(name: ExponentSetName) -> Result<Self> {
        let raw: Vec<f64> = match name {
            ExponentSetName::A => vec![1.0 / 2.0, 1.0 / 1.5, 1.0, 1.5, 2.0],
            ExponentSetName::B => vec![
                1.0 / 5.0,
                1.0 / 4.0,
                1.0 / 3.0,
                1.0 / 2.0,
                1.0 / 1.5,
                1.0,
                1.5,
                2.0,
                3.0,
                4.0,
                5.0,
            ],
            ExponentSetName::C => vec![
                1.0 / 2.0,
                1.0 / 1.75,
                1.0 / 1.5,
                1.0 / 1.25,
                1.0,
                1.25,
                1.5,
                1.75,
                2.0,
            ],
            ExponentSetName::Custom => {
                return Err(Error::usage("custom exponent sets need explicit values"))
            }
        };
        let exponents = raw
            .into_iter()
            .map(CostExponent::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { name, exponents })
    }

    pub fn custom(exponents: Vec<CostExponent>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::usage("exponent set must not be empty"));
        }
        if exponents.windows(2).any(|w| w[0].gamma() >= w[1].gamma()) {
            return Err(Error::usage("exponents must be strictly increasing"));
        }
        Ok(Self {
            name: ExponentSetName::Custom,
            exponents,
        })
    }

    pub fn single(gamma: CostExponent) -> Self {
        Self {
            name: ExponentSetName::Custom,
            exponents: vec![gamma],
        }
    }

    pub fn name(&self) -> ExponentSetName {
        self.name
    }

    pub fn exponents(&self) -> &[CostExponent] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn contains(&self, gamma: CostExponent) -> bool {
        self.exponents.iter().any(|g| g.gamma() == gamma.gamma())
    }
}

/// `exponent_set("a" | "b" | "c")`.
pub fn exponent_set(name: &str) -> Result<ExponentSet> {
    ExponentSet::named(name.parse()?)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn g(x: f64) -> CostExponent {
        CostExponent::new(x).unwrap()
    }

    #[test]
    fn cost_examples() {
        assert_eq!(cost(3.0, 1.0, g(2.0)).unwrap(), 4.0);
        assert_eq!(cost(0.0, 4.0, g(0.5)).unwrap(), 2.0);
        assert_eq!(cost(1.0, 0.0, g(1.0 / 1.5)).unwrap(), 1.0);
        for gamma in [0.2, 0.5, 1.0, 1.5, 2.0, 5.0] {
            assert_eq!(cost(-7.25, -7.25, g(gamma)).unwrap(), 0.0);
        }
    }

    #[test]
    fn cost_rejects_non_finite() {
        assert!(matches!(cost(f64::NAN, 1.0, g(1.0)), Err(Error::Domain(_))));
        assert!(matches!(
            cost(0.0, f64::INFINITY, g(1.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn exponent_validation() {
        assert!(CostExponent::new(0.0).is_err());
        assert!(CostExponent::new(-1.0).is_err());
        assert!(CostExponent::new(f64::NAN).is_err());
        assert_eq!(g(0.5).fast_path(), FastPath::Sqrt);
        assert_eq!(g(1.0).fast_path(), FastPath::Abs);
        assert_eq!(g(2.0).fast_path(), FastPath::Square);
        assert_eq!(g(1.5).fast_path(), FastPath::GeneralPow);
        assert_eq!(g(1.0 / 1.5).fast_path(), FastPath::GeneralPow);
    }

    #[test]
    fn named_sets() {
        let a = exponent_set("a").unwrap();
        assert_eq!(a.len(), 5);
        assert_eq!(a.exponents()[2].gamma(), 1.0);
        assert_eq!(a.exponents()[1].gamma(), 1.0 / 1.5);

        let b = exponent_set("B").unwrap();
        assert_eq!(b.len(), 11);
        assert_eq!(b.exponents()[0].gamma(), 0.2);
        assert_eq!(b.exponents()[10].gamma(), 5.0);

        let c = exponent_set("c").unwrap();
        assert_eq!(c.len(), 9);
        assert!(c
            .exponents()
            .iter()
            .all(|e| (0.5..=2.0).contains(&e.gamma())));

        for set in [a, b, c] {
            assert!(set
                .exponents()
                .windows(2)
                .all(|w| w[0].gamma() < w[1].gamma()));
        }
        assert!(matches!(exponent_set("d"), Err(Error::Usage(_))));
    }

    #[test]
    fn custom_sets_must_increase() {
        assert!(ExponentSet::custom(vec![g(1.0), g(1.0)]).is_err());
        assert!(ExponentSet::custom(vec![]).is_err());
        let s = ExponentSet::custom(vec![g(0.5), g(3.0)]).unwrap();
        assert!(s.contains(g(3.0)));
        assert!(!s.contains(g(2.0)));
    }

    #[test]
    fn serde_round_trip_rejects_invalid() {
        let json = serde_json::to_string(&g(1.5)).unwrap();
        assert_eq!(json, "1.5");
        assert!(serde_json::from_str::<CostExponent>("-2.0").is_err());
    }

    proptest! {
        #[test]
        fn fast_paths_match_general_pow(a in -10.0f64..10.0, b in -10.0f64..10.0) {
            for gamma in [0.5, 1.0, 2.0] {
                let e = g(gamma);
                let fast = e.eval(a, b);
                let general = e.eval_general(a, b);
                prop_assert!((fast - general).abs() <= 1e-12 * fast.max(1.0));
            }
        }

        #[test]
        fn symmetric_exactly(a in -1e3f64..1e3, b in -1e3f64..1e3, gamma in 0.1f64..6.0) {
            let e = g(gamma);
            prop_assert_eq!(e.eval(a, b), e.eval(b, a));
        }

        #[test]
        fn ratio_increases_with_gamma(d1 in 0.01f64..5.0, extra in 0.01f64..5.0) {
            let d2 = d1 + extra;
            let set = exponent_set("b").unwrap();
            let ratios: Vec<f64> = set
                .exponents()
                .iter()
                .map(|e| e.eval(d2, 0.0) / e.eval(d1, 0.0))
                .collect();
            prop_assert!(ratios.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
