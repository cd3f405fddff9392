//! Classifier identifiers: `<distance>(^<gamma>|+<set>)(_<per_gamma>)?`,
//! plus `pf` and `pf+` for forests.

use std::fmt;
use std::str::FromStr;

use elastika::cost::{CostExponent, ExponentSet, ExponentSetName};
use elastika::tuning::{TunedKind, DEFAULT_PER_GAMMA};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponents {
    Fixed(CostExponent),
    Set(ExponentSetName),
}

impl Exponents {
    pub fn set(self) -> Result<ExponentSet> {
        Ok(match self {
            Exponents::Fixed(g) => ExponentSet::single(g),
            Exponents::Set(name) => ExponentSet::named(name)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassifierId {
    Tuned {
        kind: TunedKind,
        exponents: Exponents,
        per_gamma: usize,
    },
    Forest {
        plus: bool,
    },
}

impl ClassifierId {
    pub fn is_stochastic(&self) -> bool {
        matches!(
            self,
            ClassifierId::Forest { .. }
                | ClassifierId::Tuned {
                    kind: TunedKind::Adtw,
                    ..
                }
        )
    }
}

impl fmt::Display for ClassifierId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierId::Forest { plus: false } => f.write_str("pf"),
            ClassifierId::Forest { plus: true } => f.write_str("pf+"),
            ClassifierId::Tuned {
                kind,
                exponents,
                per_gamma,
            } => {
                write!(f, "{kind}")?;
                match exponents {
                    Exponents::Fixed(g) => write!(f, "^{g}")?,
                    Exponents::Set(name) => write!(f, "+{name}")?,
                }
                if *per_gamma != DEFAULT_PER_GAMMA && *kind != TunedKind::Dtwf {
                    write!(f, "_{per_gamma}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for ClassifierId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| CliError::usage(format!("invalid classifier id {s:?}: {why}"));
        match s {
            "pf" => return Ok(ClassifierId::Forest { plus: false }),
            "pf+" => return Ok(ClassifierId::Forest { plus: true }),
            _ => {}
        }
        let split = s
            .find(['^', '+'])
            .ok_or_else(|| bad("expected ^<gamma> or +<set>"))?;
        let kind: TunedKind = s[..split].parse().map_err(|_| bad("unknown distance"))?;
        let rest = &s[split + 1..];
        let (token, per_gamma) = match rest.rsplit_once('_') {
            Some((token, n)) => {
                if kind == TunedKind::Dtwf {
                    return Err(bad("dtwf has no per-exponent grid"));
                }
                let n: usize = n
                    .parse()
                    .map_err(|_| bad("per-exponent count is not an integer"))?;
                if n == 0 {
                    return Err(bad("per-exponent count must be positive"));
                }
                (token, n)
            }
            None => (rest, DEFAULT_PER_GAMMA),
        };
        let exponents = if s.as_bytes()[split] == b'^' {
            let g: f64 = token.parse().map_err(|_| bad("exponent is not a number"))?;
            Exponents::Fixed(CostExponent::new(g).map_err(|e| bad(&e.to_string()))?)
        } else {
            Exponents::Set(token.parse().map_err(|_| bad("unknown exponent set"))?)
        };
        Ok(ClassifierId::Tuned {
            kind,
            exponents,
            per_gamma,
        })
    }
}
