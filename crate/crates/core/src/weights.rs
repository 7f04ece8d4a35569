//! Weight sequences `ζ = (ζ_n)` defining the space.
//!
//! Every sequence keeps a memoized prefix of `ln ζ_n`, `ζ_n` and the ratio
//! `ζ_{n-1}/ζ_n`, all in double-double precision. Downstream code works from
//! log-weights and ratios so that `ζ_n` itself may overflow `f64` (it does for
//! `ExpPower(2)` beyond `n = 26`) without losing the series it enters.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ddouble::Dd;
use crate::expr::{Expr, ExprError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("weight ζ_{n} = {value} is not a positive number")]
    InvalidWeight { n: usize, value: f64 },
    #[error("weight ζ_{n} overflows double precision")]
    Overflow { n: usize },
    #[error("invalid weight preset: {0}")]
    InvalidPreset(String),
    #[error("custom weight expression: {0}")]
    Expr(#[from] ExprError),
    #[error("entireness estimate needs n_max >= 8, got {0}")]
    SampleRange(usize),
}

/// Which closed form (if any) generates the weights.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `ζ_n = sqrt(n!)`, the Fock space.
    Fock,
    /// `ζ_n = (n!)^a` with `a > 1/2`.
    PowerFactorial { a: f64 },
    /// `ζ_n = exp(n^p)` with `p > 1`.
    ExpPower { p: f64 },
    /// `ζ_n` given by an expression in `n`; only positivity is checked.
    Custom(Expr),
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Entry {
    /// `ln ζ_n`
    pub ln: Dd,
    /// `ζ_n`; may be `+inf` when it does not fit in a double.
    pub zeta: Dd,
    /// `ζ_{n-1} / ζ_n` (1 for `n = 0`).
    pub ratio: Dd,
    /// `ln n!`, carried along for the factorial presets.
    lnfact: Dd,
}

struct Inner {
    kind: WeightKind,
    cache: RwLock<Vec<Entry>>,
}

/// A positive weight sequence. Cheap to clone; clones share the memo cache.
#[derive(Clone)]
pub struct WeightSequence {
    inner: Arc<Inner>,
}

impl fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("WeightSequence").field(&self.to_string()).finish()
    }
}

impl PartialEq for WeightSequence {
    fn eq(&self, other: &Self) -> bool {
        self.inner.kind == other.inner.kind
    }
}

impl WeightSequence {
    fn from_kind(kind: WeightKind) -> Self {
        WeightSequence {
            inner: Arc::new(Inner {
                kind,
                cache: RwLock::new(Vec::new()),
            }),
        }
    }

    pub fn fock() -> Self {
        Self::from_kind(WeightKind::Fock)
    }

    pub fn power_factorial(a: f64) -> Result<Self, WeightError> {
        if !(a > 0.5 && a.is_finite()) {
            return Err(WeightError::InvalidPreset(format!(
                "power_factorial needs a > 1/2, got {a}"
            )));
        }
        Ok(Self::from_kind(WeightKind::PowerFactorial { a }))
    }

    pub fn exp_power(p: f64) -> Result<Self, WeightError> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(WeightError::InvalidPreset(format!(
                "exp_power needs p > 1, got {p}"
            )));
        }
        Ok(Self::from_kind(WeightKind::ExpPower { p }))
    }

    pub fn custom(expression: &str) -> Result<Self, WeightError> {
        Ok(Self::from_kind(WeightKind::Custom(Expr::parse(expression)?)))
    }

    pub fn kind(&self) -> &WeightKind {
        &self.inner.kind
    }

    /// `ζ_n`. Fails if the value is not positive or does not fit in a double.
    pub fn weight(&self, n: usize) -> Result<f64, WeightError> {
        let z = self.entry(n)?.zeta.to_f64();
        if z.is_finite() {
            Ok(z)
        } else {
            Err(WeightError::Overflow { n })
        }
    }

    /// `ln ζ_n`, finite for every preset even when `ζ_n` overflows.
    pub fn ln_weight(&self, n: usize) -> Result<f64, WeightError> {
        Ok(self.entry(n)?.ln.to_f64())
    }

    pub(crate) fn entry(&self, n: usize) -> Result<Entry, WeightError> {
        {
            let cache = self.inner.cache.read().unwrap_or_else(|e| e.into_inner());
            if let Some(e) = cache.get(n) {
                return Ok(*e);
            }
        }
        let mut cache = self.inner.cache.write().unwrap_or_else(|e| e.into_inner());
        while cache.len() <= n {
            let next = self.compute(cache.len(), cache.last())?;
            cache.push(next);
        }
        Ok(cache[n])
    }

    pub(crate) fn ln_dd(&self, n: usize) -> Result<Dd, WeightError> {
        Ok(self.entry(n)?.ln)
    }

    fn compute(&self, n: usize, prev: Option<&Entry>) -> Result<Entry, WeightError> {
        let lnfact = match prev {
            Some(p) if n >= 2 => p.lnfact + Dd::new(n as f64).ln(),
            _ => Dd::ZERO,
        };
        let (ln, zeta) = match &self.inner.kind {
            WeightKind::Fock => {
                let ln = lnfact.mul_f64(0.5);
                (ln, ln.exp())
            }
            WeightKind::PowerFactorial { a } => {
                let ln = lnfact.mul_f64(*a);
                (ln, ln.exp())
            }
            WeightKind::ExpPower { p } => {
                let ln = if n == 0 {
                    Dd::ZERO
                } else {
                    (Dd::new(n as f64).ln().mul_f64(*p)).exp()
                };
                (ln, ln.exp())
            }
            WeightKind::Custom(expr) => {
                let value = expr.eval(n as f64);
                if value.is_nan() || value <= 0.0 {
                    return Err(WeightError::InvalidWeight { n, value });
                }
                if value.is_infinite() {
                    return Err(WeightError::Overflow { n });
                }
                (Dd::new(value).ln(), Dd::new(value))
            }
        };
        let ratio = match prev {
            Some(p) => (p.ln - ln).exp(),
            None => Dd::ONE,
        };
        Ok(Entry {
            ln,
            zeta,
            ratio,
            lnfact,
        })
    }
}

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.inner.kind {
            WeightKind::Fock => f.write_str("fock"),
            WeightKind::PowerFactorial { a } => write!(f, "power_factorial:a={a}"),
            WeightKind::ExpPower { p } => write!(f, "exp_power:p={p}"),
            WeightKind::Custom(e) => write!(f, "custom:{e}"),
        }
    }
}

fn parse_param(rest: &str, key: &str) -> Result<f64, WeightError> {
    let value = rest
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| WeightError::InvalidPreset(format!("expected `{key}=<float>`, got `{rest}`")))?;
    value
        .trim()
        .parse()
        .map_err(|_| WeightError::InvalidPreset(format!("bad number `{value}`")))
}

impl FromStr for WeightSequence {
    type Err = WeightError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        match name {
            "fock" if rest.is_empty() => Ok(Self::fock()),
            "power_factorial" => Self::power_factorial(parse_param(rest, "a")?),
            "exp_power" => Self::exp_power(parse_param(rest, "p")?),
            "custom" => Self::custom(rest),
            _ => Err(WeightError::InvalidPreset(format!("unknown preset `{s}`"))),
        }
    }
}

impl Serialize for WeightSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WeightSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntirenessVerdict {
    Pass,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntirenessReport {
    /// `(n, ζ_n^{1/n})` at `n_max/8, n_max/4, n_max/2, n_max`.
    pub samples: Vec<(usize, f64)>,
    pub verdict: EntirenessVerdict,
}

/// Sampled check of the growth condition `ζ_n^{1/n} → ∞`.
///
/// The limit cannot be decided from finitely many terms, so the answer is
/// either `Pass` (the four samples increase strictly and the last exceeds 10)
/// or `Inconclusive`.
pub fn entireness_estimate(
    w: &WeightSequence,
    n_max: usize,
) -> Result<EntirenessReport, WeightError> {
    if n_max < 8 {
        return Err(WeightError::SampleRange(n_max));
    }
    // Touch every index so a bad custom generator is reported.
    w.entry(n_max)?;
    let points = [n_max / 8, n_max / 4, n_max / 2, n_max];
    let mut logs = Vec::with_capacity(4);
    for &n in &points {
        logs.push(w.ln_weight(n)? / n as f64);
    }
    let increasing = logs.windows(2).all(|p| p[1] > p[0]);
    let verdict = if increasing && logs[3] > 10f64.ln() {
        EntirenessVerdict::Pass
    } else {
        EntirenessVerdict::Inconclusive
    };
    Ok(EntirenessReport {
        samples: points.iter().zip(&logs).map(|(&n, l)| (n, l.exp())).collect(),
        verdict,
    })
}
