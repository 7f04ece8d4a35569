//! Run configuration: a single JSON document describing the space, the
//! operators, the checks to run and where to write reports.

use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;

use hardy_core::classify::{Grid, Property, Tolerances};
use hardy_core::operators::{AffineSymbol, OperatorDesc, WeightedCompOp};
use hardy_core::space::EntireFunction;
use hardy_core::{Complex64, WeightSequence};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: at `{field}`: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        field: String,
        message: String,
    },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    SelfAdjoint,
    CoIsometry,
    AdjointPair,
    NormGrowth,
    KernelProps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Report file name, relative to the output directory.
    #[serde(default)]
    pub report: Option<String>,
    #[serde(default)]
    pub format: Format,
}

impl OutputSpec {
    pub fn report_name(&self) -> String {
        self.report.clone().unwrap_or_else(|| match self.format {
            Format::Json => "report.json".into(),
            Format::Csv => "report.csv".into(),
        })
    }
}

/// A complex literal: `[re, im]` or a bare real number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexLit {
    Pair([f64; 2]),
    Real(f64),
}

impl Default for ComplexLit {
    fn default() -> Self {
        ComplexLit::Real(0.0)
    }
}

impl ComplexLit {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexLit::Pair([re, im]) => Complex64::new(re, im),
            ComplexLit::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: ComplexLit,
    pub end: ComplexLit,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circle {
    pub radius: f64,
    pub count: usize,
    #[serde(default)]
    pub center: ComplexLit,
    #[serde(default)]
    pub phase: f64,
}

/// One axis of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Range {
    List(Vec<ComplexLit>),
    Linspace { linspace: Linspace },
    Step { range: Step },
    Circle { circle: Circle },
}

impl Range {
    fn single(z: ComplexLit) -> Self {
        Range::List(vec![z])
    }

    pub fn values(&self) -> Result<Vec<Complex64>, String> {
        match self {
            Range::List(v) if v.is_empty() => Err("list must be nonempty".into()),
            Range::List(v) => Ok(v.iter().map(|z| z.value()).collect()),
            Range::Linspace { linspace: l } => {
                if l.count == 0 {
                    return Err("linspace count must be positive".into());
                }
                let (a, b) = (l.start.value(), l.end.value());
                if l.count == 1 {
                    return Ok(vec![a]);
                }
                let n = (l.count - 1) as f64;
                Ok((0..l.count).map(|k| a + (b - a) * (k as f64 / n)).collect())
            }
            Range::Step { range: s } => {
                if !(s.step > 0.0 && s.start.is_finite() && s.stop.is_finite()) || s.stop < s.start {
                    return Err("range needs step > 0 and start <= stop".into());
                }
                let count = ((s.stop - s.start) / s.step + 1e-9).floor() as usize + 1;
                if count > 1_000_000 {
                    return Err("range has too many points".into());
                }
                Ok((0..count)
                    .map(|k| Complex64::new(s.start + k as f64 * s.step, 0.0))
                    .collect())
            }
            Range::Circle { circle: c } => {
                if c.count == 0 || c.radius.is_nan() || c.radius < 0.0 {
                    return Err("circle needs count > 0 and radius >= 0".into());
                }
                let center = c.center.value();
                Ok((0..c.count)
                    .map(|k| center + Complex64::from_polar(c.radius, c.phase + TAU * k as f64 / c.count as f64))
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpsilonTemplate {
    #[default]
    One,
    Constant,
    KernelMultiple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub nu: Range,
    #[serde(default = "zero_range")]
    pub c: Range,
    #[serde(default = "one_range")]
    pub alpha: Range,
    #[serde(default = "zero_range")]
    pub q: Range,
    #[serde(default)]
    pub upsilon: UpsilonTemplate,
    #[serde(default)]
    pub unvalidated: bool,
}

fn zero_range() -> Range {
    Range::single(ComplexLit::Real(0.0))
}

fn one_range() -> Range {
    Range::single(ComplexLit::Real(1.0))
}

/// Parameters of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub nu: Complex64,
    pub c: Complex64,
    pub alpha: Complex64,
    pub q: Complex64,
}

impl SweepSpec {
    /// Cartesian product of the axes, `nu` outermost. Axes the multiplier
    /// template does not use are held at their first value.
    pub fn points(&self) -> Result<Vec<SweepPoint>, ConfigError> {
        let axis = |name: &str, r: &Range| r.values().map_err(|m| invalid(format!("sweep.{name}"), m));
        let nu = axis("nu", &self.nu)?;
        let c = axis("c", &self.c)?;
        let mut alpha = axis("alpha", &self.alpha)?;
        let mut q = axis("q", &self.q)?;
        match self.upsilon {
            UpsilonTemplate::One => {
                alpha.truncate(1);
                q.truncate(1);
            }
            UpsilonTemplate::Constant => q.truncate(1),
            UpsilonTemplate::KernelMultiple => {}
        }
        let mut out = Vec::with_capacity(nu.len() * c.len() * alpha.len() * q.len());
        for &nu in &nu {
            for &c in &c {
                for &alpha in &alpha {
                    for &q in &q {
                        out.push(SweepPoint { nu, c, alpha, q });
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn operator(&self, p: &SweepPoint) -> Result<WeightedCompOp, ConfigError> {
        let phi = if self.unvalidated {
            AffineSymbol::unvalidated(p.nu, p.c)
        } else {
            AffineSymbol::new(p.nu, p.c).map_err(|e| invalid("sweep.nu", e))?
        };
        let upsilon = match self.upsilon {
            UpsilonTemplate::One => EntireFunction::one(),
            UpsilonTemplate::Constant => EntireFunction::constant(p.alpha),
            UpsilonTemplate::KernelMultiple => EntireFunction::kernel_multiple(p.alpha, p.q),
        };
        Ok(WeightedCompOp::new(upsilon, phi))
    }
}

fn default_checks() -> Vec<Check> {
    vec![Check::SelfAdjoint, Check::CoIsometry]
}

fn default_dims() -> Vec<usize> {
    vec![32]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Weight preset: `fock`, `power_factorial:a=<f>`, `exp_power:p=<f>` or
    /// `custom:<expression>`.
    pub space: String,
    #[serde(default)]
    pub operators: Vec<OperatorDesc>,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
    /// Ordered operator index pairs for `adjoint_pair`; all ordered pairs of
    /// distinct operators when absent.
    #[serde(default)]
    pub pairs: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

/// A validated configuration with its parsed space and operators.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub space: WeightSequence,
    pub operators: Vec<WeightedCompOp>,
}

impl RunConfig {
    pub fn from_str_named(text: &str, name: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            ConfigError::Parse {
                path: name.to_string(),
                line: inner.line(),
                column: inner.column(),
                field,
                message: inner.to_string(),
            }
        })?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: name.clone(),
            source,
        })?;
        Self::from_str_named(&text, &name)
    }

    pub fn has(&self, c: Check) -> bool {
        self.checks.contains(&c)
    }

    /// Properties classified per operator.
    pub fn properties(&self) -> Vec<Property> {
        let mut out = Vec::new();
        if self.has(Check::SelfAdjoint) {
            out.push(Property::SelfAdjoint);
        }
        if self.has(Check::CoIsometry) {
            out.push(Property::CoIsometry);
            out.push(Property::Unitary);
        }
        if !out.is_empty() {
            out.push(Property::ZeroOperator);
        }
        out
    }

    /// Validates everything and builds the space and operators.
    pub fn load(self) -> Result<Loaded, ConfigError> {
        if self.dims.is_empty() || self.dims[0] == 0 || self.dims.windows(2).any(|p| p[0] >= p[1]) {
            return Err(invalid("dims", "must be nonempty, positive and strictly increasing"));
        }
        self.tolerances
            .validate()
            .map_err(|e| invalid("tolerances", e))?;
        if self.grid.values.is_empty() || self.grid.values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("grid.values", "must be nonempty and finite"));
        }
        if self.checks.is_empty() {
            return Err(invalid("checks", "must be nonempty"));
        }
        let space: WeightSequence = self.space.parse().map_err(|e| invalid("space", e))?;
        let operators = self
            .operators
            .iter()
            .enumerate()
            .map(|(i, d)| d.to_op().map_err(|e| invalid(format!("operators[{i}]"), e)))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(pairs) = &self.pairs {
            for (k, [i, j]) in pairs.iter().enumerate() {
                if *i >= operators.len() || *j >= operators.len() {
                    return Err(invalid(format!("pairs[{k}]"), "operator index out of range"));
                }
            }
        }
        if let Some(s) = &self.sweep {
            let points = s.points()?;
            for p in &points {
                s.operator(p)?;
            }
        }
        Ok(Loaded {
            config: self,
            space,
            operators,
        })
    }

    pub fn pair_list(&self, count: usize) -> Vec<[usize; 2]> {
        match &self.pairs {
            Some(p) => p.clone(),
            None => (0..count)
                .flat_map(|i| (0..count).filter(move |&j| j != i).map(move |j| [i, j]))
                .collect(),
        }
    }
}
