//! Symbolic classification of weighted composition operators with affine
//! symbols, cross-checked by finite-section residuals and kernel-identity
//! sampling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::{
    self, coefficients_match, weighted_comp_section, adjoint_section, AffineSymbol, Exactness,
    OperatorDesc, OperatorError, UpsilonForm, WeightedCompOp, FORM_TERMS,
};
use crate::space::{self, inner_product, kernel_eval, EntireFunction, EvalConfig, SpaceError};
use crate::weights::WeightSequence;

/// Absolute tolerance for exact comparisons of symbol parameters.
pub const INPUT_TOL: f64 = 1e-14;
/// Relative tolerance for multiplier form recognition.
pub const FORM_REL: f64 = 1e-10;
/// Coefficients below this count as zero in the zero-operator check.
pub const ZERO_COEFF: f64 = 1e-12;
pub const DEFAULT_DIM: usize = 32;
pub const ISOMETRY_BASIS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("invalid tolerances: {0}")]
    Tolerances(String),
    #[error("sampling grid must be nonempty")]
    EmptyGrid,
}

impl From<SpaceError> for ClassifyError {
    fn from(e: SpaceError) -> Self {
        ClassifyError::Operator(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub tol_pass: f64,
    pub tol_fail: f64,
    pub eval_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_pass: 1e-9,
            tol_fail: 1e-4,
            eval_tol: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        let t = self;
        if !(t.tol_pass > 0.0 && t.eval_tol > 0.0 && t.tol_fail.is_finite()) {
            return Err(ClassifyError::Tolerances("tolerances must be positive and finite".into()));
        }
        if t.tol_pass >= t.tol_fail {
            return Err(ClassifyError::Tolerances(format!(
                "tol_pass ({:e}) must be below tol_fail ({:e})",
                t.tol_pass, t.tol_fail
            )));
        }
        if t.eval_tol > t.tol_pass / 100.0 {
            return Err(ClassifyError::Tolerances(format!(
                "eval_tol ({:e}) must be at most tol_pass / 100",
                t.eval_tol
            )));
        }
        Ok(())
    }
}

/// Sample points `a + bi` for `a, b` drawn from `values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub values: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            values: vec![-1.5, -0.9, -0.3, 0.3, 0.9, 1.5],
        }
    }
}

impl Grid {
    pub fn points(&self) -> Vec<Complex64> {
        let v = &self.values;
        v.iter()
            .flat_map(|&re| v.iter().map(move |&im| Complex64::new(re, im)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
}

impl Condition {
    fn new(name: &str, holds: bool) -> Self {
        Condition {
            name: name.to_string(),
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Symbolic {
    True,
    False,
    /// Both multipliers vanish, so both operators are zero.
    ZeroOperatorPair,
    /// Only a necessary condition is known; `conditions` says which parts hold.
    NecessaryOnly {
        form: String,
        conditions: Vec<Condition>,
    },
    NotApplicable,
    Inconclusive {
        reason: String,
    },
}

impl Symbolic {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Symbolic::True
        } else {
            Symbolic::False
        }
    }

    /// For `NecessaryOnly`, whether every listed condition holds.
    pub fn conditions_hold(&self) -> Option<bool> {
        match self {
            Symbolic::NecessaryOnly { conditions, .. } => Some(conditions.iter().all(|c| c.holds)),
            _ => None,
        }
    }
}

fn near(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < INPUT_TOL
}

fn is_zero(a: Complex64) -> bool {
    a.norm() < INPUT_TOL
}

fn is_real(a: Complex64) -> bool {
    a.im.abs() < INPUT_TOL * a.norm().max(1.0)
}

fn upsilon_at_zero(op: &WeightedCompOp, w: &WeightSequence) -> Result<Complex64, SpaceError> {
    op.upsilon().coeff(0, w)
}

fn vanishes(f: &EntireFunction, w: &WeightSequence) -> Result<bool, SpaceError> {
    for n in 0..FORM_TERMS {
        if f.onb_coeff(n, w)?.norm() >= ZERO_COEFF {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `C*_{Φ1} = C_{Φ2}`: true iff both constants vanish and
/// `conj(μ) = ν`.
pub fn adjoint_pair_composition(phi1: &AffineSymbol, phi2: &AffineSymbol) -> Symbolic {
    Symbolic::from_bool(
        is_zero(phi1.c()) && is_zero(phi2.c()) && near(phi1.nu().conj(), phi2.nu()),
    )
}

/// Whether `C_Φ` is self-adjoint: `c = 0` and `ν` real.
pub fn self_adjoint_composition(phi: &AffineSymbol) -> Symbolic {
    Symbolic::from_bool(is_zero(phi.c()) && phi.nu().im.abs() < INPUT_TOL)
}

/// Whether `C_Φ` is a co-isometry (equivalently unitary): `c = 0`, `|ν| = 1`.
pub fn co_isometry_composition(phi: &AffineSymbol) -> Symbolic {
    Symbolic::from_bool(is_zero(phi.c()) && (phi.nu().norm() - 1.0).abs() < INPUT_TOL)
}

/// Whether `C*_{Υ1,Φ1} = C_{Υ2,Φ2}`.
///
/// The multipliers must be `Υ1 = ζ_0² Υ1(0) K_{Φ2(0)}` and
/// `Υ2 = ζ_0² conj(Υ1(0)) K_{Φ1(0)}`. If `Υ1(0) = 0` both multipliers vanish.
/// Otherwise the kernel identity
/// `K_z(Φ2(0)) K_{Φ1(z)}(w) = K_{Φ1(0)}(w) K_z(Φ2(w))` is sampled on the grid.
pub fn adjoint_pair_weighted(
    op1: &WeightedCompOp,
    op2: &WeightedCompOp,
    w: &WeightSequence,
    grid: &Grid,
    tol: &Tolerances,
) -> Symbolic {
    match adjoint_pair_weighted_inner(op1, op2, w, grid, tol) {
        Ok(s) => s,
        Err(e) => Symbolic::Inconclusive {
            reason: e.to_string(),
        },
    }
}

fn adjoint_pair_weighted_inner(
    op1: &WeightedCompOp,
    op2: &WeightedCompOp,
    w: &WeightSequence,
    grid: &Grid,
    tol: &Tolerances,
) -> Result<Symbolic, ClassifyError> {
    let cfg = EvalConfig::with_tol(tol.eval_tol);
    let (phi1, phi2) = (op1.phi(), op2.phi());
    let u10 = upsilon_at_zero(op1, w)?;
    if is_zero(u10) {
        let both = vanishes(op1.upsilon(), w)? && vanishes(op2.upsilon(), w)?;
        return Ok(if both {
            Symbolic::ZeroOperatorPair
        } else {
            Symbolic::False
        });
    }
    let z0sq = w.weight(0).map_err(SpaceError::from)?.powi(2);
    let f1 = EntireFunction::kernel_multiple(z0sq * u10, phi2.eval(Complex64::new(0.0, 0.0)));
    let f2 = EntireFunction::kernel_multiple(z0sq * u10.conj(), phi1.eval(Complex64::new(0.0, 0.0)));
    if !coefficients_match(op1.upsilon(), &f1, FORM_TERMS, FORM_REL, w)?
        || !coefficients_match(op2.upsilon(), &f2, FORM_TERMS, FORM_REL, w)?
    {
        return Ok(Symbolic::False);
    }
    let pts = grid.points();
    if pts.is_empty() {
        return Err(ClassifyError::EmptyGrid);
    }
    let p10 = phi1.c();
    let p20 = phi2.c();
    for &z in &pts {
        let a = kernel_eval(z, p20, w, &cfg)?;
        for &x in &pts {
            let lhs = a * kernel_eval(phi1.eval(z), x, w, &cfg)?;
            let rhs = kernel_eval(p10, x, w, &cfg)? * kernel_eval(z, phi2.eval(x), w, &cfg)?;
            let scale = lhs.norm().max(rhs.norm()).max(1.0);
            if (lhs - rhs).norm() > tol.tol_pass * scale {
                return Ok(Symbolic::False);
            }
        }
    }
    Ok(Symbolic::True)
}

/// Self-adjointness of `C_{Υ,Φ}`.
///
/// * `c = 0`: iff `Υ` is a real constant `κ` and `κ = 0` or `ν` is real.
/// * `ν = 0`: iff `Υ = α K_c` with `α = ζ_0² conj(Υ(0))` real.
/// * otherwise only necessary: `Υ = α K_{Φ(0)}` with `α` real, and `ν` real.
pub fn self_adjoint_weighted(op: &WeightedCompOp, w: &WeightSequence) -> Symbolic {
    if op.form() == UpsilonForm::One {
        return self_adjoint_composition(op.phi());
    }
    match self_adjoint_weighted_inner(op, w) {
        Ok(s) => s,
        Err(e) => Symbolic::Inconclusive {
            reason: e.to_string(),
        },
    }
}

fn self_adjoint_weighted_inner(op: &WeightedCompOp, w: &WeightSequence) -> Result<Symbolic, SpaceError> {
    let (nu, c) = (op.phi().nu(), op.phi().c());
    let u0 = upsilon_at_zero(op, w)?;
    if is_zero(c) {
        let constant = coefficients_match(op.upsilon(), &EntireFunction::constant(u0), FORM_TERMS, FORM_REL, w)?;
        let ok = constant && is_real(u0) && (is_zero(u0) || nu.im.abs() < INPUT_TOL);
        return Ok(Symbolic::from_bool(ok));
    }
    let alpha = w.weight(0)?.powi(2) * u0.conj();
    let form = coefficients_match(op.upsilon(), &EntireFunction::kernel_multiple(alpha, c), FORM_TERMS, FORM_REL, w)?;
    if is_zero(nu) {
        return Ok(Symbolic::from_bool(form && is_real(alpha)));
    }
    Ok(Symbolic::NecessaryOnly {
        form: "Υ = α·K_{Φ(0)}, α = ζ_0²·conj(Υ(0)) real, ν real".into(),
        conditions: vec![
            Condition::new("upsilon_is_kernel_multiple", form),
            Condition::new("alpha_real", is_real(alpha)),
            Condition::new("nu_real", nu.im.abs() < INPUT_TOL),
        ],
    })
}

/// Co-isometry of `C_{Υ,Φ}` (and unitarity, which is equivalent whenever the
/// answer is exact).
///
/// * `c = 0`: iff `Υ` is a constant of modulus one and `|ν| = 1`.
/// * `ν = 0`: never.
/// * otherwise only necessary: with `d = -c` and `q = conj(ν) d`,
///   `Υ = α K_q / ‖K_q‖`, `|α| = ζ_0`, `|ν| = 1`.
pub fn co_isometry_weighted(op: &WeightedCompOp, w: &WeightSequence, tol: &Tolerances) -> Symbolic {
    if op.form() == UpsilonForm::One {
        return co_isometry_composition(op.phi());
    }
    match co_isometry_weighted_inner(op, w, tol) {
        Ok(s) => s,
        Err(e) => Symbolic::Inconclusive {
            reason: e.to_string(),
        },
    }
}

fn co_isometry_weighted_inner(
    op: &WeightedCompOp,
    w: &WeightSequence,
    tol: &Tolerances,
) -> Result<Symbolic, SpaceError> {
    let (nu, c) = (op.phi().nu(), op.phi().c());
    let unit_nu = (nu.norm() - 1.0).abs() < INPUT_TOL;
    let u0 = upsilon_at_zero(op, w)?;
    if is_zero(c) {
        let constant = coefficients_match(op.upsilon(), &EntireFunction::constant(u0), FORM_TERMS, FORM_REL, w)?;
        return Ok(Symbolic::from_bool(constant && (u0.norm() - 1.0).abs() < INPUT_TOL && unit_nu));
    }
    if is_zero(nu) {
        return Ok(Symbolic::False);
    }
    let d = -c;
    let q = nu.conj() * d;
    let cfg = EvalConfig::with_tol(tol.eval_tol);
    let kq_norm = kernel_eval(q, q, w, &cfg)?.re.sqrt();
    let z0 = w.weight(0)?;
    // Υ(0) = α K_q(0) / ‖K_q‖ = α / (ζ_0² ‖K_q‖)
    let alpha = u0 * z0 * z0 * kq_norm;
    let form = coefficients_match(
        op.upsilon(),
        &EntireFunction::kernel_multiple(alpha / kq_norm, q),
        FORM_TERMS,
        FORM_REL,
        w,
    )?;
    Ok(Symbolic::NecessaryOnly {
        form: "Υ = α·K_q/‖K_q‖, q = conj(ν)·d, d = -c, |α| = ζ_0, |ν| = 1".into(),
        conditions: vec![
            Condition::new("upsilon_is_normalized_kernel_multiple", form),
            Condition::new("alpha_modulus_is_zeta0", (alpha.norm() - z0).abs() < FORM_REL),
            Condition::new("nu_unimodular", unit_nu),
        ],
    })
}

/// Whether `C_{Υ,Φ} = 0`, which happens iff `Υ ≡ 0`.
pub fn zero_operator(op: &WeightedCompOp, w: &WeightSequence) -> Symbolic {
    match vanishes(op.upsilon(), w) {
        Ok(b) => Symbolic::from_bool(b),
        Err(e) => Symbolic::Inconclusive {
            reason: e.to_string(),
        },
    }
}

fn max_entry(m: &nalgebra::DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |S - S*|` over the entries of the `dim`-section.
pub fn numeric_self_adjoint(
    op: &WeightedCompOp,
    dim: usize,
    w: &WeightSequence,
) -> Result<(f64, Exactness), OperatorError> {
    let s = weighted_comp_section(op, dim, w)?;
    Ok((max_entry(&(&s.entries - s.entries.adjoint())), s.exactness))
}

/// `max |Υ(w) conj(Υ(z)) K_{Φ(z)}(Φ(w)) - K_z(w)|` over all grid pairs.
pub fn numeric_co_isometry(
    op: &WeightedCompOp,
    w: &WeightSequence,
    grid: &Grid,
    tol: f64,
) -> Result<f64, OperatorError> {
    let cfg = EvalConfig::with_tol(tol);
    let pts = grid.points();
    let phi = op.phi();
    let ups: Vec<Complex64> = pts
        .iter()
        .map(|&z| op.upsilon().eval(z, w, &cfg))
        .collect::<Result<_, _>>()?;
    let mut worst = 0.0f64;
    for (i, &z) in pts.iter().enumerate() {
        for (j, &x) in pts.iter().enumerate() {
            let lhs = ups[j] * ups[i].conj() * kernel_eval(phi.eval(z), phi.eval(x), w, &cfg)?;
            let rhs = kernel_eval(z, x, w, &cfg)?;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// `max |S S* - I|` over the entries of the `dim`-section. Advisory only: the
/// section of `T T*` is not the product of sections in general.
pub fn section_co_isometry_residual(
    op: &WeightedCompOp,
    dim: usize,
    w: &WeightSequence,
) -> Result<f64, OperatorError> {
    let s = weighted_comp_section(op, dim, w)?.entries;
    let prod = &s * s.adjoint() - nalgebra::DMatrix::identity(dim, dim);
    Ok(max_entry(&prod))
}

/// `max |⟨C e_j, C e_k⟩ - δ_jk|` for `j, k < count`.
pub fn numeric_isometry(
    op: &WeightedCompOp,
    count: usize,
    w: &WeightSequence,
    tol: f64,
) -> Result<f64, OperatorError> {
    let cfg = EvalConfig::with_tol(tol);
    let images: Vec<EntireFunction> = (0..count)
        .map(|j| operators::apply(op, &EntireFunction::basis(j, w)?))
        .collect::<Result<_, _>>()?;
    let mut worst = 0.0f64;
    for j in 0..count {
        for k in j..count {
            let ip = inner_product(&images[j], &images[k], w, &cfg)?.value;
            let delta = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((ip - delta).norm());
        }
    }
    Ok(worst)
}

/// Frobenius norm of `S1* - S2` for the `dim`-sections.
pub fn numeric_adjoint_pair(
    op1: &WeightedCompOp,
    op2: &WeightedCompOp,
    dim: usize,
    w: &WeightSequence,
) -> Result<f64, OperatorError> {
    let s1 = adjoint_section(&weighted_comp_section(op1, dim, w)?);
    let s2 = weighted_comp_section(op2, dim, w)?;
    Ok((s1.entries - s2.entries).norm())
}

/// `max |S|` over the entries of the `dim`-section.
pub fn numeric_zero(op: &WeightedCompOp, dim: usize, w: &WeightSequence) -> Result<f64, OperatorError> {
    Ok(max_entry(&weighted_comp_section(op, dim, w)?.entries))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    SelfAdjoint,
    CoIsometry,
    Unitary,
    ZeroOperator,
    AdjointPair,
}

impl Property {
    pub fn as_str(&self) -> &'static str {
        match self {
            Property::SelfAdjoint => "self_adjoint",
            Property::CoIsometry => "co_isometry",
            Property::Unitary => "unitary",
            Property::ZeroOperator => "zero_operator",
            Property::AdjointPair => "adjoint_pair",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Numeric {
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exactness: Option<Exactness>,
    /// Section residual `max |S S* - I|`, reported but not used for agreement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub advisory_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Numeric {
    fn new(method: &str) -> Self {
        Numeric {
            method: method.to_string(),
            dim: None,
            grid_points: None,
            residual: None,
            exactness: None,
            advisory_residual: None,
            error: None,
        }
    }

    fn with_result(mut self, r: Result<f64, OperatorError>) -> Self {
        match r {
            Ok(v) => self.residual = Some(v),
            Err(e) => self.error = Some(e.to_string()),
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Agree,
    Disagree,
    Inconclusive,
    /// The property holds numerically but a necessary condition fails.
    ParadoxCandidate,
}

/// Compares a symbolic verdict with a numeric residual.
pub fn agreement(symbolic: &Symbolic, residual: Option<f64>, tol: &Tolerances) -> Agreement {
    let Some(r) = residual.filter(|r| r.is_finite()) else {
        return Agreement::Inconclusive;
    };
    let pass = r < tol.tol_pass;
    let fail = r > tol.tol_fail;
    match symbolic {
        Symbolic::True | Symbolic::ZeroOperatorPair => match (pass, fail) {
            (true, _) => Agreement::Agree,
            (_, true) => Agreement::Disagree,
            _ => Agreement::Inconclusive,
        },
        Symbolic::False => match (pass, fail) {
            (_, true) => Agreement::Agree,
            (true, _) => Agreement::Disagree,
            _ => Agreement::Inconclusive,
        },
        Symbolic::NecessaryOnly { .. } => {
            if pass {
                if symbolic.conditions_hold() == Some(true) {
                    Agreement::Agree
                } else {
                    Agreement::ParadoxCandidate
                }
            } else if fail {
                Agreement::Agree
            } else {
                Agreement::Inconclusive
            }
        }
        Symbolic::NotApplicable => Agreement::Agree,
        Symbolic::Inconclusive { .. } => Agreement::Inconclusive,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictEntry {
    pub property: Property,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub with: Option<OperatorDesc>,
    pub symbolic: Symbolic,
    pub numeric: Numeric,
    pub agreement: Agreement,
    pub agree: bool,
}

impl VerdictEntry {
    fn new(property: Property, symbolic: Symbolic, numeric: Numeric, tol: &Tolerances) -> Self {
        let agreement = agreement(&symbolic, numeric.residual, tol);
        VerdictEntry {
            property,
            with: None,
            symbolic,
            numeric,
            agreement,
            agree: !matches!(agreement, Agreement::Disagree | Agreement::ParadoxCandidate),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub dim: usize,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualCurve {
    pub property: Property,
    pub method: String,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub operator: OperatorDesc,
    pub description: String,
    pub verdicts: Vec<VerdictEntry>,
    pub residual_curves: Vec<ResidualCurve>,
    pub tolerances: Tolerances,
}

impl ClassificationReport {
    pub fn all_agree(&self) -> bool {
        self.verdicts.iter().all(|v| v.agree)
    }

    pub fn verdict(&self, p: Property) -> Option<&VerdictEntry> {
        self.verdicts.iter().find(|v| v.property == p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyConfig {
    pub tolerances: Tolerances,
    /// Section dimensions; the largest is used for the headline residual.
    pub dims: Vec<usize>,
    pub grid: Grid,
    pub properties: Vec<Property>,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            tolerances: Tolerances::default(),
            dims: vec![DEFAULT_DIM],
            grid: Grid::default(),
            properties: vec![
                Property::SelfAdjoint,
                Property::CoIsometry,
                Property::Unitary,
                Property::ZeroOperator,
            ],
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        self.tolerances.validate()?;
        if self.dims.is_empty() || self.dims.windows(2).any(|p| p[0] >= p[1]) || self.dims[0] == 0 {
            return Err(OperatorError::BadDims.into());
        }
        if self.grid.values.is_empty() {
            return Err(ClassifyError::EmptyGrid);
        }
        Ok(())
    }

    fn dim(&self) -> usize {
        *self.dims.last().unwrap_or(&DEFAULT_DIM)
    }
}

fn curve<F>(property: Property, method: &str, dims: &[usize], mut f: F) -> ResidualCurve
where
    F: FnMut(usize) -> Result<f64, OperatorError>,
{
    ResidualCurve {
        property,
        method: method.to_string(),
        points: dims
            .iter()
            .map(|&dim| CurvePoint {
                dim,
                residual: f(dim).ok(),
            })
            .collect(),
    }
}

/// Runs the requested symbolic predicates and numeric verifiers.
pub fn classify(
    op: &WeightedCompOp,
    w: &WeightSequence,
    cfg: &ClassifyConfig,
) -> Result<ClassificationReport, ClassifyError> {
    cfg.validate()?;
    let tol = &cfg.tolerances;
    let dim = cfg.dim();
    let npts = cfg.grid.points().len();
    let mut verdicts = Vec::new();
    let mut curves = Vec::new();
    let mut co_iso_residual: Option<Result<f64, OperatorError>> = None;
    for &p in &cfg.properties {
        match p {
            Property::SelfAdjoint => {
                let mut num = Numeric::new("section_hermitian_residual");
                num.dim = Some(dim);
                match numeric_self_adjoint(op, dim, w) {
                    Ok((r, ex)) => {
                        num.residual = Some(r);
                        num.exactness = Some(ex);
                    }
                    Err(e) => num.error = Some(e.to_string()),
                }
                verdicts.push(VerdictEntry::new(p, self_adjoint_weighted(op, w), num, tol));
                if cfg.dims.len() > 1 {
                    curves.push(curve(p, "section_hermitian_residual", &cfg.dims, |n| {
                        numeric_self_adjoint(op, n, w).map(|r| r.0)
                    }));
                }
            }
            Property::CoIsometry | Property::Unitary => {
                let r = match &co_iso_residual {
                    Some(r) => r.clone(),
                    None => {
                        let r = numeric_co_isometry(op, w, &cfg.grid, tol.eval_tol);
                        co_iso_residual = Some(r.clone());
                        r
                    }
                };
                let symbolic = co_isometry_weighted(op, w, tol);
                let mut num = if p == Property::CoIsometry {
                    Numeric::new("kernel_identity_grid").with_result(r)
                } else {
                    let iso = numeric_isometry(op, ISOMETRY_BASIS, w, tol.eval_tol);
                    let combined = match (r, iso) {
                        (Ok(a), Ok(b)) => Ok(a.max(b)),
                        (Err(e), _) | (_, Err(e)) => Err(e),
                    };
                    let mut n = Numeric::new("kernel_identity_grid_and_basis_isometry").with_result(combined);
                    n.dim = Some(ISOMETRY_BASIS);
                    n
                };
                num.grid_points = Some(npts);
                if p == Property::CoIsometry {
                    num.advisory_residual = section_co_isometry_residual(op, dim, w).ok();
                    if cfg.dims.len() > 1 {
                        curves.push(curve(p, "section_co_isometry_residual", &cfg.dims, |n| {
                            section_co_isometry_residual(op, n, w)
                        }));
                    }
                }
                verdicts.push(VerdictEntry::new(p, symbolic, num, tol));
            }
            Property::ZeroOperator => {
                let mut num = Numeric::new("section_max_entry").with_result(numeric_zero(op, dim, w));
                num.dim = Some(dim);
                verdicts.push(VerdictEntry::new(p, zero_operator(op, w), num, tol));
            }
            Property::AdjointPair => {}
        }
    }
    Ok(ClassificationReport {
        operator: OperatorDesc::from_op(op)?,
        description: op.to_string(),
        verdicts,
        residual_curves: curves,
        tolerances: *tol,
    })
}

/// Adjoint-pair verdict for `(op1, op2)`: whether `C*_1 = C_2`.
pub fn classify_pair(
    op1: &WeightedCompOp,
    op2: &WeightedCompOp,
    w: &WeightSequence,
    cfg: &ClassifyConfig,
) -> Result<ClassificationReport, ClassifyError> {
    cfg.validate()?;
    let tol = &cfg.tolerances;
    let dim = cfg.dim();
    let symbolic = if op1.form() == UpsilonForm::One && op2.form() == UpsilonForm::One {
        adjoint_pair_composition(op1.phi(), op2.phi())
    } else {
        adjoint_pair_weighted(op1, op2, w, &cfg.grid, tol)
    };
    let mut num = Numeric::new("section_adjoint_difference_frobenius")
        .with_result(numeric_adjoint_pair(op1, op2, dim, w));
    num.dim = Some(dim);
    let mut entry = VerdictEntry::new(Property::AdjointPair, symbolic, num, tol);
    entry.with = Some(OperatorDesc::from_op(op2)?);
    let mut curves = Vec::new();
    if cfg.dims.len() > 1 {
        curves.push(curve(
            Property::AdjointPair,
            "section_adjoint_difference_frobenius",
            &cfg.dims,
            |n| numeric_adjoint_pair(op1, op2, n, w),
        ));
    }
    Ok(ClassificationReport {
        operator: OperatorDesc::from_op(op1)?,
        description: format!("{op1} with {op2}"),
        verdicts: vec![entry],
        residual_curves: curves,
        tolerances: *tol,
    })
}

/// Isometry residual `|⟨C f, C g⟩ - ⟨f, g⟩|` for two polynomials.
pub fn isometry_defect(
    op: &WeightedCompOp,
    f: &EntireFunction,
    g: &EntireFunction,
    w: &WeightSequence,
    tol: f64,
) -> Result<f64, OperatorError> {
    let cfg = EvalConfig::with_tol(tol);
    let (cf, cg) = (operators::apply(op, f)?, operators::apply(op, g)?);
    let lhs = inner_product(&cf, &cg, w, &cfg)?.value;
    let rhs = space::inner_product(f, g, w, &cfg)?.value;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lin(nu: Complex64) -> AffineSymbol {
        AffineSymbol::linear(nu).unwrap()
    }

    fn aff(nu: Complex64, k: Complex64) -> AffineSymbol {
        AffineSymbol::new(nu, k).unwrap()
    }

    #[test]
    fn composition_pairs() {
        assert_eq!(adjoint_pair_composition(&lin(c(0.0, 1.0)), &lin(c(0.0, -1.0))), Symbolic::True);
        assert_eq!(adjoint_pair_composition(&lin(c(0.5, 0.0)), &lin(c(0.5, 0.0))), Symbolic::True);
        assert_eq!(
            adjoint_pair_composition(&aff(c(0.5, 0.0), c(1.0, 0.0)), &lin(c(0.5, 0.0))),
            Symbolic::False
        );
    }

    #[test]
    fn composition_self_adjoint_and_co_isometry() {
        assert_eq!(self_adjoint_composition(&lin(c(0.7, 0.0))), Symbolic::True);
        assert_eq!(self_adjoint_composition(&lin(c(0.0, 1.0))), Symbolic::False);
        assert_eq!(self_adjoint_composition(&aff(c(0.7, 0.0), c(0.1, 0.0))), Symbolic::False);
        assert_eq!(co_isometry_composition(&lin(Complex64::from_polar(1.0, 1.1))), Symbolic::True);
        assert_eq!(co_isometry_composition(&lin(c(0.9, 0.0))), Symbolic::False);
        assert_eq!(co_isometry_composition(&aff(c(1.0, 0.0), c(-0.3, 0.0))), Symbolic::False);
    }

    #[test]
    fn weighted_self_adjoint_examples() {
        let w = WeightSequence::fock();
        let op = WeightedCompOp::new(EntireFunction::constant(c(2.0, 0.0)), lin(c(0.5, 0.0)));
        assert_eq!(self_adjoint_weighted(&op, &w), Symbolic::True);
        let op = WeightedCompOp::new(EntireFunction::constant(c(0.0, 2.0)), lin(c(0.5, 0.0)));
        assert_eq!(self_adjoint_weighted(&op, &w), Symbolic::False);
        let k = EntireFunction::kernel_multiple(c(3.0, 0.0), c(1.0, 0.0));
        let op = WeightedCompOp::new(k, AffineSymbol::constant(c(1.0, 0.0)));
        assert_eq!(self_adjoint_weighted(&op, &w), Symbolic::True);
        let (r, _) = numeric_self_adjoint(&op, 48, &w).unwrap();
        assert!(r < 1e-9, "{r}");
    }

    #[test]
    fn weighted_necessary_only() {
        let w = WeightSequence::fock();
        let phi = aff(c(0.5, 0.0), c(0.3, 0.0));
        let op = WeightedCompOp::new(EntireFunction::kernel_multiple(c(2.0, 0.0), c(0.3, 0.0)), phi);
        let s = self_adjoint_weighted(&op, &w);
        assert_eq!(s.conditions_hold(), Some(true));
        let op = WeightedCompOp::new(EntireFunction::one().scale(c(2.0, 0.0)), phi);
        assert_eq!(self_adjoint_weighted(&op, &w).conditions_hold(), Some(false));
    }

    #[test]
    fn weighted_co_isometry_examples() {
        let w = WeightSequence::fock();
        let tol = Tolerances::default();
        let op = WeightedCompOp::new(
            EntireFunction::constant(Complex64::from_polar(1.0, PI / 4.0)),
            lin(c(0.0, 1.0)),
        );
        assert_eq!(co_isometry_weighted(&op, &w, &tol), Symbolic::True);
        let op = WeightedCompOp::new(
            EntireFunction::polynomial(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            AffineSymbol::constant(c(0.5, 0.0)),
        );
        assert_eq!(co_isometry_weighted(&op, &w, &tol), Symbolic::False);
        let op = WeightedCompOp::new(EntireFunction::constant(c(0.0, 1.0)), aff(c(0.0, 1.0), c(0.0, 0.0)));
        assert_eq!(co_isometry_weighted(&op, &w, &tol), Symbolic::True);
    }

    #[test]
    fn weighted_adjoint_pairs() {
        let w = WeightSequence::fock();
        let g = Grid::default();
        let tol = Tolerances::default();
        let a = WeightedCompOp::new(EntireFunction::constant(c(1.0, 0.0)), lin(c(0.0, 1.0)));
        let b = WeightedCompOp::new(EntireFunction::constant(c(1.0, 0.0)), lin(c(0.0, -1.0)));
        assert_eq!(adjoint_pair_weighted(&a, &b, &w, &g, &tol), Symbolic::True);
        let z = WeightedCompOp::new(EntireFunction::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0)]), lin(c(0.0, 1.0)));
        assert_eq!(adjoint_pair_weighted(&z, &b, &w, &g, &tol), Symbolic::False);
        let zero = WeightedCompOp::new(EntireFunction::zero(), lin(c(0.0, 1.0)));
        assert_eq!(adjoint_pair_weighted(&zero, &zero, &w, &g, &tol), Symbolic::ZeroOperatorPair);
        let b2 = WeightedCompOp::new(EntireFunction::constant(c(0.0, 1.0)), lin(c(0.0, -1.0)));
        assert_eq!(adjoint_pair_weighted(&a, &b2, &w, &g, &tol), Symbolic::False);
    }

    #[test]
    fn numeric_examples() {
        let w = WeightSequence::fock();
        let op = WeightedCompOp::composition(lin(c(0.5, 0.0)));
        assert_eq!(numeric_self_adjoint(&op, 32, &w).unwrap().0, 0.0);
        let op = WeightedCompOp::composition(lin(c(0.0, 1.0)));
        assert!((numeric_self_adjoint(&op, 32, &w).unwrap().0 - 2.0).abs() < 1e-15);
        let r = numeric_co_isometry(&WeightedCompOp::composition(lin(Complex64::from_polar(1.0, 0.4))), &w, &Grid::default(), 1e-12).unwrap();
        assert!(r < 1e-9, "{r}");
        let r = numeric_co_isometry(&WeightedCompOp::composition(lin(c(0.9, 0.0))), &w, &Grid::default(), 1e-12).unwrap();
        let at_one = 1f64.exp() - 0.81f64.exp();
        assert!(r >= at_one, "{r}");
    }

    #[test]
    fn classify_examples() {
        let w = WeightSequence::fock();
        let cfg = ClassifyConfig::default();
        let rep = classify(&WeightedCompOp::composition(lin(c(0.5, 0.0))), &w, &cfg).unwrap();
        let sa = rep.verdict(Property::SelfAdjoint).unwrap();
        assert_eq!(sa.symbolic, Symbolic::True);
        assert_eq!(sa.numeric.residual, Some(0.0));
        assert!(rep.all_agree());
        let rep = classify(&WeightedCompOp::composition(lin(c(0.0, 1.0))), &w, &cfg).unwrap();
        assert_eq!(rep.verdict(Property::CoIsometry).unwrap().symbolic, Symbolic::True);
        assert_eq!(rep.verdict(Property::SelfAdjoint).unwrap().symbolic, Symbolic::False);
        assert!(rep.all_agree());
        let rep = classify(&WeightedCompOp::composition(aff(c(0.5, 0.0), c(0.5, 0.0))), &w, &cfg).unwrap();
        assert_eq!(rep.verdict(Property::CoIsometry).unwrap().symbolic, Symbolic::False);
        assert!(rep.all_agree());
    }

    #[test]
    fn agreement_dead_zone() {
        let t = Tolerances::default();
        assert_eq!(agreement(&Symbolic::True, Some(1e-6), &t), Agreement::Inconclusive);
        assert_eq!(agreement(&Symbolic::False, Some(1e-12), &t), Agreement::Disagree);
        let nec = Symbolic::NecessaryOnly {
            form: String::new(),
            conditions: vec![Condition::new("x", false)],
        };
        assert_eq!(agreement(&nec, Some(1e-12), &t), Agreement::ParadoxCandidate);
        assert_eq!(agreement(&nec, Some(1.0), &t), Agreement::Agree);
        assert_eq!(agreement(&Symbolic::True, None, &t), Agreement::Inconclusive);
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerances::default().validate().is_ok());
        let bad = Tolerances { tol_pass: 1e-3, tol_fail: 1e-4, eval_tol: 1e-12 };
        assert!(bad.validate().is_err());
        let bad = Tolerances { eval_tol: 1e-10, ..Tolerances::default() };
        assert!(bad.validate().is_err());
    }
}
