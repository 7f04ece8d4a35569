//! Composition, multiplication and weighted composition operators, their finite
//! sections in the orthonormal basis `e_n = z^n / ζ_n`, and adjoint actions on
//! reproducing kernels.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::ddouble::{Cdd, Dd};
use crate::space::{self, EntireFunction, EvalConfig, SpaceError};
use crate::weights::WeightSequence;

/// Slack allowed on `|ν| <= 1` for validated symbols.
pub const NU_SLACK: f64 = 1e-14;
/// A column counts as captured by a section when the part of its image
/// outside the section has norm at most this.
pub const LEAK_TOL: f64 = 1e-14;
/// Number of leading coefficients compared when checking a multiplier form.
pub const FORM_TERMS: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("|nu| = {0} exceeds 1; use an unvalidated symbol to allow this")]
    NuOutOfRange(f64),
    #[error("section dimension must be at least 1")]
    ZeroDim,
    #[error("section dimensions must be nonempty and strictly increasing")]
    BadDims,
    #[error("multiplier does not match the declared form {0}")]
    FormMismatch(String),
}

impl From<crate::weights::WeightError> for OperatorError {
    fn from(e: crate::weights::WeightError) -> Self {
        OperatorError::Space(e.into())
    }
}

/// `Φ(z) = νz + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineSymbol {
    nu: Complex64,
    c: Complex64,
    validated: bool,
}

impl AffineSymbol {
    pub fn new(nu: Complex64, c: Complex64) -> Result<Self, OperatorError> {
        if nu.norm().is_nan() || nu.norm() > 1.0 + NU_SLACK {
            return Err(OperatorError::NuOutOfRange(nu.norm()));
        }
        Ok(AffineSymbol {
            nu,
            c,
            validated: true,
        })
    }

    /// Skips the `|ν| <= 1` check. The symbol is marked unvalidated.
    pub fn unvalidated(nu: Complex64, c: Complex64) -> Self {
        AffineSymbol {
            nu,
            c,
            validated: nu.norm() <= 1.0 + NU_SLACK,
        }
    }

    pub fn linear(nu: Complex64) -> Result<Self, OperatorError> {
        Self::new(nu, Complex64::new(0.0, 0.0))
    }

    /// `Φ ≡ d`.
    pub fn constant(d: Complex64) -> Self {
        AffineSymbol {
            nu: Complex64::new(0.0, 0.0),
            c: d,
            validated: true,
        }
    }

    pub fn identity() -> Self {
        AffineSymbol {
            nu: Complex64::new(1.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            validated: true,
        }
    }

    pub fn nu(&self) -> Complex64 {
        self.nu
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.nu * z + self.c
    }
}

impl fmt::Display for AffineSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})z + ({})", self.nu, self.c)
    }
}

/// Structural shape of the multiplier `Υ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpsilonForm {
    One,
    Constant(Complex64),
    KernelMultiple { alpha: Complex64, q: Complex64 },
    General,
}

impl UpsilonForm {
    fn infer(u: &EntireFunction) -> Self {
        if let Some(c) = u.as_polynomial() {
            if c.len() == 1 {
                return if c[0] == Complex64::new(1.0, 0.0) {
                    UpsilonForm::One
                } else {
                    UpsilonForm::Constant(c[0])
                };
            }
            return UpsilonForm::General;
        }
        match u.kernel_parts() {
            Some((f, q)) if f.len() == 1 => UpsilonForm::KernelMultiple { alpha: f[0], q },
            _ => UpsilonForm::General,
        }
    }
}

impl fmt::Display for UpsilonForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpsilonForm::One => f.write_str("1"),
            UpsilonForm::Constant(k) => write!(f, "{k}"),
            UpsilonForm::KernelMultiple { alpha, q } => write!(f, "({alpha})·K[{q}]"),
            UpsilonForm::General => f.write_str("general"),
        }
    }
}

/// `C_{Υ,Φ} f = Υ · (f ∘ Φ)`.
#[derive(Debug, Clone)]
pub struct WeightedCompOp {
    upsilon: EntireFunction,
    phi: AffineSymbol,
    form: UpsilonForm,
}

impl WeightedCompOp {
    pub fn new(upsilon: EntireFunction, phi: AffineSymbol) -> Self {
        let form = UpsilonForm::infer(&upsilon);
        WeightedCompOp { upsilon, phi, form }
    }

    /// Plain composition operator `C_Φ`.
    pub fn composition(phi: AffineSymbol) -> Self {
        Self::new(EntireFunction::one(), phi)
    }

    /// Builds the operator with a declared multiplier form, checking the first
    /// coefficients of `upsilon` against it.
    pub fn with_form(
        upsilon: EntireFunction,
        phi: AffineSymbol,
        form: UpsilonForm,
        w: &WeightSequence,
    ) -> Result<Self, OperatorError> {
        let op = WeightedCompOp { upsilon, phi, form };
        if !op.check_form(w)? {
            return Err(OperatorError::FormMismatch(form.to_string()));
        }
        Ok(op)
    }

    pub fn upsilon(&self) -> &EntireFunction {
        &self.upsilon
    }

    pub fn phi(&self) -> &AffineSymbol {
        &self.phi
    }

    pub fn form(&self) -> UpsilonForm {
        self.form
    }

    /// Compares the first 32 orthonormal coordinates of `Υ` with the declared
    /// form at relative tolerance 1e-12.
    pub fn check_form(&self, w: &WeightSequence) -> Result<bool, OperatorError> {
        let expected = match self.form {
            UpsilonForm::General => return Ok(true),
            UpsilonForm::One => EntireFunction::one(),
            UpsilonForm::Constant(k) => EntireFunction::constant(k),
            UpsilonForm::KernelMultiple { alpha, q } => EntireFunction::kernel_multiple(alpha, q),
        };
        Ok(coefficients_match(&self.upsilon, &expected, FORM_TERMS, 1e-12, w)?)
    }
}

impl fmt::Display for WeightedCompOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C[Υ = {}, Φ(z) = {}]", self.form, self.phi)
    }
}

/// True when the first `terms` orthonormal coordinates of `f` and `g` agree to
/// relative tolerance `rel`; pairs where both sides are below 1e-300 are skipped.
pub fn coefficients_match(
    f: &EntireFunction,
    g: &EntireFunction,
    terms: usize,
    rel: f64,
    w: &WeightSequence,
) -> Result<bool, SpaceError> {
    for n in 0..terms {
        let (a, b) = (f.onb_coeff(n, w)?, g.onb_coeff(n, w)?);
        let scale = a.norm().max(b.norm());
        if scale < 1e-300 {
            continue;
        }
        if (a - b).norm() > rel * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// JSON shape of an operator in configuration files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDesc {
    pub nu: [f64; 2],
    #[serde(default)]
    pub c: [f64; 2],
    #[serde(default)]
    pub upsilon: UpsilonDesc,
    /// Allows `|ν| > 1`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unvalidated: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(try_from = "RawUpsilon", into = "RawUpsilon")]
pub enum UpsilonDesc {
    #[default]
    One,
    Function(EntireFunction),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawUpsilon {
    Tag(String),
    Function(EntireFunction),
}

impl TryFrom<RawUpsilon> for UpsilonDesc {
    type Error = String;

    fn try_from(r: RawUpsilon) -> Result<Self, String> {
        match r {
            RawUpsilon::Tag(t) if t == "one" => Ok(UpsilonDesc::One),
            RawUpsilon::Tag(t) => Err(format!("unknown multiplier {t:?}")),
            RawUpsilon::Function(f) => Ok(UpsilonDesc::Function(f)),
        }
    }
}

impl From<UpsilonDesc> for RawUpsilon {
    fn from(u: UpsilonDesc) -> Self {
        match u {
            UpsilonDesc::One => RawUpsilon::Tag("one".into()),
            UpsilonDesc::Function(f) => RawUpsilon::Function(f),
        }
    }
}

impl OperatorDesc {
    pub fn to_op(&self) -> Result<WeightedCompOp, OperatorError> {
        let (nu, c) = (space::unpair(self.nu), space::unpair(self.c));
        let phi = if self.unvalidated {
            AffineSymbol::unvalidated(nu, c)
        } else {
            AffineSymbol::new(nu, c)?
        };
        let upsilon = match &self.upsilon {
            UpsilonDesc::One => EntireFunction::one(),
            UpsilonDesc::Function(f) => f.clone(),
        };
        Ok(WeightedCompOp::new(upsilon, phi))
    }

    pub fn from_op(op: &WeightedCompOp) -> Result<Self, OperatorError> {
        let upsilon = match op.form {
            UpsilonForm::One => UpsilonDesc::One,
            _ => UpsilonDesc::Function(op.upsilon.clone()),
        };
        // Fail early on representations that cannot be written out.
        serde_json::to_value(&op.upsilon)
            .map_err(|_| SpaceError::Unsupported("serialization"))?;
        Ok(OperatorDesc {
            nu: space::pair(op.phi.nu),
            c: space::pair(op.phi.c),
            upsilon,
            unvalidated: !op.phi.validated,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    /// Columns from this index on have images that leave the section.
    TruncatedColumns(usize),
}

/// `M[k][n] = ⟨T e_n, e_k⟩` for `k, n < dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSection {
    pub dim: usize,
    pub entries: DMatrix<Complex64>,
    pub exactness: Exactness,
    pub provenance: String,
}

impl Serialize for OperatorSection {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut rows = Vec::with_capacity(self.dim * self.dim);
        for k in 0..self.dim {
            for n in 0..self.dim {
                rows.push(space::pair(self.entries[(k, n)]));
            }
        }
        let mut s = serializer.serialize_struct("OperatorSection", 4)?;
        s.serialize_field("dim", &self.dim)?;
        s.serialize_field("exactness", &self.exactness)?;
        s.serialize_field("entries", &rows)?;
        s.serialize_field("provenance", &self.provenance)?;
        s.end()
    }
}

fn check_dim(n: usize) -> Result<(), OperatorError> {
    if n == 0 {
        Err(OperatorError::ZeroDim)
    } else {
        Ok(())
    }
}

/// Section of `C_Φ`: `M[k][n] = (ζ_k/ζ_n) binom(n,k) ν^k c^{n-k}` for `k <= n`.
pub fn composition_section(
    phi: &AffineSymbol,
    dim: usize,
    w: &WeightSequence,
) -> Result<OperatorSection, OperatorError> {
    check_dim(dim)?;
    let (nu, c) = (Cdd::from(phi.nu), Cdd::from(phi.c));
    let mut nu_pow = vec![Cdd::ONE; dim];
    let mut c_pow = vec![Cdd::ONE; dim];
    for k in 1..dim {
        nu_pow[k] = nu_pow[k - 1] * nu;
        c_pow[k] = c_pow[k - 1] * c;
    }
    let ln: Vec<Dd> = (0..dim).map(|n| w.ln_dd(n)).collect::<Result<_, _>>()?;
    let mut m = DMatrix::zeros(dim, dim);
    for n in 0..dim {
        let mut binom = Dd::ONE;
        for k in 0..=n {
            if k > 0 {
                binom = binom * Dd::new((n - k + 1) as f64) / Dd::new(k as f64);
            }
            let mono = nu_pow[k] * c_pow[n - k];
            if mono == Cdd::ZERO {
                continue;
            }
            let scale = binom * (ln[k] - ln[n]).exp();
            m[(k, n)] = mono.scale(scale).to_c64();
        }
    }
    Ok(OperatorSection {
        dim,
        entries: m,
        exactness: Exactness::Exact,
        provenance: format!("C_Φ, Φ(z) = {phi}"),
    })
}

/// Orthonormal coordinates of `Υ · e_n`, which are `u_{m-n} ζ_m / ζ_n`.
fn multiplier_column(
    onb_u: &[Cdd],
    n: usize,
    rows: usize,
    w: &WeightSequence,
) -> Result<Vec<Complex64>, OperatorError> {
    let mut col = vec![Complex64::new(0.0, 0.0); rows];
    let ln_n = w.ln_dd(n)?;
    for (m, slot) in col.iter_mut().enumerate().skip(n) {
        let a = onb_u[m - n];
        if a == Cdd::ZERO {
            continue;
        }
        let scale = (w.ln_dd(m)? - ln_n - w.ln_dd(m - n)?).exp();
        *slot = a.scale(scale).to_c64();
    }
    Ok(col)
}

/// Section of the multiplication operator `M_Υ`.
pub fn multiplication_section(
    u: &EntireFunction,
    dim: usize,
    w: &WeightSequence,
) -> Result<OperatorSection, OperatorError> {
    check_dim(dim)?;
    let onb_u: Vec<Cdd> = (0..dim).map(|j| u.onb_dd(j, w)).collect::<Result<_, _>>()?;
    let mut m = DMatrix::zeros(dim, dim);
    for n in 0..dim {
        let col = multiplier_column(&onb_u, n, dim, w)?;
        m.set_column(n, &nalgebra::DVector::from_vec(col));
    }
    let exactness = leak_exactness(dim, w, |j| {
        Ok(u.mul_polynomial(EntireFunction::basis(j, w)?.as_polynomial().unwrap_or(&[]))?)
    })?;
    Ok(OperatorSection {
        dim,
        entries: m,
        exactness,
        provenance: "M_Υ".to_string(),
    })
}

/// First column whose image has norm above [`LEAK_TOL`] outside the section.
fn leak_exactness<F>(dim: usize, w: &WeightSequence, mut image: F) -> Result<Exactness, OperatorError>
where
    F: FnMut(usize) -> Result<EntireFunction, OperatorError>,
{
    for j in 0..dim {
        let f = image(j)?;
        if space::tail_norm_bound(&f, dim, w)? > LEAK_TOL {
            return Ok(Exactness::TruncatedColumns(j));
        }
    }
    Ok(Exactness::Exact)
}

/// Section of `C_{Υ,Φ} = M_Υ C_Φ`.
///
/// `C_Φ` does not raise polynomial degree, so the product of the two sections
/// equals the section of the product.
pub fn weighted_comp_section(
    op: &WeightedCompOp,
    dim: usize,
    w: &WeightSequence,
) -> Result<OperatorSection, OperatorError> {
    let c = composition_section(&op.phi, dim, w)?;
    let entries = match op.form {
        UpsilonForm::One => c.entries,
        UpsilonForm::Constant(k) => c.entries * k,
        _ => multiplication_section(&op.upsilon, dim, w)?.entries * c.entries,
    };
    let exactness = match op.form {
        UpsilonForm::One | UpsilonForm::Constant(_) => Exactness::Exact,
        _ => leak_exactness(dim, w, |j| apply(op, &EntireFunction::basis(j, w)?))?,
    };
    Ok(OperatorSection {
        dim,
        entries,
        exactness,
        provenance: op.to_string(),
    })
}

/// Conjugate transpose.
pub fn adjoint_section(s: &OperatorSection) -> OperatorSection {
    let provenance = match s.provenance.strip_prefix("adjoint of ") {
        Some(inner) => inner.to_string(),
        None => format!("adjoint of {}", s.provenance),
    };
    OperatorSection {
        dim: s.dim,
        entries: s.entries.adjoint(),
        exactness: s.exactness,
        provenance,
    }
}

/// `C*_{Υ,Φ} K_z = conj(Υ(z)) K_{Φ(z)}`.
pub fn adjoint_on_kernel(
    op: &WeightedCompOp,
    z: Complex64,
    w: &WeightSequence,
    cfg: &EvalConfig,
) -> Result<EntireFunction, OperatorError> {
    let u = op.upsilon.eval(z, w, cfg)?;
    Ok(EntireFunction::kernel_multiple(u.conj(), op.phi.eval(z)))
}

/// `Υ · (f ∘ Φ)` for a polynomial `f`.
pub fn apply(op: &WeightedCompOp, f: &EntireFunction) -> Result<EntireFunction, OperatorError> {
    let g = f.compose_affine(op.phi.nu, op.phi.c)?;
    let g = g.as_polynomial().expect("composition of a polynomial");
    Ok(op.upsilon.mul_polynomial(g)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Converged,
    LowConfidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub dim: usize,
    pub norm: f64,
    pub iterations: usize,
    pub confidence: Confidence,
}

pub const POWER_TOL: f64 = 1e-8;
pub const POWER_MAX_ITER: usize = 500;

/// Largest singular value of a matrix by power iteration on `M* M`.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> (f64, usize, Confidence) {
    let n = m.ncols();
    let gram = m.adjoint() * m;
    let mut v = nalgebra::DVector::from_element(n, Complex64::new(1.0 / (n as f64).sqrt(), 0.0));
    let mut est = 0.0f64;
    for it in 1..=POWER_MAX_ITER {
        let next = &gram * &v;
        let len = next.norm();
        if len == 0.0 {
            return (0.0, it, Confidence::Converged);
        }
        let prev = est;
        est = len;
        v = next.unscale(len);
        if it > 1 && (est - prev).abs() <= POWER_TOL * est {
            return (est.sqrt(), it, Confidence::Converged);
        }
    }
    (est.sqrt(), POWER_MAX_ITER, Confidence::LowConfidence)
}

/// Spectral-norm estimate of the section at each dimension in `dims`.
pub fn section_norm_growth(
    op: &WeightedCompOp,
    dims: &[usize],
    w: &WeightSequence,
) -> Result<Vec<NormEstimate>, OperatorError> {
    if dims.is_empty() || dims.windows(2).any(|p| p[0] >= p[1]) {
        return Err(OperatorError::BadDims);
    }
    dims.iter()
        .map(|&dim| {
            let s = weighted_comp_section(op, dim, w)?;
            let (norm, iterations, confidence) = spectral_norm(&s.entries);
            Ok(NormEstimate {
                dim,
                norm,
                iterations,
                confidence,
            })
        })
        .collect()
}
