//! Entire functions in the weighted Hardy space, with inner products, norms and
//! reproducing kernels.
//!
//! Functions are stored by their monomial coefficients `b_n`. Internally every
//! series is summed in the orthonormal coordinates `a_n = b_n ζ_n` with
//! double-double accumulation, so products like `b_n · conj(c_n) · ζ_n²` never
//! form `ζ_n²` explicitly.
//!
//! Infinite series are truncated with a ratio-test geometric majorant: after
//! term `N`, if the majorant ratio `r = m_N / m_{N-1}` is below 1/2 and
//! `m_N / (1 - r) < tol`, the remainder is certified below `tol`. The
//! certificate assumes the majorant ratios keep decreasing past `N`, which
//! holds for log-convex weights (every preset).

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ddouble::{Cdd, Dd};
use crate::weights::{WeightError, WeightSequence};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_N_CAP: usize = 4096;

static N_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_N_CAP);

/// Sets the hard cap on series terms used by [`EvalConfig::default`] and
/// [`EvalConfig::with_tol`] for the whole process.
pub fn set_default_n_cap(n_cap: usize) {
    N_CAP.store(n_cap.max(1), Ordering::Relaxed);
}

pub fn default_n_cap() -> usize {
    N_CAP.load(Ordering::Relaxed)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("series not certified below {tol:e} within {n_cap} terms")]
    NonConvergence { tol: f64, n_cap: usize },
    #[error("self inner product has imaginary residue {0:e}")]
    Inconsistent(f64),
    #[error("tail bound must be nonnegative and nonincreasing (checked at n = {0})")]
    BadTailBound(usize),
    #[error("{0} is not supported for this function representation")]
    Unsupported(&'static str),
}

/// Evaluation settings shared by all series in this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub tol: f64,
    pub n_cap: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            tol: DEFAULT_TOL,
            n_cap: default_n_cap(),
        }
    }
}

impl EvalConfig {
    pub fn with_tol(tol: f64) -> Self {
        EvalConfig {
            tol,
            ..Self::default()
        }
    }
}

/// A value together with a bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certified<T> {
    pub value: T,
    pub error: f64,
    pub terms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degree {
    Finite(usize),
    Infinite,
}

type CoeffFn = Arc<dyn Fn(usize) -> Complex64 + Send + Sync>;
type TailFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Polynomial(Vec<Complex64>),
    /// `factor(z) · K_anchor(z)`
    KernelProduct {
        factor: Vec<Complex64>,
        anchor: Complex64,
    },
    Generated {
        coeff: CoeffFn,
        tail: TailFn,
    },
}

/// `f(z) = Σ b_n z^n`, either a polynomial, a polynomial multiple of a
/// reproducing kernel, or a caller-supplied coefficient generator.
#[derive(Clone)]
pub struct EntireFunction {
    repr: Repr,
}

impl fmt::Debug for EntireFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Polynomial(c) => f.debug_tuple("Polynomial").field(c).finish(),
            Repr::KernelProduct { factor, anchor } => f
                .debug_struct("KernelProduct")
                .field("factor", factor)
                .field("anchor", anchor)
                .finish(),
            Repr::Generated { .. } => f.write_str("Generated"),
        }
    }
}

fn trim(mut c: Vec<Complex64>) -> Vec<Complex64> {
    while c.len() > 1 && c.last() == Some(&Complex64::new(0.0, 0.0)) {
        c.pop();
    }
    if c.is_empty() {
        c.push(Complex64::new(0.0, 0.0));
    }
    c
}

fn horner(coeffs: &[Complex64], z: Cdd) -> Cdd {
    coeffs
        .iter()
        .rev()
        .fold(Cdd::ZERO, |acc, &b| acc * z + Cdd::from(b))
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Cdd::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + Cdd::from(x) * Cdd::from(y);
        }
    }
    trim(out.into_iter().map(Cdd::to_c64).collect())
}

impl EntireFunction {
    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        EntireFunction {
            repr: Repr::Polynomial(trim(coeffs)),
        }
    }

    pub fn zero() -> Self {
        Self::polynomial(vec![])
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(k: Complex64) -> Self {
        Self::polynomial(vec![k])
    }

    /// Orthonormal basis vector `e_n(z) = z^n / ζ_n`.
    pub fn basis(n: usize, w: &WeightSequence) -> Result<Self, SpaceError> {
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[n] = Complex64::new(1.0 / w.weight(n)?, 0.0);
        Ok(Self::polynomial(c))
    }

    /// `Σ a_n e_n` for the given orthonormal coordinates.
    pub fn from_onb(coords: &[Complex64], w: &WeightSequence) -> Result<Self, SpaceError> {
        let mut c = Vec::with_capacity(coords.len());
        for (n, &a) in coords.iter().enumerate() {
            c.push(a / w.weight(n)?);
        }
        Ok(Self::polynomial(c))
    }

    /// Reproducing kernel `K_p`.
    pub fn kernel(anchor: Complex64) -> Self {
        Self::kernel_multiple(Complex64::new(1.0, 0.0), anchor)
    }

    /// `alpha · K_anchor`.
    pub fn kernel_multiple(alpha: Complex64, anchor: Complex64) -> Self {
        Self::kernel_product(vec![alpha], anchor)
    }

    /// `P(z) · K_anchor(z)` for a polynomial `P`.
    pub fn kernel_product(factor: Vec<Complex64>, anchor: Complex64) -> Self {
        let factor = trim(factor);
        if factor == [Complex64::new(0.0, 0.0)] {
            return Self::zero();
        }
        EntireFunction {
            repr: Repr::KernelProduct { factor, anchor },
        }
    }

    /// Coefficients from a generator, with `tail(n) >= sup_{m>=n} |b_m| ζ_m`.
    ///
    /// The tail bound is sampled at `n = 1, 2, 4, …, 1024` and must not increase
    /// from `n` to `2n`.
    pub fn generated<C, T>(coeff: C, tail: T) -> Result<Self, SpaceError>
    where
        C: Fn(usize) -> Complex64 + Send + Sync + 'static,
        T: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        let mut n = 1;
        while n <= 1024 {
            let (a, b) = (tail(n), tail(2 * n));
            if !(a >= 0.0 && b >= 0.0 && b <= a) {
                return Err(SpaceError::BadTailBound(n));
            }
            n *= 2;
        }
        Ok(EntireFunction {
            repr: Repr::Generated {
                coeff: Arc::new(coeff),
                tail: Arc::new(tail),
            },
        })
    }

    pub fn degree(&self) -> Degree {
        match &self.repr {
            Repr::Polynomial(c) => Degree::Finite(c.len() - 1),
            _ => Degree::Infinite,
        }
    }

    pub fn as_polynomial(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Repr::Polynomial(c) => Some(c),
            _ => None,
        }
    }

    /// `(factor, anchor)` when the function is a polynomial times a kernel.
    pub fn kernel_parts(&self) -> Option<(&[Complex64], Complex64)> {
        match &self.repr {
            Repr::KernelProduct { factor, anchor } => Some((factor, *anchor)),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.repr, Repr::Polynomial(c) if c.iter().all(|b| *b == Complex64::new(0.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        match &self.repr {
            Repr::Polynomial(c) => Self::polynomial(c.iter().map(|b| b * s).collect()),
            Repr::KernelProduct { factor, anchor } => {
                Self::kernel_product(factor.iter().map(|b| b * s).collect(), *anchor)
            }
            Repr::Generated { coeff, tail } => {
                let (coeff, tail) = (coeff.clone(), tail.clone());
                let mag = s.norm();
                EntireFunction {
                    repr: Repr::Generated {
                        coeff: Arc::new(move |n| coeff(n) * s),
                        tail: Arc::new(move |n| tail(n) * mag),
                    },
                }
            }
        }
    }

    /// Product with a polynomial `p`.
    pub fn mul_polynomial(&self, p: &[Complex64]) -> Result<Self, SpaceError> {
        match &self.repr {
            Repr::Polynomial(c) => Ok(Self::polynomial(poly_mul(c, p))),
            Repr::KernelProduct { factor, anchor } => {
                Ok(Self::kernel_product(poly_mul(factor, p), *anchor))
            }
            Repr::Generated { .. } => Err(SpaceError::Unsupported("multiplication")),
        }
    }

    /// `f(νz + c)` for a polynomial `f`.
    pub fn compose_affine(&self, nu: Complex64, c: Complex64) -> Result<Self, SpaceError> {
        let Repr::Polynomial(f) = &self.repr else {
            return Err(SpaceError::Unsupported("composition"));
        };
        let (nu, c) = (Cdd::from(nu), Cdd::from(c));
        let mut power = vec![Cdd::ONE];
        let mut out = vec![Cdd::ZERO; f.len()];
        for (j, &fj) in f.iter().enumerate() {
            if j > 0 {
                let mut next = vec![Cdd::ZERO; power.len() + 1];
                for (k, &pk) in power.iter().enumerate() {
                    next[k] = next[k] + pk * c;
                    next[k + 1] = next[k + 1] + pk * nu;
                }
                power = next;
            }
            let fj = Cdd::from(fj);
            for (k, &pk) in power.iter().enumerate() {
                out[k] = out[k] + fj * pk;
            }
        }
        Ok(Self::polynomial(out.into_iter().map(Cdd::to_c64).collect()))
    }

    /// Monomial coefficient `b_n` (may underflow to 0 for fast-growing weights).
    pub fn coeff(&self, n: usize, w: &WeightSequence) -> Result<Complex64, SpaceError> {
        match &self.repr {
            Repr::Polynomial(c) => Ok(c.get(n).copied().unwrap_or_default()),
            Repr::Generated { coeff, .. } => Ok(coeff(n)),
            Repr::KernelProduct { .. } => {
                let ln = w.ln_dd(n)?;
                Ok(self.onb_dd(n, w)?.scale((-ln).exp()).to_c64())
            }
        }
    }

    /// Orthonormal coordinate `a_n = ⟨f, e_n⟩ = b_n ζ_n`.
    pub fn onb_coeff(&self, n: usize, w: &WeightSequence) -> Result<Complex64, SpaceError> {
        Ok(self.onb_dd(n, w)?.to_c64())
    }

    pub(crate) fn onb_dd(&self, n: usize, w: &WeightSequence) -> Result<Cdd, SpaceError> {
        match &self.repr {
            Repr::Polynomial(c) => match c.get(n) {
                Some(&b) if b != Complex64::new(0.0, 0.0) => {
                    Ok(Cdd::from(b).scale(w.entry(n)?.zeta))
                }
                _ => Ok(Cdd::ZERO),
            },
            Repr::Generated { coeff, .. } => Ok(Cdd::from(coeff(n)).scale(w.entry(n)?.zeta)),
            Repr::KernelProduct { factor, anchor } => {
                let q = Cdd::from(anchor.conj());
                let ln_n = w.ln_dd(n)?;
                let mut acc = Cdd::ZERO;
                for (j, &pj) in factor.iter().enumerate().take(n + 1) {
                    if pj == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let m = n - j;
                    let scale = (ln_n - w.ln_dd(m)?.mul_f64(2.0)).exp();
                    acc = acc + (Cdd::from(pj) * q.powi(m as u32)).scale(scale);
                }
                Ok(acc)
            }
        }
    }

    /// An upper bound on `|a_n|`, regular enough for the ratio test.
    fn majorant(&self, n: usize, w: &WeightSequence) -> Result<f64, SpaceError> {
        match &self.repr {
            Repr::Polynomial(_) => Ok(self.onb_dd(n, w)?.abs()),
            Repr::Generated { tail, .. } => Ok(tail(n)),
            Repr::KernelProduct { factor, anchor } => {
                let lq = anchor.norm().ln();
                let ln_n = w.ln_weight(n)?;
                let mut acc = 0.0;
                for (j, pj) in factor.iter().enumerate().take(n + 1) {
                    let m = n - j;
                    let pow = if m == 0 { 0.0 } else { m as f64 * lq };
                    acc += pj.norm() * (pow + ln_n - 2.0 * w.ln_weight(m)?).exp();
                }
                Ok(acc)
            }
        }
    }

    /// `sup_{m >= n} |a_m|`, assuming the majorant is eventually decreasing.
    fn sup_tail(&self, n: usize, w: &WeightSequence, cfg: &EvalConfig) -> Result<f64, SpaceError> {
        match &self.repr {
            Repr::Generated { tail, .. } => Ok(tail(n)),
            Repr::Polynomial(c) => {
                let mut best = 0.0f64;
                for m in n..c.len() {
                    best = best.max(self.majorant(m, w)?);
                }
                Ok(best)
            }
            Repr::KernelProduct { factor, .. } => {
                let mut best = self.majorant(n, w)?;
                let mut prev = best;
                let mut m = n + 1;
                loop {
                    let cur = self.majorant(m, w)?;
                    best = best.max(cur);
                    if m >= n + factor.len() && cur < prev {
                        return Ok(best);
                    }
                    if m >= cfg.n_cap {
                        return Err(SpaceError::NonConvergence {
                            tol: cfg.tol,
                            n_cap: cfg.n_cap,
                        });
                    }
                    prev = cur;
                    m += 1;
                }
            }
        }
    }

    fn factor_len(&self) -> usize {
        match &self.repr {
            Repr::KernelProduct { factor, .. } => factor.len(),
            _ => 1,
        }
    }

    /// `f(z)` by direct summation of the power series.
    pub fn eval(
        &self,
        z: Complex64,
        w: &WeightSequence,
        cfg: &EvalConfig,
    ) -> Result<Complex64, SpaceError> {
        Ok(self.eval_dd(z, w, cfg)?.to_c64())
    }

    pub(crate) fn eval_dd(
        &self,
        z: Complex64,
        w: &WeightSequence,
        cfg: &EvalConfig,
    ) -> Result<Cdd, SpaceError> {
        match &self.repr {
            Repr::Polynomial(c) => Ok(horner(c, Cdd::from(z))),
            Repr::KernelProduct { factor, anchor } => {
                let k = kernel_series(*anchor, z, w, cfg)?;
                Ok(horner(factor, Cdd::from(z)) * k.value)
            }
            Repr::Generated { coeff, tail } => {
                let lz = z.norm().ln();
                let zc = Cdd::from(z);
                let mut zn = Cdd::ONE;
                let sum = ratio_test_sum(0, cfg, |n| {
                    if n > 0 {
                        zn = zn * zc;
                    }
                    let pow = if n == 0 { 0.0 } else { n as f64 * lz };
                    let m = tail(n) * (pow - w.ln_weight(n)?).exp();
                    Ok((Cdd::from(coeff(n)) * zn, m))
                })?;
                Ok(sum.value)
            }
        }
    }
}

/// Sums `t_0 + t_1 + …` until the majorant ratio test certifies the remainder.
fn ratio_test_sum<F>(min_n: usize, cfg: &EvalConfig, mut term: F) -> Result<Certified<Cdd>, SpaceError>
where
    F: FnMut(usize) -> Result<(Cdd, f64), SpaceError>,
{
    let mut sum = Cdd::ZERO;
    let mut prev = f64::NAN;
    for n in 0..=cfg.n_cap {
        let (t, m) = term(n)?;
        sum = sum + t;
        if n > 0 && n >= min_n {
            let r = if m == 0.0 {
                0.0
            } else if prev == 0.0 {
                f64::INFINITY
            } else {
                m / prev
            };
            if r < 0.5 {
                let bound = m / (1.0 - r);
                if bound < cfg.tol {
                    return Ok(Certified {
                        value: sum,
                        error: bound,
                        terms: n + 1,
                    });
                }
            }
        }
        prev = m;
    }
    Err(SpaceError::NonConvergence {
        tol: cfg.tol,
        n_cap: cfg.n_cap,
    })
}

/// Upper bound on `sqrt(Σ_{m >= start} |a_m|²)`, the norm of `f` outside the
/// first `start` basis vectors. Infinite when no bound can be certified.
pub(crate) fn tail_norm_bound(
    f: &EntireFunction,
    start: usize,
    w: &WeightSequence,
) -> Result<f64, SpaceError> {
    let cap = start + default_n_cap();
    match &f.repr {
        Repr::Polynomial(c) => {
            let mut acc = Dd::ZERO;
            for m in start..c.len() {
                acc = acc + f.onb_dd(m, w)?.norm_sqr();
            }
            Ok(acc.to_f64().sqrt())
        }
        Repr::Generated { .. } => Ok(f64::INFINITY),
        Repr::KernelProduct { factor, .. } => {
            let mut acc = 0.0;
            let mut prev = f64::NAN;
            for m in start..cap {
                let t = f.majorant(m, w)?.powi(2);
                acc += t;
                if m >= start + factor.len() {
                    let r = if t == 0.0 { 0.0 } else { t / prev };
                    if r < 0.5 && t / (1.0 - r) <= 1e-3 * acc.max(1e-60) {
                        return Ok((acc + t / (1.0 - r)).sqrt());
                    }
                }
                prev = t;
            }
            Ok(f64::INFINITY)
        }
    }
}

/// `K_p(q) = Σ conj(p)^n q^n / ζ_n²` in double-double.
pub(crate) fn kernel_series(
    p: Complex64,
    q: Complex64,
    w: &WeightSequence,
    cfg: &EvalConfig,
) -> Result<Certified<Cdd>, SpaceError> {
    let x = Cdd::from(p.conj()) * Cdd::from(q);
    let mut t = Cdd::ZERO;
    ratio_test_sum(0, cfg, |n| {
        let e = w.entry(n)?;
        t = if n == 0 {
            let inv = Dd::ONE / e.zeta;
            Cdd::new(inv * inv, Dd::ZERO)
        } else {
            (t * x).scale(e.ratio * e.ratio)
        };
        Ok((t, t.abs()))
    })
}

/// Reproducing kernel `K_p(q)`.
pub fn kernel_eval(
    p: Complex64,
    q: Complex64,
    w: &WeightSequence,
    cfg: &EvalConfig,
) -> Result<Complex64, SpaceError> {
    Ok(kernel_series(p, q, w, cfg)?.value.to_c64())
}

/// `⟨f, g⟩ = Σ b_n conj(c_n) ζ_n²`.
///
/// Polynomials are summed exactly to their degree. Two kernel-type functions
/// use the ratio test on the product of their majorants. Generated functions
/// stop at the first `N` where the product of the two tail bounds is below
/// `tol`.
pub fn inner_product(
    f: &EntireFunction,
    g: &EntireFunction,
    w: &WeightSequence,
    cfg: &EvalConfig,
) -> Result<Certified<Complex64>, SpaceError> {
    let r = inner_product_dd(f, g, w, cfg)?;
    Ok(Certified {
        value: r.value.to_c64(),
        error: r.error,
        terms: r.terms,
    })
}

pub(crate) fn inner_product_dd(
    f: &EntireFunction,
    g: &EntireFunction,
    w: &WeightSequence,
    cfg: &EvalConfig,
) -> Result<Certified<Cdd>, SpaceError> {
    let term = |n: usize| -> Result<Cdd, SpaceError> {
        Ok(f.onb_dd(n, w)? * g.onb_dd(n, w)?.conj())
    };
    let finite = match (f.degree(), g.degree()) {
        (Degree::Finite(a), Degree::Finite(b)) => Some(a.min(b)),
        (Degree::Finite(a), _) | (_, Degree::Finite(a)) => Some(a),
        _ => None,
    };
    if let Some(d) = finite {
        let mut sum = Cdd::ZERO;
        for n in 0..=d {
            sum = sum + term(n)?;
        }
        return Ok(Certified {
            value: sum,
            error: 0.0,
            terms: d + 1,
        });
    }
    let generated = matches!(f.repr, Repr::Generated { .. }) || matches!(g.repr, Repr::Generated { .. });
    if generated {
        let mut sum = Cdd::ZERO;
        for n in 0..cfg.n_cap {
            sum = sum + term(n)?;
            let bound = f.sup_tail(n + 1, w, cfg)? * g.sup_tail(n + 1, w, cfg)?;
            if bound < cfg.tol {
                return Ok(Certified {
                    value: sum,
                    error: bound,
                    terms: n + 1,
                });
            }
        }
        return Err(SpaceError::NonConvergence {
            tol: cfg.tol,
            n_cap: cfg.n_cap,
        });
    }
    let min_n = f.factor_len().max(g.factor_len());
    ratio_test_sum(min_n, cfg, |n| {
        Ok((term(n)?, f.majorant(n, w)? * g.majorant(n, w)?))
    })
}

/// `‖f‖`, the square root of the real part of `⟨f, f⟩`.
pub fn norm(f: &EntireFunction, w: &WeightSequence, cfg: &EvalConfig) -> Result<f64, SpaceError> {
    let ip = inner_product(f, f, w, cfg)?.value;
    if ip.im.abs() >= cfg.tol {
        return Err(SpaceError::Inconsistent(ip.im));
    }
    Ok(ip.re.max(0.0).sqrt())
}

/// `f(p)` computed as `⟨f, K_p⟩`.
pub fn reproduce(
    f: &EntireFunction,
    p: Complex64,
    w: &WeightSequence,
    cfg: &EvalConfig,
) -> Result<Complex64, SpaceError> {
    Ok(inner_product(f, &EntireFunction::kernel(p), w, cfg)?.value)
}

/// The reproducing kernel at a fixed anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelFunction {
    anchor: Complex64,
}

impl KernelFunction {
    pub fn new(anchor: Complex64) -> Self {
        KernelFunction { anchor }
    }

    pub fn anchor(&self) -> Complex64 {
        self.anchor
    }

    /// Coefficient `conj(p)^n / ζ_n²`.
    pub fn coeff(&self, n: usize, w: &WeightSequence) -> Result<Complex64, SpaceError> {
        self.to_function().coeff(n, w)
    }

    pub fn eval(&self, z: Complex64, w: &WeightSequence, cfg: &EvalConfig) -> Result<Complex64, SpaceError> {
        kernel_eval(self.anchor, z, w, cfg)
    }

    pub fn to_function(&self) -> EntireFunction {
        EntireFunction::kernel(self.anchor)
    }
}

impl From<KernelFunction> for EntireFunction {
    fn from(k: KernelFunction) -> Self {
        k.to_function()
    }
}

pub(crate) fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub(crate) fn unpair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Serialize, Deserialize)]
pub(crate) struct KernelMultipleJson {
    pub alpha: [f64; 2],
    pub q: [f64; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum FunctionJson {
    Coeffs {
        coeffs: Vec<[f64; 2]>,
    },
    KernelMultiple {
        kernel_multiple: KernelMultipleJson,
    },
    Kernel {
        kernel_anchor: [f64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        factor: Option<Vec<[f64; 2]>>,
    },
}

impl TryFrom<&EntireFunction> for FunctionJson {
    type Error = SpaceError;

    fn try_from(f: &EntireFunction) -> Result<Self, SpaceError> {
        let one = Complex64::new(1.0, 0.0);
        Ok(match &f.repr {
            Repr::Polynomial(c) => FunctionJson::Coeffs {
                coeffs: c.iter().copied().map(pair).collect(),
            },
            Repr::KernelProduct { factor, anchor } if factor.len() == 1 && factor[0] == one => {
                FunctionJson::Kernel {
                    kernel_anchor: pair(*anchor),
                    factor: None,
                }
            }
            Repr::KernelProduct { factor, anchor } if factor.len() == 1 => {
                FunctionJson::KernelMultiple {
                    kernel_multiple: KernelMultipleJson {
                        alpha: pair(factor[0]),
                        q: pair(*anchor),
                    },
                }
            }
            Repr::KernelProduct { factor, anchor } => FunctionJson::Kernel {
                kernel_anchor: pair(*anchor),
                factor: Some(factor.iter().copied().map(pair).collect()),
            },
            Repr::Generated { .. } => return Err(SpaceError::Unsupported("serialization")),
        })
    }
}

impl From<FunctionJson> for EntireFunction {
    fn from(j: FunctionJson) -> Self {
        match j {
            FunctionJson::Coeffs { coeffs } => {
                EntireFunction::polynomial(coeffs.into_iter().map(unpair).collect())
            }
            FunctionJson::KernelMultiple { kernel_multiple } => EntireFunction::kernel_multiple(
                unpair(kernel_multiple.alpha),
                unpair(kernel_multiple.q),
            ),
            FunctionJson::Kernel {
                kernel_anchor,
                factor,
            } => EntireFunction::kernel_product(
                factor
                    .map(|f| f.into_iter().map(unpair).collect())
                    .unwrap_or_else(|| vec![Complex64::new(1.0, 0.0)]),
                unpair(kernel_anchor),
            ),
        }
    }
}

impl Serialize for EntireFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FunctionJson::try_from(self)
            .map_err(serde::ser::Error::custom)?
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EntireFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        FunctionJson::deserialize(deserializer).map(Into::into)
    }
}
