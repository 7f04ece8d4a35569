//! Seeded kernel-property checks run by the `kernel_props` check.

use hardy_core::classify::Tolerances;
use hardy_core::space::{self, EntireFunction, EvalConfig};
use hardy_core::weights::WeightKind;
use hardy_core::{Complex64, WeightSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const REPRODUCE_CASES: usize = 20;
pub const REPRODUCE_DEGREE: usize = 20;
pub const FOCK_CASES: usize = 25;
pub const FOCK_REL: f64 = 1e-10;
pub const SAMPLE_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub cases: usize,
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PropertyResult {
    fn from_residuals(name: &str, tolerance: f64, r: Result<Vec<f64>, space::SpaceError>) -> Self {
        match r {
            Ok(v) => {
                let max = v.iter().copied().fold(0.0f64, f64::max);
                PropertyResult {
                    name: name.into(),
                    cases: v.len(),
                    max_residual: Some(max),
                    tolerance,
                    passed: v.iter().all(|x| *x < tolerance),
                    error: None,
                }
            }
            Err(e) => PropertyResult {
                name: name.into(),
                cases: 0,
                max_residual: None,
                tolerance,
                passed: false,
                error: Some(e.to_string()),
            },
        }
    }
}

pub fn random_point(rng: &mut impl Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Random polynomial of degree at most `max_degree` with coefficients in the
/// unit square.
pub fn random_polynomial(rng: &mut impl Rng, max_degree: usize) -> EntireFunction {
    let deg = rng.gen_range(0..=max_degree);
    EntireFunction::polynomial(
        (0..=deg)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    )
}

fn lattice() -> Vec<Complex64> {
    let v = [-2.0, -1.0, 0.0, 1.0, 2.0];
    v.iter()
        .flat_map(|&re| v.iter().map(move |&im| Complex64::new(re, im)))
        .collect()
}

/// `K(p, q) = conj(K(q, p))` and `K(p, p) > 0` on a 5×5 lattice, the
/// reproducing property on random polynomials, and the closed form on Fock.
pub fn kernel_properties(w: &WeightSequence, tol: &Tolerances, seed: u64) -> Vec<PropertyResult> {
    let cfg = EvalConfig::with_tol(tol.eval_tol);
    let pass = tol.tol_pass;
    let pts = lattice();
    let mut out = Vec::new();

    let symmetry = (|| {
        let mut r = Vec::new();
        for &p in &pts {
            for &q in &pts {
                let a = space::kernel_eval(p, q, w, &cfg)?;
                let b = space::kernel_eval(q, p, w, &cfg)?;
                r.push((a - b.conj()).norm() / a.norm().max(1.0));
            }
        }
        Ok(r)
    })();
    out.push(PropertyResult::from_residuals("conjugate_symmetry", pass, symmetry));

    let positivity = (|| {
        let mut r = Vec::new();
        for &p in &pts {
            let k = space::kernel_eval(p, p, w, &cfg)?;
            // Residual is zero when K(p, p) is real and positive.
            let bad = k.im.abs() / k.norm().max(1.0) + if k.re > 0.0 { 0.0 } else { 1.0 };
            r.push(bad);
        }
        Ok(r)
    })();
    out.push(PropertyResult::from_residuals("positivity", pass, positivity));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reproducing = (|| {
        let mut r = Vec::new();
        for _ in 0..REPRODUCE_CASES {
            let f = random_polynomial(&mut rng, REPRODUCE_DEGREE);
            let p = random_point(&mut rng, SAMPLE_RADIUS);
            let lhs = space::reproduce(&f, p, w, &cfg)?;
            let rhs = f.eval(p, w, &cfg)?;
            r.push((lhs - rhs).norm() / rhs.norm().max(1.0));
        }
        Ok(r)
    })();
    out.push(PropertyResult::from_residuals("reproducing", pass, reproducing));

    if matches!(w.kind(), WeightKind::Fock) {
        let closed = (|| {
            let mut r = Vec::new();
            for _ in 0..FOCK_CASES {
                let p = random_point(&mut rng, SAMPLE_RADIUS);
                let q = random_point(&mut rng, SAMPLE_RADIUS);
                let k = space::kernel_eval(p, q, w, &cfg)?;
                let e = (p.conj() * q).exp();
                r.push((k - e).norm() / e.norm());
            }
            Ok(r)
        })();
        out.push(PropertyResult::from_residuals("fock_closed_form", FOCK_REL, closed));
    }
    out
}
