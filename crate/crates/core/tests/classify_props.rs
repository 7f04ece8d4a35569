use hardy_core::classify::{
    adjoint_pair_composition, adjoint_pair_weighted, agreement, co_isometry_weighted,
    isometry_defect, numeric_adjoint_pair, numeric_co_isometry, numeric_self_adjoint,
    self_adjoint_weighted, Agreement, Grid, Symbolic, Tolerances,
};
use hardy_core::operators::{AffineSymbol, WeightedCompOp};
use hardy_core::space::{kernel_eval, EntireFunction, EvalConfig};
use hardy_core::weights::WeightSequence;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

const CASES: usize = 200;
const MARGIN: f64 = 0.05;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn polar(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(r.gen_range(lo..hi), r.gen_range(0.0..TAU))
}

/// A complex number whose imaginary part is at least `MARGIN` away from 0.
fn off_axis(r: &mut ChaCha8Rng, max: f64) -> Complex64 {
    let im = r.gen_range(MARGIN..max) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
    let re_max = (max * max - im * im).max(0.0).sqrt();
    Complex64::new(r.gen_range(-re_max..=re_max), im)
}

fn expect_agree(s: &Symbolic, residual: f64, what: &str) {
    let a = agreement(s, Some(residual), &Tolerances::default());
    assert_eq!(a, Agreement::Agree, "{what}: symbolic {s:?}, residual {residual:e}");
}

#[test]
fn composition_self_adjoint_iff() {
    let w = WeightSequence::fock();
    let mut r = rng(1);
    for i in 0..CASES {
        let (nu, c) = match i % 3 {
            0 => (Complex64::new(r.gen_range(-1.0..1.0), 0.0), Complex64::new(0.0, 0.0)),
            1 => (off_axis(&mut r, 1.0), Complex64::new(0.0, 0.0)),
            _ => (polar(&mut r, 0.0, 1.0), polar(&mut r, MARGIN, 1.0)),
        };
        let op = WeightedCompOp::composition(AffineSymbol::new(nu, c).unwrap());
        let s = self_adjoint_weighted(&op, &w);
        assert_eq!(s, Symbolic::from_bool(i % 3 == 0));
        expect_agree(&s, numeric_self_adjoint(&op, 32, &w).unwrap().0, "self-adjoint C_Φ");
    }
}

#[test]
fn constant_multiplier_self_adjoint_iff() {
    let w = WeightSequence::power_factorial(0.75).unwrap();
    let mut r = rng(2);
    for i in 0..CASES {
        let (kappa, nu) = match i % 4 {
            0 => (Complex64::new(r.gen_range(0.1..3.0), 0.0), Complex64::new(r.gen_range(-1.0..1.0), 0.0)),
            1 => (Complex64::new(0.0, 0.0), polar(&mut r, 0.0, 1.0)),
            2 => (off_axis(&mut r, 3.0), Complex64::new(r.gen_range(-1.0..1.0), 0.0)),
            _ => (Complex64::new(r.gen_range(0.1..3.0), 0.0), off_axis(&mut r, 1.0)),
        };
        let op = WeightedCompOp::new(EntireFunction::constant(kappa), AffineSymbol::linear(nu).unwrap());
        let s = self_adjoint_weighted(&op, &w);
        assert_eq!(s, Symbolic::from_bool(i % 4 < 2), "κ={kappa} ν={nu}");
        expect_agree(&s, numeric_self_adjoint(&op, 32, &w).unwrap().0, "self-adjoint κ C_νz");
    }
}

#[test]
fn constant_symbol_self_adjoint_iff() {
    let w = WeightSequence::fock();
    let mut r = rng(3);
    for i in 0..CASES {
        let d = polar(&mut r, MARGIN, 1.0);
        let alpha = match i % 2 {
            0 => Complex64::new(r.gen_range(0.5..3.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0),
            _ => off_axis(&mut r, 3.0),
        };
        let op = WeightedCompOp::new(EntireFunction::kernel_multiple(alpha, d), AffineSymbol::constant(d));
        let s = self_adjoint_weighted(&op, &w);
        assert_eq!(s, Symbolic::from_bool(i % 2 == 0));
        expect_agree(&s, numeric_self_adjoint(&op, 32, &w).unwrap().0, "self-adjoint Φ ≡ d");
    }
}

#[test]
fn composition_co_isometry_iff() {
    let w = WeightSequence::fock();
    let grid = Grid::default();
    let mut r = rng(4);
    for i in 0..CASES {
        let (nu, c) = match i % 3 {
            0 => (polar(&mut r, 1.0, 1.0 + f64::EPSILON), Complex64::new(0.0, 0.0)),
            1 => (polar(&mut r, 0.0, 1.0 - MARGIN), Complex64::new(0.0, 0.0)),
            _ => (polar(&mut r, 0.0, 1.0), polar(&mut r, MARGIN, 1.0)),
        };
        let op = WeightedCompOp::composition(AffineSymbol::new(nu, c).unwrap());
        let s = co_isometry_weighted(&op, &w, &Tolerances::default());
        assert_eq!(s, Symbolic::from_bool(i % 3 == 0));
        expect_agree(&s, numeric_co_isometry(&op, &w, &grid, 1e-12).unwrap(), "co-isometry C_Φ");
    }
}

#[test]
fn constant_multiplier_co_isometry_iff() {
    let w = WeightSequence::exp_power(1.5).unwrap();
    let grid = Grid::default();
    let mut r = rng(5);
    for i in 0..CASES {
        let unit = |r: &mut ChaCha8Rng| Complex64::from_polar(1.0, r.gen_range(0.0..TAU));
        let (kappa, nu) = match i % 3 {
            0 => (unit(&mut r), unit(&mut r)),
            1 => (polar(&mut r, 1.0 + MARGIN, 2.0), unit(&mut r)),
            _ => (unit(&mut r), polar(&mut r, 0.0, 1.0 - MARGIN)),
        };
        let op = WeightedCompOp::new(EntireFunction::constant(kappa), AffineSymbol::linear(nu).unwrap());
        let s = co_isometry_weighted(&op, &w, &Tolerances::default());
        assert_eq!(s, Symbolic::from_bool(i % 3 == 0));
        expect_agree(&s, numeric_co_isometry(&op, &w, &grid, 1e-12).unwrap(), "co-isometry κ C_νz");
    }
}

#[test]
fn constant_symbol_is_never_co_isometry() {
    let w = WeightSequence::fock();
    let mut r = rng(6);
    for _ in 0..20 {
        let op = WeightedCompOp::new(
            EntireFunction::kernel_multiple(polar(&mut r, 0.5, 2.0), polar(&mut r, 0.0, 1.0)),
            AffineSymbol::constant(polar(&mut r, 0.0, 1.0)),
        );
        let s = co_isometry_weighted(&op, &w, &Tolerances::default());
        assert_eq!(s, Symbolic::False);
        expect_agree(&s, numeric_co_isometry(&op, &w, &Grid::default(), 1e-12).unwrap(), "Φ ≡ d");
    }
}

#[test]
fn composition_adjoint_pair_iff() {
    let w = WeightSequence::fock();
    let mut r = rng(7);
    for i in 0..CASES {
        let mu = polar(&mut r, 0.0, 1.0);
        let (nu, c, d) = match i % 4 {
            0 => (mu.conj(), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
            1 => (mu.conj(), polar(&mut r, MARGIN, 1.0), Complex64::new(0.0, 0.0)),
            2 => (mu.conj(), Complex64::new(0.0, 0.0), polar(&mut r, MARGIN, 1.0)),
            _ => loop {
                let nu = polar(&mut r, 0.0, 1.0);
                if (nu - mu.conj()).norm() >= MARGIN {
                    break (nu, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                }
            },
        };
        let (p1, p2) = (AffineSymbol::new(mu, c).unwrap(), AffineSymbol::new(nu, d).unwrap());
        let s = adjoint_pair_composition(&p1, &p2);
        assert_eq!(s, Symbolic::from_bool(i % 4 == 0));
        assert_eq!(s, adjoint_pair_composition(&p2, &p1));
        let res = numeric_adjoint_pair(&WeightedCompOp::composition(p1), &WeightedCompOp::composition(p2), 32, &w).unwrap();
        expect_agree(&s, res, "adjoint pair");
    }
}

#[test]
fn weighted_adjoint_pairs_follow_the_kernel_form() {
    let w = WeightSequence::fock();
    let grid = Grid::default();
    let tol = Tolerances::default();
    let mut r = rng(8);
    for _ in 0..20 {
        // (κ C_μz)* = conj(κ) C_{conj(μ) z}
        let mu = polar(&mut r, 0.0, 1.0);
        let k = polar(&mut r, 0.5, 2.0);
        let op1 = WeightedCompOp::new(EntireFunction::constant(k), AffineSymbol::linear(mu).unwrap());
        let op2 = WeightedCompOp::new(EntireFunction::constant(k.conj()), AffineSymbol::linear(mu.conj()).unwrap());
        let s = adjoint_pair_weighted(&op1, &op2, &w, &grid, &tol);
        assert_eq!(s, Symbolic::True);
        expect_agree(&s, numeric_adjoint_pair(&op1, &op2, 32, &w).unwrap(), "weighted pair");
        let op3 = WeightedCompOp::new(EntireFunction::constant(k), AffineSymbol::linear(mu.conj()).unwrap());
        let s = adjoint_pair_weighted(&op1, &op3, &w, &grid, &tol);
        if k.im.abs() > MARGIN {
            assert_eq!(s, Symbolic::False);
            expect_agree(&s, numeric_adjoint_pair(&op1, &op3, 32, &w).unwrap(), "weighted pair");
        }
    }
}

#[test]
fn zero_operator_coherence() {
    let w = WeightSequence::fock();
    let grid = Grid::default();
    let tol = Tolerances::default();
    let phi = AffineSymbol::linear(Complex64::new(0.3, 0.2)).unwrap();
    let zero = WeightedCompOp::new(EntireFunction::zero(), phi);
    assert_eq!(adjoint_pair_weighted(&zero, &zero, &w, &grid, &tol), Symbolic::ZeroOperatorPair);
    let z = EntireFunction::polynomial(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
    let vanishing_at_zero = WeightedCompOp::new(z, phi);
    assert_eq!(adjoint_pair_weighted(&vanishing_at_zero, &zero, &w, &grid, &tol), Symbolic::False);
}

#[test]
fn self_adjoint_necessity() {
    let w = WeightSequence::fock();
    let tol = Tolerances::default();
    let mut r = rng(9);
    let mut certified = 0;
    for i in 0..CASES {
        let nu = match i % 2 {
            0 => Complex64::new(r.gen_range(-1.0..1.0), 0.0),
            _ => polar(&mut r, 0.1, 1.0),
        };
        let c = polar(&mut r, MARGIN, 1.0);
        let alpha = match i % 4 {
            0 | 1 => Complex64::new(r.gen_range(0.5..2.0), 0.0),
            _ => polar(&mut r, 0.5, 2.0),
        };
        let anchor = if i % 5 == 0 { polar(&mut r, 0.0, 1.0) } else { c };
        let op = WeightedCompOp::new(EntireFunction::kernel_multiple(alpha, anchor), AffineSymbol::new(nu, c).unwrap());
        let s = self_adjoint_weighted(&op, &w);
        let res = numeric_self_adjoint(&op, 32, &w).unwrap().0;
        if res < tol.tol_pass {
            certified += 1;
            assert_eq!(s.conditions_hold(), Some(true), "{op}");
        }
        assert_ne!(agreement(&s, Some(res), &tol), Agreement::ParadoxCandidate);
    }
    assert!(certified > 0);
}

#[test]
fn co_isometry_necessity() {
    let w = WeightSequence::fock();
    let tol = Tolerances::default();
    let grid = Grid::default();
    let cfg = EvalConfig::default();
    let mut r = rng(10);
    let mut certified = 0;
    for i in 0..40 {
        let nu = Complex64::from_polar(1.0, r.gen_range(0.0..TAU));
        let d = polar(&mut r, MARGIN, 1.0);
        let q = nu.conj() * d;
        let kq = kernel_eval(q, q, &w, &cfg).unwrap().re.sqrt();
        let alpha = if i % 2 == 0 { Complex64::from_polar(1.0, r.gen_range(0.0..TAU)) } else { polar(&mut r, 0.2, 0.8) };
        let op = WeightedCompOp::new(EntireFunction::kernel_multiple(alpha / kq, q), AffineSymbol::new(nu, -d).unwrap());
        let s = co_isometry_weighted(&op, &w, &tol);
        let res = numeric_co_isometry(&op, &w, &grid, 1e-12).unwrap();
        if res < tol.tol_pass {
            certified += 1;
            assert_eq!(s.conditions_hold(), Some(true));
        }
        assert_eq!(s.conditions_hold(), Some(i % 2 == 0));
    }
    assert!(certified > 0);
}

#[test]
fn co_isometry_implies_isometry() {
    let w = WeightSequence::fock();
    let mut r = rng(11);
    for _ in 0..20 {
        let kappa = Complex64::from_polar(1.0, r.gen_range(0.0..TAU));
        let nu = Complex64::from_polar(1.0, r.gen_range(0.0..TAU));
        let op = WeightedCompOp::new(EntireFunction::constant(kappa), AffineSymbol::linear(nu).unwrap());
        assert_eq!(co_isometry_weighted(&op, &w, &Tolerances::default()), Symbolic::True);
        let coords = |r: &mut ChaCha8Rng| -> Vec<Complex64> { (0..8).map(|_| polar(r, 0.0, 1.0)).collect() };
        let f = EntireFunction::from_onb(&coords(&mut r), &w).unwrap();
        let g = EntireFunction::from_onb(&coords(&mut r), &w).unwrap();
        assert!(isometry_defect(&op, &f, &g, &w, 1e-12).unwrap() < 1e-10);
    }
}
