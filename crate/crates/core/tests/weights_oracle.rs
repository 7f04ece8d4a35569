use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use hardy_core::weights::WeightSequence;

const P: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

struct Oracle {
    cc: Consts,
}

impl Oracle {
    fn new() -> Self {
        Oracle {
            cc: Consts::new().expect("constants cache"),
        }
    }

    fn as_f64(&mut self, x: &BigFloat) -> f64 {
        let s = x.format(Radix::Dec, RM, &mut self.cc).expect("format");
        s.parse().expect("decimal")
    }

    fn ln_fact(&mut self, n: usize) -> BigFloat {
        let mut acc = BigFloat::from_u64(0, P);
        for k in 2..=n as u64 {
            let l = BigFloat::from_u64(k, P).ln(P, RM, &mut self.cc);
            acc = acc.add(&l, P, RM);
        }
        acc
    }

    /// `ln ζ_n` for the factorial presets: `a · ln n!`.
    fn ln_power_factorial(&mut self, a: f64, n: usize) -> BigFloat {
        self.ln_fact(n).mul(&BigFloat::from_f64(a, P), P, RM)
    }

    /// `ln ζ_n = n^p` for the exponential preset.
    fn ln_exp_power(&mut self, p: f64, n: usize) -> BigFloat {
        if n == 0 {
            return BigFloat::from_u64(0, P);
        }
        let ln_n = BigFloat::from_u64(n as u64, P).ln(P, RM, &mut self.cc);
        ln_n.mul(&BigFloat::from_f64(p, P), P, RM).exp(P, RM, &mut self.cc)
    }

    fn exp(&mut self, x: &BigFloat) -> BigFloat {
        x.exp(P, RM, &mut self.cc)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn check(w: &WeightSequence, oracle: &mut Oracle, ln_exact: impl Fn(&mut Oracle, usize) -> BigFloat) {
    for n in 0..=128 {
        let ln = ln_exact(oracle, n);
        let e = oracle.exp(&ln);
        let want = oracle.as_f64(&e);
        if want.is_finite() && want < f64::MAX {
            let got = w.weight(n).unwrap();
            assert!(rel(got, want) < 1e-14, "{w:?} n={n}: {got:e} vs {want:e}");
        } else {
            assert!(w.weight(n).is_err(), "{w:?} n={n} should overflow");
            let want_ln = oracle.as_f64(&ln);
            let got_ln = w.ln_weight(n).unwrap();
            assert!(rel(got_ln, want_ln) < 1e-14, "{w:?} n={n}: ln {got_ln:e} vs {want_ln:e}");
        }
    }
}

#[test]
fn fock_matches_big_float() {
    let mut o = Oracle::new();
    check(&WeightSequence::fock(), &mut o, |o, n| o.ln_power_factorial(0.5, n));
}

#[test]
fn power_factorial_matches_big_float() {
    let mut o = Oracle::new();
    for a in [0.75, 1.0, 1.7] {
        let w = WeightSequence::power_factorial(a).unwrap();
        check(&w, &mut o, |o, n| o.ln_power_factorial(a, n));
    }
}

#[test]
fn exp_power_matches_big_float() {
    let mut o = Oracle::new();
    for p in [1.5, 2.0] {
        let w = WeightSequence::exp_power(p).unwrap();
        check(&w, &mut o, |o, n| o.ln_exp_power(p, n));
    }
}

#[test]
fn closed_form_examples() {
    let fock = WeightSequence::fock();
    assert_eq!(fock.weight(0).unwrap(), 1.0);
    assert!(rel(fock.weight(4).unwrap(), 24f64.sqrt()) < 1e-16);
    let ep = WeightSequence::exp_power(2.0).unwrap();
    assert!(rel(ep.weight(3).unwrap(), 9f64.exp()) < 1e-16);
}

#[test]
fn concurrent_reads_agree() {
    let w = WeightSequence::power_factorial(0.8).unwrap();
    let handles: Vec<_> = (0..8)
        .map(|t| {
            let w = w.clone();
            std::thread::spawn(move || (0..=100).rev().map(|n| w.weight((n + t) % 101).unwrap()).sum::<f64>())
        })
        .collect();
    let sums: Vec<f64> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert!(sums.windows(2).all(|p| p[0] == p[1]) || sums.iter().all(|s| rel(*s, sums[0]) < 1e-15));
    let direct: Vec<f64> = (0..=100).map(|n| w.weight(n).unwrap()).collect();
    let again: Vec<f64> = (0..=100).map(|n| w.weight(n).unwrap()).collect();
    assert_eq!(direct, again);
}
