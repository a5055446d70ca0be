//! Randomized invariants of the Padé, Borel and asymptotic layers.

use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use borel_qmt::asymptotics::fit_growth;
use borel_qmt::error::Error;
use borel_qmt::pade::{auto_pade_with, pade_approx_with, PadeMode, PadeOptions};
use borel_qmt::resum::{resum_pv, BorelPade, BorelSpec, Prescription, ResumOptions};
use borel_qmt::scalar::Scalar;
use borel_qmt::series::{PowerSeries, Variable};

fn rational_series(c: &[(i64, i64)]) -> PowerSeries {
    let coeffs = c.iter().map(|&(p, q)| Rational::from((p, q))).collect();
    PowerSeries::from_rationals(coeffs, Variable::plain("g"), Default::default()).unwrap()
}

fn coeffs_strategy(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-40i64..=40, 1i64..=12), len)
}

/// `a_n` growing like `n!` with random rational fluctuations and sign pattern.
fn factorial_series(c: &[(i64, i64)], alternating: bool) -> PowerSeries {
    let mut fact = Rational::from(1);
    let coeffs = c
        .iter()
        .enumerate()
        .map(|(n, &(p, q))| {
            if n > 0 {
                fact *= n as u32;
            }
            let base = Rational::from((p.abs() + 3, q)) * &fact;
            if alternating && n % 2 == 1 {
                -base
            } else {
                base
            }
        })
        .collect();
    PowerSeries::from_rationals(coeffs, Variable::plain("g"), Default::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn pade_matches_series_exactly_in_rational_mode(c in coeffs_strategy(4..=16), split in 0usize..=100) {
        let s = rational_series(&c);
        let m = s.order();
        let q = split * m / 100;
        let p = m - q;
        let opts = PadeOptions { mode: PadeMode::Exact, prec: 256 };
        match pade_approx_with(&s, p, q, opts) {
            Ok(a) => {
                prop_assert!(a.is_exact());
                let taylor = a.taylor(m).unwrap();
                for n in 0..=m {
                    prop_assert_eq!(&taylor[n], s.coeff(n), "coefficient {} of [{}/{}]", n, p, q);
                }
            }
            Err(Error::DegenerateTable { .. }) => prop_assume!(false),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, ..ProptestConfig::default() })]

    /// Leroy with α = β = 1 against a Borel transform built by hand (`a_n / n!`).
    #[test]
    fn leroy_alpha_one_reduces_to_ordinary_borel(c in coeffs_strategy(8..=14), z in 0.05f64..0.5) {
        let s = factorial_series(&c, true);
        let m = s.order();
        let mut fact = Rational::from(1);
        let manual: Vec<Rational> = (0..=m)
            .map(|n| {
                if n > 0 {
                    fact *= n as u32;
                }
                s.coeff(n).as_rational().unwrap().clone() / &fact
            })
            .collect();
        let borel = PowerSeries::from_rationals(manual, Variable::plain("u"), Default::default()).unwrap();
        let opts = ResumOptions::default();
        let reference = resum_pv(&auto_pade_with(&borel, opts.pade).unwrap(), z);
        let leroy = BorelSpec::new(Rational::from(1), 1.0, Prescription::PrincipalValue).unwrap();
        let ours = BorelPade::from_series(&s, &leroy, m, &opts).and_then(|b| b.sum(z, &opts));
        match (reference, ours) {
            (Ok(r), Ok(o)) => {
                let diff = Float::with_val(256, r.real() - o.real()).abs().to_f64();
                let scale = r.real().to_f64().abs().max(1.0);
                prop_assert!(diff <= 1e-25 * scale, "difference {diff:e}");
            }
            (Err(_), Err(_)) => {}
            (r, o) => return Err(TestCaseError::fail(format!("only one side failed: {:?} / {:?}", r.err(), o.err()))),
        }
    }

    #[test]
    fn lateral_sums_are_complex_conjugates(c in coeffs_strategy(8..=14), z in 0.05f64..0.4) {
        let s = factorial_series(&c, false);
        let opts = ResumOptions::default();
        let b = BorelPade::from_series(&s, &BorelSpec::ordinary(Prescription::PrincipalValue), s.order(), &opts).unwrap();
        let plus = b.sum_with(z, Prescription::LateralPlus, &opts).unwrap();
        let minus = b.sum_with(z, Prescription::LateralMinus, &opts).unwrap();
        let prec = plus.value.prec().0;
        let conj = Complex::with_val(prec, plus.value.conj_ref());
        let gap = Complex::with_val(prec, &conj - &minus.value).abs().real().to_f64();
        let tol = plus.error_estimate.to_f64() + minus.error_estimate.to_f64() + 1e-24 * plus.real().to_f64().abs().max(1.0);
        prop_assert!(gap <= tol, "gap {gap:e} tolerance {tol:e}");
    }

    #[test]
    fn principal_value_is_real_part_of_lateral_sum(c in coeffs_strategy(8..=14), z in 0.05f64..0.4) {
        let s = factorial_series(&c, false);
        let opts = ResumOptions::default();
        let b = BorelPade::from_series(&s, &BorelSpec::ordinary(Prescription::PrincipalValue), s.order(), &opts).unwrap();
        let pv = b.sum(z, &opts).unwrap();
        let plus = b.sum_with(z, Prescription::LateralPlus, &opts).unwrap();
        prop_assert!(pv.ambiguity().is_zero());
        let gap = Float::with_val(256, pv.real() - plus.real()).abs().to_f64();
        let tol = pv.error_estimate.to_f64() + plus.error_estimate.to_f64() + 1e-24 * pv.real().to_f64().abs().max(1.0);
        prop_assert!(gap <= tol, "gap {gap:e} tolerance {tol:e}");
    }
}

fn synthetic(s: f64, a_inv: f64, alpha: u32, beta: f64, m: usize) -> PowerSeries {
    let prec = 256;
    let coeffs = (0..=m)
        .map(|n| {
            let g = Float::with_val(prec, alpha as f64 * n as f64 + beta).gamma();
            let v = g * Float::with_val(prec, a_inv).pow(n as u32) * s;
            Scalar::Float(if n % 2 == 1 { -v } else { v })
        })
        .collect();
    PowerSeries::plain(coeffs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn growth_law_parameters_are_recovered(
        s in 0.05f64..5.0,
        a_inv in 0.2f64..6.0,
        alpha in 1u32..=2,
        beta in 0.1f64..6.0,
    ) {
        let fit = fit_growth(&synthetic(s, a_inv, alpha, beta, 80), alpha).unwrap();
        let rel = |x: &Float, y: f64| ((x.to_f64() - y) / y).abs();
        prop_assert!(rel(&fit.a_inverse, a_inv) < 1e-6, "A^-1 {}", fit.a_inverse);
        prop_assert!(rel(&fit.beta, beta) < 1e-6, "beta {}", fit.beta);
        prop_assert!(rel(&fit.s, s) < 1e-6, "S {}", fit.s);
    }
}
