use rug::Rational;

use borel_qmt::model::{Model, Quantity};
use borel_qmt::pipeline::{oracle_value, relative_error};
use borel_qmt::scalar::Scalar;

const QUANTITIES: [Quantity; 4] = [Quantity::Energy, Quantity::G11, Quantity::G12, Quantity::G22];

/// Partial sum at `k = 1` truncated just before the smallest term.
fn superasymptotic(model: &Model, quantity: Quantity, m: usize, lambda: f64) -> f64 {
    let series = model.series(m).unwrap();
    let s = series.get(quantity).to_coupling();
    let x = Scalar::Float(rug::Float::with_val(256, lambda));
    let n = s.optimal_truncation_index(&x).unwrap();
    let sums = s.partial_sums(&x);
    sums[n - 1].to_float(256).to_f64() * s.prefactor().value_at(1.0)
}

#[test]
fn quartic_partial_sums_agree_with_the_oracle_at_small_coupling() {
    let model = Model::quartic(0);
    for lambda in [0.005, 0.01] {
        for q in QUANTITIES {
            let series = superasymptotic(&model, q, 100, lambda);
            let exact = oracle_value(model, q, 1.0, lambda, None).unwrap();
            let err = relative_error(series, exact);
            assert!(err <= 1e-4, "λ={lambda} {q:?}: series {series} oracle {exact} rel {err:e}");
        }
    }
}

#[test]
fn excited_state_energies_agree_with_the_oracle_at_small_coupling() {
    for state in 1..=4 {
        let model = Model::quartic(state);
        for lambda in [0.005, 0.01] {
            let series = superasymptotic(&model, Quantity::Energy, 50, lambda);
            let exact = oracle_value(model, Quantity::Energy, 1.0, lambda, None).unwrap();
            let err = relative_error(series, exact);
            assert!(err <= 1e-4, "N={state} λ={lambda}: series {series} oracle {exact} rel {err:e}");
        }
    }
}

#[test]
fn quartic_g11_coefficient_ratio_approaches_three() {
    let s = Model::quartic(0).series(100).unwrap();
    let c = s.get(Quantity::G11);
    let a = c.coeff(99).as_rational().unwrap().clone();
    let b = c.coeff(100).as_rational().unwrap().clone();
    let ratio = (b / a / Rational::from((99 * 2 + 5, 2))).abs().to_f64();
    assert!((ratio - 3.0).abs() / 3.0 <= 0.02, "ratio {ratio}");
}
