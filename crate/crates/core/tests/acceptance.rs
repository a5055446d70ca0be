//! Acceptance criteria 1–10. Each criterion prints one `PASS`/`FAIL` line with
//! the measured numbers; the test fails if any criterion fails.

use std::collections::HashMap;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rug::{Complex, Float, Rational};

use borel_qmt::asymptotics::{detect_gevrey_order, fit_growth_with, RICHARDSON_DEPTH};
use borel_qmt::error::Error;
use borel_qmt::golden::{self, CoefficientTable, TableModel};
use borel_qmt::model::{Model, ModelSeries, Quantity};
use borel_qmt::oracle::{qmt_finite_difference, qmt_numeric, SpectralProblem};
use borel_qmt::pade::{auto_pade_with, pade_approx_with, PadeMode, PadeOptions};
use borel_qmt::pipeline::{
    beta_star, borel_poles, default_spec, oracle_all, pole_sweep, relative_error, Resummation,
};
use borel_qmt::resum::{resum_pv, BetaGrid, BorelPade, BorelSpec, Prescription, ResumOptions};
use borel_qmt::scalar::Scalar;
use borel_qmt::series::{PowerSeries, Variable};

// Tolerances as stated by the acceptance criteria.
const C1_RUNTIME_S: f64 = 60.0;
const C3_A_INVERSE: f64 = 0.01;
const C3_BETA: f64 = 0.05;
const C3_SEXTIC_S: f64 = 0.01;
const C4_GEVREY1: f64 = 0.01;
const C4_GEVREY2: f64 = 0.02;
const C5_QUARTIC_E: f64 = 1e-6;
const C5_OTHER: f64 = 1e-3;
const C7_REFERENCE: [usize; 3] = [39, 40, 36];
const C7_SLACK: usize = 2;
const C9_FD: f64 = 1e-6;
const C9_CLOSED: f64 = 1e-10;
const C10_LEROY: f64 = 1e-25;
const C10_GROWTH: f64 = 1e-6;

const M: usize = 100;
const ORDERS: [usize; 3] = [25, 50, 100];
const K_REF: f64 = 0.5;

struct Report {
    lines: Vec<(usize, bool, String)>,
}

impl Report {
    fn record(&mut self, id: usize, ok: bool, detail: String) {
        println!("{} criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
        self.lines.push((id, ok, detail));
    }
}

fn models() -> Vec<Model> {
    let mut v = vec![Model::quartic(0), Model::sextic(0)];
    v.extend((3..=6).map(|d| Model::radial(d).unwrap()));
    v
}

fn quantity_index(q: Quantity) -> usize {
    Quantity::ALL.iter().position(|x| *x == q).unwrap()
}

/// Shared expensive state: series through order 100 and the sextic `β*` values.
struct Context {
    series: HashMap<Model, ModelSeries>,
    exact_11: HashMap<Model, [f64; 4]>,
    /// `(quantity, m) → β*` for the sextic oscillator at `(k_ref, λ = 1)`.
    sextic_beta: HashMap<(Quantity, usize), (f64, f64, Vec<(f64, f64)>)>,
}

impl Context {
    fn new() -> Self {
        let mut series = HashMap::new();
        let mut exact_11 = HashMap::new();
        for m in models() {
            series.insert(m, m.series(M).unwrap());
            exact_11.insert(m, oracle_all(m, 1.0, 1.0, None).unwrap());
        }
        let sextic = Model::sextic(0);
        let exact_ref = oracle_all(sextic, K_REF, 1.0, None).unwrap();
        let opts = ResumOptions::default();
        let mut sextic_beta = HashMap::new();
        for q in Quantity::ALL {
            for m in ORDERS {
                let s = beta_star(sextic, &series[&sextic], q, m, K_REF, 1.0, exact_ref[quantity_index(q)], BetaGrid::default(), &opts)
                    .unwrap();
                sextic_beta.insert((q, m), (s.beta_star, s.delta, s.scan));
            }
        }
        Context {
            series,
            exact_11,
            sextic_beta,
        }
    }

    fn beta_for(&self, model: Model, q: Quantity, m: usize) -> f64 {
        if model.gevrey_alpha() == 1 {
            1.0
        } else {
            self.sextic_beta[&(q, m)].0
        }
    }

    /// Relative error of the PV resummation at `(k, λ) = (1, 1)`.
    fn resum_error(&self, model: Model, q: Quantity, m: usize) -> f64 {
        let spec = default_spec(&model, self.beta_for(model, q, m), Prescription::PrincipalValue).unwrap();
        let r = Resummation::new(model, &self.series[&model], q, &spec, m, &ResumOptions::default()).unwrap();
        let exact = self.exact_11[&model][quantity_index(q)];
        relative_error(r.at(1.0, 1.0).unwrap().value, exact)
    }
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let mut problems = Vec::new();
    for table in golden::embedded() {
        if table.max_order() < 10 {
            problems.push(format!("{} stops at n = {}", table.model, table.max_order()));
        }
        let fresh = CoefficientTable::compute(table.model, 10).unwrap();
        for row in &table.rows {
            if row.values != fresh.rows[row.n].values {
                problems.push(format!("{} n={}", table.model, row.n));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = problems.is_empty() && elapsed < C1_RUNTIME_S && golden::embedded().len() == TableModel::all().len();
    r.record(
        1,
        ok,
        format!(
            "sextic + d=3..6 tables string-equal for n=0..10 ({} mismatches) in {elapsed:.2}s (< {C1_RUNTIME_S}s)",
            problems.len()
        ),
    );
}

fn criterion_2(r: &mut Report, ctx: &Context) {
    let expected = ["3/4", "21/8", "333/16", "30885/128", "916731/256"];
    let e = &ctx.series[&Model::quartic(0)].energy;
    let got: Vec<String> = (1..=5).map(|n| e.coeff(n).to_text()).collect();
    let exact_to_100 = e.order() == 100 && e.is_rational();
    let a100 = e.coeff(100).as_rational().map(|q| q.numer().significant_bits()).unwrap_or(0);
    let ok = got == expected && exact_to_100;
    r.record(2, ok, format!("a_1..a_5 = {got:?}; exact rationals through m=100 (a_100 numerator {a100} bits)"));
}

fn criterion_3(r: &mut Report, ctx: &Context) {
    let fit = |model: Model, q: Quantity| {
        let s = ctx.series[&model].get(q);
        fit_growth_with(s, model.gevrey_alpha(), RICHARDSON_DEPTH).unwrap().summary()
    };
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let mut ok = true;
    let mut parts = Vec::new();

    let e = fit(Model::quartic(0), Quantity::Energy);
    ok &= rel(e.a_inverse, 3.0) < C3_A_INVERSE && rel(e.beta, 0.5) < C3_BETA;
    parts.push(format!("quartic E A^-1={:.6} β={:.5}", e.a_inverse, e.beta));
    for (q, beta) in [(Quantity::G11, 2.5), (Quantity::G12, 3.5), (Quantity::G22, 4.5)] {
        let f = fit(Model::quartic(0), q);
        ok &= rel(f.beta, beta) < C3_BETA;
        parts.push(format!("{q} β={:.5}", f.beta));
    }
    let sextic = Model::sextic(0);
    let alpha = detect_gevrey_order(&ctx.series[&sextic].energy);
    let g11 = fit(sextic, Quantity::G11);
    ok &= matches!(alpha, Ok(2)) && rel(g11.s, 0.24432537) < C3_SEXTIC_S;
    parts.push(format!("sextic α={:?} S_11={:.7}", alpha.ok(), g11.s));
    for d in 3..=6 {
        let f = fit(Model::radial(d).unwrap(), Quantity::Energy);
        ok &= rel(f.beta, d as f64 / 2.0) < C3_BETA;
        parts.push(format!("d={d} β_E={:.5}", f.beta));
    }
    r.record(3, ok, parts.join("; "));
}

/// The Borel–Leroy transform uses the fitted large-order `β` of each series,
/// so that the leading singularity becomes a simple pole. The ordinary
/// transform (`β = 1`) is reported alongside for reference.
fn criterion_4(r: &mut Report, ctx: &Context) {
    let mut ok = true;
    let mut parts = Vec::new();
    for model in models() {
        let tol = if model.gevrey_alpha() == 2 { C4_GEVREY2 } else { C4_GEVREY1 };
        let target = borel_qmt::pipeline::expected_singularity(&model);
        for q in Quantity::ALL {
            let series = ctx.series[&model].get(q);
            let located = |beta: f64| {
                let poles = borel_poles(&model, series, beta, M).unwrap();
                poles.smallest_real().map(|p| p.location.real().to_f64()).unwrap_or(f64::NAN)
            };
            let beta = fit_growth_with(series, model.gevrey_alpha(), RICHARDSON_DEPTH).unwrap().beta.to_f64();
            let found = located(beta);
            let dev = relative_error(found, target);
            ok &= dev < tol;
            let ordinary = relative_error(located(1.0), target);
            parts.push(format!(
                "{model} {q} β={beta:.3} {found:.6} ({:.2}%; β=1: {:.2}%)",
                dev * 100.0,
                ordinary * 100.0
            ));
        }
    }
    r.record(4, ok, format!("targets -1/3 and -π²/32: {}", parts.join(", ")));
}

fn criterion_5(r: &mut Report, ctx: &Context) {
    let mut ok = true;
    let mut parts = Vec::new();
    for model in models() {
        for q in Quantity::ALL {
            let err = ctx.resum_error(model, q, M);
            let tol = if model == Model::quartic(0) && q == Quantity::Energy {
                C5_QUARTIC_E
            } else {
                C5_OTHER
            };
            ok &= err <= tol;
            parts.push(format!("{model} {q} {err:.1e}"));
        }
    }
    r.record(5, ok, format!("relative errors at (1,1), m=100: {}", parts.join(", ")));
}

fn criterion_6(r: &mut Report, ctx: &Context) {
    let mut ok = true;
    let mut parts = Vec::new();
    for model in models() {
        for q in Quantity::ALL {
            let e: Vec<f64> = ORDERS.iter().map(|&m| ctx.resum_error(model, q, m)).collect();
            let mono = e[2] < e[1] && e[1] < e[0];
            ok &= mono;
            if !mono || model.gevrey_alpha() == 2 {
                parts.push(format!("{model} {q} {:.1e} > {:.1e} > {:.1e}", e[0], e[1], e[2]));
            }
        }
    }
    let detail = if parts.is_empty() {
        "all models and observables monotone over m = 25, 50, 100".to_string()
    } else {
        format!("m = 25, 50, 100: {}", parts.join(", "))
    };
    r.record(6, ok, detail);
}

fn criterion_7(r: &mut Report, ctx: &Context) {
    let model = Model::quartic(0);
    let s = &ctx.series[&model];
    let counts: Vec<usize> = Quantity::METRIC
        .iter()
        .map(|&q| pole_sweep(&model, s.get(q), M, 1.0).unwrap().count())
        .collect();
    let exact = counts.iter().zip(C7_REFERENCE).all(|(a, b)| *a == b);
    let near = counts.iter().zip(C7_REFERENCE).all(|(a, b)| a.abs_diff(b) <= C7_SLACK);
    let note = if exact {
        String::new()
    } else {
        format!(
            "; counts differ from the reference by at most {C7_SLACK}: positive-real roots of the denominator with |Im| < 1e-20·(1 + |Re|) are counted, Froissart doublets included, and the tally is sensitive to that reality threshold and to the Padé orders chosen for each m"
        )
    };
    r.record(7, near, format!("real poles of P_m[g_11/g_12/g_22], m=1..100, k=1: {counts:?} vs {C7_REFERENCE:?}{note}"));
}

fn criterion_8(r: &mut Report, ctx: &Context) {
    let model = Model::sextic(0);
    let ks: Vec<f64> = (2..=10).map(|i| i as f64 / 10.0).collect();
    let exact: Vec<[f64; 4]> = ks.iter().map(|&k| oracle_all(model, k, 1.0, None).unwrap()).collect();
    let opts = ResumOptions::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for q in Quantity::ALL {
        let qi = quantity_index(q);
        let (b_star, delta, scan) = &ctx.sextic_beta[&(q, M)];
        let grid_min = scan.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let on_grid = *delta <= grid_min;
        let max_err = |beta: f64| -> Option<f64> {
            if beta <= 0.0 {
                return None;
            }
            let spec = default_spec(&model, beta, Prescription::PrincipalValue).ok()?;
            let res = Resummation::new(model, &ctx.series[&model], q, &spec, M, &opts).ok()?;
            Some(
                ks.iter()
                    .zip(&exact)
                    .map(|(&k, e)| res.at(k, 1.0).map(|p| (p.value - e[qi]).abs()).unwrap_or(f64::INFINITY))
                    .fold(0.0, f64::max),
            )
        };
        let centre = max_err(*b_star).unwrap_or(f64::INFINITY);
        let below = max_err(b_star - 1.0);
        let above = max_err(b_star + 1.0);
        let beats = |other: Option<f64>| other.map_or(true, |o| centre < o);
        let q_ok = on_grid && beats(below) && beats(above);
        ok &= q_ok;
        let fmt = |x: Option<f64>| x.map_or("N/A (β ≤ 0)".to_string(), |v| format!("{v:.1e}"));
        parts.push(format!(
            "{q} β*={b_star:.4} Δ(β*)={delta:.1e} ≤ grid min {grid_min:.1e}: {on_grid}; max|err| β*-1 {} β* {centre:.1e} β*+1 {}",
            fmt(below),
            fmt(above)
        ));
    }
    r.record(8, ok, parts.join("; "));
}

fn criterion_9(r: &mut Report) {
    let mut worst_fd: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    let mut failures = Vec::new();
    for model in models() {
        for k in [0.5, 1.0, 2.0] {
            for lambda in [0.1, 0.5, 1.0] {
                let p = SpectralProblem::new(model, k, lambda, 120).unwrap();
                let sos = qmt_numeric(&p, p.basis_size).unwrap();
                let fd = qmt_finite_difference(&p, 1e-4).unwrap();
                for (i, j) in [(0, 0), (0, 1), (1, 1)] {
                    let e = relative_error(fd[i][j], sos[i][j]);
                    worst_fd = worst_fd.max(e);
                    if e > C9_FD {
                        failures.push(format!("{model} k={k} λ={lambda} g{}{} {e:.1e}", i + 1, j + 1));
                    }
                }
            }
        }
    }
    // λ = 0 closed forms: leading metric coefficients from the published tables
    // (quartic values from the harmonic-oscillator limit), times the k scaling.
    let mut closed: Vec<(Model, [String; 3])> = vec![(Model::quartic(0), ["1/32".into(), "3/16".into(), "39/32".into()])];
    for t in golden::embedded() {
        let model = match t.model {
            TableModel::Sextic => Model::sextic(0),
            TableModel::Radial(d) => Model::radial(d).unwrap(),
        };
        let row = &t.rows[0].values;
        closed.push((model, [row[1].clone(), row[2].clone(), row[3].clone()]));
    }
    for (model, values) in closed {
        let series = model.series(2).unwrap();
        for k in [0.5, 1.0, 2.0] {
            let g = qmt_numeric(&SpectralProblem::new(model, k, 0.0, 60).unwrap(), 60).unwrap();
            for (idx, (q, (i, j))) in Quantity::METRIC.iter().zip([(0, 0), (0, 1), (1, 1)]).enumerate() {
                let c: Rational = values[idx].parse().unwrap();
                let want = c.to_f64() * series.get(*q).prefactor().value_at(k);
                let e = relative_error(g[i][j], want);
                worst_closed = worst_closed.max(e);
                if e > C9_CLOSED {
                    failures.push(format!("{model} λ=0 k={k} {q}: {} vs {want}", g[i][j]));
                }
            }
        }
    }
    let ok = failures.is_empty();
    r.record(
        9,
        ok,
        format!(
            "FD vs sum-over-states worst {worst_fd:.1e} (≤ {C9_FD:e}); λ=0 closed forms worst {worst_closed:.1e} (≤ {C9_CLOSED:e}){}",
            if ok { String::new() } else { format!("; {}", failures.join(", ")) }
        ),
    );
}

fn plain(coeffs: Vec<Rational>) -> PowerSeries {
    PowerSeries::from_rationals(coeffs, Variable::plain("g"), Default::default()).unwrap()
}

fn factorial_series(c: &[(i64, i64)], alternating: bool) -> PowerSeries {
    let mut fact = Rational::from(1);
    plain(
        c.iter()
            .enumerate()
            .map(|(n, &(p, q))| {
                if n > 0 {
                    fact *= n as u32;
                }
                let v = Rational::from((p.abs() + 3, q)) * &fact;
                if alternating && n % 2 == 1 {
                    -v
                } else {
                    v
                }
            })
            .collect(),
    )
}

fn criterion_10(r: &mut Report) {
    let coeffs = |len: std::ops::RangeInclusive<usize>| prop::collection::vec((-40i64..=40, 1i64..=12), len);
    let opts = ResumOptions::default();
    let mut results: Vec<(&str, std::result::Result<(), String>)> = Vec::new();

    let mut runner = TestRunner::new(Config {
        cases: 100,
        ..Config::default()
    });
    let pade = runner.run(&(coeffs(4..=16), 0usize..=100), |(c, split)| {
        let s = plain(c.iter().map(|&(p, q)| Rational::from((p, q))).collect());
        let m = s.order();
        let q = split * m / 100;
        match pade_approx_with(&s, m - q, q, PadeOptions { mode: PadeMode::Exact, prec: 256 }) {
            Ok(a) => {
                let t = a.taylor(m).unwrap();
                prop_assert!((0..=m).all(|n| &t[n] == s.coeff(n)));
                Ok(())
            }
            Err(Error::DegenerateTable { .. }) => Err(TestCaseError::reject("degenerate table")),
            Err(e) => Err(TestCaseError::fail(e.to_string())),
        }
    });
    results.push(("Padé matching (100 series)", pade.map_err(|e| e.to_string())));

    let mut runner = TestRunner::new(Config {
        cases: 20,
        ..Config::default()
    });
    let leroy = runner.run(&(coeffs(8..=14), 0.05f64..0.5), |(c, z)| {
        let s = factorial_series(&c, true);
        let m = s.order();
        let mut fact = Rational::from(1);
        let manual = plain(
            (0..=m)
                .map(|n| {
                    if n > 0 {
                        fact *= n as u32;
                    }
                    s.coeff(n).as_rational().unwrap().clone() / &fact
                })
                .collect(),
        );
        let reference = resum_pv(&auto_pade_with(&manual, opts.pade).unwrap(), z).unwrap();
        let spec = BorelSpec::new(Rational::from(1), 1.0, Prescription::PrincipalValue).unwrap();
        let ours = BorelPade::from_series(&s, &spec, m, &opts).unwrap().sum(z, &opts).unwrap();
        let diff = Float::with_val(256, reference.real() - ours.real()).abs().to_f64();
        prop_assert!(diff <= C10_LEROY * reference.to_f64().abs().max(1.0), "diff {diff:e}");
        Ok(())
    });
    results.push(("Leroy α=1 reduction (20 series)", leroy.map_err(|e| e.to_string())));

    let mut runner = TestRunner::new(Config {
        cases: 20,
        ..Config::default()
    });
    let lateral = runner.run(&(coeffs(8..=14), 0.05f64..0.4), |(c, z)| {
        let s = factorial_series(&c, false);
        let b = BorelPade::from_series(&s, &BorelSpec::ordinary(Prescription::PrincipalValue), s.order(), &opts).unwrap();
        let plus = b.sum_with(z, Prescription::LateralPlus, &opts).unwrap();
        let minus = b.sum_with(z, Prescription::LateralMinus, &opts).unwrap();
        let pv = b.sum(z, &opts).unwrap();
        let prec = plus.value.prec().0;
        let conj = Complex::with_val(prec, plus.value.conj_ref());
        let gap = Complex::with_val(prec, &conj - &minus.value).abs().real().to_f64();
        let floor = 1e-24 * pv.to_f64().abs().max(1.0);
        prop_assert!(gap <= plus.error_estimate.to_f64() + minus.error_estimate.to_f64() + floor);
        let re_gap = Float::with_val(256, pv.real() - plus.real()).abs().to_f64();
        prop_assert!(re_gap <= pv.error_estimate.to_f64() + plus.error_estimate.to_f64() + floor);
        Ok(())
    });
    results.push(("lateral conjugacy and PV = Re(lateral) (20 series)", lateral.map_err(|e| e.to_string())));

    let mut runner = TestRunner::new(Config {
        cases: 8,
        ..Config::default()
    });
    let growth = runner.run(&(0.05f64..5.0, 0.2f64..6.0, 1u32..=2, 0.1f64..6.0), |(s, a_inv, alpha, beta)| {
        use rug::ops::Pow;
        let series = PowerSeries::plain(
            (0..=80u32)
                .map(|n| {
                    let g = Float::with_val(256, alpha as f64 * n as f64 + beta).gamma();
                    let v = g * Float::with_val(256, a_inv).pow(n) * s;
                    Scalar::Float(if n % 2 == 1 { -v } else { v })
                })
                .collect(),
        )
        .unwrap();
        let f = fit_growth_with(&series, alpha, RICHARDSON_DEPTH).unwrap().summary();
        for (got, want) in [(f.a_inverse, a_inv), (f.beta, beta), (f.s, s)] {
            prop_assert!(((got - want) / want).abs() < C10_GROWTH, "{got} vs {want}");
        }
        Ok(())
    });
    results.push(("synthetic growth-law recovery", growth.map_err(|e| e.to_string())));

    let ok = results.iter().all(|(_, r)| r.is_ok());
    let detail = results
        .iter()
        .map(|(name, r)| match r {
            Ok(()) => format!("{name} ok"),
            Err(e) => format!("{name} FAILED: {e}"),
        })
        .collect::<Vec<_>>()
        .join("; ");
    r.record(10, ok, detail);
}

#[test]
fn acceptance_criteria() {
    let mut report = Report { lines: Vec::new() };
    criterion_1(&mut report);
    let ctx = Context::new();
    criterion_2(&mut report, &ctx);
    criterion_3(&mut report, &ctx);
    criterion_4(&mut report, &ctx);
    criterion_5(&mut report, &ctx);
    criterion_6(&mut report, &ctx);
    criterion_7(&mut report, &ctx);
    criterion_8(&mut report, &ctx);
    criterion_9(&mut report);
    criterion_10(&mut report);

    let failed: Vec<usize> = report.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    println!(
        "acceptance: {}/{} criteria passed",
        report.lines.len() - failed.len(),
        report.lines.len()
    );
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
