//! Golden-table and property checks behind `borel-qmt verify`.

use std::path::Path;

use rug::{Complex, Rational};

use borel_qmt::error::Result;
use borel_qmt::golden::{self, CoefficientTable, TableModel};
use borel_qmt::model::Model;
use borel_qmt::oracle::{qmt_numeric, SpectralProblem};
use borel_qmt::pade::{pade_approx_with, PadeMode, PadeOptions};
use borel_qmt::resum::{BorelPade, BorelSpec, Prescription, ResumOptions};
use borel_qmt::series::{PowerSeries, Variable};

struct Check {
    name: String,
    run: Box<dyn Fn() -> Result<Vec<String>>>,
}

impl Check {
    fn new(name: impl Into<String>, run: impl Fn() -> Result<Vec<String>> + 'static) -> Self {
        Check {
            name: name.into(),
            run: Box::new(run),
        }
    }
}

/// Prints one line per check and returns whether all selected checks passed.
pub fn run(only: &[String], fixtures: Option<&Path>) -> Result<bool> {
    let tables = match fixtures {
        Some(dir) => golden::load_dir(dir)?,
        None => golden::embedded(),
    };
    let mut checks: Vec<Check> = Vec::new();
    for model in TableModel::all() {
        let table = tables.iter().find(|t| t.model == model).cloned();
        checks.push(Check::new(model.file_stem(), move || table_failures(model, table.as_ref())));
    }
    checks.push(Check::new("quartic-coefficients", quartic_coefficients));
    checks.push(Check::new("properties-pade-matching", pade_matching));
    checks.push(Check::new("properties-leroy-reduction", leroy_reduction));
    checks.push(Check::new("properties-lateral-conjugacy", lateral_conjugacy));
    checks.push(Check::new("properties-oracle-closed-forms", oracle_closed_forms));

    let selected: Vec<&Check> = checks
        .iter()
        .filter(|c| only.is_empty() || only.iter().any(|o| c.name.starts_with(o.as_str())))
        .collect();
    if selected.is_empty() {
        let names: Vec<&str> = checks.iter().map(|c| c.name.as_str()).collect();
        return Err(borel_qmt::error::Error::Parse(format!(
            "--only matched no checks; available: {}",
            names.join(", ")
        )));
    }
    let mut ok = true;
    for c in selected {
        match (c.run)() {
            Ok(f) if f.is_empty() => println!("PASS {}", c.name),
            Ok(f) => {
                ok = false;
                println!("FAIL {} ({} problems)", c.name, f.len());
                for line in f {
                    println!("  {line}");
                }
            }
            Err(e) => {
                ok = false;
                println!("FAIL {}: {e}", c.name);
            }
        }
    }
    Ok(ok)
}

fn table_failures(model: TableModel, table: Option<&CoefficientTable>) -> Result<Vec<String>> {
    let Some(table) = table else {
        return Ok(vec![format!("{}.csv is missing", model.file_stem())]);
    };
    let mut out: Vec<String> = golden::check(table)?.iter().map(ToString::to_string).collect();
    if table.max_order() < 10 {
        out.push(format!("{model}: table stops at n = {}, expected n = 10", table.max_order()));
    }
    Ok(out)
}

fn quartic_coefficients() -> Result<Vec<String>> {
    let expected = ["1/2", "3/4", "21/8", "333/16", "30885/128", "916731/256"];
    let series = Model::quartic(0).series(100)?;
    let mut out = Vec::new();
    for (n, want) in expected.iter().enumerate() {
        let got = series.energy.coeff(n).to_text();
        if got != *want {
            out.push(format!("quartic a_{n}: expected {want} but computed {got}"));
        }
    }
    if !series.energy.is_rational() || series.energy.order() != 100 {
        out.push("quartic energy series is not exact through order 100".into());
    }
    Ok(out)
}

/// Deterministic rational test series `c_n = (-1)^n (n² + s + 1) / ((n + 2)(2n + 3))`,
/// whose generating function is not rational.
fn sample_series(m: usize, shift: i64) -> PowerSeries {
    let coeffs = (0..=m as i64)
        .map(|n| {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            Rational::from((sign * (n * n + shift + 1), (n + 2) * (2 * n + 3)))
        })
        .collect();
    PowerSeries::from_rationals(coeffs, Variable::plain("g"), Default::default())
        .expect("valid series")
}

fn pade_matching() -> Result<Vec<String>> {
    let mut out = Vec::new();
    let opts = PadeOptions {
        mode: PadeMode::Exact,
        prec: 256,
    };
    for (shift, (p, q)) in [(0, (4, 4)), (1, (5, 3)), (2, (3, 6)), (5, (6, 6))] {
        let s = sample_series(p + q, shift);
        let approx = pade_approx_with(&s, p, q, opts)?;
        let taylor = approx.taylor(p + q)?;
        for (n, c) in taylor.iter().enumerate() {
            if c != s.coeff(n) {
                out.push(format!("[{p}/{q}] shift {shift}: coefficient {n} is {} not {}", c.to_text(), s.coeff(n).to_text()));
            }
        }
    }
    Ok(out)
}

fn leroy_reduction() -> Result<Vec<String>> {
    let opts = ResumOptions::default();
    let s = sample_series(16, 0);
    let ordinary = BorelPade::from_series(&s, &BorelSpec::ordinary(Prescription::Ordinary), 16, &opts)?.sum(0.3, &opts)?;
    let leroy = BorelSpec::new(Rational::from(1), 1.0, Prescription::Ordinary)?;
    let l = BorelPade::from_series(&s, &leroy, 16, &opts)?.sum(0.3, &opts)?;
    let diff = (ordinary.real() - l.real()).abs().to_f64();
    Ok(if diff <= 1e-25 {
        Vec::new()
    } else {
        vec![format!("Leroy α = 1, β = 1 differs from ordinary Borel by {diff:e}")]
    })
}

fn lateral_conjugacy() -> Result<Vec<String>> {
    let opts = ResumOptions::default();
    // Non-alternating growth puts a Borel pole on the positive axis.
    let e = Model::quartic(0).series(30)?.energy;
    let s = PowerSeries::from_rationals(e.rationals().expect("exact series"), Variable::plain("g"), Default::default())?;
    let spec = BorelSpec::ordinary(Prescription::PrincipalValue);
    let b = BorelPade::from_series(&s, &spec, 30, &opts)?;
    let plus = b.sum_with(0.05, Prescription::LateralPlus, &opts)?;
    let minus = b.sum_with(0.05, Prescription::LateralMinus, &opts)?;
    let pv = b.sum_with(0.05, Prescription::PrincipalValue, &opts)?;
    let conj = Complex::with_val(plus.value.prec().0, plus.value.conj_ref());
    let gap = Complex::with_val(plus.value.prec().0, &conj - &minus.value).abs().real().to_f64();
    let scale = plus.value.clone().abs().real().to_f64().max(1.0);
    let mut out = Vec::new();
    let tol = 1e-20 * scale + plus.error_estimate.to_f64() + minus.error_estimate.to_f64();
    if gap > tol {
        out.push(format!("S+ and S- are not conjugate: |conj(S+) - S-| = {gap:e}"));
    }
    let re_gap = (plus.real() - pv.real()).abs().to_f64();
    let tol = plus.error_estimate.to_f64() + pv.error_estimate.to_f64() + 1e-20 * scale;
    if re_gap > tol {
        out.push(format!("PV differs from Re(S+) by {re_gap:e} (tolerance {tol:e})"));
    }
    Ok(out)
}

fn oracle_closed_forms() -> Result<Vec<String>> {
    let mut out = Vec::new();
    for k in [0.5, 1.0, 2.0] {
        let g = qmt_numeric(&SpectralProblem::new(Model::quartic(0), k, 0.0, 60)?, 60)?;
        let cases = [
            ("g11", g[0][0], 1.0 / (32.0 * k * k)),
            ("g12", g[0][1], 3.0 / (16.0 * k.powf(2.5))),
            ("g22", g[1][1], 39.0 / (32.0 * k.powi(3))),
        ];
        for (name, got, want) in cases {
            if ((got - want) / want).abs() > 1e-10 {
                out.push(format!("quartic {name} at k = {k}, λ = 0: {got} vs {want}"));
            }
        }
    }
    for d in 3..=6u32 {
        let g = qmt_numeric(&SpectralProblem::new(Model::radial(d)?, 1.0, 0.0, 60)?, 60)?;
        let want = d as f64 / 32.0;
        if ((g[0][0] - want) / want).abs() > 1e-10 {
            out.push(format!("d = {d} g11 at λ = 0: {} vs {want}", g[0][0]));
        }
    }
    Ok(out)
}
