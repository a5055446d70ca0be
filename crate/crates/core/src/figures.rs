//! Datasets behind the standard figures, as CSV or JSON with a metadata header.
//!
//! | id     | content                                                                  |
//! |--------|--------------------------------------------------------------------------|
//! | fig2a  | quartic `E₀(k)`: plain Padé, Borel–Padé and diagonalization              |
//! | fig2b  | quartic `E₀(k)`: Borel–Padé at several orders and diagonalization        |
//! | fig3   | real poles of `P_m[g_ij]` at positive coupling, `m = 1..m_max`           |
//! | fig4   | Borel-plane poles of `E₀` and `g_ij` at one order                         |
//! | fig5   | quartic ground-state `g_ij(k)` at several orders and diagonalization      |
//! | fig5x  | quartic excited-state `g_ij(k)`, `N = 1..4`                              |
//! | fig6   | sextic `E₀`, `g_ij` with Leroy `α = 2` at `β* − 1`, `β*`, `β* + 1`         |
//! | fig7   | `d`-dimensional quartic `E₀`, `g_ij` for `d = 3..6`                      |

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::json;

use crate::config::{Grid, RunConfig};
use crate::error::{Error, Result};
use crate::model::{Model, Quantity};
use crate::pipeline::{
    beta_star, borel_poles, default_spec, oracle_all, pade_value, pole_sweep, Resummation,
};
use crate::resum::{Prescription, ResumOptions};

/// Version tag written into every JSON document.
pub const SCHEMA: &str = "borel-qmt/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig3,
    Fig4,
    Fig5,
    Fig5x,
    Fig6,
    Fig7,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig5x,
        FigureId::Fig6,
        FigureId::Fig7,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig5x => "fig5x",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
        }
    }

    /// What the dataset shows and how it was produced.
    pub fn description(&self) -> &'static str {
        match self {
            FigureId::Fig2a => "quartic ground-state energy vs k: plain Pade P_m, Borel-Pade PV sum TP_m, exact diagonalization",
            FigureId::Fig2b => "quartic ground-state energy vs k: Borel-Pade PV sums at several truncation orders, exact diagonalization",
            FigureId::Fig3 => "real poles at positive lambda of the Pade approximants P_m of the quartic ground-state metric series, m = 1..m_max",
            FigureId::Fig4 => "poles of the Pade-continued Borel transforms of the quartic ground-state energy and metric series",
            FigureId::Fig5 => "quartic ground-state metric components vs k: Borel-Pade PV sums at several orders, exact diagonalization",
            FigureId::Fig5x => "quartic excited-state (N = 1..4) metric components vs k: Borel-Pade PV sums, exact diagonalization",
            FigureId::Fig6 => "sextic ground-state energy and metric vs k: Borel-Leroy (alpha = 2) PV sums at beta*-1, beta*, beta*+1, exact diagonalization",
            FigureId::Fig7 => "d-dimensional quartic ground-state energy and metric vs k, d = 3..6: Borel-Pade PV sums, exact diagonalization",
        }
    }

    /// Default run parameters.
    pub fn default_config(&self) -> RunConfig {
        let grid = |lo, hi, step| Grid::range(lo, hi, step).expect("static grid");
        let base = RunConfig::default();
        match self {
            FigureId::Fig2a => RunConfig {
                k: grid(0.1, 10.0, 0.1),
                ..base
            },
            FigureId::Fig2b => RunConfig {
                orders: vec![50, 100, 200],
                k: grid(0.1, 10.0, 0.1),
                ..base
            },
            FigureId::Fig3 => RunConfig {
                orders: vec![100],
                ..base
            },
            FigureId::Fig4 => base,
            FigureId::Fig5 => RunConfig {
                orders: vec![25, 50, 100],
                k: grid(0.001, 0.2, 0.001),
                ..base
            },
            FigureId::Fig5x => RunConfig {
                orders: vec![50],
                k: grid(0.05, 1.0, 0.05),
                ..base
            },
            FigureId::Fig6 => RunConfig {
                model: Model::sextic(0),
                k: grid(0.05, 1.0, 0.05),
                ..base
            },
            FigureId::Fig7 => RunConfig {
                model: Model::radial(3).expect("d = 3"),
                k: grid(0.1, 2.0, 0.1),
                ..base
            },
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = FigureId::ALL.iter().map(|f| f.name()).collect();
                Error::Parse(format!("unknown figure {s:?}; known: {}", known.join(", ")))
            })
    }
}

/// Tabular output with ordered metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub id: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Fixed-format number used in every data file.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.15e}")
    }
}

impl Dataset {
    pub fn new(id: impl Into<String>, columns: &[&str]) -> Self {
        Dataset {
            id: id.into(),
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema: {SCHEMA}\n# id: {}\n", self.id);
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let meta: serde_json::Map<String, serde_json::Value> =
            self.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        json!({
            "schema": SCHEMA,
            "id": self.id,
            "meta": meta,
            "columns": self.columns,
            "rows": self.rows,
        })
    }
}

fn opts() -> ResumOptions {
    ResumOptions::default()
}

fn pv_spec(model: &Model) -> Result<crate::resum::BorelSpec> {
    default_spec(model, 1.0, Prescription::PrincipalValue)
}

fn common_meta(ds: Dataset, id: FigureId, cfg: &RunConfig) -> Dataset {
    ds.meta("description", id.description())
        .meta("model", cfg.model.to_string())
        .meta("orders", format!("{:?}", cfg.orders))
        .meta("lambda", num(cfg.lambda.values()[0]))
        .meta(
            "oracle_basis",
            cfg.basis.map_or("default".to_string(), |b| b.to_string()),
        )
}

/// Oracle values on the k grid, evaluated in parallel, in grid order.
fn oracle_curve(model: Model, ks: &[f64], lambda: f64, basis: Option<usize>) -> Result<Vec<[f64; 4]>> {
    ks.par_iter().map(|&k| oracle_all(model, k, lambda, basis)).collect()
}

fn value_or_nan(r: Result<crate::pipeline::Point>) -> f64 {
    r.map(|p| p.value).unwrap_or(f64::NAN)
}

/// Computes one figure dataset. Sweep points run on the current rayon pool.
pub fn generate(id: FigureId, cfg: &RunConfig) -> Result<Dataset> {
    cfg.validate()?;
    let lambda = cfg.lambda.values()[0];
    let ks = cfg.k.values();
    match id {
        FigureId::Fig2a | FigureId::Fig2b => {
            let model = Model::quartic(cfg.model.state);
            let series = model.series(cfg.max_order())?;
            let spec = pv_spec(&model)?;
            let resums: Vec<Resummation> = cfg
                .orders
                .par_iter()
                .map(|&m| Resummation::new(model, &series, Quantity::Energy, &spec, m, &opts()))
                .collect::<Result<_>>()?;
            let exact = oracle_curve(model, ks, lambda, cfg.basis)?;
            let mut cols = vec!["k".to_string()];
            if id == FigureId::Fig2a {
                cols.extend(cfg.orders.iter().map(|m| format!("pade_m{m}")));
            }
            cols.extend(cfg.orders.iter().map(|m| format!("borel_m{m}")));
            cols.push("exact".into());
            let rows: Vec<Vec<String>> = ks
                .par_iter()
                .zip(exact.par_iter())
                .map(|(&k, ex)| {
                    let mut row = vec![num(k)];
                    if id == FigureId::Fig2a {
                        for &m in &cfg.orders {
                            row.push(num(pade_value(&model, &series.energy, m, k, lambda).unwrap_or(f64::NAN)));
                        }
                    }
                    for r in &resums {
                        row.push(num(value_or_nan(r.at(k, lambda))));
                    }
                    row.push(num(ex[0]));
                    row
                })
                .collect();
            let mut ds = common_meta(Dataset::new(id.name(), &[]), id, cfg);
            ds.columns = cols;
            ds.rows = rows;
            Ok(ds)
        }
        FigureId::Fig3 => {
            let model = Model::quartic(cfg.model.state);
            let m = cfg.max_order();
            let series = model.series(m)?;
            let k = ks[0];
            let sweeps: Vec<_> = Quantity::METRIC
                .par_iter()
                .map(|q| pole_sweep(&model, series.get(*q), m, k).map(|s| (*q, s)))
                .collect::<Result<_>>()?;
            let mut ds = Dataset::new(id.name(), &["component", "m", "lambda_pole", "froissart"])
                .meta("description", id.description())
                .meta("model", model.to_string())
                .meta("k", num(k))
                .meta("m_max", m.to_string())
                .meta("pade_orders", "[floor(m/2)/ceil(m/2)] of the series in the coupling lambda/k^((K+1)/2)")
                .meta("real_tolerance", format!("{:e}", crate::pade::REAL_TOLERANCE));
            for (q, s) in &sweeps {
                ds = ds.meta(&format!("count_{q}"), format!("{} ({} excluding Froissart doublets)", s.count(), s.count_genuine()));
            }
            for (q, s) in sweeps {
                for (j, x, fr) in s.poles {
                    ds.rows.push(vec![q.to_string(), j.to_string(), num(x), fr.to_string()]);
                }
            }
            Ok(ds)
        }
        FigureId::Fig4 => {
            let model = cfg.model;
            let m = cfg.max_order();
            let series = model.series(m)?;
            let beta = cfg.beta.unwrap_or(1.0);
            let reports: Vec<_> = Quantity::ALL
                .par_iter()
                .map(|q| borel_poles(&model, series.get(*q), beta, m).map(|r| (*q, r)))
                .collect::<Result<_>>()?;
            let mut ds = Dataset::new(id.name(), &["quantity", "re", "im", "class"])
                .meta("description", id.description())
                .meta("model", model.to_string())
                .meta("m", m.to_string())
                .meta("alpha", model.gevrey_alpha().to_string())
                .meta("beta", num(beta));
            for (q, r) in &reports {
                if let Some(p) = r.smallest_real() {
                    ds = ds.meta(&format!("smallest_real_{q}"), num(p.location.real().to_f64()));
                }
            }
            for (q, r) in reports {
                for p in r.poles {
                    ds.rows.push(vec![
                        q.to_string(),
                        num(p.location.real().to_f64()),
                        num(p.location.imag().to_f64()),
                        p.class.to_string(),
                    ]);
                }
            }
            Ok(ds)
        }
        FigureId::Fig5 | FigureId::Fig5x => {
            let states: Vec<u32> = if id == FigureId::Fig5 { vec![cfg.model.state] } else { vec![1, 2, 3, 4] };
            let mut ds = common_meta(Dataset::new(id.name(), &[]), id, cfg);
            let mut cols = vec!["k".to_string(), "state".into(), "component".into()];
            cols.extend(cfg.orders.iter().map(|m| format!("borel_m{m}")));
            cols.push("exact".into());
            ds.columns = cols;
            for n in states {
                let model = Model::quartic(n);
                let series = model.series(cfg.max_order())?;
                let spec = pv_spec(&model)?;
                let exact = oracle_curve(model, ks, lambda, cfg.basis)?;
                let resums: Vec<(Quantity, Vec<Resummation>)> = Quantity::METRIC
                    .iter()
                    .map(|q| {
                        cfg.orders
                            .par_iter()
                            .map(|&m| Resummation::new(model, &series, *q, &spec, m, &opts()))
                            .collect::<Result<Vec<_>>>()
                            .map(|v| (*q, v))
                    })
                    .collect::<Result<_>>()?;
                let rows: Vec<Vec<Vec<String>>> = ks
                    .par_iter()
                    .zip(exact.par_iter())
                    .map(|(&k, ex)| {
                        resums
                            .iter()
                            .map(|(q, rs)| {
                                let mut row = vec![num(k), n.to_string(), q.to_string()];
                                row.extend(rs.iter().map(|r| num(value_or_nan(r.at(k, lambda)))));
                                row.push(num(ex[q_index(*q)]));
                                row
                            })
                            .collect()
                    })
                    .collect();
                ds.rows.extend(rows.into_iter().flatten());
            }
            Ok(ds)
        }
        FigureId::Fig6 => {
            let model = Model::sextic(cfg.model.state);
            let m = cfg.max_order();
            let series = model.series(m)?;
            let exact_ref = oracle_all(model, cfg.k_ref, lambda, cfg.basis)?;
            let stars: Vec<(Quantity, f64)> = match cfg.beta {
                Some(b) => Quantity::ALL.iter().map(|q| (*q, b)).collect(),
                None => Quantity::ALL
                    .par_iter()
                    .map(|q| {
                        beta_star(model, &series, *q, m, cfg.k_ref, lambda, exact_ref[q_index(*q)], cfg.beta_grid, &opts())
                            .map(|s| (*q, s.beta_star))
                    })
                    .collect::<Result<_>>()?,
            };
            let exact = oracle_curve(model, ks, lambda, cfg.basis)?;
            let mut ds = common_meta(
                Dataset::new(id.name(), &["k", "quantity", "beta_minus_1", "beta_star", "beta_plus_1", "exact"]),
                id,
                cfg,
            )
            .meta("k_ref", num(cfg.k_ref))
            .meta("beta_grid", format!("{}:{}:{}", cfg.beta_grid.lo, cfg.beta_grid.hi, cfg.beta_grid.step));
            for (q, b) in &stars {
                ds = ds.meta(&format!("beta_star_{q}"), num(*b));
            }
            for (q, b) in stars {
                let curves: Vec<Option<Resummation>> = [b - 1.0, b, b + 1.0]
                    .par_iter()
                    .map(|&beta| {
                        if beta <= 0.0 {
                            return Ok(None);
                        }
                        let spec = default_spec(&model, beta, Prescription::PrincipalValue)?;
                        Resummation::new(model, &series, q, &spec, m, &opts()).map(Some)
                    })
                    .collect::<Result<_>>()?;
                let rows: Vec<Vec<String>> = ks
                    .par_iter()
                    .zip(exact.par_iter())
                    .map(|(&k, ex)| {
                        let mut row = vec![num(k), q.to_string()];
                        for c in &curves {
                            row.push(num(c.as_ref().map_or(f64::NAN, |r| value_or_nan(r.at(k, lambda)))));
                        }
                        row.push(num(ex[q_index(q)]));
                        row
                    })
                    .collect();
                ds.rows.extend(rows);
            }
            Ok(ds)
        }
        FigureId::Fig7 => {
            let m = cfg.max_order();
            let mut ds = common_meta(
                Dataset::new(id.name(), &["k", "d", "quantity", "borel", "exact"]),
                id,
                cfg,
            )
            .meta("dimensions", "3,4,5,6");
            for d in 3..=6 {
                let model = Model::radial(d)?;
                let series = model.series(m)?;
                let spec = pv_spec(&model)?;
                let resums: Vec<Resummation> = Quantity::ALL
                    .par_iter()
                    .map(|q| Resummation::new(model, &series, *q, &spec, m, &opts()))
                    .collect::<Result<_>>()?;
                let exact = oracle_curve(model, ks, lambda, cfg.basis)?;
                let rows: Vec<Vec<Vec<String>>> = ks
                    .par_iter()
                    .zip(exact.par_iter())
                    .map(|(&k, ex)| {
                        resums
                            .iter()
                            .map(|r| {
                                vec![
                                    num(k),
                                    d.to_string(),
                                    r.quantity.to_string(),
                                    num(value_or_nan(r.at(k, lambda))),
                                    num(ex[q_index(r.quantity)]),
                                ]
                            })
                            .collect()
                    })
                    .collect();
                ds.rows.extend(rows.into_iter().flatten());
            }
            Ok(ds)
        }
    }
}

fn q_index(q: Quantity) -> usize {
    Quantity::ALL.iter().position(|x| *x == q).expect("known quantity")
}
