//! Python bindings: series generation, Padé/Borel resummation, growth fits,
//! diagonalization and figure datasets.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rug::Rational;

use borel_qmt::asymptotics::{detect_gevrey_order, fit_growth_with, RICHARDSON_DEPTH};
use borel_qmt::config::Grid;
use borel_qmt::error::Error;
use borel_qmt::figures::{generate, FigureId, SCHEMA};
use borel_qmt::golden;
use borel_qmt::model::{Model, Quantity};
use borel_qmt::oracle::{qmt_finite_difference, reference_values, SpectralProblem};
use borel_qmt::pade::{auto_pade_with, find_poles, PadeMode, PadeOptions};
use borel_qmt::pipeline::{default_spec, pade_value, Resummation};
use borel_qmt::resum::{BorelPade, BorelSpec, Prescription, ResumOptions};
use borel_qmt::scalar::{Scalar, DEFAULT_PREC};
use borel_qmt::series::PowerSeries;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Parse(_) | Error::Precondition(_) | Error::Domain(_) | Error::Convention(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(py_err)
}

/// Truncated perturbative series with exact rational coefficients.
#[pyclass(name = "Series", module = "borel_qmt", from_py_object)]
#[derive(Clone)]
pub struct PySeries {
    inner: PowerSeries,
}

#[pymethods]
impl PySeries {
    /// Series of `quantity` ("E", "g11", "g12", "g22") for `model`
    /// ("quartic", "sextic", "ddim3", "quartic-n2", ...) through `order`.
    #[staticmethod]
    fn from_model(model: &str, quantity: &str, order: usize) -> PyResult<Self> {
        let m: Model = parse(model)?;
        let q: Quantity = parse(quantity)?;
        let s = m.series(order).map_err(py_err)?;
        Ok(PySeries { inner: s.get(q).clone() })
    }

    /// Series from a list of coefficients in the coupling (`"p/q"` strings, ints or floats).
    #[staticmethod]
    fn from_coefficients(coeffs: Vec<String>) -> PyResult<Self> {
        let scalars = coeffs
            .iter()
            .map(|c| Scalar::parse(c, DEFAULT_PREC))
            .collect::<Result<Vec<_>, _>>()
            .map_err(py_err)?;
        Ok(PySeries {
            inner: PowerSeries::plain(scalars).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PySeries {
            inner: PowerSeries::from_json_str(text).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    /// Stored coefficients as exact strings.
    #[getter]
    fn coefficients(&self) -> Vec<String> {
        self.inner.coeffs().iter().map(|c| c.to_text()).collect()
    }

    /// Signed coefficients of the series in the bare coupling, as floats.
    fn coupling_coefficients(&self) -> Vec<f64> {
        self.inner.to_coupling().coeffs().iter().map(|c| c.to_float(64).to_f64()).collect()
    }

    fn truncate(&self, order: usize) -> Self {
        PySeries {
            inner: self.inner.truncate(order),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.order() + 1
    }

    fn __repr__(&self) -> String {
        format!("Series(variable={:?}, order={})", self.inner.variable().name, self.inner.order())
    }
}

fn spec_from(alpha: &str, beta: f64, prescription: &str) -> PyResult<BorelSpec> {
    let a: Rational = alpha
        .parse()
        .map_err(|_| PyValueError::new_err(format!("alpha must be a positive rational, got {alpha:?}")))?;
    let p: Prescription = parse(prescription)?;
    BorelSpec::new(a, beta, p).map_err(py_err)
}

/// Borel-Leroy-Padé sum of `series` at bare coupling `z`.
///
/// Returns a dict with `value`, `imag` and `error_estimate`.
#[pyfunction]
#[pyo3(signature = (series, z, alpha="1", beta=1.0, prescription="pv", order=None))]
fn resum(py: Python<'_>, series: &PySeries, z: f64, alpha: &str, beta: f64, prescription: &str, order: Option<usize>) -> PyResult<Py<PyAny>> {
    let spec = spec_from(alpha, beta, prescription)?;
    let m = order.unwrap_or(series.inner.order());
    let opts = ResumOptions::default();
    let r = py
        .detach(|| BorelPade::from_series(&series.inner, &spec, m, &opts).and_then(|b| b.sum(z, &opts)))
        .map_err(py_err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("value", r.to_f64())?;
    d.set_item("imag", r.ambiguity().to_f64())?;
    d.set_item("error_estimate", r.error_estimate.to_f64())?;
    Ok(d.into_any().unbind())
}

/// Resummed observable in physical units at `(k, lam)`; `beta` defaults to 1.
#[pyfunction]
#[pyo3(signature = (model, quantity, k, lam, order=100, beta=None, prescription="pv"))]
fn resum_physical(py: Python<'_>, model: &str, quantity: &str, k: f64, lam: f64, order: usize, beta: Option<f64>, prescription: &str) -> PyResult<f64> {
    let m: Model = parse(model)?;
    let q: Quantity = parse(quantity)?;
    let p: Prescription = parse(prescription)?;
    py.detach(|| {
        let series = m.series(order)?;
        let spec = default_spec(&m, beta.unwrap_or(1.0), p)?;
        Resummation::new(m, &series, q, &spec, order, &ResumOptions::default())?.at(k, lam)
    })
    .map(|p| p.value)
    .map_err(py_err)
}

/// Plain Padé `P_m` of a model observable at `(k, lam)`.
#[pyfunction]
#[pyo3(signature = (model, quantity, k, lam, order=100))]
fn pade(model: &str, quantity: &str, k: f64, lam: f64, order: usize) -> PyResult<f64> {
    let m: Model = parse(model)?;
    let q: Quantity = parse(quantity)?;
    let series = m.series(order).map_err(py_err)?;
    pade_value(&m, series.get(q), order, k, lam).map_err(py_err)
}

/// Poles `(re, im, class)` of the near-diagonal Padé approximant of the series,
/// or of its Borel-Leroy transform when `borel=True`.
#[pyfunction]
#[pyo3(signature = (series, order=None, borel=false, alpha="1", beta=1.0))]
fn pade_poles(series: &PySeries, order: Option<usize>, borel: bool, alpha: &str, beta: f64) -> PyResult<Vec<(f64, f64, String)>> {
    let m = order.unwrap_or(series.inner.order());
    let report = if borel {
        let spec = spec_from(alpha, beta, "pv")?;
        BorelPade::from_series(&series.inner, &spec, m, &ResumOptions::default()).map_err(py_err)?.poles
    } else {
        let opts = PadeOptions {
            mode: PadeMode::Float,
            prec: 256,
        };
        let p = auto_pade_with(&series.inner.truncate(m).to_coupling(), opts).map_err(py_err)?;
        find_poles(&p).map_err(py_err)?
    };
    Ok(report
        .poles
        .iter()
        .map(|p| (p.location.real().to_f64(), p.location.imag().to_f64(), p.class.to_string()))
        .collect())
}

/// Large-order fit `|a_n| ≈ S A^{-n} Γ(αn + β)` as a JSON string.
#[pyfunction]
#[pyo3(signature = (series, alpha="auto", depth=RICHARDSON_DEPTH))]
fn fit(series: &PySeries, alpha: &str, depth: usize) -> PyResult<String> {
    let a = match alpha {
        "auto" => detect_gevrey_order(&series.inner).map_err(py_err)?,
        "1" => 1,
        "2" => 2,
        other => return Err(PyValueError::new_err(format!("alpha must be 'auto', '1' or '2', got {other:?}"))),
    };
    let f = fit_growth_with(&series.inner, a, depth).map_err(py_err)?;
    serde_json::to_string(&f.summary()).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Exact diagonalization: `(energy, [[g11, g12], [g12, g22]], convergence)`.
#[pyfunction]
#[pyo3(signature = (model, k, lam, basis=None))]
fn diag(py: Python<'_>, model: &str, k: f64, lam: f64, basis: Option<usize>) -> PyResult<(f64, [[f64; 2]; 2], f64)> {
    let m: Model = parse(model)?;
    py.detach(|| {
        let p = match basis {
            Some(s) => SpectralProblem::new(m, k, lam, s)?,
            None => SpectralProblem::with_default_basis(m, k, lam)?,
        };
        reference_values(&p)
    })
    .map(|v| (v.energy, v.metric, v.convergence))
    .map_err(py_err)
}

/// Metric from central finite differences of the ground state with step `h`.
#[pyfunction]
#[pyo3(signature = (model, k, lam, h=1e-4, basis=120))]
fn qmt_finite_difference_py(model: &str, k: f64, lam: f64, h: f64, basis: usize) -> PyResult<[[f64; 2]; 2]> {
    let m: Model = parse(model)?;
    let p = SpectralProblem::new(m, k, lam, basis).map_err(py_err)?;
    qmt_finite_difference(&p, h).map_err(py_err)
}

/// CSV dataset of a figure; `orders` and `k` (a `lo:hi:step` string) override the defaults.
#[pyfunction]
#[pyo3(signature = (figure_id, orders=None, k=None))]
fn figure(py: Python<'_>, figure_id: &str, orders: Option<Vec<usize>>, k: Option<&str>) -> PyResult<String> {
    let id: FigureId = parse(figure_id)?;
    let mut cfg = id.default_config();
    if let Some(o) = orders {
        cfg.orders = o;
    }
    if let Some(k) = k {
        cfg.k = parse::<Grid>(k)?;
    }
    py.detach(|| generate(id, &cfg)).map(|d| d.to_csv()).map_err(py_err)
}

/// Mismatches between the bundled coefficient tables and fresh computation.
#[pyfunction]
fn verify_tables() -> PyResult<Vec<String>> {
    let mut out = Vec::new();
    for t in golden::embedded() {
        out.extend(golden::check(&t).map_err(py_err)?.iter().map(|m| m.to_string()));
    }
    Ok(out)
}

#[pymodule]
#[pyo3(name = "borel_qmt")]
fn borel_qmt_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySeries>()?;
    m.add_function(wrap_pyfunction!(resum, m)?)?;
    m.add_function(wrap_pyfunction!(resum_physical, m)?)?;
    m.add_function(wrap_pyfunction!(pade, m)?)?;
    m.add_function(wrap_pyfunction!(pade_poles, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(diag, m)?)?;
    m.add("qmt_finite_difference", wrap_pyfunction!(qmt_finite_difference_py, m)?)?;
    m.add_function(wrap_pyfunction!(figure, m)?)?;
    m.add_function(wrap_pyfunction!(verify_tables, m)?)?;
    m.add("SCHEMA", SCHEMA)?;
    Ok(())
}
