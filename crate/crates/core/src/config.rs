//! Run configuration read from TOML.
//!
//! ```toml
//! [model]
//! name = "sextic"      # quartic | sextic | ddim<d>
//! state = 0
//!
//! [series]
//! orders = [100]
//!
//! [grid]
//! k = "0.1:1.0:0.05"   # lo:hi:step, inclusive
//! lambda = [1.0]
//!
//! [borel]
//! beta = 2.5           # omit for β = 1 (Gevrey 1) or a β* search (Gevrey 2)
//! prescription = "pv"
//! k_ref = 0.5
//!
//! [output]
//! format = "csv"
//! dir = "out"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Model;
use crate::resum::{BetaGrid, Prescription};

/// Inclusive arithmetic grid or explicit list of values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid(pub Vec<f64>);

impl Grid {
    /// `lo:hi:step`, inclusive of `hi` up to rounding.
    pub fn range(lo: f64, hi: f64, step: f64) -> Result<Grid> {
        if !(step > 0.0 && lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(Error::Parse(format!("bad range {lo}:{hi}:{step}")));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        Ok(Grid((0..=n).map(|i| round12(lo + i as f64 * step)).collect()))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

impl FromStr for Grid {
    type Err = Error;

    /// `lo:hi:step`, or a comma-separated list.
    fn from_str(s: &str) -> Result<Grid> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number {t:?} in grid {s:?}")));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.len() {
            3 => Grid::range(num(parts[0])?, num(parts[1])?, num(parts[2])?),
            1 => Ok(Grid(s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<_>>()?)),
            _ => Err(Error::Parse(format!("grid {s:?} is neither lo:hi:step nor a list"))),
        }
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<f64>),
            Single(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(v) => Ok(Grid(v)),
            Raw::Single(x) => Ok(Grid(vec![x])),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Parse(format!("output format must be csv or json, got {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    model: RawModel,
    #[serde(default)]
    series: RawSeries,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    borel: RawBorel,
    #[serde(default)]
    oracle: RawOracle,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    name: Option<String>,
    state: Option<u32>,
    dim: Option<u32>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeries {
    orders: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    k: Option<Grid>,
    lambda: Option<Grid>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBorel {
    beta: Option<f64>,
    prescription: Option<String>,
    k_ref: Option<f64>,
    beta_grid: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracle {
    basis: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<OutputFormat>,
    dir: Option<PathBuf>,
}

/// Everything a sweep or figure run needs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: Model,
    pub orders: Vec<usize>,
    pub k: Grid,
    pub lambda: Grid,
    /// Fixed Leroy offset; `None` selects the default for the model.
    pub beta: Option<f64>,
    pub prescription: Prescription,
    /// Reference spring constant for the `β*` search.
    pub k_ref: f64,
    #[serde(skip)]
    pub beta_grid: BetaGrid,
    /// Oracle basis size; `None` uses the per-model default.
    pub basis: Option<usize>,
    pub format: OutputFormat,
    pub dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: Model::quartic(0),
            orders: vec![100],
            k: Grid(vec![1.0]),
            lambda: Grid(vec![1.0]),
            beta: None,
            prescription: Prescription::PrincipalValue,
            k_ref: 0.5,
            beta_grid: BetaGrid::default(),
            basis: None,
            format: OutputFormat::Csv,
            dir: None,
        }
    }
}

impl RunConfig {
    /// Overlays the values present in a TOML document onto `self`.
    pub fn merge_toml(mut self, text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        if let Some(name) = raw.model.name {
            self.model = name.parse()?;
        }
        if let Some(d) = raw.model.dim {
            self.model = Model::radial(d)?;
        }
        if let Some(n) = raw.model.state {
            self.model = self.model.with_state(n);
        }
        if let Some(o) = raw.series.orders {
            self.orders = o;
        }
        if let Some(k) = raw.grid.k {
            self.k = k;
        }
        if let Some(l) = raw.grid.lambda {
            self.lambda = l;
        }
        if let Some(b) = raw.borel.beta {
            self.beta = Some(b);
        }
        if let Some(p) = raw.borel.prescription {
            self.prescription = p.parse()?;
        }
        if let Some(k) = raw.borel.k_ref {
            self.k_ref = k;
        }
        if let Some(g) = raw.borel.beta_grid {
            self.beta_grid = parse_beta_grid(&g)?;
        }
        if let Some(b) = raw.oracle.basis {
            self.basis = Some(b);
        }
        if let Some(f) = raw.output.format {
            self.format = f;
        }
        if let Some(d) = raw.output.dir {
            self.dir = Some(d);
        }
        self.validate()?;
        Ok(self)
    }

    pub fn load(self, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        self.merge_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k.is_empty() || self.lambda.is_empty() {
            return Err(Error::Precondition("parameter grids must be non-empty".into()));
        }
        if self.orders.is_empty() || self.orders.contains(&0) {
            return Err(Error::Precondition("orders must be a non-empty list of positive integers".into()));
        }
        if self.k.values().iter().any(|k| !(*k > 0.0)) {
            return Err(Error::Precondition("k values must be positive".into()));
        }
        if self.lambda.values().iter().any(|l| !(*l > 0.0)) {
            return Err(Error::Precondition("λ values must be positive".into()));
        }
        if let Some(b) = self.beta {
            if !(b > 0.0) {
                return Err(Error::Precondition("β must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn max_order(&self) -> usize {
        self.orders.iter().copied().max().unwrap_or(0)
    }
}

/// `lo:hi:step` for the `β*` scan.
pub fn parse_beta_grid(s: &str) -> Result<BetaGrid> {
    let g: Vec<f64> = s
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad β grid {s:?}"))))
        .collect::<Result<_>>()?;
    match g.as_slice() {
        [lo, hi, step] if *lo > 0.0 && hi >= lo && *step > 0.0 => Ok(BetaGrid {
            lo: *lo,
            hi: *hi,
            step: *step,
        }),
        _ => Err(Error::Parse(format!("β grid must be lo:hi:step with lo > 0, got {s:?}"))),
    }
}
