//! Tabulated exact coefficients (sextic oscillator and the `d = 3..6` quartic
//! oscillators) and the machinery to regenerate and compare them.
//!
//! Tables are CSV with header `n,a,c11,c12,c22` and rationals written as `p/q`
//! or `p`. The reference tables ship inside the crate; an alternative directory
//! can be supplied to check modified copies.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::perturb1d::{energy_series, qmt_series, OscillatorModel};
use crate::radial::{energy_series_d, qmt_series_d, RadialModel};
use crate::series::PowerSeries;

pub const HEADER: &str = "n,a,c11,c12,c22";
pub const COLUMNS: [&str; 4] = ["a", "c11", "c12", "c22"];

/// Which model a coefficient table belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableModel {
    Sextic,
    Radial(u32),
}

impl TableModel {
    /// File stem used for fixtures (`sextic`, `ddim3`, ...).
    pub fn file_stem(&self) -> String {
        match self {
            TableModel::Sextic => "sextic".to_string(),
            TableModel::Radial(d) => format!("ddim{d}"),
        }
    }

    pub fn all() -> Vec<TableModel> {
        let mut v = vec![TableModel::Sextic];
        v.extend((3..=6).map(TableModel::Radial));
        v
    }

    /// Energy and metric series through order `m`.
    pub fn series(&self, m: usize) -> Result<[PowerSeries; 4]> {
        let m = m.max(1);
        match *self {
            TableModel::Sextic => {
                let model = OscillatorModel::sextic(0);
                let q = qmt_series(model, m)?;
                Ok([energy_series(model, m), q.g11, q.g12, q.g22])
            }
            TableModel::Radial(d) => {
                let model = RadialModel::new(d, 0)?;
                let q = qmt_series_d(model, m)?;
                Ok([energy_series_d(model, m), q.g11, q.g12, q.g22])
            }
        }
    }
}

impl fmt::Display for TableModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.file_stem())
    }
}

/// One row: order `n` and the four coefficients as text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub n: usize,
    pub values: [String; 4],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientTable {
    pub model: TableModel,
    pub rows: Vec<TableRow>,
}

impl CoefficientTable {
    pub fn parse(model: TableModel, text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some(h) if h == HEADER => {}
            other => {
                return Err(Error::Parse(format!(
                    "{model}: expected header {HEADER:?}, found {other:?}"
                )))
            }
        }
        let mut rows = Vec::new();
        for line in lines {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != 5 {
                return Err(Error::Parse(format!("{model}: malformed row {line:?}")));
            }
            let n = cells[0]
                .parse()
                .map_err(|_| Error::Parse(format!("{model}: bad order {:?}", cells[0])))?;
            rows.push(TableRow {
                n,
                values: [cells[1], cells[2], cells[3], cells[4]].map(String::from),
            });
        }
        Ok(CoefficientTable { model, rows })
    }

    /// Regenerates a table for orders `0..=n_max`.
    pub fn compute(model: TableModel, n_max: usize) -> Result<Self> {
        let series = model.series(n_max)?;
        let rows = (0..=n_max)
            .map(|n| TableRow {
                n,
                values: [0, 1, 2, 3].map(|c| series[c].coeff(n).to_text()),
            })
            .collect();
        Ok(CoefficientTable { model, rows })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{},{}\n", row.n, row.values.join(",")));
        }
        out
    }

    pub fn max_order(&self) -> usize {
        self.rows.iter().map(|r| r.n).max().unwrap_or(0)
    }
}

/// Reference tables compiled into the crate.
pub fn embedded() -> Vec<CoefficientTable> {
    let sources = [
        (TableModel::Sextic, include_str!("../fixtures/sextic.csv")),
        (TableModel::Radial(3), include_str!("../fixtures/ddim3.csv")),
        (TableModel::Radial(4), include_str!("../fixtures/ddim4.csv")),
        (TableModel::Radial(5), include_str!("../fixtures/ddim5.csv")),
        (TableModel::Radial(6), include_str!("../fixtures/ddim6.csv")),
    ];
    sources
        .into_iter()
        .map(|(m, text)| CoefficientTable::parse(m, text).expect("embedded fixture parses"))
        .collect()
}

/// Loads `sextic.csv` and `ddim{3..6}.csv` from `dir`, skipping missing files.
pub fn load_dir(dir: &Path) -> Result<Vec<CoefficientTable>> {
    let mut out = Vec::new();
    for model in TableModel::all() {
        let path = dir.join(format!("{}.csv", model.file_stem()));
        if path.exists() {
            out.push(CoefficientTable::parse(model, &std::fs::read_to_string(&path)?)?);
        }
    }
    Ok(out)
}

/// A tabulated value that differs from the computed one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub model: TableModel,
    pub n: usize,
    pub column: &'static str,
    pub expected: String,
    pub computed: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} {}: table {} but computed {}",
            self.model, self.n, self.column, self.expected, self.computed
        )
    }
}

/// Compares every entry of `table` with freshly computed coefficients as strings.
pub fn check(table: &CoefficientTable) -> Result<Vec<Mismatch>> {
    let computed = CoefficientTable::compute(table.model, table.max_order())?;
    let mut out = Vec::new();
    for row in &table.rows {
        let fresh = &computed.rows[row.n];
        for (c, column) in COLUMNS.iter().enumerate() {
            if row.values[c] != fresh.values[c] {
                out.push(Mismatch {
                    model: table.model,
                    n: row.n,
                    column,
                    expected: row.values[c].clone(),
                    computed: fresh.values[c].clone(),
                });
            }
        }
    }
    Ok(out)
}
