//! The three independent quantum-metric components as power series.

use crate::rspt::MetricCoefficients;
use crate::series::{Convention, PowerSeries, Prefactor, Variable};

/// Metric components `g_kk`, `g_kλ`, `g_λλ` as series in the scaled coupling.
///
/// Stored coefficients follow the alternating convention, so for the ground
/// state they are all positive; the `k`-prefactor of each component is kept in
/// its [`Prefactor`].
#[derive(Clone, Debug, PartialEq)]
pub struct QmtSeries {
    pub g11: PowerSeries,
    pub g12: PowerSeries,
    pub g22: PowerSeries,
}

impl QmtSeries {
    /// Builds the stored series from physical coefficients.
    ///
    /// `power` is the anharmonicity `K` of `λ x^{2K}`; it fixes the coupling
    /// `g = λ k^{-(K+1)/2}` and the prefactors `k^{-2}`, `k^{-(K+3)/2}`, `k^{-(K+1)}`.
    pub(crate) fn from_metric(metric: MetricCoefficients, power: u32, variable: &str) -> QmtSeries {
        let k = power as i64;
        let build = |coeffs, num, den| {
            PowerSeries::from_rationals(coeffs, Variable::plain(variable.trim_start_matches('-')), Prefactor::k_power(num, den))
                .expect("metric series are non-empty")
                .from_coupling(Convention::Alternating, variable)
                .expect("plain input")
        };
        QmtSeries {
            g11: build(metric.g11, -2, 1),
            g12: build(metric.g12, -(k + 3), 2),
            g22: build(metric.g22, -(k + 1), 1),
        }
    }

    /// Component `(i, j)` with `i, j ∈ {1, 2}`; `(2, 1)` returns the `(1, 2)` series.
    pub fn component(&self, i: usize, j: usize) -> Option<&PowerSeries> {
        match (i, j) {
            (1, 1) => Some(&self.g11),
            (1, 2) | (2, 1) => Some(&self.g12),
            (2, 2) => Some(&self.g22),
            _ => None,
        }
    }

    pub fn components(&self) -> [(&'static str, &PowerSeries); 3] {
        [("g11", &self.g11), ("g12", &self.g12), ("g22", &self.g22)]
    }

    pub fn order(&self) -> usize {
        self.g11.order()
    }
}
