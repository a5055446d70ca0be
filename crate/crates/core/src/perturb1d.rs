//! Perturbation series of the one-dimensional anharmonic oscillators
//! `H = p²/2 + k q²/2 + λ q^{2K}` for `K = 2` (quartic) and `K = 3` (sextic).

use rug::Rational;

use crate::basis::Sector;
use crate::error::{Error, Result};
use crate::qmt::QmtSeries;
use crate::rspt::{self, StateSeries};
use crate::series::{Convention, PowerSeries, Prefactor, Variable};

/// Anharmonicity `K` and quantum number `N` of the state being followed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OscillatorModel {
    k: u32,
    state: u32,
}

impl OscillatorModel {
    pub fn new(k: u32, state: u32) -> Result<Self> {
        if !(2..=3).contains(&k) {
            return Err(Error::Precondition(format!("anharmonicity K must be 2 or 3, got {k}")));
        }
        Ok(OscillatorModel { k, state })
    }

    pub fn quartic(state: u32) -> Self {
        OscillatorModel { k: 2, state }
    }

    pub fn sextic(state: u32) -> Self {
        OscillatorModel { k: 3, state }
    }

    /// The power `K` in `λ q^{2K}`.
    pub fn anharmonicity(&self) -> u32 {
        self.k
    }

    pub fn state(&self) -> u32 {
        self.state
    }

    pub fn sector(&self) -> Sector {
        Sector::ladder(self.state, self.k)
    }

    /// Descriptor of the stored expansion variable.
    pub fn variable_name(&self) -> &'static str {
        match self.k {
            2 => "-lambda/k^(3/2)",
            _ => "-lambda/k^2",
        }
    }
}

/// `(i|q^{2K}|j)/(i|i)` in the unnormalized ladder basis.
pub fn perturb_matrix_element(k: u32, i: usize, j: usize) -> Rational {
    let sector = Sector::ladder(j as u32, k);
    match (sector.index_of(i), sector.index_of(j)) {
        (Some(li), Some(lj)) => sector.potential_element(li, lj),
        _ => Rational::new(),
    }
}

/// Wraps physical energy coefficients `E_n` as a stored energy series.
pub(crate) fn energy_from_physical(energies: Vec<Rational>, variable: &str) -> PowerSeries {
    PowerSeries::from_rationals(energies, Variable::plain(variable.trim_start_matches('-')), Prefactor::k_power(1, 2))
        .expect("energy series is non-empty")
        .from_coupling(Convention::EnergyAlternating, variable)
        .expect("plain input")
}

/// Energy coefficients `a_0..=a_m`, `E/√k = a_0 + Σ_{n≥1} (−1)^{n+1} a_n g^n`.
pub fn energy_series(model: OscillatorModel, m: usize) -> PowerSeries {
    energy_from_physical(rspt::energy_coefficients(model.sector(), m), model.variable_name())
}

/// RSPT corrections of the state through order `m`.
pub fn state_series(model: OscillatorModel, m: usize) -> StateSeries {
    rspt::state_series(model.sector(), m)
}

/// Applies the dilatation generator `(a² − a†²)/8` to every order.
pub fn dilatation_apply(state: &StateSeries) -> StateSeries {
    rspt::dilatation_apply(state)
}

/// Metric series through order `m` (needs `m ≥ 1`).
pub fn qmt_series(model: OscillatorModel, m: usize) -> Result<QmtSeries> {
    if m < 1 {
        return Err(Error::Precondition("metric series need order m ≥ 1".into()));
    }
    let metric = rspt::metric_coefficients(model.sector(), m);
    Ok(QmtSeries::from_metric(metric, model.k, model.variable_name()))
}
