//! Perturbation series of the `d`-dimensional isotropic quartic oscillator in
//! the `l = 0` channel, expanded in the radial Laguerre basis.

use rug::Rational;

use crate::basis::Sector;
use crate::error::{Error, Result};
use crate::perturb1d::energy_from_physical;
use crate::qmt::QmtSeries;
use crate::rspt::{self, StateSeries};
use crate::series::PowerSeries;

const VARIABLE: &str = "-lambda/k^(3/2)";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RadialModel {
    dim: u32,
    state: u32,
}

impl RadialModel {
    /// Radial state `N` of the `l = 0` channel in `dim ≥ 1` dimensions.
    pub fn new(dim: u32, state: u32) -> Result<Self> {
        Self::with_angular_momentum(dim, state, 0)
    }

    pub fn with_angular_momentum(dim: u32, state: u32, l: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Precondition("dimension must be at least 1".into()));
        }
        if l != 0 {
            return Err(Error::Precondition(format!("only the l = 0 channel is supported, got l = {l}")));
        }
        Ok(RadialModel { dim, state })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn state(&self) -> u32 {
        self.state
    }

    pub fn sector(&self) -> Sector {
        Sector::radial(self.dim, self.state, 2)
    }
}

/// Coefficient of `φ_i` in `r^power φ_j`; on the diagonal this is the normalized
/// expectation value. `power` must be a positive even integer.
pub fn radial_matrix_element(dim: u32, power: u32, i: usize, j: usize) -> Result<Rational> {
    if power == 0 || power % 2 == 1 {
        return Err(Error::Precondition(format!("radial power must be positive and even, got {power}")));
    }
    Ok(Sector::radial(dim, 0, power / 2).potential_element(i, j))
}

pub fn energy_series_d(model: RadialModel, m: usize) -> PowerSeries {
    energy_from_physical(rspt::energy_coefficients(model.sector(), m), VARIABLE)
}

pub fn state_series_d(model: RadialModel, m: usize) -> StateSeries {
    rspt::state_series(model.sector(), m)
}

pub fn qmt_series_d(model: RadialModel, m: usize) -> Result<QmtSeries> {
    if m < 1 {
        return Err(Error::Precondition("metric series need order m ≥ 1".into()));
    }
    Ok(QmtSeries::from_metric(rspt::metric_coefficients(model.sector(), m), 2, VARIABLE))
}
