//! One selector for the three model families and the observables they carry.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::Sector;
use crate::error::{Error, Result};
use crate::perturb1d::{energy_series, qmt_series, OscillatorModel};
use crate::radial::{energy_series_d, qmt_series_d, RadialModel};
use crate::series::PowerSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Quartic,
    Sextic,
    /// `d`-dimensional isotropic quartic oscillator, `l = 0`.
    Radial(u32),
}

/// A model family together with the state being followed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Model {
    pub family: Family,
    pub state: u32,
}

impl Model {
    pub fn quartic(state: u32) -> Self {
        Model {
            family: Family::Quartic,
            state,
        }
    }

    pub fn sextic(state: u32) -> Self {
        Model {
            family: Family::Sextic,
            state,
        }
    }

    /// Ground state of the `dim`-dimensional quartic oscillator.
    pub fn radial(dim: u32) -> Result<Self> {
        RadialModel::new(dim, 0)?;
        Ok(Model {
            family: Family::Radial(dim),
            state: 0,
        })
    }

    pub fn with_state(self, state: u32) -> Self {
        Model { state, ..self }
    }

    /// `K` in the perturbation `λ x^{2K}`.
    pub fn power(&self) -> u32 {
        match self.family {
            Family::Sextic => 3,
            _ => 2,
        }
    }

    /// Gevrey order of the perturbative coefficients.
    pub fn gevrey_alpha(&self) -> u32 {
        self.power() - 1
    }

    pub fn sector(&self) -> Sector {
        match self.family {
            Family::Radial(d) => Sector::radial(d, self.state, 2),
            _ => Sector::ladder(self.state, self.power()),
        }
    }

    /// Dimensionless coupling `λ k^{−(K+1)/2}`.
    pub fn coupling(&self, k: f64, lambda: f64) -> f64 {
        lambda * k.powf(-((self.power() + 1) as f64) / 2.0)
    }

    /// Energy and metric series through order `m ≥ 1`.
    pub fn series(&self, m: usize) -> Result<ModelSeries> {
        let m = m.max(1);
        match self.family {
            Family::Quartic | Family::Sextic => {
                let om = OscillatorModel::new(self.power(), self.state)?;
                let q = qmt_series(om, m)?;
                Ok(ModelSeries {
                    energy: energy_series(om, m),
                    g11: q.g11,
                    g12: q.g12,
                    g22: q.g22,
                })
            }
            Family::Radial(d) => {
                let rm = RadialModel::new(d, self.state)?;
                let q = qmt_series_d(rm, m)?;
                Ok(ModelSeries {
                    energy: energy_series_d(rm, m),
                    g11: q.g11,
                    g12: q.g12,
                    g22: q.g22,
                })
            }
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Quartic => write!(f, "quartic")?,
            Family::Sextic => write!(f, "sextic")?,
            Family::Radial(d) => write!(f, "ddim{d}")?,
        }
        if self.state != 0 {
            write!(f, "-n{}", self.state)?;
        }
        Ok(())
    }
}

impl FromStr for Model {
    type Err = Error;

    /// Accepts `quartic`, `sextic`, `ddim<d>` (or `d<d>`), optionally followed by `-n<N>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, state) = match s.split_once("-n") {
            Some((a, b)) => (a, b.parse().map_err(|_| Error::Parse(format!("bad state in {s:?}")))?),
            None => (s, 0),
        };
        let model = match name {
            "quartic" => Model::quartic(0),
            "sextic" => Model::sextic(0),
            other => {
                let digits = other
                    .strip_prefix("ddim")
                    .or_else(|| other.strip_prefix('d'))
                    .ok_or_else(|| Error::Parse(format!("unknown model {s:?}")))?;
                let d = digits.parse().map_err(|_| Error::Parse(format!("bad dimension in {s:?}")))?;
                Model::radial(d)?
            }
        };
        Ok(model.with_state(state))
    }
}

/// Observable selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Energy,
    G11,
    G12,
    G22,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [Quantity::Energy, Quantity::G11, Quantity::G12, Quantity::G22];
    pub const METRIC: [Quantity; 3] = [Quantity::G11, Quantity::G12, Quantity::G22];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Energy => "E",
            Quantity::G11 => "g11",
            Quantity::G12 => "g12",
            Quantity::G22 => "g22",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e" | "energy" => Ok(Quantity::Energy),
            "g11" => Ok(Quantity::G11),
            "g12" | "g21" => Ok(Quantity::G12),
            "g22" => Ok(Quantity::G22),
            _ => Err(Error::Parse(format!("unknown quantity {s:?}"))),
        }
    }
}

/// Energy and metric series of one model and state.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSeries {
    pub energy: PowerSeries,
    pub g11: PowerSeries,
    pub g12: PowerSeries,
    pub g22: PowerSeries,
}

impl ModelSeries {
    pub fn get(&self, q: Quantity) -> &PowerSeries {
        match q {
            Quantity::Energy => &self.energy,
            Quantity::G11 => &self.g11,
            Quantity::G12 => &self.g12,
            Quantity::G22 => &self.g22,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for text in ["quartic", "sextic", "ddim3", "quartic-n2"] {
            assert_eq!(text.parse::<Model>().unwrap().to_string(), text);
        }
        assert_eq!("d5".parse::<Model>().unwrap(), Model::radial(5).unwrap());
        assert!("octic".parse::<Model>().is_err());
        assert!("ddim0".parse::<Model>().is_err());
    }

    #[test]
    fn coupling_scaling() {
        assert_eq!(Model::quartic(0).coupling(4.0, 1.0), 0.125);
        assert_eq!(Model::sextic(0).coupling(2.0, 1.0), 0.25);
        assert_eq!(Model::sextic(0).gevrey_alpha(), 2);
    }
}
