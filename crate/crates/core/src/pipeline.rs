//! Physical-units glue between the series, resummation and oracle layers.

use rug::{Complex, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Model, ModelSeries, Quantity};
use crate::oracle::{energy, qmt_resolvent, SpectralProblem};
use crate::pade::{auto_pade_with, find_poles, PadeMode, PadeOptions, PoleReport};
use crate::resum::{optimal_beta, BetaGrid, BetaSearch, BorelPade, BorelSpec, Prescription, ResumOptions};
use crate::series::PowerSeries;

/// Borel spec used by default: ordinary Borel for Gevrey-1 models, Leroy
/// `α = 2` with the given `β` otherwise.
pub fn default_spec(model: &Model, beta: f64, prescription: Prescription) -> Result<BorelSpec> {
    match model.gevrey_alpha() {
        1 => Ok(BorelSpec::ordinary(prescription).with_beta(beta)?),
        a => BorelSpec::leroy(a, beta, prescription),
    }
}

/// A Borel–Padé continuation of one observable, evaluated in physical units.
#[derive(Clone, Debug)]
pub struct Resummation {
    pub model: Model,
    pub quantity: Quantity,
    pub order: usize,
    pub borel: BorelPade,
    series: PowerSeries,
    opts: ResumOptions,
}

/// Value of a resummed observable with its error estimate, in physical units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point {
    pub value: f64,
    pub error_estimate: f64,
    /// Imaginary part (lateral prescriptions only).
    pub ambiguity: f64,
}

impl Resummation {
    pub fn new(model: Model, series: &ModelSeries, quantity: Quantity, spec: &BorelSpec, m: usize, opts: &ResumOptions) -> Result<Self> {
        let s = series.get(quantity);
        let borel = BorelPade::from_series(s, spec, m, opts)?;
        Ok(Resummation {
            model,
            quantity,
            order: m,
            borel,
            series: s.clone(),
            opts: *opts,
        })
    }

    /// Resummed value at `(k, λ)`.
    pub fn at(&self, k: f64, lambda: f64) -> Result<Point> {
        if !(k > 0.0 && lambda > 0.0) {
            return Err(Error::Precondition(format!("need k > 0 and λ > 0, got ({k}, {lambda})")));
        }
        let z = self.model.coupling(k, lambda);
        let r = self.borel.sum(z, &self.opts)?;
        let pf = self.series.prefactor().value_at(k);
        Ok(Point {
            value: r.to_f64() * pf,
            error_estimate: r.error_estimate.to_f64() * pf,
            ambiguity: r.ambiguity().to_f64() * pf,
        })
    }
}

/// Plain Padé `P_m` of the coupling series evaluated at `(k, λ)` in physical units.
pub fn pade_value(model: &Model, series: &PowerSeries, m: usize, k: f64, lambda: f64) -> Result<f64> {
    let p = auto_pade_with(&series.truncate(m).to_coupling(), PadeOptions::default())?;
    let z = Complex::with_val(256, model.coupling(k, lambda));
    Ok(p.evaluate(&z)?.real().to_f64() * series.prefactor().value_at(k))
}

/// Diagonalization value of an observable.
pub fn oracle_value(model: Model, quantity: Quantity, k: f64, lambda: f64, basis: Option<usize>) -> Result<f64> {
    let p = match basis {
        Some(s) => SpectralProblem::new(model, k, lambda, s)?,
        None => SpectralProblem::with_default_basis(model, k, lambda)?,
    };
    match quantity {
        Quantity::Energy => energy(&p),
        q => {
            let g = qmt_resolvent(&p)?;
            Ok(match q {
                Quantity::G11 => g[0][0],
                Quantity::G12 => g[0][1],
                _ => g[1][1],
            })
        }
    }
}

/// All four observables from one diagonalization.
pub fn oracle_all(model: Model, k: f64, lambda: f64, basis: Option<usize>) -> Result<[f64; 4]> {
    let p = match basis {
        Some(s) => SpectralProblem::new(model, k, lambda, s)?,
        None => SpectralProblem::with_default_basis(model, k, lambda)?,
    };
    let e = energy(&p)?;
    let g = qmt_resolvent(&p)?;
    Ok([e, g[0][0], g[0][1], g[1][1]])
}

/// Variational Leroy offset `β*` minimizing the error against the oracle at `(k_ref, λ)`.
#[allow(clippy::too_many_arguments)]
pub fn beta_star(
    model: Model,
    series: &ModelSeries,
    quantity: Quantity,
    m: usize,
    k_ref: f64,
    lambda: f64,
    exact: f64,
    grid: BetaGrid,
    opts: &ResumOptions,
) -> Result<BetaSearch> {
    let s = series.get(quantity);
    let pf = s.prefactor().value_at(k_ref);
    let alpha = Rational::from(model.gevrey_alpha());
    let mut search = optimal_beta(
        s,
        &alpha,
        model.coupling(k_ref, lambda),
        exact / pf,
        grid,
        m,
        Prescription::PrincipalValue,
        opts,
    )?;
    search.delta *= pf;
    for p in &mut search.scan {
        p.1 *= pf;
    }
    Ok(search)
}

/// Real poles in the physical coupling of `P_j[s]` for `j = 1..=m_max`.
#[derive(Clone, Debug, Serialize)]
pub struct PoleSweep {
    /// `(j, λ_pole, froissart)` for poles at positive coupling.
    pub poles: Vec<(usize, f64, bool)>,
}

impl PoleSweep {
    pub fn count(&self) -> usize {
        self.poles.len()
    }

    /// Count without Froissart doublets.
    pub fn count_genuine(&self) -> usize {
        self.poles.iter().filter(|p| !p.2).count()
    }
}

/// Sweep of Padé approximants of the physical series, reporting the real
/// poles at positive `λ` (the physical parameter domain) at spring constant `k`.
pub fn pole_sweep(model: &Model, series: &PowerSeries, m_max: usize, k: f64) -> Result<PoleSweep> {
    let s = series.to_coupling();
    let opts = PadeOptions {
        mode: PadeMode::Float,
        prec: 256,
    };
    let scale = k.powf((model.power() + 1) as f64 / 2.0);
    let mut poles = Vec::new();
    for j in 1..=m_max.min(s.order()) {
        let p = auto_pade_with(&s.truncate(j), opts)?;
        if p.orders().1 == 0 {
            continue;
        }
        let report = find_poles(&p)?;
        for pole in report.poles.iter().filter(|p| p.is_real() && p.location.real().is_sign_positive()) {
            let froissart = pole.class == crate::pade::PoleClass::FroissartDoublet;
            poles.push((j, pole.location.real().to_f64() * scale, froissart));
        }
    }
    Ok(PoleSweep { poles })
}

/// Poles of the Padé-continued Borel transform at order `m`.
pub fn borel_poles(model: &Model, series: &PowerSeries, beta: f64, m: usize) -> Result<PoleReport> {
    let spec = default_spec(model, beta, Prescription::PrincipalValue)?;
    Ok(BorelPade::from_series(series, &spec, m, &ResumOptions::default())?.poles)
}

/// Relative deviation `|a/b − 1|`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Borel-plane singularity expected from the large-order law.
pub fn expected_singularity(model: &Model) -> f64 {
    match model.gevrey_alpha() {
        1 => -1.0 / 3.0,
        _ => -std::f64::consts::PI.powi(2) / 32.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_energy_resummation_matches_oracle() {
        let model = Model::quartic(0);
        let series = model.series(60).unwrap();
        let spec = default_spec(&model, 1.0, Prescription::PrincipalValue).unwrap();
        let r = Resummation::new(model, &series, Quantity::Energy, &spec, 60, &ResumOptions::default()).unwrap();
        let v = r.at(1.0, 1.0).unwrap();
        let exact = oracle_value(model, Quantity::Energy, 1.0, 1.0, Some(120)).unwrap();
        assert!(relative_error(v.value, exact) < 1e-10, "{} vs {exact}", v.value);
    }

    #[test]
    fn plain_pade_is_worse_than_borel_at_small_k() {
        let model = Model::quartic(0);
        let series = model.series(40).unwrap();
        let spec = default_spec(&model, 1.0, Prescription::PrincipalValue).unwrap();
        let r = Resummation::new(model, &series, Quantity::Energy, &spec, 40, &ResumOptions::default()).unwrap();
        let exact = oracle_value(model, Quantity::Energy, 0.2, 1.0, None).unwrap();
        let borel = relative_error(r.at(0.2, 1.0).unwrap().value, exact);
        let pade = relative_error(pade_value(&model, &series.energy, 40, 0.2, 1.0).unwrap(), exact);
        assert!(borel < pade, "borel {borel} pade {pade}");
    }

    #[test]
    fn default_spec_follows_gevrey_order() {
        let s = default_spec(&Model::sextic(0), 2.5, Prescription::PrincipalValue).unwrap();
        assert_eq!(s.alpha, 2);
        let q = default_spec(&Model::quartic(0), 1.0, Prescription::PrincipalValue).unwrap();
        assert_eq!(q.alpha, 1);
    }
}
