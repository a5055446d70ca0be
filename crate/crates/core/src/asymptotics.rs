//! Large-order growth laws `|a_n| ≈ S A^{−n} Γ(αn + β)` from finite coefficient lists.
//!
//! The ratio sequence
//!
//! ```text
//! ρ_n = |a_{n+1} / a_n| / (α^α n^α) = A^{−1} (1 + (β + (α−1)/2)/n + O(n^{−2}))
//! ```
//!
//! is Richardson-extrapolated for `A^{−1}`; the `1/n` coefficient gives `β`,
//! and the extrapolated quotient `|a_n| / (A^{−n} Γ(αn + β))` gives `S`.

use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::DEFAULT_PREC;
use crate::series::PowerSeries;

/// Default Richardson depth.
pub const RICHARDSON_DEPTH: usize = 4;

/// Richardson extrapolation of `x_n = L + c_1/n + … + c_N/n^N` using
/// `x_n, …, x_{n+N}` with `N = values.len() − 1`, `values[i] = x_{n+i}`.
pub fn richardson(values: &[Float], n: usize) -> Float {
    let prec = values[0].prec();
    let depth = values.len() - 1;
    let mut acc = Float::new(prec);
    let mut binom = Float::with_val(prec, 1);
    let mut fact = Float::with_val(prec, 1);
    for k in 1..=depth {
        fact *= k as u32;
    }
    for (k, x) in values.iter().enumerate() {
        let w = Float::with_val(prec, (n + k) as u32).pow(depth as u32) * &binom / &fact;
        let term = Float::with_val(prec, x * &w);
        if (depth + k) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
        binom *= (depth - k) as u32;
        binom /= (k + 1) as u32;
    }
    acc
}

fn magnitudes(s: &PowerSeries, prec: u32) -> Vec<Float> {
    s.coeffs().iter().map(|c| c.to_float(prec).abs()).collect()
}

fn tail_signs_regular(s: &PowerSeries, from: usize) -> bool {
    let signs: Vec<i32> = s.coeffs()[from..]
        .iter()
        .map(|c| c.to_float(64).cmp0().map_or(0, |o| o as i32))
        .collect();
    if signs.contains(&0) {
        return false;
    }
    let constant = signs.windows(2).all(|w| w[0] == w[1]);
    let alternating = signs.windows(2).all(|w| w[0] == -w[1]);
    constant || alternating
}

/// Gevrey order from `n (ln|a_{n+1}| − 2 ln|a_n| + ln|a_{n−1}|) → α`, rounded to 1 or 2.
pub fn detect_gevrey_order(s: &PowerSeries) -> Result<u32> {
    let m = s.order();
    if m < 20 {
        return Err(Error::Precondition(format!("need at least 20 orders, got {m}")));
    }
    if !tail_signs_regular(s, m / 2) {
        return Err(Error::Classification("coefficient signs are neither constant nor alternating".into()));
    }
    let prec = DEFAULT_PREC;
    let logs: Vec<Float> = magnitudes(s, prec).into_iter().map(|a| a.ln()).collect();
    let curvature: Vec<Float> = (1..m)
        .map(|n| {
            let d2 = Float::with_val(prec, &logs[n + 1] - Float::with_val(prec, &logs[n] * 2u32)) + &logs[n - 1];
            d2 * n as u32
        })
        .collect();
    let depth = RICHARDSON_DEPTH.min(curvature.len() - 1);
    let start = curvature.len() - 1 - depth;
    let estimate = richardson(&curvature[start..], start + 1).to_f64();
    let alpha = estimate.round();
    if !(alpha == 1.0 || alpha == 2.0) || (estimate - alpha).abs() > 0.25 {
        return Err(Error::Classification(format!("growth exponent {estimate:.4} is not close to 1 or 2")));
    }
    Ok(alpha as u32)
}

/// Extrapolated growth law with last-step uncertainties.
#[derive(Clone, Debug)]
pub struct AsymptoticFit {
    pub alpha: u32,
    pub a_inverse: Float,
    pub beta: Float,
    pub s: Float,
    pub a_inverse_delta: Float,
    pub beta_delta: Float,
    pub s_delta: Float,
    /// `(n, |a_n| / (S A^{−n} Γ(αn+β)) − 1)` for the last usable orders.
    pub residuals: Vec<(usize, f64)>,
}

/// Serializable summary of an [`AsymptoticFit`].
#[derive(Clone, Debug, Serialize)]
pub struct FitSummary {
    pub alpha: u32,
    pub a_inverse: f64,
    pub a_inverse_uncertainty: f64,
    pub beta: f64,
    pub beta_uncertainty: f64,
    pub s: f64,
    pub s_uncertainty: f64,
    pub singularity: f64,
    pub residuals: Vec<(usize, f64)>,
}

impl AsymptoticFit {
    pub fn summary(&self) -> FitSummary {
        FitSummary {
            alpha: self.alpha,
            a_inverse: self.a_inverse.to_f64(),
            a_inverse_uncertainty: self.a_inverse_delta.to_f64(),
            beta: self.beta.to_f64(),
            beta_uncertainty: self.beta_delta.to_f64(),
            s: self.s.to_f64(),
            s_uncertainty: self.s_delta.to_f64(),
            singularity: singularity_location(self).to_f64(),
            residuals: self.residuals.clone(),
        }
    }
}

/// Fit with the default Richardson depth.
pub fn fit_growth(s: &PowerSeries, alpha: u32) -> Result<AsymptoticFit> {
    fit_growth_with(s, alpha, RICHARDSON_DEPTH)
}

/// Extrapolates the last `depth + 1` terms of each sequence, and the window
/// one step earlier for the uncertainty.
fn extrapolate(seq: &[Float], first_n: usize, depth: usize) -> (Float, Float) {
    let len = seq.len();
    let last = richardson(&seq[len - depth - 1..], first_n + len - depth - 1);
    let prev = richardson(&seq[len - depth - 2..len - 1], first_n + len - depth - 2);
    let delta = Float::with_val(last.prec(), &last - &prev).abs();
    (last, delta)
}

pub fn fit_growth_with(s: &PowerSeries, alpha: u32, depth: usize) -> Result<AsymptoticFit> {
    let m = s.order();
    if m < 30 {
        return Err(Error::Precondition(format!("need at least 30 orders, got {m}")));
    }
    if alpha == 0 {
        return Err(Error::Precondition("α must be positive".into()));
    }
    if depth + 12 > m {
        return Err(Error::Precondition(format!("Richardson depth {depth} too large for {m} orders")));
    }
    let prec = DEFAULT_PREC;
    let a = magnitudes(s, prec);
    let first = m / 2;
    if a[first..].iter().any(|x| x.is_zero()) {
        return Err(Error::Classification("vanishing coefficients in the tail".into()));
    }
    let norm = Float::with_val(prec, alpha).pow(alpha);

    // ρ_n, n = first..m−1
    let rho: Vec<Float> = (first..m)
        .map(|n| {
            let r = Float::with_val(prec, &a[n + 1] / &a[n]);
            r / Float::with_val(prec, n as u32).pow(alpha) / &norm
        })
        .collect();
    let (a_inverse, a_inverse_delta) = extrapolate(&rho, first, depth);
    if a_inverse <= 0 {
        return Err(Error::Numeric("non-positive geometric rate".into()));
    }

    let shift = Float::with_val(prec, alpha - 1) / 2u32;
    let sigma: Vec<Float> = rho
        .iter()
        .enumerate()
        .map(|(i, r)| (Float::with_val(prec, r / &a_inverse) - 1u32) * (first + i) as u32 - &shift)
        .collect();
    let (beta, beta_delta) = extrapolate(&sigma, first, depth);

    let quotient = |n: usize, beta: &Float| -> Float {
        let lg = Float::with_val(prec, Float::with_val(prec, alpha * n as u32) + beta).ln_gamma();
        let la = Float::with_val(prec, a_inverse.ln_ref()) * n as u32;
        Float::with_val(prec, a[n].ln_ref()) - lg - la
    };
    let q: Vec<Float> = (first..=m).map(|n| quotient(n, &beta).exp()).collect();
    let (s_value, s_delta) = extrapolate(&q, first, depth);

    let residuals = (m.saturating_sub(9)..=m)
        .map(|n| {
            let r = Float::with_val(prec, quotient(n, &beta).exp() / &s_value) - 1u32;
            (n, r.to_f64())
        })
        .collect();
    Ok(AsymptoticFit {
        alpha,
        a_inverse,
        beta,
        s: s_value,
        a_inverse_delta,
        beta_delta,
        s_delta,
        residuals,
    })
}

/// Borel-plane singularity `−1/A^{−1}` of an alternating series.
pub fn singularity_location(fit: &AsymptoticFit) -> Float {
    -Float::with_val(fit.a_inverse.prec(), 1u32 / &fit.a_inverse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gamma, Scalar};

    fn synthetic(s: f64, a_inv: f64, alpha: u32, beta: f64, m: usize, alternating: bool) -> PowerSeries {
        let prec = DEFAULT_PREC;
        let coeffs = (0..=m)
            .map(|n| {
                let g = gamma(&(Float::with_val(prec, alpha * n as u32) + beta), prec).unwrap();
                let mut v = g * Float::with_val(prec, a_inv).pow(n as u32) * s;
                if alternating && n % 2 == 1 {
                    v = -v;
                }
                Scalar::Float(v)
            })
            .collect();
        PowerSeries::plain(coeffs).unwrap()
    }

    #[test]
    fn richardson_is_exact_on_polynomials_in_inverse_n() {
        let prec = 256;
        let f = |n: usize| {
            let x = Float::with_val(prec, 1) / n as u32;
            Float::with_val(prec, 2.5) + Float::with_val(prec, &x * 3u32) - Float::with_val(prec, x.square_ref()) * 7u32
                + Float::with_val(prec, x.pow(4u32))
        };
        let vals: Vec<Float> = (10..15).map(f).collect();
        let r = richardson(&vals, 10);
        assert!((r - 2.5f64).abs() < 1e-60);
    }

    #[test]
    fn detects_gevrey_orders() {
        let fact = synthetic(1.0, 1.0, 1, 1.0, 40, false);
        assert_eq!(detect_gevrey_order(&fact).unwrap(), 1);
        let double = synthetic(1.0, 1.0, 2, 1.0, 40, true);
        assert_eq!(detect_gevrey_order(&double).unwrap(), 2);
        let geometric = PowerSeries::plain((0..40).map(|n| Scalar::int(3i64.pow(n))).collect()).unwrap();
        assert!(matches!(detect_gevrey_order(&geometric), Err(Error::Classification(_))));
        let mixed = PowerSeries::plain(
            (0..40)
                .map(|n| {
                    let g = gamma(&Float::with_val(256, n as u32 + 1), 256).unwrap();
                    Scalar::Float(if n % 3 == 0 { -g } else { g })
                })
                .collect(),
        )
        .unwrap();
        assert!(matches!(detect_gevrey_order(&mixed), Err(Error::Classification(_))));
    }

    #[test]
    fn recovers_synthetic_growth_laws() {
        for (s, a_inv, alpha, beta) in [(0.7, 3.0, 1, 0.5), (2.3, 0.4, 1, 3.5), (0.244, 32.0 / 9.8696, 2, 2.5), (5.0, 1.5, 2, 0.25)] {
            let series = synthetic(s, a_inv, alpha, beta, 80, true);
            let fit = fit_growth(&series, alpha).unwrap();
            let rel = |x: &Float, y: f64| ((x.to_f64() - y) / y).abs();
            assert!(rel(&fit.a_inverse, a_inv) < 1e-6);
            assert!(rel(&fit.beta, beta) < 1e-6);
            assert!(rel(&fit.s, s) < 1e-6);
            assert!(fit.residuals.iter().all(|(_, r)| r.abs() < 1e-6));
            assert!((singularity_location(&fit).to_f64() + 1.0 / a_inv).abs() < 1e-6);
        }
    }

    #[test]
    fn scaling_only_moves_the_prefactor() {
        let base = synthetic(1.3, 3.0, 1, 1.5, 60, false);
        let scaled = base.scale(&Scalar::ratio(7, 2));
        let a = fit_growth(&base, 1).unwrap();
        let b = fit_growth(&scaled, 1).unwrap();
        assert!((a.a_inverse.to_f64() - b.a_inverse.to_f64()).abs() < 1e-12);
        assert!((a.beta.to_f64() - b.beta.to_f64()).abs() < 1e-12);
        assert!((b.s.to_f64() / a.s.to_f64() - 3.5).abs() < 1e-10);
    }

    #[test]
    fn too_short_series_is_rejected() {
        let s = synthetic(1.0, 1.0, 1, 1.0, 20, true);
        assert!(matches!(fit_growth(&s, 1), Err(Error::Precondition(_))));
        assert!(detect_gevrey_order(&synthetic(1.0, 1.0, 1, 1.0, 10, true)).is_err());
    }
}
