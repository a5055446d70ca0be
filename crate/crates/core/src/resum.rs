//! Borel and Borel–Leroy resummation of Padé-continued transforms.
//!
//! With `B(u) = Σ f_n u^n / Γ(αn + β)` the resummed value is
//!
//! ```text
//! S(z) = ∫_0^∞ B(z t^α) e^{−t} t^{β−1} dt,
//! ```
//!
//! which for `α = β = 1` is the ordinary `(1/z) ∫ B(u) e^{−u/z} du`. The
//! integral is evaluated in a variable `v` with `t = v^κ`, where `κ` is chosen
//! so that the endpoint factor `v^{κβ−1}` is a non-negative integer power when
//! `β` is a small-denominator rational.
//!
//! Poles of the Padé approximant on the positive axis are handled either by a
//! principal value (residue subtraction on a symmetric window, dropping the
//! `±iπ` half-residues) or by rotating the contour off the axis.

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pade::{auto_pade_with, find_poles, PadeApproximant, PadeMode, PadeOptions, PoleReport};
use crate::quad::{integrate, QuadOptions};
use crate::scalar::{gamma, Scalar};
use crate::series::PowerSeries;

/// Relative imaginary part below which a pole is treated as lying on the
/// integration axis.
pub const AXIS_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prescription {
    Ordinary,
    PrincipalValue,
    LateralPlus,
    LateralMinus,
}

impl fmt::Display for Prescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Prescription::Ordinary => "ordinary",
            Prescription::PrincipalValue => "pv",
            Prescription::LateralPlus => "lateral+",
            Prescription::LateralMinus => "lateral-",
        })
    }
}

impl FromStr for Prescription {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordinary" => Ok(Prescription::Ordinary),
            "pv" | "principal-value" => Ok(Prescription::PrincipalValue),
            "lateral+" | "lateral-plus" => Ok(Prescription::LateralPlus),
            "lateral-" | "lateral-minus" => Ok(Prescription::LateralMinus),
            other => Err(Error::Parse(format!("unknown prescription {other:?}"))),
        }
    }
}

/// Transform parameters: `Γ(αn + β)` normalization and the Laplace prescription.
#[derive(Clone, Debug, PartialEq)]
pub struct BorelSpec {
    pub alpha: Rational,
    pub beta: f64,
    pub prescription: Prescription,
}

impl BorelSpec {
    pub fn new(alpha: Rational, beta: f64, prescription: Prescription) -> Result<Self> {
        if alpha <= 0 {
            return Err(Error::Precondition("α must be positive".into()));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Precondition(format!("β must be positive, got {beta}")));
        }
        Ok(BorelSpec {
            alpha,
            beta,
            prescription,
        })
    }

    /// Ordinary Borel transform (`α = β = 1`).
    pub fn ordinary(prescription: Prescription) -> Self {
        BorelSpec {
            alpha: Rational::from(1),
            beta: 1.0,
            prescription,
        }
    }

    /// Integer-order Leroy transform.
    pub fn leroy(alpha: u32, beta: f64, prescription: Prescription) -> Result<Self> {
        BorelSpec::new(Rational::from(alpha), beta, prescription)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        BorelSpec::new(self.alpha.clone(), beta, self.prescription)
    }

    pub fn with_prescription(&self, prescription: Prescription) -> Self {
        BorelSpec {
            prescription,
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResumOptions {
    pub quad: QuadOptions,
    /// Target relative accuracy of the Laplace integral.
    pub tol: f64,
    pub pade: PadeOptions,
}

impl Default for ResumOptions {
    fn default() -> Self {
        ResumOptions {
            quad: QuadOptions::default(),
            tol: 1e-28,
            pade: PadeOptions {
                mode: PadeMode::Float,
                prec: 512,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Integrand evaluations.
    pub nodes: usize,
    pub panels: usize,
    /// Borel-plane locations of poles treated as lying on the axis.
    pub excised_poles: Vec<f64>,
    /// Borel-plane point where the integral is truncated.
    pub tail_cutoff: f64,
    pub tail_bound: f64,
    /// Contour rotation angle in the Borel plane (lateral sums only).
    pub rotation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResumResult {
    /// Resummed value; the imaginary part vanishes except for lateral sums.
    pub value: Complex,
    pub prescription: Prescription,
    pub error_estimate: Float,
    pub diagnostics: Diagnostics,
}

impl ResumResult {
    pub fn real(&self) -> Float {
        self.value.real().clone()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.real().to_f64()
    }

    /// Imaginary part of a lateral sum, the non-perturbative ambiguity.
    pub fn ambiguity(&self) -> Float {
        self.value.imag().clone()
    }
}

fn small_denominator(beta: f64) -> Option<(i64, u32)> {
    (1..=8u32).find_map(|q| {
        let p = (beta * q as f64).round();
        ((beta * q as f64 - p).abs() < 1e-12).then_some((p as i64, q))
    })
}

/// `a_n / Γ(αn + β)`, exact when `α` and `β` are positive integers.
pub fn borel_coeffs(s: &PowerSeries, spec: &BorelSpec) -> Result<PowerSeries> {
    borel_coeffs_prec(s, spec, ResumOptions::default().pade.prec)
}

pub fn borel_coeffs_prec(s: &PowerSeries, spec: &BorelSpec, prec: u32) -> Result<PowerSeries> {
    let integer_alpha = spec.alpha.denom() == &1u32;
    let integer_beta = spec.beta.fract() == 0.0;
    let coeffs = if integer_alpha && integer_beta && s.is_rational() {
        let alpha = spec.alpha.numer().to_u32().ok_or_else(|| Error::Domain("α too large".into()))?;
        let beta = spec.beta as u32;
        s.coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let g = Integer::from(Integer::factorial(alpha * n as u32 + beta - 1));
                c.div(&Scalar::from(g))
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        let alpha = Float::with_val(prec, &spec.alpha);
        s.coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let x = Float::with_val(prec, &alpha * n as u32) + spec.beta;
                let g = gamma(&x, prec)?;
                Ok(Scalar::Float(c.to_float(prec) / g))
            })
            .collect::<Result<Vec<_>>>()?
    };
    PowerSeries::new(coeffs, s.variable().clone(), s.prefactor().clone())
}

/// Padé continuation of a Borel(–Leroy) transform together with its poles.
///
/// Building this is the expensive step; summing at many coupling values
/// reuses it.
#[derive(Clone, Debug)]
pub struct BorelPade {
    pub spec: BorelSpec,
    pub pade: PadeApproximant,
    pub poles: PoleReport,
}

impl BorelPade {
    /// Wraps a Padé approximant of the transformed coefficients.
    pub fn new(pade: PadeApproximant, spec: BorelSpec) -> Result<Self> {
        let poles = if pade.orders().1 == 0 {
            PoleReport {
                poles: Vec::new(),
                zeros: Vec::new(),
            }
        } else {
            find_poles(&pade)?
        };
        Ok(BorelPade { spec, pade, poles })
    }

    /// Truncates `s` to order `m`, maps it to the bare coupling, transforms and continues it.
    pub fn from_series(s: &PowerSeries, spec: &BorelSpec, m: usize, opts: &ResumOptions) -> Result<Self> {
        if m < 1 || m > s.order() {
            return Err(Error::Precondition(format!(
                "order m = {m} must lie in 1..={}",
                s.order()
            )));
        }
        let b = borel_coeffs_prec(&s.truncate(m).to_coupling(), spec, opts.pade.prec)?;
        let pade = auto_pade_with(&b, opts.pade)?;
        BorelPade::new(pade, spec.clone())
    }

    /// Laplace-type integral at coupling `z > 0` with the spec's prescription.
    pub fn sum(&self, z: f64, opts: &ResumOptions) -> Result<ResumResult> {
        self.sum_with(z, self.spec.prescription, opts)
    }

    pub fn sum_with(&self, z: f64, prescription: Prescription, opts: &ResumOptions) -> Result<ResumResult> {
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::Precondition(format!("coupling z must be positive, got {z}")));
        }
        let kernel = Kernel::new(&self.pade, &self.spec, Float::with_val(opts.quad.prec, z), opts.quad.prec);
        kernel.run(&self.poles, prescription, opts)
    }
}

struct Power {
    value: Float,
    integer: Option<u32>,
}

impl Power {
    fn new(r: &Rational, prec: u32) -> Power {
        let integer = (r.denom() == &1u32).then(|| r.numer().to_u32()).flatten();
        Power {
            value: Float::with_val(prec, r),
            integer,
        }
    }

    fn from_float(value: Float) -> Power {
        Power { value, integer: None }
    }

    fn real(&self, x: &Float) -> Float {
        match self.integer {
            Some(n) => Float::with_val(x.prec(), x.pow(n)),
            None if x.is_zero() => Float::new(x.prec()),
            None => Float::with_val(x.prec(), x.pow(&self.value)),
        }
    }

    /// `(s e^{iφ})^c` for `s ≥ 0`.
    fn ray(&self, s: &Float, phi: &Float) -> Complex {
        let prec = s.prec();
        let modulus = self.real(s);
        let angle = Float::with_val(prec, phi * &self.value);
        let (sin, cos) = angle.sin_cos(Float::new(prec));
        Complex::with_val(prec, (Float::with_val(prec, &modulus * &cos), modulus * sin))
    }

    fn complex(&self, z: &Complex) -> Complex {
        match self.integer {
            Some(n) => Complex::with_val(z.prec(), z.pow(n)),
            None => Complex::with_val(z.prec(), z.pow(&self.value)),
        }
    }
}

/// `G(v) = κ v^{κβ−1} e^{−v^κ} B(z v^{κα})`, whose integral over `v ∈ [0, ∞)` is the sum.
struct Kernel {
    prec: u32,
    num: Vec<Float>,
    den: Vec<Float>,
    z: Float,
    kappa: Float,
    t_pow: Power,
    front: Power,
    u_pow: Power,
    alpha: Float,
    beta: Float,
}

struct Window {
    centre: Float,
    half: Float,
    poles: Vec<(Complex, Complex)>,
}

impl Kernel {
    fn new(p: &PadeApproximant, spec: &BorelSpec, z: Float, prec: u32) -> Kernel {
        let (kappa_r, front_r): (Option<Rational>, Option<Rational>) = match small_denominator(spec.beta) {
            Some((num, q)) => (Some(Rational::from(q)), Some(Rational::from(num - 1))),
            None if spec.beta < 1.0 => (None, Some(Rational::new())),
            None => (Some(Rational::from(1)), None),
        };
        let beta = Float::with_val(prec, spec.beta);
        let kappa = match &kappa_r {
            Some(k) => Float::with_val(prec, k),
            None => Float::with_val(prec, 1u32) / &beta,
        };
        let t_pow = match &kappa_r {
            Some(k) => Power::new(k, prec),
            None => Power::from_float(kappa.clone()),
        };
        let front = match &front_r {
            Some(e) => Power::new(e, prec),
            None => Power::from_float(Float::with_val(prec, &beta - 1u32)),
        };
        let u_pow = match &kappa_r {
            Some(k) => Power::new(&Rational::from(k * &spec.alpha), prec),
            None => Power::from_float(Float::with_val(prec, &kappa * &spec.alpha)),
        };
        Kernel {
            prec,
            num: p.numerator_float().iter().map(|c| Float::with_val(prec, c)).collect(),
            den: p.denominator_float().iter().map(|c| Float::with_val(prec, c)).collect(),
            z,
            kappa,
            t_pow,
            front,
            u_pow,
            alpha: Float::with_val(prec, &spec.alpha),
            beta,
        }
    }

    fn b_real(&self, u: &Float) -> Float {
        let horner = |c: &[Float]| {
            let mut acc = Float::new(self.prec);
            for a in c.iter().rev() {
                acc *= u;
                acc += a;
            }
            acc
        };
        horner(&self.num) / horner(&self.den)
    }

    fn b_complex(&self, u: &Complex) -> Complex {
        let horner = |c: &[Float]| {
            let mut acc = Complex::new(self.prec);
            for a in c.iter().rev() {
                acc *= u;
                acc += a;
            }
            acc
        };
        horner(&self.num) / horner(&self.den)
    }

    fn g_real(&self, v: &Float) -> Float {
        let u = Float::with_val(self.prec, &self.z * &self.u_pow.real(v));
        let damp = (-self.t_pow.real(v)).exp();
        self.front.real(v) * damp * &self.kappa * self.b_real(&u)
    }

    fn g_ray(&self, s: &Float, phi: &Float) -> Complex {
        let u = Complex::with_val(self.prec, self.u_pow.ray(s, phi) * &self.z);
        let damp = (-self.t_pow.ray(s, phi)).exp();
        let (sin, cos) = Float::with_val(self.prec, phi).sin_cos(Float::new(self.prec));
        let jac = Complex::with_val(self.prec, (cos, sin));
        self.front.ray(s, phi) * damp * self.b_complex(&u) * jac * &self.kappa
    }

    /// `v` for a Borel-plane point `u`: `v = (u/z)^{1/(κα)}`.
    fn v_of_u(&self, u: &Complex) -> Complex {
        let inv = Float::with_val(self.prec, 1u32) / &self.u_pow.value;
        Complex::with_val(self.prec, Complex::with_val(self.prec, u / &self.z).pow(&inv))
    }

    /// Residue of `G` at `v_c` given the Borel-plane residue `res_u` at `u_c`.
    fn residue_v(&self, vc: &Complex, res_u: &Complex) -> Complex {
        let front = self.front.complex(vc);
        let damp = Complex::with_val(self.prec, -self.t_pow.complex(vc)).exp();
        let a = &self.u_pow.value;
        let dudv = Complex::with_val(
            self.prec,
            Complex::with_val(self.prec, vc.pow(&Float::with_val(self.prec, a - 1u32))) * &self.z * a,
        );
        front * damp * &self.kappa * res_u / dudv
    }

    fn magnitude_at_t(&self, t: &Float) -> Float {
        let u = Float::with_val(self.prec, t.pow(&self.alpha)) * &self.z;
        self.b_real(&u).abs()
    }

    /// Cut-off `T` in `t` and the bound on `∫_T^∞`.
    fn tail(&self, tol_abs: &Float, tilt: &Float) -> (Float, Float) {
        let prec = self.prec;
        let lead = if self.num.len() == self.den.len() {
            Float::with_val(prec, &self.num[self.num.len() - 1] / &self.den[self.den.len() - 1]).abs()
        } else {
            Float::new(prec)
        };
        let cos = Float::with_val(prec, tilt.cos_ref());
        let mut t = Float::with_val(prec, 20);
        loop {
            let mut sup = lead.clone();
            for f in [1u32, 2, 4] {
                sup = sup.max(&self.magnitude_at_t(&Float::with_val(prec, &t * f)));
            }
            sup *= 2u32;
            let x = Float::with_val(prec, &t * &cos);
            let g = Float::with_val(prec, self.beta.gamma_inc_ref(&x));
            let bound = sup * g / Float::with_val(prec, (&cos).pow(&self.beta));
            if bound <= *tol_abs || t > 20000 {
                return (t, bound);
            }
            t *= 1.15f64;
        }
    }

    /// Typical size of the integral: `Γ(β)` times the median of `|B|` at a few
    /// sample points (a median so that a sample landing near a pole is ignored).
    fn scale(&self) -> Float {
        let prec = self.prec;
        let mut samples: Vec<Float> = [0.113f64, 0.377, 1.291, 2.873, 5.309]
            .iter()
            .map(|t| self.magnitude_at_t(&Float::with_val(prec, *t)))
            .filter(|m| m.is_finite())
            .collect();
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let mid = samples
            .get(samples.len() / 2)
            .cloned()
            .unwrap_or_else(|| Float::with_val(prec, 1));
        let floor = Float::with_val(prec, 1e-300);
        mid.max(&floor) * Float::with_val(prec, self.beta.gamma_ref())
    }

    fn run(&self, report: &PoleReport, prescription: Prescription, opts: &ResumOptions) -> Result<ResumResult> {
        let prec = self.prec;
        let axis: Vec<(Complex, Complex)> = report
            .poles
            .iter()
            .filter(|p| on_axis(&p.location))
            .map(|p| (Complex::with_val(prec, &p.location), Complex::with_val(prec, &p.residue)))
            .collect();
        let tol_abs = self.scale() * opts.tol;
        let excised: Vec<f64> = axis.iter().map(|(u, _)| u.real().to_f64()).collect();
        match prescription {
            Prescription::Ordinary | Prescription::PrincipalValue => {
                if prescription == Prescription::Ordinary && !axis.is_empty() {
                    return Err(Error::PoleOnContour(format!("{}", excised[0])));
                }
                self.real_axis(axis, excised, prescription, &tol_abs, opts)
            }
            Prescription::LateralPlus | Prescription::LateralMinus => {
                let mut eps = 0.1f64;
                for p in &report.poles {
                    let re = p.location.real().to_f64();
                    let im = p.location.imag().to_f64();
                    if re > 0.0 && !on_axis(&p.location) {
                        eps = eps.min(im.abs().atan2(re) / 10.0);
                    }
                }
                let eps = eps.max(1e-6);
                let sign = if prescription == Prescription::LateralPlus { 1.0 } else { -1.0 };
                self.lateral(sign * eps, excised, prescription, &tol_abs, opts)
            }
        }
    }

    fn v_cut(&self, t: &Float) -> Float {
        Float::with_val(self.prec, t.pow(Float::with_val(self.prec, 1u32) / &self.kappa))
    }

    fn real_axis(
        &self,
        axis: Vec<(Complex, Complex)>,
        excised: Vec<f64>,
        prescription: Prescription,
        tol_abs: &Float,
        opts: &ResumOptions,
    ) -> Result<ResumResult> {
        let prec = self.prec;
        let (t_cut, tail_bound) = self.tail(tol_abs, &Float::new(prec));
        let v_max = self.v_cut(&t_cut);
        let mut windows = self.windows(&axis)?;
        windows.sort_by(|a, b| a.centre.partial_cmp(&b.centre).unwrap_or(std::cmp::Ordering::Equal));
        let end = windows
            .last()
            .map(|w| Float::with_val(prec, &w.centre + &w.half))
            .map_or(v_max.clone(), |e| e.max(&v_max));

        let mut segments: Vec<(Float, Float)> = Vec::new();
        let mut start = Float::new(prec);
        for w in &windows {
            segments.push((start, Float::with_val(prec, &w.centre - &w.half)));
            start = Float::with_val(prec, &w.centre + &w.half);
        }
        segments.push((start, end.clone()));
        let piece = Float::with_val(prec, &v_max / 12u32);
        let total = end;

        let mut value = Complex::new(prec);
        let mut error = Float::new(prec);
        let (mut nodes, mut panels) = (0usize, 0usize);
        let f = |v: &Float| Complex::with_val(prec, self.g_real(v));
        for (a, b) in &segments {
            let width = Float::with_val(prec, b - a);
            if width <= 0 {
                continue;
            }
            let count = Float::with_val(prec, &width / &piece).ceil().to_u32_saturating().unwrap_or(1).clamp(1, 64);
            let breaks: Vec<Float> = (0..=count)
                .map(|i| Float::with_val(prec, a + Float::with_val(prec, &width * i) / count))
                .collect();
            let share = Float::with_val(prec, tol_abs * &width) / &total;
            let r = integrate(&f, &breaks, &share, &opts.quad);
            value += r.value;
            error += r.error;
            nodes += r.evaluations;
            panels += r.panels;
        }
        for w in &windows {
            let lo = Float::with_val(prec, &w.centre - &w.half);
            let hi = Float::with_val(prec, &w.centre + &w.half);
            let g = |v: &Float| {
                let mut acc = Complex::with_val(prec, self.g_real(v));
                for (vc, rho) in &w.poles {
                    acc -= Complex::with_val(prec, rho / Complex::with_val(prec, v - vc));
                }
                acc
            };
            let share = Float::with_val(prec, tol_abs * Float::with_val(prec, &w.half * 2u32)) / &total;
            let r = integrate(&g, &[lo.clone(), w.centre.clone(), hi.clone()], &share, &opts.quad);
            value += r.value;
            error += r.error;
            nodes += r.evaluations;
            panels += r.panels;
            for (vc, rho) in &w.poles {
                let right = Float::with_val(prec, Complex::with_val(prec, &hi - vc).abs_ref());
                let left = Float::with_val(prec, Complex::with_val(prec, &lo - vc).abs_ref());
                value += Complex::with_val(prec, rho * (right / left).ln());
            }
        }
        let imag = Float::with_val(prec, value.imag());
        let value = Complex::with_val(prec, (value.real(), 0));
        let error_estimate = error + &tail_bound + imag.abs();
        Ok(ResumResult {
            value,
            prescription,
            error_estimate,
            diagnostics: Diagnostics {
                nodes,
                panels,
                excised_poles: excised,
                tail_cutoff: Float::with_val(prec, t_cut.pow(&self.alpha) * &self.z).to_f64(),
                tail_bound: tail_bound.to_f64(),
                rotation: 0.0,
            },
        })
    }

    /// Symmetric windows around on-axis poles; each holds the poles it subtracts.
    fn windows(&self, axis: &[(Complex, Complex)]) -> Result<Vec<Window>> {
        let prec = self.prec;
        let mut located: Vec<(Complex, Complex)> = axis
            .iter()
            .map(|(u, res)| {
                let vc = self.v_of_u(u);
                let rho = self.residue_v(&vc, res);
                (vc, rho)
            })
            .collect();
        located.sort_by(|a, b| a.0.real().partial_cmp(b.0.real()).unwrap_or(std::cmp::Ordering::Equal));
        for w in located.windows(2) {
            let gap = Float::with_val(prec, Complex::with_val(prec, &w[1].0 - &w[0].0).abs_ref());
            let scale = Float::with_val(prec, w[1].0.real().abs_ref());
            if gap <= scale * 1e-20f64 {
                return Err(Error::UnsupportedSingularity(format!(
                    "pole of order ≥ 2 on the axis near v = {}",
                    w[0].0.real().to_f64()
                )));
            }
        }
        let mut out = Vec::with_capacity(located.len());
        for (i, (vc, rho)) in located.iter().enumerate() {
            let centre = Float::with_val(prec, vc.real());
            let mut half = Float::with_val(prec, &centre / 2u32).min(&Float::with_val(prec, 0.5));
            if i > 0 {
                let gap = Float::with_val(prec, &centre - located[i - 1].0.real());
                half = half.min(&(gap * 0.45f64));
            }
            if i + 1 < located.len() {
                let gap = Float::with_val(prec, located[i + 1].0.real() - &centre);
                half = half.min(&(gap * 0.45f64));
            }
            out.push(Window {
                centre,
                half,
                poles: vec![(vc.clone(), rho.clone())],
            });
        }
        Ok(out)
    }

    fn lateral(
        &self,
        eps: f64,
        excised: Vec<f64>,
        prescription: Prescription,
        tol_abs: &Float,
        opts: &ResumOptions,
    ) -> Result<ResumResult> {
        let prec = self.prec;
        let phi = Float::with_val(prec, eps) / &self.u_pow.value;
        let tilt = Float::with_val(prec, &phi * &self.kappa);
        let (t_cut, tail_bound) = self.tail(tol_abs, &tilt);
        let cos = Float::with_val(prec, tilt.cos_ref());
        let s_max = self.v_cut(&Float::with_val(prec, &t_cut / &cos));
        let count = 24u32;
        let breaks: Vec<Float> = (0..=count)
            .map(|i| Float::with_val(prec, &s_max * i) / count)
            .collect();
        let f = |s: &Float| self.g_ray(s, &phi);
        let r = integrate(&f, &breaks, tol_abs, &opts.quad);
        let imag = Float::with_val(prec, r.value.imag().abs_ref());
        let error_estimate = r.error + &tail_bound + imag;
        Ok(ResumResult {
            value: r.value,
            prescription,
            error_estimate,
            diagnostics: Diagnostics {
                nodes: r.evaluations,
                panels: r.panels,
                excised_poles: excised,
                tail_cutoff: Float::with_val(prec, t_cut.pow(&self.alpha) * &self.z).to_f64(),
                tail_bound: tail_bound.to_f64(),
                rotation: eps,
            },
        })
    }
}

fn on_axis(u: &Complex) -> bool {
    let re = u.real().to_f64();
    re > 0.0 && u.imag().to_f64().abs() <= AXIS_TOLERANCE * re
}

/// `(1/z) ∫_0^∞ p(u) e^{−u/z} du`; fails when a pole lies on the contour.
pub fn resum_ordinary(p: &PadeApproximant, z: f64) -> Result<ResumResult> {
    sum_pade(p, z, Prescription::Ordinary)
}

/// Principal-value Laplace integral of `p`.
pub fn resum_pv(p: &PadeApproximant, z: f64) -> Result<ResumResult> {
    sum_pade(p, z, Prescription::PrincipalValue)
}

/// Which side of the positive axis a lateral contour passes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Laplace integral along the ray rotated just above (`Plus`) or below the axis.
pub fn resum_lateral(p: &PadeApproximant, z: f64, side: Side) -> Result<ResumResult> {
    let prescription = match side {
        Side::Plus => Prescription::LateralPlus,
        Side::Minus => Prescription::LateralMinus,
    };
    sum_pade(p, z, prescription)
}

fn sum_pade(p: &PadeApproximant, z: f64, prescription: Prescription) -> Result<ResumResult> {
    BorelPade::new(p.clone(), BorelSpec::ordinary(prescription))?.sum(z, &ResumOptions::default())
}

/// Transform, continue and sum the first `m` orders of `s` at coupling `z`.
pub fn resum_leroy(s: &PowerSeries, z: f64, spec: &BorelSpec, m: usize) -> Result<ResumResult> {
    let opts = ResumOptions::default();
    BorelPade::from_series(s, spec, m, &opts)?.sum(z, &opts)
}

/// Grid of `β` values `lo, lo + step, …, ≤ hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BetaGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for BetaGrid {
    fn default() -> Self {
        BetaGrid {
            lo: 0.5,
            hi: 10.0,
            step: 0.25,
        }
    }
}

impl BetaGrid {
    pub fn points(&self) -> Vec<f64> {
        if !(self.step > 0.0) || self.hi < self.lo {
            return Vec::new();
        }
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaSearch {
    pub beta_star: f64,
    pub delta: f64,
    /// `(β, Δ(β))` over the grid; failed points are omitted.
    pub scan: Vec<(f64, f64)>,
}

/// `argmin_β |exact_ref − S_β(z_ref)|` over the grid, refined by golden section
/// inside the winning cell. `exact_ref` is in the normalization of the bare
/// coupling series (no `k` prefactor).
pub fn optimal_beta(
    s: &PowerSeries,
    alpha: &Rational,
    z_ref: f64,
    exact_ref: f64,
    grid: BetaGrid,
    m: usize,
    prescription: Prescription,
    opts: &ResumOptions,
) -> Result<BetaSearch> {
    let delta = |beta: f64| -> Result<f64> {
        let spec = BorelSpec::new(alpha.clone(), beta, prescription)?;
        let r = BorelPade::from_series(s, &spec, m, opts)?.sum(z_ref, opts)?;
        Ok((r.to_f64() - exact_ref).abs())
    };
    let points = grid.points();
    if points.is_empty() {
        return Err(Error::Precondition("β grid is empty".into()));
    }
    let mut scan = Vec::new();
    let mut last_err = None;
    for b in points {
        match delta(b) {
            Ok(d) if d.is_finite() => scan.push((b, d)),
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    let Some(&(mut best_b, mut best_d)) = scan.iter().min_by(|a, b| a.1.total_cmp(&b.1)) else {
        return Err(last_err.unwrap_or_else(|| Error::Numeric("no β produced a finite sum".into())));
    };
    let lo = (best_b - grid.step).max(f64::MIN_POSITIVE.max(grid.lo - grid.step).max(1e-6));
    let hi = best_b + grid.step;
    let (mut a, mut b) = (lo, hi);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let eval = |x: f64| delta(x).ok().filter(|d| d.is_finite()).unwrap_or(f64::INFINITY);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..20 {
        for (x, f) in [(x1, f1), (x2, f2)] {
            if f < best_d || (f == best_d && x < best_b) {
                best_b = x;
                best_d = f;
            }
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = eval(x2);
        }
        if b - a < 1e-4 {
            break;
        }
    }
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f < best_d {
            best_b = x;
            best_d = f;
        }
    }
    Ok(BetaSearch {
        beta_star: best_b,
        delta: best_d,
        scan,
    })
}
