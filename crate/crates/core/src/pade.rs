//! Padé approximants `[P/Q]` of truncated series, their poles and zeros.
//!
//! Denominators come from the `Q × Q` Toeplitz system
//! `Σ_{j=1}^{Q} c_{P+i−j} q_j = −c_{P+i}` (`i = 1..=Q`, `q_0 = 1`). Rational input
//! is solved exactly by fraction-free elimination; big-float input by
//! partially pivoted elimination at increasing precision until two successive
//! precisions agree.

use std::fmt;

use rug::{Complex, Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::{eval_with_derivative, modulus, polynomial_roots, ten_pow};
use crate::scalar::{complex_text, Scalar, DEFAULT_PREC};
use crate::series::PowerSeries;

/// Working precision for pole and zero location. Coefficients are only
/// certified to about 1e-30 relative, so more bits buy nothing.
pub const ROOT_PREC: u32 = 256;

/// Highest precision tried by the adaptive big-float solve.
pub const MAX_SOLVE_PREC: u32 = 16384;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PadeMode {
    /// Exact when every coefficient is rational, big-float otherwise.
    #[default]
    Auto,
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PadeOptions {
    pub mode: PadeMode,
    /// Precision (bits) of the float coefficients used for evaluation and root
    /// finding, and the starting precision of the adaptive float solve.
    pub prec: u32,
}

impl Default for PadeOptions {
    fn default() -> Self {
        PadeOptions {
            mode: PadeMode::Auto,
            prec: 512,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PadeApproximant {
    numerator: Vec<Scalar>,
    denominator: Vec<Scalar>,
    requested: (usize, usize),
    substitutions: Vec<(usize, usize)>,
    num_f: Vec<Float>,
    den_f: Vec<Float>,
    prec: u32,
}

/// Near-diagonal orders `(⌊m/2⌋, ⌊(m+1)/2⌋)`.
pub fn auto_orders(m: usize) -> (usize, usize) {
    (m / 2, m.div_ceil(2))
}

fn bareiss_solve(c: &[Integer], p: usize, q: usize) -> Option<Vec<Rational>> {
    let at = |k: isize| -> Integer {
        if k < 0 {
            Integer::new()
        } else {
            c[k as usize].clone()
        }
    };
    let mut a: Vec<Vec<Integer>> = (0..q)
        .map(|i| {
            let mut row: Vec<Integer> = (0..q).map(|j| at(p as isize + i as isize - j as isize)).collect();
            row.push(-at(p as isize + 1 + i as isize));
            row
        })
        .collect();
    let mut prev = Integer::from(1);
    for k in 0..q {
        let pivot = (k..q).find(|&r| a[r][k] != 0)?;
        a.swap(k, pivot);
        let (top, rest) = a.split_at_mut(k + 1);
        let rk = &top[k];
        for row in rest.iter_mut() {
            for j in k + 1..=q {
                let mut v = Integer::from(&row[j] * &rk[k]);
                v -= Integer::from(&row[k] * &rk[j]);
                v.div_exact_mut(&prev);
                row[j] = v;
            }
            row[k] = Integer::new();
        }
        prev = a[k][k].clone();
    }
    let mut x = vec![Rational::new(); q];
    for i in (0..q).rev() {
        let mut acc = Rational::from(a[i][q].clone());
        for j in i + 1..q {
            acc -= Rational::from(&a[i][j] * &x[j]);
        }
        x[i] = acc / Rational::from(a[i][i].clone());
    }
    Some(x)
}

fn float_solve(c: &[Float], p: usize, q: usize, prec: u32) -> Option<Vec<Float>> {
    let at = |k: isize| -> Float {
        if k < 0 {
            Float::new(prec)
        } else {
            Float::with_val(prec, &c[k as usize])
        }
    };
    let mut a: Vec<Vec<Float>> = (0..q)
        .map(|i| {
            let mut row: Vec<Float> = (0..q).map(|j| at(p as isize + i as isize - j as isize)).collect();
            row.push(-at(p as isize + 1 + i as isize));
            row
        })
        .collect();
    let scale = a
        .iter()
        .flat_map(|r| r[..q].iter())
        .map(|v| Float::with_val(prec, v.abs_ref()))
        .fold(Float::new(prec), |m, v| m.max(&v));
    if scale.is_zero() {
        return None;
    }
    let tiny = Float::with_val(prec, &scale * Float::with_val(prec, Float::i_exp(1, -(prec as i32 - 32))));
    for k in 0..q {
        let pivot = (k..q).max_by(|&x, &y| a[x][k].cmp_abs(&a[y][k]).unwrap_or(std::cmp::Ordering::Equal))?;
        if Float::with_val(prec, a[pivot][k].abs_ref()) <= tiny {
            return None;
        }
        a.swap(k, pivot);
        let (top, rest) = a.split_at_mut(k + 1);
        let rk = &top[k];
        for row in rest.iter_mut() {
            let f = Float::with_val(prec, &row[k] / &rk[k]);
            for j in k + 1..=q {
                row[j] -= Float::with_val(prec, &f * &rk[j]);
            }
            row[k] = Float::new(prec);
        }
    }
    let mut x = vec![Float::new(prec); q];
    for i in (0..q).rev() {
        let mut acc = a[i][q].clone();
        for j in i + 1..q {
            acc -= Float::with_val(prec, &a[i][j] * &x[j]);
        }
        x[i] = acc / &a[i][i];
    }
    Some(x)
}

fn agree(a: &[Float], b: &[Float], prec: u32) -> bool {
    let norm = b.iter().map(|v| Float::with_val(prec, v.abs_ref())).fold(Float::with_val(prec, 1), |m, v| m.max(&v));
    let tol = Float::with_val(prec, &norm * ten_pow(-30, prec));
    a.iter()
        .zip(b)
        .all(|(x, y)| Float::with_val(prec, x - y).abs() <= tol)
}

fn convolve(c: &[Scalar], q: &[Scalar], upto: usize) -> Vec<Scalar> {
    (0..=upto)
        .map(|i| {
            (0..=i.min(q.len() - 1)).fold(Scalar::zero(), |acc, j| acc.add(&c[i - j].mul(&q[j])))
        })
        .collect()
}

impl PadeApproximant {
    /// Builds from explicit numerator and denominator coefficients (`q_0` first).
    pub fn from_parts(numerator: Vec<Scalar>, denominator: Vec<Scalar>, prec: u32) -> Result<Self> {
        if numerator.is_empty() || denominator.is_empty() {
            return Err(Error::Degenerate("Padé parts must be non-empty".into()));
        }
        let requested = (numerator.len() - 1, denominator.len() - 1);
        let num_f = numerator.iter().map(|c| c.to_float(prec)).collect();
        let den_f = denominator.iter().map(|c| c.to_float(prec)).collect();
        Ok(PadeApproximant {
            numerator,
            denominator,
            requested,
            substitutions: Vec::new(),
            num_f,
            den_f,
            prec,
        })
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.numerator.len() - 1, self.denominator.len() - 1)
    }

    /// Orders originally asked for, before any degenerate-table substitution.
    pub fn requested_orders(&self) -> (usize, usize) {
        self.requested
    }

    /// `(P, Q)` pairs that were singular and skipped, in the order tried.
    pub fn substitutions(&self) -> &[(usize, usize)] {
        &self.substitutions
    }

    pub fn numerator(&self) -> &[Scalar] {
        &self.numerator
    }

    /// Denominator coefficients `q_0 = 1, q_1, …, q_Q`.
    pub fn denominator(&self) -> &[Scalar] {
        &self.denominator
    }

    pub fn numerator_float(&self) -> &[Float] {
        &self.num_f
    }

    pub fn denominator_float(&self) -> &[Float] {
        &self.den_f
    }

    pub fn is_exact(&self) -> bool {
        self.numerator.iter().chain(&self.denominator).all(|c| c.as_rational().is_some())
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Taylor coefficients `0..=n` of `P(u)/Q(u)`.
    pub fn taylor(&self, n: usize) -> Result<Vec<Scalar>> {
        let num = PowerSeries::plain(self.numerator.clone())?;
        let den = PowerSeries::plain(self.denominator.clone())?;
        let pad = |s: &PowerSeries| {
            let mut c = s.coeffs().to_vec();
            c.resize(n + 1, Scalar::zero());
            PowerSeries::plain(c)
        };
        Ok(pad(&num)?.divide(&pad(&den)?)?.coeffs().to_vec())
    }

    /// Real evaluation without the pole-proximity check.
    pub fn eval_real(&self, u: &Float) -> Float {
        let prec = self.prec.max(u.prec());
        let horner = |c: &[Float]| {
            let mut acc = Float::new(prec);
            for a in c.iter().rev() {
                acc *= u;
                acc += a;
            }
            acc
        };
        horner(&self.num_f) / horner(&self.den_f)
    }

    /// Complex evaluation without the pole-proximity check.
    pub fn eval_complex(&self, u: &Complex) -> Complex {
        let (n, d) = self.num_den(u);
        n / d
    }

    fn num_den(&self, u: &Complex) -> (Complex, Complex) {
        let prec = self.prec.max(u.prec().0);
        let horner = |c: &[Float]| {
            let mut acc = Complex::new(prec);
            for a in c.iter().rev() {
                acc *= u;
                acc += a;
            }
            acc
        };
        (horner(&self.num_f), horner(&self.den_f))
    }

    /// `P(u)/Q(u)`, refusing points where `|Q(u)| ≤ 1e−20 Σ |q_j||u|^j`.
    pub fn evaluate(&self, u: &Complex) -> Result<Complex> {
        let prec = self.prec.max(u.prec().0);
        let (n, d) = self.num_den(u);
        let r = modulus(u);
        let mut bound = Float::new(prec);
        let mut power = Float::with_val(prec, 1);
        for q in &self.den_f {
            bound += Float::with_val(prec, q.abs_ref()) * &power;
            power *= &r;
        }
        if modulus(&d) <= bound * ten_pow(-20, prec) {
            return Err(Error::PoleProximity(format!(
                "u = {} is within the pole tolerance of a denominator root",
                complex_text(u)
            )));
        }
        Ok(n / d)
    }

    /// Residue `P(u_r)/Q'(u_r)` at a simple pole.
    pub fn residue(&self, pole: &Complex) -> Complex {
        let prec = self.prec.max(pole.prec().0);
        let cn: Vec<Complex> = self.num_f.iter().map(|c| Complex::with_val(prec, c)).collect();
        let cd: Vec<Complex> = self.den_f.iter().map(|c| Complex::with_val(prec, c)).collect();
        let (p, _) = eval_with_derivative(&cn, pole);
        let (_, dq) = eval_with_derivative(&cd, pole);
        p / dq
    }

    /// `Q'(u)` at `u`.
    pub fn denominator_derivative(&self, u: &Complex) -> Complex {
        let prec = self.prec.max(u.prec().0);
        let cd: Vec<Complex> = self.den_f.iter().map(|c| Complex::with_val(prec, c)).collect();
        eval_with_derivative(&cd, u).1
    }
}

/// `[P/Q]` approximant of the stored coefficients of `s`.
pub fn pade_approx(s: &PowerSeries, p: usize, q: usize) -> Result<PadeApproximant> {
    pade_approx_with(s, p, q, PadeOptions::default())
}

pub fn pade_approx_with(s: &PowerSeries, p: usize, q: usize, opts: PadeOptions) -> Result<PadeApproximant> {
    if p + q > s.order() {
        return Err(Error::Precondition(format!(
            "[{p}/{q}] needs {} coefficients but the series has order {}",
            p + q + 1,
            s.order()
        )));
    }
    let c = &s.coeffs()[..=p + q];
    let exact = match opts.mode {
        PadeMode::Exact => {
            if !s.is_rational() {
                return Err(Error::Precondition("exact Padé needs rational coefficients".into()));
            }
            true
        }
        PadeMode::Float => false,
        PadeMode::Auto => c.iter().all(|x| x.as_rational().is_some()),
    };

    let den: Vec<Scalar> = if q == 0 {
        vec![Scalar::one()]
    } else if exact {
        let rats: Vec<&Rational> = c.iter().map(|x| x.as_rational().expect("rational")).collect();
        let mut l = Integer::from(1);
        for r in &rats {
            l.lcm_mut(r.denom());
        }
        let ints: Vec<Integer> = rats
            .iter()
            .map(|r| Integer::from(r.numer() * Integer::from(&l / r.denom())))
            .collect();
        let x = bareiss_solve(&ints, p, q).ok_or(Error::DegenerateTable { p, q })?;
        std::iter::once(Scalar::one()).chain(x.into_iter().map(Scalar::Rational)).collect()
    } else {
        let base = opts.prec.max(DEFAULT_PREC);
        let cf: Vec<Float> = c.iter().map(|x| x.to_float(x.prec().unwrap_or(base).max(base))).collect();
        let mut prec = base;
        let x = loop {
            let lo = float_solve(&cf, p, q, prec);
            let hi = float_solve(&cf, p, q, 2 * prec);
            match (lo, hi) {
                (Some(a), Some(b)) if agree(&a, &b, 2 * prec) => break b,
                _ if 2 * prec >= MAX_SOLVE_PREC => return Err(Error::DegenerateTable { p, q }),
                _ => prec *= 2,
            }
        };
        let one = Scalar::Float(Float::with_val(x[0].prec(), 1));
        std::iter::once(one).chain(x.into_iter().map(Scalar::Float)).collect()
    };

    let num = convolve(c, &den, p);
    if !exact && q > 0 {
        check_float_residual(c, &den, p, q)?;
    }
    let prec = den.iter().filter_map(Scalar::prec).max().unwrap_or(opts.prec).max(opts.prec);
    let mut out = PadeApproximant::from_parts(num, den, prec)?;
    out.requested = (p, q);
    Ok(out)
}

fn check_float_residual(c: &[Scalar], q: &[Scalar], p: usize, qn: usize) -> Result<()> {
    for n in p + 1..=p + qn {
        let mut r = Scalar::zero();
        let mut size = Scalar::zero();
        for j in 0..=qn.min(n) {
            let t = c[n - j].mul(&q[j]);
            size = size.add(&t.abs());
            r = r.add(&t);
        }
        if size.is_zero() {
            continue;
        }
        let rel = r.abs().to_f64() / size.to_f64();
        if rel.is_nan() || rel > 1e-30 {
            return Err(Error::Numeric(format!(
                "Padé matching residual {rel:e} at order {n} exceeds 1e-30"
            )));
        }
    }
    Ok(())
}

/// Near-diagonal approximant; singular tables fall back to smaller `Q`.
pub fn auto_pade(s: &PowerSeries) -> Result<PadeApproximant> {
    auto_pade_with(s, PadeOptions::default())
}

pub fn auto_pade_with(s: &PowerSeries, opts: PadeOptions) -> Result<PadeApproximant> {
    if s.order() < 1 {
        return Err(Error::Precondition("auto Padé needs order m ≥ 1".into()));
    }
    let (p, q) = auto_orders(s.order());
    pade_with_fallback(s, p, q, opts)
}

/// `[P/Q]`, decrementing `Q` on singular systems and recording each skip.
pub fn pade_with_fallback(s: &PowerSeries, p: usize, q: usize, opts: PadeOptions) -> Result<PadeApproximant> {
    let mut skipped = Vec::new();
    let mut qq = q;
    loop {
        match pade_approx_with(s, p, qq, opts) {
            Ok(mut a) => {
                a.requested = (p, q);
                a.substitutions = skipped;
                return Ok(a);
            }
            Err(Error::DegenerateTable { .. }) if qq > 0 => {
                skipped.push((p, qq));
                qq -= 1;
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoleClass {
    PhysicalNegativeReal,
    PositiveRealSpurious,
    FroissartDoublet,
    Complex,
}

impl fmt::Display for PoleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoleClass::PhysicalNegativeReal => "physical-negative-real",
            PoleClass::PositiveRealSpurious => "positive-real-spurious",
            PoleClass::FroissartDoublet => "froissart-doublet",
            PoleClass::Complex => "complex",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pole {
    pub location: Complex,
    pub residue: Complex,
    pub class: PoleClass,
    /// Index into [`PoleReport::zeros`] of the cancelling numerator zero.
    pub partner_zero: Option<usize>,
}

impl Pole {
    /// True when the pole sits on the real axis by the declared threshold.
    pub fn is_real(&self) -> bool {
        is_real(&self.location)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoleReport {
    pub poles: Vec<Pole>,
    pub zeros: Vec<Complex>,
}

/// Distance below which a numerator zero cancels a pole.
pub const FROISSART_DISTANCE: f64 = 1e-8;
/// Residue magnitude below which a pole is treated as spurious.
pub const FROISSART_RESIDUE: f64 = 1e-12;
/// Relative imaginary part below which a root counts as real.
pub const REAL_TOLERANCE: f64 = 1e-20;

fn is_real(z: &Complex) -> bool {
    let prec = z.prec().0;
    let re = Float::with_val(prec, z.real().abs_ref());
    Float::with_val(prec, z.imag().abs_ref()) < (re + 1u32) * REAL_TOLERANCE
}

impl PoleReport {
    pub fn count(&self, class: PoleClass) -> usize {
        self.poles.iter().filter(|p| p.class == class).count()
    }

    /// Real parts of poles classified as negative-real, sorted by modulus.
    pub fn negative_real(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .poles
            .iter()
            .filter(|p| p.class == PoleClass::PhysicalNegativeReal)
            .map(|p| p.location.real().to_f64())
            .collect();
        v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        v
    }

    /// Smallest-modulus genuine (non-Froissart) real pole.
    pub fn smallest_real(&self) -> Option<&Pole> {
        self.poles
            .iter()
            .filter(|p| matches!(p.class, PoleClass::PhysicalNegativeReal | PoleClass::PositiveRealSpurious))
            .min_by(|a, b| modulus(&a.location).partial_cmp(&modulus(&b.location)).unwrap_or(std::cmp::Ordering::Equal))
    }

    /// Positive real poles (any class except complex) that a Laplace contour on
    /// `[0, ∞)` meets, sorted ascending.
    pub fn on_positive_axis(&self) -> Vec<&Pole> {
        let mut v: Vec<&Pole> = self
            .poles
            .iter()
            .filter(|p| p.is_real() && p.location.real().is_sign_positive() && !p.location.real().is_zero())
            .collect();
        v.sort_by(|a, b| a.location.real().partial_cmp(b.location.real()).unwrap_or(std::cmp::Ordering::Equal));
        v
    }

    /// CSV rows `re,im,class`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,class\n");
        for p in &self.poles {
            out.push_str(&format!(
                "{:.17e},{:.17e},{}\n",
                p.location.real().to_f64(),
                p.location.imag().to_f64(),
                p.class
            ));
        }
        out
    }
}

/// Roots of the denominator with residues and classification.
pub fn find_poles(p: &PadeApproximant) -> Result<PoleReport> {
    if p.orders().1 == 0 {
        return Err(Error::Precondition("an approximant with Q = 0 has no poles".into()));
    }
    let prec = p.prec().min(ROOT_PREC);
    let poles = polynomial_roots(p.denominator_float(), prec)?;
    let zeros = if p.numerator_float().iter().skip(1).any(|c| !c.is_zero()) {
        polynomial_roots(p.numerator_float(), prec)?
    } else {
        Vec::new()
    };
    let out = poles
        .into_iter()
        .map(|loc| {
            let residue = p.residue(&loc);
            let partner = zeros
                .iter()
                .enumerate()
                .map(|(i, z)| (i, modulus(&Complex::with_val(prec, &loc - z))))
                .filter(|(_, d)| *d < FROISSART_DISTANCE)
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(i, _)| i);
            let tiny_residue = modulus(&residue) < FROISSART_RESIDUE;
            let class = if partner.is_some() || tiny_residue {
                PoleClass::FroissartDoublet
            } else if is_real(&loc) {
                if loc.real().is_sign_negative() {
                    PoleClass::PhysicalNegativeReal
                } else {
                    PoleClass::PositiveRealSpurious
                }
            } else {
                PoleClass::Complex
            };
            Pole {
                location: loc,
                residue,
                class,
                partner_zero: partner,
            }
        })
        .collect();
    Ok(PoleReport { poles: out, zeros })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_series(m: usize) -> PowerSeries {
        let mut f = Integer::from(1);
        let mut c = vec![Scalar::one()];
        for n in 1..=m {
            f *= n as u32;
            c.push(Scalar::Rational(Rational::from((Integer::from(1), f.clone()))));
        }
        PowerSeries::plain(c).unwrap()
    }

    #[test]
    fn exp_one_one() {
        let a = pade_approx(&exp_series(2), 1, 1).unwrap();
        assert_eq!(a.numerator(), &[Scalar::one(), Scalar::ratio(1, 2)]);
        assert_eq!(a.denominator(), &[Scalar::one(), Scalar::ratio(-1, 2)]);
        let at1 = a.evaluate(&Complex::with_val(256, 1)).unwrap();
        assert_eq!(at1.real().to_f64(), 3.0);
        let at0 = a.evaluate(&Complex::with_val(256, 0)).unwrap();
        assert_eq!(at0.real().to_f64(), 1.0);
        let poles = find_poles(&a).unwrap();
        assert_eq!(poles.poles.len(), 1);
        assert!((poles.poles[0].location.real().to_f64() - 2.0).abs() < 1e-60);
    }

    #[test]
    fn geometric() {
        let s = PowerSeries::from_ints(&[1, 1]);
        let a = pade_approx(&s, 0, 1).unwrap();
        assert_eq!(a.denominator(), &[Scalar::one(), Scalar::int(-1)]);
        let r = find_poles(&a).unwrap();
        assert!((r.poles[0].location.real().to_f64() - 1.0).abs() < 1e-60);
        assert!((r.poles[0].residue.real().to_f64() + 1.0).abs() < 1e-60);
        assert_eq!(r.poles[0].class, PoleClass::PositiveRealSpurious);
        assert!(matches!(a.evaluate(&Complex::with_val(256, 1)), Err(Error::PoleProximity(_))));
    }

    #[test]
    fn auto_orders_are_integer_parts() {
        assert_eq!(auto_orders(5), (2, 3));
        assert_eq!(auto_orders(4), (2, 2));
        assert_eq!(auto_orders(1), (0, 1));
    }

    #[test]
    fn singular_table_falls_back() {
        // For 1 + u², the [1/1] system reads 0·q_1 = −1.
        let s = PowerSeries::from_ints(&[1, 0, 1]);
        assert!(matches!(pade_approx(&s, 1, 1), Err(Error::DegenerateTable { p: 1, q: 1 })));
        let a = pade_with_fallback(&s, 1, 1, PadeOptions::default()).unwrap();
        assert_eq!(a.substitutions(), &[(1, 1)]);
        assert_eq!(a.orders(), (1, 0));
    }

    #[test]
    fn float_mode_matches_exact() {
        let s = exp_series(8);
        let e = pade_approx(&s, 4, 4).unwrap();
        let f = pade_approx_with(&s, 4, 4, PadeOptions { mode: PadeMode::Float, prec: 256 }).unwrap();
        assert!(!f.is_exact());
        for (a, b) in e.denominator().iter().zip(f.denominator()) {
            assert!((a.to_f64() - b.to_f64()).abs() < 1e-15);
        }
    }
}
