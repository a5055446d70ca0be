//! Simultaneous polynomial root finding (Aberth–Ehrlich) in multi-precision.

use rug::float::Constant;
use rug::ops::Pow;
use num_complex::Complex64;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::scalar::float_text;

const MAX_ITERATIONS: usize = 2000;

/// Horner evaluation of `p(z)` and `p'(z)` for ascending coefficients.
pub fn eval_with_derivative(coeffs: &[Complex], z: &Complex) -> (Complex, Complex) {
    let prec = z.prec();
    let mut p = Complex::with_val(prec, 0);
    let mut dp = Complex::with_val(prec, 0);
    for c in coeffs.iter().rev() {
        dp *= z;
        dp += &p;
        p *= z;
        p += c;
    }
    (p, dp)
}

/// Initial guesses spread over circles whose radii come from the upper convex
/// hull of `(i, log|a_i|)` (the Newton polygon).
fn initial_guesses(coeffs: &[Complex], prec: u32) -> Vec<Complex> {
    let n = coeffs.len() - 1;
    let logs: Vec<f64> = coeffs
        .iter()
        .map(|c| {
            let a = Float::with_val(prec, c.abs_ref());
            if a.is_zero() {
                f64::NEG_INFINITY
            } else {
                a.ln().to_f64()
            }
        })
        .collect();
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..=n {
        if logs[i] == f64::NEG_INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b as f64 - a as f64) * (logs[i] - logs[a]) - (logs[b] - logs[a]) * (i as f64 - a as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i, k) = (w[0], w[1]);
        let count = k - i;
        let radius = ((logs[i] - logs[k]) / count as f64).exp();
        for j in 0..count {
            let angle = Float::with_val(prec, &two_pi * (j as f64 / count as f64)) + Float::with_val(prec, 0.4 + 0.7 * out.len() as f64 / n as f64);
            let re = Float::with_val(prec, angle.cos_ref()) * radius;
            let im = Float::with_val(prec, angle.sin_ref()) * radius;
            out.push(Complex::with_val(prec, (re, im)));
        }
    }
    out
}

fn aberth(coeffs: &[Complex], roots: &mut [Complex], prec: u32, tol_bits: i32) -> bool {
    let n = roots.len();
    let mut converged = vec![false; n];
    let eps = Float::with_val(prec, Float::i_exp(1, -tol_bits));
    // A root is also accepted once |p(z)| is at the rounding level of the
    // evaluation, i.e. z is an exact root of a nearby polynomial.
    let noise = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 2)) * (4 * (n + 1)) as u32;
    let moduli: Vec<Float> = coeffs.iter().map(|c| Float::with_val(prec, c.abs_ref())).collect();
    for _ in 0..MAX_ITERATIONS {
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (p, dp) = eval_with_derivative(coeffs, &roots[i]);
            let r = modulus(&roots[i]);
            let mut bound = Float::new(prec);
            for m in moduli.iter().rev() {
                bound *= &r;
                bound += m;
            }
            if modulus(&p) <= Float::with_val(prec, &bound * &noise) {
                converged[i] = true;
                continue;
            }
            let w = Complex::with_val(prec, &p / &dp);
            let mut s = Complex::with_val(prec, 0);
            for (j, r) in roots.iter().enumerate() {
                if j != i {
                    let d = Complex::with_val(prec, &roots[i] - r);
                    s += d.recip();
                }
            }
            let denom = Complex::with_val(prec, 1) - Complex::with_val(prec, &w * &s);
            let step = Complex::with_val(prec, &w / &denom);
            if !step.real().is_finite() || !step.imag().is_finite() {
                continue;
            }
            let size = modulus(&step);
            let scale = r.max(&Float::with_val(prec, 1e-30));
            roots[i] -= &step;
            if size <= Float::with_val(prec, &eps * &scale) {
                converged[i] = true;
            }
        }
        if converged.iter().all(|c| *c) {
            return true;
        }
    }
    false
}

/// Double-precision Aberth sweep used to seed the multi-precision phase.
/// Returns `None` when the coefficients or iterates leave the `f64` range.
fn aberth_f64(coeffs: &[f64], guesses: &[Complex]) -> Option<Vec<Complex64>> {
    let n = guesses.len();
    let mut z: Vec<Complex64> = guesses
        .iter()
        .map(|g| Complex64::new(g.real().to_f64(), g.imag().to_f64()))
        .collect();
    if z.iter().any(|r| !r.is_finite()) {
        return None;
    }
    let moduli: Vec<f64> = coeffs.iter().map(|c| c.abs()).collect();
    let noise = 4.0 * (n + 1) as f64 * f64::EPSILON;
    let mut done = vec![false; n];
    for _ in 0..500 {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (mut p, mut dp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            let mut bound = 0.0;
            let r = z[i].norm();
            for (c, m) in coeffs.iter().zip(&moduli).rev() {
                dp = dp * z[i] + p;
                p = p * z[i] + c;
                bound = bound * r + m;
            }
            if !p.is_finite() || !dp.is_finite() || !bound.is_finite() {
                return None;
            }
            if p.norm() <= noise * bound {
                done[i] = true;
                continue;
            }
            let w = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = w / (1.0 - w * s);
            if !step.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= 1e-14 * r.max(1e-300) {
                done[i] = true;
            }
        }
        if done.iter().all(|d| *d) {
            break;
        }
    }
    Some(z)
}

/// All complex roots of `Σ a_i z^i` (ascending, real coefficients) at precision `prec`.
///
/// Trailing zero coefficients are dropped; roots at the origin are returned
/// exactly for leading zero coefficients.
pub fn polynomial_roots(coeffs: &[Float], prec: u32) -> Result<Vec<Complex>> {
    let mut hi = coeffs.len();
    while hi > 0 && coeffs[hi - 1].is_zero() {
        hi -= 1;
    }
    if hi == 0 {
        return Err(Error::Degenerate("zero polynomial has no well-defined roots".into()));
    }
    let mut lo = 0;
    while coeffs[lo].is_zero() {
        lo += 1;
    }
    let mut roots: Vec<Complex> = (0..lo).map(|_| Complex::with_val(prec, 0)).collect();
    let trimmed = &coeffs[lo..hi];
    if trimmed.len() <= 1 {
        return Ok(roots);
    }

    let coarse = 128.min(prec);
    let cc: Vec<Complex> = trimmed.iter().map(|c| Complex::with_val(coarse, c)).collect();
    let mut z = initial_guesses(&cc, coarse);
    let doubles: Vec<f64> = trimmed.iter().map(Float::to_f64).collect();
    let seeded = if doubles.iter().all(|c| c.is_finite()) { aberth_f64(&doubles, &z) } else { None };
    match seeded {
        Some(s) if distinct(&s) => {
            z = s.iter().map(|r| Complex::with_val(coarse, (r.re, r.im))).collect();
        }
        _ => {
            aberth(&cc, &mut z, coarse, coarse as i32 - 16);
        }
    }

    let fc: Vec<Complex> = trimmed.iter().map(|c| Complex::with_val(prec, c)).collect();
    let mut zf: Vec<Complex> = z.iter().map(|r| Complex::with_val(prec, r)).collect();
    if !aberth(&fc, &mut zf, prec, prec as i32 - 24) {
        return Err(Error::RootFinding {
            iterations: MAX_ITERATIONS,
            coeffs: trimmed.iter().map(float_text).collect(),
        });
    }
    roots.extend(zf);
    Ok(roots)
}

fn distinct(z: &[Complex64]) -> bool {
    z.iter().enumerate().all(|(i, a)| z[..i].iter().all(|b| a != b))
}

/// `|z|` as a float at the precision of `z`.
pub fn modulus(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// `10^e` at the given precision.
pub fn ten_pow(e: i32, prec: u32) -> Float {
    Float::with_val(prec, 10).pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: f64) -> Float {
        Float::with_val(256, v)
    }

    #[test]
    fn quadratic_roots() {
        // (z - 2)(z + 3) = z² + z − 6
        let mut r = polynomial_roots(&[f(-6.0), f(1.0), f(1.0)], 256).unwrap();
        r.sort_by(|a, b| a.real().partial_cmp(b.real()).unwrap());
        assert!((r[0].real().to_f64() + 3.0).abs() < 1e-60);
        assert!((r[1].real().to_f64() - 2.0).abs() < 1e-60);
    }

    #[test]
    fn complex_pair_and_zero_root() {
        // z (z² + 1)
        let r = polynomial_roots(&[f(0.0), f(1.0), f(0.0), f(1.0)], 256).unwrap();
        assert_eq!(r.len(), 3);
        let ims: Vec<f64> = r.iter().map(|z| z.imag().to_f64()).collect();
        assert!(ims.iter().any(|v| (v - 1.0).abs() < 1e-50));
        assert!(ims.iter().any(|v| (v + 1.0).abs() < 1e-50));
    }

    #[test]
    fn widely_spread_roots() {
        // Π (z − 10^k), k = −6..6
        let mut c = vec![Float::with_val(512, 1)];
        for k in -6..=6 {
            let root = ten_pow(k, 512);
            let mut next = vec![Float::with_val(512, 0); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= Float::with_val(512, a * &root);
            }
            c = next;
        }
        let r = polynomial_roots(&c, 512).unwrap();
        for k in -6..=6 {
            let target = ten_pow(k, 512);
            assert!(r.iter().any(|z| {
                let d = Complex::with_val(512, z - &target);
                modulus(&d) < Float::with_val(512, &target * 1e-100)
            }));
        }
    }
}
