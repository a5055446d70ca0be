//! Tagged numeric scalar: an exact rational or a multi-precision float.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};

/// Working precision (bits) for big-float values unless a caller asks otherwise.
pub const DEFAULT_PREC: u32 = 256;

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rational(Rational),
    Float(Float),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarKind {
    Rational,
    Float,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(Rational::new())
    }

    pub fn one() -> Self {
        Scalar::Rational(Rational::from(1))
    }

    pub fn int(n: i64) -> Self {
        Scalar::Rational(Rational::from(n))
    }

    /// `num/den` in lowest terms. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Rational(Rational::from((num, den)))
    }

    pub fn float(value: f64, prec: u32) -> Self {
        Scalar::Float(Float::with_val(prec, value))
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            Scalar::Rational(_) => ScalarKind::Rational,
            Scalar::Float(_) => ScalarKind::Float,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => *r == 0,
            Scalar::Float(f) => f.is_zero(),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    /// Precision of a float value; rationals report `None`.
    pub fn prec(&self) -> Option<u32> {
        match self {
            Scalar::Rational(_) => None,
            Scalar::Float(f) => Some(f.prec()),
        }
    }

    pub fn to_float(&self, prec: u32) -> Float {
        match self {
            Scalar::Rational(r) => Float::with_val(prec, r),
            Scalar::Float(f) => Float::with_val(prec, f),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64(),
            Scalar::Float(f) => f.to_f64(),
        }
    }

    /// Converts to a float while keeping the result tagged as a float.
    pub fn into_float(self, prec: u32) -> Scalar {
        Scalar::Float(self.to_float(prec))
    }

    fn common_prec(&self, other: &Scalar) -> u32 {
        self.prec()
            .into_iter()
            .chain(other.prec())
            .max()
            .unwrap_or(DEFAULT_PREC)
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(Rational::from(a + b)),
            _ => {
                let p = self.common_prec(other);
                Scalar::Float(self.to_float(p) + other.to_float(p))
            }
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(Rational::from(a - b)),
            _ => {
                let p = self.common_prec(other);
                Scalar::Float(self.to_float(p) - other.to_float(p))
            }
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(Rational::from(a * b)),
            _ => {
                let p = self.common_prec(other);
                Scalar::Float(self.to_float(p) * other.to_float(p))
            }
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        if other.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(Rational::from(a / b)),
            _ => {
                let p = self.common_prec(other);
                Scalar::Float(self.to_float(p) / other.to_float(p))
            }
        })
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(Rational::from(-r)),
            Scalar::Float(f) => Scalar::Float(Float::with_val(f.prec(), -f)),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(Rational::from(r.abs_ref())),
            Scalar::Float(f) => Scalar::Float(Float::with_val(f.prec(), f.abs_ref())),
        }
    }

    pub fn mul_int(&self, n: i64) -> Scalar {
        self.mul(&Scalar::int(n))
    }

    /// `self · x^n` for a scalar `x`.
    pub fn mul_pow(&self, x: &Scalar, n: u32) -> Scalar {
        match (self, x) {
            (Scalar::Rational(a), Scalar::Rational(b)) => {
                Scalar::Rational(Rational::from(a * Rational::from(b.pow(n))))
            }
            _ => {
                let p = self.common_prec(x);
                let xp = x.to_float(p).pow(n);
                Scalar::Float(self.to_float(p) * xp)
            }
        }
    }

    pub fn cmp_abs(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp_abs(b),
            _ => {
                let p = self.common_prec(other);
                self.to_float(p)
                    .cmp_abs(&other.to_float(p))
                    .unwrap_or(Ordering::Equal)
            }
        }
    }

    /// Parses `"p/q"`, `"p"` (rational) or a decimal/exponent literal (float).
    pub fn parse(text: &str, prec: u32) -> Result<Scalar> {
        let t = text.trim();
        let looks_float = t.contains(['.', 'e', 'E']) || t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("nan");
        if looks_float {
            let v = Float::parse(t).map_err(|e| Error::Parse(format!("{t:?}: {e}")))?;
            Ok(Scalar::Float(Float::with_val(prec, v)))
        } else {
            let v = Rational::parse(t).map_err(|e| Error::Parse(format!("{t:?}: {e}")))?;
            let r = Rational::from(v);
            Ok(Scalar::Rational(r))
        }
    }

    /// Stable textual form: `p/q` (or `p`) for rationals, scientific decimal for floats.
    pub fn to_text(&self) -> String {
        match self {
            Scalar::Rational(r) => r.to_string(),
            Scalar::Float(f) => float_text(f),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rational(r)
    }
}

impl From<Integer> for Scalar {
    fn from(i: Integer) -> Self {
        Scalar::Rational(Rational::from(i))
    }
}

impl From<Float> for Scalar {
    fn from(f: Float) -> Self {
        Scalar::Float(f)
    }
}

/// Decimal digits carried by a float of the given binary precision.
pub fn decimal_digits(prec: u32) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2).floor() as usize
}

pub fn float_text(f: &Float) -> String {
    f.to_string_radix(10, Some(decimal_digits(f.prec()).max(2)))
}

pub fn complex_text(z: &Complex) -> String {
    format!("{}{:+}i", z.real().to_f64(), z.imag().to_f64())
}

/// `Γ(x)` at precision `prec`; errors at the poles `x ∈ {0, -1, -2, …}`.
pub fn gamma(x: &Float, prec: u32) -> Result<Float> {
    if *x <= 0 && x.is_integer() {
        return Err(Error::Domain(format!("Γ has a pole at {}", x.to_f64())));
    }
    Ok(Float::with_val(prec, x.gamma_ref()))
}

/// Rising factorial `(x)_n = x (x+1) … (x+n-1)` over the rationals.
pub fn pochhammer(x: &Rational, n: u32) -> Rational {
    let mut acc = Rational::from(1);
    let mut term = x.clone();
    for _ in 0..n {
        acc *= &term;
        term += 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_reduced_with_positive_denominator() {
        let s = Scalar::ratio(6, -4);
        assert_eq!(s.to_text(), "-3/2");
        let r = s.as_rational().unwrap();
        assert!(*r.denom() > 0);
    }

    #[test]
    fn float_arithmetic_keeps_float_tag() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::float(0.5, 128);
        let c = a.add(&b);
        assert_eq!(c.kind(), ScalarKind::Float);
        assert_eq!(c.prec(), Some(128));
        assert!((c.to_f64() - 5.0 / 6.0).abs() < 1e-15);
        let converted = Scalar::ratio(1, 7).into_float(300);
        assert_eq!(converted.kind(), ScalarKind::Float);
        assert_eq!(converted.prec(), Some(300));
    }

    #[test]
    fn parse_round_trip() {
        let r = Scalar::parse("30885/128", DEFAULT_PREC).unwrap();
        assert_eq!(r, Scalar::ratio(30885, 128));
        assert_eq!(Scalar::parse("2", DEFAULT_PREC).unwrap().to_text(), "2");
        let f = Scalar::parse("1.25e-3", 128).unwrap();
        assert_eq!(f.kind(), ScalarKind::Float);
        assert!((f.to_f64() - 1.25e-3).abs() < 1e-18);
        let back = Scalar::parse(&f.to_text(), 128).unwrap();
        assert_eq!(back, f);
        assert!(Scalar::parse("1/0", 64).is_err() || Scalar::parse("x", 64).is_err());
    }

    #[test]
    fn gamma_poles_are_domain_errors() {
        let p = Float::with_val(64, -2);
        assert!(matches!(gamma(&p, 64), Err(Error::Domain(_))));
        let half = Float::with_val(128, 0.5);
        let g = gamma(&half, 128).unwrap();
        let sqrt_pi = Float::with_val(128, rug::float::Constant::Pi).sqrt();
        assert!(Float::with_val(128, &g - &sqrt_pi).abs() < 1e-35);
    }

    #[test]
    fn pochhammer_matches_factorial() {
        assert_eq!(pochhammer(&Rational::from(1), 5), 120);
        assert_eq!(pochhammer(&Rational::from((1, 2)), 2), Rational::from((3, 4)));
    }
}
