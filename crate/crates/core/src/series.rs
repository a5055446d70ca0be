//! Truncated power series with exact or big-float coefficients.
//!
//! A [`PowerSeries`] stores coefficients `c_0..=c_m` of a formal series in a
//! named expansion variable. The [`Convention`] records how the stored
//! coefficients relate to the series in the bare coupling `g`, so tabulated
//! values can be kept exactly as they are usually quoted (all positive)
//! while [`PowerSeries::to_coupling`] recovers the signed coefficients that
//! resummation works with.

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, DEFAULT_PREC};

/// Schema tag written into every serialized series.
pub const SERIES_SCHEMA: &str = "borel-qmt/series/1";

/// Relation between stored coefficients `c_n` and the coupling series `Σ f_n g^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `f_n = c_n`.
    Plain,
    /// `f_n = (-1)^n c_n`: a series in `-g`.
    Alternating,
    /// `f_0 = c_0`, `f_n = (-1)^(n+1) c_n` for `n ≥ 1` (energy tables).
    EnergyAlternating,
}

impl Convention {
    /// Sign `f_n / c_n`.
    pub fn sign(self, n: usize) -> i32 {
        match self {
            Convention::Plain => 1,
            Convention::Alternating => {
                if n % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
            Convention::EnergyAlternating => {
                if n == 0 || n % 2 == 1 {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

/// Expansion variable: a human-readable name plus the sign convention.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub convention: Convention,
}

impl Variable {
    pub fn plain(name: impl Into<String>) -> Self {
        Variable {
            name: name.into(),
            convention: Convention::Plain,
        }
    }

    pub fn new(name: impl Into<String>, convention: Convention) -> Self {
        Variable {
            name: name.into(),
            convention,
        }
    }
}

/// Factored-out prefactor `constant · k^k_power` multiplying the series.
#[derive(Clone, Debug, PartialEq)]
pub struct Prefactor {
    pub k_power: Rational,
    pub constant: Scalar,
}

impl Default for Prefactor {
    fn default() -> Self {
        Prefactor {
            k_power: Rational::new(),
            constant: Scalar::one(),
        }
    }
}

impl Prefactor {
    pub fn k_power(num: i64, den: i64) -> Self {
        Prefactor {
            k_power: Rational::from((num, den)),
            constant: Scalar::one(),
        }
    }

    /// Numeric value of the prefactor at spring constant `k`.
    pub fn value_at(&self, k: f64) -> f64 {
        self.constant.to_f64() * k.powf(self.k_power.to_f64())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Scalar>,
    variable: Variable,
    prefactor: Prefactor,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Scalar>, variable: Variable, prefactor: Prefactor) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Degenerate("a series needs at least one coefficient".into()));
        }
        Ok(PowerSeries {
            coeffs,
            variable,
            prefactor,
        })
    }

    /// Plain series in a variable called `x` with unit prefactor.
    pub fn plain(coeffs: Vec<Scalar>) -> Result<Self> {
        Self::new(coeffs, Variable::plain("x"), Prefactor::default())
    }

    pub fn from_rationals(coeffs: Vec<Rational>, variable: Variable, prefactor: Prefactor) -> Result<Self> {
        Self::new(coeffs.into_iter().map(Scalar::Rational).collect(), variable, prefactor)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::plain(coeffs.iter().map(|&c| Scalar::int(c)).collect()).expect("non-empty")
    }

    pub fn zero(order: usize, variable: Variable) -> Self {
        PowerSeries {
            coeffs: vec![Scalar::zero(); order + 1],
            variable,
            prefactor: Prefactor::default(),
        }
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Scalar {
        &self.coeffs[n]
    }

    /// Truncation order `m` (`len = m + 1`).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn variable(&self) -> &Variable {
        &self.variable
    }

    pub fn prefactor(&self) -> &Prefactor {
        &self.prefactor
    }

    pub fn with_prefactor(mut self, prefactor: Prefactor) -> Self {
        self.prefactor = prefactor;
        self
    }

    pub fn with_variable(mut self, variable: Variable) -> Self {
        self.variable = variable;
        self
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().all(|c| c.as_rational().is_some())
    }

    pub fn rationals(&self) -> Option<Vec<Rational>> {
        self.coeffs.iter().map(|c| c.as_rational().cloned()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn truncate(&self, order: usize) -> PowerSeries {
        let keep = (order + 1).min(self.coeffs.len());
        PowerSeries {
            coeffs: self.coeffs[..keep].to_vec(),
            variable: self.variable.clone(),
            prefactor: self.prefactor.clone(),
        }
    }

    fn check_compatible(&self, other: &PowerSeries) -> Result<()> {
        if self.variable != other.variable {
            return Err(Error::Convention(format!(
                "series in {:?} ({:?}) cannot be combined with series in {:?} ({:?})",
                self.variable.name, self.variable.convention, other.variable.name, other.variable.convention
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.check_compatible(other)?;
        let m = self.order().min(other.order());
        let coeffs = (0..=m).map(|n| self.coeffs[n].add(&other.coeffs[n])).collect();
        Ok(PowerSeries {
            coeffs,
            variable: self.variable.clone(),
            prefactor: self.prefactor.clone(),
        })
    }

    pub fn neg(&self) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(Scalar::neg).collect(),
            variable: self.variable.clone(),
            prefactor: self.prefactor.clone(),
        }
    }

    pub fn sub(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.add(&other.neg())
    }

    pub fn scale(&self, factor: &Scalar) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| c.mul(factor)).collect(),
            variable: self.variable.clone(),
            prefactor: self.prefactor.clone(),
        }
    }

    /// Cauchy product truncated at `min(m1, m2)`.
    pub fn multiply(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.check_compatible(other)?;
        let m = self.order().min(other.order());
        let coeffs = (0..=m)
            .map(|n| {
                (0..=n).fold(Scalar::zero(), |acc, i| {
                    acc.add(&self.coeffs[i].mul(&other.coeffs[n - i]))
                })
            })
            .collect();
        Ok(PowerSeries {
            coeffs,
            variable: self.variable.clone(),
            prefactor: self.prefactor.clone(),
        })
    }

    /// Formal quotient `self / other`; needs `other[0] ≠ 0`.
    pub fn divide(&self, other: &PowerSeries) -> Result<PowerSeries> {
        self.check_compatible(other)?;
        if other.coeffs[0].is_zero() {
            return Err(Error::Degenerate("series division by a series with vanishing constant term".into()));
        }
        let m = self.order().min(other.order());
        let mut q: Vec<Scalar> = Vec::with_capacity(m + 1);
        for n in 0..=m {
            let mut acc = self.coeffs[n].clone();
            for i in 1..=n {
                acc = acc.sub(&other.coeffs[i].mul(&q[n - i]));
            }
            q.push(acc.div(&other.coeffs[0])?);
        }
        Ok(PowerSeries {
            coeffs: q,
            variable: self.variable.clone(),
            prefactor: self.prefactor.clone(),
        })
    }

    pub fn differentiate(&self) -> Result<PowerSeries> {
        if self.order() == 0 {
            return Err(Error::Degenerate("cannot differentiate an order-0 series".into()));
        }
        let coeffs = (0..self.order())
            .map(|n| self.coeffs[n + 1].mul_int(n as i64 + 1))
            .collect();
        Ok(PowerSeries {
            coeffs,
            variable: self.variable.clone(),
            prefactor: self.prefactor.clone(),
        })
    }

    /// Formal antiderivative with zero constant term.
    pub fn integrate(&self) -> PowerSeries {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Scalar::zero());
        for (n, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.div(&Scalar::int(n as i64 + 1)).expect("non-zero divisor"));
        }
        PowerSeries {
            coeffs,
            variable: self.variable.clone(),
            prefactor: self.prefactor.clone(),
        }
    }

    /// `S_j = Σ_{n≤j} c_n x^n` for `j = 0..=m`.
    pub fn partial_sums(&self, x: &Scalar) -> Vec<Scalar> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut power = Scalar::one();
        let mut acc = Scalar::zero();
        for c in &self.coeffs {
            acc = acc.add(&c.mul(&power));
            out.push(acc.clone());
            power = power.mul(x);
        }
        out
    }

    /// Smallest `n ∈ 1..=m` minimising `|c_n x^n|` (superasymptotic truncation).
    pub fn optimal_truncation_index(&self, x: &Scalar) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::Degenerate("all-zero series has no optimal truncation".into()));
        }
        if x.is_zero() {
            return Err(Error::Precondition("optimal truncation needs |x| > 0".into()));
        }
        if self.order() == 0 {
            return Ok(0);
        }
        let mut best: Option<(usize, Scalar)> = None;
        let mut power = x.clone();
        for n in 1..=self.order() {
            let term = self.coeffs[n].mul(&power).abs();
            let better = match &best {
                None => true,
                Some((_, b)) => term.cmp_abs(b) == std::cmp::Ordering::Less,
            };
            if better {
                best = Some((n, term));
            }
            power = power.mul(x);
        }
        Ok(best.map(|(n, _)| n).unwrap_or(0))
    }

    /// Coefficients of the same function as a plain series in the bare coupling.
    pub fn to_coupling(&self) -> PowerSeries {
        let convention = self.variable.convention;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| if convention.sign(n) < 0 { c.neg() } else { c.clone() })
            .collect();
        let name = self
            .variable
            .name
            .strip_prefix('-')
            .unwrap_or(&self.variable.name)
            .to_string();
        PowerSeries {
            coeffs,
            variable: Variable::plain(name),
            prefactor: self.prefactor.clone(),
        }
    }

    /// Re-expresses a plain coupling series in the given convention.
    pub fn from_coupling(&self, convention: Convention, name: impl Into<String>) -> Result<PowerSeries> {
        if self.variable.convention != Convention::Plain {
            return Err(Error::Convention("from_coupling expects a plain series".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| if convention.sign(n) < 0 { c.neg() } else { c.clone() })
            .collect();
        Ok(PowerSeries {
            coeffs,
            variable: Variable::new(name, convention),
            prefactor: self.prefactor.clone(),
        })
    }

    /// Converts every coefficient to a big float.
    pub fn to_float(&self, prec: u32) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| Scalar::Float(c.to_float(prec))).collect(),
            variable: self.variable.clone(),
            prefactor: self.prefactor.clone(),
        }
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            schema: SERIES_SCHEMA.to_string(),
            variable: self.variable.name.clone(),
            convention: self.variable.convention,
            k_power: self.prefactor.k_power.to_string(),
            constant: self.prefactor.constant.to_text(),
            order: self.order(),
            coeffs: self.coeffs.iter().map(Scalar::to_text).collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("series serializes")
    }

    pub fn from_json(json: &SeriesJson) -> Result<PowerSeries> {
        if json.schema != SERIES_SCHEMA {
            return Err(Error::Parse(format!("unsupported series schema {:?}", json.schema)));
        }
        if json.coeffs.len() != json.order + 1 {
            return Err(Error::Parse(format!(
                "order {} does not match {} coefficients",
                json.order,
                json.coeffs.len()
            )));
        }
        let coeffs = json
            .coeffs
            .iter()
            .map(|c| Scalar::parse(c, DEFAULT_PREC))
            .collect::<Result<Vec<_>>>()?;
        let k_power = match Scalar::parse(&json.k_power, DEFAULT_PREC)? {
            Scalar::Rational(r) => r,
            Scalar::Float(_) => return Err(Error::Parse("k_power must be rational".into())),
        };
        PowerSeries::new(
            coeffs,
            Variable::new(json.variable.clone(), json.convention),
            Prefactor {
                k_power,
                constant: Scalar::parse(&json.constant, DEFAULT_PREC)?,
            },
        )
    }

    pub fn from_json_str(text: &str) -> Result<PowerSeries> {
        let json: SeriesJson = serde_json::from_str(text)?;
        Self::from_json(&json)
    }
}

/// Serialized form of a [`PowerSeries`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub schema: String,
    pub variable: String,
    pub convention: Convention,
    pub k_power: String,
    pub constant: String,
    pub order: usize,
    pub coeffs: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(c: &[i64]) -> PowerSeries {
        PowerSeries::from_ints(c)
    }

    #[test]
    fn add_is_coefficientwise() {
        let s = ints(&[1, 2]).add(&ints(&[3, 4])).unwrap();
        assert_eq!(s, ints(&[4, 6]));
        let z = PowerSeries::zero(1, Variable::plain("x"));
        assert_eq!(ints(&[1, 2]).add(&z).unwrap(), ints(&[1, 2]));
    }

    #[test]
    fn add_truncates_to_shorter_order() {
        let s = ints(&[1, 2, 3]).add(&ints(&[1])).unwrap();
        assert_eq!(s.order(), 0);
    }

    #[test]
    fn mismatched_variables_are_rejected() {
        let a = ints(&[1, 2]);
        let b = ints(&[1, 2]).with_variable(Variable::new("-g", Convention::Alternating));
        assert!(matches!(a.add(&b), Err(Error::Convention(_))));
        assert!(matches!(a.multiply(&b), Err(Error::Convention(_))));
    }

    #[test]
    fn multiply_examples() {
        let p = ints(&[1, 1, 0]).multiply(&ints(&[1, -1, 0])).unwrap();
        assert_eq!(p, ints(&[1, 0, -1]));
        let one = ints(&[1, 0, 0]);
        let s = ints(&[3, 5, 7]);
        assert_eq!(s.multiply(&one).unwrap(), s);
        let geo = ints(&[1; 6]).multiply(&ints(&[1, -1, 0, 0, 0, 0])).unwrap();
        assert_eq!(geo, ints(&[1, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn differentiate_examples() {
        assert_eq!(ints(&[1, 3, 5]).differentiate().unwrap(), ints(&[3, 10]));
        assert_eq!(ints(&[7, 0]).differentiate().unwrap(), ints(&[0]));
        assert!(matches!(ints(&[7]).differentiate(), Err(Error::Degenerate(_))));
    }

    #[test]
    fn divide_inverts_multiply() {
        let a = ints(&[2, 3, 5, 7]);
        let b = ints(&[1, -1, 4, 2]);
        let q = a.multiply(&b).unwrap().divide(&b).unwrap();
        assert_eq!(q, a);
    }

    #[test]
    fn partial_sums_examples() {
        let s = ints(&[1, 1]);
        assert_eq!(s.partial_sums(&Scalar::one()), vec![Scalar::int(1), Scalar::int(2)]);
        let t = ints(&[5, 2, 9]);
        assert!(t.partial_sums(&Scalar::zero()).iter().all(|x| *x == Scalar::int(5)));
    }

    #[test]
    fn optimal_truncation_geometric_and_factorial() {
        let geo = PowerSeries::plain(vec![Scalar::one(); 12]).unwrap();
        assert_eq!(geo.optimal_truncation_index(&Scalar::ratio(1, 2)).unwrap(), 11);

        // Brute-force minimum of n!·0.1^n over n = 1..=30: 9!/10^9 = 10!/10^10 exactly.
        let mut fact = Rational::from(1);
        let mut coeffs = vec![Scalar::one()];
        let mut best = (0usize, Rational::from(1_000_000));
        for n in 1..=30u32 {
            fact *= n;
            let term = Rational::from(&fact / Rational::from(10u32).pow_ref_u(n));
            if term < best.1 {
                best = (n as usize, term);
            }
            coeffs.push(Scalar::Rational(fact.clone()));
        }
        assert_eq!(best.0, 9);
        let s = PowerSeries::plain(coeffs).unwrap();
        assert_eq!(s.optimal_truncation_index(&Scalar::ratio(1, 10)).unwrap(), best.0);

        let zero = ints(&[0, 0, 0]);
        assert!(matches!(zero.optimal_truncation_index(&Scalar::one()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn coupling_conversion_signs() {
        let e = ints(&[1, 3, 21]).with_variable(Variable::new("-g", Convention::EnergyAlternating));
        assert_eq!(e.to_coupling().coeffs(), ints(&[1, 3, -21]).coeffs());
        let q = ints(&[1, 3, 21]).with_variable(Variable::new("-g", Convention::Alternating));
        assert_eq!(q.to_coupling().coeffs(), ints(&[1, -3, 21]).coeffs());
        let back = q.to_coupling().from_coupling(Convention::Alternating, "-g").unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn json_round_trip_keeps_metadata() {
        let s = PowerSeries::from_rationals(
            vec![Rational::from((1, 2)), Rational::from((3, 4))],
            Variable::new("-lambda/k^(3/2)", Convention::EnergyAlternating),
            Prefactor::k_power(1, 2),
        )
        .unwrap();
        let text = s.to_json_string();
        assert!(text.contains("\"3/4\""));
        assert_eq!(PowerSeries::from_json_str(&text).unwrap(), s);
    }

    trait PowU {
        fn pow_ref_u(&self, n: u32) -> Rational;
    }
    impl PowU for Rational {
        fn pow_ref_u(&self, n: u32) -> Rational {
            use rug::ops::Pow;
            Rational::from(self.pow(n))
        }
    }
}
