//! Rayleigh–Schrödinger recursion and quantum-metric assembly in a [`Sector`].
//!
//! Each order of the state is held as an integer vector over a single common
//! denominator, which keeps the recursion free of per-entry gcd work. The
//! recursion uses intermediate normalization; the metric is assembled from the
//! unnormalized state through the gauge-invariant combination
//!
//! `G_ij = ⟨V_i|V_j⟩/⟨Ψ|Ψ⟩ − ⟨V_i|Ψ⟩⟨Ψ|V_j⟩/⟨Ψ|Ψ⟩²`,
//!
//! with `V_2 = ∂_g Ψ` and `V_1 = DΨ − ((K+1)/2) g ∂_g Ψ`, the `∂_k` derivative at
//! `k = 1` obtained from the dilatation identity.

use rayon::prelude::*;
use rug::{Integer, Rational};

use crate::basis::{Column, Sector, D_SCALE, X2_SCALE};

/// One order of a state: `num[l] / den` over sector indices `l = 0..num.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVec {
    pub num: Vec<Integer>,
    pub den: Integer,
}

impl StateVec {
    fn unit(len: usize, at: usize) -> Self {
        let mut num = vec![Integer::new(); len];
        num[at] = Integer::from(1);
        StateVec {
            num,
            den: Integer::from(1),
        }
    }

    pub fn amplitude(&self, l: usize) -> Rational {
        match self.num.get(l) {
            Some(v) => Rational::from((v.clone(), self.den.clone())),
            None => Rational::new(),
        }
    }

    fn reduce(&mut self) {
        let mut g = self.den.clone();
        for v in &self.num {
            if g == 1 {
                break;
            }
            g.gcd_mut(v);
        }
        if g != 1 {
            for v in &mut self.num {
                v.div_exact_mut(&g);
            }
            self.den.div_exact_mut(&g);
        }
        if self.den < 0 {
            self.den = -std::mem::take(&mut self.den);
            for v in &mut self.num {
                *v = -std::mem::take(v);
            }
        }
    }

    /// Scales every amplitude by `c`.
    pub fn scaled(&self, c: &Rational) -> StateVec {
        let mut out = StateVec {
            num: self.num.iter().map(|v| Integer::from(v * c.numer())).collect(),
            den: Integer::from(&self.den * c.denom()),
        };
        out.reduce();
        out
    }
}

fn apply(columns: &[Column], x: &[Integer], out_len: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); out_len];
    for (l, v) in x.iter().enumerate() {
        if *v == 0 {
            continue;
        }
        for (t, c) in &columns[l] {
            out[*t] += Integer::from(c * v);
        }
    }
    out
}

/// Perturbative state `Ψ(g) = Σ_n g^n ψ_n` together with the energies `E_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSeries {
    pub sector: Sector,
    pub orders: Vec<StateVec>,
    /// Physical energy coefficients `E_n` (unit frequency, series in `g`).
    pub energies: Vec<Rational>,
}

impl StateSeries {
    /// Highest order `n` available for the state.
    pub fn order(&self) -> usize {
        self.orders.len() - 1
    }

    /// Amplitude of basis label `label` (`j` or `n`) at perturbative order `n`.
    pub fn amplitude(&self, n: usize, label: usize) -> Rational {
        match self.sector.index_of(label) {
            Some(l) => self.orders[n].amplitude(l),
            None => Rational::new(),
        }
    }

    /// Basis labels with non-zero amplitude at order `n`.
    pub fn support(&self, n: usize) -> Vec<usize> {
        self.orders[n]
            .num
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0)
            .map(|(l, _)| self.sector.label(l))
            .collect()
    }

    /// Re-gauges the state by a series `c(g)`: `Ψ → c(g) Ψ`.
    pub fn regauged(&self, c: &[Rational]) -> StateSeries {
        let len = self.orders.last().map(|v| v.num.len()).unwrap_or(0);
        let orders = (0..self.orders.len())
            .map(|n| {
                let mut acc: Vec<Rational> = vec![Rational::new(); len];
                for (i, ci) in c.iter().enumerate().take(n + 1) {
                    let v = &self.orders[n - i];
                    for (l, x) in v.num.iter().enumerate() {
                        if *x != 0 {
                            acc[l] += Rational::from((x.clone(), v.den.clone())) * ci;
                        }
                    }
                }
                rationals_to_vec(&acc)
            })
            .collect();
        StateSeries {
            sector: self.sector,
            orders,
            energies: self.energies.clone(),
        }
    }
}

fn rationals_to_vec(values: &[Rational]) -> StateVec {
    let mut den = Integer::from(1);
    for v in values {
        den.lcm_mut(v.denom());
    }
    let num = values
        .iter()
        .map(|v| Integer::from(v.numer() * Integer::from(&den / v.denom())))
        .collect();
    let mut out = StateVec { num, den };
    out.reduce();
    out
}

/// Runs the recursion to state order `m`, giving energies through order `m + 1`.
pub fn state_series(sector: Sector, m: usize) -> StateSeries {
    let l0 = sector.reference;
    let len = l0 + sector.band() * (m + 1) + 2;
    let v_cols: Vec<Column> = (0..len).map(|l| sector.potential_column(l)).collect();
    let v_scale = Integer::from(Integer::u_pow_u(X2_SCALE, sector.power));

    let mut orders = vec![StateVec::unit(len, l0)];
    let mut energies = vec![sector.level(l0)];
    for n in 1..=m + 1 {
        let prev = &orders[n - 1];
        let w = apply(&v_cols, &prev.num, len + sector.band());
        let base_den = Integer::from(&v_scale * &prev.den);
        energies.push(Rational::from((w[l0].clone(), base_den.clone())));
        if n == m + 1 {
            break;
        }

        // R = −Vψ_{n−1} + Σ_{p=1}^{n−1} E_p ψ_{n−p} over the common denominator `lcm`.
        let mut lcm = base_den.clone();
        for p in 1..n {
            if energies[p] != 0 {
                lcm.lcm_mut(&Integer::from(energies[p].denom() * &orders[n - p].den));
            }
        }
        let mut r: Vec<Integer> = {
            let f = Integer::from(&lcm / &base_den);
            w.into_iter().take(len).map(|x| -(x * &f)).collect()
        };
        for p in 1..n {
            if energies[p] == 0 {
                continue;
            }
            let src = &orders[n - p];
            let d = Integer::from(energies[p].denom() * &src.den);
            let f = Integer::from(&lcm / &d) * energies[p].numer();
            for (ri, xi) in r.iter_mut().zip(&src.num) {
                if *xi != 0 {
                    *ri += Integer::from(&f * xi);
                }
            }
        }

        let hi = (l0 + sector.band() * n).min(len - 1);
        let lo = l0.saturating_sub(sector.band() * n);
        let mut gaps = Integer::from(1);
        for l in lo..=hi {
            if l != l0 {
                gaps.lcm_mut(&Integer::from(sector.gap(l).abs()));
            }
        }
        let mut num = vec![Integer::new(); len];
        for l in lo..=hi {
            if l == l0 || r[l] == 0 {
                continue;
            }
            let f = Integer::from(&gaps / sector.gap(l));
            num[l] = Integer::from(&r[l] * &f);
        }
        let mut next = StateVec {
            num,
            den: lcm * gaps,
        };
        next.reduce();
        orders.push(next);
    }
    StateSeries {
        sector,
        orders,
        energies,
    }
}

/// Physical energy coefficients `E_0..=E_m` (series in `g` at unit frequency).
pub fn energy_coefficients(sector: Sector, m: usize) -> Vec<Rational> {
    if m == 0 {
        return vec![sector.level(sector.reference)];
    }
    let s = state_series(sector, m - 1);
    s.energies
}

/// Applies the dilatation generator to every order of the state.
pub fn dilatation_apply(state: &StateSeries) -> StateSeries {
    let sector = state.sector;
    let len = state.orders.last().map(|v| v.num.len()).unwrap_or(0) + 1;
    let cols: Vec<Column> = (0..len).map(|l| sector.dilatation_column(l)).collect();
    let orders = state
        .orders
        .iter()
        .map(|v| {
            let mut out = StateVec {
                num: apply(&cols, &v.num, len + 1),
                den: Integer::from(&v.den * D_SCALE),
            };
            out.reduce();
            out
        })
        .collect();
    StateSeries {
        sector,
        orders,
        energies: state.energies.clone(),
    }
}

/// Physical metric coefficients `G_11, G_12, G_22` (series in `g`, `k = 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct MetricCoefficients {
    pub g11: Vec<Rational>,
    pub g12: Vec<Rational>,
    pub g22: Vec<Rational>,
}

/// Integer weights proportional to the basis norms `(l|l)`.
fn integer_norms(sector: Sector, len: usize) -> Vec<Integer> {
    let norms: Vec<Rational> = (0..len).map(|l| sector.norm(l)).collect();
    let mut den = Integer::from(1);
    for h in &norms {
        den.lcm_mut(h.denom());
    }
    norms
        .iter()
        .map(|h| Integer::from(h.numer() * Integer::from(&den / h.denom())))
        .collect()
}

struct Family {
    weighted: Vec<Vec<Integer>>,
    plain: Vec<Vec<Integer>>,
    den: Vec<Integer>,
}

impl Family {
    fn new(vectors: Vec<(Vec<Integer>, Integer)>, weights: &[Integer]) -> Self {
        let mut weighted = Vec::with_capacity(vectors.len());
        let mut plain = Vec::with_capacity(vectors.len());
        let mut den = Vec::with_capacity(vectors.len());
        for (v, d) in vectors {
            weighted.push(v.iter().zip(weights).map(|(x, w)| Integer::from(x * w)).collect());
            plain.push(v);
            den.push(d);
        }
        Family { weighted, plain, den }
    }
}

fn dot(a: &Family, p: usize, b: &Family, q: usize) -> Rational {
    let mut acc = Integer::new();
    for (x, y) in a.weighted[p].iter().zip(&b.plain[q]) {
        if *x != 0 && *y != 0 {
            acc += Integer::from(x * y);
        }
    }
    Rational::from((acc, Integer::from(&a.den[p] * &b.den[q])))
}

/// Cauchy-product coefficients `Σ_{p+q=n} ⟨a_p|b_q⟩` for `n = 0..=m`.
fn overlap_series(a: &Family, b: &Family, m: usize, symmetric: bool) -> Vec<Rational> {
    (0..=m)
        .into_par_iter()
        .map(|n| {
            if symmetric {
                let mut acc = Rational::new();
                for p in 0..=n / 2 {
                    let v = dot(a, p, b, n - p);
                    if 2 * p == n {
                        acc += v;
                    } else {
                        acc += v * 2u32;
                    }
                }
                acc
            } else {
                (0..=n).map(|p| dot(a, p, b, n - p)).sum()
            }
        })
        .collect()
}

fn series_inverse(s: &[Rational]) -> Vec<Rational> {
    let mut inv: Vec<Rational> = Vec::with_capacity(s.len());
    let c0 = Rational::from(s[0].recip_ref());
    for n in 0..s.len() {
        let mut acc = if n == 0 { Rational::from(1) } else { Rational::new() };
        for i in 1..=n {
            acc -= Rational::from(&s[i] * &inv[n - i]);
        }
        inv.push(acc * &c0);
    }
    inv
}

fn series_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let m = a.len().min(b.len());
    (0..m)
        .map(|n| (0..=n).map(|i| Rational::from(&a[i] * &b[n - i])).sum())
        .collect()
}

/// Metric coefficients through order `m` from a state known through order `m + 1`.
pub fn metric_from_state(state: &StateSeries, m: usize) -> MetricCoefficients {
    assert!(state.order() > m, "metric to order m needs the state to order m + 1");
    let sector = state.sector;
    let len = state.orders.iter().map(|v| v.num.len()).max().unwrap_or(0) + 1;
    let weights = integer_norms(sector, len);
    let d_cols: Vec<Column> = (0..len).map(|l| sector.dilatation_column(l)).collect();
    let s8 = Integer::from(D_SCALE / 2 * (sector.power + 1));

    let padded = |v: &StateVec| {
        let mut x = v.num.clone();
        x.resize(len, Integer::new());
        x
    };

    let psi: Vec<(Vec<Integer>, Integer)> = (0..=m).map(|p| (padded(&state.orders[p]), state.orders[p].den.clone())).collect();
    let v2: Vec<(Vec<Integer>, Integer)> = (0..=m)
        .map(|p| {
            let x = padded(&state.orders[p + 1]).into_iter().map(|v| v * (p as u64 + 1)).collect();
            (x, state.orders[p + 1].den.clone())
        })
        .collect();
    let v1: Vec<(Vec<Integer>, Integer)> = (0..=m)
        .map(|p| {
            let x = padded(&state.orders[p]);
            let mut y = apply(&d_cols, &x, len + 1);
            y.truncate(len);
            let shift = Integer::from(&s8 * p as u64);
            for (yi, xi) in y.iter_mut().zip(&x) {
                if *xi != 0 {
                    *yi -= Integer::from(&shift * xi);
                }
            }
            (y, Integer::from(&state.orders[p].den * D_SCALE))
        })
        .collect();

    let psi = Family::new(psi, &weights);
    let v1 = Family::new(v1, &weights);
    let v2 = Family::new(v2, &weights);

    let nn = overlap_series(&psi, &psi, m, true);
    let a1 = overlap_series(&v1, &psi, m, false);
    let a2 = overlap_series(&v2, &psi, m, false);
    let t11 = overlap_series(&v1, &v1, m, true);
    let t12 = overlap_series(&v1, &v2, m, false);
    let t22 = overlap_series(&v2, &v2, m, true);

    let inv = series_inverse(&nn);
    let inv2 = series_mul(&inv, &inv);
    let combine = |t: &[Rational], x: &[Rational], y: &[Rational]| -> Vec<Rational> {
        let first = series_mul(t, &inv);
        let second = series_mul(&series_mul(x, y), &inv2);
        first.into_iter().zip(second).map(|(u, v)| u - v).collect()
    };
    MetricCoefficients {
        g11: combine(&t11, &a1, &a1),
        g12: combine(&t12, &a1, &a2),
        g22: combine(&t22, &a2, &a2),
    }
}

/// Metric coefficients through order `m` for `sector`.
pub fn metric_coefficients(sector: Sector, m: usize) -> MetricCoefficients {
    metric_from_state(&state_series(sector, m + 1), m)
}
