//! Exact-diagonalization reference values.
//!
//! The Hamiltonian of the symmetry block containing the followed state is
//! assembled in a harmonic basis of frequency `ω` (ladder basis for the
//! 1D oscillators, `l = 0` Laguerre basis for the radial one) as a banded
//! multi-precision matrix. The whole spectrum comes from a dense `f64`
//! symmetric eigensolver; the followed state is then polished by Rayleigh
//! quotient iteration in multi-precision with banded LU factorizations.

use nalgebra::{DMatrix, SymmetricEigen};
use rug::Float;
use serde::Serialize;

use crate::basis::{Sector, X2_SCALE};
use crate::error::{Error, Result};
use crate::model::Model;

/// Working precision of the polished computations.
pub const ORACLE_PREC: u32 = 192;

/// Symmetric banded matrix; `upper[i][d] = A[i][i+d]`.
#[derive(Clone, Debug)]
pub struct Band {
    n: usize,
    b: usize,
    upper: Vec<Vec<Float>>,
}

impl Band {
    fn zeros(n: usize, b: usize, prec: u32) -> Band {
        let upper = (0..n).map(|i| vec![Float::new(prec); (b + 1).min(n - i)]).collect();
        Band { n, b, upper }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.b
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Float> {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        self.upper.get(lo).and_then(|r| r.get(hi - lo))
    }

    fn prec(&self) -> u32 {
        self.upper[0][0].prec()
    }

    fn product(&self, other: &Band) -> Band {
        let prec = self.prec();
        let b = self.b + other.b;
        let mut out = Band::zeros(self.n, b, prec);
        for i in 0..self.n {
            for d in 0..=b.min(self.n - 1 - i) {
                let j = i + d;
                let lo = i.saturating_sub(self.b).max(j.saturating_sub(other.b));
                let hi = (i + self.b).min(j + other.b).min(self.n - 1);
                let mut acc = Float::new(prec);
                for k in lo..=hi {
                    if let (Some(a), Some(c)) = (self.get(i, k), other.get(k, j)) {
                        acc += Float::with_val(prec, a * c);
                    }
                }
                out.upper[i][d] = acc;
            }
        }
        out
    }

    fn truncated(&self, n: usize) -> Band {
        let upper = (0..n)
            .map(|i| self.upper[i].iter().take((self.b + 1).min(n - i)).cloned().collect())
            .collect();
        Band { n, b: self.b, upper }
    }

    fn scaled(&self, c: &Float) -> Band {
        let mut out = self.clone();
        for row in &mut out.upper {
            for x in row {
                *x *= c;
            }
        }
        out
    }

    fn add(&self, other: &Band) -> Band {
        let (big, small) = if self.b >= other.b { (self, other) } else { (other, self) };
        let mut out = big.clone();
        for (i, row) in small.upper.iter().enumerate() {
            for (d, x) in row.iter().enumerate() {
                out.upper[i][d] += x;
            }
        }
        out
    }

    fn add_diagonal(&mut self, diag: &[Float]) {
        for (i, x) in diag.iter().enumerate() {
            self.upper[i][0] += x;
        }
    }

    pub fn mul_vec(&self, x: &[Float]) -> Vec<Float> {
        let prec = self.prec();
        let mut y = vec![Float::new(prec); self.n];
        for i in 0..self.n {
            for (d, a) in self.upper[i].iter().enumerate() {
                let j = i + d;
                y[i] += Float::with_val(prec, a * &x[j]);
                if d > 0 {
                    y[j] += Float::with_val(prec, a * &x[i]);
                }
            }
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (d, a) in self.upper[i].iter().enumerate() {
                let v = a.to_f64();
                m[(i, i + d)] = v;
                m[(i + d, i)] = v;
            }
        }
        m
    }
}

/// LU factorization with partial pivoting of `A − σ I` for a symmetric band `A`.
struct BandLu {
    rows: Vec<(usize, Vec<Float>)>,
    piv: Vec<usize>,
    mult: Vec<Vec<(usize, Float)>>,
}

impl BandLu {
    fn new(a: &Band, shift: &Float) -> BandLu {
        let n = a.n;
        let prec = a.prec();
        let mut rows: Vec<(usize, Vec<Float>)> = (0..n)
            .map(|i| {
                let lo = i.saturating_sub(a.b);
                let hi = (i + a.b).min(n - 1);
                let vals = (lo..=hi)
                    .map(|j| {
                        let mut v = a.get(i, j).cloned().unwrap_or_else(|| Float::new(prec));
                        if i == j {
                            v -= shift;
                        }
                        v
                    })
                    .collect();
                (lo, vals)
            })
            .collect();
        let tiny = {
            let mut s = Float::new(prec);
            for r in &a.upper {
                for x in r {
                    s = s.max(&Float::with_val(prec, x.abs_ref()));
                }
            }
            s.max(&Float::with_val(prec, 1)) * Float::with_val(prec, Float::i_exp(1, -(prec as i32)))
        };
        let mut piv = vec![0; n];
        let mut mult = vec![Vec::new(); n];
        for k in 0..n {
            let last = (k + 2 * a.b).min(n - 1);
            let mut best = k;
            let mut best_abs = Float::new(prec);
            for (r, row) in rows.iter().enumerate().take(last + 1).skip(k) {
                if row.0 == k {
                    let v = Float::with_val(prec, row.1[0].abs_ref());
                    if v > best_abs {
                        best_abs = v;
                        best = r;
                    }
                }
            }
            rows.swap(k, best);
            piv[k] = best;
            if rows[k].1[0].is_zero() || rows[k].0 != k {
                if rows[k].0 != k {
                    rows[k].1.insert(0, Float::new(prec));
                    rows[k].0 = k;
                }
                rows[k].1[0] = tiny.clone();
            }
            let (head, tail) = rows.split_at_mut(k + 1);
            let pivot_row = &head[k];
            for (off, row) in tail.iter_mut().enumerate().take(last - k) {
                let r = k + 1 + off;
                if row.0 != k {
                    continue;
                }
                let m = Float::with_val(prec, &row.1[0] / &pivot_row.1[0]);
                let needed = pivot_row.1.len();
                while row.1.len() < needed {
                    row.1.push(Float::new(prec));
                }
                for j in 1..needed {
                    row.1[j] -= Float::with_val(prec, &m * &pivot_row.1[j]);
                }
                row.1.remove(0);
                row.0 = k + 1;
                mult[k].push((r, m));
            }
        }
        BandLu { rows, piv, mult }
    }

    fn solve(&self, rhs: &[Float]) -> Vec<Float> {
        let n = rhs.len();
        let prec = rhs[0].prec();
        let mut x: Vec<Float> = rhs.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            for (r, m) in &self.mult[k] {
                let t = Float::with_val(prec, m * &x[k]);
                x[*r] -= t;
            }
        }
        for k in (0..n).rev() {
            let (lo, row) = &self.rows[k];
            let mut acc = x[k].clone();
            for (j, a) in row.iter().enumerate().skip(1) {
                acc -= Float::with_val(prec, a * &x[lo + j]);
            }
            x[k] = acc / &row[0];
        }
        x
    }
}

fn dot(a: &[Float], b: &[Float]) -> Float {
    let prec = a[0].prec();
    let mut s = Float::new(prec);
    for (x, y) in a.iter().zip(b) {
        s += Float::with_val(prec, x * y);
    }
    s
}

fn normalize(v: &mut [Float]) {
    let n = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x /= &n;
    }
}

/// Model, parameters and the size of the symmetry block used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralProblem {
    pub model: Model,
    pub k: f64,
    pub lambda: f64,
    /// Number of basis functions in the symmetry block of the followed state.
    pub basis_size: usize,
}

impl SpectralProblem {
    pub fn new(model: Model, k: f64, lambda: f64, basis_size: usize) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Precondition(format!("k must be positive, got {k}")));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::Precondition(format!("λ must be non-negative, got {lambda}")));
        }
        if basis_size < 10 {
            return Err(Error::Precondition(format!("basis size must be at least 10, got {basis_size}")));
        }
        if model.sector().reference + 10 > basis_size {
            return Err(Error::Precondition("basis too small for the requested state".into()));
        }
        Ok(SpectralProblem {
            model,
            k,
            lambda,
            basis_size,
        })
    }

    /// Default basis sizes: 200 for quartic models, 300 for the sextic one.
    pub fn with_default_basis(model: Model, k: f64, lambda: f64) -> Result<Self> {
        let s = if model.power() == 3 { 300 } else { 200 };
        SpectralProblem::new(model, k, lambda, s)
    }

    fn with_basis(&self, basis_size: usize) -> Self {
        SpectralProblem { basis_size, ..*self }
    }
}

/// Block Hamiltonian plus the two parameter derivatives `O_1 = x²/2`, `O_2 = x^{2K}`.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    pub problem: SpectralProblem,
    pub sector: Sector,
    /// Basis frequency.
    pub omega: f64,
    pub h: Band,
    pub o1: Band,
    pub o2: Band,
    levels: Vec<Float>,
    omega_sq: Float,
}

impl Hamiltonian {
    /// `H(k', λ')` in this basis.
    pub fn shifted(&self, k: f64, lambda: f64) -> Band {
        let prec = ORACLE_PREC;
        let omega = Float::with_val(prec, self.omega_sq.sqrt_ref());
        let mut h = self.o2.scaled(&Float::with_val(prec, lambda));
        let dk = Float::with_val(prec, Float::with_val(prec, k) - &self.omega_sq);
        h = h.add(&self.o1.scaled(&dk));
        let diag: Vec<Float> = self.levels.iter().map(|l| Float::with_val(prec, l * &omega)).collect();
        h.add_diagonal(&diag);
        h
    }
}

/// Squared basis frequency `k · max(1, g)^{2/(K+1)}` with `g = λ k^{−(K+1)/2}`:
/// the harmonic frequency at weak coupling, the scale of the anharmonic term
/// at strong coupling.
pub fn basis_frequency_sq(model: &Model, k: f64, lambda: f64) -> f64 {
    let g = model.coupling(k, lambda);
    if g <= 1.0 {
        k
    } else {
        k * g.powf(2.0 / (model.power() + 1) as f64)
    }
}

/// Assembles the block containing the model's state.
pub fn build_hamiltonian(p: &SpectralProblem) -> Result<Hamiltonian> {
    let prec = ORACLE_PREC;
    let sector = p.model.sector();
    let power = p.model.power() as usize;
    let n = p.basis_size;
    let padded = n + power;
    let omega_sq = Float::with_val(prec, basis_frequency_sq(&p.model, p.k, p.lambda));
    let omega = Float::with_val(prec, omega_sq.sqrt_ref());

    // Normalized x² at frequency ω.
    let mut x = Band::zeros(padded, 1, prec);
    let scale = Float::with_val(prec, X2_SCALE);
    for l in 0..padded {
        for (t, c) in sector.x2_column(l) {
            if t == l {
                x.upper[l][0] = Float::with_val(prec, &c) / &scale / &omega;
            } else if t == l + 1 && t < padded {
                let ratio = Float::with_val(prec, &sector.norm_ratio(l)).sqrt();
                x.upper[l][1] = Float::with_val(prec, &c) * ratio / &scale / &omega;
            }
        }
    }
    let mut xk = x.clone();
    for _ in 1..power {
        xk = xk.product(&x);
    }
    let o1 = x.truncated(n).scaled(&Float::with_val(prec, 0.5));
    let o2 = xk.truncated(n);
    let levels: Vec<Float> = (0..n).map(|l| Float::with_val(prec, &sector.level(l))).collect();
    let mut ham = Hamiltonian {
        problem: *p,
        sector,
        omega: omega.to_f64(),
        h: o2.clone(),
        o1,
        o2,
        levels,
        omega_sq,
    };
    ham.h = ham.shifted(p.k, p.lambda);
    Ok(ham)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralResult {
    /// Ascending eigenvalues of the block.
    pub eigenvalues: Vec<f64>,
    /// Matching unit eigenvectors, one per eigenvalue.
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    /// `|E_N(s) − E_N(s/2)|` for the followed state.
    pub half_size_delta: Option<f64>,
}

fn dense_eigen(h: &Band) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let eig = SymmetricEigen::try_new(h.to_dense(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric(format!("symmetric eigensolver did not converge (n = {})", h.n)))?;
    let mut order: Vec<usize> = (0..h.n).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect();
    Ok((values, vectors))
}

/// Full block spectrum with a half-basis convergence check on the followed state.
pub fn eigensolve(h: &Hamiltonian) -> Result<SpectralResult> {
    let (eigenvalues, eigenvectors) = dense_eigen(&h.h)?;
    let n = h.sector.reference;
    let half = h.problem.basis_size / 2;
    let half_size_delta = if half >= 10 && n + 5 < half {
        let small = build_hamiltonian(&h.problem.with_basis(half))?;
        let (vals, _) = dense_eigen(&small.h)?;
        Some((vals[n] - eigenvalues[n]).abs())
    } else {
        None
    };
    Ok(SpectralResult {
        eigenvalues,
        eigenvectors,
        half_size_delta,
    })
}

/// A multi-precision eigenpair.
#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub energy: Float,
    pub vector: Vec<Float>,
    pub iterations: usize,
}

/// Rayleigh quotient iteration from an approximate pair.
fn polish(h: &Band, guess: &[f64]) -> Result<Eigenpair> {
    let prec = h.prec();
    let mut x: Vec<Float> = guess.iter().map(|v| Float::with_val(prec, *v)).collect();
    normalize(&mut x);
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 24));
    let mut log = Vec::new();
    for it in 0..12 {
        let hx = h.mul_vec(&x);
        let rq = dot(&x, &hx);
        let mut res = Float::new(prec);
        for (a, b) in hx.iter().zip(&x) {
            res += Float::with_val(prec, a - Float::with_val(prec, b * &rq)).square();
        }
        let res = res.sqrt();
        log.push(res.to_f64());
        let sigma = rq;
        if res <= Float::with_val(prec, &tol * (Float::with_val(prec, sigma.abs_ref()) + 1u32)) {
            return Ok(Eigenpair {
                energy: sigma,
                vector: x,
                iterations: it,
            });
        }
        let lu = BandLu::new(h, &sigma);
        let mut y = lu.solve(&x);
        normalize(&mut y);
        if dot(&y, &x) < 0 {
            for v in &mut y {
                *v = -v.clone();
            }
        }
        x = y;
    }
    Err(Error::Numeric(format!("Rayleigh quotient iteration stalled; residuals {log:?}")))
}

fn followed_state(h: &Hamiltonian, band: &Band, spectrum: &SpectralResult) -> Result<Eigenpair> {
    let n = h.sector.reference;
    let pair = polish(band, &spectrum.eigenvectors[n])?;
    if (pair.energy.to_f64() - spectrum.eigenvalues[n]).abs() > 1e-6 * (1.0 + spectrum.eigenvalues[n].abs()) {
        return Err(Error::Numeric("polished eigenvalue drifted to a different level".into()));
    }
    Ok(pair)
}

/// Polished eigenpair of the followed state.
pub fn eigenpair(p: &SpectralProblem) -> Result<Eigenpair> {
    let h = build_hamiltonian(p)?;
    let (_, vectors) = dense_eigen(&h.h)?;
    polish(&h.h, &vectors[h.sector.reference])
}

/// Energy of the followed state.
pub fn energy(p: &SpectralProblem) -> Result<f64> {
    Ok(eigenpair(p)?.energy.to_f64())
}

/// Quantum metric `[[g_kk, g_kλ], [g_λk, g_λλ]]`.
pub type Metric = [[f64; 2]; 2];

fn check_gap(spectrum: &SpectralResult, n: usize) -> Result<()> {
    let e = spectrum.eigenvalues[n];
    let gap = spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != n)
        .map(|(_, v)| (v - e).abs())
        .fold(f64::INFINITY, f64::min);
    if gap <= 1e-10 {
        return Err(Error::Degeneracy { state: n, gap });
    }
    Ok(())
}

/// Sum over the `s_truncate` lowest block states of
/// `⟨N|O_i|M⟩⟨M|O_j|N⟩ / (E_M − E_N)²`.
pub fn qmt_numeric(p: &SpectralProblem, s_truncate: usize) -> Result<Metric> {
    let h = build_hamiltonian(p)?;
    let spectrum = eigensolve(&h)?;
    let n = h.sector.reference;
    check_gap(&spectrum, n)?;
    let psi = &spectrum.eigenvectors[n];
    let o1 = h.o1.to_dense();
    let o2 = h.o2.to_dense();
    let v = nalgebra::DVector::from_column_slice(psi);
    let w1 = &o1 * &v;
    let w2 = &o2 * &v;
    let mut g = [[0.0; 2]; 2];
    for m in 0..s_truncate.min(p.basis_size) {
        if m == n {
            continue;
        }
        let phi = nalgebra::DVector::from_column_slice(&spectrum.eigenvectors[m]);
        let a = phi.dot(&w1);
        let b = phi.dot(&w2);
        let d2 = (spectrum.eigenvalues[m] - spectrum.eigenvalues[n]).powi(2);
        g[0][0] += a * a / d2;
        g[0][1] += a * b / d2;
        g[1][1] += b * b / d2;
    }
    g[1][0] = g[0][1];
    Ok(g)
}

/// The same sum over every block state, evaluated in multi-precision as
/// `⟨χ_i|χ_j⟩` with `χ_j = (H − E_N)^{-1} (1 − |N⟩⟨N|) O_j |N⟩`.
pub fn qmt_resolvent(p: &SpectralProblem) -> Result<Metric> {
    let h = build_hamiltonian(p)?;
    let (values, vectors) = dense_eigen(&h.h)?;
    let n = h.sector.reference;
    check_gap(
        &SpectralResult {
            eigenvalues: values.clone(),
            eigenvectors: Vec::new(),
            half_size_delta: None,
        },
        n,
    )?;
    let pair = polish(&h.h, &vectors[n])?;
    let psi = &pair.vector;
    let lu = BandLu::new(&h.h, &pair.energy);
    let project = |v: &mut Vec<Float>| {
        let c = dot(v, psi);
        for (x, y) in v.iter_mut().zip(psi) {
            *x -= Float::with_val(ORACLE_PREC, &c * y);
        }
    };
    let chi = |o: &Band| -> Vec<Float> {
        let mut r = o.mul_vec(psi);
        project(&mut r);
        let mut x = lu.solve(&r);
        project(&mut x);
        // one step of iterative refinement
        let hx = h.h.mul_vec(&x);
        let mut res: Vec<Float> = r
            .iter()
            .zip(hx.iter().zip(&x))
            .map(|(ri, (hi, xi))| Float::with_val(ORACLE_PREC, ri - hi) + Float::with_val(ORACLE_PREC, xi * &pair.energy))
            .collect();
        project(&mut res);
        let mut dx = lu.solve(&res);
        project(&mut dx);
        for (a, b) in x.iter_mut().zip(dx) {
            *a += b;
        }
        x
    };
    let c1 = chi(&h.o1);
    let c2 = chi(&h.o2);
    let g11 = dot(&c1, &c1).to_f64();
    let g12 = dot(&c1, &c2).to_f64();
    let g22 = dot(&c2, &c2).to_f64();
    Ok([[g11, g12], [g12, g22]])
}

/// Central differences of the followed eigenvector in a fixed basis, inserted
/// into `Re⟨∂_iψ|∂_jψ⟩ − ⟨∂_iψ|ψ⟩⟨ψ|∂_jψ⟩`. `h` is the absolute step in both
/// `k` and `λ`.
pub fn qmt_finite_difference(p: &SpectralProblem, h: f64) -> Result<Metric> {
    if !(h > 0.0 && h < p.k) {
        return Err(Error::Precondition(format!("step must lie in (0, k), got {h}")));
    }
    let ham = build_hamiltonian(p)?;
    let spectrum = eigensolve(&ham)?;
    let n = ham.sector.reference;
    check_gap(&spectrum, n)?;
    let centre = followed_state(&ham, &ham.h, &spectrum)?;
    let at = |k: f64, lambda: f64| -> Result<Vec<Float>> {
        let band = ham.shifted(k, lambda);
        let guess: Vec<f64> = centre.vector.iter().map(Float::to_f64).collect();
        let mut pair = polish(&band, &guess)?;
        let overlap = dot(&pair.vector, &centre.vector);
        if overlap.to_f64().abs() < 0.9 {
            return Err(Error::StepSize(overlap.to_f64().abs()));
        }
        if overlap < 0 {
            for v in &mut pair.vector {
                *v = -v.clone();
            }
        }
        Ok(pair.vector)
    };
    let two_h = Float::with_val(ORACLE_PREC, 2.0 * h);
    let derivative = |plus: Vec<Float>, minus: Vec<Float>| -> Vec<Float> {
        plus.into_iter().zip(minus).map(|(a, b)| (a - b) / &two_h).collect()
    };
    let dk = derivative(at(p.k + h, p.lambda)?, at(p.k - h, p.lambda)?);
    let dl = derivative(at(p.k, p.lambda + h)?, at(p.k, p.lambda - h)?);
    let psi = &centre.vector;
    let entry = |a: &[Float], b: &[Float]| {
        let v = dot(a, b) - dot(a, psi) * dot(psi, b);
        v.to_f64()
    };
    let g12 = entry(&dk, &dl);
    Ok([[entry(&dk, &dk), g12], [g12, entry(&dl, &dl)]])
}

/// Basis-size convergence of the polished energy and resolvent metric.
#[derive(Clone, Debug, Serialize)]
pub struct OracleValues {
    pub energy: f64,
    pub metric: Metric,
    pub basis_size: usize,
    /// Largest relative change against a run with 3/4 of the basis.
    pub convergence: f64,
}

/// Energy and metric of the followed state with a self-convergence estimate.
pub fn reference_values(p: &SpectralProblem) -> Result<OracleValues> {
    let e = energy(p)?;
    let g = qmt_resolvent(p)?;
    let coarse = p.with_basis(p.basis_size * 3 / 4);
    let e_c = energy(&coarse)?;
    let g_c = qmt_resolvent(&coarse)?;
    let rel = |a: f64, b: f64| ((a - b) / a).abs();
    let convergence = [rel(e, e_c), rel(g[0][0], g_c[0][0]), rel(g[0][1], g_c[0][1]), rel(g[1][1], g_c[1][1])]
        .into_iter()
        .fold(0.0, f64::max);
    Ok(OracleValues {
        energy: e,
        metric: g,
        basis_size: p.basis_size,
        convergence,
    })
}

/// Exact rational `λ = 0` closed form of the level, for checks.
pub fn harmonic_level(sector: &Sector, k: f64) -> f64 {
    sector.level(sector.reference).to_f64() * k.sqrt()
}
