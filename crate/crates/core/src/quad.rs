//! Adaptive Gauss–Legendre quadrature in multi-precision arithmetic.
//!
//! Integrands map a real abscissa to a complex value so the same driver serves
//! real Laplace integrals and integrals along rotated rays.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::{Complex, Float};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct Rule {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut p0 = Float::with_val(prec, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let mut p2 = Float::with_val(prec, x * &p1) * (2 * k - 1) as u32;
        p2 -= Float::with_val(prec, &p0 * (k - 1) as u32);
        p2 /= k as u32;
        p0 = p1;
        p1 = p2;
    }
    // P'_n(x) = n (x P_n − P_{n−1}) / (x² − 1)
    let mut d = Float::with_val(prec, x * &p1) - &p0;
    d *= n as u32;
    d /= Float::with_val(prec, x.square_ref()) - 1u32;
    (p1, d)
}

fn compute_rule(n: usize, prec: u32) -> Rule {
    let work = prec + 32;
    let pi = Float::with_val(work, Constant::Pi);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let tol = Float::with_val(work, Float::i_exp(1, -(prec as i32) - 8));
    for i in 0..n {
        let guess = Float::with_val(work, &pi * ((i as f64 + 0.75) / (n as f64 + 0.5)));
        let mut x = guess.cos();
        for _ in 0..200 {
            let (p, d) = legendre(n, &x);
            let step = p / &d;
            x -= &step;
            if step.abs() < tol {
                break;
            }
        }
        let (_, d) = legendre(n, &x);
        let w = Float::with_val(work, 2u32) / ((1u32 - Float::with_val(work, x.square_ref())) * d.square());
        nodes.push(Float::with_val(prec, &x));
        weights.push(Float::with_val(prec, &w));
    }
    Rule { nodes, weights }
}

/// Cached `n`-point rule at `prec` bits.
pub fn gauss_legendre(n: usize, prec: u32) -> Arc<Rule> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<Rule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache").get(&(n, prec)) {
        return r.clone();
    }
    let rule = Arc::new(compute_rule(n, prec));
    cache.lock().expect("rule cache").insert((n, prec), rule.clone());
    rule
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    /// Points per panel.
    pub order: usize,
    /// Working precision in bits.
    pub prec: u32,
    /// Bisection depth limit per initial panel.
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            order: 20,
            prec: 256,
            max_depth: 60,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Complex,
    /// Sum of the accepted refinement deltas.
    pub error: Float,
    pub evaluations: usize,
    pub panels: usize,
}

struct Acc {
    value: Complex,
    error: Float,
    evaluations: usize,
    panels: usize,
}

fn panel<F: Fn(&Float) -> Complex>(f: &F, rule: &Rule, a: &Float, b: &Float, prec: u32) -> Complex {
    let half = Float::with_val(prec, b - a) / 2u32;
    let mid = Float::with_val(prec, a + b) / 2u32;
    let mut sum = Complex::new(prec);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let t = Float::with_val(prec, x * &half) + &mid;
        sum += f(&t) * w;
    }
    sum * half
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(&Float) -> Complex>(
    f: &F,
    rule: &Rule,
    a: &Float,
    b: &Float,
    whole: Complex,
    tol: &Float,
    depth: u32,
    opts: &QuadOptions,
    acc: &mut Acc,
) {
    let prec = opts.prec;
    let mid = Float::with_val(prec, a + b) / 2u32;
    let left = panel(f, rule, a, &mid, prec);
    let right = panel(f, rule, &mid, b, prec);
    acc.evaluations += 2 * rule.nodes.len();
    let halves = Complex::with_val(prec, &left + &right);
    let delta = Float::with_val(prec, Complex::with_val(prec, &halves - &whole).abs_ref());
    if delta <= *tol || depth >= opts.max_depth {
        acc.value += halves;
        acc.error += delta;
        acc.panels += 2;
        return;
    }
    let half_tol = Float::with_val(prec, tol / 2u32);
    refine(f, rule, a, &mid, left, &half_tol, depth + 1, opts, acc);
    refine(f, rule, &mid, b, right, &half_tol, depth + 1, opts, acc);
}

/// `∫ f` over consecutive intervals `[breaks[i], breaks[i+1]]`.
///
/// Each interval is bisected until the `n`-point result and the sum over its
/// halves differ by at most its share of `tol` (absolute), proportional to
/// width.
pub fn integrate<F: Fn(&Float) -> Complex>(f: &F, breaks: &[Float], tol: &Float, opts: &QuadOptions) -> QuadResult {
    let prec = opts.prec;
    let rule = gauss_legendre(opts.order, prec);
    let mut acc = Acc {
        value: Complex::new(prec),
        error: Float::new(prec),
        evaluations: 0,
        panels: 0,
    };
    if breaks.len() >= 2 {
        let total = Float::with_val(prec, &breaks[breaks.len() - 1] - &breaks[0]);
        for w in breaks.windows(2) {
            let width = Float::with_val(prec, &w[1] - &w[0]);
            if width.is_zero() {
                continue;
            }
            let share = Float::with_val(prec, tol * &width) / &total;
            let whole = panel(f, &rule, &w[0], &w[1], prec);
            acc.evaluations += rule.nodes.len();
            refine(f, &rule, &w[0], &w[1], whole, &share, 0, opts, &mut acc);
        }
    }
    QuadResult {
        value: acc.value,
        error: acc.error,
        evaluations: acc.evaluations,
        panels: acc.panels,
    }
}
