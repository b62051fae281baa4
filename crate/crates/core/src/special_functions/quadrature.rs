//! Gauss-Legendre and Gauss-Jacobi rules via the Golub-Welsch eigenproblem.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

use super::gamma::{gamma_unchecked, ln_gamma};

/// Nodes and weights on the reference interval.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Integrate `f` over [lo, hi] with this rule (nodes on [-1, 1]).
    pub fn integrate(&self, lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn golub_welsch(diag: &[f64], off: &[f64], mu0: f64) -> Rule {
    let n = diag.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = off[i];
            m[(i + 1, i)] = off[i];
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

/// n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Rule {
    let diag = vec![0.0; n];
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let mut rule = golub_welsch(&diag, &off, 2.0);
    // Symmetrize to remove eigen-solver noise.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        let w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = w;
        rule.weights[j] = w;
    }
    if n % 2 == 1 {
        rule.nodes[n / 2] = 0.0;
    }
    rule
}

/// Cached 16-point Gauss-Legendre rule.
pub fn gauss_legendre_16() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// n-point Gauss-Jacobi rule on [-1, 1] for the weight (1-x)^a (1+x)^b.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Rule {
    assert!(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
    let ab = a + b;
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        let k = k as f64;
        let denom = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
        diag.push(if denom.abs() < 1e-300 { 0.0 } else { (b * b - a * a) / denom });
    }
    if n > 0 {
        diag[0] = (b - a) / (ab + 2.0);
    }
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            let s = 2.0 * k + ab;
            (4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt()
        })
        .collect();
    let mu0 = if ab + 2.0 < 150.0 {
        2f64.powf(ab + 1.0) * gamma_unchecked(a + 1.0) * gamma_unchecked(b + 1.0) / gamma_unchecked(ab + 2.0)
    } else {
        ((ab + 1.0) * 2f64.ln() + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(ab + 2.0)).exp()
    };
    golub_welsch(&diag, &off, mu0)
}

/// Rule for int_0^L w^p g(w) dw: returns (nodes in [0, L], weights including w^p).
pub fn left_weighted(n: usize, p: f64, len: f64) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_jacobi(n, 0.0, p);
    // int_0^L w^p g = (L/2)^{p+1} int_{-1}^{1} (1+x)^p g(L(1+x)/2) dx
    let scale = (0.5 * len).powf(p + 1.0);
    let nodes = rule.nodes.iter().map(|x| 0.5 * len * (1.0 + x)).collect();
    let weights = rule.weights.iter().map(|w| w * scale).collect();
    (nodes, weights)
}
