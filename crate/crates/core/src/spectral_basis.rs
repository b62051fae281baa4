//! Ionkin-Moiseev eigenfunctions and their bi-orthogonal adjoint system on [0, 1].
//!
//! X_0 = 2(1-x), X_1k = 4(1-x)cos(2 pi k x), X_2k = 4 sin(2 pi k x);
//! Y_0 = 1,      Y_1k = cos(2 pi k x),        Y_2k = x sin(2 pi k x).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_functions::quadrature::gauss_legendre_16;

/// Index of a basis function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", content = "k", rename_all = "lowercase")]
pub enum BasisId {
    Root,
    Cosine(usize),
    Sine(usize),
}

impl BasisId {
    pub fn validate(self) -> Result<Self> {
        match self {
            BasisId::Cosine(0) | BasisId::Sine(0) => {
                Err(Error::Domain("cosine and sine families start at k = 1".into()))
            }
            id => Ok(id),
        }
    }

    pub fn k(self) -> usize {
        match self {
            BasisId::Root => 0,
            BasisId::Cosine(k) | BasisId::Sine(k) => k,
        }
    }
}

/// lambda_k = (2 pi k)^2.
pub fn eigenvalue(k: usize) -> f64 {
    let w = 2.0 * PI * k as f64;
    w * w
}

pub fn eval_eigenfunction(id: BasisId, x: f64) -> f64 {
    match id {
        BasisId::Root => 2.0 * (1.0 - x),
        BasisId::Cosine(k) => 4.0 * (1.0 - x) * (2.0 * PI * k as f64 * x).cos(),
        BasisId::Sine(k) => 4.0 * (2.0 * PI * k as f64 * x).sin(),
    }
}

pub fn eval_adjoint(id: BasisId, x: f64) -> f64 {
    match id {
        BasisId::Root => 1.0,
        BasisId::Cosine(k) => (2.0 * PI * k as f64 * x).cos(),
        BasisId::Sine(k) => x * (2.0 * PI * k as f64 * x).sin(),
    }
}

/// Coefficients (c0, c1k, c2k), k = 1..N, in the eigenfunction system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoeffs {
    pub c0: f64,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
}

impl SpectralCoeffs {
    pub fn zeros(n: usize) -> Self {
        Self { c0: 0.0, c1: vec![0.0; n], c2: vec![0.0; n] }
    }

    pub fn n(&self) -> usize {
        self.c1.len()
    }

    pub fn get(&self, id: BasisId) -> f64 {
        match id {
            BasisId::Root => self.c0,
            BasisId::Cosine(k) => self.c1[k - 1],
            BasisId::Sine(k) => self.c2[k - 1],
        }
    }

    /// Basis ids in the canonical order root, (cosine k, sine k) for k = 1..N.
    pub fn ids(n: usize) -> impl Iterator<Item = BasisId> {
        std::iter::once(BasisId::Root).chain((1..=n).flat_map(|k| [BasisId::Cosine(k), BasisId::Sine(k)]))
    }

    pub fn validate(&self) -> Result<()> {
        if self.c1.len() != self.c2.len() || self.c1.is_empty() {
            return Err(Error::Domain(format!(
                "coefficient lists must have equal nonzero length (got {} and {})",
                self.c1.len(),
                self.c2.len()
            )));
        }
        Ok(())
    }
}

/// Composite 16-point Gauss-Legendre nodes and weights on [0, 1].
pub fn composite_nodes(panels: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre_16();
    let width = 1.0 / panels as f64;
    let mut xs = Vec::with_capacity(panels * 16);
    let mut ws = Vec::with_capacity(panels * 16);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            xs.push(mid + 0.5 * width * x);
            ws.push(0.5 * width * w);
        }
    }
    (xs, ws)
}

/// c_i = int_0^1 f(x) Y_i(x) dx by composite Gauss-Legendre with `panels` panels.
pub fn project<F: Fn(f64) -> f64 + Sync + ?Sized>(f: &F, n: usize, panels: usize) -> Result<SpectralCoeffs> {
    if n == 0 {
        return Err(Error::Domain("truncation N must be at least 1".into()));
    }
    if panels < 10 * n {
        return Err(Error::Domain(format!(
            "{panels} quadrature panels cannot resolve N = {n}; need at least {}",
            10 * n
        )));
    }
    let (xs, ws) = composite_nodes(panels);
    let fw: Vec<f64> = xs.iter().zip(&ws).map(|(&x, &w)| f(x) * w).collect();
    project_weighted(&xs, &fw, n)
}

/// Projection from precomputed products f(x_q) w_q.
pub fn project_weighted(xs: &[f64], fw: &[f64], n: usize) -> Result<SpectralCoeffs> {
    if fw.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("function values at quadrature nodes are not finite".into()));
    }
    let c0 = fw.iter().sum();
    let pairs: Vec<(f64, f64)> = (1..=n)
        .into_par_iter()
        .map(|k| {
            let w = 2.0 * PI * k as f64;
            let mut a = 0.0;
            let mut b = 0.0;
            for (&x, &v) in xs.iter().zip(fw) {
                let (s, c) = (w * x).sin_cos();
                a += v * c;
                b += v * x * s;
            }
            (a, b)
        })
        .collect();
    Ok(SpectralCoeffs { c0, c1: pairs.iter().map(|p| p.0).collect(), c2: pairs.iter().map(|p| p.1).collect() })
}

/// c0 X_0(x) + sum_k (c1k X_1k(x) + c2k X_2k(x)), summed in k order.
pub fn reconstruct(coeffs: &SpectralCoeffs, x: f64) -> f64 {
    let mut acc = coeffs.c0 * 2.0 * (1.0 - x);
    for k in 1..=coeffs.n() {
        let (s, c) = (2.0 * PI * k as f64 * x).sin_cos();
        acc += coeffs.c1[k - 1] * 4.0 * (1.0 - x) * c + coeffs.c2[k - 1] * 4.0 * s;
    }
    acc
}

/// Coefficient bounds for g with ||g^(n)||_2 = norm:
/// |g_1k| <= norm / k^n and |g_2k| <= (n + 1) norm / k^n.
pub fn decay_bound(nderiv: u32, norm: f64, k: usize) -> Result<(f64, f64)> {
    if !(1..=4).contains(&nderiv) {
        return Err(Error::Domain(format!("derivative count {nderiv} not in 1..=4")));
    }
    if k == 0 || !(norm >= 0.0) {
        return Err(Error::Domain("decay bound needs k >= 1 and a nonnegative norm".into()));
    }
    let b = norm / (k as f64).powi(nderiv as i32);
    Ok((b, (nderiv + 1) as f64 * b))
}
