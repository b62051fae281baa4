//! Riemann-Liouville integrals and derivatives and the Dzherbashian-Nersesian
//! operator on uniform grids.
//!
//! Integrals act on the piecewise-linear interpolant of the samples
//! (product-trapezoidal rule for J^a). Derivative stages differentiate the
//! interpolant that is linear on the first cell and quadratic through three
//! nodes on later cells, and the next integral stage is applied to that
//! piecewise-linear derivative exactly. The last stage is the L1-2 scheme,
//! which reduces to BDF2 when the final order is 1.
//!
//! Inputs may carry a known power singularity, f(t) = t^(-gamma) g(t) with
//! gamma in [0, 1) and g bounded. The term g(0) t^(-gamma) is then handled by
//! the exact monomial rule and only the continuous remainder is sampled.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_functions::gamma::{gamma_unchecked, rgamma};
use crate::toeplitz::Toeplitz;

/// A function of time that the operators can sample.
pub trait TimeFunction: Sync {
    fn value(&self, t: f64) -> f64;

    /// Exponent gamma of a leading t^(-gamma) factor, 0 for bounded inputs.
    fn singular_exponent(&self) -> f64 {
        0.0
    }

    /// t^gamma f(t); must stay bounded as t -> 0+.
    fn regular_part(&self, t: f64) -> f64 {
        self.value(t)
    }
}

impl<F: Fn(f64) -> f64 + Sync> TimeFunction for F {
    fn value(&self, t: f64) -> f64 {
        self(t)
    }
}

/// t^(-gamma) g(t) with a bounded g.
#[derive(Debug, Clone)]
pub struct PowerWeighted<G> {
    pub gamma: f64,
    pub regular: G,
}

impl<G: TimeFunction> TimeFunction for PowerWeighted<G> {
    fn value(&self, t: f64) -> f64 {
        t.powf(-self.gamma) * self.regular.value(t)
    }

    fn singular_exponent(&self) -> f64 {
        self.gamma
    }

    fn regular_part(&self, t: f64) -> f64 {
        self.regular.value(t)
    }
}

/// Orders (alpha_0, ..., alpha_m) of the DN operator
/// J^(1-alpha_m) D^(alpha_{m-1}) ... D^(alpha_0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DNMultiOrder {
    alphas: Vec<f64>,
}

impl DNMultiOrder {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.len() < 2 {
            return Err(Error::Domain("DN operator needs at least two orders (m >= 1)".into()));
        }
        for (j, &a) in alphas.iter().enumerate() {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::Domain(format!("DN order alpha_{j} = {a} not in (0, 1]")));
            }
        }
        let order = Self { alphas };
        let rho = order.rho(order.m());
        if !(rho > 0.0) {
            return Err(Error::Domain(format!("DN operator order rho_m = {rho} must be positive")));
        }
        Ok(order)
    }

    /// The m = 1 operator J^(1-alpha1) D^(alpha0).
    pub fn pair(alpha0: f64, alpha1: f64) -> Result<Self> {
        Self::new(vec![alpha0, alpha1])
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn m(&self) -> usize {
        self.alphas.len() - 1
    }

    /// rho_k = alpha_0 + ... + alpha_k - 1.
    pub fn rho(&self, k: usize) -> f64 {
        self.alphas[..=k].iter().sum::<f64>() - 1.0
    }
}

/// Samples on strictly increasing nodes, read back by monotone cubic
/// (Fritsch-Carlson) interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl SampledFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::Domain(format!(
                "sampled function has {} nodes but {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.len() < 3 {
            return Err(Error::Domain("sampled function needs at least 3 nodes".into()));
        }
        if !(nodes[0] >= 0.0) {
            return Err(Error::Domain(format!("first node {} is negative", nodes[0])));
        }
        if let Some(i) = nodes.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Domain(format!("nodes not strictly increasing at index {}", i + 1)));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("sampled values must be finite".into()));
        }
        let slopes = pchip_slopes(&nodes, &values);
        Ok(Self { nodes, values, slopes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Interpolated value; outside the node hull the end cubic is continued.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.nodes.len();
        let i = match self.nodes.partition_point(|&x| x <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let h = x1 - x0;
        let s = (t - x0) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    }
}

impl TimeFunction for SampledFunction {
    fn value(&self, t: f64) -> f64 {
        self.eval(t)
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = pchip_end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = pchip_end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn pchip_end(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

/// Exact Riemann-Liouville monomial rule.
///
/// `derivative = false`: J^alpha t^mu = c t^(mu+alpha);
/// `derivative = true`: D^alpha t^mu = c t^(mu-alpha), with c = 0 whenever
/// mu - alpha + 1 is a pole of Gamma.
pub fn rl_monomial(alpha: f64, mu: f64, derivative: bool) -> Result<(f64, f64)> {
    if !(mu > -1.0) {
        return Err(Error::Domain(format!("monomial exponent mu = {mu} must exceed -1")));
    }
    if derivative {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("derivative order {alpha} not in (0, 1)")));
        }
        Ok((gamma_unchecked(mu + 1.0) * rgamma(mu - alpha + 1.0), mu - alpha))
    } else {
        if !(alpha >= 0.0) {
            return Err(Error::Domain(format!("integral order {alpha} must be nonnegative")));
        }
        Ok((gamma_unchecked(mu + 1.0) * rgamma(mu + alpha + 1.0), mu + alpha))
    }
}

/// Samples of a (possibly weighted) input on the uniform grid t_j = j h.
///
/// Returns the exponent gamma, the coefficient c0 = g(0) of the singular
/// monomial c0 t^(-gamma) and the continuous remainder at the nodes. For a
/// bounded input, c0 = 0 and the remainder is the function itself.
#[derive(Debug, Clone)]
pub struct GridSamples {
    pub h: f64,
    pub gamma: f64,
    pub c0: f64,
    pub rest: Vec<f64>,
}

impl GridSamples {
    pub fn from_function<F: TimeFunction + ?Sized>(f: &F, t: f64, steps: usize) -> Result<Self> {
        check_time(t, steps)?;
        let h = t / steps as f64;
        let gamma = f.singular_exponent();
        let nodes = (0..=steps).map(|j| j as f64 * h);
        if gamma == 0.0 {
            return Ok(Self { h, gamma, c0: 0.0, rest: nodes.map(|s| f.value(s)).collect() });
        }
        let g: Vec<f64> = nodes.map(|s| f.regular_part(s)).collect();
        Self::from_weighted(gamma, &g, h)
    }

    /// Input t^(-gamma) g(t) given the samples g_j = g(j h), j = 0..=n.
    pub fn from_weighted(gamma: f64, g: &[f64], h: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::Domain(format!("singular exponent {gamma} not in [0, 1)")));
        }
        if g.len() < 2 {
            return Err(Error::Domain("need at least one grid interval".into()));
        }
        if gamma == 0.0 {
            return Ok(Self { h, gamma, c0: 0.0, rest: g.to_vec() });
        }
        let c0 = g[0];
        let rest = g
            .iter()
            .enumerate()
            .map(|(j, &v)| if j == 0 { 0.0 } else { (j as f64 * h).powf(-gamma) * (v - c0) })
            .collect();
        Ok(Self { h, gamma, c0, rest })
    }

    pub fn steps(&self) -> usize {
        self.rest.len() - 1
    }
}

fn check_time(t: f64, steps: usize) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("evaluation time t = {t} must be positive")));
    }
    if steps == 0 {
        return Err(Error::Domain("steps must be positive".into()));
    }
    Ok(())
}

/// k^p with the convention 0^p = 0 (also for p = 0).
fn pw(k: usize, p: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        (k as f64).powf(p)
    }
}

/// Product-trapezoidal J^alpha of the samples, at every node.
fn rl_integral_samples(alpha: f64, s: &GridSamples) -> Vec<f64> {
    let n = s.steps();
    let h = s.h;
    if alpha == 0.0 {
        // Identity: reassemble the input values.
        return (0..=n)
            .map(|j| s.rest[j] + if s.c0 == 0.0 { 0.0 } else { s.c0 * (j as f64 * h).powf(-s.gamma) })
            .collect();
    }
    let ap1 = alpha + 1.0;
    // a_k = (k+1)^{a+1} - 2 k^{a+1} + (k-1)^{a+1}, k >= 1
    let mut a = vec![1.0; n + 1];
    for (k, ak) in a.iter_mut().enumerate().skip(1) {
        *ak = pw(k + 1, ap1) - 2.0 * pw(k, ap1) + pw(k - 1, ap1);
    }
    let mut x = s.rest.clone();
    x[0] = 0.0;
    let mut out = Toeplitz::new(a).apply(&x);
    let scale = h.powf(alpha) * rgamma(alpha + 2.0);
    out[0] = 0.0;
    for (m, o) in out.iter_mut().enumerate().skip(1) {
        let mf = m as f64;
        *o = scale * (*o + (pw(m - 1, ap1) - (mf - alpha - 1.0) * mf.powf(alpha)) * s.rest[0]);
    }
    if s.c0 != 0.0 {
        let (c, e) = power_integral(alpha, s.gamma);
        for (m, o) in out.iter_mut().enumerate() {
            let t = m as f64 * h;
            *o += s.c0 * c * if m == 0 { limit_at_zero(e) } else { t.powf(e) };
        }
    }
    out
}

/// J^alpha t^(-gamma) = c t^e.
fn power_integral(alpha: f64, gamma: f64) -> (f64, f64) {
    (gamma_unchecked(1.0 - gamma) * rgamma(1.0 - gamma + alpha), alpha - gamma)
}

fn limit_at_zero(e: f64) -> f64 {
    if e > 0.0 {
        0.0
    } else if e == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Derivative of the interpolant of `v`: linear on cell 0, quadratic through
/// three nodes on later cells. On cell j it is slope_j + curv_j (t - t_{j+1/2}).
struct Pieces {
    slope: Vec<f64>,
    curv: Vec<f64>,
}

fn differentiate(v: &[f64], h: f64) -> Pieces {
    let slope = v.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    let mut curv = vec![0.0; v.len() - 1];
    for (j, c) in curv.iter_mut().enumerate().skip(1) {
        *c = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h * h);
    }
    Pieces { slope, curv }
}

/// J^beta of the piecewise-linear derivative, exactly, at every node.
fn integrate_pieces(beta: f64, p: &Pieces, h: f64) -> Vec<f64> {
    let n = p.slope.len();
    let mut out = vec![0.0; n + 1];
    if beta == 0.0 {
        // Identity; the node value is the left limit on the cell before it.
        for (o, (s, c)) in out[1..].iter_mut().zip(p.slope.iter().zip(&p.curv)) {
            *o = s + 0.5 * h * c;
        }
        out[0] = f64::NAN;
        return out;
    }
    let w1: Vec<f64> = (0..n).map(|k| pw(k + 1, beta) - pw(k, beta)).collect();
    let bp1 = beta + 1.0;
    let w2: Vec<f64> = (0..n)
        .map(|k| {
            let kf = k as f64;
            (kf + 0.5) * (pw(k + 1, beta) - pw(k, beta)) / beta - (pw(k + 1, bp1) - pw(k, bp1)) / bp1
        })
        .collect();
    let a = Toeplitz::new(w1).apply(&p.slope);
    let b = Toeplitz::new(w2).apply(&p.curv);
    let s1 = h.powf(beta) * rgamma(beta + 1.0);
    let s2 = h.powf(bp1) * rgamma(beta);
    for m in 1..=n {
        out[m] = s1 * a[m - 1] + s2 * b[m - 1];
    }
    out
}

/// J^alpha f(t) by the product-trapezoidal rule on `steps` intervals.
pub fn rl_integral<F: TimeFunction + ?Sized>(alpha: f64, f: &F, t: f64, steps: usize) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("integral order {alpha} must be positive")));
    }
    let s = GridSamples::from_function(f, t, steps)?;
    Ok(*rl_integral_samples(alpha, &s).last().unwrap())
}

/// J^alpha of grid samples, returned at every node.
pub fn rl_integral_on_grid(alpha: f64, samples: &GridSamples) -> Vec<f64> {
    rl_integral_samples(alpha, samples)
}

/// Riemann-Liouville derivative D^alpha f(t) = d/dt J^(1-alpha) f(t) by the
/// L1-2 scheme plus the exact contribution of f(0).
pub fn rl_derivative<F: TimeFunction + ?Sized>(alpha: f64, f: &F, t: f64, steps: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("derivative order {alpha} not in (0, 1)")));
    }
    let s = GridSamples::from_function(f, t, steps)?;
    let pieces = differentiate(&s.rest, s.h);
    let mut d = *integrate_pieces(1.0 - alpha, &pieces, s.h).last().unwrap();
    // Contribution of the jump of the interpolant at t = 0.
    d += s.rest[0] * t.powf(-alpha) * rgamma(1.0 - alpha);
    if s.c0 != 0.0 {
        let (c, e) = rl_monomial(alpha, -s.gamma, true)?;
        d += s.c0 * c * t.powf(e);
    }
    Ok(d)
}

/// Stages of the DN cascade: V_0 = J^(1-alpha_0) f, then
/// V_k = J^(1-alpha_k + extra_k) V_{k-1}' where only the last stage
/// receives `extra`.
fn dn_cascade(order: &DNMultiOrder, s: &GridSamples, extra: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let alphas = order.alphas();
    let gamma = s.gamma;
    let first = 1.0 - alphas[0];
    if s.c0 != 0.0 && first < gamma {
        return Err(Error::Domain(format!("J^{first} of a t^-{gamma} singularity is unbounded at 0; DN is undefined")));
    }
    let mut v = rl_integral_samples(first, s);
    if first == 0.0 {
        v[0] = s.rest[0];
    }
    let v0 = v.clone();
    let m = order.m();
    for (k, &a) in alphas.iter().enumerate().skip(1) {
        let beta = 1.0 - a + if k == m { extra } else { 0.0 };
        let pieces = differentiate(&v, s.h);
        v = integrate_pieces(beta, &pieces, s.h);
        if k < m {
            // Intermediate stages start from zero: with bounded V_{k-1} the
            // next integral vanishes at t = 0.
            v[0] = if beta == 0.0 { pieces.slope[0] } else { 0.0 };
        }
    }
    Ok((v, v0))
}

/// DN operator at every grid node (index 0 is not meaningful and holds NaN or
/// an extrapolated value).
pub fn dn_apply_on_grid(order: &DNMultiOrder, samples: &GridSamples) -> Result<Vec<f64>> {
    let (mut v, _) = dn_cascade(order, samples, 0.0)?;
    v[0] = f64::NAN;
    Ok(v)
}

/// J^(1-alpha_m) D^(alpha_{m-1}) ... D^(alpha_0) f (t).
pub fn dn_apply<F: TimeFunction + ?Sized>(order: &DNMultiOrder, f: &F, t: f64, steps: usize) -> Result<f64> {
    let s = GridSamples::from_function(f, t, steps)?;
    Ok(*dn_apply_on_grid(order, &s)?.last().unwrap())
}

/// Residual of J^rho (DN f)(t) = f(t) - t^(alpha_0 - 1)/Gamma(alpha_0) (J^(1-alpha_0) f)(0+)
/// for m = 1, with the limit at 0+ read at the first grid node.
pub fn fundamental_relation_residual<F: TimeFunction + ?Sized>(
    order: &DNMultiOrder,
    f: &F,
    t: f64,
    steps: usize,
) -> Result<f64> {
    if order.m() != 1 {
        return Err(Error::Domain("fundamental relation check is implemented for m = 1".into()));
    }
    let s = GridSamples::from_function(f, t, steps)?;
    let rho = order.rho(1);
    let (v, v0) = dn_cascade(order, &s, rho)?;
    let lhs = *v.last().unwrap();
    let a0 = order.alphas()[0];
    let initial = t.powf(a0 - 1.0) * rgamma(a0) * v0[1];
    Ok((lhs - f.value(t) + initial).abs())
}
