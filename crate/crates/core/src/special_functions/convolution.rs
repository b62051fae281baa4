//! Laplace convolutions of Mittag-Leffler-type functions.

use crate::error::{Error, Result};

use super::gamma::rgamma;
use super::mittag_leffler::mittag_leffler;
use super::quadrature::{gauss_jacobi, gauss_legendre_16, Rule};
use super::MLTFSpec;

const POINTS: usize = 16;
const MAX_LEVEL: u32 = 20;

/// (e_a * e_b)(t) = int_0^t e_a(t - s) e_b(s) ds.
///
/// The substitution s = t sigma is split at sigma = 1/2. On each half the
/// kernel that is singular at that end is further mapped by
/// sigma = w^(1/alpha), which turns E(-c sigma^alpha) into the entire function
/// E(-c w) and leaves a pure power weight w^(beta/alpha - 1) that a
/// Gauss-Jacobi panel absorbs. Panels are bisected adaptively, at most 20
/// levels deep; the summed error estimate must meet `tol * (1 + |result|)`.
pub fn mltf_convolve(a: MLTFSpec, b: MLTFSpec, t: f64, tol: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("convolution time t = {t} must be positive")));
    }
    if !(tol >= 1e-12) {
        return Err(Error::Domain(format!("convolution tolerance {tol:e} is below 1e-12")));
    }
    let left = half(b, a, t, 0.5 * tol)?;
    let right = half(a, b, t, 0.5 * tol)?;
    let total = left.value + right.value;
    let err = left.error + right.error;
    if err <= tol * (1.0 + total.abs()) {
        Ok(total)
    } else {
        Err(Error::Accuracy { estimate: total, error: err, tol })
    }
}

struct HalfResult {
    value: f64,
    error: f64,
}

/// int_0^{t/2} e_other(t - s) e_sing(s) ds in the variable w = (s/t)^alpha_sing.
fn half(sing: MLTFSpec, other: MLTFSpec, t: f64, tol: f64) -> Result<HalfResult> {
    let (a_s, b_s) = (sing.alpha, sing.beta);
    let p = b_s / a_s - 1.0;
    let c = sing.lambda * t.powf(a_s);
    let scale = t.powf(b_s) / a_s;
    let width = 0.5f64.powf(a_s);
    let inv_a = 1.0 / a_s;
    let h = |w: f64| {
        let s_other = t * (1.0 - w.powf(inv_a));
        mittag_leffler(a_s, b_s, -c * w) * other.value_unchecked(s_other)
    };
    let jacobi = gauss_jacobi(POINTS, 0.0, p);
    let integ = Panels { p, jacobi: &jacobi, legendre: gauss_legendre_16(), h: &h };
    let coarse = integ.panel(0.0, width);
    let mut out = HalfResult { value: 0.0, error: 0.0 };
    integ.refine(0.0, width, coarse, tol / scale, width, 0, &mut out);
    if !out.value.is_finite() {
        return Err(Error::Accuracy { estimate: out.value, error: f64::INFINITY, tol });
    }
    out.value *= scale;
    out.error *= scale;
    Ok(out)
}

struct Panels<'a, H: Fn(f64) -> f64> {
    p: f64,
    jacobi: &'a Rule,
    legendre: &'a Rule,
    h: &'a H,
}

impl<H: Fn(f64) -> f64> Panels<'_, H> {
    /// int_lo^hi w^p h(w) dw on one panel.
    fn panel(&self, lo: f64, hi: f64) -> f64 {
        if lo == 0.0 {
            // (hi/2)^(p+1) int_{-1}^{1} (1+x)^p h(hi (1+x)/2) dx
            let half = 0.5 * hi;
            let mut acc = 0.0;
            for (x, wt) in self.jacobi.nodes.iter().zip(&self.jacobi.weights) {
                acc += wt * (self.h)(half * (1.0 + x));
            }
            acc * half.powf(self.p + 1.0)
        } else {
            let p = self.p;
            self.legendre.integrate(lo, hi, |w| w.powf(p) * (self.h)(w))
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(&self, lo: f64, hi: f64, whole: f64, tol: f64, width: f64, level: u32, out: &mut HalfResult) {
        let mid = 0.5 * (lo + hi);
        let left = self.panel(lo, mid);
        let right = self.panel(mid, hi);
        let err = (left + right - whole).abs();
        // Bisection cannot beat rounding in the panel sums themselves.
        let local = (tol * (hi - lo) / width).max(64.0 * f64::EPSILON * (left.abs() + right.abs()));
        // Panels left unresolved at the depth limit still contribute their
        // error estimate, so the caller's global check decides.
        if err <= local || level + 1 >= MAX_LEVEL {
            out.value += left + right;
            out.error += err;
            return;
        }
        self.refine(lo, mid, left, tol, width, level + 1, out);
        self.refine(mid, hi, right, tol, width, level + 1, out);
    }
}

/// Three-parameter Mittag-Leffler function with gamma = 2:
/// sum_k (k + 1) z^k / Gamma(alpha k + beta).
pub fn prabhakar2(alpha: f64, beta: f64, z: f64) -> f64 {
    (ml_any_beta(alpha, beta - 1.0, z) + (1.0 + alpha - beta) * mittag_leffler(alpha, beta, z)) / alpha
}

/// E_{alpha,beta}(z) for beta of either sign, lifting small beta through
/// E_{a,b}(z) = 1/Gamma(b) + z E_{a,a+b}(z).
fn ml_any_beta(alpha: f64, beta: f64, z: f64) -> f64 {
    if beta >= 0.25 {
        mittag_leffler(alpha, beta, z)
    } else {
        rgamma(beta) + z * ml_any_beta(alpha, alpha + beta, z)
    }
}

/// Exact convolution of two MLTFs sharing alpha and lambda:
/// e_{a,b1} * e_{a,b2} (t) = t^(b1+b2-1) E^2_{a,b1+b2}(-lambda t^a).
pub fn mltf_convolve_same_kernel(a: MLTFSpec, b: MLTFSpec, t: f64) -> Result<f64> {
    if a.alpha != b.alpha || a.lambda != b.lambda {
        return Err(Error::Domain("closed-form convolution needs equal alpha and lambda".into()));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("convolution time t = {t} must be positive")));
    }
    let beta = a.beta + b.beta;
    Ok(t.powf(beta - 1.0) * prabhakar2(a.alpha, beta, -a.lambda * t.powf(a.alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(a: f64, b: f64, l: f64) -> MLTFSpec {
        MLTFSpec::new(a, b, l).unwrap()
    }

    #[test]
    fn exponential_kernels() {
        let e = spec(1.0, 1.0, 1.0);
        let v = mltf_convolve(e, e, 1.0, 1e-10).unwrap();
        assert!((v - 0.36787944117144233).abs() < 1e-10 * (1.0 + v.abs()));
        let one = spec(1.0, 1.0, 0.0);
        assert!((mltf_convolve(one, one, 2.0, 1e-10).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn power_kernels_give_beta_function() {
        // t^{a-1}/G(a) * t^{b-1}/G(b) = t^{a+b-1}/G(a+b)
        let a = spec(0.5, 0.3, 0.0);
        let b = spec(0.5, 0.6, 0.0);
        let t = 1.7f64;
        let v = mltf_convolve(a, b, t, 1e-12).unwrap();
        let g = |x: f64| super::super::gamma::gamma(x).unwrap();
        // each MLTF is t^{beta-1}/Gamma(beta)
        let exact = t.powf(0.3 + 0.6 - 1.0) / g(0.9);
        assert!((v - exact).abs() < 1e-11, "{v} vs {exact}");
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let lam = 4.0 * std::f64::consts::PI.powi(2);
        for &(al, b1, b2, t) in
            &[(0.7, 0.7, 1.0, 0.5), (0.4, 0.4, 1.1, 1.0), (1.0, 1.0, 1.0, 0.3), (0.1, 0.1, 0.8, 1.0)]
        {
            let a = spec(al, b1, lam);
            let b = spec(al, b2, lam);
            let q = mltf_convolve(a, b, t, 1e-11).unwrap();
            let c = mltf_convolve_same_kernel(a, b, t).unwrap();
            assert!((q - c).abs() < 1e-10 * (1.0 + q.abs()), "{al} {b1} {b2}: {q} vs {c}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        let e = spec(1.0, 1.0, 1.0);
        assert!(mltf_convolve(e, e, 0.0, 1e-8).is_err());
        assert!(mltf_convolve(e, e, 1.0, 1e-13).is_err());
        assert!(mltf_convolve_same_kernel(e, spec(0.5, 1.0, 1.0), 1.0).is_err());
    }
}
