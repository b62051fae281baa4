//! Gamma, Mittag-Leffler and Mittag-Leffler-type functions.

pub mod convolution;
pub mod gamma;
pub mod mittag_leffler;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use convolution::{mltf_convolve, mltf_convolve_same_kernel, prabhakar2};
pub use gamma::{gamma, ln_gamma, rgamma};

/// Parameters (alpha, beta) of E_{alpha,beta}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLIndex {
    pub alpha: f64,
    pub beta: f64,
}

impl MLIndex {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::Domain(format!("Mittag-Leffler alpha = {alpha} not in (0, 2]")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("Mittag-Leffler beta = {beta} must be positive")));
        }
        Ok(Self { alpha, beta })
    }
}

/// e_{alpha,beta}(t, lambda) = t^(beta-1) E_{alpha,beta}(-lambda t^alpha).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLTFSpec {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
}

impl MLTFSpec {
    pub fn new(alpha: f64, beta: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("MLTF alpha = {alpha} not in (0, 1]")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("MLTF beta = {beta} must be positive")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("MLTF lambda = {lambda} must be nonnegative")));
        }
        Ok(Self { alpha, beta, lambda })
    }

    pub(crate) fn value_unchecked(&self, t: f64) -> f64 {
        let e = mittag_leffler::mittag_leffler(self.alpha, self.beta, -self.lambda * t.powf(self.alpha));
        if self.beta == 1.0 {
            e
        } else {
            t.powf(self.beta - 1.0) * e
        }
    }
}

/// Riemann-Liouville power kernel h_alpha(z) = z^(alpha-1) / Gamma(alpha).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerKernel {
    pub alpha: f64,
}

impl PowerKernel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("power kernel order {alpha} must be positive")));
        }
        Ok(Self { alpha })
    }

    pub fn eval(&self, z: f64) -> f64 {
        z.powf(self.alpha - 1.0) * rgamma(self.alpha)
    }
}

/// E_{alpha,beta}(z), relative accuracy about 1e-10 or better for z <= 10.
pub fn ml_eval(idx: MLIndex, z: f64) -> Result<f64> {
    if z.is_nan() {
        return Err(Error::Domain("Mittag-Leffler argument is NaN".into()));
    }
    if z > mittag_leffler::Z_MAX {
        return Err(Error::UnsupportedRange { z, max: mittag_leffler::Z_MAX });
    }
    if z == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let v = mittag_leffler::mittag_leffler(idx.alpha, idx.beta, z);
    if !v.is_finite() {
        return Err(Error::Domain(format!("E_{{{},{}}}({z}) overflows", idx.alpha, idx.beta)));
    }
    Ok(v)
}

/// e_{alpha,beta}(t, lambda) for t > 0.
pub fn mltf_eval(spec: MLTFSpec, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("MLTF time t = {t} must be positive and finite")));
    }
    Ok(spec.value_unchecked(t))
}
