//! Closed-form solutions of the per-mode equations for the m = 1 DN operator.
//!
//! With rho = alpha0 + alpha1 - 1 and z = -lambda t^rho the modes are
//!
//! * u0(t)  = t^(a0-1)/G(a0) phi0 + t^rho/G(rho+1) f0
//! * u1k(t) = e_{rho,a0}(t) phi1 + e_{rho,a0+a1}(t) f1
//! * u2k(t) = e_{rho,a0}(t) phi2 + e_{rho,a0+a1}(t) f2 + 2 sqrt(lambda) (e_{rho,rho} * u1k)(t)
//!
//! and they solve DN u + lambda u = f (+ 2 sqrt(lambda) u1k for the second
//! family) with (J^(1-a0) u)(0+) = phi. Every mode behaves like t^(a0-1) at
//! the origin, so each has a bounded weighted form t^(1-a0) u(t).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractional_ops::{dn_apply_on_grid, DNMultiOrder, GridSamples};
use crate::special_functions::gamma::rgamma;
use crate::special_functions::mittag_leffler::mittag_leffler;
use crate::special_functions::{mltf_convolve, prabhakar2, MLTFSpec};

/// Default absolute tolerance for quadrature convolutions.
pub const DEFAULT_CONV_TOL: f64 = 1e-8;

/// Orders, eigenvalue and data coefficients of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    pub alpha0: f64,
    pub alpha1: f64,
    pub rho: f64,
    pub lambda: f64,
    pub phi_coeff: f64,
    pub f_coeff: f64,
}

impl ModeParams {
    pub fn new(alpha0: f64, alpha1: f64, lambda: f64, phi_coeff: f64, f_coeff: f64) -> Result<Self> {
        check_orders(alpha0, alpha1)?;
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("eigenvalue {lambda} must be nonnegative")));
        }
        Ok(Self { alpha0, alpha1, rho: alpha0 + alpha1 - 1.0, lambda, phi_coeff, f_coeff })
    }

    pub fn order(&self) -> DNMultiOrder {
        DNMultiOrder::pair(self.alpha0, self.alpha1).expect("orders validated on construction")
    }
}

/// Orders accepted by the solvers: alpha0, alpha1 in (0, 1] and
/// rho = alpha0 + alpha1 - 1 in (0, 1]. The classical case alpha0 = alpha1 = 1
/// has rho = 1.
pub fn check_orders(alpha0: f64, alpha1: f64) -> Result<()> {
    for (name, a) in [("alpha0", alpha0), ("alpha1", alpha1)] {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::Domain(format!("{name} = {a} not in (0, 1]")));
        }
    }
    if !(alpha0 + alpha1 - 1.0 > 0.0) {
        return Err(Error::Domain(format!("rho = alpha0 + alpha1 - 1 = {} must be positive", alpha0 + alpha1 - 1.0)));
    }
    Ok(())
}

/// How the convolution in the second-family modes is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Convolution {
    /// Both factors share rho and lambda, so the convolution has the closed
    /// form t^(b1+b2-1) E^2_{rho,b1+b2}(-lambda t^rho).
    ClosedForm,
    /// Adaptive quadrature to the given absolute tolerance.
    Quadrature { tol: f64 },
}

/// Which mode equation a time factor solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModeKind {
    Root,
    First,
    /// Second family, coupled to the first-family mode with data (phi1, f1).
    Second {
        phi1: f64,
        f1: f64,
    },
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("mode time t = {t} must be positive")));
    }
    Ok(())
}

fn check_kind(p: &ModeParams, kind: ModeKind) -> Result<()> {
    match kind {
        ModeKind::Root if p.lambda != 0.0 => {
            Err(Error::Domain(format!("root mode needs lambda = 0, got {}", p.lambda)))
        }
        ModeKind::First | ModeKind::Second { .. } if p.lambda <= 0.0 => {
            Err(Error::Domain("first and second families need lambda > 0".into()))
        }
        _ => Ok(()),
    }
}

/// Weighted mode t^(1-alpha0) u(t), bounded on t >= 0.
pub fn weighted_mode(p: &ModeParams, kind: ModeKind, t: f64, conv: Convolution) -> Result<f64> {
    check_kind(p, kind)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("mode time t = {t} must be nonnegative")));
    }
    let (a0, a1, rho) = (p.alpha0, p.alpha1, p.rho);
    let t_a1 = t.powf(a1);
    if let ModeKind::Root = kind {
        return Ok(p.phi_coeff * rgamma(a0) + p.f_coeff * t_a1 * rgamma(a0 + a1));
    }
    let z = -p.lambda * t.powf(rho);
    let mut g = p.phi_coeff * mittag_leffler(rho, a0, z) + p.f_coeff * t_a1 * mittag_leffler(rho, a0 + a1, z);
    if let ModeKind::Second { phi1, f1 } = kind {
        g += 2.0 * p.lambda.sqrt() * weighted_coupling(p, phi1, f1, t, conv)?;
    }
    Ok(g)
}

/// t^(1-a0) (e_{rho,rho} * u1)(t) for u1 with data (phi1, f1).
fn weighted_coupling(p: &ModeParams, phi1: f64, f1: f64, t: f64, conv: Convolution) -> Result<f64> {
    if phi1 == 0.0 && f1 == 0.0 {
        return Ok(0.0);
    }
    let (a0, a1, rho) = (p.alpha0, p.alpha1, p.rho);
    match conv {
        Convolution::ClosedForm => {
            let z = -p.lambda * t.powf(rho);
            let t_rho = t.powf(rho);
            Ok(phi1 * t_rho * prabhakar2(rho, rho + a0, z)
                + f1 * t_rho * t.powf(a1) * prabhakar2(rho, rho + a0 + a1, z))
        }
        Convolution::Quadrature { tol } => {
            if t == 0.0 {
                return Ok(0.0);
            }
            let kernel = MLTFSpec::new(rho, rho, p.lambda)?;
            let mut acc = 0.0;
            if phi1 != 0.0 {
                acc += phi1 * mltf_convolve(kernel, MLTFSpec::new(rho, a0, p.lambda)?, t, tol)?;
            }
            if f1 != 0.0 {
                acc += f1 * mltf_convolve(kernel, MLTFSpec::new(rho, a0 + a1, p.lambda)?, t, tol)?;
            }
            Ok(acc * t.powf(1.0 - a0))
        }
    }
}

/// (e_{rho,rho}(., lambda) * u1)(t) for the first-family mode with data
/// (phi1, f1).
pub fn coupling(p: &ModeParams, phi1: f64, f1: f64, t: f64, conv: Convolution) -> Result<f64> {
    check_time(t)?;
    Ok(t.powf(p.alpha0 - 1.0) * weighted_coupling(p, phi1, f1, t, conv)?)
}

/// Mode value u(t) for t > 0.
pub fn mode_value(p: &ModeParams, kind: ModeKind, t: f64, conv: Convolution) -> Result<f64> {
    check_time(t)?;
    Ok(t.powf(p.alpha0 - 1.0) * weighted_mode(p, kind, t, conv)?)
}

/// u0(t) = t^(a0-1)/G(a0) phi0 + t^(a0+a1-1)/G(a0+a1) f0.
pub fn u0_mode(p: &ModeParams, t: f64) -> Result<f64> {
    mode_value(p, ModeKind::Root, t, Convolution::ClosedForm)
}

/// u1k(t) = e_{rho,a0}(t, lambda) phi1k + e_{rho,a0+a1}(t, lambda) f1k.
pub fn u1_mode(p: &ModeParams, t: f64) -> Result<f64> {
    mode_value(p, ModeKind::First, t, Convolution::ClosedForm)
}

/// u2k(t), coupled to the first-family mode with data (phi1, f1).
pub fn u2_mode(p: &ModeParams, phi1: f64, f1: f64, t: f64, conv: Convolution) -> Result<f64> {
    mode_value(p, ModeKind::Second { phi1, f1 }, t, conv)
}

/// |DN u + lambda u - f - c| at t, with c = 2 sqrt(lambda) u1k(t) for the
/// second family and 0 otherwise. DN is applied to the sampled weighted trace
/// on `steps` uniform intervals of [0, t].
pub fn mode_residual(p: &ModeParams, kind: ModeKind, t: f64, steps: usize) -> Result<f64> {
    check_time(t)?;
    check_kind(p, kind)?;
    if steps < 2 {
        return Err(Error::Domain("mode residual needs at least 2 steps".into()));
    }
    let conv = Convolution::ClosedForm;
    let h = t / steps as f64;
    let g = (0..=steps).map(|j| weighted_mode(p, kind, j as f64 * h, conv)).collect::<Result<Vec<_>>>()?;
    let samples = GridSamples::from_weighted(1.0 - p.alpha0, &g, h)?;
    let dn = *dn_apply_on_grid(&p.order(), &samples)?.last().unwrap();
    let u = t.powf(p.alpha0 - 1.0) * g[steps];
    let coupling = match kind {
        ModeKind::Second { phi1, f1 } => {
            let first = ModeParams { phi_coeff: phi1, f_coeff: f1, ..*p };
            2.0 * p.lambda.sqrt() * mode_value(&first, ModeKind::First, t, conv)?
        }
        _ => 0.0,
    };
    Ok((dn + p.lambda * u - p.f_coeff - coupling).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::gamma::gamma_unchecked;
    use std::f64::consts::PI;

    const LAMBDA1: f64 = 4.0 * PI * PI;

    #[test]
    fn classical_modes() {
        let p = ModeParams::new(1.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        assert!((u0_mode(&p, 0.3).unwrap() - 1.0).abs() < 1e-15);
        let p = ModeParams::new(1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert!((u0_mode(&p, 0.3).unwrap() - 0.3).abs() < 1e-15);
        let p = ModeParams::new(1.0, 1.0, 3.0, 1.0, 0.0).unwrap();
        assert!((u1_mode(&p, 0.2).unwrap() - (-0.6f64).exp()).abs() < 1e-15);
        // Associated mode: 2 sqrt(lambda) t e^{-lambda t} phi1.
        let p = ModeParams::new(1.0, 1.0, LAMBDA1, 0.0, 0.0).unwrap();
        let t = 0.05;
        let exact = 2.0 * LAMBDA1.sqrt() * t * (-LAMBDA1 * t).exp();
        assert!((u2_mode(&p, 1.0, 0.0, t, Convolution::ClosedForm).unwrap() - exact).abs() < 1e-14);
        let q = u2_mode(&p, 1.0, 0.0, t, Convolution::Quadrature { tol: 1e-10 }).unwrap();
        assert!((q - exact).abs() < 1e-9);
    }

    #[test]
    fn root_mode_formula() {
        let p = ModeParams::new(0.8, 0.9, 0.0, 1.0, 2.0).unwrap();
        let t = 0.5f64;
        let exact = t.powf(-0.2) / gamma_unchecked(0.8) + 2.0 * t.powf(0.7) / gamma_unchecked(1.7);
        assert!((u0_mode(&p, t).unwrap() - exact).abs() < 1e-14);
    }

    #[test]
    fn zero_data_gives_zero() {
        let p = ModeParams::new(0.9, 0.8, LAMBDA1, 0.0, 0.0).unwrap();
        assert_eq!(u1_mode(&p, 0.4).unwrap(), 0.0);
        assert_eq!(u2_mode(&p, 0.0, 0.0, 0.4, Convolution::ClosedForm).unwrap(), 0.0);
        assert_eq!(mode_residual(&p, ModeKind::First, 0.4, 64).unwrap(), 0.0);
    }

    #[test]
    fn quadrature_and_closed_form_agree() {
        let p = ModeParams::new(0.9, 0.8, LAMBDA1, 1.0, 0.5).unwrap();
        for &t in &[0.01, 0.3, 1.0] {
            let a = u2_mode(&p, 1.0, 0.7, t, Convolution::ClosedForm).unwrap();
            let b = u2_mode(&p, 1.0, 0.7, t, Convolution::Quadrature { tol: 1e-11 }).unwrap();
            assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()), "t = {t}: {a} vs {b}");
        }
    }

    #[test]
    fn kind_checks() {
        let p = ModeParams::new(0.9, 0.8, 0.0, 1.0, 0.0).unwrap();
        assert!(u1_mode(&p, 0.5).is_err());
        let q = ModeParams::new(0.9, 0.8, 1.0, 1.0, 0.0).unwrap();
        assert!(u0_mode(&q, 0.5).is_err());
        assert!(u0_mode(&p, 0.0).is_err());
        assert!(ModeParams::new(0.3, 0.5, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn initial_weighting_limit() {
        let p = ModeParams::new(0.8, 0.9, 0.0, 1.0, 2.0).unwrap();
        let t = 1e-6f64;
        let w = t.powf(1.0 - 0.8) * u0_mode(&p, t).unwrap();
        assert!(((w - rgamma(0.8)) / rgamma(0.8)).abs() < 1e-3);
    }

    #[test]
    fn steady_limit_of_first_family() {
        let p = ModeParams::new(0.9, 0.8, LAMBDA1, 0.0, 1.0).unwrap();
        let u = u1_mode(&p, 1e3).unwrap();
        assert!((u - 1.0 / LAMBDA1).abs() < 0.01 / LAMBDA1, "{u}");
    }
}
