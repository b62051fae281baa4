//! Recovery of a time-independent source f(x) from the initial data phi and
//! the terminal observation u(T, x) = psi(x).
//!
//! With d_k = e_{rho,a0+a1}(T, lambda_k):
//!
//! * f0  = G(a0+a1) / T^rho (psi0 - phi0 T^(a0-1) / G(a0))
//! * f1k = (psi1k - phi1k e_{rho,a0}(T)) / d_k
//! * f2k = (psi2k - 2 sqrt(lambda_k) (e_{rho,rho} * u1k)(T) - phi2k e_{rho,a0}(T)) / d_k
//!
//! where u1k already carries the recovered f1k.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::differentiation::max_fourth_difference;
use crate::error::{Error, Result};
use crate::fde_core::{coupling, Convolution, ModeParams};
use crate::forward_solver::{
    assemble, boundary_conditions, check_compatibility, projection_panels, validate_setup, CompatibilityCheck,
    CompatibilityReport, SolutionField, SpatialFn, DEFAULT_MODES, DEFAULT_NT, DEFAULT_NX,
};
use crate::special_functions::gamma::rgamma;
use crate::special_functions::MLTFSpec;
use crate::spectral_basis::{eigenvalue, project, reconstruct, SpectralCoeffs};

/// Denominators below this are treated as a degenerate horizon.
pub const MIN_DENOMINATOR: f64 = 1e-300;

#[derive(Clone)]
pub struct BackwardProblem {
    pub alpha0: f64,
    pub alpha1: f64,
    pub horizon: f64,
    pub phi: SpatialFn,
    pub psi: SpatialFn,
    pub n_modes: usize,
    pub nx: usize,
    pub nt: usize,
    /// Modes whose amplification factor exceeds this are set to zero.
    pub cutoff: Option<f64>,
    /// Recover even when phi or psi fail their compatibility reports.
    pub allow_incompatible: bool,
}

impl fmt::Debug for BackwardProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BackwardProblem")
            .field("alpha0", &self.alpha0)
            .field("alpha1", &self.alpha1)
            .field("horizon", &self.horizon)
            .field("n_modes", &self.n_modes)
            .field("nx", &self.nx)
            .field("nt", &self.nt)
            .field("cutoff", &self.cutoff)
            .finish_non_exhaustive()
    }
}

impl BackwardProblem {
    pub fn new(alpha0: f64, alpha1: f64, horizon: f64, phi: SpatialFn, psi: SpatialFn) -> Self {
        Self {
            alpha0,
            alpha1,
            horizon,
            phi,
            psi,
            n_modes: DEFAULT_MODES,
            nx: DEFAULT_NX,
            nt: DEFAULT_NT,
            cutoff: None,
            allow_incompatible: false,
        }
    }

    pub fn with_modes(mut self, n: usize) -> Self {
        self.n_modes = n;
        self
    }

    pub fn with_grid(mut self, nx: usize, nt: usize) -> Self {
        self.nx = nx;
        self.nt = nt;
        self
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = Some(cutoff);
        self
    }
}

/// psi(1) = 0, psi'(0) = psi'(1), psi''(1) = 0, psi'''(0) = psi'''(1), and
/// fourth differences that stay bounded under grid refinement.
pub fn check_psi_compatibility<F: Fn(f64) -> f64 + ?Sized>(psi: &F) -> CompatibilityReport {
    let mut checks = boundary_conditions(psi, "psi", 3);
    let coarse = max_fourth_difference(psi, 256);
    let fine = max_fourth_difference(psi, 512);
    // Round-off in a fourth difference over h^4 alone reaches 16 eps max|psi| / h^4.
    let scale = (0..=512).map(|i| psi(i as f64 / 512.0).abs()).fold(0.0, f64::max);
    let noise = 64.0 * f64::EPSILON * scale * 512f64.powi(4);
    let tolerance = 1.25 * coarse + noise + 1e-6;
    checks.push(CompatibilityCheck {
        condition: "psi in C4 (bounded fourth differences)".into(),
        residual: fine,
        tolerance,
        pass: fine.is_finite() && fine <= tolerance,
    });
    CompatibilityReport { checks }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub phi_compatibility: CompatibilityReport,
    pub psi_compatibility: CompatibilityReport,
    /// ||u(T, .) - psi|| in L2 over the output grid.
    pub roundtrip_l2: f64,
    pub psi_l2: f64,
    /// Modes k set to zero by the amplification cutoff.
    pub cut_modes: Vec<usize>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceRecovery {
    pub f_coeffs: SpectralCoeffs,
    pub phi_coeffs: SpectralCoeffs,
    pub psi_coeffs: SpectralCoeffs,
    /// Coefficients of the re-solved u at T.
    pub u_final_coeffs: SpectralCoeffs,
    pub x_grid: Vec<f64>,
    pub f_grid: Vec<f64>,
    pub u_field: SolutionField,
    /// 1 / e_{rho,a0+a1}(T, lambda_k) for k = 1..=N.
    pub amplification: Vec<f64>,
    pub report: RecoveryReport,
}

fn denominator(alpha0: f64, alpha1: f64, horizon: f64, k: usize) -> Result<f64> {
    let rho = alpha0 + alpha1 - 1.0;
    let d = MLTFSpec::new(rho, alpha0 + alpha1, eigenvalue(k))?.value_unchecked(horizon);
    if !(d > MIN_DENOMINATOR) {
        return Err(Error::DegenerateHorizon { k, value: d });
    }
    Ok(d)
}

/// 1 / e_{rho,a0+a1}(T, lambda_k): the factor by which a terminal-data error
/// in mode k is magnified in the recovered source.
pub fn amplification_factor(p: &BackwardProblem, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("amplification factor is defined for k >= 1".into()));
    }
    crate::fde_core::check_orders(p.alpha0, p.alpha1)?;
    if !(p.horizon > 0.0 && p.horizon.is_finite()) {
        return Err(Error::Domain(format!("horizon T = {} must be positive", p.horizon)));
    }
    Ok(1.0 / denominator(p.alpha0, p.alpha1, p.horizon, k)?)
}

pub fn recover_source(p: &BackwardProblem) -> Result<SourceRecovery> {
    validate_setup(p.alpha0, p.alpha1, p.horizon, p.n_modes, p.nx, p.nt)?;
    let phi_compatibility = check_compatibility(p.phi.as_ref(), 1);
    let psi_compatibility = check_psi_compatibility(p.psi.as_ref());
    let mut warnings = Vec::new();
    for (name, rep) in [("phi", &phi_compatibility), ("psi", &psi_compatibility)] {
        if !rep.passed() {
            let failed = rep.failures().join(", ");
            if !p.allow_incompatible {
                return Err(Error::Config(format!("{name} violates {failed}")));
            }
            warnings.push(format!("{name} violates {failed}; recovering anyway"));
        }
    }
    let panels = projection_panels(p.n_modes);
    let phi = project(p.phi.as_ref(), p.n_modes, panels)?;
    let psi = project(p.psi.as_ref(), p.n_modes, panels)?;
    let (f_coeffs, amplification, cut_modes) = source_coeffs(p, &phi, &psi)?;
    let (u_field, u_coeffs) = assemble(p.alpha0, p.alpha1, p.horizon, &phi, &f_coeffs, p.nx, p.nt)?;
    let x_grid = u_field.x_grid.clone();
    let f_grid = x_grid.iter().map(|&x| reconstruct(&f_coeffs, x)).collect();
    let last = u_field.values.last().expect("nt >= 8");
    let diff: Vec<f64> = last.iter().zip(&x_grid).map(|(u, &x)| u - (p.psi)(x)).collect();
    let target: Vec<f64> = x_grid.iter().map(|&x| (p.psi)(x)).collect();
    let dx = 1.0 / (p.nx - 1) as f64;
    let report = RecoveryReport {
        phi_compatibility,
        psi_compatibility,
        roundtrip_l2: l2(&diff, dx),
        psi_l2: l2(&target, dx),
        cut_modes,
        warnings,
    };
    let u_final_coeffs = u_coeffs.last().expect("nt >= 8").clone();
    Ok(SourceRecovery {
        f_coeffs,
        phi_coeffs: phi,
        psi_coeffs: psi,
        u_final_coeffs,
        x_grid,
        f_grid,
        u_field,
        amplification,
        report,
    })
}

type Coefficients = (SpectralCoeffs, Vec<f64>, Vec<usize>);

/// Source coefficients in the order f0, then f1k, then f2k with u1k built
/// from the recovered f1k.
pub(crate) fn source_coeffs(p: &BackwardProblem, phi: &SpectralCoeffs, psi: &SpectralCoeffs) -> Result<Coefficients> {
    let (a0, a1, horizon) = (p.alpha0, p.alpha1, p.horizon);
    let rho = a0 + a1 - 1.0;
    let c0 = (psi.c0 - phi.c0 * horizon.powf(a0 - 1.0) * rgamma(a0)) / (horizon.powf(rho) * rgamma(a0 + a1));
    let modes = (1..=p.n_modes)
        .into_par_iter()
        .map(|k| {
            let lambda = eigenvalue(k);
            let d = denominator(a0, a1, horizon, k)?;
            let e0 = MLTFSpec::new(rho, a0, lambda)?.value_unchecked(horizon);
            let amp = 1.0 / d;
            if p.cutoff.is_some_and(|c| amp > c) {
                return Ok((0.0, 0.0, amp, true));
            }
            let (phi1, phi2) = (phi.c1[k - 1], phi.c2[k - 1]);
            let f1 = (psi.c1[k - 1] - phi1 * e0) / d;
            let mode = ModeParams::new(a0, a1, lambda, phi2, 0.0)?;
            let conv = coupling(&mode, phi1, f1, horizon, Convolution::ClosedForm)?;
            let f2 = (psi.c2[k - 1] - 2.0 * lambda.sqrt() * conv - phi2 * e0) / d;
            Ok((f1, f2, amp, false))
        })
        .collect::<Result<Vec<_>>>()?;
    let f = SpectralCoeffs { c0, c1: modes.iter().map(|m| m.0).collect(), c2: modes.iter().map(|m| m.1).collect() };
    let amplification = modes.iter().map(|m| m.2).collect();
    let cut = modes.iter().enumerate().filter(|(_, m)| m.3).map(|(i, _)| i + 1).collect();
    Ok((f, amplification, cut))
}

fn l2(v: &[f64], dx: f64) -> f64 {
    let n = v.len();
    let inner: f64 = v[1..n - 1].iter().map(|a| a * a).sum();
    (dx * (inner + 0.5 * (v[0] * v[0] + v[n - 1] * v[n - 1]))).sqrt()
}
