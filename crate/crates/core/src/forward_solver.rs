//! Series solution of the forward problem
//!
//!   DN u = u_xx + f(x),  u(t, 1) = 0,  u_x(t, 0) = u_x(t, 1),
//!   (J^(1-alpha0) u)(0+, x) = phi(x),
//!
//! assembled from projected data and the closed-form mode factors.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::differentiation::{endpoint_derivatives, second_derivative};
use crate::error::{Error, Result};
use crate::fde_core::{check_orders, weighted_mode, Convolution, ModeKind, ModeParams};
use crate::spectral_basis::{decay_bound, eigenvalue, eval_eigenfunction, project, SpectralCoeffs};

/// A real function on [0, 1].
pub type SpatialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub const DEFAULT_MODES: usize = 32;
pub const DEFAULT_NX: usize = 257;
pub const DEFAULT_NT: usize = 128;
/// Absolute tolerance of the compatibility checks, scaled by 1 + |f^(d)(0)|.
pub const COMPAT_TOL: f64 = 1e-6;

/// One measured boundary condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityCheck {
    pub condition: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub checks: Vec<CompatibilityCheck>,
}

impl CompatibilityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.condition.as_str()).collect()
    }
}

/// Conditions g(1) = 0, g'(0) = g'(1), g''(1) = 0, g'''(0) = g'''(1) up to
/// derivative `level`, measured on a Chebyshev interpolant.
pub(crate) fn boundary_conditions<F: Fn(f64) -> f64 + ?Sized>(
    g: &F,
    name: &str,
    level: usize,
) -> Vec<CompatibilityCheck> {
    let d = endpoint_derivatives(g, level.max(1));
    (0..=level)
        .map(|k| {
            let (at0, at1) = d[k];
            let primes = "'".repeat(k);
            let (condition, residual) = if k % 2 == 0 {
                (format!("{name}{primes}(1) = 0"), at1.abs())
            } else {
                (format!("{name}{primes}(0) = {name}{primes}(1)"), (at0 - at1).abs())
            };
            let tolerance = COMPAT_TOL * (1.0 + at0.abs());
            CompatibilityCheck { condition, residual, tolerance, pass: residual <= tolerance }
        })
        .collect()
}

/// Boundary compatibility of initial data: phi(1) = 0 and, for level >= 1,
/// phi'(0) = phi'(1).
pub fn check_compatibility<F: Fn(f64) -> f64 + ?Sized>(phi: &F, level: usize) -> CompatibilityReport {
    CompatibilityReport { checks: boundary_conditions(phi, "phi", level) }
}

#[derive(Clone)]
pub struct ForwardProblem {
    pub alpha0: f64,
    pub alpha1: f64,
    pub horizon: f64,
    pub phi: SpatialFn,
    pub source: Option<SpatialFn>,
    pub n_modes: usize,
    pub nx: usize,
    pub nt: usize,
    /// Solve even when phi fails the compatibility report (a warning is kept).
    pub allow_incompatible: bool,
}

impl fmt::Debug for ForwardProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ForwardProblem")
            .field("alpha0", &self.alpha0)
            .field("alpha1", &self.alpha1)
            .field("horizon", &self.horizon)
            .field("source", &self.source.is_some())
            .field("n_modes", &self.n_modes)
            .field("nx", &self.nx)
            .field("nt", &self.nt)
            .finish_non_exhaustive()
    }
}

impl ForwardProblem {
    /// Problem without source on the default grids.
    pub fn new(alpha0: f64, alpha1: f64, horizon: f64, phi: SpatialFn) -> Self {
        Self {
            alpha0,
            alpha1,
            horizon,
            phi,
            source: None,
            n_modes: DEFAULT_MODES,
            nx: DEFAULT_NX,
            nt: DEFAULT_NT,
            allow_incompatible: false,
        }
    }

    pub fn with_source(mut self, f: SpatialFn) -> Self {
        self.source = Some(f);
        self
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

    pub fn validate(&self) -> Result<()> {
        validate_setup(self.alpha0, self.alpha1, self.horizon, self.n_modes, self.nx, self.nt)
    }
}

pub(crate) fn validate_setup(alpha0: f64, alpha1: f64, horizon: f64, n: usize, nx: usize, nt: usize) -> Result<()> {
    check_orders(alpha0, alpha1)?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Config(format!("horizon T = {horizon} must be positive")));
    }
    if n == 0 {
        return Err(Error::Config("truncation N must be at least 1".into()));
    }
    if nx < 8 || nt < 8 {
        return Err(Error::Config(format!("grids need nx, nt >= 8 (got nx = {nx}, nt = {nt})")));
    }
    if nx < 4 * n {
        return Err(Error::Config(format!("nx = {nx} too coarse for N = {n}; need nx >= {}", 4 * n)));
    }
    Ok(())
}

/// u(t, x) on t_i = i T / nt (i = 1..=nt) and x_j = j / (nx - 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionField {
    pub alpha0: f64,
    pub alpha1: f64,
    pub t_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    /// values[i][j] = u(t_i, x_j).
    pub values: Vec<Vec<f64>>,
    /// t^alpha1 u.
    pub weighted: Vec<Vec<f64>>,
    /// Limit of t^(1-alpha0) u(t, x_j) as t -> 0+.
    pub origin: Vec<f64>,
}

impl SolutionField {
    pub fn horizon(&self) -> f64 {
        *self.t_grid.last().expect("field has at least one time")
    }

    pub fn nt(&self) -> usize {
        self.t_grid.len()
    }

    pub fn nx(&self) -> usize {
        self.x_grid.len()
    }

    /// Time step of the uniform grid.
    pub fn dt(&self) -> f64 {
        self.horizon() / self.nt() as f64
    }

    /// Trace u(., x_j).
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[j]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Bilinear interpolation inside the grid hull.
    pub fn evaluate(&self, t: f64, x: f64) -> Result<f64> {
        let (t0, t1) = (self.t_grid[0], self.horizon());
        let (x0, x1) = (self.x_grid[0], *self.x_grid.last().unwrap());
        if !(t >= t0 && t <= t1 && x >= x0 && x <= x1) {
            return Err(Error::Domain(format!("({t}, {x}) outside the grid hull [{t0}, {t1}] x [{x0}, {x1}]")));
        }
        let (i, wt) = bracket(&self.t_grid, t);
        let (j, wx) = bracket(&self.x_grid, x);
        let v = &self.values;
        let lo = v[i][j] + wx * (v[i][j + 1] - v[i][j]);
        let hi = v[i + 1][j] + wx * (v[i + 1][j + 1] - v[i + 1][j]);
        Ok(lo + wt * (hi - lo))
    }
}

fn bracket(grid: &[f64], s: f64) -> (usize, f64) {
    let n = grid.len();
    let i = grid.partition_point(|&g| g <= s).clamp(1, n - 1) - 1;
    (i, (s - grid[i]) / (grid[i + 1] - grid[i]))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForwardSolution {
    pub field: SolutionField,
    /// Coefficients of u(t_i, .) for every grid time.
    pub u_coeffs: Vec<SpectralCoeffs>,
    pub phi_coeffs: SpectralCoeffs,
    pub f_coeffs: SpectralCoeffs,
    /// Bound on the sup norm of the discarded data modes k > N.
    pub tail_estimate: f64,
    pub compatibility: CompatibilityReport,
    pub warnings: Vec<String>,
}

pub fn solve_forward(p: &ForwardProblem) -> Result<ForwardSolution> {
    p.validate()?;
    let compatibility = check_compatibility(p.phi.as_ref(), 1);
    let mut warnings = Vec::new();
    if !compatibility.passed() {
        let failed = compatibility.failures().join(", ");
        if !p.allow_incompatible {
            return Err(Error::Config(format!("initial data violate {failed}")));
        }
        warnings.push(format!("initial data violate {failed}; solving anyway"));
    }
    let panels = projection_panels(p.n_modes);
    let phi_coeffs = project(p.phi.as_ref(), p.n_modes, panels)?;
    let f_coeffs = match &p.source {
        Some(f) => project(f.as_ref(), p.n_modes, panels)?,
        None => SpectralCoeffs::zeros(p.n_modes),
    };
    let mut tail_estimate = tail_bound(p.phi.as_ref(), p.n_modes)?;
    if let Some(f) = &p.source {
        tail_estimate += tail_bound(f.as_ref(), p.n_modes)?;
    }
    let (field, u_coeffs) = assemble(p.alpha0, p.alpha1, p.horizon, &phi_coeffs, &f_coeffs, p.nx, p.nt)?;
    Ok(ForwardSolution { field, u_coeffs, phi_coeffs, f_coeffs, tail_estimate, compatibility, warnings })
}

pub(crate) fn projection_panels(n: usize) -> usize {
    (10 * n).max(32)
}

/// Sum over k > N of the decay bounds with n = 2, times sup |X| = 4.
fn tail_bound(g: &(dyn Fn(f64) -> f64 + Send + Sync), n: usize) -> Result<f64> {
    let norm = second_derivative_norm(g);
    let (b1, b2) = decay_bound(2, norm, 1)?;
    // sum_{k > N} k^-2 < 1/N
    Ok(4.0 * (b1 + b2) / n as f64)
}

fn second_derivative_norm(g: &(dyn Fn(f64) -> f64 + Send + Sync)) -> f64 {
    let cells = 1024;
    let h = 1.0 / cells as f64;
    let v: Vec<f64> = (0..=cells).map(|i| g(i as f64 * h)).collect();
    let sq: f64 = (1..cells).map(|i| second_derivative(&v, i, h).powi(2)).sum();
    (sq * h).sqrt()
}

/// Time factors of every mode in weighted form, at t_i = i T / nt for
/// i = 0..=nt. Index 0 of the outer vector is the root mode, then
/// (cosine k, sine k) pairs.
pub(crate) fn weighted_factors(
    alpha0: f64,
    alpha1: f64,
    horizon: f64,
    phi: &SpectralCoeffs,
    f: &SpectralCoeffs,
    nt: usize,
) -> Result<Vec<Vec<f64>>> {
    let n = phi.n();
    let h = horizon / nt as f64;
    let conv = Convolution::ClosedForm;
    let root = ModeParams::new(alpha0, alpha1, 0.0, phi.c0, f.c0)?;
    let mut out =
        vec![(0..=nt).map(|i| weighted_mode(&root, ModeKind::Root, i as f64 * h, conv)).collect::<Result<Vec<_>>>()?];
    let pairs = (1..=n)
        .into_par_iter()
        .map(|k| {
            let lambda = eigenvalue(k);
            let (phi1, f1, phi2, f2) = (phi.c1[k - 1], f.c1[k - 1], phi.c2[k - 1], f.c2[k - 1]);
            let first = ModeParams::new(alpha0, alpha1, lambda, phi1, f1)?;
            let second = ModeParams::new(alpha0, alpha1, lambda, phi2, f2)?;
            let series = |p: &ModeParams, kind: ModeKind| -> Result<Vec<f64>> {
                (0..=nt).map(|i| weighted_mode(p, kind, i as f64 * h, conv)).collect()
            };
            let g1 = if phi1 == 0.0 && f1 == 0.0 { vec![0.0; nt + 1] } else { series(&first, ModeKind::First)? };
            let g2 = if phi1 == 0.0 && f1 == 0.0 && phi2 == 0.0 && f2 == 0.0 {
                vec![0.0; nt + 1]
            } else {
                series(&second, ModeKind::Second { phi1, f1 })?
            };
            Ok((g1, g2))
        })
        .collect::<Result<Vec<_>>>()?;
    for (g1, g2) in pairs {
        out.push(g1);
        out.push(g2);
    }
    Ok(out)
}

/// Field and per-time coefficients from projected data.
pub(crate) fn assemble(
    alpha0: f64,
    alpha1: f64,
    horizon: f64,
    phi: &SpectralCoeffs,
    f: &SpectralCoeffs,
    nx: usize,
    nt: usize,
) -> Result<(SolutionField, Vec<SpectralCoeffs>)> {
    let n = phi.n();
    let factors = weighted_factors(alpha0, alpha1, horizon, phi, f, nt)?;
    let x_grid: Vec<f64> = (0..nx).map(|j| j as f64 / (nx - 1) as f64).collect();
    let table: Vec<Vec<f64>> =
        SpectralCoeffs::ids(n).map(|id| x_grid.iter().map(|&x| eval_eigenfunction(id, x)).collect()).collect();
    let combine = |coef: &[f64]| -> Vec<f64> {
        (0..nx).map(|j| coef.iter().zip(&table).fold(0.0, |acc, (c, row)| acc + c * row[j])).collect()
    };
    let dt = horizon / nt as f64;
    let t_grid: Vec<f64> = (1..=nt).map(|i| i as f64 * dt).collect();
    let rows: Vec<(Vec<f64>, SpectralCoeffs)> = t_grid
        .par_iter()
        .enumerate()
        .map(|(r, &t)| {
            let scale = t.powf(alpha0 - 1.0);
            let coef: Vec<f64> = factors.iter().map(|g| scale * g[r + 1]).collect();
            (combine(&coef), to_coeffs(&coef))
        })
        .collect();
    let origin = combine(&factors.iter().map(|g| g[0]).collect::<Vec<_>>());
    let (values, u_coeffs): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let weighted = values
        .iter()
        .zip(&t_grid)
        .map(|(row, &t)| {
            let w = t.powf(alpha1);
            row.iter().map(|v| w * v).collect()
        })
        .collect();
    Ok((SolutionField { alpha0, alpha1, t_grid, x_grid, values, weighted, origin }, u_coeffs))
}

fn to_coeffs(c: &[f64]) -> SpectralCoeffs {
    let n = (c.len() - 1) / 2;
    SpectralCoeffs { c0: c[0], c1: (0..n).map(|k| c[1 + 2 * k]).collect(), c2: (0..n).map(|k| c[2 + 2 * k]).collect() }
}
