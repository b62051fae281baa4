//! Residual checks that apply the DN operator and finite differences directly
//! to solution fields, and a Crank-Nicolson reference solver for the
//! classical heat equation with the same nonlocal conditions.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::differentiation::{end_slopes, second_derivative};
use crate::error::{Error, Result};
use crate::forward_solver::SolutionField;
use crate::fractional_ops::{dn_apply_on_grid, rl_integral_on_grid, DNMultiOrder, GridSamples, SampledFunction};
use crate::spectral_basis::eigenvalue;

/// Pass thresholds for a residual report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// PDE residual bound, scaled by 1 + max|f|.
    pub pde: f64,
    /// Boundary residual bound relative to max|u|.
    pub boundary: f64,
    /// Initial residual bound relative to the L2 norm of phi.
    pub initial: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { pde: 5e-3, boundary: 1e-4, initial: 0.02 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeResidual {
    pub linf: f64,
    pub l2: f64,
    /// Earliest time included (T/10).
    pub t_min: f64,
    pub steps: usize,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialResidual {
    pub l2: f64,
    pub phi_l2: f64,
}

impl InitialResidual {
    /// l2 / ||phi||, or l2 itself when phi vanishes.
    pub fn relative(&self) -> f64 {
        if self.phi_l2 > 0.0 {
            self.l2 / self.phi_l2
        } else {
            self.l2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub pde: bool,
    pub boundary: bool,
    pub initial: bool,
}

impl Verdicts {
    pub fn all(&self) -> bool {
        self.pde && self.boundary && self.initial
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub pde_linf: f64,
    pub pde_l2: f64,
    pub boundary_max: f64,
    /// Relative L2 initial residual.
    pub initial_l2: f64,
    pub nx: usize,
    pub nt: usize,
    pub steps: usize,
    pub horizon: f64,
    pub max_abs_u: f64,
    pub max_abs_f: f64,
    pub tolerances: Tolerances,
    pub verdicts: Verdicts,
}

impl ResidualReport {
    pub fn new(
        field: &SolutionField,
        pde: &PdeResidual,
        boundary_max: f64,
        initial: &InitialResidual,
        max_abs_f: f64,
        tolerances: Tolerances,
    ) -> Self {
        let max_abs_u = field.max_abs();
        let verdicts = Verdicts {
            pde: pde.linf <= tolerances.pde * (1.0 + max_abs_f),
            boundary: boundary_max <= tolerances.boundary * max_abs_u,
            initial: initial.relative() <= tolerances.initial,
        };
        Self {
            pde_linf: pde.linf,
            pde_l2: pde.l2,
            boundary_max,
            initial_l2: initial.relative(),
            nx: field.nx(),
            nt: field.nt(),
            steps: pde.steps,
            horizon: field.horizon(),
            max_abs_u,
            max_abs_f,
            tolerances,
            verdicts,
        }
    }
}

/// |DN u - u_xx - f| at interior points with t >= T/10.
///
/// DN acts on each time trace on `steps` uniform intervals of [0, T]; `steps`
/// must be a multiple of nt. When it is larger than nt the weighted trace
/// t^(1-alpha0) u is resampled by monotone cubic interpolation. u_xx uses
/// fourth-order differences.
pub fn pde_residual(
    field: &SolutionField,
    f: Option<&(dyn Fn(f64) -> f64 + Sync)>,
    order: &DNMultiOrder,
    steps: usize,
) -> Result<PdeResidual> {
    let (nt, nx) = (field.nt(), field.nx());
    if nt < 64 || nx < 8 {
        return Err(Error::Config(format!("PDE residual needs nt >= 64 and nx >= 8 (got nt = {nt}, nx = {nx})")));
    }
    if steps == 0 || !steps.is_multiple_of(nt) {
        return Err(Error::Config(format!("steps = {steps} must be a positive multiple of nt = {nt}")));
    }
    let horizon = field.horizon();
    let ratio = steps / nt;
    let h = horizon / steps as f64;
    let gamma = 1.0 - field.alpha0;
    let dn_cols: Vec<Vec<f64>> = (1..nx - 1)
        .into_par_iter()
        .map(|j| {
            let mut nodes = vec![0.0];
            let mut g = vec![field.origin[j]];
            for (t, row) in field.t_grid.iter().zip(&field.values) {
                nodes.push(*t);
                g.push(t.powf(gamma) * row[j]);
            }
            let fine = if ratio == 1 {
                g
            } else {
                let s = SampledFunction::new(nodes, g)?;
                (0..=steps).map(|k| s.eval(k as f64 * h)).collect()
            };
            let samples = GridSamples::from_weighted(gamma, &fine, h)?;
            let dn = dn_apply_on_grid(order, &samples)?;
            Ok((1..=nt).map(|i| dn[i * ratio]).collect())
        })
        .collect::<Result<_>>()?;
    let dx = 1.0 / (nx - 1) as f64;
    let fx: Vec<f64> = field.x_grid.iter().map(|&x| f.map_or(0.0, |f| f(x))).collect();
    let t_min = horizon / 10.0;
    let (mut linf, mut sq, mut points) = (0.0f64, 0.0, 0usize);
    for (i, row) in field.values.iter().enumerate() {
        if field.t_grid[i] < t_min * (1.0 - 1e-12) {
            continue;
        }
        for j in 1..nx - 1 {
            let r = dn_cols[j - 1][i] - second_derivative(row, j, dx) - fx[j];
            linf = linf.max(r.abs());
            sq += r * r;
            points += 1;
        }
    }
    let l2 = if points > 0 { (sq / points as f64).sqrt() } else { 0.0 };
    Ok(PdeResidual { linf, l2, t_min, steps, points })
}

/// max over grid times of |u(t, 1)| + |u_x(t, 0) - u_x(t, 1)|, with
/// fourth-order one-sided differences.
pub fn boundary_residual(field: &SolutionField) -> f64 {
    let dx = 1.0 / (field.nx() - 1) as f64;
    field
        .values
        .iter()
        .map(|row| {
            let (l, r) = end_slopes(row, dx);
            row.last().unwrap().abs() + (l - r).abs()
        })
        .fold(0.0, f64::max)
}

/// L2 over x of (J^(1-alpha0) u)(0+, x) - phi(x).
///
/// The weighted trace t^(1-alpha0) u is extrapolated to t = 0 from the two
/// earliest grid times (linearly in s = t^rho), J^(1-alpha0) of the trace is
/// taken at those two times and the results are extrapolated the same way.
pub fn initial_residual(field: &SolutionField, phi: &dyn Fn(f64) -> f64) -> Result<InitialResidual> {
    if field.nt() < 2 {
        return Err(Error::Config("initial residual needs at least two grid times".into()));
    }
    let (a0, a1) = (field.alpha0, field.alpha1);
    let rho = a0 + a1 - 1.0;
    let gamma = 1.0 - a0;
    let h = field.dt();
    let (t1, t2) = (field.t_grid[0], field.t_grid[1]);
    let (s1, s2) = (t1.powf(rho), t2.powf(rho));
    let extrapolate = |v1: f64, v2: f64| (s2 * v1 - s1 * v2) / (s2 - s1);
    let mut err = Vec::with_capacity(field.nx());
    let mut reference = Vec::with_capacity(field.nx());
    for (j, &x) in field.x_grid.iter().enumerate() {
        let g1 = t1.powf(gamma) * field.values[0][j];
        let g2 = t2.powf(gamma) * field.values[1][j];
        let samples = GridSamples::from_weighted(gamma, &[extrapolate(g1, g2), g1, g2], h)?;
        let v = rl_integral_on_grid(gamma, &samples);
        let target = phi(x);
        err.push(extrapolate(v[1], v[2]) - target);
        reference.push(target);
    }
    let dx = 1.0 / (field.nx() - 1) as f64;
    Ok(InitialResidual { l2: trapezoid_l2(&err, dx), phi_l2: trapezoid_l2(&reference, dx) })
}

/// Change of the first mode over one step, lambda_1 (T/nt)^rho, targeted by
/// [`initial_check_horizon`].
pub const INITIAL_STEP_CHANGE: f64 = 2e-3;

/// Horizon of a short run on which the two-point extrapolation in
/// [`initial_residual`] resolves the first mode.
pub fn initial_check_horizon(alpha0: f64, alpha1: f64, nt: usize) -> f64 {
    let rho = alpha0 + alpha1 - 1.0;
    nt as f64 * (INITIAL_STEP_CHANGE / eigenvalue(1)).powf(1.0 / rho)
}

fn trapezoid_l2(v: &[f64], dx: f64) -> f64 {
    let n = v.len();
    let inner: f64 = v[1..n - 1].iter().map(|a| a * a).sum();
    (dx * (inner + 0.5 * (v[0] * v[0] + v[n - 1] * v[n - 1]))).sqrt()
}

/// Crank-Nicolson field and an estimate of its own discretization error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeatOracle {
    pub field: SolutionField,
    pub error_estimate: f64,
}

/// Substeps of the Crank-Nicolson march per output interval.
const SUBSTEPS: usize = 8;

/// Reference solution of u_t = u_xx + f with u(t, 1) = 0 and
/// u_x(t, 0) = u_x(t, 1) by Crank-Nicolson on nx nodes.
///
/// Ghost values come from the centered boundary condition and from the
/// equation at x = 1, where u_t = 0 forces u_xx(t, 1) = -f(1). The error
/// estimate compares against runs with twice the time steps and half the
/// spatial nodes.
pub fn heat_oracle(
    phi: &dyn Fn(f64) -> f64,
    f: Option<&dyn Fn(f64) -> f64>,
    horizon: f64,
    nx: usize,
    nt: usize,
) -> Result<HeatOracle> {
    if !(horizon > 0.0 && horizon.is_finite()) || nx < 8 || nt < 1 {
        return Err(Error::Config(format!("heat oracle needs T > 0, nx >= 8, nt >= 1 (got {horizon}, {nx}, {nt})")));
    }
    let base = crank_nicolson(phi, f, horizon, nx, nt, SUBSTEPS)?;
    let finer = crank_nicolson(phi, f, horizon, nx, nt, 2 * SUBSTEPS)?;
    let mut estimate = max_diff(&base, &finer, 1);
    if (nx - 1).is_multiple_of(2) && (nx - 1) / 2 >= 8 {
        let coarse = crank_nicolson(phi, f, horizon, (nx - 1) / 2 + 1, nt, SUBSTEPS)?;
        // Second order: the coarse grid error is about four times the fine one.
        estimate = estimate.max(max_diff(&base, &coarse, 2) / 3.0);
    }
    let x_grid: Vec<f64> = (0..nx).map(|j| j as f64 / (nx - 1) as f64).collect();
    let t_grid: Vec<f64> = (1..=nt).map(|i| i as f64 * horizon / nt as f64).collect();
    let weighted = base.clone();
    let origin = x_grid.iter().map(|&x| phi(x)).collect();
    let field = SolutionField { alpha0: 1.0, alpha1: 1.0, t_grid, x_grid, values: base, weighted, origin };
    let mut out = HeatOracle { field, error_estimate: estimate };
    for (row, t) in out.field.weighted.iter_mut().zip(&out.field.t_grid) {
        row.iter_mut().for_each(|v| *v *= t);
    }
    Ok(out)
}

/// Agreement between a classical solution field and the heat oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleAgreement {
    pub linf: f64,
    pub error_estimate: f64,
    /// max(floor, 3 x error_estimate).
    pub tolerance: f64,
    pub pass: bool,
}

/// Default floor of the oracle agreement tolerance.
pub const ORACLE_TOL: f64 = 1e-3;

/// L-infinity distance between `field` and `oracle.field` on their common grid.
pub fn oracle_agreement(field: &SolutionField, oracle: &HeatOracle, floor: f64) -> Result<OracleAgreement> {
    let other = &oracle.field;
    if field.nt() != other.nt() || field.nx() != other.nx() || field.horizon() != other.horizon() {
        return Err(Error::Config(format!(
            "grids differ: {}x{} on [0, {}] against {}x{} on [0, {}]",
            field.nt(),
            field.nx(),
            field.horizon(),
            other.nt(),
            other.nx(),
            other.horizon()
        )));
    }
    let linf = max_diff(&field.values, &other.values, 1);
    let tolerance = floor.max(3.0 * oracle.error_estimate);
    Ok(OracleAgreement { linf, error_estimate: oracle.error_estimate, tolerance, pass: linf <= tolerance })
}

fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>], stride: usize) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| rb.iter().enumerate().map(move |(j, v)| (ra[j * stride] - v).abs()))
        .fold(0.0, f64::max)
}

fn crank_nicolson(
    phi: &dyn Fn(f64) -> f64,
    f: Option<&dyn Fn(f64) -> f64>,
    horizon: f64,
    nx: usize,
    nt: usize,
    substeps: usize,
) -> Result<Vec<Vec<f64>>> {
    // Unknowns u_0..u_{n-1}; u_n = u(t, 1) = 0.
    let n = nx - 1;
    let dx = 1.0 / n as f64;
    let inv = 1.0 / (dx * dx);
    let fv = |x: f64| f.map_or(0.0, |f| f(x));
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);
    // u_{-1} = u_1 + 2 u_{n-1} + dx^2 f(1)
    a[(0, 0)] = -2.0 * inv;
    a[(0, 1)] += 2.0 * inv;
    a[(0, n - 1)] += 2.0 * inv;
    b[0] = fv(0.0) + fv(1.0);
    for i in 1..n {
        a[(i, i - 1)] = inv;
        a[(i, i)] = -2.0 * inv;
        if i + 1 < n {
            a[(i, i + 1)] = inv;
        }
        b[i] = fv(i as f64 * dx);
    }
    let dt = horizon / (nt * substeps) as f64;
    let id = DMatrix::<f64>::identity(n, n);
    let lhs = (&id - &a * (0.5 * dt)).lu();
    let rhs = &id + &a * (0.5 * dt);
    let forcing = &b * dt;
    let mut u = DVector::from_iterator(n, (0..n).map(|i| phi(i as f64 * dx)));
    let bound = 1e3 * (u.amax() + horizon * b.amax() + f64::MIN_POSITIVE);
    let mut rows = Vec::with_capacity(nt);
    for _ in 0..nt {
        for _ in 0..substeps {
            let r = &rhs * &u + &forcing;
            u = lhs.solve(&r).ok_or_else(|| Error::Unstable("Crank-Nicolson system is singular".into()))?;
        }
        if !u.iter().all(|v| v.is_finite()) || u.amax() > bound {
            return Err(Error::Unstable(format!("heat oracle norm {} exceeds {bound}", u.amax())));
        }
        let mut row: Vec<f64> = u.iter().copied().collect();
        row.push(0.0);
        rows.push(row);
    }
    Ok(rows)
}
