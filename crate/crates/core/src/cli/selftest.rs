//! Quick invariant checks bundled with the binary.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use super::expr::parse_expression;
use crate::backward_solver::{recover_source, BackwardProblem};
use crate::forward_solver::{solve_forward, ForwardProblem, SpatialFn};
use crate::fractional_ops::rl_integral;
use crate::special_functions::{gamma, ml_eval, mltf_eval, MLIndex, MLTFSpec};
use crate::spectral_basis::{eval_eigenfunction, project, reconstruct, SpectralCoeffs};
use crate::verification::{heat_oracle, oracle_agreement, ORACLE_TOL};
use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct SelftestCase {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn() -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 8] = [
    ("mittag-leffler closed forms", closed_forms),
    ("two-parameter identity", two_parameter_identity),
    ("bi-orthogonality", biorthogonality),
    ("riemann-liouville semigroup", semigroup),
    ("classical heat mode", heat_mode),
    ("heat oracle agreement", heat_agreement),
    ("backward round trip", round_trip),
    ("expression grammar", grammar),
];

pub fn selftest() -> Vec<SelftestCase> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let (pass, detail) = check().unwrap_or_else(|e| (false, e.to_string()));
            SelftestCase { name: name.to_string(), pass, detail, seconds: start.elapsed().as_secs_f64() }
        })
        .collect()
}

fn verdict(err: f64, tol: f64) -> (bool, String) {
    (err <= tol, format!("error {err:.2e} (tolerance {tol:.0e})"))
}

fn closed_forms() -> Result<(bool, String)> {
    let mut err: f64 = 0.0;
    for i in 0..=70 {
        let z = -30.0 + 0.5 * i as f64;
        let e = z.exp();
        err = err.max((ml_eval(MLIndex::new(1.0, 1.0)?, z)? - e).abs() / e);
    }
    for i in 0..=40 {
        let x = 2.5 * i as f64;
        err = err.max((ml_eval(MLIndex::new(2.0, 1.0)?, -x)? - x.sqrt().cos()).abs());
    }
    Ok(verdict(err, 1e-10))
}

fn two_parameter_identity() -> Result<(bool, String)> {
    let mut err: f64 = 0.0;
    for a in [0.3, 0.65, 1.0] {
        for lambda in [0.5, 4.0 * PI * PI, 400.0] {
            for t in [0.01, 0.3, 1.0] {
                let v = lambda * mltf_eval(MLTFSpec::new(a, a + 1.0, lambda)?, t)?
                    + mltf_eval(MLTFSpec::new(a, 1.0, lambda)?, t)?;
                err = err.max((v - 1.0).abs());
            }
        }
    }
    Ok(verdict(err, 1e-10))
}

fn biorthogonality() -> Result<(bool, String)> {
    let n = 6;
    let mut err: f64 = 0.0;
    for id in SpectralCoeffs::ids(n) {
        let c = project(&|x| eval_eigenfunction(id, x), n, 64)?;
        for other in SpectralCoeffs::ids(n) {
            let expected = if other == id { 1.0 } else { 0.0 };
            err = err.max((c.get(other) - expected).abs());
        }
    }
    Ok(verdict(err, 1e-10))
}

fn semigroup() -> Result<(bool, String)> {
    let inner = |t: f64| gamma(3.0).unwrap() / gamma(3.5).unwrap() * t.powf(2.5);
    let value = rl_integral(0.3, &inner, 1.0, 4096)?;
    let exact = gamma(3.0)? / gamma(3.8)?;
    Ok(verdict((value - exact).abs() / exact, 1e-4))
}

fn sine() -> SpatialFn {
    Arc::new(|x: f64| (2.0 * PI * x).sin())
}

fn heat_mode() -> Result<(bool, String)> {
    let sol = solve_forward(&ForwardProblem::new(1.0, 1.0, 0.05, sine()).with_modes(8).with_grid(65, 16))?;
    let value = sol.field.evaluate(0.05, 0.25)?;
    Ok(verdict((value - (-0.2 * PI * PI).exp()).abs(), 1e-9))
}

fn heat_agreement() -> Result<(bool, String)> {
    let phi = sine();
    let sol = solve_forward(&ForwardProblem::new(1.0, 1.0, 0.05, phi.clone()).with_modes(8).with_grid(65, 32))?;
    let oracle = heat_oracle(phi.as_ref(), None, 0.05, 65, 32)?;
    let a = oracle_agreement(&sol.field, &oracle, ORACLE_TOL)?;
    Ok((a.pass, format!("linf {:.2e} (tolerance {:.1e})", a.linf, a.tolerance)))
}

fn round_trip() -> Result<(bool, String)> {
    let zero: SpatialFn = Arc::new(|_| 0.0);
    let p = ForwardProblem::new(0.9, 0.8, 1.0, zero.clone()).with_source(sine()).with_modes(8).with_grid(65, 16);
    let sol = solve_forward(&p)?;
    let u_t = sol.u_coeffs.last().expect("nt >= 1").clone();
    let psi: SpatialFn = Arc::new(move |x| reconstruct(&u_t, x));
    let rec = recover_source(&BackwardProblem::new(0.9, 0.8, 1.0, zero, psi).with_modes(8).with_grid(65, 16))?;
    let err = rec.x_grid.iter().zip(&rec.f_grid).map(|(&x, f)| (f - (2.0 * PI * x).sin()).abs()).fold(0.0, f64::max);
    Ok(verdict(err, 1e-3))
}

fn grammar() -> Result<(bool, String)> {
    let cases = [("sin(2*pi*x)", 0.25, 1.0), ("2*(1-x)", 0.0, 2.0), ("x^2^3", 0.5, 0.003_906_25)];
    let mut err: f64 = 0.0;
    for (text, x, expected) in cases {
        match parse_expression(text) {
            Ok(e) => err = err.max((e.eval(x) - expected).abs()),
            Err(e) => return Ok((false, e.to_string())),
        }
    }
    Ok(verdict(err, 1e-15))
}
