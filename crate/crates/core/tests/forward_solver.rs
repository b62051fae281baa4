mod common;

use std::f64::consts::PI;

use common::*;
use dnspectral::forward_solver::{check_compatibility, solve_forward, ForwardProblem};
use dnspectral::fractional_ops::DNMultiOrder;
use dnspectral::special_functions::gamma;
use dnspectral::verification::{heat_oracle, pde_residual};
use dnspectral::Error;

fn bump(x: f64) -> f64 {
    x * x * (1.0 - x).powi(3)
}

fn l2_row(a: &[f64], b: &[f64]) -> f64 {
    let h = 1.0 / (a.len() - 1) as f64;
    let sq: f64 = a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum();
    (sq * h).sqrt()
}

#[test]
fn compatibility_reports() {
    assert!(check_compatibility(&|x: f64| (2.0 * PI * x).sin(), 1).passed());
    let r = check_compatibility(&|x: f64| x, 1);
    // phi' = 1 at both ends, so only phi(1) = 0 fails.
    assert_eq!(r.failures(), vec!["phi(1) = 0"], "{r:?}");
    let x0 = check_compatibility(&|x: f64| 2.0 * (1.0 - x), 1);
    assert!(x0.passed());
    assert!(check_compatibility(&bump, 1).passed());
}

#[test]
fn classical_heat_value() {
    let p = ForwardProblem::new(1.0, 1.0, 0.02, sine()).with_modes(16).with_grid(129, 32);
    let s = solve_forward(&p).unwrap();
    let exact = (-4.0 * PI * PI * 0.01).exp();
    assert!((s.field.evaluate(0.01, 0.25).unwrap() - exact).abs() < 1e-10);
    let oracle = heat_oracle(&|x: f64| (2.0 * PI * x).sin(), None, 0.02, 129, 32).unwrap();
    assert!((oracle.field.evaluate(0.01, 0.25).unwrap() - exact).abs() < 1e-4);
}

#[test]
fn superposition() {
    let (phi1, phi2) = (sine(), spatial(bump));
    let (f1, f2) = (spatial(|x| 1.0 - x), spatial(|x| (4.0 * PI * x).cos() * (1.0 - x)));
    let solve = |phi, f| {
        let p = ForwardProblem::new(0.9, 0.8, 1.0, phi).with_source(f).with_modes(12).with_grid(65, 16);
        solve_forward(&p).unwrap().field
    };
    let a = solve(phi1.clone(), f1.clone());
    let b = solve(phi2.clone(), f2.clone());
    let both = solve(spatial(move |x| phi1(x) + phi2(x)), spatial(move |x| f1(x) + f2(x)));
    for i in 0..both.nt() {
        for j in 0..both.nx() {
            let sum = a.values[i][j] + b.values[i][j];
            assert!((both.values[i][j] - sum).abs() <= 1e-9 * (1.0 + sum.abs()), "({i}, {j})");
        }
    }
}

#[test]
fn root_mode_is_a_single_mode() {
    for (a0, a1) in FRACTIONAL_ORDERS {
        let p = ForwardProblem::new(a0, a1, 1.0, spatial(|x| 2.0 * (1.0 - x))).with_modes(8).with_grid(33, 256);
        let s = solve_forward(&p).unwrap();
        let g = gamma(a0).unwrap();
        for (row, &t) in s.field.values.iter().zip(&s.field.t_grid) {
            for (v, &x) in row.iter().zip(&s.field.x_grid) {
                let exact = t.powf(a0 - 1.0) / g * 2.0 * (1.0 - x);
                assert!((v - exact).abs() <= 1e-12 * exact.abs().max(1.0));
            }
        }
        let order = DNMultiOrder::pair(a0, a1).unwrap();
        let r = pde_residual(&s.field, None, &order, 2048).unwrap();
        assert!(r.linf <= 5e-3, "({a0}, {a1}): {}", r.linf);
    }
}

#[test]
fn truncation_error_is_within_the_tail_estimate() {
    for (a0, a1) in [(0.9, 0.8), (1.0, 1.0)] {
        let solve = |n: usize| {
            let p = ForwardProblem::new(a0, a1, 0.5, spatial(bump)).with_modes(n).with_grid(8 * n + 1, 8);
            solve_forward(&p).unwrap()
        };
        let (coarse, fine) = (solve(8), solve(16));
        // Compare on the shared nodes of the coarse grid.
        let last = coarse.field.values.last().unwrap();
        let fine_last: Vec<f64> = fine.field.values.last().unwrap().iter().step_by(2).copied().collect();
        let diff = l2_row(last, &fine_last);
        assert!(diff <= coarse.tail_estimate, "({a0}, {a1}): {diff} > {}", coarse.tail_estimate);
        assert!(fine.tail_estimate < coarse.tail_estimate);
    }
}

#[test]
fn boundary_value_vanishes() {
    let p = ForwardProblem::new(0.7, 0.7, 1.0, sine()).with_source(spatial(bump)).with_modes(16).with_grid(65, 16);
    let f = solve_forward(&p).unwrap().field;
    let scale = f.max_abs();
    for (i, row) in f.values.iter().enumerate() {
        assert!(row.last().unwrap().abs() <= 1e-12 * scale);
        assert!(f.evaluate(f.t_grid[i], 1.0).unwrap().abs() <= 1e-12 * scale);
    }
    assert!(matches!(f.evaluate(2.0, 0.5), Err(Error::Domain(_))));
}
