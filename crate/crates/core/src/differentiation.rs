//! Derivatives of functions on [0, 1] at the endpoints, from a Chebyshev
//! interpolant, plus finite-difference helpers on uniform grids.

use std::f64::consts::PI;

const DEGREE: usize = 32;

/// Values of f^(d)(0) and f^(d)(1) for d = 0..=max_order.
pub(crate) fn endpoint_derivatives<F: Fn(f64) -> f64 + ?Sized>(f: &F, max_order: usize) -> Vec<(f64, f64)> {
    let n = DEGREE;
    let vals: Vec<f64> = (0..=n).map(|j| f(0.5 * (1.0 + (PI * j as f64 / n as f64).cos()))).collect();
    // Coefficients with f(y) = c0/2 + sum_{k>=1} c_k T_k(y), y = 2x - 1.
    let mut c: Vec<f64> = (0..=n)
        .map(|k| {
            let s: f64 = (0..=n)
                .map(|j| {
                    let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                    w * vals[j] * (PI * (j * k) as f64 / n as f64).cos()
                })
                .sum();
            2.0 * s / n as f64
        })
        .collect();
    c[n] *= 0.5;
    let mut out = Vec::with_capacity(max_order + 1);
    for d in 0..=max_order {
        out.push(eval_ends(&c));
        if d < max_order {
            c = derivative(&c);
        }
    }
    out
}

fn eval_ends(c: &[f64]) -> (f64, f64) {
    let mut at0 = 0.5 * c[0];
    let mut at1 = 0.5 * c[0];
    for (k, &v) in c.iter().enumerate().skip(1) {
        at1 += v;
        at0 += if k % 2 == 0 { v } else { -v };
    }
    (at0, at1)
}

/// Coefficients of d/dx for the map x -> y = 2x - 1.
fn derivative(c: &[f64]) -> Vec<f64> {
    let n = c.len() - 1;
    let mut d = vec![0.0; n + 1];
    for k in (1..=n).rev() {
        let next = if k < n { d[k + 1] } else { 0.0 };
        d[k - 1] = next + 2.0 * k as f64 * c[k];
    }
    d.iter().map(|v| 2.0 * v).collect()
}

/// Largest |fourth difference| / h^4 of f on a uniform grid of `cells` cells.
pub(crate) fn max_fourth_difference<F: Fn(f64) -> f64 + ?Sized>(f: &F, cells: usize) -> f64 {
    let h = 1.0 / cells as f64;
    let v: Vec<f64> = (0..=cells).map(|i| f(i as f64 * h)).collect();
    v.windows(5).map(|w| ((w[0] - 4.0 * w[1] + 6.0 * w[2] - 4.0 * w[3] + w[4]) / h.powi(4)).abs()).fold(0.0, f64::max)
}

/// Fourth-order second derivative at interior index i of uniform samples,
/// with six-point one-sided stencils next to the ends.
pub(crate) fn second_derivative(v: &[f64], i: usize, h: f64) -> f64 {
    const SKEW: [f64; 6] = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];
    let n = v.len();
    let s = if i == 1 {
        (0..6).map(|j| SKEW[j] * v[j]).sum()
    } else if i + 2 == n {
        (0..6).map(|j| SKEW[j] * v[n - 1 - j]).sum()
    } else {
        -v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]
    };
    s / (12.0 * h * h)
}

/// Fourth-order one-sided first derivatives at the left and right ends.
pub(crate) fn end_slopes(v: &[f64], h: f64) -> (f64, f64) {
    const W: [f64; 5] = [-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25];
    let n = v.len();
    let left = (0..5).map(|j| W[j] * v[j]).sum::<f64>() / h;
    let right = -(0..5).map(|j| W[j] * v[n - 1 - j]).sum::<f64>() / h;
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_endpoint_derivatives() {
        let d = endpoint_derivatives(&|x: f64| (2.0 * PI * x).sin(), 4);
        let w = 2.0 * PI;
        assert!(d[0].0.abs() < 1e-14 && d[0].1.abs() < 1e-13);
        assert!((d[1].0 - w).abs() < 1e-11 && (d[1].1 - w).abs() < 1e-11);
        assert!(d[2].1.abs() < 1e-8);
        assert!((d[3].0 + w.powi(3)).abs() < 1e-6 * w.powi(3));
        let p = endpoint_derivatives(&|x: f64| x * x * x, 3);
        assert!((p[1].1 - 3.0).abs() < 1e-12 && (p[2].1 - 6.0).abs() < 1e-9 && (p[3].0 - 6.0).abs() < 1e-6);
    }

    #[test]
    fn finite_differences() {
        let h = 1.0 / 64.0;
        let v: Vec<f64> = (0..=64).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((second_derivative(&v, 10, h) - 6.0 * 10.0 * h).abs() < 1e-10);
        let q: Vec<f64> = (0..=64).map(|i| (i as f64 * h).powi(4)).collect();
        for i in [1, 2, 40, 62, 63] {
            let x = i as f64 * h;
            assert!((second_derivative(&q, i, h) - 12.0 * x * x).abs() < 1e-9, "{i}");
        }
        let (l, r) = end_slopes(&v, h);
        assert!(l.abs() < 1e-12 && (r - 3.0).abs() < 1e-10);
        assert!(max_fourth_difference(&|x: f64| x.powi(3), 100) < 1e-3);
    }
}
