mod common;

use common::*;
use dnspectral::fractional_ops::{
    dn_apply, fundamental_relation_residual, rl_derivative, rl_integral, rl_integral_on_grid, rl_monomial,
    DNMultiOrder, GridSamples, SampledFunction,
};
use dnspectral::special_functions::gamma;
use proptest::prelude::*;

const STEPS: usize = 4096;

fn monomial(mu: f64) -> impl Fn(f64) -> f64 + Sync {
    move |t: f64| if t == 0.0 && mu == 0.0 { 1.0 } else { t.powf(mu) }
}

/// c t^e for the chain of exact monomial maps; `true` marks a derivative.
fn chain(mu: f64, stages: &[(f64, bool)], t: f64) -> f64 {
    let (mut c, mut e) = (1.0, mu);
    for &(a, derivative) in stages {
        let (k, next) = if derivative && a == 1.0 { (e, e - 1.0) } else { rl_monomial(a, e, derivative).unwrap() };
        c *= k;
        e = next;
    }
    c * t.powf(e)
}

#[test]
fn reference_values() {
    let v = rl_integral(0.3, &monomial(0.7), 1.0, STEPS).unwrap();
    assert!(rel(v, RL_03_OF_T07_AT_1) < 1e-5, "{v}");
    let d = rl_derivative(0.3, &|_: f64| 1.0, 1.0, STEPS).unwrap();
    assert!(rel(d, RL_03_OF_ONE_AT_1) < 1e-10, "{d}");
    let d = rl_derivative(0.5, &monomial(0.5), 0.7, STEPS).unwrap();
    assert!((d - 0.886_226_925_452_758).abs() < 1e-4, "{d}");
}

#[test]
fn semigroup() {
    let t = 1.0;
    for mu in [0.0, 1.0, 2.0] {
        let f = GridSamples::from_function(&monomial(mu), t, STEPS).unwrap();
        for a in [0.3, 0.5, 0.7] {
            for b in [0.3, 0.5, 0.7] {
                let inner = rl_integral_on_grid(b, &f);
                let inner = GridSamples { h: f.h, gamma: 0.0, c0: 0.0, rest: inner };
                let nested = *rl_integral_on_grid(a, &inner).last().unwrap();
                let direct = rl_integral(a + b, &monomial(mu), t, STEPS).unwrap();
                assert!(rel(nested, direct) < 1e-4, "mu {mu}, a {a}, b {b}: {nested} {direct}");
                let exact = chain(mu, &[(a + b, false)], t);
                assert!(rel(direct, exact) < 1e-4, "mu {mu}, a {a}, b {b}");
            }
        }
    }
}

#[test]
fn left_inverse() {
    let t = 1.0;
    let nodes: Vec<f64> = (0..=STEPS).map(|j| j as f64 * t / STEPS as f64).collect();
    for mu in [1.0, 2.0, 3.0] {
        let f = GridSamples::from_function(&monomial(mu), t, STEPS).unwrap();
        for a in [0.3, 0.5, 0.7] {
            let inner = SampledFunction::new(nodes.clone(), rl_integral_on_grid(a, &f)).unwrap();
            let back = rl_derivative(a, &inner, t, STEPS).unwrap();
            assert!(rel(back, 1.0) < 1e-4, "mu {mu}, alpha {a}: {back}");
        }
    }
}

#[test]
fn riemann_liouville_specialization() {
    let t = 0.8;
    for a in [0.3, 0.5, 0.7] {
        let order = DNMultiOrder::pair(a, 1.0).unwrap();
        for mu in [0.5, 1.0, 2.0] {
            let v = dn_apply(&order, &monomial(mu), t, STEPS).unwrap();
            let exact = chain(mu, &[(a, true)], t);
            assert!(rel(v, exact) < 1e-3, "alpha {a}, mu {mu}: {v} {exact}");
        }
        let kernel = dn_apply(
            &order,
            &dnspectral::fractional_ops::PowerWeighted { gamma: 1.0 - a, regular: |_: f64| 1.0 },
            t,
            STEPS,
        );
        assert!(kernel.unwrap().abs() < 1e-10, "alpha {a}");
    }
}

#[test]
fn caputo_specialization() {
    let t = 1.0;
    for a in [0.3, 0.5, 0.6, 0.7] {
        let order = DNMultiOrder::pair(1.0, a).unwrap();
        for mu in [1.0, 1.5, 2.0, 3.0] {
            let v = dn_apply(&order, &monomial(mu), t, STEPS).unwrap();
            let exact = gamma(mu + 1.0).unwrap() / gamma(mu + 1.0 - a).unwrap() * t.powf(mu - a);
            assert!(rel(v, exact) < 1e-3, "alpha {a}, mu {mu}: {v} {exact}");
        }
    }
}

#[test]
fn hilfer_specialization() {
    let t = 1.0;
    for a in [0.3, 0.6, 0.8] {
        for b in [0.25, 0.5, 0.75] {
            let (a0, a1) = (1.0 - (1.0 - a) * (1.0 - b), 1.0 - b * (1.0 - a));
            let order = DNMultiOrder::pair(a0, a1).unwrap();
            for mu in [1.0, 2.0] {
                let v = dn_apply(&order, &monomial(mu), t, STEPS).unwrap();
                // J^(b(1-a)) d/dt J^((1-b)(1-a)) t^mu
                let exact = chain(mu, &[((1.0 - b) * (1.0 - a), false), (1.0, true), (b * (1.0 - a), false)], t);
                assert!(rel(v, exact) < 1e-3, "alpha {a}, type {b}, mu {mu}: {v} {exact}");
            }
        }
    }
}

#[test]
fn zero_input() {
    let order = DNMultiOrder::pair(0.8, 0.7).unwrap();
    assert_eq!(dn_apply(&order, &|_: f64| 0.0, 1.0, 256).unwrap(), 0.0);
    assert_eq!(fundamental_relation_residual(&order, &|_: f64| 0.0, 1.0, 256).unwrap(), 0.0);
}

#[test]
fn fundamental_relation() {
    let order = DNMultiOrder::pair(1.0, 0.6).unwrap();
    let r = fundamental_relation_residual(&order, &|t: f64| t, 1.0, 2048).unwrap();
    assert!(r <= 5e-3, "{r}");
    let order = DNMultiOrder::pair(0.9, 0.9).unwrap();
    let f = |t: f64| t * t;
    let residuals: Vec<f64> =
        [256, 512, 1024, 2048].iter().map(|&n| fundamental_relation_residual(&order, &f, 0.5, n).unwrap()).collect();
    for w in residuals.windows(2) {
        assert!(w[1] < w[0], "{residuals:?}");
        assert!((w[0] / w[1]).log2() >= 1.0, "{residuals:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn linearity(c1 in -3.0f64..3.0, c2 in -3.0f64..3.0, a0 in 0.3f64..=1.0, a1 in 0.3f64..=1.0, t in 0.1f64..2.0) {
        prop_assume!(a0 + a1 > 1.0);
        let order = DNMultiOrder::pair(a0, a1).unwrap();
        let f = |s: f64| (3.0 * s).sin() + s * s;
        let g = |s: f64| (-s).exp();
        let h = |s: f64| c1 * f(s) + c2 * g(s);
        let steps = 512;
        let lhs = dn_apply(&order, &h, t, steps).unwrap();
        let rhs = c1 * dn_apply(&order, &f, t, steps).unwrap() + c2 * dn_apply(&order, &g, t, steps).unwrap();
        let scale = (c1.abs() + c2.abs()) * (1.0 + lhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale.max(1e-300), "{} {}", lhs, rhs);
    }
}
