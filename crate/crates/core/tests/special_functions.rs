mod common;

use common::*;
use dnspectral::special_functions::mittag_leffler::{asymptotic, laplace_inversion, series};
use dnspectral::special_functions::{
    gamma, ml_eval, mltf_convolve, mltf_convolve_same_kernel, mltf_eval, rgamma, MLIndex, MLTFSpec,
};
use dnspectral::Error;
use proptest::prelude::*;

fn ml(a: f64, b: f64, z: f64) -> f64 {
    ml_eval(MLIndex::new(a, b).unwrap(), z).unwrap()
}

#[test]
fn reference_values() {
    assert!(rel(ml(0.8, 1.0, -1.0), ML_08_1_AT_M1) < 1e-10);
    let spec = MLTFSpec::new(0.7, 0.9, 39.478).unwrap();
    assert!(rel(mltf_eval(spec, 0.5).unwrap(), MLTF_07_09_39478_AT_05) < 1e-10);
    assert_eq!(ml(1.0, 1.0, 1.0), std::f64::consts::E);
    assert!(ml(2.0, 1.0, -(std::f64::consts::FRAC_PI_2.powi(2))).abs() < 1e-15);
}

#[test]
fn convolution_reference() {
    let lambda = 4.0 * std::f64::consts::PI.powi(2);
    let a = MLTFSpec::new(0.7, 0.7, lambda).unwrap();
    let b = MLTFSpec::new(0.7, 1.0, lambda).unwrap();
    let tol = 1e-10;
    let q = mltf_convolve(a, b, 0.5, tol).unwrap();
    assert!((q - CONV_07_07_WITH_07_1_AT_05).abs() <= tol * (1.0 + q.abs()), "{q}");
    let closed = mltf_convolve_same_kernel(a, b, 0.5).unwrap();
    assert!(rel(closed, CONV_07_07_WITH_07_1_AT_05) < 1e-10, "{closed}");
    let one = MLTFSpec::new(1.0, 1.0, 0.0).unwrap();
    assert!((mltf_convolve(one, one, 2.0, 1e-12).unwrap() - 2.0).abs() < 1e-11);
    // Both kernels singular: s^-0.7 * s^-0.7 / Gamma(0.3)^2 = t^-0.4 / Gamma(0.6).
    let s = MLTFSpec::new(0.9522138411494334, 0.3, 0.0).unwrap();
    let exact = 0.7f64.powf(-0.4) / gamma(0.6).unwrap();
    assert!((mltf_convolve(s, s, 0.7, 1e-9).unwrap() - exact).abs() <= 1e-9 * (1.0 + exact));
}

#[test]
fn out_of_range_argument_is_rejected() {
    let idx = MLIndex::new(0.5, 1.0).unwrap();
    assert!(matches!(ml_eval(idx, 11.0), Err(Error::UnsupportedRange { .. })));
    assert!(ml_eval(idx, -1e12).unwrap().is_finite());
}

#[test]
fn boundedness_constants() {
    let xs = c1_grid();
    for ((a, b), c1) in C1 {
        let sup = xs.iter().map(|&x| (1.0 + x) * ml(a, b, -x).abs()).fold(0.0, f64::max);
        assert!(sup <= 1.05 * c1, "({a}, {b}): {sup} against {c1}");
        assert!(sup >= 0.95 * c1, "({a}, {b}): {sup} against {c1}");
    }
}

#[test]
fn branches_agree_on_the_overlap() {
    for a in [0.3, 0.5, 0.7, 0.9] {
        for b in [0.5, 1.0, 1.7] {
            for i in 0..=20 {
                let z = -0.5 - 0.05 * i as f64;
                let s = series(a, b, z);
                let l = laplace_inversion(a, b, z);
                assert!((s - l).abs() <= 1e-9 * s.abs(), "({a}, {b}, {z}): {s} {l}");
            }
            for i in 0..=20 {
                let z = -5.0 - 0.1 * i as f64;
                let l = laplace_inversion(a, b, z);
                assert!((ml(a, b, z) - l).abs() <= 1e-9 * l.abs(), "({a}, {b}, {z})");
            }
        }
    }
    for a in [0.3, 0.5, 0.7] {
        for z in [-50.0, -200.0, -1e4] {
            if let Some(v) = asymptotic(a, 1.0, z) {
                assert!(rel(v, laplace_inversion(a, 1.0, z)) < 1e-9, "({a}, {z})");
            }
        }
    }
}

#[test]
fn monotone_decay_on_the_negative_axis() {
    for a in [0.2, 0.5, 0.8, 1.0] {
        let mut prev = ml(a, 1.0, 0.0);
        assert_eq!(prev, 1.0);
        for i in 1..=400 {
            let x = 10f64.powf(-3.0 + 9.0 * i as f64 / 400.0);
            if a == 1.0 && x > 700.0 {
                break;
            }
            let v = ml(a, 1.0, -x);
            assert!(v > 0.0 && v < prev, "alpha {a}, x {x}: {v} after {prev}");
            prev = v;
        }
    }
}

proptest! {
    #[test]
    fn normalization(a in 0.05f64..=1.0, b in 0.1f64..3.0) {
        prop_assert!((ml(a, b, 0.0) - rgamma(b)).abs() <= 1e-12);
    }

    #[test]
    fn recurrence(a in 0.3f64..=1.0, b in 0.2f64..2.0, e in -6.0f64..0.7) {
        for z in [-(10f64.powf(e)), 5.0 * 10f64.powf(e.min(0.0))] {
            let lhs = ml(a, b, z);
            let rhs = rgamma(b) + z * ml(a, a + b, z);
            let tol = 1e-9 * lhs.abs();
            prop_assert!((lhs - rhs).abs() <= tol, "z {} lhs {} rhs {}", z, lhs, rhs);
        }
    }

    #[test]
    fn overflow_is_an_error(a in 0.05f64..0.15) {
        prop_assert!(ml_eval(MLIndex::new(a, 1.0).unwrap(), 10.0).is_err());
    }

    #[test]
    fn two_parameter_identity(a in 0.05f64..1.0, lambda in 0.01f64..1e4, t in 1e-3f64..10.0) {
        let v = lambda * mltf_eval(MLTFSpec::new(a, a + 1.0, lambda).unwrap(), t).unwrap()
            + mltf_eval(MLTFSpec::new(a, 1.0, lambda).unwrap(), t).unwrap();
        prop_assert!((v - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn convolution_is_symmetric(a in 0.3f64..=1.0, b1 in 0.3f64..1.5, b2 in 0.3f64..1.5, lambda in 0.0f64..100.0) {
        let tol = 1e-9;
        let p = MLTFSpec::new(a, b1, lambda).unwrap();
        let q = MLTFSpec::new(a, b2, lambda).unwrap();
        let pq = mltf_convolve(p, q, 0.7, tol).unwrap();
        let qp = mltf_convolve(q, p, 0.7, tol).unwrap();
        prop_assert!((pq - qp).abs() <= 2.0 * tol * (1.0 + pq.abs()));
    }

    #[test]
    fn exponential_case(z in -30.0f64..5.0) {
        prop_assert!(rel(ml(1.0, 1.0, z), z.exp()) <= 1e-10);
    }

    #[test]
    fn cosine_case(x in 0.0f64..100.0) {
        prop_assert!((ml(2.0, 1.0, -x) - x.sqrt().cos()).abs() <= 1e-10);
    }
}

#[test]
fn gamma_reference_points() {
    assert!(rel(gamma(0.7).unwrap(), 1.0 / RL_03_OF_ONE_AT_1) < 1e-14);
    assert!(rel(gamma(1.7).unwrap(), RL_03_OF_T07_AT_1) < 1e-14);
}
