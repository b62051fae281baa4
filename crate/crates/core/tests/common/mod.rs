//! Shared helpers and reference values for the integration tests.
//!
//! The values are produced by `tests/oracles/reference_values.py` (mpmath,
//! 60 digits) and frozen here.
#![allow(dead_code)]
// Digits exactly as printed by the oracle script.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;
use std::sync::Arc;

use dnspectral::forward_solver::SpatialFn;

pub const ML_08_1_AT_M1: f64 = 0.38694857861897685;
pub const MLTF_07_09_39478_AT_05: f64 = 0.010133387895923065;
pub const CONV_07_07_WITH_07_1_AT_05: f64 = 3.7189770192737838e-4;
pub const U0_08_09_PHI1_F2_AT_05: f64 = 2.3415923309611353;
pub const U1_1_06_AT_02: f64 = 0.030695469921538591;
pub const U2_09_08_AT_03: f64 = 0.020944825982034636;
pub const RL_03_OF_T07_AT_1: f64 = 0.90863873285329044;
pub const RL_03_OF_ONE_AT_1: f64 = 0.77038318386656596;
/// E_{0.7,1.7}(-4 pi^2): u(1, x) = this * sin(2 pi x) for f = sin(2 pi x), phi = 0, orders (0.9, 0.8).
pub const PSI_SINE_09_08_T1: f64 = 0.025111414249406879;

/// sup of (1 + x)|E_{a,b}(-x)| over x = 0 and 10^(-3 + 11 i / 220), i = 0..=220.
pub const C1: [((f64, f64), f64); 5] = [
    ((0.5, 1.0), 1.0),
    ((0.7, 0.7), 0.77038318386656596),
    ((0.7, 1.0), 1.0),
    ((0.7, 1.7), 1.2007760437688012),
    ((0.9, 0.9), 0.93577872091287279),
];

/// max over k in [4, 64] of amplification(k) / lambda_k at T = 1.
pub const C2: [((f64, f64), f64); 4] = [
    ((0.9, 0.8), 1.0005301562655766),
    ((1.0, 0.6), 1.0007146596361345),
    ((0.7, 0.7), 1.0010636723013118),
    ((1.0, 1.0), 1.0),
];

pub const FRACTIONAL_ORDERS: [(f64, f64); 3] = [(0.9, 0.8), (1.0, 0.6), (0.7, 0.7)];

pub fn c1_grid() -> Vec<f64> {
    std::iter::once(0.0).chain((0..=220).map(|i| 10f64.powf(-3.0 + 11.0 * i as f64 / 220.0))).collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn spatial(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> SpatialFn {
    Arc::new(f)
}

pub fn sine() -> SpatialFn {
    spatial(|x| (2.0 * PI * x).sin())
}

pub fn zero() -> SpatialFn {
    spatial(|_| 0.0)
}
