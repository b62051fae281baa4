//! Gamma function and relatives on the real line.
//!
//! Lanczos approximation (g = 607/128, 15 coefficients) for x >= 0.5 and the
//! reflection formula below that. `sin_pi` reduces its argument exactly so
//! values close to the poles keep full relative accuracy.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_189e-5,
    4.652_362_892_704_858e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_125e-4,
    -2.102_644_417_241_049e-4,
    2.174_396_181_152_126_4e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_275e-5,
    -2.619_083_840_158_141e-5,
    3.689_918_265_953_162_5e-6,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (Gamma(x + 1)).
    let mut sum = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (x + k as f64);
    }
    sum
}

/// sin(pi x) with exact argument reduction.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let n = x.round();
    let r = x - n; // exact, |r| <= 1/2
    let s = (PI * r).sin();
    if (n as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

fn gamma_positive(x: f64) -> f64 {
    // x >= 0.5
    if x == x.floor() && x <= 23.0 {
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return acc;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let sum = lanczos_sum(z);
    // Split the power so that Gamma(171) does not overflow in the intermediate.
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * sum
}

/// Gamma function for real arguments.
///
/// Returns a domain error at the poles 0, -1, -2, ...
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("gamma of NaN".into()));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Pole { pole: x });
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x >= 0.5 {
        gamma_positive(x)
    } else {
        PI / (sin_pi(x) * gamma_positive(1.0 - x))
    }
}

/// Reciprocal gamma function 1/Gamma(x); entire, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x >= 0.5 {
        if x > 171.6 {
            return 0.0;
        }
        1.0 / gamma_positive(x)
    } else {
        let g = gamma_positive(1.0 - x);
        if g.is_infinite() {
            return 0.0;
        }
        sin_pi(x) * g / PI
    }
}

/// Natural logarithm of |Gamma(x)| for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        return (PI / sin_pi(x)).ln() - ln_gamma(1.0 - x);
    }
    if x < 20.0 {
        return gamma_positive(x).ln();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}
