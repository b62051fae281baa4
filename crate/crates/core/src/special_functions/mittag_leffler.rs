//! Two-parameter Mittag-Leffler function E_{a,b}(z) on the real line.
//!
//! Evaluation regions:
//! * |z| <= 1, and 0 < z <= 10: the defining power series, Kahan-summed
//!   (log-space terms for positive z so large orders do not overflow).
//! * z < -1: the algebraic asymptotic expansion when both its optimal
//!   truncation error and the exponentially small remainder are below
//!   round-off; otherwise numerical inversion of the Laplace transform
//!   s^(a-b) / (s^a - z) along an optimal parabolic contour.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{ln_gamma, rgamma};

/// Upper end of the positive range served by the series.
pub const Z_MAX: f64 = 10.0;

const SERIES_RADIUS: f64 = 1.0;
const LOG_EPS: f64 = -36.043_653_389_117_15; // ln(f64::EPSILON)
const LOG_TARGET: f64 = -34.538_776_394_910_684; // ln(1e-15)

/// Which branch `mittag_leffler` picks for an argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Series,
    Asymptotic,
    LaplaceInversion,
}

/// E_{alpha,beta}(z) for real z <= `Z_MAX`, alpha in (0, 2], any real beta.
///
/// Out-of-range arguments return NaN; the checked front end is
/// [`super::ml_eval`].
pub fn mittag_leffler(alpha: f64, beta: f64, z: f64) -> f64 {
    if alpha == 1.0 && beta == 1.0 {
        // Exponentially small for z << 0, beyond the reach of the
        // absolute-accuracy contour integral.
        return z.exp();
    }
    match select_branch(alpha, beta, z) {
        Branch::Series => series(alpha, beta, z),
        Branch::Asymptotic => asymptotic(alpha, beta, z).unwrap_or(f64::NAN),
        Branch::LaplaceInversion => laplace_inversion(alpha, beta, z),
    }
}

pub fn select_branch(alpha: f64, beta: f64, z: f64) -> Branch {
    if z >= -SERIES_RADIUS {
        return Branch::Series;
    }
    if asymptotic_is_converged(alpha, beta, z) {
        Branch::Asymptotic
    } else {
        Branch::LaplaceInversion
    }
}

/// Power series sum_k z^k / Gamma(alpha k + beta).
pub fn series(alpha: f64, beta: f64, z: f64) -> f64 {
    if z == 0.0 {
        return rgamma(beta);
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let ln_abs = z.abs().ln();
    let negative = z < 0.0;
    let mut past_peak = false;
    let mut prev_mag = f64::INFINITY;
    for k in 0..20_000usize {
        let arg = alpha * k as f64 + beta;
        let term = if arg > 2.0 {
            let mag = (k as f64 * ln_abs - ln_gamma(arg)).exp();
            if negative && k % 2 == 1 {
                -mag
            } else {
                mag
            }
        } else {
            z.powi(k as i32) * rgamma(arg)
        };
        // Kahan summation.
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        let mag = term.abs();
        if mag < prev_mag && arg > 2.0 {
            past_peak = true;
        }
        prev_mag = mag;
        if past_peak && mag <= 1e-17 * sum.abs() {
            break;
        }
        if past_peak && sum == 0.0 && mag == 0.0 {
            break;
        }
    }
    sum
}

fn asymptotic_terms(alpha: f64, beta: f64, z: f64) -> (f64, f64) {
    // -sum_{k>=1} z^{-k} / Gamma(beta - alpha k). The terms oscillate in size
    // (1/Gamma has zeros), so truncation follows the envelope
    // |z|^{-k} Gamma(1 - arg) / pi rather than the individual terms.
    let inv = 1.0 / z;
    let ln_x = (-z).ln();
    let mut pow = 1.0;
    let mut sum = 0.0;
    let mut smallest = f64::INFINITY;
    let mut ln_min = f64::INFINITY;
    for k in 1..5000 {
        pow *= inv;
        let arg = beta - alpha * k as f64;
        // |1/Gamma(x)| <= 1 on (0, 1) and <= Gamma(1 - x)/pi for x <= 0.
        let ln_env = -(k as f64) * ln_x
            + if arg >= 1.0 {
                -ln_gamma(arg)
            } else if arg > 0.0 {
                0.0
            } else {
                ln_gamma(1.0 - arg) - PI.ln()
            };
        if ln_env > ln_min + 2.0 {
            break;
        }
        if ln_env < ln_min {
            ln_min = ln_env;
            smallest = ln_env.exp();
        }
        if !(arg <= 0.0 && (arg - arg.round()).abs() < 1e-9) {
            // At a pole 1/Gamma vanishes; rounding in `arg` must not leave a
            // spurious term behind.
            sum += -pow * rgamma(arg);
        }
        if smallest < 1e-18 * sum.abs() {
            break;
        }
    }
    (sum, smallest)
}

fn asymptotic_is_converged(alpha: f64, beta: f64, z: f64) -> bool {
    if z >= 0.0 || alpha >= 1.0 {
        // For alpha >= 1 the exponential / oscillatory part is never negligible
        // enough to trust in general.
        return false;
    }
    let x = -z;
    // Exponentially small contributions from the saddles at arg(s) = +-pi/alpha.
    let decay = if alpha <= 2.0 / 3.0 { 1.0 } else { -(PI / alpha).cos() };
    let scale = x.powf(1.0 / alpha);
    if scale * decay < 42.0 {
        return false;
    }
    let (sum, smallest) = asymptotic_terms(alpha, beta, z);
    sum != 0.0 && smallest < 1e-17 * sum.abs()
}

/// Algebraic asymptotic expansion for z -> -infinity, alpha in (0,1).
///
/// Returns `None` when the expansion has not converged to round-off.
pub fn asymptotic(alpha: f64, beta: f64, z: f64) -> Option<f64> {
    if z >= 0.0 {
        return None;
    }
    let (sum, smallest) = asymptotic_terms(alpha, beta, z);
    if smallest.is_finite() && smallest <= 1e-8 * sum.abs().max(f64::MIN_POSITIVE) {
        Some(sum)
    } else {
        None
    }
}

/// Inverse Laplace transform evaluation of E_{alpha,beta}(z), valid for any
/// real z and alpha > 0.
pub fn laplace_inversion(alpha: f64, beta: f64, z: f64) -> f64 {
    if z == 0.0 {
        return rgamma(beta);
    }
    let t = 1.0;
    let theta = if z < 0.0 { PI } else { 0.0 };
    let kmin = (-alpha / 2.0 - theta / (2.0 * PI)).ceil() as i64;
    let kmax = (alpha / 2.0 - theta / (2.0 * PI)).floor() as i64;
    let abs_root = z.abs().powf(1.0 / alpha);

    // Poles of s^(a-b)/(s^a - z) on the principal sheet.
    let mut poles: Vec<(f64, Complex64)> = (kmin..=kmax)
        .map(|k| {
            let s = Complex64::from_polar(abs_root, (theta + 2.0 * PI * k as f64) / alpha);
            ((s.re + s.norm()) / 2.0, s)
        })
        .filter(|(phi, _)| *phi > 1e-15)
        .collect();
    poles.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut s_star = vec![Complex64::new(0.0, 0.0)];
    let mut phi = vec![0.0];
    for (p, s) in &poles {
        s_star.push(*s);
        phi.push(*p);
    }
    let j1 = s_star.len();
    let j = j1 - 1;
    let mut p_str = vec![(-2.0 * (alpha - beta + 1.0)).max(0.0)];
    p_str.extend(std::iter::repeat_n(1.0, j));
    let mut q_str = vec![1.0; j];
    q_str.push(f64::INFINITY);
    phi.push(f64::INFINITY);

    let admissible: Vec<usize> =
        (0..j1).filter(|&i| phi[i] < (LOG_TARGET - LOG_EPS) / t && phi[i] < phi[i + 1]).collect();

    let mut log_epsilon = LOG_TARGET;
    let (mu, h, n, region) = loop {
        let mut best: Option<(f64, f64, f64, usize)> = None;
        for &i in &admissible {
            let (mu_i, h_i, n_i) = if i < j1 - 1 {
                optimal_param_bounded(t, phi[i], phi[i + 1], p_str[i], q_str[i], log_epsilon)
            } else {
                optimal_param_unbounded(t, phi[i], p_str[i], log_epsilon)
            };
            if best.is_none_or(|b| n_i < b.2) {
                best = Some((mu_i, h_i, n_i, i));
            }
        }
        match best {
            Some(b) if b.2 <= 200.0 => break b,
            _ => {
                log_epsilon += 10f64.ln();
                if log_epsilon > -2.0 {
                    return f64::NAN;
                }
            }
        }
    };

    let n = n as i64;
    let mut integral = Complex64::new(0.0, 0.0);
    let zc = Complex64::new(z, 0.0);
    for k in -n..=n {
        let u = h * k as f64;
        let s = mu * Complex64::new(1.0, u).powi(2);
        let ds = Complex64::new(-2.0 * mu * u, 2.0 * mu);
        let f = s.powf(alpha - beta) / (s.powf(alpha) - zc) * ds;
        integral += (s * t).exp() * f;
    }
    integral *= h / (2.0 * PI);
    // integral / i
    let mut value = Complex64::new(integral.im, -integral.re);

    for s in &s_star[region + 1..] {
        value += (s * t).exp() * s.powf(1.0 - beta) / alpha;
    }
    value.re
}

fn optimal_param_bounded(t: f64, phi_j: f64, phi_j1: f64, pj: f64, qj: f64, log_epsilon: f64) -> (f64, f64, f64) {
    let fac = 1.01;
    let f_max = (log_epsilon - LOG_EPS).exp();
    let sq_phi_j = phi_j.sqrt();
    let threshold = 2.0 * ((log_epsilon - LOG_EPS) / t).sqrt();
    let sq_phi_j1 = phi_j1.sqrt().min(threshold - sq_phi_j);

    let mut f_bar = 1.0;
    let bounds: Option<(f64, f64)> = if pj < 1e-14 && qj < 1e-14 {
        Some((sq_phi_j, sq_phi_j1))
    } else if pj < 1e-14 {
        let f_min = if sq_phi_j > 0.0 { fac * (sq_phi_j / (sq_phi_j1 - sq_phi_j)).powf(qj) } else { fac };
        if f_min < f_max {
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            let fq = f_bar.powf(-1.0 / qj);
            Some((sq_phi_j, (2.0 * sq_phi_j1 - fq * sq_phi_j) / (2.0 + fq)))
        } else {
            None
        }
    } else if qj < 1e-14 {
        let f_min = fac * (sq_phi_j1 / (sq_phi_j1 - sq_phi_j)).powf(pj);
        if f_min < f_max {
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            let fp = f_bar.powf(-1.0 / pj);
            Some(((2.0 * sq_phi_j + fp * sq_phi_j1) / (2.0 - fp), sq_phi_j1))
        } else {
            None
        }
    } else {
        let f_min = fac * (sq_phi_j + sq_phi_j1) / (sq_phi_j1 - sq_phi_j).powf(pj.max(qj));
        if f_min < f_max {
            let f_min = f_min.max(1.5);
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            let fp = f_bar.powf(-1.0 / pj);
            let fq = f_bar.powf(-1.0 / qj);
            let w = -phi_j1 * t / log_epsilon;
            let den = 2.0 + w - (1.0 + w) * fp + fq;
            Some((
                ((2.0 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den,
                (-(1.0 + w) * fq * sq_phi_j + (2.0 + w - (1.0 + w) * fp) * sq_phi_j1) / den,
            ))
        } else {
            None
        }
    };

    match bounds {
        Some((lo, hi)) => {
            let log_eps = log_epsilon - f_bar.ln();
            let w = -hi * hi * t / log_eps;
            let mu = (((1.0 + w) * lo + hi) / (2.0 + w)).powi(2);
            let h = -2.0 * PI / log_eps * (hi - lo) / ((1.0 + w) * lo + hi);
            let n = ((1.0 - log_eps / t / mu).sqrt() / h).ceil();
            if n.is_finite() && h > 0.0 {
                (mu, h, n)
            } else {
                (0.0, 0.0, f64::INFINITY)
            }
        }
        None => (0.0, 0.0, f64::INFINITY),
    }
}

fn optimal_param_unbounded(t: f64, phi_j: f64, pj: f64, log_epsilon: f64) -> (f64, f64, f64) {
    let sq_phi_j = phi_j.sqrt();
    let mut phibar = if phi_j > 0.0 { phi_j * 1.01 } else { 0.01 };
    let mut sq_phibar = phibar.sqrt();
    let (f_min, f_max, f_tar) = (1.0, 10.0, 5.0f64);

    let mut n;
    let mut a;
    let mut sq_mu;
    let mut iterations = 0;
    loop {
        let phi_t = phibar * t;
        let log_eps_phi_t = log_epsilon / phi_t;
        n = (phi_t / PI * (1.0 - 1.5 * log_eps_phi_t + (1.0 - 2.0 * log_eps_phi_t).sqrt())).ceil();
        a = PI * n / phi_t;
        sq_mu = sq_phibar * (4.0 - a).abs() / (7.0 - (1.0 + 12.0 * a).sqrt()).abs();
        let fbar = ((sq_phibar - sq_phi_j) / sq_mu).powf(-pj);
        let stop = pj < 1e-14 || (f_min < fbar && fbar < f_max);
        iterations += 1;
        if stop || iterations > 100 {
            break;
        }
        sq_phibar = f_tar.powf(-1.0 / pj) * sq_mu + sq_phi_j;
        phibar = sq_phibar * sq_phibar;
    }
    let mut mu = sq_mu * sq_mu;
    let mut h = (-3.0 * a - 2.0 + 2.0 * (1.0 + 12.0 * a).sqrt()) / (4.0 - a) / n;

    let threshold = (log_epsilon - LOG_EPS) / t;
    if mu > threshold {
        let q = if pj.abs() < 1e-14 { 0.0 } else { f_tar.powf(-1.0 / pj) * mu.sqrt() };
        let phibar = (q + phi_j.sqrt()).powi(2);
        if phibar < threshold {
            let w = (LOG_EPS / (LOG_EPS - log_epsilon)).sqrt();
            let u = (-phibar * t / LOG_EPS).sqrt();
            mu = threshold;
            n = (w * log_epsilon / 2.0 / PI / (u * w - 1.0)).ceil();
            h = (LOG_EPS / (LOG_EPS - log_epsilon)).sqrt() / n;
        } else {
            n = f64::INFINITY;
            h = 0.0;
        }
    }
    (mu, h, n)
}
