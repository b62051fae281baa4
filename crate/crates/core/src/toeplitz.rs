//! Lower-triangular Toeplitz products y_n = sum_{j <= n} k_{n-j} x_j.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Below this length the direct sum is cheaper than three transforms.
const DIRECT_MAX: usize = 192;

/// A kernel prepared for repeated products of a fixed length.
pub(crate) struct Toeplitz {
    kernel: Vec<f64>,
    spectrum: Option<Spectrum>,
}

struct Spectrum {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kernel_hat: Vec<Complex64>,
}

impl Toeplitz {
    pub(crate) fn new(kernel: Vec<f64>) -> Self {
        let n = kernel.len();
        if n <= DIRECT_MAX {
            return Self { kernel, spectrum: None };
        }
        let size = (2 * n).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        let mut kernel_hat: Vec<Complex64> = kernel.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        kernel_hat.resize(size, Complex64::new(0.0, 0.0));
        forward.process(&mut kernel_hat);
        Self { kernel, spectrum: Some(Spectrum { forward, inverse, kernel_hat }) }
    }

    /// Product with `x`; `x` may be shorter than the kernel.
    pub(crate) fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        assert!(n <= self.kernel.len(), "toeplitz input longer than its kernel");
        match &self.spectrum {
            Some(sp) if n > DIRECT_MAX => {
                let size = sp.kernel_hat.len();
                let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                buf.resize(size, Complex64::new(0.0, 0.0));
                sp.forward.process(&mut buf);
                for (b, k) in buf.iter_mut().zip(&sp.kernel_hat) {
                    *b *= k;
                }
                sp.inverse.process(&mut buf);
                let scale = 1.0 / size as f64;
                buf[..n].iter().map(|c| c.re * scale).collect()
            }
            _ => (0..n).map(|i| (0..=i).map(|j| self.kernel[i - j] * x[j]).sum()).collect(),
        }
    }
}
