use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use super::{check_request, Interaction};
use crate::error::{Error, Result};

/// Bare-state exchange `f(q') f(q) / (E − m_bare)` with
/// `f(q) = α λ² / (q² + λ²)`, s wave only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableBare {
    pub alpha: f64,
    pub lambda: f64,
    pub m_bare: f64,
}

impl SeparableBare {
    pub fn new(alpha: f64, lambda: f64, m_bare: f64) -> Result<Self> {
        if !(lambda > 0.0 && m_bare > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidInput("separable interaction needs lambda, m_bare > 0".into()));
        }
        Ok(Self { alpha, lambda, m_bare })
    }

    pub fn form_factor(&self, q: Complex64) -> Complex64 {
        let l2 = self.lambda * self.lambda;
        self.alpha * l2 / (q * q + l2)
    }
}

impl Interaction for SeparableBare {
    fn name(&self) -> &str {
        "bare-exchange"
    }

    fn n_channels(&self) -> usize {
        1
    }

    fn max_theta(&self) -> f64 {
        FRAC_PI_4
    }

    fn supports_l(&self, l: usize) -> bool {
        l == 0
    }

    fn strength(&self, e: Complex64) -> Complex64 {
        1.0 / (e - self.m_bare)
    }

    fn strength_derivative(&self, e: Complex64) -> Complex64 {
        let d = e - self.m_bare;
        -1.0 / (d * d)
    }

    fn shape(&self, l: usize, j: usize, k: usize, po: Complex64, pi: Complex64, theta: f64) -> Result<Complex64> {
        check_request(self, l, j, k, theta)?;
        Ok(self.form_factor(po) * self.form_factor(pi))
    }
}
