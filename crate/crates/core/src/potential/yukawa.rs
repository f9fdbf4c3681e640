use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use super::transfer::{project_on_ray_log, TransferRule};
use super::{check_request, Interaction};
use crate::error::{Error, Result};
use crate::numerics::linalg::CMat;
use crate::numerics::{gauss_legendre, legendre_p};

/// Panel width in `ln(Q² + μ²)`.
const LOG_PANEL: f64 = 0.25;
const LOG_POINTS: usize = 16;

/// Yukawa interaction with a dipole-like form factor,
/// `Ṽ(Q) = 4πβ/(Q² + μ²) · Λ²/(Q² + Λ²)`, energy independent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelD {
    pub beta: f64,
    pub mu: f64,
    pub lambda: f64,
}

impl Default for ModelD {
    fn default() -> Self {
        Self {
            beta: -2.0,
            mu: 450.0,
            lambda: 1000.0,
        }
    }
}

impl ModelD {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.lambda > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidInput("Yukawa range and cutoff must be positive".into()));
        }
        Ok(())
    }

    /// Momentum-space transform as a function of the squared transfer.
    pub fn transform(&self, q2: Complex64) -> Complex64 {
        let l2 = self.lambda * self.lambda;
        4.0 * PI * self.beta * l2 / ((q2 + self.mu * self.mu) * (q2 + l2))
    }

    fn angular(&self, l: usize, po: Complex64, pi: Complex64) -> Result<Complex64> {
        let near = ((po - pi) * (po - pi) + self.mu * self.mu).norm() < 1e-3 * self.mu * self.mu;
        let breaks: Vec<f64> = if near {
            let mut b = vec![-1.0, 0.0];
            for k in 1..=10 {
                b.push(1.0 - 10f64.powi(-k));
            }
            b.push(1.0);
            b
        } else {
            vec![-1.0, 1.0]
        };
        let points = if near { 32 } else { 64 };
        let mut acc = Complex64::from(0.0);
        for w in breaks.windows(2) {
            let (x, wx) = gauss_legendre(points, w[0], w[1])?;
            for (xi, wi) in x.iter().zip(&wx) {
                let q2 = po * po + pi * pi - 2.0 * po * pi * xi;
                acc += self.transform(q2) * legendre_p(l, Complex64::from(*xi))? * *wi;
            }
        }
        Ok(0.5 * acc)
    }
}

/// Closed-form s-wave projection of the Yukawa-with-form-factor interaction.
pub fn yukawa_ff_s_wave(model: &ModelD, po: Complex64, pi: Complex64) -> Complex64 {
    let lg = |m2: f64| ((po + pi) * (po + pi) + m2).ln() - ((po - pi) * (po - pi) + m2).ln();
    let (mu2, l2) = (model.mu * model.mu, model.lambda * model.lambda);
    let c = 4.0 * PI * model.beta * l2 / (l2 - mu2);
    c / (4.0 * po * pi) * (lg(mu2) - lg(l2))
}

impl Interaction for ModelD {
    fn name(&self) -> &str {
        "model-d"
    }

    fn n_channels(&self) -> usize {
        1
    }

    fn max_theta(&self) -> f64 {
        FRAC_PI_4
    }

    fn supports_l(&self, l: usize) -> bool {
        l <= 6
    }

    fn strength(&self, _e: Complex64) -> Complex64 {
        Complex64::from(1.0)
    }

    fn strength_derivative(&self, _e: Complex64) -> Complex64 {
        Complex64::from(0.0)
    }

    fn shape(&self, l: usize, j: usize, k: usize, po: Complex64, pi: Complex64, theta: f64) -> Result<Complex64> {
        check_request(self, l, j, k, theta)?;
        let (ao, ai) = (po.arg(), pi.arg());
        if po.norm() > 0.0 && pi.norm() > 0.0 && (ao - ai).abs() < 1e-13 && ao <= 0.0 && -ao < FRAC_PI_4 {
            let z = Complex64::from_polar(1.0, ao);
            let rule = TransferRule::new(LOG_POINTS);
            let mu2 = self.mu * self.mu;
            return Ok(project_on_ray_log(&rule, l, po.norm(), pi.norm(), mu2, LOG_PANEL, |q| {
                self.transform(q * q * z * z)
            }));
        }
        self.angular(l, po, pi)
    }

    fn shape_on_ray(&self, l: usize, j: usize, k: usize, q_out: &[f64], q_in: &[f64], theta: f64) -> Result<CMat> {
        check_request(self, l, j, k, theta)?;
        let z2 = Complex64::from_polar(1.0, -2.0 * theta);
        let mu2 = self.mu * self.mu;
        let rule = TransferRule::new(LOG_POINTS);
        let rows: Vec<Vec<Complex64>> = q_out
            .par_iter()
            .map(|&qo| {
                q_in.iter()
                    .map(|&qi| project_on_ray_log(&rule, l, qo, qi, mu2, LOG_PANEL, |q| self.transform(q * q * z2)))
                    .collect()
            })
            .collect();
        let mut m = CMat::zeros(q_out.len(), q_in.len());
        for (a, row) in rows.into_iter().enumerate() {
            for (b, v) in row.into_iter().enumerate() {
                m[(a, b)] = v;
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pure_yukawa_logarithm() {
        let model = ModelD {
            beta: -2.0,
            mu: 450.0,
            lambda: 1e9,
        };
        let (qo, qi) = (200.0, 200.0);
        let exact = PI * model.beta / (qo * qi) * (((qo + qi) * (qo + qi) + 450.0 * 450.0) / ((qo - qi) * (qo - qi) + 450.0 * 450.0)).ln();
        let ray = model.shape(0, 0, 0, c(qo, 0.0), c(qi, 0.0), 0.0).unwrap();
        assert!((ray.re - exact).abs() < 1e-10 * exact.abs());
        let ang = model.angular(0, c(qo, 0.0), c(qi, 0.0)).unwrap();
        assert!((ang.re - exact).abs() < 1e-10 * exact.abs());
    }

    #[test]
    fn form_factor_closed_form_on_rotated_ray() {
        let model = ModelD::default();
        let theta = 20f64.to_radians();
        let qs = [0.5, 30.0, 200.0, 450.0, 2000.0, 3e5];
        let m = model.shape_on_ray(0, 0, 0, &qs, &qs, theta).unwrap();
        let z = Complex64::from_polar(1.0, -theta);
        for (a, &qa) in qs.iter().enumerate() {
            for (b, &qb) in qs.iter().enumerate() {
                let exact = yukawa_ff_s_wave(&model, qa * z, qb * z);
                // the closed form itself loses digits for very unequal momenta
                assert!((m[(a, b)] - exact).norm() < 1e-9 * exact.norm() + 1e-16, "{qa} {qb}");
            }
        }
    }

    #[test]
    fn angular_route_off_the_ray() {
        let model = ModelD::default();
        let (po, pi) = (c(250.0, -40.0), c(180.0, -90.0));
        let exact = yukawa_ff_s_wave(&model, po, pi);
        let got = model.shape(0, 0, 0, po, pi, 0.0).unwrap();
        assert!((got - exact).norm() < 1e-10 * exact.norm());
        // near the logarithmic branch point
        let po = c(10.0, 440.0);
        let pi = c(10.0, -9.8);
        let exact = yukawa_ff_s_wave(&model, po, pi);
        let got = model.shape(0, 0, 0, po, pi, 0.0).unwrap();
        assert!((got - exact).norm() < 1e-6 * exact.norm());
    }

    #[test]
    fn matches_radial_fourier_bessel() {
        // β Λ²/(Λ²−μ²) (e^{−μr} − e^{−Λr})/r in natural units
        let model = ModelD::default();
        let (mu, lam, beta) = (model.mu, model.lambda, model.beta);
        let (r, w) = crate::numerics::composite_gauss_legendre(400, 24, 0.0, 0.2).unwrap();
        for (qo, qi) in [(200.0, 200.0), (100.0, 300.0), (35.0, 820.0)] {
            let mut acc = 0.0;
            for (ri, wi) in r.iter().zip(&w) {
                let v = beta * lam * lam / (lam * lam - mu * mu) * ((-mu * ri).exp() - (-lam * ri).exp()) / ri;
                acc += wi * ri * ri * (qo * ri).sin() / (qo * ri) * (qi * ri).sin() / (qi * ri) * v;
            }
            let fb = 4.0 * PI * acc;
            let got = model.shape(0, 0, 0, c(qo, 0.0), c(qi, 0.0), 0.0).unwrap();
            assert!((got.re - fb).abs() < 1e-8 * fb.abs(), "{qo} {qi}: {} vs {fb}", got.re);
        }
    }

    #[test]
    fn higher_waves_agree_between_routes() {
        let model = ModelD::default();
        let z = Complex64::from_polar(1.0, -0.3);
        for l in 1..=3 {
            let ray = model.shape(l, 0, 0, 120.0 * z, 260.0 * z, 0.3).unwrap();
            let ang = model.angular(l, 120.0 * z, 260.0 * z).unwrap();
            assert!((ray - ang).norm() < 1e-10 * ang.norm());
        }
    }
}
