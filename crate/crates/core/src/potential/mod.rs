//! Interaction models and their partial-wave projections.
//!
//! Every model factorises as `V_L,jk(E; p', p) = s(E) · S_L,jk(p', p)`:
//! an energy-dependent strength times an energy-independent shape. The
//! solvers cache the shape on the mesh and rescale it per energy.

mod local;
mod separable;
mod transfer;
mod yukawa;

use std::fmt::Debug;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::linalg::CMat;
use crate::numerics::MomentumMesh;

pub use local::{LocalPotential, LocalShape, ModelA, ModelB, ModelC};
pub use separable::SeparableBare;
pub use yukawa::{yukawa_ff_s_wave, ModelD};

/// Linear energy dependence `v(E) = v0 + v1 (E − E0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLaw {
    pub v0: f64,
    pub v1: f64,
    pub e0: Complex64,
}

impl EnergyLaw {
    pub fn constant(v0: f64) -> Self {
        Self {
            v0,
            v1: 0.0,
            e0: Complex64::from(0.0),
        }
    }

    pub fn value(&self, e: Complex64) -> Complex64 {
        self.v0 + self.v1 * (e - self.e0)
    }

    pub fn derivative(&self) -> f64 {
        self.v1
    }

    /// Same law with `E0` moved so that `v(e_pin) = v0`.
    pub fn pinned(&self, v1: f64, e_pin: Complex64) -> Self {
        Self {
            v0: self.v0,
            v1,
            e0: e_pin,
        }
    }
}

pub fn v_of_e(law: &EnergyLaw, e: Complex64) -> Complex64 {
    law.value(e)
}

pub trait Interaction: Send + Sync + Debug {
    fn name(&self) -> &str;

    fn n_channels(&self) -> usize;

    /// Largest scaling angle (radians, exclusive) inside the analyticity sector.
    fn max_theta(&self) -> f64;

    /// Whether the model has a component in partial wave `l`.
    fn supports_l(&self, l: usize) -> bool;

    fn strength(&self, e: Complex64) -> Complex64;

    fn strength_derivative(&self, e: Complex64) -> Complex64;

    /// Shape `S_L,jk(p', p)` at arbitrary complex momenta.
    ///
    /// `theta` selects the integration contour for models defined through
    /// an integral; results for different contours agree wherever both
    /// converge.
    fn shape(&self, l: usize, j: usize, k: usize, p_out: Complex64, p_in: Complex64, theta: f64) -> Result<Complex64>;

    /// Shape between momenta on the ray `q e^{-iθ}` (rows `q_out`, columns `q_in`).
    fn shape_on_ray(&self, l: usize, j: usize, k: usize, q_out: &[f64], q_in: &[f64], theta: f64) -> Result<CMat> {
        let z = Complex64::from_polar(1.0, -theta);
        let mut m = CMat::zeros(q_out.len(), q_in.len());
        for (a, &qo) in q_out.iter().enumerate() {
            for (b, &qi) in q_in.iter().enumerate() {
                m[(a, b)] = self.shape(l, j, k, qo * z, qi * z, theta)?;
            }
        }
        Ok(m)
    }
}

pub(crate) fn check_request(model: &dyn Interaction, l: usize, j: usize, k: usize, theta: f64) -> Result<()> {
    let n = model.n_channels();
    if j >= n || k >= n {
        return Err(Error::InvalidInput(format!(
            "channel pair ({j}, {k}) outside the {n}-channel model {}",
            model.name()
        )));
    }
    if !model.supports_l(l) {
        return Err(Error::Unsupported(format!("partial wave L = {l} for model {}", model.name())));
    }
    if !(0.0..model.max_theta()).contains(&theta) {
        return Err(Error::Domain(format!(
            "scaling angle {:.2} deg outside the analyticity sector of {} (limit {:.2} deg)",
            theta.to_degrees(),
            model.name(),
            model.max_theta().to_degrees()
        )));
    }
    Ok(())
}

/// Full block matrix of the shape on a mesh, index `j·n + i`.
pub fn shape_matrix(model: &dyn Interaction, l: usize, mesh: &MomentumMesh) -> Result<CMat> {
    let nc = model.n_channels();
    let n = mesh.n();
    let q = mesh.nodes();
    let mut out = CMat::zeros(nc * n, nc * n);
    for j in 0..nc {
        for k in j..nc {
            let block = model.shape_on_ray(l, j, k, q, q, mesh.theta())?;
            out.view_mut((j * n, k * n), (n, n)).copy_from(&block);
            if k != j {
                out.view_mut((k * n, j * n), (n, n)).copy_from(&block.transpose());
            }
        }
    }
    Ok(out)
}

/// `V_L,jk(E; p', p)` in MeV⁻².
#[allow(clippy::too_many_arguments)]
pub fn project_partial_wave(
    model: &dyn Interaction,
    l: usize,
    j: usize,
    k: usize,
    e: Complex64,
    p_out: Complex64,
    p_in: Complex64,
    theta: f64,
) -> Result<Complex64> {
    Ok(model.strength(e) * model.shape(l, j, k, p_out, p_in, theta)?)
}

/// Analytic `∂V_L,jk/∂E`.
#[allow(clippy::too_many_arguments)]
pub fn dv_de_partial_wave(
    model: &dyn Interaction,
    l: usize,
    j: usize,
    k: usize,
    e: Complex64,
    p_out: Complex64,
    p_in: Complex64,
    theta: f64,
) -> Result<Complex64> {
    let d = model.strength_derivative(e);
    if d == Complex64::from(0.0) {
        check_request(model, l, j, k, theta)?;
        return Ok(d);
    }
    Ok(d * model.shape(l, j, k, p_out, p_in, theta)?)
}

/// Restriction of a coupled-channel model to a subset of its channels.
#[derive(Debug, Clone)]
pub struct ChannelSubset {
    inner: Arc<dyn Interaction>,
    keep: Vec<usize>,
    name: String,
}

impl ChannelSubset {
    pub fn new(inner: Arc<dyn Interaction>, keep: Vec<usize>) -> Result<Self> {
        if keep.is_empty() || keep.iter().any(|&c| c >= inner.n_channels()) {
            return Err(Error::InvalidInput(format!(
                "channel subset {keep:?} invalid for {} channels",
                inner.n_channels()
            )));
        }
        let name = format!("{}[{:?}]", inner.name(), keep);
        Ok(Self { inner, keep, name })
    }
}

impl Interaction for ChannelSubset {
    fn name(&self) -> &str {
        &self.name
    }

    fn n_channels(&self) -> usize {
        self.keep.len()
    }

    fn max_theta(&self) -> f64 {
        self.inner.max_theta()
    }

    fn supports_l(&self, l: usize) -> bool {
        self.inner.supports_l(l)
    }

    fn strength(&self, e: Complex64) -> Complex64 {
        self.inner.strength(e)
    }

    fn strength_derivative(&self, e: Complex64) -> Complex64 {
        self.inner.strength_derivative(e)
    }

    fn shape(&self, l: usize, j: usize, k: usize, p_out: Complex64, p_in: Complex64, theta: f64) -> Result<Complex64> {
        check_request(self, l, j, k, theta)?;
        self.inner.shape(l, self.keep[j], self.keep[k], p_out, p_in, theta)
    }

    fn shape_on_ray(&self, l: usize, j: usize, k: usize, q_out: &[f64], q_in: &[f64], theta: f64) -> Result<CMat> {
        check_request(self, l, j, k, theta)?;
        self.inner.shape_on_ray(l, self.keep[j], self.keep[k], q_out, q_in, theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_law() {
        let law = EnergyLaw {
            v0: -35.0,
            v1: 0.0,
            e0: Complex64::from(100.0),
        };
        assert_eq!(v_of_e(&law, Complex64::new(3.0, 4.0)), Complex64::from(-35.0));
        let law = EnergyLaw {
            v0: -35.0,
            v1: -0.5,
            e0: Complex64::new(40000.0, -1.0),
        };
        assert_eq!(v_of_e(&law, law.e0), Complex64::from(-35.0));
        assert!((v_of_e(&law, law.e0 + 10.0) - Complex64::from(-40.0)).norm() < 1e-12);
    }
}
