use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;

use super::quadrature::{composite_gauss_legendre, gauss_legendre};
use crate::error::{Error, Result};

/// Momentum quadrature on `[0, ∞)` together with the complex-scaling angle.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumMesh {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    map_scale: f64,
    upper: f64,
    theta: f64,
}

impl MomentumMesh {
    /// Builds a mesh from explicit nodes and weights.
    pub fn from_parts(nodes: Vec<f64>, weights: Vec<f64>, map_scale: f64, theta: f64) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::InvalidInput("mesh nodes and weights must be nonempty and equal length".into()));
        }
        if nodes[0] <= 0.0 || nodes.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidInput("mesh nodes must be positive and strictly increasing".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidInput("mesh weights must be positive".into()));
        }
        check_theta(theta)?;
        Ok(Self {
            nodes,
            weights,
            map_scale,
            upper: f64::INFINITY,
            theta,
        })
    }

    /// Declares the rule to cover `[0, upper]` rather than the half line.
    pub fn with_upper(mut self, upper: f64) -> Result<Self> {
        if !(upper > *self.nodes.last().expect("nonempty")) {
            return Err(Error::InvalidInput(format!("upper limit {upper} below the last node")));
        }
        self.upper = upper;
        Ok(self)
    }

    /// Upper end of the integration range; infinite for the half line.
    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn map_scale(&self) -> f64 {
        self.map_scale
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `e^{-iθ}`
    pub fn phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, -self.theta)
    }

    /// Nodes on the rotated ray, `q_i e^{-iθ}`.
    pub fn scaled_nodes(&self) -> Vec<Complex64> {
        let z = self.phase();
        self.nodes.iter().map(|&q| q * z).collect()
    }

    /// Same nodes and weights at another scaling angle.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        Ok(Self { theta, ..self.clone() })
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..FRAC_PI_4).contains(&theta) {
        return Err(Error::InvalidInput(format!(
            "scaling angle {:.3} deg outside [0, 45) deg",
            theta.to_degrees()
        )));
    }
    Ok(())
}

/// Gauss–Legendre points mapped by `q = scale · tan(π(1+x)/4)`.
pub fn tangent_mapped_mesh(n: usize, scale: f64, theta: f64) -> Result<MomentumMesh> {
    tangent_mapped_mesh_to(n, scale, f64::INFINITY, theta)
}

/// Tangent map onto `[0, upper]`: `q = scale · tan(φ(1+x)/2)` with `φ = atan(upper/scale)`.
/// An infinite `upper` gives [`tangent_mapped_mesh`].
pub fn tangent_mapped_mesh_to(n: usize, scale: f64, upper: f64, theta: f64) -> Result<MomentumMesh> {
    if n < 8 {
        return Err(Error::InvalidInput(format!("mesh needs at least 8 nodes, got {n}")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidInput(format!("mesh scale must be positive, got {scale}")));
    }
    if !(upper > 0.0) {
        return Err(Error::InvalidInput(format!("mesh upper limit must be positive, got {upper}")));
    }
    let phi = if upper.is_finite() { (upper / scale).atan() } else { FRAC_PI_2 };
    let (x, w) = gauss_legendre(n, -1.0, 1.0)?;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (xi, wi) in x.iter().zip(&w) {
        let t = phi * (1.0 + xi) / 2.0;
        let c = t.cos();
        nodes.push(scale * t.tan());
        weights.push(scale * 0.5 * phi * wi / (c * c));
    }
    let mesh = MomentumMesh::from_parts(nodes, weights, scale, theta)?;
    if upper.is_finite() {
        mesh.with_upper(upper)
    } else {
        Ok(mesh)
    }
}

/// Radial quadrature in fm.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialGrid {
    /// Single Gauss–Legendre rule on `[0, r_max]`.
    pub fn gauss(n: usize, r_max: f64) -> Result<Self> {
        let (nodes, weights) = gauss_legendre(n, 0.0, r_max)?;
        Ok(Self { nodes, weights })
    }

    /// Panels of width close to `panel_width` with `per_panel` nodes each.
    pub fn composite(r_max: f64, panel_width: f64, per_panel: usize) -> Result<Self> {
        if !(r_max > 0.0 && panel_width > 0.0) {
            return Err(Error::InvalidInput("radial grid needs positive extent".into()));
        }
        let panels = (r_max / panel_width).ceil().max(1.0) as usize;
        let (nodes, weights) = composite_gauss_legendre(panels, per_panel, 0.0, r_max)?;
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lorentzian_moment() {
        let s = 300.0;
        let m = tangent_mapped_mesh(100, s, 0.0).unwrap();
        let v: f64 = m
            .nodes()
            .iter()
            .zip(m.weights())
            .map(|(q, w)| w * s * s * q / (q * q + s * s).powi(2))
            .sum();
        assert!((v - 0.5).abs() < 1e-8);
    }

    #[test]
    fn median_node_is_scale() {
        let m = tangent_mapped_mesh(101, 250.0, 0.0).unwrap();
        assert!((m.nodes()[50] - 250.0).abs() < 1e-9);
        assert!(m.nodes().windows(2).all(|p| p[0] < p[1]));
        assert!(m.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn bounded_map() {
        let m = tangent_mapped_mesh_to(60, 300.0, 2000.0, 0.0).unwrap();
        assert!(*m.nodes().last().unwrap() < 2000.0);
        assert_eq!(m.upper(), 2000.0);
        let s: f64 = m.weights().iter().zip(m.nodes()).map(|(w, q)| w * q * q).sum();
        assert!((s - 2000f64.powi(3) / 3.0).abs() < 1e-9 * s);
        let a = tangent_mapped_mesh_to(40, 300.0, f64::INFINITY, 0.0).unwrap();
        assert_eq!(a, tangent_mapped_mesh(40, 300.0, 0.0).unwrap());
        assert!(tangent_mapped_mesh_to(40, 300.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn theta_range() {
        assert!(tangent_mapped_mesh(16, 1.0, 0.8).is_err());
        assert!(tangent_mapped_mesh(16, 1.0, -0.1).is_err());
        assert!(tangent_mapped_mesh(4, 1.0, 0.0).is_err());
        let m = tangent_mapped_mesh(16, 1.0, 0.3).unwrap();
        let z = m.scaled_nodes()[3];
        assert!((z.arg() + 0.3).abs() < 1e-14);
    }

    #[test]
    fn radial_grid() {
        let g = RadialGrid::composite(25.0, 1.0, 16).unwrap();
        assert_eq!(g.nodes().len(), 400);
        let s: f64 = g.nodes().iter().zip(g.weights()).map(|(r, w)| w * r * r).sum();
        assert!((s - 25f64.powi(3) / 3.0).abs() < 1e-9);
        let g = RadialGrid::gauss(400, 30.0).unwrap();
        assert!(g.nodes()[0] > 0.0 && *g.nodes().last().unwrap() < 30.0);
    }
}
