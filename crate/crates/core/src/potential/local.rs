use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;

use super::transfer::{project_on_ray, TransferRule, TransferTable};
use super::{check_request, EnergyLaw, Interaction};
use crate::error::{Error, Result};
use crate::kinematics::HBARC;
use crate::numerics::linalg::CMat;
use crate::numerics::{sph_bessel_j, RadialGrid};

const PANEL_FM: f64 = 1.0;
const NODES_PER_PANEL: usize = 32;
/// Width (MeV) of the Gauss panels in the momentum-transfer integral.
const TRANSFER_PANEL: f64 = 40.0;
const TRANSFER_POINTS: usize = 12;

/// Radial form of a local potential; lengths in fm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalShape {
    /// `1 / (1 + exp((r − R)/a))`
    WoodsSaxon { a: f64, radius: f64 },
    /// `2 exp(−r²/b1²) − exp(−r²/b2²)`
    DoubleGaussian { b1: f64, b2: f64 },
    /// `exp(−r²/b²)`
    Gaussian { b: f64 },
}

impl LocalShape {
    pub fn eval(&self, r: Complex64) -> Complex64 {
        match *self {
            LocalShape::WoodsSaxon { a, radius } => 1.0 / (1.0 + ((r - radius) / a).exp()),
            LocalShape::DoubleGaussian { b1, b2 } => {
                2.0 * (-(r * r) / (b1 * b1)).exp() - (-(r * r) / (b2 * b2)).exp()
            }
            LocalShape::Gaussian { b } => (-(r * r) / (b * b)).exp(),
        }
    }

    fn max_theta(&self) -> f64 {
        match *self {
            // first pole of the Fermi function sits at r = R + iπa
            LocalShape::WoodsSaxon { a, radius } => (PI * a / radius).atan(),
            _ => FRAC_PI_4,
        }
    }

    /// Radial cutoff on the rotated contour giving the same tail
    /// suppression as `r_max` on the real axis.
    fn extent(&self, r_max: f64, theta: f64) -> f64 {
        match *self {
            LocalShape::WoodsSaxon { radius, .. } => radius + (r_max - radius).max(0.0) / theta.cos(),
            _ => r_max / (2.0 * theta).cos().sqrt(),
        }
    }
}

/// Woods–Saxon well (bound states).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelA {
    pub law: EnergyLaw,
    pub a: f64,
    pub radius: f64,
    pub r_max: f64,
}

impl Default for ModelA {
    fn default() -> Self {
        Self {
            law: EnergyLaw::constant(-35.0),
            a: 0.5,
            radius: 3.6,
            r_max: 25.0,
        }
    }
}

/// Attractive core with a barrier (resonance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelB {
    pub law: EnergyLaw,
    pub b1: f64,
    pub b2: f64,
    pub r_max: f64,
}

impl Default for ModelB {
    fn default() -> Self {
        Self {
            law: EnergyLaw::constant(-50.0),
            b1: 2.5,
            b2: 5.0,
            r_max: 30.0,
        }
    }
}

/// Two-channel Gaussian with coupling matrix `[[1, x], [x, 0]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelC {
    pub law: EnergyLaw,
    pub b: f64,
    pub x: f64,
    pub r_max: f64,
}

impl Default for ModelC {
    fn default() -> Self {
        Self {
            law: EnergyLaw::constant(-650.0),
            b: 0.5,
            x: 0.5,
            r_max: 6.0,
        }
    }
}

impl ModelA {
    pub fn build(&self) -> Result<LocalPotential> {
        positive(&[("a", self.a), ("R", self.radius), ("r_max", self.r_max)])?;
        LocalPotential::new(
            "model-a",
            self.law,
            LocalShape::WoodsSaxon {
                a: self.a,
                radius: self.radius,
            },
            vec![vec![1.0]],
            self.r_max,
        )
    }
}

impl ModelB {
    pub fn build(&self) -> Result<LocalPotential> {
        positive(&[("b1", self.b1), ("b2", self.b2), ("r_max", self.r_max)])?;
        LocalPotential::new(
            "model-b",
            self.law,
            LocalShape::DoubleGaussian { b1: self.b1, b2: self.b2 },
            vec![vec![1.0]],
            self.r_max,
        )
    }
}

impl ModelC {
    pub fn build(&self) -> Result<LocalPotential> {
        positive(&[("b", self.b), ("r_max", self.r_max)])?;
        LocalPotential::new(
            "model-c",
            self.law,
            LocalShape::Gaussian { b: self.b },
            vec![vec![1.0, self.x], vec![self.x, 0.0]],
            self.r_max,
        )
    }
}

fn positive(params: &[(&str, f64)]) -> Result<()> {
    for (name, v) in params {
        if !(*v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidInput(format!("parameter {name} must be positive, got {v}")));
        }
    }
    Ok(())
}

/// `V_jk(E; r) = v(E) C_jk shape(r)`.
#[derive(Debug)]
pub struct LocalPotential {
    name: String,
    law: EnergyLaw,
    shape: LocalShape,
    coupling: Vec<Vec<f64>>,
    r_max: f64,
    tables: Mutex<Vec<(u64, Arc<TransferTable>)>>,
}

impl Clone for LocalPotential {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            law: self.law,
            shape: self.shape,
            coupling: self.coupling.clone(),
            r_max: self.r_max,
            tables: Mutex::new(self.tables.lock().map(|t| t.clone()).unwrap_or_default()),
        }
    }
}

impl LocalPotential {
    pub fn new(
        name: impl Into<String>,
        law: EnergyLaw,
        shape: LocalShape,
        coupling: Vec<Vec<f64>>,
        r_max: f64,
    ) -> Result<Self> {
        let n = coupling.len();
        if n == 0 || coupling.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInput("coupling matrix must be square and nonempty".into()));
        }
        for j in 0..n {
            for k in 0..n {
                if coupling[j][k] != coupling[k][j] {
                    return Err(Error::InvalidInput("coupling matrix must be symmetric".into()));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            law,
            shape,
            coupling,
            r_max,
            tables: Mutex::new(Vec::new()),
        })
    }

    pub fn law(&self) -> &EnergyLaw {
        &self.law
    }

    pub fn local_shape(&self) -> LocalShape {
        self.shape
    }

    /// Copy with a different energy law; cached transforms are kept.
    pub fn with_law(&self, law: EnergyLaw) -> Self {
        let mut c = self.clone();
        c.law = law;
        c
    }

    /// Coordinate-space potential at complex radius (fm), in MeV.
    pub fn potential_at(&self, e: Complex64, j: usize, k: usize, r: Complex64) -> Complex64 {
        self.law.value(e) * self.coupling[j][k] * self.shape.eval(r)
    }

    fn radial_grid(&self, theta: f64) -> Result<RadialGrid> {
        RadialGrid::composite(self.shape.extent(self.r_max, theta), PANEL_FM, NODES_PER_PANEL)
    }

    fn table(&self, theta: f64) -> Result<Arc<TransferTable>> {
        let key = theta.to_bits();
        if let Some((_, t)) = self.tables.lock().expect("table cache").iter().find(|(k, _)| *k == key) {
            return Ok(t.clone());
        }
        let grid = self.radial_grid(theta)?;
        let shape = self.shape;
        let t = Arc::new(TransferTable::build(|r| shape.eval(r), &grid, theta)?);
        self.tables.lock().expect("table cache").push((key, t.clone()));
        Ok(t)
    }

    /// Direct rotated-contour Fourier–Bessel integral
    /// `4π e^{3iθ} ∫ ds s² j_L(p' e^{iθ} s) j_L(p e^{iθ} s) shape(s e^{iθ})`.
    pub fn shape_fourier_bessel(&self, l: usize, p_out: Complex64, p_in: Complex64, theta: f64, grid: &RadialGrid) -> Result<Complex64> {
        let rot = Complex64::from_polar(1.0, theta);
        let mut acc = Complex64::from(0.0);
        for (&s, &w) in grid.nodes().iter().zip(grid.weights()) {
            let r = rot * s;
            let a = sph_bessel_j(l, p_out * r / HBARC)?;
            let b = sph_bessel_j(l, p_in * r / HBARC)?;
            acc += a * b * self.shape.eval(r) * (w * s * s);
        }
        Ok(4.0 * PI * rot * rot * rot * acc / HBARC.powi(3))
    }
}

impl Interaction for LocalPotential {
    fn name(&self) -> &str {
        &self.name
    }

    fn n_channels(&self) -> usize {
        self.coupling.len()
    }

    fn max_theta(&self) -> f64 {
        self.shape.max_theta()
    }

    fn supports_l(&self, l: usize) -> bool {
        l <= 6
    }

    fn strength(&self, e: Complex64) -> Complex64 {
        self.law.value(e)
    }

    fn strength_derivative(&self, _e: Complex64) -> Complex64 {
        Complex64::from(self.law.derivative())
    }

    fn shape(&self, l: usize, j: usize, k: usize, p_out: Complex64, p_in: Complex64, theta: f64) -> Result<Complex64> {
        check_request(self, l, j, k, theta)?;
        let c = self.coupling[j][k];
        if c == 0.0 {
            return Ok(Complex64::from(0.0));
        }
        let grid = self.radial_grid(theta)?;
        Ok(c * self.shape_fourier_bessel(l, p_out, p_in, theta, &grid)?)
    }

    fn shape_on_ray(&self, l: usize, j: usize, k: usize, q_out: &[f64], q_in: &[f64], theta: f64) -> Result<CMat> {
        check_request(self, l, j, k, theta)?;
        let c = self.coupling[j][k];
        let mut m = CMat::zeros(q_out.len(), q_in.len());
        if c == 0.0 {
            return Ok(m);
        }
        let table = self.table(theta)?;
        let rule = TransferRule::new(TRANSFER_POINTS);
        let rows: Vec<Vec<Complex64>> = q_out
            .par_iter()
            .map(|&qo| {
                q_in.iter()
                    .map(|&qi| c * project_on_ray(&rule, l, qo, qi, table.q_cut(), TRANSFER_PANEL, |q| table.eval(q)))
                    .collect()
            })
            .collect();
        for (a, row) in rows.into_iter().enumerate() {
            for (b, v) in row.into_iter().enumerate() {
                m[(a, b)] = v;
            }
        }
        Ok(m)
    }
}
