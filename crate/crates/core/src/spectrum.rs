//! Discrete eigenstates of the momentum-space Schrödinger equation.
//!
//! The discretised equation `γ = K(E) γ` (with `R = γ/(E − 𝓔)`) shares its
//! kernel with the Lippmann–Schwinger solver, so eigenenergies are the
//! zeros of `det(1 − K(E))`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kinematics::{self, Sheet};
use crate::numerics::linalg;
use crate::numerics::{brent, muller, MullerOptions};
use crate::scattering::DiscreteSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Scaled so that the compositeness sums to one.
    ByHand,
    /// Taken from the amplitude residue, no rescaling.
    AmplitudeScaled,
}

/// `R_j(q_i e^{-iθ})` per channel.
#[derive(Debug, Clone)]
pub struct RadialWaveFunction {
    pub values: Vec<Vec<Complex64>>,
    pub e_pole: Complex64,
    pub theta: f64,
    pub l: usize,
    pub normalization: Normalization,
}

/// `P_j(q_i) = e^{-3iθ} q_i²/(2π²) R_j(q_i e^{-iθ})²` with the mesh it lives on.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    pub q: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<Vec<Complex64>>,
}

impl DensityProfile {
    pub fn from_wavefunction(ds: &DiscreteSystem, wf: &RadialWaveFunction) -> Self {
        let mesh = ds.mesh();
        let values = wf
            .values
            .iter()
            .map(|r| {
                r.iter()
                    .zip(ds.measure())
                    .zip(mesh.weights())
                    .map(|((r, m), w)| m / w * r * r)
                    .collect()
            })
            .collect();
        Self {
            q: mesh.nodes().to_vec(),
            weights: mesh.weights().to_vec(),
            values,
        }
    }

    /// Mesh integral per channel.
    pub fn integrals(&self) -> Vec<Complex64> {
        self.values
            .iter()
            .map(|p| p.iter().zip(&self.weights).map(|(p, w)| p * *w).sum())
            .collect()
    }

    pub fn peak(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|p| p.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }
}

/// `det(1 − K(E))` divided by its modulus at a reference energy below
/// all thresholds.
pub fn fredholm_det(ds: &DiscreteSystem, e: Complex64) -> Result<Complex64> {
    let ld = ds.log_det(e)?;
    Ok((ld - ds.reference_log_det()).exp())
}

/// Muller iteration on the Fredholm determinant to `|ΔE| < 1e-8 MeV`.
pub fn find_eigenenergy(ds: &DiscreteSystem, guess: Complex64) -> Result<Complex64> {
    let h = 0.1;
    let seeds = [
        guess - h,
        guess + h,
        guess + Complex64::new(0.0, -0.5 * h),
    ];
    let root = muller(|e| fredholm_det(ds, e), seeds, MullerOptions::default())?;
    check_not_continuum(ds, root)?;
    Ok(root)
}

/// Rejects roots sitting on the rotated continuum `𝓔_j(q e^{-iθ})`.
pub(crate) fn check_not_continuum(ds: &DiscreteSystem, e: Complex64) -> Result<()> {
    let theta = ds.theta();
    if theta == 0.0 {
        return Ok(());
    }
    for (j, chan) in ds.system().channels().iter().enumerate() {
        let Some(ch) = chan.free_channel() else { continue };
        if e.re <= ch.threshold() {
            continue;
        }
        let k = kinematics::onshell_momentum(ch, e, Sheet::Unphysical)?;
        if k.re > 0.0 && (k.arg() + theta).abs() < 1e-3 {
            return Err(Error::ContinuumRoot { energy: e, channel: j });
        }
    }
    Ok(())
}

/// Real roots of the determinant on `[e_lo, e_hi]` located by sign changes
/// on a uniform grid and refined with Brent's method. Meant for `θ = 0`.
pub fn threshold_scan(ds: &DiscreteSystem, e_lo: f64, e_hi: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(e_lo < e_hi) {
        return Err(Error::InvalidInput("scan needs an interval and at least two points".into()));
    }
    let f = |e: f64| -> Result<f64> { Ok(fredholm_det(ds, Complex64::from(e))?.re) };
    let grid: Vec<f64> = (0..points)
        .map(|i| e_lo + (e_hi - e_lo) * i as f64 / (points - 1) as f64)
        .collect();
    let vals: Vec<f64> = grid.par_iter().map(|&e| f(e)).collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for i in 0..points - 1 {
        if vals[i] == 0.0 {
            roots.push(grid[i]);
        } else if vals[i].signum() != vals[i + 1].signum() && vals[i + 1] != 0.0 {
            roots.push(brent(f, grid[i], grid[i + 1], 1e-11, 200)?);
        }
    }
    Ok(roots)
}

/// Null vector of `1 − K(E_pole)` turned into a wave function whose
/// compositeness sums to one.
pub fn radial_wavefunction_normalized(ds: &DiscreteSystem, e_pole: Complex64) -> Result<(RadialWaveFunction, DensityProfile)> {
    let a = ds.one_minus_kernel(e_pole)?;
    let (gamma, _) = linalg::null_vector(&a).map_err(|err| match err {
        Error::DegenerateRoot { .. } => Error::DegenerateRoot { energy: e_pole },
        other => other,
    })?;
    let n = ds.mesh().n();
    let energies = ds.channel_energies(e_pole)?;
    let mut values: Vec<Vec<Complex64>> = energies
        .iter()
        .enumerate()
        .map(|(j, ej)| (0..n).map(|i| gamma[j * n + i] / (e_pole - ej[i])).collect())
        .collect();
    let norm: Complex64 = values
        .iter()
        .map(|r| r.iter().zip(ds.measure()).map(|(r, m)| m * r * r).sum::<Complex64>())
        .sum();
    let mut scale = Complex64::from(1.0) / norm.sqrt();
    let peak = (0..n)
        .max_by(|&a, &b| values[0][a].norm().total_cmp(&values[0][b].norm()))
        .unwrap_or(0);
    if (values[0][peak] * scale).re < 0.0 {
        scale = -scale;
    }
    for r in values.iter_mut() {
        for v in r.iter_mut() {
            *v *= scale;
        }
    }
    let wf = RadialWaveFunction {
        values,
        e_pole,
        theta: ds.theta(),
        l: ds.system().l(),
        normalization: Normalization::ByHand,
    };
    let profile = DensityProfile::from_wavefunction(ds, &wf);
    Ok((wf, profile))
}
