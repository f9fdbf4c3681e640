//! A bare particle dressed by its decay into two light particles, and the
//! two-body channel built on the dressed particle.
//!
//! Loop integrals over the decay momentum run along `k e^{-iφ}`; the angle
//! `φ` is the scaling angle of the loop mesh. Rotating the contour exposes
//! the second sheet, where the physical mass of the unstable particle sits.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinematics::{self, Channel, KinematicsMode};
use crate::numerics::{muller, MomentumMesh, MullerOptions};
use crate::potential::SeparableBare;
use crate::scattering::{ChannelEnergy, ScatteringSystem};
use crate::structure;

/// Minimum clearance (radians) between the loop contour and the phase of the decay momentum.
const CONTOUR_MARGIN: f64 = 0.0175;

/// Coupling `f(k) = α λ² / (k² + λ²)` of a bare state to two particles of mass `m_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BareCoupling {
    /// MeV^{-1/2}
    pub alpha: f64,
    pub lambda: f64,
    pub m_bare: f64,
    pub m_d: f64,
}

impl BareCoupling {
    pub fn new(alpha: f64, lambda: f64, m_bare: f64, m_d: f64) -> Result<Self> {
        if !(alpha.is_finite() && lambda > 0.0 && m_bare > 0.0 && m_d > 0.0) {
            return Err(Error::InvalidInput(
                "bare coupling needs finite alpha and positive lambda, m_bare, m_d".into(),
            ));
        }
        Ok(Self {
            alpha,
            lambda,
            m_bare,
            m_d,
        })
    }

    pub fn form_factor(&self, k: Complex64) -> Complex64 {
        let l2 = self.lambda * self.lambda;
        self.alpha * l2 / (k * k + l2)
    }

    /// `2 √(k² + m_d²)`
    pub fn decay_energy(&self, k: Complex64) -> Complex64 {
        2.0 * (k * k + self.m_d * self.m_d).sqrt()
    }

    pub fn decay_threshold(&self) -> f64 {
        2.0 * self.m_d
    }

    pub fn decay_open(&self) -> bool {
        self.decay_threshold() < self.m_bare
    }

    /// The two decay products as a semi-relativistic channel.
    pub fn decay_channel(&self) -> Result<Channel> {
        Channel::new(self.m_d, self.m_d, KinematicsMode::SemiRelativistic, "dd")
    }

    /// `f(q') f(q) / (E − m_bare)` in the decay channel.
    pub fn bare_exchange(&self) -> Result<SeparableBare> {
        SeparableBare::new(self.alpha, self.lambda, self.m_bare)
    }
}

/// Loop-mesh nodes `k e^{-iφ}` and measures `w k² e^{-3iφ}/(2π²)`.
fn loop_points(mesh: &MomentumMesh) -> (Vec<Complex64>, Vec<Complex64>) {
    let rot3 = Complex64::from_polar(1.0, -3.0 * mesh.theta());
    let measure = mesh
        .nodes()
        .iter()
        .zip(mesh.weights())
        .map(|(q, w)| rot3 * (w * q * q / (2.0 * PI * PI)))
        .collect();
    (mesh.scaled_nodes(), measure)
}

fn denominator(e: Complex64, d: Complex64, node: usize) -> Result<Complex64> {
    if d.norm() <= 1e-12 * e.norm().max(1.0) {
        return Err(Error::SingularDenominator { energy: e, node });
    }
    Ok(d)
}

/// `G(E) = ∫ d³k/(2π)³ f(k)² / (E − 𝓔_d(k))` on the loop mesh.
pub fn loop_function(bc: &BareCoupling, e: Complex64, mesh: &MomentumMesh) -> Result<Complex64> {
    let (k, m) = loop_points(mesh);
    let mut acc = Complex64::from(0.0);
    for (i, (k, m)) in k.iter().zip(&m).enumerate() {
        let f = bc.form_factor(*k);
        acc += m * f * f / denominator(e, e - bc.decay_energy(*k), i)?;
    }
    Ok(acc)
}

/// `dG/dE`
pub fn loop_function_derivative(bc: &BareCoupling, e: Complex64, mesh: &MomentumMesh) -> Result<Complex64> {
    let (k, m) = loop_points(mesh);
    let mut acc = Complex64::from(0.0);
    for (i, (k, m)) in k.iter().zip(&m).enumerate() {
        let f = bc.form_factor(*k);
        let d = denominator(e, e - bc.decay_energy(*k), i)?;
        acc -= m * f * f / (d * d);
    }
    Ok(acc)
}

/// Root of `m − m_bare − G(m)`, with `|residual| < 1e-8` MeV.
///
/// For an open decay the root lies below the real axis and is reachable
/// only if the loop contour is rotated past the phase of the decay momentum.
pub fn physical_mass(bc: &BareCoupling, mesh: &MomentumMesh) -> Result<Complex64> {
    if bc.alpha == 0.0 {
        return Ok(Complex64::from(bc.m_bare));
    }
    let f = |m: Complex64| -> Result<Complex64> { Ok(m - bc.m_bare - loop_function(bc, m, mesh)?) };
    // fixed-point iterates as seeds
    let m0 = Complex64::from(bc.m_bare);
    let m1 = bc.m_bare + loop_function(bc, m0, mesh)?;
    let mut m2 = bc.m_bare + loop_function(bc, m1, mesh)?;
    if (m2 - m1).norm() < 1e-6 || (m2 - m0).norm() < 1e-6 {
        m2 = m1 + Complex64::new(0.5, -0.5);
    }
    let opts = MullerOptions {
        tol: 1e-10,
        max_iter: 200,
    };
    let m = muller(f, [m0, m1, m2], opts)?;
    let residual = f(m)?.norm();
    if residual >= 1e-8 {
        return Err(Error::NoConvergence {
            what: "physical mass",
            iterations: opts.max_iter,
        });
    }
    if m.re > bc.decay_threshold() {
        // roots of the discretised loop also sit along the rotated cut itself
        let k_on = (m * m / 4.0 - bc.m_d * bc.m_d).sqrt();
        if mesh.theta() + k_on.arg() < CONTOUR_MARGIN {
            return Err(Error::ContourInsufficient(format!(
                "loop angle {:.2} deg does not uncover the mass {m:.3} (needs more than {:.2} deg)",
                mesh.theta().to_degrees(),
                -k_on.arg().to_degrees()
            )));
        }
    }
    Ok(m)
}

/// `X_d = −G'/(1 − G')` at the physical mass, the decay-channel compositeness
/// of the separable system in closed form.
pub fn decay_compositeness_closed_form(bc: &BareCoupling, m_phys: Complex64, mesh: &MomentumMesh) -> Result<Complex64> {
    let g1 = loop_function_derivative(bc, m_phys, mesh)?;
    Ok(-g1 / (1.0 - g1))
}

/// Decay-channel compositeness from the residue of the separable
/// decay-channel amplitude at the physical mass.
pub fn decay_channel_compositeness(bc: &BareCoupling, mesh: &MomentumMesh) -> Result<Complex64> {
    let m = physical_mass(bc, mesh)?;
    if bc.alpha == 0.0 {
        return Ok(Complex64::from(0.0));
    }
    let sys = ScatteringSystem::with_channels(Arc::new(bc.bare_exchange()?), vec![bc.decay_channel()?], 0)?;
    let ds = sys.discretize(mesh)?;
    let res = structure::extract_residues(&ds, m, None)?;
    let wf = structure::residue_wavefunction(&ds, &res)?;
    let profile = crate::spectrum::DensityProfile::from_wavefunction(&ds, &wf);
    Ok(structure::compositeness_x(&profile)[0])
}

/// `Σ(E₃; q)` of the bare particle moving with momentum `q` next to a
/// spectator of mass `M`.
pub fn self_energy_sigma(bc: &BareCoupling, big_m: f64, e3: Complex64, q: Complex64, mesh: &MomentumMesh) -> Result<Complex64> {
    Ok(sigma_with_derivative(bc, big_m, e3, q, mesh, false)?.0)
}

fn sigma_with_derivative(
    bc: &BareCoupling,
    big_m: f64,
    e3: Complex64,
    q: Complex64,
    mesh: &MomentumMesh,
    want_derivative: bool,
) -> Result<(Complex64, Complex64)> {
    if bc.alpha == 0.0 {
        return Ok((Complex64::from(0.0), Complex64::from(0.0)));
    }
    let (k, m) = loop_points(mesh);
    let q2 = q * q;
    let pref = bc.m_bare / (q2 + bc.m_bare * bc.m_bare).sqrt();
    let spectator = (q2 + big_m * big_m).sqrt();
    let mut s = Complex64::from(0.0);
    let mut ds = Complex64::from(0.0);
    for (i, (k, m)) in k.iter().zip(&m).enumerate() {
        let f = bc.form_factor(*k);
        let ed = bc.decay_energy(*k);
        let boosted = (ed * ed + q2).sqrt();
        let d = denominator(e3, e3 - spectator - boosted, i)?;
        let term = m * (ed / boosted) * f * f / d;
        s += term;
        if want_derivative {
            ds -= term / d;
        }
    }
    Ok((pref * s, pref * ds))
}

/// Whether the self-energy follows the spectator momentum or is frozen at `q = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMode {
    MomentumDependent,
    Frozen,
}

/// Channel of the dressed particle and a stable partner of mass `M`, with
/// `𝓔_Σ(E; q) = √(q² + m_bare²) + Σ(E; q) + √(q² + M²)`.
#[derive(Debug, Clone)]
pub struct DressedChannel {
    coupling: BareCoupling,
    bare: Channel,
    loop_mesh: MomentumMesh,
    mode: SigmaMode,
    m_phys: Complex64,
    label: String,
}

impl DressedChannel {
    /// Solves for the physical mass on `loop_mesh` on construction.
    pub fn new(coupling: BareCoupling, partner: f64, loop_mesh: MomentumMesh, label: &str) -> Result<Self> {
        let bare = Channel::new(coupling.m_bare, partner, KinematicsMode::SemiRelativistic, label)?;
        let m_phys = physical_mass(&coupling, &loop_mesh)?;
        Ok(Self {
            coupling,
            bare,
            loop_mesh,
            mode: SigmaMode::MomentumDependent,
            m_phys,
            label: label.to_string(),
        })
    }

    pub fn with_mode(mut self, mode: SigmaMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> SigmaMode {
        self.mode
    }

    pub fn coupling(&self) -> &BareCoupling {
        &self.coupling
    }

    pub fn bare_channel(&self) -> &Channel {
        &self.bare
    }

    pub fn loop_mesh(&self) -> &MomentumMesh {
        &self.loop_mesh
    }

    pub fn physical_mass(&self) -> Complex64 {
        self.m_phys
    }

    pub fn partner_mass(&self) -> f64 {
        self.bare.M()
    }

    fn sigma_momentum(&self, q: Complex64) -> Complex64 {
        match self.mode {
            SigmaMode::MomentumDependent => q,
            SigmaMode::Frozen => Complex64::from(0.0),
        }
    }

    /// `(𝓔_Σ, ∂𝓔_Σ/∂E)` at one momentum.
    pub fn energy_and_slope(&self, e: Complex64, q: Complex64) -> Result<(Complex64, Complex64)> {
        let (s, ds) = sigma_with_derivative(&self.coupling, self.bare.M(), e, self.sigma_momentum(q), &self.loop_mesh, true)?;
        Ok((kinematics::energy(&self.bare, q)? + s, ds))
    }
}

/// `𝓔_Σ(E₃; q)`
pub fn dressed_energy(dc: &DressedChannel, e3: Complex64, q: Complex64) -> Result<Complex64> {
    let s = self_energy_sigma(&dc.coupling, dc.bare.M(), e3, dc.sigma_momentum(q), &dc.loop_mesh)?;
    Ok(kinematics::energy(&dc.bare, q)? + s)
}

impl ChannelEnergy for DressedChannel {
    fn label(&self) -> &str {
        &self.label
    }

    /// `m_phys + M`
    fn threshold(&self) -> Complex64 {
        self.m_phys + self.bare.M()
    }

    fn energies(&self, e: Complex64, p: &[Complex64]) -> Result<Vec<Complex64>> {
        match self.mode {
            SigmaMode::MomentumDependent => p.iter().map(|&q| dressed_energy(self, e, q)).collect(),
            SigmaMode::Frozen => {
                let s = self_energy_sigma(&self.coupling, self.bare.M(), e, Complex64::from(0.0), &self.loop_mesh)?;
                p.iter().map(|&q| Ok(kinematics::energy(&self.bare, q)? + s)).collect()
            }
        }
    }

    fn is_energy_dependent(&self) -> bool {
        self.coupling.alpha != 0.0
    }

    fn free_channel(&self) -> Option<&Channel> {
        if self.coupling.alpha == 0.0 {
            Some(&self.bare)
        } else {
            None
        }
    }
}
