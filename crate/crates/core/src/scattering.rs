//! Discretised (complex-scaled) Lippmann–Schwinger equation.
//!
//! Index convention for every matrix: `j · n + i` for channel `j` and mesh
//! node `i`.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinematics::{self, Channel, Sheet};
use crate::numerics::linalg::{self, CMat, CVec};
use crate::numerics::MomentumMesh;
use crate::potential::{check_request, shape_matrix, Interaction};

/// Two-body energy `𝓔_j(E; p)` of a channel. Free channels ignore `E`;
/// dressed channels carry a self-energy that depends on it.
pub trait ChannelEnergy: Send + Sync + Debug {
    fn label(&self) -> &str;

    /// Lowest energy of the channel continuum (complex for unstable constituents).
    fn threshold(&self) -> Complex64;

    fn energies(&self, e: Complex64, p: &[Complex64]) -> Result<Vec<Complex64>>;

    fn is_energy_dependent(&self) -> bool {
        false
    }

    /// Plain kinematics, if the channel has no self-energy.
    fn free_channel(&self) -> Option<&Channel> {
        None
    }
}

impl ChannelEnergy for Channel {
    fn label(&self) -> &str {
        Channel::label(self)
    }

    fn threshold(&self) -> Complex64 {
        Complex64::from(Channel::threshold(self))
    }

    fn energies(&self, _e: Complex64, p: &[Complex64]) -> Result<Vec<Complex64>> {
        p.iter().map(|&p| kinematics::energy(self, p)).collect()
    }

    fn free_channel(&self) -> Option<&Channel> {
        Some(self)
    }
}

/// Interaction, channels and partial wave.
#[derive(Debug, Clone)]
pub struct ScatteringSystem {
    interaction: Arc<dyn Interaction>,
    channels: Vec<Arc<dyn ChannelEnergy>>,
    l: usize,
}

impl ScatteringSystem {
    pub fn new(interaction: Arc<dyn Interaction>, channels: Vec<Arc<dyn ChannelEnergy>>, l: usize) -> Result<Self> {
        if channels.len() != interaction.n_channels() {
            return Err(Error::InvalidInput(format!(
                "{} expects {} channels, got {}",
                interaction.name(),
                interaction.n_channels(),
                channels.len()
            )));
        }
        if !interaction.supports_l(l) {
            return Err(Error::Unsupported(format!("L = {l} for {}", interaction.name())));
        }
        Ok(Self {
            interaction,
            channels,
            l,
        })
    }

    /// Convenience constructor for channels without self-energies.
    pub fn with_channels(interaction: Arc<dyn Interaction>, channels: Vec<Channel>, l: usize) -> Result<Self> {
        let ch = channels
            .into_iter()
            .map(|c| Arc::new(c) as Arc<dyn ChannelEnergy>)
            .collect();
        Self::new(interaction, ch, l)
    }

    pub fn interaction(&self) -> &Arc<dyn Interaction> {
        &self.interaction
    }

    pub fn channels(&self) -> &[Arc<dyn ChannelEnergy>] {
        &self.channels
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    /// Same channels and wave with another interaction.
    pub fn with_interaction(&self, interaction: Arc<dyn Interaction>) -> Result<Self> {
        Self::new(interaction, self.channels.clone(), self.l)
    }

    /// Projects the interaction on the mesh once; energies are applied later.
    pub fn discretize(&self, mesh: &MomentumMesh) -> Result<DiscreteSystem> {
        let shape = shape_matrix(self.interaction.as_ref(), self.l, mesh)?;
        DiscreteSystem::from_shape(self.clone(), mesh.clone(), shape)
    }
}

/// A scattering system on a fixed mesh with its shape matrix cached.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    system: ScatteringSystem,
    mesh: MomentumMesh,
    shape: CMat,
    measure: Vec<Complex64>,
    points: Vec<Complex64>,
    free_energies: Vec<Option<Vec<Complex64>>>,
    reference: OnceLock<f64>,
}

impl DiscreteSystem {
    fn from_shape(system: ScatteringSystem, mesh: MomentumMesh, shape: CMat) -> Result<Self> {
        let rot3 = Complex64::from_polar(1.0, -3.0 * mesh.theta());
        let measure = mesh
            .nodes()
            .iter()
            .zip(mesh.weights())
            .map(|(q, w)| rot3 * (w * q * q / (2.0 * PI * PI)))
            .collect();
        let points = mesh.scaled_nodes();
        let free_energies = system
            .channels
            .iter()
            .map(|c| {
                if c.is_energy_dependent() {
                    Ok(None)
                } else {
                    c.energies(Complex64::from(0.0), &points).map(Some)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            system,
            mesh,
            shape,
            measure,
            points,
            free_energies,
            reference: OnceLock::new(),
        })
    }

    /// Same mesh and shape with another interaction strength law.
    ///
    /// Valid only when the new interaction has the same shape.
    pub fn with_same_shape(&self, interaction: Arc<dyn Interaction>) -> Result<Self> {
        let system = self.system.with_interaction(interaction)?;
        Self::from_shape(system, self.mesh.clone(), self.shape.clone())
    }

    pub fn system(&self) -> &ScatteringSystem {
        &self.system
    }

    pub fn mesh(&self) -> &MomentumMesh {
        &self.mesh
    }

    pub fn theta(&self) -> f64 {
        self.mesh.theta()
    }

    pub fn dim(&self) -> usize {
        self.system.n_channels() * self.mesh.n()
    }

    pub fn shape(&self) -> &CMat {
        &self.shape
    }

    /// `w_i q_i² e^{-3iθ} / (2π²)` per node.
    pub fn measure(&self) -> &[Complex64] {
        &self.measure
    }

    /// `q_i e^{-iθ}`.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// `𝓔_j(E; q_i e^{-iθ})` for every channel.
    pub fn channel_energies(&self, e: Complex64) -> Result<Vec<Vec<Complex64>>> {
        self.system
            .channels
            .iter()
            .zip(&self.free_energies)
            .map(|(c, cached)| match cached {
                Some(v) => Ok(v.clone()),
                None => c.energies(e, &self.points),
            })
            .collect()
    }

    /// Diagonal of `measure / (E − 𝓔)`.
    pub fn propagator(&self, e: Complex64) -> Result<CVec> {
        let n = self.mesh.n();
        let energies = self.channel_energies(e)?;
        let tol = 1e-12 * e.norm().max(1.0);
        let mut g = CVec::zeros(self.dim());
        for (j, ej) in energies.iter().enumerate() {
            for i in 0..n {
                let d = e - ej[i];
                if d.norm() <= tol {
                    return Err(Error::SingularDenominator {
                        energy: e,
                        node: j * n + i,
                    });
                }
                g[j * n + i] = self.measure[i] / d;
            }
        }
        Ok(g)
    }

    pub fn potential(&self, e: Complex64) -> CMat {
        &self.shape * self.system.interaction.strength(e)
    }

    pub fn potential_derivative(&self, e: Complex64) -> CMat {
        &self.shape * self.system.interaction.strength_derivative(e)
    }

    pub fn kernel(&self, e: Complex64) -> Result<KernelMatrix> {
        let g = self.propagator(e)?;
        let mut k = self.potential(e);
        for (c, gc) in g.iter().enumerate() {
            let mut col = k.column_mut(c);
            col *= *gc;
        }
        Ok(KernelMatrix {
            k,
            energy: e,
            theta: self.theta(),
        })
    }

    pub fn one_minus_kernel(&self, e: Complex64) -> Result<CMat> {
        let k = self.kernel(e)?.k;
        Ok(CMat::identity(self.dim(), self.dim()) - k)
    }

    /// `ln det(1 − K(E))`.
    pub fn log_det(&self, e: Complex64) -> Result<Complex64> {
        linalg::log_det(&self.one_minus_kernel(e)?)
    }

    /// `Re ln det` at a reference energy below every threshold.
    pub(crate) fn reference_log_det(&self) -> f64 {
        *self.reference.get_or_init(|| {
            let lowest = self
                .system
                .channels
                .iter()
                .map(|c| c.threshold().re)
                .fold(f64::INFINITY, f64::min);
            let e_ref = Complex64::new(lowest - 100.0, 0.0);
            match self.log_det(e_ref) {
                Ok(v) if v.re.is_finite() => v.re,
                _ => 0.0,
            }
        })
    }
}

/// `K_{(j i),(l i')} = V_jl(E; p_i, p_i') · measure_i' / (E − 𝓔_l(p_i'))`.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub k: CMat,
    pub energy: Complex64,
    pub theta: f64,
}

#[derive(Debug, Clone)]
pub struct AmplitudeMatrix {
    pub t: CMat,
    pub energy: Complex64,
    pub theta: f64,
    pub l: usize,
    /// Backward error `‖(1 − K)T − V‖ / (‖1 − K‖ ‖T‖ + ‖V‖)`
    pub residual: f64,
    pub condition: f64,
}

impl AmplitudeMatrix {
    /// `‖T − Tᵀ‖ / ‖T‖`
    pub fn asymmetry(&self) -> f64 {
        let n = self.t.norm();
        if n == 0.0 {
            return 0.0;
        }
        (&self.t - self.t.transpose()).norm() / n
    }
}

pub fn build_kernel(ds: &DiscreteSystem, e: Complex64) -> Result<KernelMatrix> {
    ds.kernel(e)
}

/// Solves `(1 − K) T = V` at complex energy.
pub fn solve_half_offshell(ds: &DiscreteSystem, e: Complex64) -> Result<AmplitudeMatrix> {
    let v = ds.potential(e);
    let a = ds.one_minus_kernel(e)?;
    let (t, condition) = linalg::solve_checked(&a, &v)?;
    let residual = linalg::relative_residual(&a, &t, &v);
    if residual > 1e-10 {
        return Err(Error::NearSingular { condition });
    }
    Ok(AmplitudeMatrix {
        t,
        energy: e,
        theta: ds.theta(),
        l: ds.system.l,
        residual,
        condition,
    })
}

/// On-shell amplitudes among the open channels at a real energy.
#[derive(Debug, Clone)]
pub struct OnShellResult {
    pub energy: f64,
    pub l: usize,
    /// Indices of the open channels, in the order of `t` and `rho`.
    pub open: Vec<usize>,
    pub momenta: Vec<f64>,
    pub t: CMat,
    pub rho: Vec<f64>,
}

impl OnShellResult {
    /// `S = 1 − iρT` for a single open channel.
    pub fn s_single(&self) -> Option<Complex64> {
        if self.open.len() != 1 {
            return None;
        }
        Some(Complex64::from(1.0) - Complex64::i() * self.rho[0] * self.t[(0, 0)])
    }

    /// `δ` from `S = e^{2iδ}`, in radians on `(−π/2, π/2]`.
    pub fn phase_shift(&self) -> Option<f64> {
        self.s_single().map(|s| 0.5 * s.arg())
    }
}

/// Real-axis solve with the on-shell momenta appended as extra nodes and the
/// principal value handled by subtraction.
pub fn onshell_real_axis(sys: &ScatteringSystem, e: f64, mesh: &MomentumMesh) -> Result<OnShellResult> {
    if mesh.theta() != 0.0 {
        return Err(Error::InvalidInput("on-shell amplitudes need an unrotated mesh (theta = 0)".into()));
    }
    let nc = sys.n_channels();
    let q = mesh.nodes();
    let w = mesh.weights();
    let n = mesh.n();
    let mut nodes: Vec<Vec<f64>> = Vec::with_capacity(nc);
    let mut open = Vec::new();
    let mut momenta = Vec::new();
    let mut rho = Vec::new();
    let mut props: Vec<Vec<Complex64>> = Vec::with_capacity(nc);
    let ec = Complex64::from(e);
    for (j, chan) in sys.channels.iter().enumerate() {
        check_request(sys.interaction.as_ref(), sys.l, j, j, 0.0)?;
        let ch = chan
            .free_channel()
            .ok_or_else(|| Error::Unsupported("on-shell solve with a dressed channel".into()))?;
        let mut g: Vec<Complex64> = Vec::with_capacity(n + 1);
        let mut nj = q.to_vec();
        for i in 0..n {
            let d = e - kinematics::energy(ch, Complex64::from(q[i]))?.re;
            if d.abs() <= 1e-12 * e.abs() {
                return Err(Error::SingularDenominator { energy: ec, node: j * n + i });
            }
            g.push(Complex64::from(w[i] * q[i] * q[i] / (2.0 * PI * PI) / d));
        }
        if e > ch.threshold() {
            let k0 = kinematics::onshell_momentum(ch, ec, Sheet::Physical)?.re;
            if q.iter().any(|&qi| (qi - k0).abs() <= 1e-9 * k0) {
                return Err(Error::SingularDenominator { energy: ec, node: j * n });
            }
            let de = kinematics::energy_derivative(ch, Complex64::from(k0))?.re;
            // the principal value of ∫ dq/(k0²−q²) vanishes on the half line
            let upper = mesh.upper();
            let pv = if upper.is_finite() { ((upper + k0) / (upper - k0)).ln() / (2.0 * k0) } else { 0.0 };
            if !(upper > k0) {
                return Err(Error::InvalidInput(format!("on-shell momentum {k0} MeV beyond the mesh range")));
            }
            let sub: f64 = q.iter().zip(w).map(|(qi, wi)| wi / (k0 * k0 - qi * qi)).sum::<f64>() - pv;
            let g0 = k0 * k0 / (2.0 * PI * PI) * Complex64::new(-2.0 * k0 / de * sub, -PI / de);
            g.push(g0);
            nj.push(k0);
            open.push(j);
            momenta.push(k0);
            rho.push(kinematics::phase_space(ch, e)?);
        }
        nodes.push(nj);
        props.push(g);
    }
    if open.is_empty() {
        return Err(Error::Domain(format!("energy {e} MeV is below every threshold")));
    }
    let offsets: Vec<usize> = nodes
        .iter()
        .scan(0, |acc, v| {
            let o = *acc;
            *acc += v.len();
            Some(o)
        })
        .collect();
    let dim: usize = nodes.iter().map(Vec::len).sum();
    let strength = sys.interaction.strength(ec);
    let mut v = CMat::zeros(dim, dim);
    for j in 0..nc {
        for k in j..nc {
            let block = sys.interaction.shape_on_ray(sys.l, j, k, &nodes[j], &nodes[k], 0.0)? * strength;
            v.view_mut((offsets[j], offsets[k]), (nodes[j].len(), nodes[k].len())).copy_from(&block);
            if j != k {
                v.view_mut((offsets[k], offsets[j]), (nodes[k].len(), nodes[j].len()))
                    .copy_from(&block.transpose());
            }
        }
    }
    let g: Vec<Complex64> = props.into_iter().flatten().collect();
    let mut a = -v.clone();
    for c in 0..dim {
        let mut col = a.column_mut(c);
        col *= g[c];
        a[(c, c)] += Complex64::from(1.0);
    }
    let (tfull, _) = linalg::solve_checked(&a, &v)?;
    let idx: Vec<usize> = open.iter().map(|&j| offsets[j] + nodes[j].len() - 1).collect();
    let t = CMat::from_fn(open.len(), open.len(), |a, b| tfull[(idx[a], idx[b])]);
    Ok(OnShellResult {
        energy: e,
        l: sys.l,
        open,
        momenta,
        t,
        rho,
    })
}

/// Relative violation of `Im T_jj = −Σ_k (ρ_k/2) |T_jk|²`, maximised over open channels.
pub fn optical_residual(res: &OnShellResult) -> f64 {
    let m = res.open.len();
    let mut worst: f64 = 0.0;
    for j in 0..m {
        let im = res.t[(j, j)].im;
        let unit: f64 = (0..m).map(|k| 0.5 * res.rho[k] * res.t[(j, k)].norm_sqr()).sum();
        let scale = im.abs() + unit;
        if scale > 0.0 {
            worst = worst.max((im + unit).abs() / scale);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::KinematicsMode;
    use crate::numerics::{tangent_mapped_mesh, tangent_mapped_mesh_to};
    use crate::potential::{EnergyLaw, ModelA, ModelB, ModelC, ModelD};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn model_a_system(v0: f64) -> ScatteringSystem {
        let m = 1115.7;
        let ch = Channel::new(m, 35.0 * m, KinematicsMode::NonRelativistic, "A").unwrap();
        let model = ModelA {
            law: EnergyLaw::constant(v0),
            ..Default::default()
        }
        .build()
        .unwrap();
        ScatteringSystem::with_channels(Arc::new(model), vec![ch], 0).unwrap()
    }

    fn model_c_system(x: f64) -> ScatteringSystem {
        let c1 = Channel::new(495.7, 938.9, KinematicsMode::SemiRelativistic, "KN").unwrap();
        let c2 = Channel::new(138.0, 1193.1, KinematicsMode::SemiRelativistic, "piS").unwrap();
        let model = ModelC { x, ..Default::default() }.build().unwrap();
        ScatteringSystem::with_channels(Arc::new(model), vec![c1, c2], 0).unwrap()
    }

    #[test]
    fn zero_potential_gives_zero_kernel_and_amplitude() {
        let sys = model_a_system(0.0);
        let mesh = tangent_mapped_mesh(24, 300.0, 0.0).unwrap();
        let ds = sys.discretize(&mesh).unwrap();
        let e = c(40165.2 - 10.0, 0.0);
        assert_eq!(ds.kernel(e).unwrap().k.norm(), 0.0);
        let t = solve_half_offshell(&ds, e).unwrap();
        assert_eq!(t.t.norm(), 0.0);
        let os = onshell_real_axis(&sys, 40165.2 + 5.0, &mesh).unwrap();
        assert_eq!(os.t[(0, 0)], c(0.0, 0.0));
        assert_eq!(optical_residual(&os), 0.0);
    }

    #[test]
    fn two_node_hand_kernel() {
        let sys = model_a_system(-35.0);
        let mesh = MomentumMesh::from_parts(vec![40.0, 200.0], vec![30.0, 150.0], 1.0, 0.0).unwrap();
        let ds = sys.discretize(&mesh).unwrap();
        let e = c(40150.0, 0.0);
        let k = ds.kernel(e).unwrap().k;
        let ch = Channel::new(1115.7, 35.0 * 1115.7, KinematicsMode::NonRelativistic, "A").unwrap();
        let model = sys.interaction();
        for a in 0..2 {
            for b in 0..2 {
                let qa = mesh.nodes()[a];
                let qb = mesh.nodes()[b];
                let v = model.strength(e) * model.shape(0, 0, 0, c(qa, 0.0), c(qb, 0.0), 0.0).unwrap();
                let eb = kinematics::energy(&ch, c(qb, 0.0)).unwrap();
                let want = mesh.weights()[b] * qb * qb / (2.0 * PI * PI) * v / (e - eb);
                assert!((k[(a, b)] - want).norm() < 1e-9 * want.norm());
            }
        }
        assert!(k.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn symmetric_amplitude_below_threshold() {
        let sys = model_a_system(-35.0);
        let mesh = tangent_mapped_mesh(80, 300.0, 0.0).unwrap();
        let ds = sys.discretize(&mesh).unwrap();
        let t = solve_half_offshell(&ds, c(40165.2 - 50.0, 0.0)).unwrap();
        assert!(t.asymmetry() < 1e-10);
        assert!(t.residual < 1e-10);
    }

    #[test]
    fn second_born_at_weak_coupling() {
        for l in 0..=2 {
            let m = 938.9;
            let ch = Channel::new(m, m, KinematicsMode::NonRelativistic, "NN").unwrap();
            let model = ModelB {
                law: EnergyLaw::constant(-50.0e-3),
                ..Default::default()
            }
            .build()
            .unwrap();
            let sys = ScatteringSystem::with_channels(Arc::new(model), vec![ch], l).unwrap();
            let mesh = tangent_mapped_mesh(60, 300.0, 0.3).unwrap();
            let ds = sys.discretize(&mesh).unwrap();
            let e = c(1877.8 + 3.0, -0.5);
            let t = solve_half_offshell(&ds, e).unwrap().t;
            let v = ds.potential(e);
            let g = ds.propagator(e).unwrap();
            let n = mesh.n();
            // V G V by explicit summation over intermediate nodes
            let mut vgv = CMat::zeros(n, n);
            for a in 0..n {
                for b in 0..n {
                    let mut s = c(0.0, 0.0);
                    for k in 0..n {
                        s += v[(a, k)] * g[k] * v[(k, b)];
                    }
                    vgv[(a, b)] = s;
                }
            }
            let third = (&t - &v - &vgv).norm();
            assert!(third < 5e-3 * vgv.norm(), "L={l}: {third} vs {}", vgv.norm());
        }
    }

    #[test]
    fn optical_theorem_single_channel() {
        let sys = model_a_system(-35.0);
        let mesh = tangent_mapped_mesh(100, 300.0, 0.0).unwrap();
        let os = onshell_real_axis(&sys, 40165.2 + 5.0, &mesh).unwrap();
        assert!(optical_residual(&os) < 1e-8);
        assert!((os.s_single().unwrap().norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn optical_theorem_coupled_channels() {
        let sys = model_c_system(0.5);
        let mesh = tangent_mapped_mesh(80, 300.0, 0.0).unwrap();
        let os = onshell_real_axis(&sys, 1460.0, &mesh).unwrap();
        assert_eq!(os.open, vec![0, 1]);
        assert!(optical_residual(&os) < 1e-8);
        assert!((os.t[(0, 1)] - os.t[(1, 0)]).norm() < 1e-10 * os.t.norm());
        let os = onshell_real_axis(&sys, 1400.0, &mesh).unwrap();
        assert_eq!(os.open, vec![1]);
        assert!(optical_residual(&os) < 1e-8);
        assert!(onshell_real_axis(&sys, 1300.0, &mesh).is_err());
    }

    #[test]
    fn onshell_converges_with_mesh() {
        let sys = model_a_system(-35.0);
        let e = 40165.2 + 5.0;
        let a = onshell_real_axis(&sys, e, &tangent_mapped_mesh_to(100, 300.0, 4000.0, 0.0).unwrap()).unwrap();
        let b = onshell_real_axis(&sys, e, &tangent_mapped_mesh_to(200, 300.0, 4000.0, 0.0).unwrap()).unwrap();
        let (ta, tb) = (a.t[(0, 0)], b.t[(0, 0)]);
        assert!((ta - tb).norm() < 1e-6 * tb.norm(), "{ta} {tb}");
    }

    #[test]
    fn bounded_mesh_principal_value() {
        let sys = model_a_system(-35.0);
        let e = 40165.2 + 20.0;
        let a = onshell_real_axis(&sys, e, &tangent_mapped_mesh_to(120, 300.0, 3000.0, 0.0).unwrap()).unwrap();
        let b = onshell_real_axis(&sys, e, &tangent_mapped_mesh_to(120, 300.0, 6000.0, 0.0).unwrap()).unwrap();
        assert!((a.t[(0, 0)] - b.t[(0, 0)]).norm() < 1e-8 * b.t[(0, 0)].norm());
        assert!(optical_residual(&a) < 1e-8);
        let low = tangent_mapped_mesh_to(40, 300.0, 50.0, 0.0).unwrap();
        assert!(onshell_real_axis(&sys, e, &low).is_err());
    }

    #[test]
    fn yukawa_optical_theorem() {
        let ch = Channel::new(600.0, 938.9, KinematicsMode::SemiRelativistic, "AB").unwrap();
        let sys = ScatteringSystem::with_channels(Arc::new(ModelD::default()), vec![ch], 0).unwrap();
        let mesh = tangent_mapped_mesh(80, 300.0, 0.0).unwrap();
        let os = onshell_real_axis(&sys, 1560.0, &mesh).unwrap();
        assert!(optical_residual(&os) < 1e-8);
    }

    #[test]
    fn singular_node_is_reported() {
        let sys = model_a_system(-35.0);
        let mesh = MomentumMesh::from_parts(vec![40.0, 200.0], vec![30.0, 150.0], 1.0, 0.0).unwrap();
        let ds = sys.discretize(&mesh).unwrap();
        let ch = Channel::new(1115.7, 35.0 * 1115.7, KinematicsMode::NonRelativistic, "A").unwrap();
        let e = kinematics::energy(&ch, c(40.0, 0.0)).unwrap();
        assert!(matches!(ds.kernel(e), Err(Error::SingularDenominator { node: 0, .. })));
    }

    #[test]
    fn channel_count_mismatch() {
        let ch = Channel::new(1.0, 1.0, KinematicsMode::NonRelativistic, "x").unwrap();
        let model = ModelC::default().build().unwrap();
        assert!(ScatteringSystem::with_channels(Arc::new(model), vec![ch], 0).is_err());
    }
}
