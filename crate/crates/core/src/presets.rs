//! Ready-made scenarios for models A–D and the pipelines run on them.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result, StageExt};
use crate::kinematics::{Channel, KinematicsMode};
use crate::numerics::{tangent_mapped_mesh_to, MomentumMesh};
use crate::potential::{ChannelSubset, EnergyLaw, Interaction, LocalPotential, ModelA, ModelB, ModelC, ModelD};
use crate::scattering::{onshell_real_axis, optical_residual, ChannelEnergy, DiscreteSystem, ScatteringSystem};
use crate::spectrum;
use crate::structure::{self, PoleAnalysis};
use crate::unstable::{decay_channel_compositeness, decay_compositeness_closed_form, BareCoupling, DressedChannel, SigmaMode};

pub const PRESET_NAMES: [&str; 4] = ["model-a", "model-b", "model-c", "model-d"];

/// Tangent-mapped momentum mesh, optionally bounded at `upper` MeV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshSpec {
    pub n: usize,
    pub scale: f64,
    pub upper: Option<f64>,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self {
            n: 200,
            scale: 300.0,
            upper: None,
        }
    }
}

impl MeshSpec {
    pub fn build(&self, theta: f64) -> Result<MomentumMesh> {
        tangent_mapped_mesh_to(self.n, self.scale, self.upper.unwrap_or(f64::INFINITY), theta)
    }

    pub fn doubled(&self) -> Self {
        Self { n: 2 * self.n, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    A(ModelA),
    B(ModelB),
    C(ModelC),
    /// Yukawa exchange between a dressed particle and a stable partner.
    D {
        yukawa: ModelD,
        coupling: BareCoupling,
        sigma: SigmaMode,
    },
}

impl ModelSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::A(_) => "model-a",
            ModelSpec::B(_) => "model-b",
            ModelSpec::C(_) => "model-c",
            ModelSpec::D { .. } => "model-d",
        }
    }

    pub fn law(&self) -> Option<EnergyLaw> {
        match self {
            ModelSpec::A(m) => Some(m.law),
            ModelSpec::B(m) => Some(m.law),
            ModelSpec::C(m) => Some(m.law),
            ModelSpec::D { .. } => None,
        }
    }

    fn local(&self) -> Result<Option<LocalPotential>> {
        Ok(match self {
            ModelSpec::A(m) => Some(m.build()?),
            ModelSpec::B(m) => Some(m.build()?),
            ModelSpec::C(m) => Some(m.build()?),
            ModelSpec::D { .. } => None,
        })
    }
}

/// One state to look for: partial wave and a starting energy.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    pub label: String,
    pub l: usize,
    pub guess: Complex64,
}

impl StateSpec {
    pub fn new(label: &str, l: usize, guess: Complex64) -> Self {
        Self {
            label: label.to_string(),
            l,
            guess,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub model: ModelSpec,
    /// For model D a single channel: the bare particle and its partner.
    pub channels: Vec<Channel>,
    /// Channels of the model kept in the calculation; all when `None`.
    pub keep: Option<Vec<usize>>,
    pub states: Vec<StateSpec>,
    /// Radians.
    pub theta: f64,
    pub mesh: MeshSpec,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Scenario {
    pub fn preset(name: &str) -> Result<Self> {
        let sc = match name {
            "model-a" => {
                let m = 1115.7;
                let ch = Channel::new(m, 35.0 * m, KinematicsMode::NonRelativistic, "A")?;
                let th = ch.threshold();
                Self {
                    name: name.into(),
                    model: ModelSpec::A(ModelA::default()),
                    channels: vec![ch],
                    keep: None,
                    states: vec![
                        StateSpec::new("0s", 0, c(th - 23.2, 0.0)),
                        StateSpec::new("1s", 0, c(th - 2.1, 0.0)),
                        StateSpec::new("0p", 1, c(th - 13.1, 0.0)),
                        StateSpec::new("0d", 2, c(th - 2.6, 0.0)),
                    ],
                    theta: 0.0,
                    mesh: MeshSpec {
                        upper: Some(4000.0),
                        ..MeshSpec::default()
                    },
                }
            }
            "model-b" => Self {
                name: name.into(),
                model: ModelSpec::B(ModelB::default()),
                channels: vec![Channel::new(938.9, 938.9, KinematicsMode::NonRelativistic, "NN")?],
                keep: None,
                states: vec![StateSpec::new("res", 0, c(1884.0, -0.1))],
                theta: 20f64.to_radians(),
                mesh: MeshSpec::default(),
            },
            "model-c" => Self {
                name: name.into(),
                model: ModelSpec::C(ModelC::default()),
                channels: vec![
                    Channel::new(495.7, 938.9, KinematicsMode::SemiRelativistic, "KN")?,
                    Channel::new(138.0, 1193.1, KinematicsMode::SemiRelativistic, "piSigma")?,
                ],
                keep: None,
                states: vec![StateSpec::new("qbs", 0, c(1412.0, -7.3))],
                theta: 20f64.to_radians(),
                mesh: MeshSpec::default(),
            },
            "model-d" => Self {
                name: name.into(),
                model: ModelSpec::D {
                    yukawa: ModelD::default(),
                    coupling: BareCoupling::new(0.15, 600.0, 600.0, 138.0)?,
                    sigma: SigmaMode::MomentumDependent,
                },
                channels: vec![Channel::new(600.0, 938.9, KinematicsMode::SemiRelativistic, "AB")?],
                keep: None,
                states: vec![StateSpec::new("qbs", 0, c(1363.8, -32.2))],
                theta: 20f64.to_radians(),
                mesh: MeshSpec::default(),
            },
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown preset '{other}'; expected one of {}",
                    PRESET_NAMES.join(", ")
                )))
            }
        };
        Ok(sc)
    }

    /// Model C with the coupling switched off and only the first channel kept.
    pub fn model_c_uncoupled() -> Result<Self> {
        let mut sc = Self::preset("model-c")?;
        if let ModelSpec::C(m) = &mut sc.model {
            m.x = 0.0;
        }
        sc.name = "model-c-x0".into();
        sc.channels.truncate(1);
        sc.keep = Some(vec![0]);
        sc.theta = 0.0;
        let th = sc.channels[0].threshold();
        sc.states = vec![StateSpec::new("bound", 0, c(th - 3.5, 0.0))];
        Ok(sc)
    }

    pub fn with_mesh(&self, mesh: MeshSpec) -> Self {
        Self { mesh, ..self.clone() }
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        Self { theta, ..self.clone() }
    }

    /// Replaces the energy law of a local model.
    pub fn with_law(&self, law: EnergyLaw) -> Result<Self> {
        let mut sc = self.clone();
        match &mut sc.model {
            ModelSpec::A(m) => m.law = law,
            ModelSpec::B(m) => m.law = law,
            ModelSpec::C(m) => m.law = law,
            ModelSpec::D { .. } => return Err(Error::Unsupported("model D has no energy law".into())),
        }
        Ok(sc)
    }

    /// Checks parameters and channel counts without solving anything.
    pub fn validate(&self) -> Result<()> {
        if self.states.is_empty() {
            return Err(Error::InvalidInput("scenario has no states to solve".into()));
        }
        if let ModelSpec::D { yukawa, .. } = &self.model {
            yukawa.validate()?;
            if self.channels.len() != 1 {
                return Err(Error::InvalidInput("model D takes exactly one channel".into()));
            }
        }
        let interaction = self.interaction()?;
        if interaction.n_channels() != self.channels.len() {
            return Err(Error::InvalidInput(format!(
                "model has {} channels but {} are configured",
                interaction.n_channels(),
                self.channels.len()
            )));
        }
        self.mesh.build(self.theta)?;
        Ok(())
    }

    fn wrap(&self, inner: Arc<dyn Interaction>) -> Result<Arc<dyn Interaction>> {
        match &self.keep {
            Some(keep) => Ok(Arc::new(ChannelSubset::new(inner, keep.clone())?)),
            None => Ok(inner),
        }
    }

    pub fn interaction(&self) -> Result<Arc<dyn Interaction>> {
        match (&self.model, self.model.local()?) {
            (_, Some(local)) => self.wrap(Arc::new(local)),
            (ModelSpec::D { yukawa, .. }, None) => {
                yukawa.validate()?;
                self.wrap(Arc::new(*yukawa))
            }
            _ => unreachable!("local models always build a potential"),
        }
    }

    fn interaction_with_law(&self, law: EnergyLaw) -> Result<Arc<dyn Interaction>> {
        let local = self
            .model
            .local()?
            .ok_or_else(|| Error::Unsupported("model D has no energy law".into()))?;
        self.wrap(Arc::new(local.with_law(law)))
    }

    /// Channel energies on `mesh`; model D dresses its channel with the self-energy.
    pub fn channel_energies(&self, mesh: &MomentumMesh) -> Result<Vec<Arc<dyn ChannelEnergy>>> {
        match &self.model {
            ModelSpec::D { coupling, sigma, .. } => {
                let ch = &self.channels[0];
                let dc = DressedChannel::new(*coupling, ch.M(), mesh.clone(), ch.label())?.with_mode(*sigma);
                Ok(vec![Arc::new(dc)])
            }
            _ => Ok(self
                .channels
                .iter()
                .map(|ch| Arc::new(ch.clone()) as Arc<dyn ChannelEnergy>)
                .collect()),
        }
    }

    pub fn system(&self, l: usize) -> Result<ScatteringSystem> {
        let mesh = self.mesh.build(self.theta)?;
        ScatteringSystem::new(self.interaction()?, self.channel_energies(&mesh)?, l)
    }

    pub fn discretize(&self, l: usize) -> Result<DiscreteSystem> {
        let mesh = self.mesh.build(self.theta)?;
        ScatteringSystem::new(self.interaction()?, self.channel_energies(&mesh)?, l)?.discretize(&mesh)
    }
}

#[derive(Debug, Clone)]
pub struct StateOutcome {
    pub spec: StateSpec,
    pub analysis: PoleAnalysis,
    /// Root of the Fredholm determinant from the same guess.
    pub determinant_root: Complex64,
}

/// Decay side of model D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySummary {
    pub m_phys: Complex64,
    /// Through residues of the bare-state amplitude.
    pub x_d: Complex64,
    /// `−G'/(1 − G')` at the physical mass.
    pub x_d_closed_form: Complex64,
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub name: String,
    pub states: Vec<StateOutcome>,
    pub decay: Option<DecaySummary>,
}

fn solve_state(ds: &DiscreteSystem, name: &str, spec: &StateSpec) -> Result<StateOutcome> {
    let tag = format!("{name} {}", spec.label);
    let e_pole = structure::locate_pole(ds, spec.guess).stage(format!("{tag}: pole search"))?;
    let determinant_root = spectrum::find_eigenenergy(ds, spec.guess).stage(format!("{tag}: determinant root"))?;
    let analysis = structure::analyze_at(ds, e_pole, name).stage(format!("{tag}: residues and compositeness"))?;
    Ok(StateOutcome {
        spec: spec.clone(),
        analysis,
        determinant_root,
    })
}

pub fn decay_summary(coupling: &BareCoupling, mesh: &MomentumMesh) -> Result<DecaySummary> {
    let m_phys = crate::unstable::physical_mass(coupling, mesh).stage("physical mass")?;
    let x_d = decay_channel_compositeness(coupling, mesh).stage("decay-channel compositeness")?;
    let x_d_closed_form = decay_compositeness_closed_form(coupling, m_phys, mesh).stage("decay-channel compositeness")?;
    Ok(DecaySummary {
        m_phys,
        x_d,
        x_d_closed_form,
    })
}

/// Full pipeline for every state of the scenario, in order.
pub fn run_scenario(sc: &Scenario) -> Result<ScenarioRun> {
    sc.validate().stage(format!("{}: configuration", sc.name))?;
    let mut ls: Vec<usize> = sc.states.iter().map(|s| s.l).collect();
    ls.sort_unstable();
    ls.dedup();
    let systems: Vec<(usize, DiscreteSystem)> = ls
        .iter()
        .map(|&l| Ok((l, sc.discretize(l).stage(format!("{}: discretization L={l}", sc.name))?)))
        .collect::<Result<_>>()?;
    let states = sc
        .states
        .par_iter()
        .map(|spec| {
            let ds = &systems.iter().find(|(l, _)| *l == spec.l).expect("discretized").1;
            solve_state(ds, &sc.name, spec)
        })
        .collect::<Result<Vec<_>>>()?;
    let decay = match &sc.model {
        ModelSpec::D { coupling, .. } => {
            let mesh = sc.mesh.build(sc.theta)?;
            Some(decay_summary(coupling, &mesh).stage(&sc.name)?)
        }
        _ => None,
    };
    Ok(ScenarioRun {
        name: sc.name.clone(),
        states,
        decay,
    })
}

#[derive(Debug)]
pub struct ScanPoint {
    pub v1: f64,
    pub outcome: Result<PoleAnalysis>,
}

/// Pole analysis of one state as a function of `v1`, with `E0` pinned to the
/// pole found at `v1 = 0` so the pole stays put.
pub fn scan_v1(sc: &Scenario, state: usize, values: &[f64]) -> Result<(Complex64, Vec<ScanPoint>)> {
    let spec = sc
        .states
        .get(state)
        .ok_or_else(|| Error::InvalidInput(format!("no state with index {state}")))?;
    let law = sc
        .model
        .law()
        .ok_or_else(|| Error::Unsupported("v1 scans need a model with an energy law".into()))?;
    let base = sc.with_law(EnergyLaw::constant(law.v0))?;
    base.validate().stage(format!("{}: configuration", sc.name))?;
    let ds = base.discretize(spec.l).stage(format!("{}: discretization", sc.name))?;
    let e_pole = structure::locate_pole(&ds, spec.guess).stage(format!("{} {}: pole search at v1=0", sc.name, spec.label))?;
    let points = values
        .par_iter()
        .map(|&v1| {
            let outcome = base
                .interaction_with_law(law.pinned(v1, e_pole))
                .and_then(|inter| ds.with_same_shape(inter))
                .and_then(|dv| structure::analyze_pole(&dv, e_pole, &format!("{} v1={v1}", sc.name)))
                .stage(format!("{} {} v1={v1}", sc.name, spec.label));
            ScanPoint { v1, outcome }
        })
        .collect();
    Ok((e_pole, points))
}

/// Default `v1` grid per model.
pub fn default_v1_grid(sc: &Scenario) -> Vec<f64> {
    match sc.model {
        ModelSpec::A(_) => vec![-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5],
        _ => vec![-0.3, -0.25, -0.2, -0.15, -0.1, -0.05, 0.0],
    }
}

#[derive(Debug)]
pub struct FrozenPoint {
    pub beta: f64,
    pub outcome: Result<FrozenState>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenState {
    pub e_pole: Complex64,
    pub x: Complex64,
    /// `X + X_d`
    pub sum: Complex64,
}

/// Model D with `Σ(E; q) → Σ(E; 0)`, followed in `β` from the first value
/// onwards with each pole seeding the next search.
pub fn frozen_sigma_scan(sc: &Scenario, betas: &[f64]) -> Result<(DecaySummary, Vec<FrozenPoint>)> {
    let ModelSpec::D { yukawa, coupling, .. } = &sc.model else {
        return Err(Error::Unsupported("frozen self-energy scan needs model D".into()));
    };
    let mesh = sc.mesh.build(sc.theta)?;
    let decay = decay_summary(coupling, &mesh)?;
    let mut guess = sc.states[0].guess;
    let mut points = Vec::with_capacity(betas.len());
    for &beta in betas {
        let mut frozen = sc.clone();
        frozen.model = ModelSpec::D {
            yukawa: ModelD { beta, ..*yukawa },
            coupling: *coupling,
            sigma: SigmaMode::Frozen,
        };
        let outcome = frozen
            .discretize(0)
            .and_then(|ds| structure::analyze_pole(&ds, guess, "model-d frozen"))
            .map(|a| FrozenState {
                e_pole: a.report.e_pole,
                x: a.report.x[0],
                sum: a.report.x[0] + decay.x_d,
            })
            .stage(format!("model-d frozen beta={beta}"));
        if let Ok(s) = &outcome {
            guess = s.e_pole;
        }
        points.push(FrozenPoint { beta, outcome });
    }
    Ok((decay, points))
}

/// On-shell optical-theorem residual at real energies, `θ = 0`.
pub fn optical_check(sc: &Scenario, l: usize, energies: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mesh = sc.mesh.build(0.0)?;
    let sys = ScatteringSystem::new(sc.interaction()?, sc.channel_energies(&mesh)?, l)?;
    energies
        .par_iter()
        .map(|&e| {
            let res = onshell_real_axis(&sys, e, &mesh).stage(format!("{} on-shell E={e}", sc.name))?;
            Ok((e, optical_residual(&res)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in PRESET_NAMES {
            let sc = Scenario::preset(name).unwrap();
            assert_eq!(sc.model.kind(), name);
            sc.validate().unwrap();
        }
        Scenario::model_c_uncoupled().unwrap().validate().unwrap();
        assert!(Scenario::preset("model-e").is_err());
    }

    #[test]
    fn channel_mismatch_is_rejected() {
        let mut sc = Scenario::preset("model-c").unwrap();
        sc.channels.truncate(1);
        assert!(matches!(sc.validate(), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn mesh_doubling() {
        let m = MeshSpec::default().doubled();
        assert_eq!(m.n, 400);
        assert_eq!(m.build(0.1).unwrap().n(), 400);
    }

    #[test]
    fn scan_keeps_order_and_pins_the_pole() {
        let sc = Scenario::preset("model-b").unwrap();
        let (e_pole, points) = scan_v1(&sc, 0, &[0.0, -0.1]).unwrap();
        assert_eq!(points.len(), 2);
        assert_eq!(points[1].v1, -0.1);
        for p in &points {
            let a = p.outcome.as_ref().unwrap();
            assert!((a.report.e_pole - e_pole).norm() < 1e-6);
        }
    }

    #[test]
    fn stage_is_named_on_failure() {
        let mut sc = Scenario::preset("model-b").unwrap();
        sc.states[0].guess = c(1e9, 0.0);
        let err = run_scenario(&sc).unwrap_err();
        assert!(err.to_string().contains("model-b res"), "{err}");
    }
}
