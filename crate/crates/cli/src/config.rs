//! TOML run configuration. Every section is optional; missing keys fall back
//! to the preset named in `[model] preset`.
//!
//! ```toml
//! [model]
//! preset = "model-c"
//! v0 = -650.0
//! x = 0.5
//!
//! [[channels]]
//! m = 495.7
//! M = 938.9
//! kinematics = "sr"
//! label = "KN"
//!
//! [[states]]
//! label = "qbs"
//! l = 0
//! guess = [1412.0, -7.3]
//!
//! [mesh]
//! n = 200
//! scale = 300.0
//!
//! [solver]
//! theta_deg = 20.0
//!
//! [scan]
//! param = "v1"
//! values = [-0.2, -0.1, 0.0]
//! state = "qbs"
//!
//! [output]
//! dir = "out"
//! ```

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use polewave_core::potential::{EnergyLaw, ModelD};
use polewave_core::presets::{MeshSpec, ModelSpec, Scenario, StateSpec};
use polewave_core::unstable::{BareCoupling, SigmaMode};
use polewave_core::{Channel, KinematicsMode};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub channels: Vec<ChannelSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub states: Vec<StateSection>,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub preset: Option<String>,
    /// Energy law of models A–C.
    pub v0: Option<f64>,
    pub v1: Option<f64>,
    pub e0: Option<f64>,
    pub r_max: Option<f64>,
    /// Model A
    pub a: Option<f64>,
    pub radius: Option<f64>,
    /// Model B
    pub b1: Option<f64>,
    pub b2: Option<f64>,
    /// Model C
    pub b: Option<f64>,
    pub x: Option<f64>,
    /// Keep only these channels (0-based) of a coupled model.
    pub keep: Option<Vec<usize>>,
    /// Model D exchange
    pub beta: Option<f64>,
    pub mu: Option<f64>,
    pub cutoff: Option<f64>,
    /// Model D bare-state coupling
    pub alpha: Option<f64>,
    pub form_lambda: Option<f64>,
    pub m_bare: Option<f64>,
    pub m_d: Option<f64>,
    /// "momentum" or "frozen"
    pub sigma: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    /// "nr" or "sr"
    pub kinematics: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub label: String,
    #[serde(default)]
    pub l: usize,
    /// `[Re, Im]` in MeV.
    pub guess: [f64; 2],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub n: Option<usize>,
    pub scale: Option<f64>,
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub theta_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub param: String,
    pub values: Vec<f64>,
    pub state: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub theta_deg: Option<f64>,
    pub mesh_n: Option<usize>,
    pub mesh_scale: Option<f64>,
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            ConfigError::Parse { source, .. } => ConfigError::Parse {
                path: path.to_path_buf(),
                source,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Parse {
            path: PathBuf::from("<string>"),
            source: Box::new(source),
        })
    }

    pub fn for_preset(name: &str) -> Self {
        Self {
            model: ModelSection {
                preset: Some(name.to_string()),
                ..Default::default()
            },
            ..Default::default()
        }
    }

    /// Builds and validates the scenario before anything is solved.
    pub fn scenario(&self, ov: &Overrides) -> Result<Scenario, ConfigError> {
        let preset = self
            .model
            .preset
            .as_deref()
            .ok_or_else(|| invalid("[model] needs `preset` naming the model (model-a … model-d)"))?;
        let mut sc = Scenario::preset(preset).map_err(|e| invalid(e.to_string()))?;
        self.apply_model(&mut sc.model)?;
        if !self.channels.is_empty() {
            sc.channels = self
                .channels
                .iter()
                .map(ChannelSection::channel)
                .collect::<Result<_, _>>()?;
        }
        if let Some(keep) = &self.model.keep {
            if self.channels.is_empty() {
                sc.channels = keep
                    .iter()
                    .map(|&i| sc.channels.get(i).cloned().ok_or_else(|| invalid(format!("no channel {i} to keep"))))
                    .collect::<Result<_, _>>()?;
            }
            sc.keep = Some(keep.clone());
        }
        if !self.states.is_empty() {
            sc.states = self
                .states
                .iter()
                .map(|s| StateSpec::new(&s.label, s.l, Complex64::new(s.guess[0], s.guess[1])))
                .collect();
        }
        let mesh = MeshSpec {
            n: ov.mesh_n.or(self.mesh.n).unwrap_or(sc.mesh.n),
            scale: ov.mesh_scale.or(self.mesh.scale).unwrap_or(sc.mesh.scale),
            upper: self.mesh.upper.or(sc.mesh.upper),
        };
        sc.mesh = mesh;
        if let Some(deg) = ov.theta_deg.or(self.solver.theta_deg) {
            if !deg.is_finite() {
                return Err(invalid(format!("theta must be finite, got {deg}")));
            }
            sc.theta = deg.to_radians();
        }
        sc.validate().map_err(|e| invalid(e.to_string()))?;
        Ok(sc)
    }

    fn apply_model(&self, spec: &mut ModelSpec) -> Result<(), ConfigError> {
        let m = &self.model;
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        let law = |law: &mut EnergyLaw| {
            set(&mut law.v0, m.v0);
            set(&mut law.v1, m.v1);
            if let Some(e0) = m.e0 {
                law.e0 = Complex64::from(e0);
            }
        };
        let mut foreign: Vec<&str> = match spec {
            ModelSpec::A(a) => {
                law(&mut a.law);
                set(&mut a.a, m.a);
                set(&mut a.radius, m.radius);
                set(&mut a.r_max, m.r_max);
                self.present(&["b1", "b2", "b", "x", "keep"])
            }
            ModelSpec::B(b) => {
                law(&mut b.law);
                set(&mut b.b1, m.b1);
                set(&mut b.b2, m.b2);
                set(&mut b.r_max, m.r_max);
                self.present(&["a", "radius", "b", "x", "keep"])
            }
            ModelSpec::C(c) => {
                law(&mut c.law);
                set(&mut c.b, m.b);
                set(&mut c.x, m.x);
                set(&mut c.r_max, m.r_max);
                self.present(&["a", "radius", "b1", "b2"])
            }
            ModelSpec::D { yukawa, coupling, sigma } => {
                let mut y: ModelD = *yukawa;
                set(&mut y.beta, m.beta);
                set(&mut y.mu, m.mu);
                set(&mut y.lambda, m.cutoff);
                *yukawa = y;
                let mut bc = *coupling;
                set(&mut bc.alpha, m.alpha);
                set(&mut bc.lambda, m.form_lambda);
                set(&mut bc.m_bare, m.m_bare);
                set(&mut bc.m_d, m.m_d);
                *coupling = BareCoupling::new(bc.alpha, bc.lambda, bc.m_bare, bc.m_d).map_err(|e| invalid(e.to_string()))?;
                if let Some(s) = &m.sigma {
                    *sigma = match s.as_str() {
                        "momentum" => SigmaMode::MomentumDependent,
                        "frozen" => SigmaMode::Frozen,
                        other => return Err(invalid(format!("sigma must be \"momentum\" or \"frozen\", got \"{other}\""))),
                    };
                }
                self.present(&["v0", "v1", "e0", "a", "radius", "b1", "b2", "b", "x", "r_max", "keep"])
            }
        };
        let d_only = ["beta", "mu", "cutoff", "alpha", "form_lambda", "m_bare", "m_d", "sigma"];
        if !matches!(spec, ModelSpec::D { .. }) {
            foreign.extend(self.present(&d_only));
        }
        if !foreign.is_empty() {
            return Err(invalid(format!(
                "keys {} do not apply to {}",
                foreign.join(", "),
                spec.kind()
            )));
        }
        if let ModelSpec::D { coupling, .. } = spec {
            if let Some(ch) = self.channels.first() {
                if (ch.m - coupling.m_bare).abs() > 1e-12 {
                    return Err(invalid("model D channel mass m must equal m_bare"));
                }
            }
        }
        Ok(())
    }

    /// Names among `keys` that are set in `[model]`.
    fn present<'a>(&self, keys: &[&'a str]) -> Vec<&'a str> {
        let m = &self.model;
        keys.iter()
            .copied()
            .filter(|k| match *k {
                "v0" => m.v0.is_some(),
                "v1" => m.v1.is_some(),
                "e0" => m.e0.is_some(),
                "r_max" => m.r_max.is_some(),
                "a" => m.a.is_some(),
                "radius" => m.radius.is_some(),
                "b1" => m.b1.is_some(),
                "b2" => m.b2.is_some(),
                "b" => m.b.is_some(),
                "x" => m.x.is_some(),
                "keep" => m.keep.is_some(),
                "beta" => m.beta.is_some(),
                "mu" => m.mu.is_some(),
                "cutoff" => m.cutoff.is_some(),
                "alpha" => m.alpha.is_some(),
                "form_lambda" => m.form_lambda.is_some(),
                "m_bare" => m.m_bare.is_some(),
                "m_d" => m.m_d.is_some(),
                "sigma" => m.sigma.is_some(),
                _ => false,
            })
            .collect()
    }

    pub fn output_dir(&self, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| self.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

impl ChannelSection {
    fn channel(&self) -> Result<Channel, ConfigError> {
        let mode = match self.kinematics.to_ascii_lowercase().as_str() {
            "nr" => KinematicsMode::NonRelativistic,
            "sr" => KinematicsMode::SemiRelativistic,
            other => return Err(invalid(format!("kinematics must be \"nr\" or \"sr\", got \"{other}\""))),
        };
        Channel::new(self.m, self.big_m, mode, self.label.clone()).map_err(|e| invalid(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_only() {
        let cfg = RunConfig::parse("[model]\npreset = \"model-b\"\n").unwrap();
        let sc = cfg.scenario(&Overrides::default()).unwrap();
        assert_eq!(sc, Scenario::preset("model-b").unwrap());
    }

    #[test]
    fn overrides_win() {
        let cfg = RunConfig::parse("[model]\npreset = \"model-b\"\n[mesh]\nn = 120\n[solver]\ntheta_deg = 15.0\n").unwrap();
        let ov = Overrides {
            theta_deg: Some(25.0),
            mesh_n: None,
            mesh_scale: Some(250.0),
        };
        let sc = cfg.scenario(&ov).unwrap();
        assert_eq!(sc.mesh.n, 120);
        assert_eq!(sc.mesh.scale, 250.0);
        assert!((sc.theta - 25f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(RunConfig::parse("[model]\npreset = 3\n"), Err(ConfigError::Parse { .. })));
        assert!(matches!(RunConfig::parse("[modle]\n"), Err(ConfigError::Parse { .. })));
        let no_preset = RunConfig::default();
        assert!(no_preset.scenario(&Overrides::default()).is_err());
        let foreign = RunConfig::parse("[model]\npreset = \"model-a\"\nbeta = -1.0\n").unwrap();
        assert!(foreign.scenario(&Overrides::default()).is_err());
        let wide = RunConfig::parse("[model]\npreset = \"model-b\"\n[solver]\ntheta_deg = 50.0\n").unwrap();
        assert!(wide.scenario(&Overrides::default()).is_err());
        let kin = RunConfig::parse(
            "[model]\npreset = \"model-b\"\n[[channels]]\nm = 1.0\nM = 1.0\nkinematics = \"xr\"\nlabel = \"a\"\n",
        )
        .unwrap();
        assert!(kin.scenario(&Overrides::default()).is_err());
    }

    #[test]
    fn keep_first_channel() {
        let cfg = RunConfig::parse("[model]\npreset = \"model-c\"\nx = 0.0\nkeep = [0]\n[solver]\ntheta_deg = 0.0\n[[states]]\nlabel = \"b\"\nl = 0\nguess = [1431.0, 0.0]\n").unwrap();
        let sc = cfg.scenario(&Overrides::default()).unwrap();
        assert_eq!(sc.channels.len(), 1);
        assert_eq!(sc.keep, Some(vec![0]));
    }

    #[test]
    fn serializes_back() {
        let cfg = RunConfig::parse("[model]\npreset = \"model-d\"\nbeta = -1.5\nsigma = \"frozen\"\n").unwrap();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
        let sc = cfg.scenario(&Overrides::default()).unwrap();
        match sc.model {
            ModelSpec::D { yukawa, sigma, .. } => {
                assert_eq!(yukawa.beta, -1.5);
                assert_eq!(sigma, SigmaMode::Frozen);
            }
            _ => panic!("expected model D"),
        }
    }
}
