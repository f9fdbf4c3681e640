//! Acceptance checks against the reference numbers of models A–D plus a
//! set of numerical properties. Each criterion yields one pass/fail line.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::kinematics::{Channel, KinematicsMode};
use crate::numerics::linalg::CMat;
use crate::potential::{EnergyLaw, ModelB};
use crate::presets::{self, run_scenario, MeshSpec, Scenario, ScenarioRun};
use crate::scattering::{solve_half_offshell, ScatteringSystem};
use crate::structure::missing_and_tilde;

pub const CRITERIA: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

/// Model A `v1` values covering the range plotted for the compositeness scan.
pub const MODEL_A_V1: [f64; 7] = [-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5];
pub const MODEL_C_V1: [f64; 7] = [-0.3, -0.25, -0.2, -0.15, -0.1, -0.05, 0.0];
/// `β` values followed towards the frozen-Σ sum-rule point.
pub const FROZEN_BETAS: [f64; 6] = [-2.0, -1.8, -1.6, -1.5, -1.4, -1.3];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub detail: String,
    pub pass: bool,
    /// Known not to reproduce the reference value; see the README.
    pub known_deviation: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    /// Pipeline failure that prevented the checks from running.
    pub error: Option<String>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "criterion {} {status}: {} ({} checks", self.id, self.title, self.checks.len())?;
        if let Some(e) = &self.error {
            write!(f, "; error: {e}")?;
        }
        let failed: Vec<String> = self.failures().map(|c| format!("{} [{}]", c.name, c.detail)).collect();
        if !failed.is_empty() {
            write!(f, "; failed: {}", failed.join("; "))?;
        }
        write!(f, ")")
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: impl Into<String>, detail: String, pass: bool) {
        self.0.push(Check {
            name: name.into(),
            detail,
            pass,
            known_deviation: false,
        });
    }

    fn near(&mut self, name: impl Into<String>, got: f64, want: f64, tol: f64) {
        let pass = (got - want).abs() <= tol;
        self.push(name, format!("{got:.6} vs {want} ± {tol}"), pass);
    }

    /// Real and imaginary parts checked separately.
    fn near_c(&mut self, name: &str, got: Complex64, want: Complex64, tol: f64) {
        self.near(format!("{name} re"), got.re, want.re, tol);
        self.near(format!("{name} im"), got.im, want.im, tol);
    }

    fn below(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.push(name, format!("{value:.3e} <= {bound:.0e}"), value <= bound);
    }

    fn mark_known(&mut self, names: &[&str]) {
        for c in &mut self.0 {
            if names.contains(&c.name.as_str()) {
                c.known_deviation = true;
            }
        }
    }
}

/// Model D checks that do not reproduce the reference values.
pub const MODEL_D_KNOWN_DEVIATIONS: [&str; 3] = ["m_phys re", "AB pole re", "AB pole im"];

type Cached = Result<Arc<ScenarioRun>, String>;

fn cached(slot: &'static OnceLock<Cached>, make: fn() -> crate::Result<Scenario>) -> Result<Arc<ScenarioRun>, String> {
    slot.get_or_init(|| {
        make()
            .and_then(|sc| run_scenario(&sc))
            .map(Arc::new)
            .map_err(|e| e.to_string())
    })
    .clone()
}

macro_rules! preset_run {
    ($fn_name:ident, $make:expr) => {
        fn $fn_name() -> Result<Arc<ScenarioRun>, String> {
            static SLOT: OnceLock<Cached> = OnceLock::new();
            cached(&SLOT, $make)
        }
    };
}

preset_run!(run_a, || Scenario::preset("model-a"));
preset_run!(run_b, || Scenario::preset("model-b"));
preset_run!(run_c, || Scenario::preset("model-c"));
preset_run!(run_d, || Scenario::preset("model-d"));
preset_run!(run_c0, Scenario::model_c_uncoupled);

fn report(id: u8, title: &'static str, body: impl FnOnce(&mut Checks) -> Result<(), String>) -> CriterionReport {
    let mut checks = Checks::default();
    let error = body(&mut checks).err();
    CriterionReport {
        id,
        title,
        checks: checks.0,
        error,
    }
}

fn state<'a>(run: &'a ScenarioRun, label: &str) -> Result<&'a presets::StateOutcome, String> {
    run.states
        .iter()
        .find(|s| s.spec.label == label)
        .ok_or_else(|| format!("{}: no state {label}", run.name))
}

fn sum(x: &[Complex64]) -> Complex64 {
    x.iter().sum()
}

pub fn criterion(id: u8) -> CriterionReport {
    match id {
        1 => report(1, "model A bound-state spectrum", |c| {
            let run = run_a()?;
            for (label, be) in [("0s", 23.2), ("0p", 13.1), ("0d", 2.6), ("1s", 2.1)] {
                c.near(format!("B_E({label})"), state(&run, label)?.analysis.report.binding_energy, be, 0.1);
            }
            Ok(())
        }),
        2 => report(2, "model A automatic normalization", |c| {
            let run = run_a()?;
            for s in &run.states {
                let r = &s.analysis.report;
                c.below(format!("|X-1| {}", s.spec.label), (r.x[0] - 1.0).norm(), 1e-4);
                c.below(format!("profile deviation {}", s.spec.label), s.analysis.profile_deviation, 1e-4);
            }
            Ok(())
        }),
        3 => report(3, "model A sum rule under energy dependence", |c| {
            let sc = Scenario::preset("model-a").map_err(|e| e.to_string())?;
            for (i, spec) in sc.states.iter().enumerate() {
                scan_checks(c, &sc, i, &spec.label, &MODEL_A_V1)?;
            }
            Ok(())
        }),
        4 => report(4, "model B resonance", |c| {
            let base = Scenario::preset("model-b").map_err(|e| e.to_string())?;
            let mut poles = Vec::new();
            for deg in [10.0f64, 20.0, 30.0] {
                let run = if deg == 20.0 {
                    run_b()?
                } else {
                    Arc::new(run_scenario(&base.with_theta(deg.to_radians())).map_err(|e| e.to_string())?)
                };
                let r = &run.states[0].analysis.report;
                c.below(format!("|X-1| theta={deg}"), (r.x[0] - 1.0).norm(), 1e-3);
                if deg == 20.0 {
                    c.near_c("E_pole", r.e_pole, Complex64::new(1884.0, -0.1), 0.2);
                }
                poles.push(r.e_pole);
            }
            let spread = poles.iter().flat_map(|a| poles.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max);
            c.below("pole spread over theta", spread, 1e-2);
            Ok(())
        }),
        5 => report(5, "model C coupled channels", |c| {
            let r0 = run_c0()?;
            c.near("B_E(x=0)", r0.states[0].analysis.report.binding_energy, 3.5, 0.1);
            let run = run_c()?;
            let r = &run.states[0].analysis.report;
            c.near_c("E_pole", r.e_pole, Complex64::new(1412.0, -7.3), 0.3);
            c.near("B_E", r.binding_energy, 22.6, 0.3);
            c.near("width", r.width, 14.7, 0.5);
            c.near_c("X1", r.x[0], Complex64::new(0.99, -0.08), 0.02);
            c.near_c("X2", r.x[1], Complex64::new(0.01, 0.08), 0.02);
            c.near_c("X1+X2", sum(&r.x), Complex64::new(1.0, 0.0), 0.02);
            c.near("U", r.u, 0.07, 0.02);
            c.near("X~1", r.x_tilde[0], 0.93, 0.02);
            c.near("X~2", r.x_tilde[1], 0.07, 0.02);
            Ok(())
        }),
        6 => report(6, "model C energy dependence", |c| {
            let sc = Scenario::preset("model-c").map_err(|e| e.to_string())?;
            scan_checks(c, &sc, 0, "qbs", &MODEL_C_V1)
        }),
        7 => report(7, "model D unstable constituent", |c| {
            let run = run_d()?;
            let d = run.decay.ok_or("model D run without decay summary")?;
            let r = &run.states[0].analysis.report;
            c.near_c("m_phys", d.m_phys, Complex64::new(422.7, -52.0), 0.5);
            c.near_c("X_d", d.x_d, Complex64::new(0.10, 0.29), 0.02);
            c.below("X_d residue vs closed form", (d.x_d - d.x_d_closed_form).norm(), 1e-6);
            c.near_c("AB pole", r.e_pole, Complex64::new(1363.8, -32.2), 0.5);
            c.near_c("X", r.x[0], Complex64::new(0.90, -0.21), 0.02);
            c.near_c("X+X_d", r.x[0] + d.x_d, Complex64::new(1.0, 0.08), 0.03);
            frozen_checks(c)?;
            c.mark_known(&MODEL_D_KNOWN_DEVIATIONS);
            Ok(())
        }),
        8 => report(8, "numerical property suite", property_checks),
        _ => report(id, "unknown criterion", |_| Err(format!("no criterion {id}"))),
    }
}

fn scan_checks(c: &mut Checks, sc: &Scenario, index: usize, label: &str, grid: &[f64]) -> Result<(), String> {
    let (_, points) = presets::scan_v1(sc, index, grid).map_err(|e| e.to_string())?;
    let mut prev: Option<f64> = None;
    let mut monotone = true;
    for p in &points {
        let a = p.outcome.as_ref().map_err(|e| e.to_string())?;
        let s = sum(&a.report.x);
        let diff = s - a.report.x_dvde;
        c.below(format!("{label} v1={} |ΣX - X_dVdE|", p.v1), diff.re.abs().max(diff.im.abs()), 1e-4);
        if let Some(q) = prev {
            monotone &= s.re > q;
        }
        prev = Some(s.re);
    }
    c.push(format!("{label} Re ΣX increasing in v1"), format!("{} points", points.len()), monotone);
    Ok(())
}

/// With `Σ(E; q) → Σ(E; 0)` and `β` moved until the pole sits next to
/// `m_phys + M`, the sum rule `X + X_d = 1` is restored.
fn frozen_checks(c: &mut Checks) -> Result<(), String> {
    let sc = Scenario::preset("model-d").map_err(|e| e.to_string())?;
    let (decay, points) = presets::frozen_sigma_scan(&sc, &FROZEN_BETAS).map_err(|e| e.to_string())?;
    let threshold = decay.m_phys + sc.channels[0].M();
    let best = points
        .iter()
        .filter_map(|p| p.outcome.as_ref().ok().map(|s| (p.beta, *s)))
        .min_by(|a, b| (a.1.e_pole - threshold).norm().total_cmp(&(b.1.e_pole - threshold).norm()))
        .ok_or("frozen self-energy scan found no pole")?;
    c.below(format!("frozen Σ beta={} |E_pole - m_phys - M|", best.0), (best.1.e_pole - threshold).norm(), 1.0);
    c.below(format!("frozen Σ beta={} |X+X_d-1|", best.0), (best.1.sum - 1.0).norm(), 0.02);
    Ok(())
}

fn property_checks(c: &mut Checks) -> Result<(), String> {
    let err = |e: crate::Error| e.to_string();
    let a = Scenario::preset("model-a").map_err(err)?;
    let th_a = a.channels[0].threshold();
    for (e, res) in presets::optical_check(&a, 0, &[th_a + 1.0, th_a + 10.0, th_a + 40.0]).map_err(err)? {
        c.below(format!("optical model A E={e:.1}"), res, 1e-8);
    }
    let cc = Scenario::preset("model-c").map_err(err)?;
    for (e, res) in presets::optical_check(&cc, 0, &[1350.0, 1400.0, 1450.0, 1500.0]).map_err(err)? {
        c.below(format!("optical model C E={e:.1}"), res, 1e-8);
    }

    let ds = a.discretize(0).map_err(err)?;
    let t = solve_half_offshell(&ds, Complex64::from(th_a - 10.0)).map_err(err)?;
    c.below("T symmetry model A", t.asymmetry(), 1e-10);
    let ds = cc.discretize(0).map_err(err)?;
    let t = solve_half_offshell(&ds, Complex64::new(1420.0, -5.0)).map_err(err)?;
    c.below("T symmetry model C", t.asymmetry(), 1e-10);

    let runs = [run_a()?, run_b()?, run_c()?, run_d()?];
    for run in &runs {
        for s in &run.states {
            let tag = format!("{} {}", run.name, s.spec.label);
            c.below(format!("rank-1 residue {tag}"), s.analysis.residues.factorization_residual, 1e-6);
            c.below(format!("|det root - pole| {tag}"), (s.determinant_root - s.analysis.report.e_pole).norm(), 1e-6);
        }
    }

    c.below("second Born remainder / VGV", second_born_remainder().map_err(err)?, 5e-3);

    for run in &runs {
        let sc = Scenario::preset(&run.name).map_err(err)?;
        mesh_doubling(c, &sc, run)?;
    }

    let mut rng = StdRng::seed_from_u64(20_161_017);
    let mut worst: f64 = 0.0;
    for _ in 0..2000 {
        let n = rng.random_range(1..6);
        let x: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
            .collect();
        let t = missing_and_tilde(&x);
        worst = worst.max((t.x_tilde.iter().sum::<f64>() + t.z_tilde - 1.0).abs());
    }
    c.below("ΣX~ + Z~ - 1 on random inputs", worst, 1e-14);
    Ok(())
}

/// `‖T − V − VGV‖ / ‖VGV‖` for a weak model B interaction.
fn second_born_remainder() -> crate::Result<f64> {
    let ch = Channel::new(938.9, 938.9, KinematicsMode::NonRelativistic, "NN")?;
    let model = ModelB {
        law: EnergyLaw::constant(-50.0e-3),
        ..Default::default()
    }
    .build()?;
    let sys = ScatteringSystem::with_channels(Arc::new(model), vec![ch], 0)?;
    let ds = sys.discretize(&MeshSpec { n: 60, ..MeshSpec::default() }.build(0.3)?)?;
    let e = Complex64::new(1880.8, -0.5);
    let t = solve_half_offshell(&ds, e)?.t;
    let v = ds.potential(e);
    let g = ds.propagator(e)?;
    let vg = CMat::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * g[j]);
    let vgv = &vg * &v;
    Ok((&t - &v - &vgv).norm() / vgv.norm())
}

/// Observables move by less than `1e-4` (MeV or absolute) when `n` doubles.
fn mesh_doubling(c: &mut Checks, sc: &Scenario, run: &ScenarioRun) -> Result<(), String> {
    let fine = run_scenario(&sc.with_mesh(sc.mesh.doubled())).map_err(|e| e.to_string())?;
    for (s, f) in run.states.iter().zip(&fine.states) {
        let (r, q) = (&s.analysis.report, &f.analysis.report);
        let tag = format!("{} {}", run.name, s.spec.label);
        c.below(format!("mesh doubling E_pole {tag}"), (r.e_pole - q.e_pole).norm(), 1e-4);
        let dx = r.x.iter().zip(&q.x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        c.below(format!("mesh doubling X {tag}"), dx, 1e-4);
        c.below(format!("mesh doubling X_dVdE {tag}"), (r.x_dvde - q.x_dvde).norm(), 1e-4);
    }
    if let (Some(d), Some(e)) = (run.decay, fine.decay) {
        c.below(format!("mesh doubling m_phys {}", run.name), (d.m_phys - e.m_phys).norm(), 1e-4);
        c.below(format!("mesh doubling X_d {}", run.name), (d.x_d - e.x_d).norm(), 1e-4);
    }
    Ok(())
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|&id| criterion(id)).collect()
}

