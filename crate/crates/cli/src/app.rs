use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use polewave_core::presets::{self, run_scenario, ModelSpec, Scenario, ScenarioRun};
use polewave_core::verify::{self, CriterionReport};

use crate::config::{ConfigError, Overrides, RunConfig};
use crate::report::{self, ReportRow};

/// Largest change under mesh doubling accepted by `--mesh-check`.
pub const MESH_CHECK_TOL: f64 = 1e-4;
/// Bound on the optical-theorem residual for `check-optical`.
pub const OPTICAL_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "polewave", version, about = "Poles, residues and compositeness from momentum-space scattering equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Complex-scaling angle in degrees.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,

    #[arg(long = "mesh-n", global = true)]
    pub mesh_n: Option<usize>,

    /// Tangent-map scale in MeV.
    #[arg(long = "mesh-scale", global = true)]
    pub mesh_scale: Option<f64>,

    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Rerun at twice the mesh size and append the differences.
    #[arg(long = "mesh-check", global = true)]
    pub mesh_check: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one of model-a, model-b, model-c, model-d.
    Preset { name: String },
    /// Bound states of the configured model (θ = 0 unless set).
    Bound,
    /// Resonances of the configured model (needs θ > 0).
    Resonance,
    /// Compositeness as a function of an energy-law parameter.
    Scan {
        /// Only `v1` is supported.
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        values: Vec<f64>,
        /// State label; the first configured state by default.
        #[arg(long)]
        state: Option<String>,
        /// Preset to scan when no config is given.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Optical-theorem residual on the real axis.
    CheckOptical {
        /// Comma-separated real energies in MeV; a default set above threshold otherwise.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        energies: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        l: usize,
        #[arg(long)]
        preset: Option<String>,
    },
    /// Run the acceptance criteria.
    Verify {
        /// Run only this criterion (1–8).
        #[arg(long)]
        criterion: Option<u8>,
    },
}

/// Outcome classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    NonConvergence(String),
    Acceptance(String),
    Other(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Config(_) => 2,
            Failure::NonConvergence(_) => 3,
            Failure::Acceptance(_) => 4,
            Failure::Other(_) => 1,
        })
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::NonConvergence(m) => write!(f, "solver failure: {m}"),
            Failure::Acceptance(m) => write!(f, "acceptance failure: {m}"),
            Failure::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<polewave_core::Error> for Failure {
    fn from(e: polewave_core::Error) -> Self {
        match e.root() {
            polewave_core::Error::InvalidInput(_) | polewave_core::Error::Unsupported(_) => Failure::Config(e.to_string()),
            _ => Failure::NonConvergence(e.to_string()),
        }
    }
}

pub type Outcome = Result<(), Failure>;

pub fn run(cli: Cli) -> Outcome {
    let ov = Overrides {
        theta_deg: cli.theta,
        mesh_n: cli.mesh_n,
        mesh_scale: cli.mesh_scale,
    };
    match &cli.command {
        Command::Preset { name } => {
            let mut cfg = load_or(&cli, Some(name))?;
            cfg.model.preset = Some(name.clone());
            let sc = cfg.scenario(&ov)?;
            solve(&sc, &cfg.output_dir(cli.out.as_deref()), cli.mesh_check)
        }
        Command::Bound => {
            let cfg = load_or(&cli, None)?;
            let mut ov = ov;
            if ov.theta_deg.is_none() && cfg.solver.theta_deg.is_none() {
                ov.theta_deg = Some(0.0);
            }
            let sc = cfg.scenario(&ov)?;
            solve(&sc, &cfg.output_dir(cli.out.as_deref()), cli.mesh_check)
        }
        Command::Resonance => {
            let cfg = load_or(&cli, None)?;
            let sc = cfg.scenario(&ov)?;
            if sc.theta <= 0.0 {
                return Err(Failure::Config("resonance search needs a scaling angle theta > 0".into()));
            }
            solve(&sc, &cfg.output_dir(cli.out.as_deref()), cli.mesh_check)
        }
        Command::Scan {
            param,
            values,
            state,
            preset,
        } => {
            let cfg = load_or(&cli, preset.as_deref())?;
            let sc = cfg.scenario(&ov)?;
            let spec = cfg.scan.clone();
            let param = param.clone().or(spec.as_ref().map(|s| s.param.clone())).unwrap_or_else(|| "v1".into());
            if param != "v1" {
                return Err(Failure::Config(format!("unsupported scan parameter '{param}' (only v1)")));
            }
            let values = if values.is_empty() {
                spec.as_ref().map(|s| s.values.clone()).unwrap_or_else(|| presets::default_v1_grid(&sc))
            } else {
                values.clone()
            };
            if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
                return Err(Failure::Config("scan values must be finite and nonempty".into()));
            }
            let label = state.clone().or(spec.and_then(|s| s.state));
            scan(&sc, label.as_deref(), &values, &cfg.output_dir(cli.out.as_deref()), cli.mesh_check)
        }
        Command::CheckOptical { energies, l, preset } => {
            let cfg = load_or(&cli, preset.as_deref())?;
            let sc = cfg.scenario(&ov)?;
            check_optical(&sc, *l, energies, &cfg.output_dir(cli.out.as_deref()))
        }
        Command::Verify { criterion } => run_verify(*criterion),
    }
}

/// The config file if given, else the named preset.
fn load_or(cli: &Cli, preset: Option<&str>) -> Result<RunConfig, Failure> {
    match (&cli.config, preset) {
        (Some(path), _) => Ok(RunConfig::load(path)?),
        (None, Some(name)) => Ok(RunConfig::for_preset(name)),
        (None, None) => Err(Failure::Config("this command needs --config <path>".into())),
    }
}

fn label_path(dir: &Path, parts: &[&str]) -> PathBuf {
    let name: Vec<String> = parts
        .iter()
        .map(|p| p.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect())
        .collect();
    dir.join(format!("{}.csv", name.join("_")))
}

fn solve(sc: &Scenario, out: &Path, mesh_check: bool) -> Outcome {
    report::ensure_dir(out)?;
    let run = run_scenario(sc)?;
    let channels = sc.channels.len();
    let mut rows: Vec<ReportRow> = run.states.iter().map(|s| ReportRow::from_state(&sc.name, "result", sc.mesh.n, s)).collect();
    for s in &run.states {
        report::write_profile(&label_path(out, &[&sc.name, &s.spec.label, "ls"]), &s.analysis.amplitude_profile)?;
        report::write_profile(&label_path(out, &[&sc.name, &s.spec.label, "schr"]), &s.analysis.schrodinger_profile)?;
    }
    print_rows(&rows);
    let mut decay_rows = Vec::new();
    if let Some(d) = run.decay {
        decay_rows.push((sc.mesh.n, d, decay_states(&run)));
        println!(
            "{}: m_phys = {:.4}  X_d = {:.4}  (closed form {:.4})",
            sc.name, d.m_phys, d.x_d, d.x_d_closed_form
        );
    }
    let mut worst = (0.0f64, 0.0f64);
    if mesh_check {
        let fine_sc = sc.with_mesh(sc.mesh.doubled());
        let fine = run_scenario(&fine_sc)?;
        let fine_rows: Vec<ReportRow> = fine
            .states
            .iter()
            .map(|s| ReportRow::from_state(&sc.name, "mesh-2n", fine_sc.mesh.n, s))
            .collect();
        let deltas: Vec<ReportRow> = rows.iter().zip(&fine_rows).map(|(a, b)| a.delta(b)).collect();
        for d in &deltas {
            let (de, dx) = d.delta_size();
            worst = (worst.0.max(de), worst.1.max(dx));
        }
        if let (Some(a), Some(b)) = (run.decay, fine.decay) {
            worst.0 = worst.0.max((b.m_phys - a.m_phys).norm());
            worst.1 = worst.1.max((b.x_d - a.x_d).norm());
            decay_rows.push((fine_sc.mesh.n, b, decay_states(&fine)));
        }
        rows.extend(fine_rows);
        rows.extend(deltas);
        println!("mesh check n={} -> {}: max |dE| = {:.3e} MeV, max |dX| = {:.3e}", sc.mesh.n, fine_sc.mesh.n, worst.0, worst.1);
    }
    report::write_report(&label_path(out, &[&sc.name, "report"]), channels, &rows)?;
    if !decay_rows.is_empty() {
        report::write_decay(&label_path(out, &[&sc.name, "decay"]), &sc.name, &decay_rows)?;
    }
    if worst.0 > MESH_CHECK_TOL || worst.1 > MESH_CHECK_TOL {
        return Err(Failure::NonConvergence(format!(
            "mesh doubling moved results by |dE| = {:.3e} MeV, |dX| = {:.3e} (tolerance {MESH_CHECK_TOL:e})",
            worst.0, worst.1
        )));
    }
    Ok(())
}

fn decay_states(run: &ScenarioRun) -> Vec<(String, Complex64)> {
    run.states
        .iter()
        .map(|s| (s.spec.label.clone(), s.analysis.report.x[0]))
        .collect()
}

fn print_rows(rows: &[ReportRow]) {
    for r in rows {
        let x: Vec<String> = r.x.iter().map(|z| format!("{z:.4}")).collect();
        println!(
            "{} {}: E = {:.4} MeV  B_E = {:.4}  Gamma = {:.4}  X = [{}]  X_dVdE = {:.4}",
            r.scenario,
            r.state,
            r.e_pole,
            r.binding_energy,
            r.width,
            x.join(", "),
            r.x_dvde
        );
    }
}

fn scan_rows(sc: &Scenario, index: usize, values: &[f64]) -> Result<Vec<ReportRow>, Failure> {
    let spec = &sc.states[index];
    let (_, points) = presets::scan_v1(sc, index, values)?;
    Ok(points
        .into_iter()
        .map(|p| {
            let mut row = match &p.outcome {
                Ok(a) => ReportRow::from_report(&sc.name, &spec.label, "scan", sc.mesh.n, spec.l, &a.report),
                Err(e) => ReportRow::failed(
                    &sc.name,
                    &spec.label,
                    "scan",
                    sc.mesh.n,
                    sc.theta.to_degrees(),
                    spec.l,
                    sc.channels.len(),
                    &e.to_string(),
                ),
            };
            row.v1 = Some(p.v1);
            row
        })
        .collect())
}

fn scan(sc: &Scenario, label: Option<&str>, values: &[f64], out: &Path, mesh_check: bool) -> Outcome {
    if matches!(sc.model, ModelSpec::D { .. }) {
        return Err(Failure::Config("model D has no energy law to scan".into()));
    }
    let index = match label {
        Some(l) => sc
            .states
            .iter()
            .position(|s| s.label == l)
            .ok_or_else(|| Failure::Config(format!("no state labelled '{l}'")))?,
        None => 0,
    };
    report::ensure_dir(out)?;
    let mut rows = scan_rows(sc, index, values)?;
    print_rows(&rows);
    let mut worst = (0.0f64, 0.0f64);
    if mesh_check {
        let fine = scan_rows(&sc.with_mesh(sc.mesh.doubled()), index, values)?;
        let deltas: Vec<ReportRow> = rows.iter().zip(&fine).map(|(a, b)| a.delta(b)).collect();
        for d in deltas.iter().filter(|d| d.ok()) {
            let (de, dx) = d.delta_size();
            worst = (worst.0.max(de), worst.1.max(dx));
        }
        rows.extend(fine.into_iter().map(|r| ReportRow { kind: "mesh-2n".into(), ..r }));
        rows.extend(deltas);
        println!("mesh check: max |dE| = {:.3e} MeV, max |dX| = {:.3e}", worst.0, worst.1);
    }
    let path = label_path(out, &[&sc.name, "scan", &sc.states[index].label]);
    report::write_report(&path, sc.channels.len(), &rows)?;
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.ok())
        .map(|r| format!("v1={}: {}", r.v1.unwrap_or(f64::NAN), r.status))
        .collect();
    if !failed.is_empty() {
        return Err(Failure::NonConvergence(format!("{} scan point(s) failed: {}", failed.len(), failed.join("; "))));
    }
    if worst.0 > MESH_CHECK_TOL || worst.1 > MESH_CHECK_TOL {
        return Err(Failure::NonConvergence(format!(
            "mesh doubling moved results by |dE| = {:.3e} MeV, |dX| = {:.3e}",
            worst.0, worst.1
        )));
    }
    Ok(())
}

fn check_optical(sc: &Scenario, l: usize, energies: &[f64], out: &Path) -> Outcome {
    if matches!(sc.model, ModelSpec::D { .. }) {
        return Err(Failure::Config("the optical check needs stable channels (models A-C)".into()));
    }
    let energies = if energies.is_empty() {
        let lo = sc.channels.iter().map(|c| c.threshold()).fold(f64::INFINITY, f64::min);
        let hi = sc.channels.iter().map(|c| c.threshold()).fold(f64::NEG_INFINITY, f64::max);
        let mut e: Vec<f64> = [1.0, 5.0, 20.0].iter().map(|d| lo + d).collect();
        if hi > lo {
            e.extend([1.0, 5.0, 20.0].iter().map(|d| hi + d));
        }
        e
    } else {
        energies.to_vec()
    };
    report::ensure_dir(out)?;
    let rows = presets::optical_check(sc, l, &energies)?;
    for (e, res) in &rows {
        println!("{} L={l} E = {e:.4} MeV: optical residual {res:.3e}", sc.name);
    }
    report::write_optical(&label_path(out, &[&sc.name, "optical"]), &sc.name, l, &rows)?;
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    if worst > OPTICAL_TOL {
        return Err(Failure::Acceptance(format!("optical residual {worst:.3e} above {OPTICAL_TOL:e}")));
    }
    Ok(())
}

fn run_verify(only: Option<u8>) -> Outcome {
    let ids: Vec<u8> = match only {
        Some(id) if verify::CRITERIA.contains(&id) => vec![id],
        Some(id) => return Err(Failure::Config(format!("no criterion {id}; expected 1-8"))),
        None => verify::CRITERIA.to_vec(),
    };
    let reports: Vec<CriterionReport> = std::thread::scope(|s| {
        let handles: Vec<_> = ids.iter().map(|&id| s.spawn(move || verify::criterion(id))).collect();
        handles.into_iter().map(|h| h.join().expect("criterion thread")).collect()
    });
    for r in &reports {
        println!("{r}");
    }
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| r.id.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Acceptance(format!("criteria {} failed", failed.join(", "))))
    }
}
