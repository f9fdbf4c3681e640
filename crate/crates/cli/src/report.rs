//! Report rows and CSV files. Complex numbers are split into `_re`/`_im`
//! columns and floats are written in their shortest round-trip form.

use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use polewave_core::presets::{DecaySummary, StateOutcome};
use polewave_core::spectrum::DensityProfile;
use polewave_core::structure::CompositenessReport;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub state: String,
    /// `result`, `mesh-2n`, `delta` or `scan`.
    pub kind: String,
    pub v1: Option<f64>,
    pub mesh_n: usize,
    pub theta_deg: f64,
    pub l: usize,
    pub e_pole: Complex64,
    pub binding_energy: f64,
    /// `−2 Im E_pole`
    pub width: f64,
    pub x: Vec<Complex64>,
    pub z: Complex64,
    pub x_tilde: Vec<f64>,
    pub z_tilde: f64,
    pub u: f64,
    pub x_dvde: Complex64,
    /// `ok` or the error that stopped this row.
    pub status: String,
}

const NAN_C: Complex64 = Complex64::new(f64::NAN, f64::NAN);

impl ReportRow {
    pub fn from_report(scenario: &str, state: &str, kind: &str, mesh_n: usize, l: usize, r: &CompositenessReport) -> Self {
        Self {
            scenario: scenario.to_string(),
            state: state.to_string(),
            kind: kind.to_string(),
            v1: None,
            mesh_n,
            theta_deg: r.theta.to_degrees(),
            l,
            e_pole: r.e_pole,
            binding_energy: r.binding_energy,
            width: r.width,
            x: r.x.clone(),
            z: r.z,
            x_tilde: r.x_tilde.clone(),
            z_tilde: r.z_tilde,
            u: r.u,
            x_dvde: r.x_dvde,
            status: "ok".into(),
        }
    }

    pub fn from_state(scenario: &str, kind: &str, mesh_n: usize, s: &StateOutcome) -> Self {
        Self::from_report(scenario, &s.spec.label, kind, mesh_n, s.spec.l, &s.analysis.report)
    }

    /// Row of a failed solve: identifiers only.
    pub fn failed(scenario: &str, state: &str, kind: &str, mesh_n: usize, theta_deg: f64, l: usize, channels: usize, error: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            state: state.to_string(),
            kind: kind.to_string(),
            v1: None,
            mesh_n,
            theta_deg,
            l,
            e_pole: NAN_C,
            binding_energy: f64::NAN,
            width: f64::NAN,
            x: vec![NAN_C; channels],
            z: NAN_C,
            x_tilde: vec![f64::NAN; channels],
            z_tilde: f64::NAN,
            u: f64::NAN,
            x_dvde: NAN_C,
            status: error.replace(['\n', '\r'], " "),
        }
    }

    pub fn ok(&self) -> bool {
        self.status == "ok"
    }

    /// `fine − self` for every observable, labelled `delta`.
    pub fn delta(&self, fine: &ReportRow) -> ReportRow {
        let dc = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(a, b)| b - a).collect();
        let dr = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(a, b)| b - a).collect();
        ReportRow {
            kind: "delta".into(),
            mesh_n: fine.mesh_n,
            e_pole: fine.e_pole - self.e_pole,
            binding_energy: fine.binding_energy - self.binding_energy,
            width: fine.width - self.width,
            x: dc(&self.x, &fine.x),
            z: fine.z - self.z,
            x_tilde: dr(&self.x_tilde, &fine.x_tilde),
            z_tilde: fine.z_tilde - self.z_tilde,
            u: fine.u - self.u,
            x_dvde: fine.x_dvde - self.x_dvde,
            status: if self.ok() && fine.ok() { "ok".into() } else { "incomplete".into() },
            ..self.clone()
        }
    }

    /// Largest change in the pole position (MeV) and in any compositeness entry.
    pub fn delta_size(&self) -> (f64, f64) {
        let dx = self
            .x
            .iter()
            .map(|z| z.norm())
            .chain(std::iter::once(self.x_dvde.norm()))
            .fold(0.0, f64::max);
        (self.e_pole.norm(), dx)
    }
}

pub fn report_header(channels: usize) -> Vec<String> {
    let mut h: Vec<String> = ["scenario", "state", "kind", "v1", "mesh_n", "theta_deg", "L", "E_re", "E_im", "B_E", "Gamma"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for j in 1..=channels {
        h.push(format!("X_ch{j}_re"));
        h.push(format!("X_ch{j}_im"));
    }
    h.extend(["Z_re", "Z_im"].map(String::from));
    for j in 1..=channels {
        h.push(format!("Xtilde_ch{j}"));
    }
    h.extend(["Ztilde", "U", "XdVdE_re", "XdVdE_im", "status"].map(String::from));
    h
}

fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn parse_num(s: &str) -> Result<f64> {
    if s.is_empty() {
        return Ok(f64::NAN);
    }
    s.parse().with_context(|| format!("bad number '{s}'"))
}

fn record(row: &ReportRow) -> Vec<String> {
    let mut r = vec![
        row.scenario.clone(),
        row.state.clone(),
        row.kind.clone(),
        row.v1.map(num).unwrap_or_default(),
        row.mesh_n.to_string(),
        num(row.theta_deg),
        row.l.to_string(),
        num(row.e_pole.re),
        num(row.e_pole.im),
        num(row.binding_energy),
        num(row.width),
    ];
    for x in &row.x {
        r.push(num(x.re));
        r.push(num(x.im));
    }
    r.push(num(row.z.re));
    r.push(num(row.z.im));
    r.extend(row.x_tilde.iter().map(|&v| num(v)));
    r.extend([num(row.z_tilde), num(row.u), num(row.x_dvde.re), num(row.x_dvde.im), row.status.clone()]);
    r
}

/// Writes the rows under a header sized for `channels` channels.
pub fn write_report(path: &Path, channels: usize, rows: &[ReportRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(report_header(channels))?;
    for row in rows {
        if row.x.len() != channels || row.x_tilde.len() != channels {
            bail!("row {} {} has {} channels, report has {channels}", row.scenario, row.state, row.x.len());
        }
        w.write_record(record(row))?;
    }
    w.flush().with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let header = r.headers()?.clone();
    let channels = header.iter().filter(|h| h.starts_with("Xtilde_ch")).count();
    if header.iter().collect::<Vec<_>>() != report_header(channels) {
        bail!("{}: unexpected report header", path.display());
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.with_context(|| format!("reading {}", path.display()))?;
        let f = |i: usize| parse_num(&rec[i]);
        let c = |i: usize| -> Result<Complex64> { Ok(Complex64::new(f(i)?, f(i + 1)?)) };
        let mut k = 11;
        let mut x = Vec::with_capacity(channels);
        for _ in 0..channels {
            x.push(c(k)?);
            k += 2;
        }
        let z = c(k)?;
        k += 2;
        let x_tilde = (0..channels).map(|j| f(k + j)).collect::<Result<Vec<_>>>()?;
        k += channels;
        rows.push(ReportRow {
            scenario: rec[0].to_string(),
            state: rec[1].to_string(),
            kind: rec[2].to_string(),
            v1: if rec[3].is_empty() { None } else { Some(parse_num(&rec[3])?) },
            mesh_n: rec[4].parse().context("mesh_n")?,
            theta_deg: f(5)?,
            l: rec[6].parse().context("L")?,
            e_pole: c(7)?,
            binding_energy: f(9)?,
            width: f(10)?,
            x,
            z,
            x_tilde,
            z_tilde: f(k)?,
            u: f(k + 1)?,
            x_dvde: c(k + 2)?,
            status: rec[k + 4].to_string(),
        });
    }
    Ok(rows)
}

/// `q_MeV, reP_ch1, imP_ch1, …` one row per mesh node.
pub fn write_profile(path: &Path, profile: &DensityProfile) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut header = vec!["q_MeV".to_string()];
    for j in 1..=profile.values.len() {
        header.push(format!("reP_ch{j}"));
        header.push(format!("imP_ch{j}"));
    }
    w.write_record(&header)?;
    for (i, q) in profile.q.iter().enumerate() {
        let mut r = vec![num(*q)];
        for p in &profile.values {
            r.push(num(p[i].re));
            r.push(num(p[i].im));
        }
        w.write_record(&r)?;
    }
    w.flush().with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Mass and decay-channel compositeness of the dressed particle, and the
/// sum rule with the two-body compositeness of each state.
pub fn write_decay(path: &Path, scenario: &str, rows: &[(usize, DecaySummary, Vec<(String, Complex64)>)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record([
        "scenario", "mesh_n", "state", "m_phys_re", "m_phys_im", "X_d_re", "X_d_im", "X_d_closed_re", "X_d_closed_im", "X_re",
        "X_im", "X_plus_X_d_re", "X_plus_X_d_im",
    ])?;
    for (n, d, states) in rows {
        for (label, x) in states {
            let s = x + d.x_d;
            w.write_record([
                scenario.to_string(),
                n.to_string(),
                label.clone(),
                num(d.m_phys.re),
                num(d.m_phys.im),
                num(d.x_d.re),
                num(d.x_d.im),
                num(d.x_d_closed_form.re),
                num(d.x_d_closed_form.im),
                num(x.re),
                num(x.im),
                num(s.re),
                num(s.im),
            ])?;
        }
    }
    w.flush().with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn write_optical(path: &Path, scenario: &str, l: usize, rows: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(["scenario", "L", "E_MeV", "optical_residual"])?;
    for (e, res) in rows {
        w.write_record([scenario.to_string(), l.to_string(), num(*e), num(*res)])?;
    }
    w.flush().with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Creates the output directory.
pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let probe = dir.join(".polewave-write-test");
    File::create(&probe).with_context(|| format!("output directory {} is not writable", dir.display()))?;
    std::fs::remove_file(&probe).ok();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(channels: usize) -> ReportRow {
        ReportRow {
            scenario: "s".into(),
            state: "0s".into(),
            kind: "result".into(),
            v1: Some(-0.25),
            mesh_n: 200,
            theta_deg: 20.0,
            l: 1,
            e_pole: Complex64::new(1412.152231, -7.171354),
            binding_energy: 22.4478,
            width: 14.342708,
            x: vec![Complex64::new(0.1 + 0.2, -1e-17); channels],
            z: Complex64::new(3e-12, 0.0),
            x_tilde: vec![1.0 / 3.0; channels],
            z_tilde: 0.0,
            u: 0.07,
            x_dvde: Complex64::new(1.0, -2.5e-300),
            status: "ok".into(),
        }
    }

    #[test]
    fn header_order() {
        let h = report_header(2);
        assert_eq!(h[7], "E_re");
        assert_eq!(&h[11..15], ["X_ch1_re", "X_ch1_im", "X_ch2_re", "X_ch2_im"]);
        assert_eq!(h.last().unwrap(), "status");
    }

    #[test]
    fn delta_of_identical_rows_is_zero() {
        let a = row(1);
        let d = a.delta(&a);
        assert_eq!(d.kind, "delta");
        assert_eq!(d.delta_size(), (0.0, 0.0));
    }

    #[test]
    fn failed_row_has_no_numbers() {
        let f = ReportRow::failed("s", "x", "scan", 200, 20.0, 0, 2, "Muller iteration did not converge\nafter 100");
        assert!(!f.ok());
        assert!(!f.status.contains('\n'));
        assert!(record(&f)[7].is_empty());
    }
}
