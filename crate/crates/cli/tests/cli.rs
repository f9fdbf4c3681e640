use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;
use polewave_cli::report::{read_report, write_profile, write_report, ReportRow};
use polewave_core::spectrum::DensityProfile;

fn polewave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polewave")).args(args).output().expect("run polewave")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn columns(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|s| s.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn sample_rows() -> Vec<ReportRow> {
    let base = ReportRow {
        scenario: "model-c".into(),
        state: "qbs".into(),
        kind: "result".into(),
        v1: None,
        mesh_n: 200,
        theta_deg: 20.0,
        l: 0,
        e_pole: Complex64::new(1412.1522311, -7.17135401),
        binding_energy: 22.447769,
        width: 14.34270802,
        x: vec![Complex64::new(0.98684, -0.07535), Complex64::new(0.01316, 0.07535)],
        z: Complex64::new(1.3e-11, -4.4e-17),
        x_tilde: vec![0.928, 0.072],
        z_tilde: 0.0,
        u: 0.0711,
        x_dvde: Complex64::new(1.0, 2.2e-16),
        status: "ok".into(),
    };
    let scan = ReportRow {
        kind: "scan".into(),
        v1: Some(-0.25),
        state: "label, with \"quotes\"".into(),
        ..base.clone()
    };
    vec![base, scan]
}

#[test]
fn report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let rows = sample_rows();
    write_report(&path, 2, &rows).unwrap();
    assert_eq!(read_report(&path).unwrap(), rows);
}

#[test]
fn failed_rows_round_trip_as_empty_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let f = ReportRow::failed("model-a", "0s", "scan", 200, 0.0, 0, 1, "pole search: Muller iteration did not converge");
    write_report(&path, 1, &[f.clone()]).unwrap();
    let back = read_report(&path).unwrap().remove(0);
    assert_eq!(back.status, f.status);
    assert!(back.e_pole.re.is_nan() && back.x[0].im.is_nan());
    assert!(write_report(&path, 2, &[f]).is_err());
}

#[test]
fn empty_profile_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    let p = DensityProfile {
        q: vec![],
        weights: vec![],
        values: vec![vec![], vec![]],
    };
    write_profile(&path, &p).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "q_MeV,reP_ch1,imP_ch1,reP_ch2,imP_ch2\n");
}

#[test]
fn model_a_profile_integrates_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = polewave(&["preset", "model-a", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = columns(&dir.path().join("model-a_0s_ls.csv"));
    assert_eq!(header, ["q_MeV", "reP_ch1", "imP_ch1"]);
    let trapezoid: f64 = rows.windows(2).map(|w| 0.5 * (w[1][0] - w[0][0]) * (w[1][1] + w[0][1])).sum();
    assert!((trapezoid - 1.0).abs() < 1e-3, "{trapezoid}");
    let report = read_report(&dir.path().join("model-a_report.csv")).unwrap();
    let labels: Vec<&str> = report.iter().map(|r| r.state.as_str()).collect();
    assert_eq!(labels, ["0s", "1s", "0p", "0d"]);
    for (r, be) in report.iter().zip([23.2, 2.1, 13.1, 2.6]) {
        assert!((r.binding_energy - be).abs() < 0.1, "{} {}", r.state, r.binding_energy);
        assert!((r.x[0] - 1.0).norm() < 1e-4);
    }
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = polewave(&["preset", "model-c", "--out", d.path().to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 3);
    for n in names {
        assert_eq!(std::fs::read(a.path().join(&n)).unwrap(), std::fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn mesh_check_appends_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let o = polewave(&["preset", "model-b", "--mesh-check", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_report(&dir.path().join("model-b_report.csv")).unwrap();
    let kinds: Vec<&str> = rows.iter().map(|r| r.kind.as_str()).collect();
    assert_eq!(kinds, ["result", "mesh-2n", "delta"]);
    assert_eq!(rows[1].mesh_n, 400);
    assert!(rows[2].e_pole.norm() < 1e-4);
}

#[test]
fn scan_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.toml");
    std::fs::write(
        &cfg,
        "[model]\npreset = \"model-b\"\n\n[scan]\nparam = \"v1\"\nvalues = [-0.2, 0.0]\n\n[output]\ndir = \"unused\"\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = polewave(&["scan", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_report(&out.join("model-b_scan_res.csv")).unwrap();
    assert_eq!(rows.iter().map(|r| r.v1.unwrap()).collect::<Vec<_>>(), [-0.2, 0.0]);
    for r in &rows {
        assert!((r.x[0] - r.x_dvde).norm() < 1e-4);
    }
    assert!(rows[0].x[0].re < rows[1].x[0].re);
}

#[test]
fn bound_and_resonance_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c0.toml");
    std::fs::write(
        &cfg,
        "[model]\npreset = \"model-c\"\nx = 0.0\nkeep = [0]\n\n[[states]]\nlabel = \"bound\"\nl = 0\nguess = [1431.0, 0.0]\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let args = ["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    let o = polewave(&[&["bound"], &args[..]].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = &read_report(&out.join("model-c_report.csv")).unwrap()[0];
    assert_eq!(r.theta_deg, 0.0);
    assert!((r.binding_energy - 3.5).abs() < 0.1);
    let o = polewave(&[&["resonance", "--theta", "0"], &args[..]].concat());
    assert_eq!(code(&o), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&polewave(&["preset", "model-x", "--out", out])), 2);
    assert_eq!(code(&polewave(&["bound", "--out", out])), 2);
    assert_eq!(code(&polewave(&["preset", "model-b", "--theta", "60", "--out", out])), 2);
    assert_eq!(code(&polewave(&["verify", "--criterion", "9"])), 2);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[model]\npreset = \"model-b\"\nradius = 2.0\n").unwrap();
    assert_eq!(code(&polewave(&["resonance", "--config", bad.to_str().unwrap(), "--out", out])), 2);
    std::fs::write(&bad, "[model\n").unwrap();
    assert_eq!(code(&polewave(&["resonance", "--config", bad.to_str().unwrap(), "--out", out])), 2);
    assert_eq!(code(&polewave(&["resonance", "--config", "/nonexistent/x.toml", "--out", out])), 2);

    let far = dir.path().join("far.toml");
    std::fs::write(&far, "[model]\npreset = \"model-b\"\n\n[[states]]\nlabel = \"nowhere\"\nguess = [1.0e9, 0.0]\n").unwrap();
    let o = polewave(&["resonance", "--config", far.to_str().unwrap(), "--out", out]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("model-b nowhere"));
}

#[test]
fn optical_check_passes_for_model_c() {
    let dir = tempfile::tempdir().unwrap();
    let o = polewave(&["check-optical", "--preset", "model-c", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(dir.path().join("model-c_optical.csv")).unwrap();
    assert_eq!(r.records().count(), 6);
}

#[test]
fn verify_single_criteria() {
    let o = polewave(&["verify", "--criterion", "5"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("criterion 5 PASS"));
    let o = polewave(&["verify", "--criterion", "7"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("criterion 7 FAIL"));
}
