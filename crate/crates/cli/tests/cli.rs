use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qcomb_cli::{Preset, RunConfig};

fn qcomb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcomb")).args(args).output().expect("binary runs")
}

/// Coarse grid and a short Monte-Carlo run keep these tests quick.
fn small_config(dir: &Path, preset: Preset, edit: impl FnOnce(&mut serde_json::Value)) -> PathBuf {
    let mut cfg = RunConfig::preset(preset);
    cfg.grid.points = 256;
    cfg.spectrometer.pairs = 20_000;
    cfg.delays.values = vec![0.0, 160.0];
    let mut v = serde_json::to_value(&cfg).unwrap();
    edit(&mut v);
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

fn run_ok(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> String {
    let mut args = vec![cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = qcomb(&args);
    assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn every_file_carries_hash_and_version() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), Preset::Figure, |_| {});
    let out = tmp.path().join("out");
    for cmd in ["jsa", "dip", "comb", "events"] {
        run_ok(cmd, &cfg, &out, &[]);
    }
    let hash = RunConfig::from_file(&cfg).unwrap().hash();
    let mut n = 0;
    for e in std::fs::read_dir(&out).unwrap() {
        let p = e.unwrap().path();
        let text = std::fs::read_to_string(&p).unwrap();
        if p.extension().unwrap() == "json" {
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert_eq!(v["config_hash"], hash.as_str(), "{}", p.display());
            assert!(v["tool_version"].as_str().unwrap().starts_with("qcomb "));
        } else {
            assert!(text.starts_with(&format!("# config_hash: {hash}\n# tool_version: qcomb ")), "{}", p.display());
        }
        n += 1;
    }
    // jsa 3, dip 2, comb 4 per delay, events 4 per delay
    assert_eq!(n, 3 + 2 + 2 * 4 + 2 * 4);
}

#[test]
fn jsa_reports_calibrated_width() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), Preset::Figure, |v| {
        v["calibration"] = serde_json::json!({ "target_fwhm_nm": 22.0, "knob": "long_pass_cut_on" });
    });
    let out = tmp.path().join("out");
    run_ok("jsa", &cfg, &out, &[]);
    let r = read_json(&out.join("fwhm.json"));
    let w = r["signal"]["fwhm_nm"].as_f64().unwrap();
    assert!((w - 22.0).abs() < 1e-6, "{w}");
    assert!(r["calibrated_knob"].as_f64().is_some());
}

#[test]
fn ideal_dip_has_unit_visibility() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), Preset::Ideal, |_| {});
    let out = tmp.path().join("out");
    run_ok("dip", &cfg, &out, &[]);
    let v = read_json(&out.join("dip_metrics.json"))["visibility"].as_f64().unwrap();
    assert!((v - 1.0).abs() < 1e-3, "{v}");
}

#[test]
fn accidental_floor_degrades_visibility() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), Preset::Ideal, |v| v["dip"]["accidental_floor"] = serde_json::json!(0.05));
    let out = tmp.path().join("out");
    run_ok("dip", &cfg, &out, &[]);
    let v = read_json(&out.join("dip_metrics.json"))["visibility"].as_f64().unwrap();
    assert!(v < 0.95, "{v}");
}

#[test]
fn validation_errors_exit_2_with_field_path() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), Preset::Figure, |v| {
        v["crystal"].as_object_mut().unwrap().remove("length_mm");
    });
    let o = qcomb(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("crystal") && err.contains("length_mm"), "{err}");

    let cfg = small_config(tmp.path(), Preset::Figure, |v| v["grid"]["points"] = serde_json::json!("many"));
    let o = qcomb(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid.points"));
}

#[test]
fn narrow_scan_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), Preset::Figure, |v| {
        v["dip"]["start_ps"] = serde_json::json!(-0.05);
        v["dip"]["stop_ps"] = serde_json::json!(0.05);
    });
    let o = qcomb(&["dip", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn missing_output_directory_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), Preset::Figure, |_| {});
    let o = qcomb(&["jsa", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn delays_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), Preset::Figure, |_| {});
    let out = tmp.path().join("out");
    let stdout = run_ok("comb", &cfg, &out, &["--delays", "0.53ps,320um"]);
    assert!(stdout.contains("0.53ps") && stdout.contains("320um"), "{stdout}");
    let p = read_json(&out.join("peaks_0.53ps.json"));
    assert_eq!(p["count"], 4);
    assert!(read_json(&out.join("peaks_320um.json"))["tau_ps"].as_f64().unwrap() > 1.06);
    let o = qcomb(&["comb", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--delays", "soon"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_delay_flags_no_comb() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), Preset::Figure, |_| {});
    let out = tmp.path().join("out");
    run_ok("comb", &cfg, &out, &[]);
    let p = read_json(&out.join("peaks_0um.json"));
    assert_eq!(p["no_comb"], true);
    assert_eq!(read_json(&out.join("qudit_0um.json"))["dimension"], 0);
    run_ok("events", &cfg, &out, &[]);
    assert_eq!(read_json(&out.join("events_report_0um.json"))["coincidences"], 0);
}

#[test]
fn seed_changes_batch_but_not_references() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), Preset::Figure, |_| {});
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_ok("events", &cfg, &a, &["--seed", "5"]);
    run_ok("events", &cfg, &b, &["--seed", "6"]);
    let ea = std::fs::read_to_string(a.join("events_160um.txt")).unwrap();
    let eb = std::fs::read_to_string(b.join("events_160um.txt")).unwrap();
    assert_ne!(ea, eb);
    let ra = read_json(&a.join("events_report_160um.json"));
    let rb = read_json(&b.join("events_report_160um.json"));
    assert_eq!(ra["analytic_teeth"], rb["analytic_teeth"]);
    assert_eq!(ra["toa_tooth_period_ps"], rb["toa_tooth_period_ps"]);
}

#[test]
fn events_without_seed_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), Preset::Figure, |v| {
        v.as_object_mut().unwrap().remove("seed");
    });
    let o = qcomb(&["events", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
}

#[test]
fn gnuplot_scripts_follow_csv_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), Preset::Figure, |_| {});
    let out = tmp.path().join("out");
    run_ok("dip", &cfg, &out, &[]);
    let o = qcomb(&["gnuplot", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let gp = std::fs::read_to_string(out.join("dip_scan.gp")).unwrap();
    assert!(gp.contains("plot 'dip_scan.csv'"));
}

#[test]
fn shipped_configs_validate() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["figure", "unfiltered", "ideal"] {
        let p = root.join(format!("{name}.json"));
        let o = qcomb(&["validate", "--config", p.to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
