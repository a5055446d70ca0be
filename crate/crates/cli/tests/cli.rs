use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_borel-qmt"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("borel-qmt-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

#[test]
fn sextic_table_matches_reference_byte_for_byte() {
    let o = run(&["coeffs", "--model", "sextic", "--order", "10"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), fs::read_to_string(fixture("sextic.csv")).unwrap());
}

#[test]
fn radial_tables_written_to_directory() {
    let dir = scratch("tables");
    let o = run(&["coeffs", "--tables", dir.to_str().unwrap()]);
    assert!(o.status.success());
    for d in 3..=6 {
        let name = format!("ddim{d}.csv");
        assert_eq!(
            fs::read_to_string(dir.join(&name)).unwrap(),
            fs::read_to_string(fixture(&name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn quartic_energy_coefficients() {
    let o = run(&["coeffs", "--model", "quartic", "--what", "energy", "--order", "5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "n,a\n0,1/2\n1,3/4\n2,21/8\n3,333/16\n4,30885/128\n5,916731/256\n");
}

#[test]
fn coefficient_output_is_deterministic() {
    let args = ["coeffs", "--model", "ddim5", "--order", "12", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], "borel-qmt/1");
}

#[test]
fn unknown_figure_is_a_usage_error() {
    let o = run(&["figure", "fig9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown figure"));
}

#[test]
fn empty_grid_is_a_usage_error() {
    let dir = scratch("grid");
    let cfg = dir.join("run.toml");
    fs::write(&cfg, "[grid]\nk = []\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "sweep"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_drives_a_sweep_and_flags_override_it() {
    let dir = scratch("config");
    let cfg = dir.join("run.toml");
    fs::write(&cfg, "[model]\nname = \"quartic\"\n[grid]\nk = \"1:2:1\"\nlambda = 0.5\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "--jobs", "2", "sweep"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("1.000000000000000e0,5.000000000000000e-1"));
    let o = run(&["--config", cfg.to_str().unwrap(), "sweep", "--k", "3"]);
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 2);
    assert!(text.contains("\n3.000000000000000e0,"));
}

#[test]
fn verify_passes_on_a_fresh_checkout() {
    let o = run(&["verify"]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    assert!(!text.contains("FAIL"));
    assert!(text.contains("PASS sextic"));
}

#[test]
fn verify_only_filters_checks() {
    let o = run(&["verify", "--only", "sextic"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "PASS sextic\n");
}

#[test]
fn corrupted_fixture_is_reported_by_name() {
    let dir = scratch("corrupt");
    for name in ["sextic.csv", "ddim3.csv", "ddim4.csv", "ddim5.csv", "ddim6.csv"] {
        fs::copy(fixture(name), dir.join(name)).unwrap();
    }
    let text = fs::read_to_string(dir.join("ddim4.csv")).unwrap();
    fs::write(dir.join("ddim4.csv"), text.replacen("\n3,", "\n3,1", 1)).unwrap();
    let o = run(&["verify", "--only", "ddim", "--fixtures", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL ddim4"), "{out}");
    assert!(out.contains("ddim4 n=3 a"), "{out}");
    assert!(out.contains("PASS ddim3"));
}

#[test]
fn diag_reports_energy_and_metric_as_json() {
    let o = run(&["diag", "--model", "quartic", "--k", "1", "--lambda", "1", "--basis", "120", "--qmt"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "borel-qmt/1");
    assert!((v["energy"].as_f64().unwrap() - 0.8037706512342738).abs() < 1e-12);
    let g = &v["qmt"];
    assert_eq!(g[0][1], g[1][0]);
}

#[test]
fn series_round_trip_through_fit_pade_and_resum() {
    let dir = scratch("pipeline");
    let series = dir.join("q.json");
    let o = run(&["coeffs", "--model", "quartic", "--what", "energy", "--order", "80", "--format", "json", "-o", series.to_str().unwrap()]);
    assert!(o.status.success());
    let s = series.to_str().unwrap();

    let fit: serde_json::Value = serde_json::from_slice(&run(&["fit", "--in", s, "--alpha", "auto"]).stdout).unwrap();
    assert_eq!(fit["fit"]["alpha"], 1);
    assert!((fit["fit"]["a_inverse"].as_f64().unwrap() - 3.0).abs() < 0.03);

    let poles = stdout(&run(&["pade", "--in", s, "--borel", "--order", "60"]));
    assert!(poles.starts_with("re,im,class\n"));
    let nearest = poles
        .lines()
        .skip(1)
        .filter(|l| l.ends_with("physical-negative-real"))
        .map(|l| l.split(',').next().unwrap().parse::<f64>().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((nearest + 1.0 / 3.0).abs() < 0.02, "{nearest}");

    let r: serde_json::Value = serde_json::from_slice(&run(&["resum", "--in", s, "--at", "1", "--prescription", "pv"]).stdout).unwrap();
    assert!((r["value"].as_f64().unwrap() - 0.8037706512342738).abs() < 1e-8);
}

#[test]
fn resum_sweep_emits_values_and_exact_column() {
    let o = run(&["resum", "sweep", "--model", "quartic", "--order", "40", "--param", "k", "--range", "0.5:1:0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!(((r[2] - r[5]) / r[5]).abs() < 1e-5, "{r:?}");
    }
}

#[test]
fn figure_output_is_deterministic_and_self_describing() {
    let dir = scratch("figure");
    let args = |d: &Path| {
        vec![
            "figure".to_string(),
            "fig4".into(),
            "--orders".into(),
            "30".into(),
            "--dir".into(),
            d.to_str().unwrap().to_string(),
        ]
    };
    let a = dir.join("a");
    let b = dir.join("b");
    assert!(bin().args(args(&a)).status().unwrap().success());
    assert!(bin().args(args(&b)).status().unwrap().success());
    let ta = fs::read_to_string(a.join("fig4.csv")).unwrap();
    assert_eq!(ta, fs::read_to_string(b.join("fig4.csv")).unwrap());
    assert!(ta.starts_with("# schema: borel-qmt/1\n# id: fig4\n# description: "));
}
