use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_dspin");

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn dspin(run: &str, config: &Path, out: &Path) -> Output {
    Command::new(BIN).args([run, "--config"]).arg(config).arg("--out").arg(out).output().expect("spawn dspin")
}

fn run_scenario(name: &str, out: &Path) -> Output {
    let path = scenarios().join(name);
    let cfg: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    dspin(cfg["run"].as_str().unwrap(), &path, out)
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn csv_column(p: &Path, name: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn c1_texture_golden() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_scenario("c1_texture.json", dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("texture.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "s,phi,x,y,z,tx,ty,tz,Nx,Ny,Nz,Bx,By,Bz,mx,my,mz,mDs,mDN,mDq"
    );
    assert_eq!(lines.count(), 513);
    let m = read_json(&dir.path().join("manifest.json"));
    let p = &m["summary"]["precession"];
    assert!(p["r1"].as_f64().unwrap() < 1e-6);
    assert!(p["r2"].as_f64().is_some());
    // Darboux components stay constant along C1.
    for col in ["mDs", "mDN", "mDq"] {
        let v = csv_column(&dir.path().join("texture.csv"), col);
        assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-8), "{col}");
    }
}

#[test]
fn viviani_sphere_describe_golden() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_scenario("viviani_sphere_describe.json", dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = dir.path().join("describe.csv");
    assert!(csv_column(&csv, "kappa_n").iter().all(|k| (k + 0.5).abs() < 1e-12));
    assert!(csv_column(&csv, "tau_g").iter().all(|t| *t == 0.0));
    assert!(csv_column(&csv, "v_g").iter().all(|v| *v == 0.0));
    assert_eq!(csv_column(&csv, "s").len(), 257);
}

#[test]
fn cap_flux_golden() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_scenario("cap_flux.json", dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let f = read_json(&dir.path().join("flux.json"));
    assert!((f["flux_over_Phi0"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!(f["gb_residual"].as_f64().unwrap().abs() < 1e-6);
    assert_eq!(f["region"]["closure"], "via_u_min");
}

#[test]
fn wilson_golden() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_scenario("viviani_cylinder_wilson.json", dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = dir.path().join("wilson.csv");
    let re = csv_column(&csv, "Re_tr");
    assert_eq!(re.len(), 3);
    assert!((re[2] + std::f64::consts::SQRT_2).abs() < 1e-6);
    let m = read_json(&dir.path().join("manifest.json"));
    for o in m["summary"]["observed_order"].as_array().unwrap() {
        assert!((o["order"].as_f64().unwrap() - 2.0).abs() < 0.2);
    }
}

#[test]
fn conductance_golden() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_scenario("viviani_conductance.json", dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = dir.path().join("conductance.csv");
    for col in ["G_cylinder", "G_sphere"] {
        let g = csv_column(&csv, col);
        assert_eq!(g.len(), 64);
        assert!(g.iter().all(|x| (0.0..=2.0).contains(x)));
    }
}

#[test]
fn convention_report_golden() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_scenario("convention_report.json", dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_json(&dir.path().join("convention_report.json"));
    let flags: Vec<(String, String)> = r["flags"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| (f["curve"].as_str().unwrap().into(), f["quantity"].as_str().unwrap().into()))
        .collect();
    assert_eq!(flags.len(), 2, "{flags:?}");
    assert_eq!(r["tau_g_branch"]["selected"], "minus");
    assert!(std::fs::read_to_string(dir.path().join("convention_report.txt")).unwrap().contains("2 flag(s)"));
}

#[test]
fn manifest_records_hash_conventions_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_scenario("c1_describe.json", dir.path());
    assert!(o.status.success());
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["run"], "describe");
    assert_eq!(m["engine"]["name"], "dspin");
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["conventions"]["tau_g_branch"], "minus");
    assert_eq!(m["conventions"]["frame"], "B = t x N");
    assert_eq!(m["discrepancy_flags"].as_array().unwrap().len(), 2);
    let outs = m["outputs"].as_array().unwrap();
    assert_eq!(outs.len(), 1);
    assert_eq!(outs[0]["file"], "describe.csv");
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn golden_scenarios_are_byte_identical_across_runs() {
    let mut names: Vec<String> = std::fs::read_dir(scenarios())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    assert!(names.len() >= 8);
    for name in names {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert!(run_scenario(&name, a.path()).status.success(), "{name}");
        assert!(run_scenario(&name, b.path()).status.success(), "{name}");
        assert_eq!(snapshot(a.path()), snapshot(b.path()), "{name}");
    }
}

#[test]
fn thread_count_does_not_change_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = scenarios().join("cap_flux.json");
    let one = Command::new(BIN).env("DSPIN_THREADS", "1").args(["flux", "--config"]).arg(&cfg).arg("--out").arg(a.path()).output();
    let four = Command::new(BIN).env("DSPIN_THREADS", "4").args(["flux", "--config"]).arg(&cfg).arg("--out").arg(b.path()).output();
    assert!(one.unwrap().status.success() && four.unwrap().status.success());
    assert_eq!(snapshot(a.path()), snapshot(b.path()));
}

#[test]
fn invalid_configs_exit_2_and_name_the_key() {
    let cases = [
        (r#"{"curve": {"expr": "x^2"}}"#, "curve.expr"),
        (r#"{"grid": {"samples": "many"}}"#, "grid.samples"),
        (r#"{"curve": {"rho": -1.0}}"#, "curve.rho"),
        (r#"{"curve": {"id": "trefoil"}}"#, "curve.id"),
        (r#"{"tolerances": {"ode": 1e-12, "bogus": 1}}"#, "tolerances.bogus"),
        (r#"{"field": {"coupling": "magnetic"}}"#, "field.coupling"),
        (r#"{"curve": 5}"#, "curve"),
        (r#"{"run": "wilson"}"#, "run"),
    ];
    for (body, key) in cases {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), body);
        let o = dspin("describe", &cfg, &dir.path().join("out"));
        assert_eq!(o.status.code(), Some(2), "{body}: {}", stderr(&o));
        assert!(stderr(&o).contains(&format!("`{key}`")), "{body}: {}", stderr(&o));
        assert!(!dir.path().join("out").exists(), "{body}");
    }
}

#[test]
fn flux_without_seed_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"curve": {"id": "viviani_on_sphere"}}"#);
    let o = dspin("flux", &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`flux.seed`"));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{}");
    let o = Command::new(BIN).env("DSPIN_THREADS", "zero").args(["describe", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("DSPIN_THREADS"));
}

#[test]
fn straight_line_frenet_is_a_geometry_error_only_where_needed() {
    // Frames on a straight line leave Frenet columns empty instead of failing.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"curve": {"id": "straight_line"}, "grid": {"samples": 16}}"#);
    let o = dspin("frames", &cfg, &dir.path().join("out"));
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("out/frames.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(15) == Some("")));
}

#[test]
fn coarse_texture_grid_exits_4_but_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"grid": {"samples": 16, "substeps": 1}}"#);
    let o = dspin("texture", &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    let m = read_json(&dir.path().join("out/manifest.json"));
    assert!(m["summary"]["precession"]["r1"].is_null());
    assert!(!m["tolerance_failures"].as_array().unwrap().is_empty());
    assert!(dir.path().join("out/texture.csv").exists());
}
