use std::path::Path;
use std::process::{Command, Output};

fn renorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renorm")).args(args).env_remove("RENORM_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const DISK_VORTEX: &str = r#"{
  "domain": "unit-disk",
  "target": "circle",
  "boundary_data": 1,
  "singularities": [{"x": 0.0, "y": 0.0, "class": 1}],
  "rho_schedule": [0.2, 0.1, 0.05],
  "h": 0.0625,
  "solver": {"restarts": 1}
}"#;

#[test]
fn octahedral_table_has_eight_rows() {
    let o = renorm(&["table", "--manifold", "octahedral", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 8);
    let e = rows.iter().find(|r| &r[0] == "γ_e").unwrap();
    assert_eq!(&e[2], "12");
    assert_eq!(&e[3], "1");
    assert_eq!(&e[4], "γ_v γ_f");
    assert_eq!(&e[5], "25/144");
    let text = stdout(&renorm(&["table", "--manifold", "octahedral"]));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn table_json_is_parseable() {
    let o = renorm(&["table", "--manifold", "helium3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let two = rows.iter().find(|r| r["name"] == "γ_2").unwrap();
    assert_eq!(two["decompositions"].as_array().unwrap().len(), 3);
}

#[test]
fn resolve_reports_compatibility_and_exit_status() {
    let o = renorm(&["resolve", "--manifold", "circle", "--outer", "2", "--sing", "1,1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("compatible"));
    let o = renorm(&["resolve", "--manifold", "circle", "--outer", "2", "--sing", "1,-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).lines().next(), Some("incompatible"));
    let o = renorm(&["resolve", "--manifold", "tetrahedral", "--outer", "w", "--sing", "+,+,+"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn invalid_arguments_exit_with_one() {
    assert_eq!(renorm(&["table", "--manifold", "klein-bottle"]).status.code(), Some(1));
    assert_eq!(renorm(&["table"]).status.code(), Some(1));
    assert_eq!(renorm(&["resolve", "--manifold", "circle", "--outer", "x", "--sing", "1"]).status.code(), Some(1));
}

#[test]
fn energy_of_centred_vortex_is_near_zero_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "disk_vortex.json", DISK_VORTEX);
    let out = dir.path().join("energy.csv");
    let o = renorm(&["energy", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read_to_string(&out).unwrap();
    let mut rd = csv::Reader::from_reader(first.as_bytes());
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.iter().filter(|r| &r[0] == "energy").count(), 3);
    let w: f64 = rows.iter().find(|r| &r[0] == "W").unwrap()[3].parse().unwrap();
    let a: f64 = rows.iter().find(|r| &r[0] == "A").unwrap()[3].parse().unwrap();
    assert!(w.abs() < 0.1, "W = {w}");
    assert!((a - std::f64::consts::PI).abs() < 0.1 * std::f64::consts::PI, "A = {a}");
    assert!(rows.iter().any(|r| &r[0] == "flux_x"));
    let o = renorm(&["energy", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);
}

#[test]
fn energy_config_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "unknown.json", &DISK_VORTEX.replace("\"h\"", "\"colour\": 1, \"h\""));
    assert_eq!(renorm(&["energy", "--config", &unknown]).status.code(), Some(1));
    let incompatible = write(dir.path(), "incompatible.json", &DISK_VORTEX.replace("\"boundary_data\": 1", "\"boundary_data\": 2"));
    assert_eq!(renorm(&["energy", "--config", &incompatible]).status.code(), Some(2));
    let stuck = write(
        dir.path(),
        "stuck.json",
        &DISK_VORTEX.replace("{\"restarts\": 1}", "{\"restarts\": 1, \"max_sweeps\": 2}"),
    );
    assert_eq!(renorm(&["energy", "--config", &stuck]).status.code(), Some(3));
    assert_eq!(renorm(&["energy", "--config", "/nonexistent/config.json"]).status.code(), Some(1));
}

#[test]
fn sweep_rows_do_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = DISK_VORTEX.replace(
        "\"h\": 0.0625",
        "\"h\": 0.0625, \"sweep\": {\"axis\": \"x\", \"range\": [-0.2, 0.2], \"steps\": 3}",
    );
    let cfg = write(dir.path(), "sweep.json", &cfg);
    let one = renorm(&["energy", "--config", &cfg, "--threads", "1"]);
    let two = renorm(&["energy", "--config", &cfg, "--threads", "3"]);
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, two.stdout);
    let text = stdout(&one);
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["a_x", "a_y", "W", "W_over_pi", "A"]);
    let w: Vec<f64> = rd.records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(w.len(), 3);
    assert!(w[1] < w[0] && w[1] < w[2], "{w:?}");
}

#[test]
fn balls_trace_is_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "balls.json",
        r#"{"balls": [{"x": 0, "y": 0, "r": 1}, {"x": 4, "y": 0, "r": 1}], "t_max": 1.0, "samples": 3}"#,
    );
    let o = renorm(&["balls", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["t", "ball_index", "cx", "cy", "r"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    // t = 0 and 0.5: two balls; t = ln 2 and 1: one merged ball
    assert_eq!(rows.len(), 6);
    let last = rows.last().unwrap();
    assert!((last[4].parse::<f64>().unwrap() - 2.0 * 1f64.exp()).abs() < 1e-12);
    let empty = write(dir.path(), "empty.json", r#"{"balls": [], "t_max": 1.0}"#);
    assert_eq!(renorm(&["balls", "--config", &empty]).status.code(), Some(1));
}

#[test]
fn synharmony_of_identical_loops_vanishes() {
    let o = renorm(&["synharmony", "--manifold", "circle", "--gamma", "1", "--beta", "1", "--lengths", "1", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["estimate"].as_f64().unwrap().abs() < 1e-9);
    let o = renorm(&["synharmony", "--manifold", "circle", "--gamma", "1", "--beta", "2"]);
    assert_eq!(o.status.code(), Some(2));
}
