use std::fs;
use std::path::Path;
use std::process::Command;

use mtlab_cli::summary::Outcome;
use mtlab_cli::{run, CommandKind, ErrorRecord, ExperimentConfig, Summary};
use serde_json::Value;

fn mtlab(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mtlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| {
            rec.unwrap()
                .iter()
                .map(|f| match f {
                    "true" => 1.0,
                    "false" => 0.0,
                    x => x.parse().unwrap(),
                })
                .collect()
        })
        .collect();
    (header, rows)
}

fn summary(out: &Path, command: &str) -> Summary {
    Summary::from_json(&fs::read_to_string(out.join(format!("{command}.json"))).unwrap()).unwrap()
}

#[test]
fn constants_n2() {
    let dir = tempfile::tempdir().unwrap();
    let o = mtlab(&["constants", "--n", "2"], dir.path());
    assert!(o.status.success());
    let raw: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("constants.json")).unwrap()).unwrap();
    let pi = std::f64::consts::PI;
    let alpha = raw["result"]["alpha_n"].as_f64().unwrap();
    let j = raw["result"]["J"].as_f64().unwrap();
    assert!((alpha - 12.566_370_6).abs() < 1e-7);
    assert!((j - pi * (1.0 + 1f64.exp())).abs() < 1e-12);
    assert_eq!(raw["command"], "constants");
}

#[test]
fn sharpness_values_dominate_power_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = mtlab(
        &["sharpness", "--kind", "mt2", "--gamma-mult", "1.1", "--n", "2", "--j", "64,256,1024"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&dir.path().join("sharpness.csv"));
    assert_eq!(header, ["j", "value", "lower_bound", "flag"]);
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let bound = std::f64::consts::PI * row[0].powf(0.2);
        assert!((row[2] - bound).abs() < 1e-9 * bound);
        assert!(row[1] >= bound, "{row:?}");
    }
    let (h, plot) = read_csv(&dir.path().join("sharpness_loglog.csv"));
    assert_eq!(h, ["ln_j", "ln_value"]);
    assert!(plot.windows(2).all(|w| w[1][1] > w[0][1]));
    let Outcome::Sharpness(s) = summary(dir.path(), "sharpness").outcome else { panic!() };
    assert!(s.dominates_lower_bound);
}

#[test]
fn eval_zero_baseline_is_ball_volume() {
    let dir = tempfile::tempdir().unwrap();
    let o = mtlab(
        &["eval", "--kind", "mt1", "--alpha", "1", "--n", "2", "--input", "zero", "--grid-count", "200"],
        dir.path(),
    );
    assert!(o.status.success());
    let Outcome::Eval(e) = summary(dir.path(), "eval").outcome else { panic!() };
    assert!((e.value - std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn invalid_config_exits_2_with_error_record() {
    let dir = tempfile::tempdir().unwrap();
    let o = mtlab(&["eval", "--n", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let rec: ErrorRecord = serde_json::from_slice(o.stdout.trim_ascii()).unwrap();
    assert_eq!(rec.exit_code, 2);
    assert_eq!(rec.command.as_deref(), Some("eval"));
    assert!(dir.path().join("error.json").exists());
    assert!(!dir.path().join("eval.json").exists());
}

#[test]
fn module_failure_exits_1_with_error_record() {
    let dir = tempfile::tempdir().unwrap();
    // The default grid does not resolve a concentration scale this small.
    let o = mtlab(&["eval", "--input", "concentrating:1e-30", "--grid-count", "100"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let rec: ErrorRecord =
        serde_json::from_str(&fs::read_to_string(dir.path().join("error.json")).unwrap()).unwrap();
    assert_eq!(rec.exit_code, 1);
    assert!(rec.message.contains("resolve"), "{}", rec.message);
}

#[test]
fn config_file_and_env_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"command": "eigen", "params": {"n": 2, "grid-count": 101}}"#).unwrap();
    let out = dir.path().join("from-env");
    let o = Command::new(env!("CARGO_BIN_EXE_mtlab"))
        .arg("--config")
        .arg(&cfg)
        .env("MTLAB_OUT_DIR", &out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let Outcome::Eigen(e) = summary(&out, "eigen").outcome else { panic!() };
    assert_eq!(e.grid_nodes, 101);
    assert!((e.lambda1 - 2.404_825_557_695_773f64.powi(2)).abs() < 1e-6);
}

#[test]
fn every_command_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let small = |k: CommandKind| {
        let c = ExperimentConfig::new(k).with("out", dir.path().to_str().unwrap());
        match k {
            CommandKind::Constants | CommandKind::Conditions => c,
            CommandKind::Maximize | CommandKind::Gap => c.with("grid_count", 200).with("max_iters", 200),
            _ => c.with("grid_count", 200),
        }
    };
    for k in [
        CommandKind::Constants,
        CommandKind::Eval,
        CommandKind::Maximize,
        CommandKind::Gap,
        CommandKind::Sharpness,
        CommandKind::Pde,
        CommandKind::Eigen,
        CommandKind::Conditions,
    ] {
        let res = run(&small(k)).unwrap_or_else(|e| panic!("{k}: {e}"));
        let text = fs::read_to_string(&res.summary_path).unwrap();
        let back = Summary::from_json(&text).unwrap();
        assert_eq!(back, res.summary, "{k}");
        assert_eq!(back.command(), k.name());
        for p in res.tables.iter().chain(&res.plots) {
            assert!(fs::metadata(p).unwrap().len() > 0);
        }
    }
}

#[test]
fn maximize_is_deterministic_and_trace_nondecreasing() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["maximize", "--grid-count", "300", "--max-iters", "300", "--seed", "7"];
    assert!(mtlab(&args, a.path()).status.success());
    assert!(mtlab(&args, b.path()).status.success());
    for f in ["maximize_trace.csv", "maximize_argmax.csv", "maximize_trace_plot.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let (_, plot) = read_csv(&a.path().join("maximize_trace_plot.csv"));
    assert!(plot.len() > 1);
    assert!(plot.windows(2).all(|w| w[1][1] >= w[0][1]));
}

#[test]
fn pde_profile_boundary_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = mtlab(&["pde", "--n", "2", "--grid-count", "201"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let Outcome::Pde(p) = summary(dir.path(), "pde").outcome else { panic!() };
    let (header, rows) = read_csv(&dir.path().join("pde_profile.csv"));
    assert_eq!(header, ["r", "u", "du", "flux"]);
    let (_, plot) = read_csv(&dir.path().join("pde_profile_plot.csv"));
    assert_eq!(plot.len(), rows.len());
    assert_eq!(plot[0], [0.0, p.s]);
    assert_eq!(*plot.last().unwrap(), [1.0, 0.0]);
    assert!(p.positive && p.monotone);
    assert!(p.boundary_residual.abs() <= 1e-8);
}
