mod common;

use common::rel_err;
use h2flow::scenario::cli::{run_cli, EXIT_CONFIG, EXIT_OK, EXIT_SOLVER};
use h2flow::scenario::ScenarioConfig;
use h2flow::scenario::{parse_summary, OutputRecord, CSV_HEADER, SERIES_FILE, SUMMARY_FILE};
use h2flow::scenario::preset;
use h2flow::scenario::units::{Quantity, YEAR};
use std::path::Path;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("h2flow").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn small_config() -> ScenarioConfig {
    let mut cfg = preset(2).unwrap();
    cfg.name = "small".into();
    cfg.grid.nx = 15;
    cfg.grid.ny = 15;
    cfg.time.t_end = Quantity::si(400.0 * YEAR);
    cfg.time.output_times = [50.0, 125.0, 400.0].map(|t| Quantity::si(t * YEAR)).to_vec();
    cfg
}

fn write_config(dir: &Path, cfg: &ScenarioConfig) -> String {
    let path = dir.join("small.toml");
    std::fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn presets_round_trip() {
    for case in [1, 2] {
        let cfg = preset(case).unwrap();
        let back = ScenarioConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, back);
    }
}

#[test]
fn constants_prints_reference_values() {
    let (code, out, _) = cli(&["constants"]);
    assert_eq!(code, EXIT_OK);
    let value = |key: &str| -> f64 {
        let line = out.lines().find(|l| l.starts_with(&format!("{key} = "))).unwrap();
        line.split_whitespace().nth(2).unwrap().parse().unwrap()
    };
    assert!(rel_err(value("C_h"), 1.9125e-7) <= 1e-12);
    assert!(rel_err(value("F"), 2500.0) <= 1e-12);
    assert!(rel_err(value("G"), 12500.0) <= 1e-12);
}

#[test]
fn validate_rejects_bad_van_genuchten_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let text = small_config().to_toml().unwrap();
    let bad = text
        .lines()
        .map(|l| if l.trim_start().starts_with("n = ") { "n = 1.0".to_string() } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n");
    assert_ne!(bad, text);
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, bad).unwrap();
    let (code, _, err) = cli(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("n > 1"), "{err}");

    let good = write_config(dir.path(), &small_config());
    assert_eq!(cli(&["validate", "--config", &good]).0, EXIT_OK);
}

#[test]
fn usage_errors_exit_with_config_code() {
    assert_eq!(cli(&["simulate", "--out", "/tmp/never"]).0, EXIT_CONFIG);
    assert_eq!(cli(&["simulate", "--case", "3", "--out", "/tmp/never"]).0, EXIT_CONFIG);
    assert_eq!(cli(&["validate", "--config", "/does/not/exist.toml"]).0, EXIT_CONFIG);
}

#[test]
fn solver_failure_exits_with_solver_code() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config();
    cfg.newton.max_iter = 1;
    cfg.time.dt_init = Quantity::si(50.0 * YEAR);
    cfg.time.dt_min = Quantity::si(50.0 * YEAR);
    let path = write_config(dir.path(), &cfg);
    let out = dir.path().join("out");
    let (code, _, err) = cli(&["simulate", "--config", &path, "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_SOLVER, "{err}");
}

#[test]
fn simulate_writes_records_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &small_config());
    let out = dir.path().join("out");
    let (code, stdout, err) = cli(&["simulate", "--config", &path, "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(stdout.starts_with("small:"));

    let summary = std::fs::read_to_string(out.join(SUMMARY_FILE)).unwrap();
    let kv = parse_summary(&summary);
    let get = |k: &str| kv.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone()).unwrap();
    assert_eq!(get("records"), "3");
    let f = |k: &str| get(k).parse::<f64>().unwrap();
    let bal = f("mass_initial_kg") + f("mass_injected_kg") - f("mass_outflow_kg") - f("mass_final_kg");
    assert!(bal.abs() <= 1e-8 * f("mass_injected_kg"));
    assert!(f("mass_balance_relative_error") <= 1e-8);
    assert!(f("t1_years") > 0.0);

    for (i, t) in [50.0, 125.0, 400.0].into_iter().enumerate() {
        assert_eq!(f(&format!("record_{}_time_years", i + 1)), t);
        let name = get(&format!("record_{}_file", i + 1));
        let text = std::fs::read_to_string(out.join(&name)).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        let rec = OutputRecord::from_csv(t, &text).unwrap();
        assert_eq!(rec.len(), 15);
        assert_eq!(rec.file_name(), name);
        assert!(rec.x.windows(2).all(|w| w[0] < w[1]));
        assert!(rec.s_g.iter().all(|s| (0.0..1.0).contains(s)));
        assert!(rec.c_h2.iter().all(|c| *c >= 0.0));
    }
    let series = std::fs::read_to_string(out.join(SERIES_FILE)).unwrap();
    assert!(series.lines().count() > 3);
}
