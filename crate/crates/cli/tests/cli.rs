use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL: &str = r#"
case = "J_over_deps"
ratios = [1.0, 0.2]
realizations = 3
master_seed = 5

[lattice]
kind = "chain"
sites = 8

[measures]
npc_c = true
purities = [1, 2]
"#;

fn spinchaos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinchaos"))
        .args(args)
        .env("SPINCHAOS_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, text: &str) -> String {
    let p = dir.path().join("cfg.toml");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sweep_writes_one_row_per_ratio() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, SMALL);
    let csv = stdout(&spinchaos(&["sweep", &cfg]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("config_hash,case,ratio"));
    assert!(lines[0].contains("eta_mean") && lines[0].contains("P2_se"));
    assert!(lines[1].contains(",J_over_deps,2.0000000000000001e-1,"));
    assert!(lines[1].contains(",5;6;7,"));
}

#[test]
fn sweep_output_is_reproducible_and_overridable() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, SMALL);
    let out = dir.path().join("a.csv");
    let out_s = out.to_str().unwrap();
    stdout(&spinchaos(&["sweep", &cfg, "--out", out_s]));
    let again = stdout(&spinchaos(&["--threads", "1", "sweep", &cfg]));
    assert_eq!(fs::read_to_string(&out).unwrap(), again);

    let more = stdout(&spinchaos(&["sweep", &cfg, "--realizations", "2", "--seed", "40", "--ratios", "0.5"]));
    let row = more.lines().nth(1).unwrap();
    assert!(row.contains(",40;41,"));
    assert_eq!(more.lines().count(), 2);
}

#[test]
fn scatter_and_spectrum_outputs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, SMALL);
    let scatter = stdout(&spinchaos(&["scatter", &cfg, "--ratio", "0.5"]));
    assert!(scatter.starts_with("config_hash,realization,seed,energy,xi_c,xi_j,C,P1,P2,Q1,Pu,S_lin,S_vn"));
    assert_eq!(scatter.lines().count(), 1 + 3 * 70);

    let hist = dir.path().join("h.csv");
    let cdf = dir.path().join("c.csv");
    let spectrum = stdout(&spinchaos(&[
        "spectrum",
        &cfg,
        "--ratio",
        "0.5",
        "--histogram",
        hist.to_str().unwrap(),
        "--cdf",
        cdf.to_str().unwrap(),
    ]));
    assert_eq!(spectrum.lines().count(), 1 + 3 * 70);
    assert!(fs::read_to_string(&hist).unwrap().starts_with("s,density\n"));
    assert!(fs::read_to_string(&cdf).unwrap().starts_with("s,cdf\n"));
}

#[test]
fn baseline_report() {
    let csv = stdout(&spinchaos(&["baseline", "--sites", "6", "--samples", "200"]));
    let names: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(names, ["P1", "P2", "P3", "xi_goe"]);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = write_config(&dir, &SMALL.replace("ratios = [1.0, 0.2]", "ratios = [-1.0]"));
    assert_eq!(spinchaos(&["sweep", &bad]).status.code(), Some(2));
    let unknown = write_config(&dir, &format!("{SMALL}\nbogus = 1\n"));
    assert_eq!(spinchaos(&["sweep", &unknown]).status.code(), Some(2));
    let missing = Path::new("/nonexistent/cfg.toml").to_str().unwrap();
    assert_eq!(spinchaos(&["sweep", missing]).status.code(), Some(2));
    assert_eq!(spinchaos(&["sweep"]).status.code(), Some(2));
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let text = fs::read_to_string(&path).unwrap();
            let cfg = spinchaos::SweepConfig::from_toml_str(&text)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            spinchaos::harness::prepare_sector(&cfg)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            count += 1;
        }
    }
    assert!(count >= 10);
}

#[test]
fn readme_config_example_parses() {
    let readme = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../README.md")).unwrap();
    let block = readme.split("```toml\n").nth(1).unwrap().split("```").next().unwrap();
    let cfg = spinchaos::SweepConfig::from_toml_str(block).unwrap();
    assert_eq!(cfg.partitions["2"].len(), 6);
}
