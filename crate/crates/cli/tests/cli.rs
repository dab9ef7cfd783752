use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::Command;

use displacemon_cli::{run, RunManifest, RunRequest, Subcommand, MANIFEST};

const COMPASS: &str = "
[numerics]
dim = 128

[protocol]
alphas = [1.9, 1.9]

[decoherence]
gamma_t = 0.05
n_traj = 200
seed = 11
";

fn request(subcommand: Subcommand, config: &str, out: &Path) -> RunRequest {
    RunRequest {
        subcommand,
        config_text: config.to_string(),
        overrides: Vec::new(),
        out: Some(out.to_path_buf()),
        env_out: None,
    }
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn identical_runs_write_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run(&request(Subcommand::Interfere, COMPASS, &a)).unwrap();
    run(&request(Subcommand::Interfere, COMPASS, &b)).unwrap();
    let (fa, fb) = (csv_files(&a), csv_files(&b));
    assert!(fa.len() >= 7);
    assert_eq!(fa, fb);
    assert_eq!(fs::read(a.join("readout.json")).unwrap(), fs::read(b.join("readout.json")).unwrap());
}

#[test]
fn manifest_lists_every_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&request(Subcommand::Interfere, COMPASS, tmp.path())).unwrap();
    let on_disk: BTreeSet<String> = fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n != MANIFEST)
        .collect();
    let listed: BTreeSet<String> = out.manifest.outputs.iter().map(|o| o.file.clone()).collect();
    assert_eq!(on_disk, listed);
    let stored: RunManifest = serde_json::from_slice(&fs::read(tmp.path().join(MANIFEST)).unwrap()).unwrap();
    assert_eq!(stored.outputs, out.manifest.outputs);
    assert_eq!(stored.seed, 11);
    assert_eq!(stored.step_probabilities.len(), 2);
    for o in &stored.outputs {
        let bytes = fs::read(tmp.path().join(&o.file)).unwrap();
        assert_eq!(displacemon_cli::output::sha256_hex(&bytes), o.sha256);
    }
}

#[test]
fn rerun_from_effective_config_reproduces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let mut req = request(Subcommand::PplusMap, COMPASS, &first);
    req.overrides = vec!["map.theta_points=8".into(), "map.ratio_points=8".into()];
    let a = run(&req).unwrap();
    let second = tmp.path().join("second");
    let b = run(&request(Subcommand::PplusMap, &a.manifest.effective_config, &second)).unwrap();
    assert_eq!(a.manifest.config_hash, b.manifest.config_hash);
    assert_eq!(csv_files(&first), csv_files(&second));
}

#[test]
fn rerun_into_same_directory_replaces_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    run(&request(Subcommand::ClassicalMap, "[classical]\nalpha = 1.9\n[map]\ntheta_points = 8\nratio_points = 8\n", tmp.path())).unwrap();
    let out = run(&request(Subcommand::DeviceReport, "", tmp.path())).unwrap();
    let names: BTreeSet<String> = fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(!names.contains("classical_map.csv"));
    assert_eq!(names.len(), out.manifest.outputs.len() + 1);
}

#[test]
fn device_sweep_has_no_coupling_at_zero_flux() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&request(Subcommand::DeviceReport, "", tmp.path())).unwrap();
    let lambda: f64 = out.summary.iter().find(|(k, _)| k == "lambda_mhz").unwrap().1.parse().unwrap();
    assert!((lambda / 8.5 - 1.0).abs() < 0.05);
    let nbar: f64 = out.summary.iter().find(|(k, _)| k == "nbar").unwrap().1.parse().unwrap();
    assert!((nbar - 5.0).abs() < 0.1);
    let text = fs::read_to_string(tmp.path().join("flux_sweep.csv")).unwrap();
    let row = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .min_by(|a, b| a[0].abs().total_cmp(&b[0].abs()))
        .unwrap();
    assert!(row[0].abs() < 1e-12);
    assert!(row[3].abs() < 1e-6 * lambda * 2.0 * std::f64::consts::PI * 1e6);
}

fn binary(args: &[&str], env_out: Option<&Path>) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_displacemon"));
    cmd.args(args).env_remove(displacemon_cli::OUT_ENV);
    if let Some(dir) = env_out {
        cmd.env(displacemon_cli::OUT_ENV, dir);
    }
    let out = cmd.output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn error_json(stderr: &str) -> serde_json::Value {
    serde_json::from_str(stderr.trim()).expect("stderr carries one JSON error")
}

#[test]
fn unknown_key_exits_with_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let (code, _, stderr) = binary(&["device-report", "--set", "numerics.dimension=4", "-o", out.to_str().unwrap()], None);
    assert_eq!(code, 2);
    let e = error_json(&stderr);
    assert_eq!(e["error"], "config");
    assert!(e["message"].as_str().unwrap().contains("numerics"));
}

#[test]
fn empty_alpha_list_names_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "[protocol]\nalphas = []\n").unwrap();
    let out = tmp.path().join("o");
    let (code, _, stderr) = binary(&["interfere", "-c", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()], None);
    assert_eq!(code, 2);
    assert!(error_json(&stderr)["message"].as_str().unwrap().contains("protocol.alphas"));
}

#[test]
fn truncated_space_exits_with_numerics_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let (code, _, stderr) = binary(
        &["interfere", "--set", "numerics.dim=24", "--set", "protocol.alphas=[1.9, 1.9]", "--set", "state.nbar=5.0", "-o", out.to_str().unwrap()],
        None,
    );
    assert_eq!(code, 3, "{stderr}");
    assert_eq!(error_json(&stderr)["error"], "numerics");
}

#[test]
fn unwritable_output_exits_with_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let (code, _, stderr) = binary(&["device-report", "-o", blocker.join("sub").to_str().unwrap()], None);
    assert_eq!(code, 4);
    assert_eq!(error_json(&stderr)["error"], "io");
}

#[test]
fn environment_sets_default_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("from-env");
    let (code, stdout, _) = binary(&["device-report", "--summary"], Some(&dir));
    assert_eq!(code, 0);
    assert!(dir.join(MANIFEST).exists());
    assert!(stdout.contains("lambda_mhz = "));
}
