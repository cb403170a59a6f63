use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const JONES_VERIFY: &str = "\
# Jones case
model.omega = 2
model.alpha = 0.4
model.beta = 0.2
profile.family = harmonic
grid.n = 400
grid.x_min = -10
grid.x_max = 10
job = verify
k = 5
";

const SOLITONIC_SPECTRUM: &str = "\
model.omega = 1.1
model.alpha = 0.1
model.beta = 0
profile.family = solitonic
profile.q = 1
profile.kappa = 2
grid.n = 600
grid.x_min = -12
grid.x_max = 12
job = spectrum
k = 4
";

fn run(dir: &Path, config: &str, extra: &[&str]) -> Output {
    let path = dir.join("run.cfg");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_swanson"))
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|_| panic!("stderr is not JSON: {}", String::from_utf8_lossy(&out.stderr)))
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn verify_on_jones_case_reports_second_order() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), JONES_VERIFY, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.contains("PASS similarity_order"));
    assert!(!summary.contains("FAIL"));

    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/verify.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    let records = report["records"].as_array().unwrap();
    for name in ["similarity", "pseudo_hermiticity", "commutator", "level_0", "eigenfunction_0"] {
        let fine = records
            .iter()
            .find(|r| r["name"] == name && !r["order_estimate"].is_null())
            .unwrap_or_else(|| panic!("no record {name}"));
        for key in ["name", "h", "residual", "order_estimate"] {
            assert!(fine.get(key).is_some());
        }
        let order = fine["order_estimate"].as_f64().unwrap();
        assert!((order - 2.0).abs() < 0.1, "{name}: {order}");
    }
}

#[test]
fn sweep_lambda_follows_delta() {
    let dir = TempDir::new().unwrap();
    let config = "\
model.omega = 1
model.alpha = 0
model.beta = 0
profile.family = solitonic
profile.q = 1
profile.kappa = 2
grid.n = 300
grid.x_min = -12
grid.x_max = 12
job = sweep
sweep.param = alpha
sweep.start = 0
sweep.stop = 0.5
sweep.steps = 6
";
    let out = run(dir.path(), config, &["--quiet"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let (header, rows) = read_csv(&dir.path().join("out/sweep.csv"));
    assert_eq!(header, ["alpha", "E0", "max_im", "delta", "lambda"]);
    assert_eq!(rows.len(), 6);
    let mut previous = f64::NEG_INFINITY;
    for row in &rows {
        let v: Vec<f64> = row.iter().map(|s| s.parse().unwrap()).collect();
        // reduced α = α/ω̃ with ω̃ = 1 − α
        let a = v[0] / (1.0 - v[0]);
        let delta = 1.0 + 3.0 * a + 2.25 * a * a;
        assert!((v[3] - delta).abs() < 1e-12, "{row:?}");
        assert!((v[4] - (0.5 + delta.sqrt())).abs() < 1e-12);
        assert!(v[4] > previous);
        previous = v[4];
        assert!(v[2] == 0.0 || v[2] < 1e-8);
        // on the β = 0 branch the ground level is ½ω
        assert!((v[1] - 0.5).abs() < 5e-3, "{row:?}");
    }
}

#[test]
fn spectrum_outputs_and_determinism() {
    let dir = TempDir::new().unwrap();
    let first = run(dir.path(), SOLITONIC_SPECTRUM, &["--quiet", "--dump-matrix"]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let out = dir.path().join("out");
    let names = ["spectrum.csv", "wavefunctions.csv", "closedform.csv", "h_hermitian.txt", "h_nonhermitian.txt"];
    let snapshot: Vec<Vec<u8>> = names.iter().map(|n| fs::read(out.join(n)).unwrap()).collect();

    let (header, rows) = read_csv(&out.join("spectrum.csv"));
    assert_eq!(header, ["n", "E_numeric", "E_closed_form", "abs_err", "rel_err", "max_im"]);
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let rel: f64 = row[4].parse().unwrap();
        assert!(rel < 1e-2);
        // 17 significant digits
        let mantissa = row[1].split('e').next().unwrap();
        assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 17, "{}", row[1]);
    }
    let (header, rows) = read_csv(&out.join("wavefunctions.csv"));
    assert_eq!(header[0], "x");
    assert_eq!(header.len(), 9);
    assert_eq!(rows.len(), 600);
    let (header, rows) = read_csv(&out.join("closedform.csv"));
    assert_eq!(header, ["n", "E_n", "checksum"]);
    let e0: f64 = rows[0][1].parse().unwrap();
    assert!((e0 - 0.55).abs() < 1e-12);

    let triplets = fs::read_to_string(out.join("h_hermitian.txt")).unwrap();
    let mut count = 0;
    for line in triplets.lines() {
        let parts: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(parts.len(), 3);
        let (i, j): (usize, usize) = (parts[0].parse().unwrap(), parts[1].parse().unwrap());
        assert!(i.abs_diff(j) <= 1);
        parts[2].parse::<f64>().unwrap();
        count += 1;
    }
    assert_eq!(count, 600 + 2 * 599);

    let second = run(dir.path(), SOLITONIC_SPECTRUM, &["--quiet", "--dump-matrix"]);
    assert_eq!(second.status.code(), Some(0));
    for (name, before) in names.iter().zip(&snapshot) {
        assert_eq!(&fs::read(out.join(name)).unwrap(), before, "{name} changed between runs");
    }
}

#[test]
fn forced_oracle_fills_max_im() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), SOLITONIC_SPECTRUM, &["--quiet", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = read_csv(&dir.path().join("out/spectrum.csv"));
    for row in rows {
        let im: f64 = row[5].parse().unwrap();
        assert!(im.abs() < 1e-6);
    }
}

#[test]
fn veff_and_metric_jobs() {
    let dir = TempDir::new().unwrap();
    let config = JONES_VERIFY.replace("job = verify", "job = metric").replace("k = 5\n", "");
    let out = run(dir.path(), &config, &["--quiet"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("out/coefficients.csv"));
    assert_eq!(header, ["x", "a", "b", "c1", "c2", "veff", "rho_tilde", "zeta_plus"]);
    assert_eq!(rows.len(), 400);
    let (header, rows) = read_csv(&dir.path().join("out/metric.csv"));
    assert_eq!(header, ["x", "w", "rho_tilde", "zeta_plus", "zeta", "jones_rho"]);
    for row in rows {
        let v: Vec<f64> = row.iter().map(|s| s.parse().unwrap()).collect();
        assert!((v[2] - v[5]).abs() <= 1e-14 * v[5].max(1.0));
        assert!((v[1] * v[2] - 1.0).abs() < 1e-8);
    }

    let config = JONES_VERIFY.replace("job = verify", "job = veff").replace("k = 5\n", "");
    let out = run(dir.path(), &config, &["--quiet"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn failing_verification_exits_one() {
    let dir = TempDir::new().unwrap();
    let config = SOLITONIC_SPECTRUM.replace("job = spectrum", "job = verify").replace("grid.n = 600", "grid.n = 16");
    let out = run(dir.path(), &config, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/verify.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn malformed_config_exits_two_with_json() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), "model.omega = 2\nthis line has no equals sign\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "config");
    assert_eq!(err["line"], 2);

    let out = run(dir.path(), &JONES_VERIFY.replace("model.omega = 2", "model.omega = 0.5"), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert!(err["message"].as_str().unwrap().contains("appropriate to assume omega_tilde > 0"));

    let out = run(dir.path(), &SOLITONIC_SPECTRUM.replace("profile.kappa = 2", "profile.kappa = 0.4"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["key"], "profile.kappa");

    let out = run(dir.path(), &format!("{JONES_VERIFY}model.gamma = 1\n"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["key"], "model.gamma");
}

#[test]
fn usage_errors_exit_two_with_json() {
    let out = Command::new(env!("CARGO_BIN_EXE_swanson")).arg("--bogus").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "usage");

    let out = Command::new(env!("CARGO_BIN_EXE_swanson"))
        .args(["--config", "/nonexistent/swanson.cfg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "usage");

    let out = Command::new(env!("CARGO_BIN_EXE_swanson")).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--dump-matrix"));
}

#[test]
fn numeric_failure_exits_three() {
    let dir = TempDir::new().unwrap();
    let config = "\
model.omega = 1
model.alpha = 0.1
model.beta = 0.05
profile.family = morse
profile.p = 1
grid.n = 400
grid.x_min = -2
grid.x_max = 30
job = veff
";
    let out = run(dir.path(), config, &[]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "range");
}
