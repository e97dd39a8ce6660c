use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_herd-audit");

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let mut rows = vec![reader.headers().unwrap().iter().map(String::from).collect()];
    for rec in reader.records() {
        rows.push(rec.unwrap().iter().map(String::from).collect());
    }
    rows
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path
}

const LAPLACE: &str = r#"
[mechanism]
kind = "laplace"
[budgets]
grid = [0.5, 1.0, 2.0]
"#;

#[test]
fn solve_auditor_reports_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["solve-auditor"],
        &config("confidence_trend.toml"),
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = csv_rows(&dir.path().join("confidence.csv"));
    assert_eq!(
        rows[0],
        ["signal", "Q_g", "Q_b", "v", "r_g", "r_b", "chi", "phi"]
    );
    let ratio: f64 = rows[1][2].parse::<f64>().unwrap() / rows[1][3].parse::<f64>().unwrap();
    assert!((ratio - 0.25).abs() < 1e-12);
    assert_eq!(rows[1][4], "0.622459331202");
    let info = csv_rows(&dir.path().join("info_strategy.csv"));
    assert_eq!(info[0], ["signal", "d_g", "d_b", "action", "posterior_g"]);
    assert_eq!(info.len(), 3);
}

#[test]
fn symmetric_ratio_gives_even_confidence() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
[mechanism]
kind = "table"
rows = [[0.5, 0.5], [0.5, 0.5]]
[budgets]
grid = [0.5, 2.0]
[auditor]
false_alarm = -1.0
miss = -1.0
"#;
    let cfg = write_config(dir.path(), body);
    let out = run(&["solve-auditor"], &cfg, dir.path());
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("confidence.csv"));
    assert_eq!(rows[1][4], "0.5");
    assert_eq!(rows[2][4], "0.5");
}

#[test]
fn positive_penalty_is_rejected_with_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{LAPLACE}[auditor]\nfalse_alarm = 0.5\nmiss = -1.0\n"),
    );
    let out = run(&["solve-auditor"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("auditor.false_alarm"));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{LAPLACE}[auditor]\nfalse_alarm = -1.0\nmiss = -1.0\nlamda = 2.0\n"),
    );
    let out = run(&["equilibrium"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lamda"));
}

fn chosen_epsilon(dir: &Path) -> (String, f64) {
    let rows = csv_rows(&dir.join("equilibrium.csv"));
    assert_eq!(rows[1][0], "equilibrium");
    (rows[1][1].clone(), rows[1][3].parse().unwrap())
}

#[test]
fn uninformed_and_indifferent_developers_take_largest_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["equilibrium"], &config("uninformed.toml"), dir.path());
    assert!(out.status.success());
    assert_eq!(chosen_epsilon(dir.path()).0, "2");

    let cfg = write_config(
        dir.path(),
        &format!("{LAPLACE}[auditor]\nfalse_alarm = -1.0\nmiss = -1.0\nlambda = 0.05\n[developer]\nbeta = 0.0\n"),
    );
    let out = run(&["equilibrium"], &cfg, dir.path());
    assert!(out.status.success());
    assert_eq!(chosen_epsilon(dir.path()).0, "2");
}

#[test]
fn evasion_ordering_on_default_instance() {
    let mut evasion = Vec::new();
    for lambda in ["0.1", "1.0"] {
        let dir = tempfile::tempdir().unwrap();
        let text = std::fs::read_to_string(config("default.toml")).unwrap();
        let text = text.replace("lambda = 1.0\n", &format!("lambda = {lambda}\n"));
        let cfg = write_config(dir.path(), &text);
        let out = run(&["equilibrium"], &cfg, dir.path());
        assert!(out.status.success());
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.starts_with("equilibrium: mode=leader-enumeration"));
        evasion.push(chosen_epsilon(dir.path()).1);
    }
    assert!(evasion[0] <= evasion[1], "{evasion:?}");
}

#[test]
fn iteration_mode_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["equilibrium", "--mode", "iteration"],
        &config("default.toml"),
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("mode=iteration"));
    assert!(stdout.contains("converged=true"));
    assert_eq!(chosen_epsilon(dir.path()).0, "2");
}

#[test]
fn sweeps_are_sorted_and_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["sweep"], &config("confidence_trend.toml"), dir.path());
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("sweep.csv"));
    let r_g: Vec<f64> = rows[1..]
        .iter()
        .filter(|r| r[1] == "0")
        .map(|r| r[4].parse().unwrap())
        .collect();
    assert!(r_g.windows(2).all(|w| w[1] < w[0]));
    assert!(r_g.iter().all(|r| *r > 0.5));

    let dir = tempfile::tempdir().unwrap();
    let out = run(&["sweep"], &config("ratio_sweep.toml"), dir.path());
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("sweep.csv"));
    assert_eq!(rows[0], ["lambda", "ratio", "r_g", "r_b", "dr_dratio"]);
    let at_one: Vec<f64> = rows[1..]
        .iter()
        .filter(|r| r[0] == "1")
        .map(|r| r[2].parse().unwrap())
        .collect();
    assert_eq!(at_one.len(), 19);
    assert!(at_one.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn empty_sweep_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{LAPLACE}[auditor]\nfalse_alarm = -1.0\nmiss = -1.0\nlambda_grid = []\n"),
    );
    let out = run(&["sweep"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("auditor.lambda_grid"));
}

#[test]
fn oracle_check_passes_and_detects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["default.toml", "uninformed.toml", "general_utility.toml"] {
        let out = run(&["oracle-check"], &config(name), dir.path());
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(out.status.success(), "{name}: {stdout}");
        assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 4);
    }
    let out = run(
        &["oracle-check", "--corrupt-closed-form"],
        &config("default.toml"),
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL audit-confidence"));
}

#[test]
fn verify_dp_reports_each_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify-dp"], &config("default.toml"), dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS epsilon=0.5 max_log_ratio=0.5"));
    assert!(stdout.contains("PASS epsilon=2 "));
    assert!(stdout.contains("zero-shift epsilon=0.5 max_log_ratio=0"));

    let out = run(&["verify-dp"], &config("confidence_trend.toml"), dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported"));
}

#[test]
fn table_file_is_read_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["solve-auditor"],
        &config("general_utility.toml"),
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = csv_rows(&dir.path().join("confidence.csv"));
    assert_eq!(rows[1][1], "0.75");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for cmd in ["sweep", "equilibrium", "solve-auditor"] {
        run(&[cmd], &config("default.toml"), a.path());
        run(&[cmd], &config("default.toml"), b.path());
    }
    for file in ["sweep.csv", "equilibrium.csv", "confidence.csv"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{file}");
    }
}
