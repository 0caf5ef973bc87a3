use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
num_antennas = 2
users_per_zone = 1
schemes = ["ft", "conventional-dl"]
sweep_axis = "pmax_dbm"
sweep_values = [20.0, 30.0]
mc_runs = 2
base_seed = 7
threads = 1
"#;

fn ftbeam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftbeam")).args(args).output().expect("spawn ftbeam")
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("small.toml");
    fs::write(&path, SMALL).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn run_writes_one_record_per_job() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let csv = dir.path().join("runs.csv");
    let summary = dir.path().join("summary.csv");
    let out = ftbeam(&[
        "run", "--config", &cfg, "--out", csv.to_str().unwrap(), "--summary", summary.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("run_id,seed,scheme,"), "{header}");
    // 2 schemes x 2 sweep points x 2 draws
    assert_eq!(lines.count(), 8);
    assert_eq!(fs::read_to_string(&summary).unwrap().lines().count(), 1 + 4);
    assert!(stderr(&out).contains("feasible"));
}

#[test]
fn run_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let a = ftbeam(&["run", "--config", &cfg, "--threads", "1", "--format", "jsonl"]);
    let b = ftbeam(&["run", "--config", &cfg, "--threads", "2", "--format", "jsonl"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    for line in stdout(&a).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("seed").is_some());
    }
}

#[test]
fn seed_column_reproduces_a_single_solve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = ftbeam(&["run", "--config", &cfg, "--format", "jsonl", "--scheme", "ft"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let first: serde_json::Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    let seed = first["seed"].as_u64().unwrap().to_string();
    let pmax = first["pmax_dbm"].as_f64().unwrap().to_string();

    let solved = ftbeam(&["solve", "--config", &cfg, "--seed", &seed, "--pmax-dbm", &pmax]);
    assert!(solved.status.success(), "{}", stderr(&solved));
    let v: serde_json::Value = serde_json::from_str(&stdout(&solved)).unwrap();
    let st = v["sum_throughput_bits"].as_f64().unwrap();
    let recorded = first["sum_throughput_bits"].as_f64().unwrap();
    assert!((st - recorded).abs() <= 1e-9 * recorded.max(1.0), "{st} vs {recorded}");
}

#[test]
fn maxmin_and_baseline_print_solutions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    for args in [vec!["maxmin", "--config", &cfg], vec!["baseline", "--config", &cfg]] {
        let out = ftbeam(&args);
        assert!(out.status.success(), "{}", stderr(&out));
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["status"], "converged");
    }
    let out = ftbeam(&["baseline", "--config", &cfg]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["scheme"], "conventional-dl");
    assert!(v["tau"].is_null());
}

#[test]
fn noma_is_rejected_explicitly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let names = ftbeam(&["schemes"]);
    let unsupported: Vec<String> = stdout(&names)
        .lines()
        .filter(|l| l.contains("unsupported"))
        .map(|l| l.split_whitespace().next().unwrap().to_string())
        .collect();
    assert!(!unsupported.is_empty());
    for name in &unsupported {
        for args in [
            vec!["baseline", "--config", &cfg, "--scheme", name],
            vec!["run", "--config", &cfg, "--scheme", name],
        ] {
            let out = ftbeam(&args);
            assert!(!out.status.success());
            assert!(stderr(&out).to_lowercase().contains("unsupported"), "{}", stderr(&out));
        }
    }
    let out = ftbeam(&["solve", "--scheme", "no-such-scheme"]);
    assert!(!out.status.success());
}

#[test]
fn dump_subproblem_formats() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cbf = ftbeam(&["dump-subproblem", "--config", &cfg]);
    assert!(cbf.status.success(), "{}", stderr(&cbf));
    let text = stdout(&cbf);
    assert!(text.contains("VER\n3\n"), "{}", &text[..text.len().min(80)]);
    assert!(text.contains("OBJSENSE"));

    let json = ftbeam(&["dump-subproblem", "--config", &cfg, "--format", "json", "--scheme", "conventional-dl"]);
    assert!(json.status.success(), "{}", stderr(&json));
    let _: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
}

#[test]
fn bad_config_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "mc_runs = 0\nnot_a_key = 3\n").unwrap();
    let out = ftbeam(&["run", "--config", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(!stderr(&out).is_empty());
}
