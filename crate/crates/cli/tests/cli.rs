use std::path::{Path, PathBuf};
use std::process::Command;

use fedpnn_core::dataset::PartitionPlan;

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn data() -> String {
    repo().join("data/breast_cancer_wisconsin.csv").display().to_string()
}

fn fedpnn(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fedpnn")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_report_with_two_clients_and_server() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/report.txt");
    let config = repo().join("configs/breast_cancer.toml");
    let (code, stdout, stderr) = fedpnn(&["run", "--config", path(&config), "--out", path(&out)]);
    assert_eq!(code, 0, "{stderr}");
    let report = std::fs::read_to_string(&out).unwrap();
    assert_eq!(report, stdout);
    let rows: Vec<&str> = report.lines().skip_while(|l| *l != "[results]").skip(2).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("client_0") && rows[1].starts_with("client_1") && rows[2].starts_with("server"));
    assert!(report.contains("messages = 4"));
}

#[test]
fn rerun_gives_identical_bytes_and_seed_matters() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let (code, _, err) = fedpnn(&["run", "--input", &data(), "--label-col", "class", "--seed", seed, "--out", path(&out)]);
        assert_eq!(code, 0, "{err}");
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a", "3"), run("b", "3"));
    assert_ne!(run("c", "3"), run("d", "4"));
}

#[test]
fn validation_errors_exit_with_one() {
    let (code, _, err) = fedpnn(&["run", "--input", &data(), "--clients", "0"]);
    assert_eq!(code, 1);
    assert!(err.contains("num_clients"), "{err}");
    assert_eq!(fedpnn(&["run", "--input", &data(), "--server-dthr", "1.5"]).0, 1);
    assert_eq!(fedpnn(&["run"]).0, 1);
    assert_eq!(fedpnn(&["run", "--input", &data(), "--clients", "two"]).0, 1);
    assert_eq!(fedpnn(&["frobnicate"]).0, 1);
    assert_eq!(fedpnn(&["--help"]).0, 0);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "input = \"x.csv\"\n[federation]\nnum_clients = 0\n").unwrap();
    assert_eq!(fedpnn(&["run", "--config", path(&cfg)]).0, 1);
    std::fs::write(&cfg, "input = \"x.csv\"\nunknown_key = 3\n").unwrap();
    assert_eq!(fedpnn(&["run", "--config", path(&cfg)]).0, 1);
}

#[test]
fn data_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = fedpnn(&["run", "--input", path(&dir.path().join("missing.csv"))]);
    assert_eq!(code, 2, "{err}");
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b,class\n1,x,0\n").unwrap();
    let (code, _, err) = fedpnn(&["run", "--input", path(&bad)]);
    assert_eq!(code, 2);
    assert!(err.contains("row 1"), "{err}");
    let tiny = dir.path().join("tiny.csv");
    std::fs::write(&tiny, "a,class\n1,0\n2,1\n3,0\n").unwrap();
    assert_eq!(fedpnn(&["run", "--input", path(&tiny)]).0, 2);
}

#[test]
fn eval_synth_identities() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("quality.txt");
    let (code, _, err) = fedpnn(&["eval-synth", "--real", &data(), "--synth", &data(), "--out", path(&out)]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("mean_ks_complement = 1.000000"), "{text}");
    assert!(text.contains("mean_cs_test       = 1.000000"), "{text}");

    let original = std::fs::read_to_string(data()).unwrap();
    let mut lines: Vec<&str> = original.lines().collect();
    lines[1..].reverse();
    lines[1..].rotate_left(100);
    let permuted = dir.path().join("permuted.csv");
    std::fs::write(&permuted, lines.join("\n") + "\n").unwrap();
    let (code, stdout, _) = fedpnn(&["eval-synth", "--real", &data(), "--synth", path(&permuted)]);
    assert_eq!(code, 0);
    assert!(stdout.contains("mean_ks_complement = 1.000000"), "{stdout}");
}

#[test]
fn eval_synth_names_mismatched_column() {
    let dir = tempfile::tempdir().unwrap();
    let real = dir.path().join("real.csv");
    let synth = dir.path().join("synth.csv");
    std::fs::write(&real, "alpha,beta,class\n1,2,0\n2,3,1\n3,1,0\n").unwrap();
    std::fs::write(&synth, "alpha,gamma,class\n1,2,0\n2,3,1\n3,1,0\n").unwrap();
    let (code, _, err) = fedpnn(&["eval-synth", "--real", path(&real), "--synth", path(&synth)]);
    assert_eq!(code, 2);
    assert!(err.contains("beta"), "{err}");
}

#[test]
fn partition_writes_manifest_and_shards() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &Path| {
        let (code, _, err) = fedpnn(&["partition", "--input", &data(), "--clients", "3", "--seed", "5", "--out", path(out)]);
        assert_eq!(code, 0, "{err}");
        std::fs::read_to_string(out.join("manifest.txt")).unwrap()
    };
    let manifest = run(&dir.path().join("a"));
    assert_eq!(manifest, run(&dir.path().join("b")));
    let plan = PartitionPlan::from_manifest(&manifest).unwrap();
    assert_eq!(plan.server_rows.len(), 70);
    assert_eq!(plan.b_percent, 10.0);
    let mut all: Vec<usize> = plan.server_rows.clone();
    for (k, rows) in plan.client_rows.iter().enumerate() {
        let csv = std::fs::read_to_string(dir.path().join(format!("a/client_{k}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), rows.len() + 1);
        all.extend(rows);
    }
    all.sort_unstable();
    assert_eq!(all, (0..699).collect::<Vec<_>>());
    let server = std::fs::read_to_string(dir.path().join("a/server.csv")).unwrap();
    assert_eq!(server.lines().count(), 71);

    let single = dir.path().join("single");
    let (code, _, _) = fedpnn(&["partition", "--input", &data(), "--clients", "1", "--out", path(&single)]);
    assert_eq!(code, 0);
    let plan = PartitionPlan::from_manifest(&std::fs::read_to_string(single.join("manifest.txt")).unwrap()).unwrap();
    assert_eq!(plan.client_rows.len(), 1);
    assert_eq!(plan.client_rows[0].len(), 629);
    assert_eq!(fedpnn(&["partition", "--input", &data(), "--clients", "0", "--out", path(&single)]).0, 1);
}

#[test]
fn sweep_grid_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let plots = dir.path().join("plots");
    let (code, _, err) = fedpnn(&[
        "sweep", "--input", &data(), "--label-col", "class", "--sweep-axis", "server-dthr", "--sweep-start", "0.05",
        "--sweep-stop", "0.25", "--sweep-step", "0.02", "--out", path(&csv), "--plot-dir", path(&plots),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(fedpnn_cli::sweep::CSV_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 11 * 3);
    let values: Vec<&str> = rows.iter().filter(|r| r[1] == "server").map(|r| r[0]).collect();
    assert_eq!(values.len(), 11);
    assert_eq!(values[0], "0.05");
    assert_eq!(values[10], "0.25");
    // local results do not depend on the server threshold
    let local = |r: &Vec<&str>| (r[2].to_string(), r[4].to_string(), r[5].to_string());
    let clients: Vec<_> = rows.iter().filter(|r| r[1] == "client_0").map(local).collect();
    assert!(clients.iter().all(|c| *c == clients[0]));
    for name in ["auc.svg", "centers.svg"] {
        let svg = std::fs::read_to_string(plots.join(name)).unwrap();
        assert!(svg.starts_with("<svg"));
    }

    let (code, _, _) = fedpnn(&[
        "sweep", "--input", &data(), "--sweep-axis", "sigma", "--sweep-start", "0.3", "--sweep-stop", "0.1",
        "--sweep-step", "0.1", "--out", path(&csv),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn in_process_entry_point_matches_binary() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = fedpnn_cli::run(["fedpnn", "run", "--input", &data(), "--seed", "2"], &mut out, &mut err);
    assert_eq!(code, 0);
    let (_, stdout, _) = fedpnn(&["run", "--input", &data(), "--seed", "2"]);
    assert_eq!(String::from_utf8(out).unwrap(), stdout);
}
