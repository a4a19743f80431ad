//! End-to-end tests driving the built binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fifogap(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fifogap"))
        .args(args)
        .current_dir(dir)
        .env_remove("FIFOGAP_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL_CONFIG: &str = "\
distribution = exponential(2.5)
distribution = pareto(0.5)
n_transactions = 80
block_sizes = 10, 40, 160
trials_per_size = 6
master_seed = 11
output = sweep.csv
";

#[test]
fn pack_reports_all_objectives() {
    let dir = TempDir::new().unwrap();
    let instance = write(dir.path(), "inst.txt", "5 0 3 4\n6 3\n4 4\n");
    let out = fifogap(&["pack", &instance], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("relaxation: objective=8 fractional_index=1 fractional_value=0.5"));
    assert!(text.contains("greedy: objective=6"));
    assert!(text.contains("fifo: objective=6"));
    assert!(text.contains("exact: objective=6"));
    assert!(text.contains("gap_bounds:"));
}

#[test]
fn pack_json_matches_text_values() {
    let dir = TempDir::new().unwrap();
    let instance = write(dir.path(), "inst.txt", "5 0 3 4\n6 3\n4 4\n");
    let out = fifogap(&["pack", &instance, "--json"], dir.path());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["relaxation"]["objective"], 8.0);
    assert_eq!(v["greedy"]["objective"], 6.0);
    assert_eq!(v["exact"]["objective"], 6.0);
    assert_eq!(v["certificate"]["m"], 1);
}

#[test]
fn pack_empty_instance_succeeds_with_zero_report() {
    let dir = TempDir::new().unwrap();
    let instance = write(dir.path(), "empty.txt", "5 0 1 4\n");
    let out = fifogap(&["pack", &instance], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("greedy: objective=0"));
    assert!(text.contains("fifo: objective=0"));
}

#[test]
fn pack_malformed_file_exits_2_without_partial_output() {
    let dir = TempDir::new().unwrap();
    let instance = write(dir.path(), "bad.txt", "5 0 1 4\n6 oops\n");
    let out = fifogap(&["pack", &instance], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn sweep_writes_expected_rows_and_summaries() {
    let dir = TempDir::new().unwrap();
    let config = write(dir.path(), "sweep.conf", SMALL_CONFIG);
    let out = fifogap(&["sweep", &config], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    // header + 2 distributions x 3 block sizes x 6 trials
    assert_eq!(csv.lines().count(), 1 + 2 * 3 * 6);
    let text = stdout(&out);
    assert!(text.contains("exponential(2.5) block 10:"));
    assert!(text.contains("pareto(0.5) block 160:"));
}

#[test]
fn sweep_is_byte_identical_across_thread_counts_and_runs() {
    let dir = TempDir::new().unwrap();
    let config = write(dir.path(), "sweep.conf", SMALL_CONFIG);
    let mut outputs = Vec::new();
    for (name, threads) in [("a.csv", "1"), ("b.csv", "8"), ("c.csv", "1")] {
        let out = fifogap(
            &["sweep", &config, "--threads", threads, "--out", name],
            dir.path(),
        );
        assert!(out.status.success());
        outputs.push(fs::read(dir.path().join(name)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn sweep_seed_flag_changes_the_records() {
    let dir = TempDir::new().unwrap();
    let config = write(dir.path(), "sweep.conf", SMALL_CONFIG);
    let run = |args: &[&str]| {
        let out = fifogap(args, dir.path());
        assert!(out.status.success());
    };
    run(&["sweep", &config, "--out", "s11.csv"]);
    run(&["sweep", &config, "--seed", "12", "--out", "s12.csv"]);
    let a = fs::read(dir.path().join("s11.csv")).unwrap();
    let b = fs::read(dir.path().join("s12.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn sweep_env_var_sets_threads() {
    let dir = TempDir::new().unwrap();
    let config = write(dir.path(), "sweep.conf", SMALL_CONFIG);
    let out = Command::new(env!("CARGO_BIN_EXE_fifogap"))
        .args(["sweep", &config, "--out", "env.csv"])
        .current_dir(dir.path())
        .env("FIFOGAP_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let baseline = fifogap(&["sweep", &config, "--threads", "1", "--out", "flag.csv"], dir.path());
    assert!(baseline.status.success());
    assert_eq!(
        fs::read(dir.path().join("env.csv")).unwrap(),
        fs::read(dir.path().join("flag.csv")).unwrap()
    );
}

#[test]
fn sweep_rejects_empty_block_sizes() {
    let dir = TempDir::new().unwrap();
    let config = write(
        dir.path(),
        "bad.conf",
        "distribution = exponential(2.5)\nblock_sizes =\n",
    );
    let out = fifogap(&["sweep", &config], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_unwritable_output_exits_3() {
    let dir = TempDir::new().unwrap();
    let config = write(dir.path(), "sweep.conf", SMALL_CONFIG);
    let out = fifogap(
        &["sweep", &config, "--out", "missing-dir/sweep.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn plot_emits_one_svg_per_distribution() {
    let dir = TempDir::new().unwrap();
    let config = write(dir.path(), "sweep.conf", SMALL_CONFIG);
    assert!(fifogap(&["sweep", &config], dir.path()).status.success());
    let out = fifogap(&["plot", "sweep.csv", "--out", "figs"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let exp = fs::read_to_string(dir.path().join("figs/gap-exponential-2.5.svg")).unwrap();
    let par = fs::read_to_string(dir.path().join("figs/gap-pareto-0.5.svg")).unwrap();
    assert!(exp.starts_with("<svg"));
    assert!(par.contains("pareto(0.5)"));
}

#[test]
fn plot_rejects_header_only_csv() {
    let dir = TempDir::new().unwrap();
    let csv = write(
        dir.path(),
        "empty.csv",
        "distribution,block_size,trial,sub_seed,n,p0,r_star,p_fifo,p_star,k_bar,m,gap_lower,ratio_lb,ratio_ub,bound_ratio,condition_holds\n",
    );
    let out = fifogap(&["plot", &csv], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no data rows"));
}

#[test]
fn plot_rejects_wrong_schema() {
    let dir = TempDir::new().unwrap();
    let csv = write(dir.path(), "wrong.csv", "foo,bar\n1,2\n");
    let out = fifogap(&["plot", &csv], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
