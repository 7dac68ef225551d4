use std::path::PathBuf;
use std::process::{Command, Output};

fn macopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macopt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn temp_dir(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("macopt-cli-test-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&p).unwrap();
    p
}

#[test]
fn list_prints_all_eighteen_rows() {
    let out = macopt(&["list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for id in (1..=18).map(|i| format!("f{i}")) {
        assert!(text.contains(&id), "missing {id}");
    }
    assert_eq!(text.lines().count(), 19); // header + 18 rows
}

#[test]
fn list_json_is_a_valid_catalog() {
    let out = macopt(&["list", "--json"]);
    assert!(out.status.success());
    let items: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let items = items.as_array().unwrap();
    assert_eq!(items.len(), 18);
    assert_eq!(items[6]["id"], "f7");
    assert_eq!(items[6]["dimension"], 20);
}

#[test]
fn unknown_flag_exits_2() {
    let out = macopt(&["list", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_0() {
    for sub in ["list", "run", "bench", "plot"] {
        let out = macopt(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub} --help");
    }
}

#[test]
fn run_prints_finite_best_and_replays() {
    let args = ["run", "--fn", "f2", "--method", "mac", "--seed", "1", "--budget", "2k"];
    let a = macopt(&args);
    assert_eq!(a.status.code(), Some(0));
    let text = stdout(&a);
    assert!(text.contains("best value:"));
    assert!(text.contains("evaluations:"));
    assert!(text.contains("termination:"));
    assert!(!text.contains("nan"));
    let b = macopt(&args);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn run_unknown_function_exits_2_with_hint() {
    let out = macopt(&["run", "--fn", "f99", "--method", "mac"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("f1..f18"), "stderr: {err}");
}

#[test]
fn run_unknown_method_exits_2() {
    let out = macopt(&["run", "--fn", "f7", "--method", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_trace_json() {
    let dir = temp_dir("trace");
    let trace = dir.join("trace.json");
    let out = macopt(&[
        "run", "--fn", "f18", "--method", "mac", "--seed", "3", "--budget", "500",
        "--trace", trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(!parsed.as_array().unwrap().is_empty());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn run_supports_bounded_ambient() {
    let out = macopt(&[
        "run", "--fn", "f18", "--method", "mac", "--seed", "1", "--budget", "500",
        "--ambient", "truncated:0.16",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let bad = macopt(&[
        "run", "--fn", "f18", "--method", "mac", "--budget", "500", "--ambient", "truncated:0.5",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn bench_writes_csv_and_json_and_mirrors_config_file() {
    let dir = temp_dir("bench");
    let out_flag = dir.join("by-flags");
    let out = macopt(&[
        "bench", "--fns", "f2,f18", "--methods", "mac", "--seeds", "1..3",
        "--budget", "300", "--out", out_flag.to_str().unwrap(), "--jobs", "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_flag.join("summary.csv")).unwrap();
    assert!(csv.starts_with("function,method,best,median,median_evals,median_time_s,success\n"));
    assert_eq!(csv.lines().count(), 3); // header + 2 summary rows
    assert!(out_flag.join("trials.json").exists());

    // A config file with the same keys produces the same summary (modulo
    // wall-time, which is hardware noise).
    let out_cfg = dir.join("by-config");
    let config = dir.join("bench.toml");
    std::fs::write(
        &config,
        format!(
            "functions = \"f2,f18\"\nmethods = \"mac\"\nseeds = \"1..3\"\nbudget = 300\nout = \"{}\"\njobs = 2\n",
            out_cfg.display()
        ),
    )
    .unwrap();
    let out2 = macopt(&["bench", "--config", config.to_str().unwrap()]);
    assert_eq!(out2.status.code(), Some(0));
    let csv2 = std::fs::read_to_string(out_cfg.join("summary.csv")).unwrap();
    let strip_time = |text: &str| -> Vec<String> {
        text.lines()
            .map(|l| {
                let mut fields: Vec<&str> = l.split(',').collect();
                if fields.len() == 7 {
                    fields.remove(5);
                }
                fields.join(",")
            })
            .collect()
    };
    assert_eq!(strip_time(&csv), strip_time(&csv2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bench_with_empty_method_list_exits_2() {
    let out = macopt(&["bench", "--fns", "f2", "--methods", "", "--seeds", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_survives_failed_trials() {
    // budget 0 makes every trial fail; the bench still exits 0 and the
    // failures are visible in the summary.
    let dir = temp_dir("bench-fail");
    let out = macopt(&[
        "bench", "--fns", "f2", "--methods", "mac", "--seeds", "1,2",
        "--budget", "0", "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("summary.csv")).unwrap();
    assert!(csv.contains("nan"));
    assert!(csv.contains("false"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn plot_renders_one_svg_per_function() {
    let dir = temp_dir("plot");
    let out = macopt(&[
        "bench", "--fns", "f2,f18", "--methods", "mac,pso", "--seeds", "1,2",
        "--budget", "300", "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let results = dir.join("trials.json");
    let out = macopt(&["plot", "--results", results.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for id in ["f2", "f18"] {
        let svg = std::fs::read_to_string(dir.join(format!("{id}.svg"))).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2, "{id} has 2 methods");
        assert!(svg.contains("legend"));
    }

    // filtered plot: exactly one svg in a fresh directory
    let only = dir.join("only");
    let out = macopt(&[
        "plot", "--results", results.to_str().unwrap(),
        "--out", only.to_str().unwrap(), "--functions", "f2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(only.join("f2.svg").exists());
    assert!(!only.join("f18.svg").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn plot_missing_results_exits_1() {
    let out = macopt(&["plot", "--results", "/nonexistent/trials.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn plot_corrupt_results_exits_1() {
    let dir = temp_dir("corrupt");
    let path = dir.join("trials.json");
    std::fs::write(&path, "not json at all").unwrap();
    let out = macopt(&["plot", "--results", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}
