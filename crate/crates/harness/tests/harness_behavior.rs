use std::path::PathBuf;
use std::str::FromStr;

use macopt::TraceRecord;
use macopt_harness::{
    aggregate, read_summary_csv, read_trials_json, render_convergence_plot, run_matrix,
    run_trial, write_summary_csv, write_trials_json, ExperimentPlan, HarnessError, Method,
    SummaryRow, TrialRecord,
};

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("macopt-harness-test-{}-{name}", std::process::id()));
    p
}

fn small_plan() -> ExperimentPlan {
    ExperimentPlan {
        functions: vec!["f2".to_string(), "f18".to_string()],
        methods: vec![Method::Mac, Method::NelderMead],
        seeds: vec![1, 2, 3],
        budget: 400,
        output_dir: temp_path("out"),
    }
}

fn strip_wall_time(records: &[TrialRecord]) -> Vec<TrialRecord> {
    records
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.wall_time_seconds = 0.0;
            r
        })
        .collect()
}

#[test]
fn method_parsing_accepts_aliases() {
    assert_eq!(Method::from_str("MAC").unwrap(), Method::Mac);
    assert_eq!(Method::from_str("nelder-mead").unwrap(), Method::NelderMead);
    assert_eq!(Method::from_str("simplex").unwrap(), Method::NelderMead);
    assert_eq!(Method::from_str("ps").unwrap(), Method::PatternSearch);
    assert_eq!(Method::from_str("sa").unwrap(), Method::SimulatedAnnealing);
    assert_eq!(Method::from_str("pso").unwrap(), Method::ParticleSwarm);
    assert!(Method::from_str("gradient-descent").is_err());
}

#[test]
fn matrix_has_full_cardinality_and_replays() {
    let plan = small_plan();
    let records = run_matrix(&plan).unwrap();
    assert_eq!(records.len(), 2 * 2 * 3);
    for r in &records {
        assert!(r.evaluations <= plan.budget);
    }
    let again = run_matrix(&plan).unwrap();
    assert_eq!(strip_wall_time(&records), strip_wall_time(&again));
}

#[test]
fn matrix_output_is_independent_of_concurrency() {
    let plan = small_plan();
    let run_with_threads = |n: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| run_matrix(&plan).unwrap())
    };
    let serial = run_with_threads(1);
    let parallel = run_with_threads(4);
    assert_eq!(strip_wall_time(&serial), strip_wall_time(&parallel));
}

#[test]
fn matrix_rejects_unknown_function_before_running() {
    let mut plan = small_plan();
    plan.functions.push("f99".to_string());
    assert!(matches!(
        run_matrix(&plan),
        Err(HarnessError::InvalidPlan(_))
    ));
}

#[test]
fn matrix_rejects_duplicate_seeds_and_empty_lists() {
    let mut plan = small_plan();
    plan.seeds = vec![1, 1];
    assert!(run_matrix(&plan).is_err());
    let mut plan = small_plan();
    plan.methods.clear();
    assert!(run_matrix(&plan).is_err());
}

#[test]
fn trial_on_sphere_reaches_spec_target() {
    let r = run_trial("f7", Method::Mac, 1, 10_000);
    assert!(!r.failed());
    assert!(r.best_value <= 1e-2, "best {}", r.best_value);
    assert!(r.evaluations <= 10_000);
}

#[test]
fn trial_replays_identically_modulo_wall_time() {
    let a = run_trial("f2", Method::Mac, 7, 2000);
    let b = run_trial("f2", Method::Mac, 7, 2000);
    assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
    assert_eq!(a.evaluations, b.evaluations);
    assert_eq!(a.trace, b.trace);
}

#[test]
fn zero_budget_is_a_failed_trial_with_no_evaluations() {
    let r = run_trial("f7", Method::Mac, 1, 0);
    assert!(r.failed());
    assert_eq!(r.evaluations, 0);
    assert_eq!(r.termination, "failed");
    assert!(r.error.is_some());
}

#[test]
fn aggregate_examples() {
    let rec = |f: &str, m: Method, seed: u64, best: f64| TrialRecord {
        function: f.to_string(),
        method: m,
        seed,
        best_value: best,
        evaluations: 100,
        wall_time_seconds: 0.5,
        termination: "max_evaluations".to_string(),
        error: None,
        trace: Vec::new(),
    };

    let rows = aggregate(&[
        rec("f7", Method::Mac, 1, 3.0),
        rec("f7", Method::Mac, 2, 1.0),
        rec("f7", Method::Mac, 3, 2.0),
    ])
    .unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].best, 1.0);
    assert_eq!(rows[0].median, 2.0);

    let rows = aggregate(&[rec("f7", Method::Mac, 1, 4.5)]).unwrap();
    assert_eq!(rows[0].best, 4.5);
    assert_eq!(rows[0].median, 4.5);

    // lower-median convention for even counts
    let rows = aggregate(&[
        rec("f7", Method::Mac, 1, 1.0),
        rec("f7", Method::Mac, 2, 2.0),
        rec("f7", Method::Mac, 3, 3.0),
        rec("f7", Method::Mac, 4, 4.0),
    ])
    .unwrap();
    assert_eq!(rows[0].median, 2.0);

    assert!(matches!(aggregate(&[]), Err(HarnessError::EmptyInput(_))));
}

#[test]
fn aggregate_best_matches_brute_force_oracle() {
    let plan = small_plan();
    let records = run_matrix(&plan).unwrap();
    let rows = aggregate(&records).unwrap();
    for row in &rows {
        let brute = records
            .iter()
            .filter(|r| r.function == row.function && r.method == row.method)
            .map(|r| r.best_value)
            .filter(|v| v.is_finite())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(row.best.to_bits(), brute.to_bits());
    }
}

#[test]
fn aggregate_flags_nan_groups_as_failed() {
    let rows = aggregate(&[TrialRecord {
        function: "f7".to_string(),
        method: Method::Mac,
        seed: 1,
        best_value: f64::NAN,
        evaluations: 0,
        wall_time_seconds: 0.0,
        termination: "failed".to_string(),
        error: Some("boom".to_string()),
        trace: Vec::new(),
    }])
    .unwrap();
    assert!(rows[0].best.is_nan());
    assert!(!rows[0].success);
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let rows = vec![
        SummaryRow {
            function: "f7".to_string(),
            method: Method::Mac,
            best: 2.2250738585072014e-308,
            median: 0.1 + 0.2,
            median_evals: 5431,
            median_time_seconds: 1.5,
            success: true,
        },
        SummaryRow {
            function: "f9".to_string(),
            method: Method::SimulatedAnnealing,
            best: f64::NAN,
            median: f64::NAN,
            median_evals: 0,
            median_time_seconds: 0.0,
            success: false,
        },
    ];
    let path = temp_path("roundtrip.csv");
    write_summary_csv(&rows, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("function,method,best,median,median_evals,median_time_s,success\n"));
    assert!(text.contains("nan"));
    let back = read_summary_csv(&path).unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in rows.iter().zip(&back) {
        assert_eq!(a.function, b.function);
        assert_eq!(a.method, b.method);
        assert_eq!(a.best.to_bits(), b.best.to_bits());
        assert_eq!(a.median.to_bits(), b.median.to_bits());
        assert_eq!(a.median_evals, b.median_evals);
        assert_eq!(a.median_time_seconds.to_bits(), b.median_time_seconds.to_bits());
        assert_eq!(a.success, b.success);
    }
    std::fs::remove_file(&path).ok();
}

#[test]
fn header_only_csv_for_no_rows() {
    let path = temp_path("empty.csv");
    write_summary_csv(&[], &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        text,
        "function,method,best,median,median_evals,median_time_s,success\n"
    );
    assert_eq!(read_summary_csv(&path).unwrap().len(), 0);
    std::fs::remove_file(&path).ok();
}

#[test]
fn trials_json_round_trips_including_nan_and_traces() {
    let records = vec![
        run_trial("f2", Method::Mac, 1, 500),
        run_trial("f2", Method::Mac, 2, 0),
    ];
    assert!(!records[0].trace.is_empty());
    assert!(records[1].failed());
    let path = temp_path("trials.json");
    write_trials_json(&records, &path).unwrap();
    let back = read_trials_json(&path).unwrap();
    assert_eq!(back.len(), 2);
    assert_eq!(back[0], records[0]);
    assert!(back[1].failed());
    std::fs::remove_file(&path).ok();
}

#[test]
fn plot_contains_polylines_and_legend() {
    let mk_trace = |scale: f64| -> Vec<TraceRecord> {
        (1..=40)
            .map(|n| TraceRecord {
                iteration: n,
                archive_size: n * 10,
                gamma: 0.0,
                eval_count: n * 10,
                best_value: scale / n as f64,
                mean: vec![0.0],
                cov_frobenius: 1.0,
            })
            .collect()
    };
    let a = mk_trace(10.0);
    let b = mk_trace(3.0);
    let series = vec![
        ("mac".to_string(), a.as_slice()),
        ("pso".to_string(), b.as_slice()),
    ];
    let path = temp_path("plot.svg");
    render_convergence_plot(&series, &path).unwrap();
    let svg = std::fs::read_to_string(&path).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains("legend"));
    assert!(svg.contains("mac") && svg.contains("pso"));
    assert!(svg.contains("(log)"), "all-positive values plot on a log axis");
    std::fs::remove_file(&path).ok();
}

#[test]
fn plot_falls_back_to_linear_when_values_touch_zero() {
    let mut trace = vec![TraceRecord {
        iteration: 1,
        archive_size: 5,
        gamma: 0.0,
        eval_count: 5,
        best_value: 2.0,
        mean: vec![0.0],
        cov_frobenius: 1.0,
    }];
    trace.push(TraceRecord {
        best_value: 0.0,
        eval_count: 10,
        iteration: 2,
        ..trace[0].clone()
    });
    let series = vec![("mac".to_string(), trace.as_slice())];
    let path = temp_path("plot_linear.svg");
    render_convergence_plot(&series, &path).unwrap();
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(!svg.contains("(log)"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn plot_rejects_empty_input_without_writing() {
    let path = temp_path("no_plot.svg");
    let err = render_convergence_plot(&[], &path);
    assert!(matches!(err, Err(HarnessError::EmptyInput(_))));
    assert!(!path.exists());
}

#[test]
fn long_traces_are_thinned() {
    let trace: Vec<TraceRecord> = (1..=2000)
        .map(|n| TraceRecord {
            iteration: n,
            archive_size: n,
            gamma: 0.0,
            eval_count: n,
            best_value: 1.0 / n as f64,
            mean: vec![0.0],
            cov_frobenius: 1.0,
        })
        .collect();
    let series = vec![("mac".to_string(), trace.as_slice())];
    let path = temp_path("thin.svg");
    render_convergence_plot(&series, &path).unwrap();
    let svg = std::fs::read_to_string(&path).unwrap();
    let polyline = svg
        .lines()
        .find(|l| l.starts_with("<polyline"))
        .expect("one polyline");
    assert!(polyline.matches(',').count() <= 501);
    std::fs::remove_file(&path).ok();
}
