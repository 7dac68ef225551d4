//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use macopt::baselines::{
    nelder_mead, particle_swarm, pattern_search, simulated_annealing, NelderMeadParams,
    ParticleSwarmParams, PatternSearchParams, SimulatedAnnealingParams,
};
use macopt::benchfns::{list_functions, make_function, ObjectiveFunction};
use macopt::{mac_optimize, AmbientKind, MacConfig, RunResult};
use macopt_harness::{
    aggregate, read_trials_json, render_convergence_plot, run_matrix_with_progress,
    write_summary_csv, write_trials_json, ExperimentPlan, Method, SummaryRow,
};

use crate::args::{parse_budget, parse_seeds, BenchArgs, Cli, Command, ListArgs, PlotArgs, RunArgs};
use crate::CliError;

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::List(args) => cmd_list(args),
        Command::Run(args) => cmd_run(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Plot(args) => cmd_plot(args),
    }
}

fn lookup_function(id: &str) -> Result<ObjectiveFunction, CliError> {
    make_function(id).map_err(|e| CliError::usage(e.to_string()))
}

fn fmt_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6e}")
    } else {
        "nan".to_string()
    }
}

fn cmd_list(args: ListArgs) -> Result<(), CliError> {
    let catalog = list_functions();
    if args.json {
        let items: Vec<serde_json::Value> = catalog
            .iter()
            .map(|f| {
                serde_json::json!({
                    "id": f.id,
                    "name": f.name,
                    "dimension": f.dimension,
                    "lower": f.domain.lower(),
                    "upper": f.domain.upper(),
                    "known_min_value": f.known_min_value,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&items).expect("catalog serializes")
        );
        return Ok(());
    }
    println!(
        "{:<5} {:<18} {:>4}  {:<22} {:>12}",
        "id", "name", "dim", "domain", "known min"
    );
    for f in &catalog {
        let domain = format!(
            "[{}, {}]^{}",
            f.domain.lower()[0],
            f.domain.upper()[0],
            f.dimension
        );
        let known = f
            .known_min_value
            .map(|v| format!("{v:.5}"))
            .unwrap_or_else(|| "-".to_string());
        println!(
            "{:<5} {:<18} {:>4}  {:<22} {:>12}",
            f.id, f.name, f.dimension, domain, known
        );
    }
    Ok(())
}

fn parse_ambient(s: &str) -> Result<AmbientKind, CliError> {
    let raw = s.trim().to_ascii_lowercase();
    match raw.as_str() {
        "normal" | "standard-normal" | "gauss" => Ok(AmbientKind::StandardNormal),
        "ball" | "uniform-ball" => Ok(AmbientKind::UniformBallIdentity),
        other => {
            if let Some(t) = other.strip_prefix("truncated:") {
                let t: f64 = t.parse().map_err(|_| {
                    CliError::usage(format!("invalid truncated-ball support '{s}'"))
                })?;
                Ok(AmbientKind::TruncatedBall(t))
            } else {
                Err(CliError::usage(format!(
                    "unknown ambient '{s}' (normal | ball | truncated:<T>)"
                )))
            }
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let function = lookup_function(&args.function)?;
    let method = Method::from_str(&args.method).map_err(|e| CliError::usage(e.to_string()))?;
    let budget = parse_budget(&args.budget)?;
    if budget == 0 {
        return Err(CliError::usage("budget must be at least 1"));
    }

    let eval = function.evaluator();
    let objective = move |x: &[f64]| eval(x);
    let result: RunResult = match method {
        Method::Mac => {
            let mut config = MacConfig::new(function.domain.clone());
            config.seed = args.seed;
            config.max_evaluations = budget;
            if let Some(delta) = args.delta {
                config.delta = delta;
            }
            if let Some(gamma0) = args.gamma0 {
                config.gamma0 = gamma0;
            }
            if let Some(factor) = args.gamma_factor {
                config.gamma_factor = factor;
            }
            if let Some(n) = args.batch_growth {
                config.batch_growth = n;
            }
            if let Some(ambient) = &args.ambient {
                config.ambient = parse_ambient(ambient)?;
            }
            config
                .validate()
                .map_err(|e| CliError::usage(e.to_string()))?;
            mac_optimize(&config, objective, None)
        }
        Method::NelderMead => nelder_mead(
            objective,
            &function.domain,
            &NelderMeadParams::default(),
            budget,
            args.seed,
        ),
        Method::PatternSearch => pattern_search(
            objective,
            &function.domain,
            &PatternSearchParams::default(),
            budget,
            args.seed,
        ),
        Method::SimulatedAnnealing => simulated_annealing(
            objective,
            &function.domain,
            &SimulatedAnnealingParams::default(),
            budget,
            args.seed,
        ),
        Method::ParticleSwarm => particle_swarm(
            objective,
            &function.domain,
            &ParticleSwarmParams::default(),
            budget,
            args.seed,
        ),
    }
    .map_err(|e| CliError::runtime(e.to_string()))?;

    println!(
        "{} ({}, d={}) via {} [seed {}]",
        function.id, function.name, function.dimension, method, args.seed
    );
    println!("best value:  {}", fmt_value(result.best_value));
    println!("evaluations: {}", result.evaluations);
    println!("termination: {}", result.termination);

    if let Some(path) = &args.trace {
        let json = serde_json::to_string(&result.trace)
            .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
        std::fs::write(path, json)
            .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
        println!("trace:       {}", path.display());
    }
    Ok(())
}

/// TOML keys mirror the bench flags; CLI flags take precedence.
#[derive(Default)]
struct BenchFile {
    functions: Option<String>,
    methods: Option<String>,
    seeds: Option<String>,
    budget: Option<String>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
}

fn load_bench_file(path: &Path) -> Result<BenchFile, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
    let table: toml::Table = raw
        .parse()
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;

    let text_key = |key: &str| -> Result<Option<String>, CliError> {
        match table.get(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.clone())),
            Some(toml::Value::Integer(i)) => Ok(Some(i.to_string())),
            Some(toml::Value::Array(items)) => {
                let parts: Result<Vec<String>, CliError> = items
                    .iter()
                    .map(|v| match v {
                        toml::Value::String(s) => Ok(s.clone()),
                        toml::Value::Integer(i) => Ok(i.to_string()),
                        _ => Err(CliError::usage(format!(
                            "{}: key '{key}' must hold strings or integers",
                            path.display()
                        ))),
                    })
                    .collect();
                Ok(Some(parts?.join(",")))
            }
            Some(_) => Err(CliError::usage(format!(
                "{}: key '{key}' must be a string, integer, or array",
                path.display()
            ))),
        }
    };

    Ok(BenchFile {
        functions: text_key("functions")?.or(text_key("fns")?),
        methods: text_key("methods")?,
        seeds: text_key("seeds")?,
        budget: text_key("budget")?,
        out: text_key("out")?.map(PathBuf::from),
        jobs: match table.get("jobs") {
            None => None,
            Some(toml::Value::Integer(i)) if *i > 0 => Some(*i as usize),
            Some(_) => {
                return Err(CliError::usage(format!(
                    "{}: key 'jobs' must be a positive integer",
                    path.display()
                )))
            }
        },
    })
}

fn parse_function_list(spec: &str) -> Result<Vec<String>, CliError> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(list_functions().into_iter().map(|f| f.id).collect());
    }
    spec.split(',')
        .map(|part| lookup_function(part.trim()).map(|f| f.id))
        .collect()
}

fn parse_method_list(spec: &str) -> Result<Vec<Method>, CliError> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(Method::ALL.to_vec());
    }
    spec.split(',')
        .map(|part| Method::from_str(part.trim()).map_err(|e| CliError::usage(e.to_string())))
        .collect()
}

fn configure_pool(jobs: Option<usize>) -> Result<(), CliError> {
    let jobs = jobs.or_else(|| {
        std::env::var("MAC_BENCH_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(jobs) = jobs {
        if jobs == 0 {
            return Err(CliError::usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::runtime(format!("worker pool: {e}")))?;
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(path) => load_bench_file(path)?,
        None => BenchFile::default(),
    };

    let functions_spec = args
        .functions
        .or(file.functions)
        .ok_or_else(|| CliError::usage("no functions given (use --fns or a config file)"))?;
    let methods_spec = args
        .methods
        .or(file.methods)
        .ok_or_else(|| CliError::usage("no methods given (use --methods or a config file)"))?;
    if methods_spec.trim().is_empty() {
        return Err(CliError::usage("method list is empty"));
    }
    let seeds_spec = args.seeds.or(file.seeds).unwrap_or_else(|| "1..10".into());
    let budget_spec = args.budget.or(file.budget).unwrap_or_else(|| "10k".into());
    let out_dir = args
        .out
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from("results"));

    configure_pool(args.jobs.or(file.jobs))?;

    let plan = ExperimentPlan {
        functions: parse_function_list(&functions_spec)?,
        methods: parse_method_list(&methods_spec)?,
        seeds: parse_seeds(&seeds_spec)?,
        budget: parse_budget(&budget_spec)?,
        output_dir: out_dir.clone(),
    };

    println!(
        "bench: {} functions x {} methods x {} seeds, budget {} evals/trial",
        plan.functions.len(),
        plan.methods.len(),
        plan.seeds.len(),
        plan.budget
    );
    println!(
        "note: baseline optimizers are textbook implementations with documented defaults,\n\
         not ports of any proprietary toolbox."
    );

    let records = run_matrix_with_progress(&plan, |r| {
        println!(
            "  done {:<4} {:<20} seed {:>3}: best {} in {} evals ({})",
            r.function,
            r.method.to_string(),
            r.seed,
            fmt_value(r.best_value),
            r.evaluations,
            r.termination
        );
    })
    .map_err(|e| CliError::usage(e.to_string()))?;

    let rows = aggregate(&records).map_err(|e| CliError::runtime(e.to_string()))?;
    let csv_path = out_dir.join("summary.csv");
    let json_path = out_dir.join("trials.json");
    write_summary_csv(&rows, &csv_path).map_err(|e| CliError::runtime(e.to_string()))?;
    write_trials_json(&records, &json_path).map_err(|e| CliError::runtime(e.to_string()))?;

    println!();
    print_summary_table(&rows);
    println!();
    println!("wrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    Ok(())
}

fn print_summary_table(rows: &[SummaryRow]) {
    println!(
        "{:<5} {:<20} {:>13} {:>13} {:>8} {:>9} {:>8}",
        "fn", "method", "best", "median", "evals", "time_s", "success"
    );
    for row in rows {
        println!(
            "{:<5} {:<20} {:>13} {:>13} {:>8} {:>9.3} {:>8}",
            row.function,
            row.method.to_string(),
            fmt_value(row.best),
            fmt_value(row.median),
            row.median_evals,
            row.median_time_seconds,
            row.success
        );
    }
}

fn cmd_plot(args: PlotArgs) -> Result<(), CliError> {
    let records = read_trials_json(&args.results).map_err(|e| CliError::runtime(e.to_string()))?;
    if records.is_empty() {
        return Err(CliError::runtime(format!(
            "{}: no trial records",
            args.results.display()
        )));
    }
    let out_dir = args
        .out
        .clone()
        .or_else(|| args.results.parent().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));

    let filter: Option<Vec<String>> = match &args.functions {
        Some(spec) => Some(parse_function_list(spec)?),
        None => None,
    };

    let mut function_ids: Vec<String> = Vec::new();
    for r in &records {
        if !function_ids.contains(&r.function) {
            function_ids.push(r.function.clone());
        }
    }
    if let Some(filter) = &filter {
        function_ids.retain(|id| filter.contains(id));
    }
    if function_ids.is_empty() {
        return Err(CliError::runtime(
            "no matching functions in the results file".to_string(),
        ));
    }

    let mut written = 0usize;
    for id in &function_ids {
        // One representative trace per method: the lowest seed with a
        // non-empty trace keeps the choice deterministic.
        let mut series: Vec<(String, &[macopt::TraceRecord])> = Vec::new();
        for method in Method::ALL {
            let candidate = records
                .iter()
                .filter(|r| r.function == *id && r.method == method && !r.trace.is_empty())
                .min_by_key(|r| r.seed);
            if let Some(r) = candidate {
                series.push((method.to_string(), r.trace.as_slice()));
            }
        }
        if series.is_empty() {
            println!("skip {id}: no traces");
            continue;
        }
        let path = out_dir.join(format!("{id}.svg"));
        render_convergence_plot(&series, &path).map_err(|e| CliError::runtime(e.to_string()))?;
        println!("wrote {}", path.display());
        written += 1;
    }
    if written == 0 {
        return Err(CliError::runtime("no plots produced".to_string()));
    }
    Ok(())
}
