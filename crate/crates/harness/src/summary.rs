//! Aggregation across seeds and the fixed-schema summary CSV.

use std::path::Path;

use serde::{Deserialize, Serialize};

use macopt::benchfns::make_function;

use crate::trial::{Method, TrialRecord};
use crate::{io_err, HarnessError};

pub const CSV_HEADER: &str = "function,method,best,median,median_evals,median_time_s,success";

/// Per-(function, method) aggregate over seeds. Medians use the lower-median
/// convention for even counts; best and median are taken over finite values
/// only, so failed trials degrade the row instead of poisoning it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub function: String,
    pub method: Method,
    pub best: f64,
    pub median: f64,
    pub median_evals: usize,
    pub median_time_seconds: f64,
    pub success: bool,
}

fn lower_median<T: Copy + PartialOrd>(values: &mut [T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("comparable values"));
    Some(values[(values.len() - 1) / 2])
}

/// Collapses trial records into one row per (function, method), in first
/// appearance order.
pub fn aggregate(records: &[TrialRecord]) -> Result<Vec<SummaryRow>, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::EmptyInput("no trial records to aggregate"));
    }
    let mut groups: Vec<(String, Method, Vec<&TrialRecord>)> = Vec::new();
    for record in records {
        match groups
            .iter_mut()
            .find(|(f, m, _)| *f == record.function && *m == record.method)
        {
            Some((_, _, members)) => members.push(record),
            None => groups.push((record.function.clone(), record.method, vec![record])),
        }
    }

    let mut rows = Vec::with_capacity(groups.len());
    for (function, method, members) in groups {
        let mut finite: Vec<f64> = members
            .iter()
            .map(|r| r.best_value)
            .filter(|v| v.is_finite())
            .collect();
        let best = finite.iter().copied().fold(f64::INFINITY, f64::min);
        let best = if finite.is_empty() { f64::NAN } else { best };
        let median = lower_median(&mut finite).unwrap_or(f64::NAN);
        let mut evals: Vec<usize> = members.iter().map(|r| r.evaluations).collect();
        let median_evals = lower_median(&mut evals).expect("group is non-empty");
        let mut times: Vec<f64> = members.iter().map(|r| r.wall_time_seconds).collect();
        let median_time_seconds = lower_median(&mut times).expect("group is non-empty");

        let success = match make_function(&function)
            .ok()
            .and_then(|f| f.known_min_value)
        {
            Some(known) => best.is_finite() && (best - known).abs() <= 1e-3 * (1.0 + known.abs()),
            None => false,
        };

        rows.push(SummaryRow {
            function,
            method,
            best,
            median,
            median_evals,
            median_time_seconds,
            success,
        });
    }
    Ok(rows)
}

/// 17 significant digits: enough for bit-exact f64 round-trips.
fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn parse_float(s: &str) -> Option<f64> {
    if s == "nan" {
        Some(f64::NAN)
    } else {
        s.parse().ok()
    }
}

pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.function,
            row.method,
            fmt_float(row.best),
            fmt_float(row.median),
            row.median_evals,
            fmt_float(row.median_time_seconds),
            row.success
        ));
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>, HarnessError> {
    let raw = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let parse = |line: usize, message: &str| HarnessError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.to_string(),
    };
    let mut lines = raw.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        _ => return Err(parse(1, "missing or malformed header")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(parse(idx + 1, "expected 7 fields"));
        }
        rows.push(SummaryRow {
            function: fields[0].to_string(),
            method: fields[1]
                .parse()
                .map_err(|_| parse(idx + 1, "bad method"))?,
            best: parse_float(fields[2]).ok_or_else(|| parse(idx + 1, "bad best"))?,
            median: parse_float(fields[3]).ok_or_else(|| parse(idx + 1, "bad median"))?,
            median_evals: fields[4]
                .parse()
                .map_err(|_| parse(idx + 1, "bad median_evals"))?,
            median_time_seconds: parse_float(fields[5])
                .ok_or_else(|| parse(idx + 1, "bad median_time_s"))?,
            success: fields[6]
                .parse()
                .map_err(|_| parse(idx + 1, "bad success flag"))?,
        });
    }
    Ok(rows)
}
