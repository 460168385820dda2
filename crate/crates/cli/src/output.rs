//! CSV serialisation of traces and summaries.
//!
//! Numbers are written in `{:.16e}` form: seventeen significant digits, which
//! round-trips every finite `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};

/// Exact trace header.
pub const TRACE_HEADER: &str = "run_id,solver,k,error,omega";

/// Exact summary header.
pub const SUMMARY_HEADER: &str = "run_id,solver,T,steps,final_error,iters_to_threshold,iters_to_match_plain,stop_reason,range_a,range_b,range_source,sech_rho_bound,q_ci";

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn format_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One trace: `errors[k]` for `k = 0 … steps` and `omegas[k]` for the step
/// that produced `errors[k + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRows<'a> {
    pub run_id: usize,
    pub solver: &'a str,
    pub errors: &'a [f64],
    pub omegas: &'a [f64],
}

/// Appends rows for one run; `omega` is blank at `k = 0`.
pub fn append_trace(out: &mut String, rows: &TraceRows<'_>) {
    for (k, e) in rows.errors.iter().enumerate() {
        let omega = if k == 0 { String::new() } else { format_f64(rows.omegas[k - 1]) };
        let _ = writeln!(out, "{},{},{},{},{}", rows.run_id, rows.solver, k, format_f64(*e), omega);
    }
}

/// Renders a complete trace file.
pub fn render_trace_csv(runs: &[TraceRows<'_>]) -> String {
    let mut out = String::with_capacity(64 * runs.iter().map(|r| r.errors.len()).sum::<usize>() + 32);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in runs {
        append_trace(&mut out, r);
    }
    out
}

pub fn emit_trace_csv(runs: &[TraceRows<'_>], path: &Path) -> Result<()> {
    write_file(path, &render_trace_csv(runs))
}

/// A parsed trace row.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRow {
    pub run_id: usize,
    pub solver: String,
    pub k: usize,
    pub error: f64,
    pub omega: Option<f64>,
}

/// Parses a trace file produced by [`render_trace_csv`].
pub fn parse_trace_csv(text: &str) -> Result<Vec<ParsedRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(TRACE_HEADER) {
        return Err(CliError::Config("trace file has an unexpected header".into()));
    }
    let field_err = |line: usize, what: &str| CliError::Config(format!("trace line {line}: bad {what}"));
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(field_err(i + 2, "field count"));
            }
            Ok(ParsedRow {
                run_id: f[0].parse().map_err(|_| field_err(i + 2, "run_id"))?,
                solver: f[1].to_string(),
                k: f[2].parse().map_err(|_| field_err(i + 2, "k"))?,
                error: f[3].parse().map_err(|_| field_err(i + 2, "error"))?,
                omega: if f[4].is_empty() { None } else { Some(f[4].parse().map_err(|_| field_err(i + 2, "omega"))?) },
            })
        })
        .collect()
}

/// One summary line.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub run_id: usize,
    pub solver: String,
    pub period: Option<usize>,
    pub steps: usize,
    pub final_error: f64,
    pub iters_to_threshold: Option<usize>,
    pub iters_to_match_plain: Option<usize>,
    pub stop_reason: &'static str,
    pub range: Option<(f64, f64, &'static str)>,
    pub bound: Option<(f64, f64)>,
}

pub fn render_summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let (ra, rb, rs) = match r.range {
            Some((a, b, s)) => (format_f64(a), format_f64(b), s.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        let (sech, q) = match r.bound {
            Some((s, q)) => (format_f64(s), format_f64(q)),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.run_id,
            r.solver,
            format_opt(r.period),
            r.steps,
            format_f64(r.final_error),
            format_opt(r.iters_to_threshold),
            format_opt(r.iters_to_match_plain),
            r.stop_reason,
            ra,
            rb,
            rs,
            sech,
            q
        );
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}
