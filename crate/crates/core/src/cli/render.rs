use std::fmt::Write;

use clap::ValueEnum;
use serde_json::Value;

use crate::lab::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Renders a report; every number is an exact integer or an exact string encoding.
pub fn render_report(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => render_csv(report),
        Format::Text => render_text(report),
    }
}

fn render_csv(report: &Report) -> String {
    let mut out = String::from("m,n,r,l,valuation\n");
    for stage in &report.stages {
        for e in &stage.table {
            let idx: Vec<String> = e.index.iter().map(i64::to_string).collect();
            let _ = writeln!(out, "{},{},{}", stage.m, idx.join(","), e.valuation);
        }
    }
    out
}

fn config_line(config: &Value) -> String {
    match config.as_object() {
        Some(map) => map
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}={s}"),
                other => format!("{k}={other}"),
            })
            .collect::<Vec<_>>()
            .join(" "),
        None => config.to_string(),
    }
}

fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", report.kind, config_line(&report.config));
    for stage in &report.stages {
        let argmin = stage
            .argmin
            .as_ref()
            .map(|a| format!(" at {a:?}"))
            .unwrap_or_default();
        let _ = writeln!(out);
        let _ = writeln!(out, "m={} k_m={} min={}{}", stage.m, stage.k_m, stage.min_val, argmin);
        if let Some(w) = &stage.weight {
            let _ = writeln!(
                out,
                "  weight: v_p={} class={} limit=({}, {})",
                w.s_valuation, w.class, w.limit.0, w.limit.1
            );
        }
        let _ = writeln!(out, "  {:>4} {:>4} {:>4}  valuation", "n", "r", "l");
        for e in &stage.table {
            let cells: Vec<String> = e.index.iter().map(|i| format!("{i:>4}")).collect();
            let _ = writeln!(out, "  {}  {}", cells.join(" "), e.valuation);
        }
    }
    if !report.checks.is_empty() {
        let _ = writeln!(out);
        for c in &report.checks {
            let tag = if c.pass { "ok  " } else { "FAIL" };
            if c.detail.is_empty() {
                let _ = writeln!(out, "[{tag}] {}", c.name);
            } else {
                let _ = writeln!(out, "[{tag}] {}: {}", c.name, c.detail);
            }
        }
    }
    let _ = writeln!(out);
    let verdict = serde_json::to_value(report.outcome).expect("plain enum");
    let _ = writeln!(out, "outcome: {}", verdict.as_str().unwrap_or("?"));
    if !report.label.is_empty() {
        let _ = writeln!(out, "{}", report.label);
    }
    out
}
