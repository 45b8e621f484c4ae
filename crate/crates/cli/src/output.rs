//! JSON documents and flat CSV tables.

use std::io::Write;

use qhardy::verify::Ordering;
use serde::Serialize;

use crate::commands::{summarize, Cell, ConstantRow, DiscreteResult, Status, Summary, SweepResult, VerifyResult};
use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Serialize)]
struct Document<'a, T> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    config: &'a RunConfig,
    cells: &'a [Cell<T>],
    summary: Summary,
}

pub fn json<T: Serialize>(command: &str, cfg: &RunConfig, cells: &[Cell<T>]) -> Result<Vec<u8>, CliError> {
    let doc = Document {
        tool: "qhardy",
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed: cfg.seed,
        config: cfg,
        cells,
        summary: summarize(cells),
    };
    let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Encode(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Result types that flatten into CSV rows after the cell key columns.
pub trait Tabular {
    const COLUMNS: &'static [&'static str];
    fn rows(&self) -> Vec<Vec<String>>;
}

fn num(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl Tabular for ConstantRow {
    const COLUMNS: &'static [&'static str] = &["constant", "classical", "ordering"];
    fn rows(&self) -> Vec<Vec<String>> {
        let ordering = match self.ordering {
            Some(Ordering::QSmaller) => "q-smaller",
            Some(Ordering::QLarger) => "q-larger",
            Some(Ordering::Equal) => "equal",
            None => "",
        };
        vec![vec![num(self.constant), num(self.classical), ordering.to_string()]]
    }
}

impl Tabular for VerifyResult {
    const COLUMNS: &'static [&'static str] = &[
        "function", "lhs", "rhs", "constant", "ratio", "margin", "error_budget", "satisfied", "strict", "degenerate",
        "error",
    ];
    fn rows(&self) -> Vec<Vec<String>> {
        self.reports
            .iter()
            .map(|r| {
                vec![
                    r.function.clone(),
                    num(r.lhs),
                    num(r.rhs),
                    num(r.constant),
                    num(r.ratio),
                    num(r.margin),
                    num(r.error_budget),
                    r.satisfied.to_string(),
                    r.strict().to_string(),
                    r.degenerate.to_string(),
                    r.error.clone().unwrap_or_default(),
                ]
            })
            .collect()
    }
}

impl Tabular for SweepResult {
    const COLUMNS: &'static [&'static str] = &[
        "family", "step", "beta", "ratio", "constant", "relative_gap", "error_budget", "beta2", "beta2_check",
        "ratio_beta2_check",
    ];
    fn rows(&self) -> Vec<Vec<String>> {
        let s = &self.sweep;
        s.points
            .iter()
            .enumerate()
            .map(|(j, pt)| {
                // only the two-piece family has a second exponent
                let (beta2, check, alt) = match &s.sensitivity {
                    Some(sens) => (num(self.beta2), num(sens.beta2), opt(sens.ratios.get(j).copied().flatten())),
                    None => (String::new(), String::new(), String::new()),
                };
                vec![
                    s.family.clone(),
                    j.to_string(),
                    num(pt.beta),
                    opt(pt.ratio),
                    num(s.constant),
                    opt(pt.relative_gap),
                    opt(pt.error_budget),
                    beta2,
                    check,
                    alt,
                ]
            })
            .collect()
    }
}

impl Tabular for DiscreteResult {
    const COLUMNS: &'static [&'static str] =
        &["check", "sequence", "lhs", "rhs", "ratio", "bound", "error_budget", "satisfied", "strict", "epsilon", "window"];
    fn rows(&self) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.check.clone(),
                    r.sequence.clone(),
                    num(r.lhs),
                    num(r.rhs),
                    num(r.ratio),
                    num(r.bound),
                    num(r.error_budget),
                    r.satisfied.to_string(),
                    r.strict.to_string(),
                    String::new(),
                    String::new(),
                ]
            })
            .collect();
        if let Some(s) = &self.epsilon_sweep {
            for r in &s.rows {
                let ok = r.ratio <= s.constant + r.error_budget;
                out.push(vec![
                    "epsilon-sweep".into(),
                    format!("q^({}k)", r.epsilon),
                    num(r.lhs),
                    num(r.rhs),
                    num(r.ratio),
                    num(s.constant),
                    num(r.error_budget),
                    ok.to_string(),
                    String::new(),
                    num(r.epsilon),
                    r.window.to_string(),
                ]);
            }
        }
        out
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Skipped => "skipped",
        Status::NonConvergent => "non-convergent",
        Status::Violation => "violation",
    }
}

pub fn csv<T: Tabular>(cells: &[Cell<T>]) -> Result<Vec<u8>, CliError> {
    let enc = |e: csv::Error| CliError::Encode(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    let param = cells.first().map_or("param", |c| c.param_name);
    let mut header = vec!["case", "q", "p", if cells.iter().all(|c| c.param_name == param) { param } else { "param" }, "status"];
    header.extend_from_slice(T::COLUMNS);
    header.push("note");
    w.write_record(&header).map_err(enc)?;
    for c in cells {
        let key = [c.case.clone(), num(c.q), num(c.p), num(c.param), status_name(c.status).to_string()];
        let note = c.reason.clone().unwrap_or_default();
        let rows = c.result.as_ref().map(Tabular::rows).unwrap_or_default();
        if rows.is_empty() {
            let blank = std::iter::repeat_n(String::new(), T::COLUMNS.len());
            w.write_record(key.iter().cloned().chain(blank).chain([note.clone()])).map_err(enc)?;
        }
        for row in rows {
            w.write_record(key.iter().cloned().chain(row).chain([note.clone()])).map_err(enc)?;
        }
    }
    w.into_inner().map_err(|e| CliError::Encode(e.to_string()))
}

/// Writes to `--out` or stdout.
pub fn emit(bytes: &[u8], cfg: &RunConfig) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|source| CliError::Output { path: path.display().to_string(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Output { path: "stdout".into(), source })
        }
    }
}
