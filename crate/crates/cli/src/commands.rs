//! The four subcommands. Each expands the configured grid into cells, runs
//! them in parallel and returns them sorted by `(case, q, p, parameter)`.

use qhardy::discrete::{epsilon_sweep, DiscreteCase, EpsilonSweep};
use qhardy::verify::{
    classical_constant, discrete_corpus, generate_corpus, remark_2_2_check, run_discrete, sharp_constant,
    sharpness_sweep, verify_corpus, window_start, DiscreteRow, InequalityCase, Ordering,
    SharpnessSweep, SweepConfig, TheoremId, VerificationReport,
};
use qhardy::QError;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{default_alphas, default_discrete_params, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Skipped,
    NonConvergent,
    Violation,
}

/// One grid point and what came of it.
#[derive(Debug, Clone, Serialize)]
pub struct Cell<T> {
    pub case: String,
    pub q: f64,
    pub p: f64,
    /// `alpha`, or `lambda` for the geometric discrete forms
    pub param: f64,
    pub param_name: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<T>,
}

#[derive(Debug, Clone, Copy)]
struct Key<'a> {
    case: &'a str,
    q: f64,
    p: f64,
    param: f64,
}

fn sort_keys<T: Copy>(keys: &mut [(Key<'_>, T)]) {
    keys.sort_by(|(a, _), (b, _)| {
        a.case
            .cmp(b.case)
            .then(a.q.total_cmp(&b.q))
            .then(a.p.total_cmp(&b.p))
            .then(a.param.total_cmp(&b.param))
    });
}

impl<T> Cell<T> {
    fn new(key: Key<'_>, param_name: &'static str, status: Status, reason: Option<String>, result: Option<T>) -> Self {
        Self { case: key.case.to_string(), q: key.q, p: key.p, param: key.param, param_name, status, reason, result }
    }

    fn skipped(key: Key<'_>, param_name: &'static str, e: &QError) -> Self {
        Self::new(key, param_name, Status::Skipped, Some(e.to_string()), None)
    }

    fn failed(key: Key<'_>, param_name: &'static str, e: &QError) -> Self {
        let status = if e.is_non_convergent() { Status::NonConvergent } else { Status::Violation };
        Self::new(key, param_name, status, Some(e.to_string()), None)
    }
}

/// Exit status of a whole run: violations outrank non-convergence.
pub fn exit_code<T>(cells: &[Cell<T>]) -> u8 {
    match cells.iter().map(|c| c.status).max() {
        Some(Status::Violation) => 1,
        Some(Status::NonConvergent) => 3,
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Summary {
    pub cells: usize,
    pub ok: usize,
    pub skipped: usize,
    pub violations: usize,
    pub non_convergent: usize,
}

pub fn summarize<T>(cells: &[Cell<T>]) -> Summary {
    let mut s = Summary { cells: cells.len(), ..Summary::default() };
    for c in cells {
        match c.status {
            Status::Ok => s.ok += 1,
            Status::Skipped => s.skipped += 1,
            Status::Violation => s.violations += 1,
            Status::NonConvergent => s.non_convergent += 1,
        }
    }
    s
}

/// Every `(theorem, q, p, alpha)` of the grid, sorted.
fn case_grid(cfg: &RunConfig) -> Result<Vec<(Key<'static>, TheoremId)>, CliError> {
    let mut keys = Vec::new();
    for t in cfg.theorems()? {
        let alphas: Vec<f64> = if cfg.alpha.is_empty() { default_alphas(t).to_vec() } else { cfg.alpha.clone() };
        for &q in &cfg.q {
            for &p in &cfg.p {
                for &alpha in &alphas {
                    keys.push((Key { case: t.name(), q, p, param: alpha }, t));
                }
            }
        }
    }
    sort_keys(&mut keys);
    keys.dedup_by(|a, b| a.1 == b.1 && a.0.q == b.0.q && a.0.p == b.0.p && a.0.param == b.0.param);
    Ok(keys)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantRow {
    pub constant: f64,
    pub classical: f64,
    /// How the q-constant sits against the classical one, where comparable
    pub ordering: Option<Ordering>,
}

pub fn constants(cfg: &RunConfig) -> Result<Vec<Cell<ConstantRow>>, CliError> {
    let keys = case_grid(cfg)?;
    let params: Vec<_> = cfg.q.iter().map(|&q| cfg.params(q)).collect::<Result<_, _>>()?;
    Ok(keys
        .par_iter()
        .map(|&(key, t)| {
            let params = &params[cfg.q.iter().position(|&q| q == key.q).unwrap_or(0)];
            let case = match InequalityCase::new(t, key.q, key.p, key.param) {
                Ok(c) => c,
                Err(e) => return Cell::skipped(key, "alpha", &e),
            };
            match sharp_constant(&case, params) {
                Ok(constant) => {
                    let ordering = match t {
                        TheoremId::Hardy | TheoremId::HardyNegative | TheoremId::HardyUnit => {
                            remark_2_2_check(key.p, key.param, key.q).ok().map(|o| o.ordering)
                        }
                        _ => None,
                    };
                    let row = ConstantRow { constant, classical: classical_constant(&case), ordering };
                    Cell::new(key, "alpha", Status::Ok, None, Some(row))
                }
                Err(e) => Cell::failed(key, "alpha", &e),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyResult {
    pub seed: u64,
    pub reports: Vec<VerificationReport>,
}

fn report_status(case: &InequalityCase, reports: &[VerificationReport]) -> (Status, Option<String>) {
    let bad = |r: &&VerificationReport| {
        !r.satisfied || (case.theorem.is_strict() && !r.degenerate && !r.strict())
    };
    if let Some(r) = reports.iter().filter(|r| r.error.is_none()).find(bad) {
        return (Status::Violation, Some(format!("{} has margin {} against budget {}", r.function, r.margin, r.error_budget)));
    }
    if let Some(r) = reports.iter().find(|r| r.error.is_some()) {
        return (Status::NonConvergent, r.error.clone());
    }
    (Status::Ok, None)
}

pub fn verify(cfg: &RunConfig) -> Result<Vec<Cell<VerifyResult>>, CliError> {
    let keys = case_grid(cfg)?;
    let params: Vec<_> = cfg.q.iter().map(|&q| cfg.params(q)).collect::<Result<_, _>>()?;
    Ok(keys
        .par_iter()
        .map(|&(key, t)| {
            let params = &params[cfg.q.iter().position(|&q| q == key.q).unwrap_or(0)];
            let case = match InequalityCase::new(t, key.q, key.p, key.param) {
                Ok(c) => c,
                Err(e) => return Cell::skipped(key, "alpha", &e),
            };
            let corpus = generate_corpus(&case, cfg.seed, cfg.corpus);
            let reports = verify_corpus(&case, &corpus, params);
            let (status, reason) = report_status(&case, &reports);
            Cell::new(key, "alpha", status, reason, Some(VerifyResult { seed: cfg.seed, reports }))
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub beta2: f64,
    #[serde(flatten)]
    pub sweep: SharpnessSweep,
}

pub fn sweep(cfg: &RunConfig) -> Result<Vec<Cell<SweepResult>>, CliError> {
    let keys = case_grid(cfg)?;
    let params: Vec<_> = cfg.q.iter().map(|&q| cfg.params(q)).collect::<Result<_, _>>()?;
    let sc = SweepConfig { delta: cfg.delta, steps: cfg.steps, beta2: cfg.beta2, beta2_check: Some(cfg.beta2_check) };
    Ok(keys
        .par_iter()
        .map(|&(key, t)| {
            let params = &params[cfg.q.iter().position(|&q| q == key.q).unwrap_or(0)];
            let case = match InequalityCase::new(t, key.q, key.p, key.param) {
                Ok(c) => c,
                Err(e) => return Cell::skipped(key, "alpha", &e),
            };
            match sharpness_sweep(&case, params, &sc) {
                Ok(s) => {
                    let (status, reason) = if !s.bounded {
                        (Status::Violation, Some("a ratio exceeds the constant beyond its budget".to_string()))
                    } else if let Some(e) = s.points.iter().find_map(|p| p.error.clone()) {
                        (Status::NonConvergent, Some(e))
                    } else {
                        (Status::Ok, None)
                    };
                    Cell::new(key, "alpha", status, reason, Some(SweepResult { beta2: cfg.beta2, sweep: s }))
                }
                Err(e) => Cell::failed(key, "alpha", &e),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscreteResult {
    pub seed: u64,
    pub rows: Vec<DiscreteRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_sweep: Option<EpsilonSweep>,
}

fn discrete_status(rows: &[DiscreteRow], eps: Option<&EpsilonSweep>) -> (Status, Option<String>) {
    if let Some(r) = rows.iter().find(|r| !r.satisfied || (r.reverse && !r.strict)) {
        return (Status::Violation, Some(format!("{} {} on {}: lhs {} rhs {}", r.form, r.check, r.sequence, r.lhs, r.rhs)));
    }
    if let Some(s) = eps {
        if let Some(r) = s.rows.iter().find(|r| r.ratio > s.constant + r.error_budget) {
            return (Status::Violation, Some(format!("ε-sweep ratio {} exceeds {}", r.ratio, s.constant)));
        }
    }
    (Status::Ok, None)
}

pub fn discrete(cfg: &RunConfig) -> Result<Vec<Cell<DiscreteResult>>, CliError> {
    let mut keys = Vec::new();
    for form in cfg.discrete_forms()? {
        for &q in &cfg.q {
            for &p in &cfg.p {
                for param in default_discrete_params(form, cfg) {
                    keys.push((Key { case: form.name(), q, p, param }, form));
                }
            }
        }
    }
    sort_keys(&mut keys);
    keys.dedup_by(|a, b| a.1 == b.1 && a.0.q == b.0.q && a.0.p == b.0.p && a.0.param == b.0.param);
    Ok(keys
        .par_iter()
        .map(|&(key, form)| {
            let name = if form.uses_alpha() { "alpha" } else { "lambda" };
            if let Err(e) = form.check(key.q, key.p, key.param) {
                return Cell::skipped(key, name, &e);
            }
            let len = if form.is_classical() {
                cfg.n
            } else {
                cfg.window
            };
            let corpus = discrete_corpus(cfg.seed, cfg.corpus, len, window_start(form, len));
            let rows = match run_discrete(form, key.q, key.p, key.param, &corpus) {
                Ok(rows) => rows,
                Err(e) => return Cell::failed(key, name, &e),
            };
            let eps = match form.geometric() {
                Some((direction, domain)) if cfg.epsilon_sweep => {
                    let run = DiscreteCase::new(key.param, key.p, key.q, domain)
                        .and_then(|case| epsilon_sweep(&case, direction, cfg.epsilon0, cfg.epsilon_steps));
                    match run {
                        Ok(s) => Some(s),
                        Err(e) => return Cell::failed(key, name, &e),
                    }
                }
                _ => None,
            };
            let (status, reason) = discrete_status(&rows, eps.as_ref());
            Cell::new(key, name, status, reason, Some(DiscreteResult { seed: cfg.seed, rows, epsilon_sweep: eps }))
        })
        .collect())
}
