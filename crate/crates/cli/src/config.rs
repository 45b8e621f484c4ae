//! Run configuration: defaults, the flat TOML file and flag overrides.

use std::path::{Path, PathBuf};

use qhardy::verify::{DiscreteForm, TheoremId};
use qhardy::QParams;
use serde::{Deserialize, Serialize};

use crate::args::{Flags, Format};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Case ids; empty means every registered case.
    pub cases: Vec<String>,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    /// Empty means the per-case defaults.
    pub alpha: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Discrete forms; empty means all.
    pub forms: Vec<String>,
    pub seed: u64,
    /// Random functions per verify cell, random sequences per discrete cell.
    pub corpus: usize,
    pub steps: usize,
    pub delta: f64,
    pub beta2: f64,
    pub beta2_check: f64,
    pub epsilon_sweep: bool,
    pub epsilon0: f64,
    pub epsilon_steps: usize,
    /// Window of the classical discrete forms.
    pub n: usize,
    /// Window of the other discrete forms.
    pub window: usize,
    pub eps_tail: Option<f64>,
    pub k_max: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cases: Vec::new(),
            q: vec![0.3, 0.5, 0.8],
            p: vec![0.5, 1.0, 2.0, 3.0, -2.0],
            alpha: Vec::new(),
            lambda: vec![0.5, 1.0],
            forms: Vec::new(),
            seed: 42,
            corpus: 20,
            steps: 12,
            delta: 0.5,
            beta2: 10.0,
            beta2_check: 20.0,
            epsilon_sweep: false,
            epsilon0: 0.5,
            epsilon_steps: 20,
            n: 10_000,
            window: 1_000,
            eps_tail: None,
            k_max: None,
            format: Format::Json,
            out: None,
        }
    }
}

/// `alpha` values tried for a case when none are given.
pub fn default_alphas(t: TheoremId) -> &'static [f64] {
    match t {
        TheoremId::Hardy => &[-1.0, 0.0],
        TheoremId::HardyNegative => &[-2.0, 1.0],
        TheoremId::HardyReverse | TheoremId::ReverseWeighted | TheoremId::ReverseBoundary => &[-2.0, -1.0],
        TheoremId::HardyUnit => &[0.0, 0.25],
        TheoremId::RiemannLiouville | TheoremId::RiemannLiouvilleUnit => &[0.5, 1.0, 2.0],
    }
}

/// Second parameter of a discrete form when none is given.
pub fn default_discrete_params(form: DiscreteForm, cfg: &RunConfig) -> Vec<f64> {
    match form {
        DiscreteForm::DifferenceWeights | DiscreteForm::PowerWeights if cfg.alpha.is_empty() => vec![0.0, 0.25],
        f if f.uses_alpha() && cfg.alpha.is_empty() => vec![0.5, 1.0, 2.0],
        f if f.uses_alpha() => cfg.alpha.clone(),
        _ => cfg.lambda.clone(),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// The config file if given, then the flags on top.
    pub fn from_flags(flags: &Flags) -> Result<Self, CliError> {
        let mut cfg = match &flags.config {
            Some(path) => Self::load(path)?,
            None => Self::default(),
        };
        let set = |dst: &mut Vec<f64>, src: &Vec<f64>| {
            if !src.is_empty() {
                *dst = src.clone();
            }
        };
        if !flags.case.is_empty() {
            cfg.cases = flags.case.clone();
        }
        if !flags.form.is_empty() {
            cfg.forms = flags.form.clone();
        }
        set(&mut cfg.q, &flags.q);
        set(&mut cfg.p, &flags.p);
        set(&mut cfg.alpha, &flags.alpha);
        set(&mut cfg.lambda, &flags.lambda);
        cfg.seed = flags.seed.unwrap_or(cfg.seed);
        cfg.steps = flags.steps.unwrap_or(cfg.steps);
        cfg.format = flags.format.unwrap_or(cfg.format);
        cfg.n = flags.n.unwrap_or(cfg.n);
        cfg.corpus = flags.corpus.unwrap_or(cfg.corpus);
        cfg.epsilon_sweep |= flags.epsilon_sweep;
        if flags.out.is_some() {
            cfg.out = flags.out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for &q in &self.q {
            self.params(q)?;
        }
        for &p in &self.p {
            if !(p.is_finite() && p != 0.0) {
                return Err(CliError::Config(format!("p must be finite and nonzero, got {p}")));
            }
        }
        if self.q.is_empty() || self.p.is_empty() {
            return Err(CliError::Config("the q and p grids must not be empty".into()));
        }
        if self.alpha.iter().chain(&self.lambda).any(|v| !v.is_finite()) {
            return Err(CliError::Config("alpha and lambda must be finite".into()));
        }
        if self.steps == 0 || self.epsilon_steps == 0 {
            return Err(CliError::Config("steps must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.epsilon0 > 0.0 && self.beta2.is_finite() && self.beta2_check.is_finite()) {
            return Err(CliError::Config("delta and epsilon0 must be positive".into()));
        }
        if self.n == 0 || self.window == 0 {
            return Err(CliError::Config("windows must hold at least one index".into()));
        }
        self.theorems()?;
        self.discrete_forms()?;
        Ok(())
    }

    /// Numeric parameters for one `q`, with the overrides applied.
    pub fn params(&self, q: f64) -> Result<QParams, CliError> {
        let mut params = QParams::new(q).map_err(|e| CliError::Config(config_message(e)))?;
        if let Some(k) = self.k_max {
            params = params.with_k_max(k);
        }
        if let Some(eps) = self.eps_tail {
            params = params.with_eps_tail(eps).map_err(|e| CliError::Config(config_message(e)))?;
        }
        params.validated().map_err(|e| CliError::Config(config_message(e)))
    }

    pub fn theorems(&self) -> Result<Vec<TheoremId>, CliError> {
        if self.cases.is_empty() {
            return Ok(TheoremId::ALL.to_vec());
        }
        self.cases
            .iter()
            .map(|c| c.parse::<TheoremId>().map_err(|e| CliError::Config(config_message(e))))
            .collect()
    }

    pub fn discrete_forms(&self) -> Result<Vec<DiscreteForm>, CliError> {
        if self.forms.is_empty() {
            return Ok(DiscreteForm::ALL.to_vec());
        }
        self.forms
            .iter()
            .map(|f| f.parse::<DiscreteForm>().map_err(|e| CliError::Config(config_message(e))))
            .collect()
    }
}

/// The bare message of a parameter error.
fn config_message(e: qhardy::QError) -> String {
    match e {
        qhardy::QError::Parameter(m) => m,
        other => other.to_string(),
    }
}
