use std::fmt;

use thiserror::Error;

/// Which end of a bilateral lattice sum failed to settle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tail {
    /// k -> +inf, lattice points accumulating at t = 0.
    SmallT,
    /// k -> -inf, lattice points escaping to t = inf.
    LargeT,
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tail::SmallT => f.write_str("small-t tail (t -> 0)"),
            Tail::LargeT => f.write_str("large-t tail (t -> inf)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("{what} did not converge after {terms} terms{}", tail_suffix(.tail))]
    NonConvergent {
        what: &'static str,
        tail: Option<Tail>,
        terms: usize,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole of the q-gamma function at x = {0}")]
    Pole(f64),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("function evaluation returned {value} at t = {t}")]
    Evaluation { t: f64, value: f64 },
    #[error("parameter error: {0}")]
    Parameter(String),
}

fn tail_suffix(tail: &Option<Tail>) -> String {
    match tail {
        Some(t) => format!(" in the {t}"),
        None => String::new(),
    }
}

impl QError {
    pub fn is_non_convergent(&self) -> bool {
        matches!(self, QError::NonConvergent { .. })
    }
}

pub type Result<T> = std::result::Result<T, QError>;
