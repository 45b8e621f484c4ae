//! Verification engine: sharp constants, per-function checks of each
//! inequality, sweeps along the extremal families, and classical limits.

mod case;
mod corpus;
mod discrete_suite;
mod limits;
mod sweep;

use rayon::prelude::*;

pub use case::{sharp_constant, verify_case, Direction, InequalityCase, TheoremId, VerificationReport};
pub use corpus::{generate_corpus, Atom, CorpusItem};
pub use discrete_suite::{discrete_corpus, run_discrete, window_start, DiscreteForm, DiscreteItem, DiscreteRow};
pub use limits::{
    classical_constant, classical_limit_scan, classical_reverse_sides, gaps_decreasing, remark_2_2_check, LimitRow,
    Ordering, OrderingCheck,
};
pub use sweep::{
    approach, hardy_ratio_floor, schedule, sharpness_sweep, Approach, Sensitivity, SharpnessSweep, SweepConfig,
    SweepPoint, K_MAX_CAP,
};

use crate::operators::RlKernel;
use crate::params::QParams;

/// Runs `case` on every corpus item. Reports come back in corpus order
/// whatever the scheduling; failures become unconverged reports.
pub fn verify_corpus(case: &InequalityCase, corpus: &[CorpusItem], params: &QParams) -> Vec<VerificationReport> {
    let constant = sharp_constant(case, params).unwrap_or(f64::NAN);
    let kernel = if case.theorem.uses_rl() { RlKernel::new(case.alpha, params).ok() } else { None };
    corpus
        .par_iter()
        .map(|item| {
            let f = item.to_function();
            let mut r = case::verify_case_with(case, &f, params, kernel.as_ref())
                .unwrap_or_else(|e| VerificationReport::failed(*case, &item.label, constant, &e));
            r.function = item.label.clone();
            r
        })
        .collect()
}
