//! Ratios along the extremal families as the exponent approaches `-1/p`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::lattice::{make_extremal, ExtremalFamily};
use crate::operators::RlKernel;
use crate::params::QParams;

use super::case::{sharp_constant, verify_case_with, InequalityCase, TheoremId};

/// Truncation horizons never grow past this many lattice nodes.
pub const K_MAX_CAP: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Distance of the first exponent from `-1/p`.
    pub delta: f64,
    /// Number of halvings of `delta`.
    pub steps: usize,
    /// Exponent on `(1, inf)` for the two-piece family.
    pub beta2: f64,
    /// Second `beta2` used for the sensitivity columns; `None` skips them.
    pub beta2_check: Option<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { delta: 0.5, steps: 12, beta2: 10.0, beta2_check: Some(20.0) }
    }
}

/// Which way the schedule approaches `-1/p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Approach {
    FromAbove,
    FromBelow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub beta: f64,
    pub ratio: Option<f64>,
    pub error_budget: Option<f64>,
    pub relative_gap: Option<f64>,
    pub error: Option<String>,
}

/// Ratios under the second `beta2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sensitivity {
    pub beta2: f64,
    pub ratios: Vec<Option<f64>>,
    /// Largest `|r' - r| / r` over the schedule.
    pub max_relative_change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessSweep {
    pub case: InequalityCase,
    pub family: String,
    pub approach: Approach,
    pub schedule: Vec<f64>,
    pub ratios: Vec<Option<f64>>,
    pub points: Vec<SweepPoint>,
    pub sup_ratio: f64,
    pub constant: f64,
    /// `(constant - sup_ratio) / constant`
    pub relative_gap: f64,
    /// `ratio ≤ constant + budget` at every converged point.
    pub bounded: bool,
    pub sensitivity: Option<Sensitivity>,
}

impl SharpnessSweep {
    /// Ratio at the closest exponent that converged.
    pub fn finest_ratio(&self) -> Option<f64> {
        self.ratios.iter().rev().find_map(|r| *r)
    }
}

/// The extremal family swept for a case.
fn family_for(case: &InequalityCase, beta: f64, beta2: f64) -> ExtremalFamily {
    match case.theorem {
        TheoremId::HardyNegative => ExtremalFamily::PowerTwo { beta1: beta, beta2 },
        TheoremId::HardyReverse => ExtremalFamily::PowerTail { beta },
        _ => ExtremalFamily::PowerUnit { beta },
    }
}

pub fn approach(case: &InequalityCase) -> Approach {
    match case.theorem {
        TheoremId::HardyNegative | TheoremId::HardyReverse => Approach::FromBelow,
        TheoremId::HardyUnit if case.p < 0.0 => Approach::FromBelow,
        _ => Approach::FromAbove,
    }
}

/// `beta_j = -1/p ± delta 2^(-j)`. From below the exponents must also stay
/// above `alpha - 1`, so `delta` is capped at half that gap.
pub fn schedule(case: &InequalityCase, cfg: &SweepConfig) -> Vec<f64> {
    let crit = case.critical_beta();
    let (sign, delta) = match approach(case) {
        Approach::FromAbove => (1.0, cfg.delta),
        Approach::FromBelow => (-1.0, cfg.delta.min(0.5 * (crit - (case.alpha - 1.0)))),
    };
    (0..cfg.steps).map(|j| crit + sign * delta * 0.5f64.powi(j as i32)).collect()
}

/// Enough lattice nodes for the slowest geometric decay `q^(k |1 + p beta|)`.
fn scaled_params(case: &InequalityCase, beta: f64, params: &QParams) -> QParams {
    let rate = (1.0 + case.p * beta).abs() * params.ln_q().abs();
    let need = (80.0 / rate).ceil();
    let k_max = if need.is_finite() { (need as usize).clamp(params.k_max, K_MAX_CAP) } else { K_MAX_CAP };
    (*params).with_k_max(k_max)
}

fn run_points(
    case: &InequalityCase,
    sched: &[f64],
    beta2: f64,
    constant: f64,
    params: &QParams,
    kernel: Option<&RlKernel>,
) -> Vec<SweepPoint> {
    sched
        .par_iter()
        .map(|&beta| {
            let f = make_extremal(family_for(case, beta, beta2));
            let local = scaled_params(case, beta, params);
            match verify_case_with(case, &f, &local, kernel) {
                Ok(r) => SweepPoint {
                    beta,
                    ratio: Some(r.ratio),
                    error_budget: Some(r.error_budget / pick_scale(&r)),
                    relative_gap: Some((constant - r.ratio) / constant),
                    error: None,
                },
                Err(e) => SweepPoint { beta, ratio: None, error_budget: None, relative_gap: None, error: Some(e.to_string()) },
            }
        })
        .collect()
}

/// Converts a report's absolute budget to ratio units.
fn pick_scale(r: &super::case::VerificationReport) -> f64 {
    let base = r.rhs / r.constant;
    if base > 0.0 { base } else { 1.0 }
}

/// Runs the extremal family of `case` along the schedule.
pub fn sharpness_sweep(case: &InequalityCase, params: &QParams, cfg: &SweepConfig) -> Result<SharpnessSweep> {
    let case = InequalityCase::new(case.theorem, case.q, case.p, case.alpha)?;
    if params.q() != case.q {
        return Err(QError::Parameter("sweep params and case disagree on q".into()));
    }
    let constant = sharp_constant(&case, params)?;
    let sched = schedule(&case, cfg);
    let kernel = if case.theorem.uses_rl() { Some(RlKernel::new(case.alpha, params)?) } else { None };
    let points = run_points(&case, &sched, cfg.beta2, constant, params, kernel.as_ref());
    let ratios: Vec<Option<f64>> = points.iter().map(|p| p.ratio).collect();
    let sup_ratio = ratios.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let bounded = points.iter().all(|p| match (p.ratio, p.error_budget) {
        (Some(r), Some(b)) => r <= constant + b,
        _ => true,
    });
    let sensitivity = match (case.theorem, cfg.beta2_check) {
        (TheoremId::HardyNegative, Some(b2)) => {
            let alt = run_points(&case, &sched, b2, constant, params, None);
            let alt_ratios: Vec<Option<f64>> = alt.iter().map(|p| p.ratio).collect();
            let max_relative_change = ratios
                .iter()
                .zip(&alt_ratios)
                .filter_map(|(a, b)| Some(((*b)? - (*a)?).abs() / (*a)?))
                .fold(0.0, f64::max);
            Some(Sensitivity { beta2: b2, ratios: alt_ratios, max_relative_change })
        }
        _ => None,
    };
    let family = make_extremal(family_for(&case, sched.first().copied().unwrap_or(0.0), cfg.beta2)).label().to_string();
    Ok(SharpnessSweep {
        case,
        family,
        approach: approach(&case),
        schedule: sched,
        ratios,
        points,
        sup_ratio,
        constant,
        relative_gap: (constant - sup_ratio) / constant,
        bounded,
        sensitivity,
    })
}

/// The closed-form floor of the Hardy ratio for `t^beta χ_(0,1]` on the
/// full line: `((1 - q)/(1 - q^(1 - alpha + beta)))^p`, from the `j ≥ 0`
/// block alone.
pub fn hardy_ratio_floor(case: &InequalityCase, beta: f64, params: &QParams) -> f64 {
    ((1.0 - params.q()) / params.one_minus_pow(1.0 - case.alpha + beta)).powf(case.p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SweepConfig {
        SweepConfig { delta: 0.5, steps: 8, beta2: 10.0, beta2_check: None }
    }

    #[test]
    fn hardy_sweep_reaches_the_constant() {
        let params = QParams::new(0.5).unwrap();
        let c = InequalityCase::new(TheoremId::Hardy, 0.5, 2.0, 0.0).unwrap();
        let s = sharpness_sweep(&c, &params, &SweepConfig { steps: 11, ..quick() }).unwrap();
        assert!(s.bounded);
        assert!((s.constant - 2.91421356).abs() < 1e-8);
        assert!(s.relative_gap < 0.01, "gap {}", s.relative_gap);
        for (b, r) in s.schedule.iter().zip(&s.ratios) {
            let r = r.unwrap();
            assert!(r >= hardy_ratio_floor(&c, *b, &params) * (1.0 - 1e-12));
        }
        // refining never loses ground
        let rs: Vec<f64> = s.ratios.iter().map(|r| r.unwrap()).collect();
        assert!(rs.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn single_far_point_is_a_valid_sweep() {
        let params = QParams::new(0.5).unwrap();
        let c = InequalityCase::new(TheoremId::Hardy, 0.5, 2.0, 0.0).unwrap();
        let s = sharpness_sweep(&c, &params, &SweepConfig { delta: 3.0, steps: 1, ..quick() }).unwrap();
        assert_eq!(s.ratios.len(), 1);
        assert!(s.relative_gap > 0.3);
        assert!(s.bounded);
    }

    #[test]
    fn below_schedule_stays_in_window() {
        let c = InequalityCase::new(TheoremId::HardyReverse, 0.5, 0.5, -2.0).unwrap();
        let s = schedule(&c, &SweepConfig { delta: 5.0, ..quick() });
        assert!(s.iter().all(|&b| b > c.alpha - 1.0 && b < -2.0));
    }

    #[test]
    fn rl_sweep_reaches_the_beta_ratio() {
        let params = QParams::new(0.5).unwrap();
        let c = InequalityCase::new(TheoremId::RiemannLiouville, 0.5, 2.0, 0.5).unwrap();
        let s = sharpness_sweep(&c, &params, &SweepConfig { steps: 12, ..quick() }).unwrap();
        let b = crate::special::q_beta(0.5, 0.5, &params).unwrap() / crate::special::q_gamma(0.5, &params).unwrap();
        assert!((s.constant - b * b).abs() < 1e-12 * s.constant);
        assert!(s.bounded);
        assert!(s.relative_gap < 0.01, "gap {}", s.relative_gap);
    }
}
