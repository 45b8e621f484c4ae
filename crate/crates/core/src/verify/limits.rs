//! Comparisons with the classical (`q -> 1`) constants.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{QError, Result};
use crate::params::QParams;
use crate::special::q_number;

use super::case::{sharp_constant, Direction, InequalityCase};

/// How the q-constant `1/[γ]_q` compares with the classical `1/γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    QSmaller,
    QLarger,
    Equal,
}

/// Both constants and their ordering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingCheck {
    pub q_value: f64,
    pub classical: f64,
    pub ordering: Ordering,
}

/// Compares `1/[(p-1)/p - alpha]_q` with `p/(p - alpha p - 1)`.
///
/// The two agree exactly at `alpha = -1/p`, where both are 1; the q-value is
/// smaller above that point and larger below it.
pub fn remark_2_2_check(p: f64, alpha: f64, q: f64) -> Result<OrderingCheck> {
    let params = QParams::new(q)?;
    if !(!(0.0..1.0).contains(&p) && alpha < 1.0 - 1.0 / p) {
        return Err(QError::Parameter(format!(
            "the comparison needs p ≥ 1 or p < 0 and alpha < 1 - 1/p, got p = {p}, alpha = {alpha}"
        )));
    }
    let g = (p - 1.0) / p - alpha;
    let q_value = 1.0 / q_number(g, &params);
    let classical = p / (p - alpha * p - 1.0);
    let ordering = if (q_value - classical).abs() <= 1e-12 * classical.abs() {
        Ordering::Equal
    } else if q_value < classical {
        Ordering::QSmaller
    } else {
        Ordering::QLarger
    };
    Ok(OrderingCheck { q_value, classical, ordering })
}

/// The `q -> 1` value of the sharp constant.
pub fn classical_constant(case: &InequalityCase) -> f64 {
    let p = case.p;
    if case.theorem.uses_rl() {
        let s = 1.0 - 1.0 / p;
        (gamma(s) / gamma(case.alpha + s)).powf(p)
    } else {
        match case.theorem.direction() {
            Direction::Upper => case.gamma().powf(-p),
            Direction::Reverse => case.gamma().powf(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub q: f64,
    pub q_constant: f64,
    pub classical: f64,
    /// `|q_constant - classical| / classical`
    pub gap: f64,
}

/// Sharp constants of `case` at each `q`, next to the classical value.
pub fn classical_limit_scan(case: &InequalityCase, q_list: &[f64]) -> Result<Vec<LimitRow>> {
    let classical = classical_constant(case);
    q_list
        .iter()
        .map(|&q| {
            let c = InequalityCase::new(case.theorem, q, case.p, case.alpha)?;
            let q_constant = sharp_constant(&c, &QParams::new(q)?)?;
            Ok(LimitRow { q, q_constant, classical, gap: (q_constant - classical).abs() / classical })
        })
        .collect()
}

/// Strictly shrinking gaps along the rows.
pub fn gaps_decreasing(rows: &[LimitRow]) -> bool {
    rows.windows(2).all(|w| w[1].gap < w[0].gap)
}

/// Both sides of the classical weighted reverse inequality on `[0, 1]`,
/// `∫ f^p (1 - t^γ) dt ≤ γ^p ∫ x^(p(alpha-1)) (∫_0^x t^(-alpha) f dt)^p dx`,
/// by midpoint sums on `n` cells. The inner integral is accumulated with
/// Simpson's rule, so `f` must be continuous on `[0, 1]` and `alpha ≤ 0`.
pub fn classical_reverse_sides(p: f64, alpha: f64, f: impl Fn(f64) -> f64, n: usize) -> Result<(f64, f64)> {
    if !(p > 0.0 && p < 1.0 && alpha < (p - 1.0) / p && alpha <= 0.0) {
        return Err(QError::Parameter(format!("needs 0 < p < 1 and alpha < (p-1)/p, got p = {p}, alpha = {alpha}")));
    }
    let g = (p - 1.0) / p - alpha;
    let h = 1.0 / n as f64;
    let integrand = |t: f64| t.powf(-alpha) * f(t);
    let (mut lhs, mut rhs) = (0.0, 0.0);
    let mut inner = 0.0;
    let mut prev = integrand(0.0);
    for i in 0..n {
        let (a, m) = (i as f64 * h, (i as f64 + 0.5) * h);
        let mid = integrand(m);
        let at_mid = inner + h * (prev + 4.0 * integrand(a + 0.25 * h) + mid) / 12.0;
        lhs += f(m).powf(p) * (1.0 - m.powf(g)) * h;
        rhs += m.powf(p * (alpha - 1.0)) * at_mid.powf(p) * h;
        let next = integrand(a + h);
        inner += h * (prev + 4.0 * mid + next) / 6.0;
        prev = next;
    }
    Ok((lhs, g.powf(p) * rhs))
}
