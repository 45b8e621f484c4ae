//! The weighted Hardy q-operator, the q-Riemann-Liouville fractional
//! integral, the left-hand functionals built from them, and p-th power
//! q-integrals.
//!
//! The functionals are double lattice sums. At `x = q^j` the inner integrals
//! reduce to sequences obeying one-step backward recurrences, so a whole
//! window of outer nodes costs one pass over the samples. The window grows
//! from both ends until the stopping rule holds at each of them.

use serde::{Deserialize, Serialize};

use crate::error::{QError, Result, Tail};
use crate::integral::{bilateral_sum, plan_sum, SidePlan};
use crate::lattice::{LatticeFunction, LogValue, Support};
use crate::params::QParams;
use crate::series::{geometric_tail, NeumaierSum, SeriesResult, TINY_FLOOR};
use crate::special::q_gamma;

/// Range of the outer q-integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// `∫_0^inf`
    FullLine,
    /// `∫_0^1`
    UnitInterval,
}

/// Order/weight `alpha`, exponent `p` and outer domain of a functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    pub alpha: f64,
    pub p: f64,
    pub domain: Domain,
}

impl OperatorParams {
    pub fn new(alpha: f64, p: f64, domain: Domain) -> Result<Self> {
        if !(p.is_finite() && p != 0.0) {
            return Err(QError::Parameter(format!("p must be finite and nonzero, got {p}")));
        }
        if !alpha.is_finite() {
            return Err(QError::Parameter(format!("alpha must be finite, got {alpha}")));
        }
        Ok(Self { alpha, p, domain })
    }

    /// `γ = (p - 1)/p - α`
    pub fn gamma(&self) -> f64 {
        (self.p - 1.0) / self.p - self.alpha
    }

    /// `p' = p/(p - 1)`
    pub fn p_conj(&self) -> f64 {
        self.p / (self.p - 1.0)
    }
}

/// `v^p`, refusing zeros for negative `p` and negative bases for
/// non-integer `p`.
pub fn pow_value(v: f64, p: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v.powf(p))
    } else if v == 0.0 {
        if p > 0.0 {
            Ok(0.0)
        } else {
            Err(QError::Domain(format!("zero sample raised to the power p = {p}")))
        }
    } else if p.fract() == 0.0 {
        Ok(v.powf(p))
    } else {
        Err(QError::Domain(format!("negative sample {v} raised to the non-integer power {p}")))
    }
}

/// `x^(alpha-1) ∫_0^x t^(-alpha) f(t) d_qt = (1 - q) Σ_k q^(k(1-alpha)) f(x q^k)`.
pub fn hardy_transform_series(f: &LatticeFunction, alpha: f64, x: f64, params: &QParams) -> Result<SeriesResult> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(QError::Domain(format!("Hardy transform needs x > 0, got {x}")));
    }
    let e = 1.0 - alpha;
    let s = plan_sum(
        |k| Ok(f.at_ln(x, k, params)?.scale_ln(e * k as f64 * params.ln_q()).to_f64()),
        SidePlan::small(f.support(), f.breaks(), x, params),
        params,
        "Hardy transform",
        Some(Tail::SmallT),
    )?;
    Ok(s.scaled(1.0 - params.q()))
}

pub fn hardy_transform(f: &LatticeFunction, alpha: f64, x: f64, params: &QParams) -> Result<f64> {
    Ok(hardy_transform_series(f, alpha, x, params)?.value)
}

/// `∫ f^p(t) d_qt` over the domain.
pub fn pnorm_p(f: &LatticeFunction, p: f64, domain: Domain, params: &QParams) -> Result<SeriesResult> {
    pnorm_weighted(f, p, domain, params, |_| 1.0)
}

/// `∫ f^p(t) w(t) d_qt` over the domain.
pub fn pnorm_weighted<W>(f: &LatticeFunction, p: f64, domain: Domain, params: &QParams, w: W) -> Result<SeriesResult>
where
    W: Fn(f64) -> f64,
{
    if !(p.is_finite() && p != 0.0) {
        return Err(QError::Parameter(format!("p must be finite and nonzero, got {p}")));
    }
    let term = |k: i64| {
        let ln_t = k as f64 * params.ln_q();
        let wt = w(ln_t.exp());
        if wt == 0.0 {
            return Ok(0.0);
        }
        Ok(wt * f.at_ln(1.0, k, params)?.powf(p)?.scale_ln(ln_t).to_f64())
    };
    // for p < 0 every node must be sampled so that zeros are caught
    let support = if p < 0.0 { Support::All } else { f.support() };
    let s = match domain {
        Domain::FullLine => bilateral_sum(term, support, f.breaks(), params, "p-th power q-integral")?,
        Domain::UnitInterval => plan_sum(
            term,
            SidePlan::small(support, f.breaks(), 1.0, params),
            params,
            "p-th power q-integral",
            Some(Tail::SmallT),
        )?,
    };
    Ok(s.scaled(1.0 - params.q()))
}

/// Window grown from both ends of the outer lattice sum.
const INITIAL_HALF_WIDTH: i64 = 32;

/// Inner means `G_j` on a window of outer nodes, with the log of a bound on
/// the error each inherits from cutting the samples at the window's top
/// (`+inf` when no bound is available yet).
struct Profile {
    means: Vec<LogValue>,
    ln_inner_err: Vec<f64>,
}

/// Estimate of `Σ_{m≥0} r^m s_(hi+1+m)` from the last two samples, assuming
/// they continue geometrically. `None` when that continuation diverges.
fn dropped_inner_tail(samples: &[LogValue], ln_r: f64) -> Option<LogValue> {
    let n = samples.len();
    let last = samples[n - 1];
    if last.is_zero() {
        return Some(LogValue::ZERO);
    }
    if n < 2 || samples[n - 2].is_zero() {
        return None;
    }
    let ln_rho = last.ln_abs - samples[n - 2].ln_abs;
    if ln_rho + ln_r >= 0.0 {
        None
    } else {
        Some(last.scale_ln(ln_rho - (-(ln_rho + ln_r).exp_m1()).ln()))
    }
}

/// Splits the dropped tail into the value seeding a recurrence and the log
/// of the uncertainty attached to it.
fn seed_and_error(tail: Option<LogValue>) -> (LogValue, f64) {
    match tail {
        Some(v) => (v, v.ln_abs),
        None => (LogValue::ZERO, f64::INFINITY),
    }
}

fn hardy_profile(samples: &[LogValue], alpha: f64, params: &QParams) -> Profile {
    let ln_r = (1.0 - alpha) * params.ln_q();
    let ln_scale = (1.0 - params.q()).ln();
    let n = samples.len();
    let mut means = vec![LogValue::ZERO; n];
    let mut ln_inner_err = vec![0.0; n];
    let (mut h, mut d) = seed_and_error(dropped_inner_tail(samples, ln_r));
    for i in (0..n).rev() {
        h = samples[i].plus(h.scale_ln(ln_r));
        d += ln_r;
        means[i] = h.scale_ln(ln_scale);
        ln_inner_err[i] = d + ln_scale;
    }
    Profile { means, ln_inner_err }
}

/// The Riemann-Liouville kernel `w_m = (q^(m+1); q)_(alpha-1)` stored as
/// `w_m - 1` up to the horizon past which `|w_m - 1| < eps`.
#[derive(Debug, Clone)]
pub struct RlKernel {
    alpha: f64,
    gamma_q: f64,
    corrections: Vec<f64>,
}

impl RlKernel {
    pub fn new(alpha: f64, params: &QParams) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(QError::Parameter(format!("Riemann-Liouville order must be positive, got {alpha}")));
        }
        let gamma_q = q_gamma(alpha, params)?;
        // ln w_m = Σ_{n≥m} u_n with u_n = ln(1 - q^(n+1)) - ln(1 - q^(n+alpha)); the
        // suffix sums keep w_m - 1 accurate far below the size of ln w_0
        let tol = params.eps_tail * 1e-2;
        let mut u = Vec::new();
        let mut small = 0;
        while small < params.consecutive_small {
            if u.len() >= params.k_max {
                return Err(QError::NonConvergent { what: "Riemann-Liouville kernel", tail: None, terms: u.len() });
            }
            let n = u.len() as f64;
            let un = (-params.pow(n + 1.0)).ln_1p() - (-params.pow(n + alpha)).ln_1p();
            small = if un.abs() < tol * (1.0 - params.q()) { small + 1 } else { 0 };
            u.push(un);
        }
        let mut suffix = NeumaierSum::new();
        let mut corrections = vec![0.0; u.len()];
        for m in (0..u.len()).rev() {
            suffix.add(u[m]);
            corrections[m] = suffix.value().exp_m1();
        }
        while corrections.last().is_some_and(|c| c.abs() < tol) {
            corrections.pop();
        }
        Ok(Self { alpha, gamma_q, corrections })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma_q(&self) -> f64 {
        self.gamma_q
    }

    /// Number of weights that differ from 1 by more than the tolerance.
    pub fn horizon(&self) -> usize {
        self.corrections.len()
    }

    /// `w_m - 1`
    pub fn correction(&self, m: usize) -> f64 {
        self.corrections.get(m).copied().unwrap_or(0.0)
    }

    pub fn weight(&self, m: usize) -> f64 {
        1.0 + self.correction(m)
    }

    fn max_correction(&self) -> f64 {
        self.corrections.iter().fold(0.0, |a, c| a.max(c.abs()))
    }
}

fn rl_profile(samples: &[LogValue], kernel: &RlKernel, params: &QParams) -> Profile {
    let q = params.q();
    let ln_q = params.ln_q();
    let ln_scale = ((1.0 - q) / kernel.gamma_q).ln();
    let n = samples.len();
    let horizon = kernel.horizon();
    let mut cq = Vec::with_capacity(horizon);
    let mut acc = 1.0;
    for m in 0..horizon {
        cq.push(kernel.corrections[m] * acc);
        acc *= q;
    }
    let mut means = vec![LogValue::ZERO; n];
    let mut ln_inner_err = vec![0.0; n];
    let dropped = dropped_inner_tail(samples, ln_q);
    // past the window the samples continue geometrically, as in the seed
    let ln_rho = match dropped {
        Some(v) if !v.is_zero() => Some(samples[n - 1].ln_abs - samples[n - 2].ln_abs),
        _ => None,
    };
    let (mut plain, d0) = seed_and_error(dropped);
    let mut d = d0 + kernel.max_correction().ln_1p();
    for i in (0..n).rev() {
        plain = samples[i].plus(plain.scale_ln(ln_q));
        d += ln_q;
        let mut r = plain;
        if !plain.is_zero() {
            let base = plain.ln_abs;
            let end = horizon.min(n - i);
            let mut corr = NeumaierSum::new();
            for (c, s) in cq[..end].iter().zip(&samples[i..i + end]) {
                if !s.is_zero() {
                    corr.add(c * s.sign * (s.ln_abs - base).exp());
                }
            }
            if let Some(lr) = ln_rho {
                let last = samples[n - 1];
                for (m, c) in cq.iter().enumerate().skip(end) {
                    let ln_s = last.ln_abs + lr * (i + m - (n - 1)) as f64;
                    corr.add(c * last.sign * (ln_s - base).exp());
                }
            }
            r = plain.plus(LogValue::from_f64(corr.value()).scale_ln(base));
        }
        means[i] = r.scale_ln(ln_scale);
        ln_inner_err[i] = d + ln_scale;
    }
    Profile { means, ln_inner_err }
}

/// `(1 - q) q^j G^p`, assembled in log space.
fn outer_term(j: i64, g: LogValue, p: f64, params: &QParams) -> Result<f64> {
    let ln_w = j as f64 * params.ln_q() + (1.0 - params.q()).ln();
    Ok(g.powf(p)?.scale_ln(ln_w).to_f64())
}

/// Growth, in e-folds, of a monotone run of edge terms that marks divergence.
const DIVERGENCE_EFOLDS: f64 = 60.0;

enum EndState {
    Settled { tail: f64 },
    Grow,
    Diverging,
}

/// Judges the outermost terms (innermost-first order) of one end.
fn judge_end(edge: &[f64], total: f64, params: &QParams, growth_needed: usize) -> EndState {
    let cs = params.consecutive_small;
    if edge.len() < cs + 1 {
        return EndState::Grow;
    }
    let floor = params.eps_tail * total.abs().max(TINY_FLOOR);
    let n = edge.len();
    let last = &edge[n - cs - 1..];
    let negligible = last[1..].iter().all(|t| t.abs() < floor);
    let mut ratio: f64 = 0.0;
    for w in last.windows(2) {
        if w[0] != 0.0 {
            ratio = ratio.max(w[1].abs() / w[0].abs());
        } else if w[1] != 0.0 {
            ratio = f64::INFINITY;
        }
    }
    if negligible && ratio < 1.0 {
        return EndState::Settled { tail: geometric_tail(last[cs].abs(), ratio, cs) };
    }
    if negligible && last[cs] == 0.0 {
        return EndState::Settled { tail: 0.0 };
    }
    if !negligible {
        // a sum of powers can climb for many e-folds past the last cutoff
        // before its dominant exponent takes over, so only a long and steep
        // climb counts as divergence
        let run = edge.windows(2).rev().take_while(|w| w[1].abs() >= w[0].abs() && w[0] != 0.0).count();
        if run >= growth_needed && (edge[n - 1].abs() / edge[n - 1 - run].abs()).ln() >= DIVERGENCE_EFOLDS {
            return EndState::Diverging;
        }
    }
    EndState::Grow
}

/// Evaluates `(1 - q) Σ_j q^j G_j^p` over the domain, where the inner means
/// `G_j` come from `profile(samples, lo)` on the window `[lo, hi]`.
fn outer_lattice_sum<P>(
    f: &LatticeFunction,
    op: &OperatorParams,
    params: &QParams,
    what: &'static str,
    profile: P,
) -> Result<SeriesResult>
where
    P: Fn(&[LogValue]) -> Profile,
{
    let p = op.p;
    let support = if p < 0.0 { Support::All } else { f.support() };
    let unit = op.domain == Domain::UnitInterval;
    let k_max = params.k_max as i64;
    let per_efold = (1.0 / params.ln_q().abs()).ceil().max(1.0) as usize;
    let growth_needed = params.consecutive_small * per_efold;

    // the window starts out covering every cutoff of f
    let small = SidePlan::small(support, f.breaks(), 1.0, params);
    let first_live = small.map_or(0, |s| s.start.max(s.settle));
    let mut hi = (first_live + INITIAL_HALF_WIDTH).min(k_max);
    let last_live = SidePlan::large(support, f.breaks(), params).map_or(-1, |s| s.start.min(s.settle));
    let mut lo = if unit { 0 } else { (last_live - INITIAL_HALF_WIDTH).max(-k_max) };

    let sample = |k: i64| -> Result<LogValue> {
        let v = f.at_ln(1.0, k, params)?;
        if p < 0.0 && v.is_zero() {
            return Err(QError::Domain(format!("zero sample at t = q^{k} with p = {p}")));
        }
        Ok(v)
    };
    let mut samples: Vec<LogValue> = (lo..=hi).map(sample).collect::<Result<_>>()?;

    loop {
        let prof = profile(&samples);
        let mut acc = NeumaierSum::new();
        let mut terms = Vec::with_capacity(samples.len());
        let mut inner = 0.0;
        let mut rounding = 0.0;
        for (i, (&g, &de)) in prof.means.iter().zip(&prof.ln_inner_err).enumerate() {
            let j = lo + i as i64;
            let o = outer_term(j, g, p, params)?;
            if !o.is_finite() {
                let tail = if j < 0 { Tail::LargeT } else { Tail::SmallT };
                return Err(QError::NonConvergent { what, tail: Some(tail), terms: samples.len() });
            }
            acc.add(o);
            terms.push(o);
            if de > f64::NEG_INFINITY {
                inner += if !g.is_zero() {
                    let rel = (de - g.ln_abs).exp();
                    o.abs() * p.abs() * rel * (1.0 + rel).powf(p.abs())
                } else {
                    (1.0 - params.q()) * (j as f64 * params.ln_q() + p * de).exp()
                };
            }
            let ln_g = if g.is_zero() { 0.0 } else { g.ln_abs.abs() };
            rounding += o.abs() * (16.0 + (j as f64 * params.ln_q()).abs() + p.abs() * (ln_g + 16.0));
        }
        let total = acc.value();
        let floor = params.eps_tail * total.abs().max(TINY_FLOOR);

        let hi_state = {
            let s = judge_end(&terms, total, params, growth_needed);
            match s {
                EndState::Settled { .. } if !(inner <= 10.0 * floor) => EndState::Grow,
                other => other,
            }
        };
        let lo_state = if unit {
            EndState::Settled { tail: 0.0 }
        } else {
            let rev: Vec<f64> = terms.iter().rev().copied().collect();
            judge_end(&rev, total, params, growth_needed)
        };

        if let (EndState::Settled { tail: lt }, EndState::Settled { tail: ht }) = (&lo_state, &hi_state) {
            return Ok(SeriesResult {
                value: total,
                abs_error: lt + ht + inner + acc.rounding_allowance() + f64::EPSILON * rounding,
                terms_used: terms.len(),
                converged: true,
            });
        }
        let span = hi - lo + 1;
        if matches!(hi_state, EndState::Diverging) {
            return Err(QError::NonConvergent { what, tail: Some(Tail::SmallT), terms: terms.len() });
        }
        if matches!(lo_state, EndState::Diverging) {
            return Err(QError::NonConvergent { what, tail: Some(Tail::LargeT), terms: terms.len() });
        }
        if matches!(hi_state, EndState::Grow) {
            if hi >= k_max {
                return Err(QError::NonConvergent { what, tail: Some(Tail::SmallT), terms: terms.len() });
            }
            let new_hi = (hi + span).min(k_max);
            for k in hi + 1..=new_hi {
                samples.push(sample(k)?);
            }
            hi = new_hi;
        }
        if matches!(lo_state, EndState::Grow) {
            if lo <= -k_max {
                return Err(QError::NonConvergent { what, tail: Some(Tail::LargeT), terms: terms.len() });
            }
            let new_lo = (lo - span).max(-k_max);
            let mut grown: Vec<LogValue> = (new_lo..lo).map(sample).collect::<Result<_>>()?;
            grown.extend_from_slice(&samples);
            samples = grown;
            lo = new_lo;
        }
    }
}

/// `L(f) = ∫ x^(p(alpha-1)) (∫_0^x t^(-alpha) f(t) d_qt)^p d_qx` over the
/// operator domain.
pub fn hardy_lhs(f: &LatticeFunction, op: &OperatorParams, params: &QParams) -> Result<SeriesResult> {
    let alpha = op.alpha;
    outer_lattice_sum(f, op, params, "Hardy functional", |s| hardy_profile(s, alpha, params))
}

/// `I_q^alpha f(x) = x^alpha / Γ_q(alpha) (1 - q) Σ_i w_i f(x q^i) q^i`.
pub fn rl_transform(f: &LatticeFunction, alpha: f64, x: f64, params: &QParams) -> Result<f64> {
    let kernel = RlKernel::new(alpha, params)?;
    Ok(rl_transform_with(f, &kernel, x, params)?.value)
}

/// [`rl_transform`] with a prebuilt kernel.
pub fn rl_transform_with(f: &LatticeFunction, kernel: &RlKernel, x: f64, params: &QParams) -> Result<SeriesResult> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(QError::Domain(format!("Riemann-Liouville transform needs x > 0, got {x}")));
    }
    let s = plan_sum(
        |k| {
            let w = kernel.weight(k as usize);
            Ok(w * f.at_ln(x, k, params)?.scale_ln(k as f64 * params.ln_q()).to_f64())
        },
        SidePlan::small(f.support(), f.breaks(), x, params),
        params,
        "Riemann-Liouville transform",
        Some(Tail::SmallT),
    )?;
    Ok(s.scaled(x.powf(kernel.alpha) * (1.0 - params.q()) / kernel.gamma_q))
}

/// `∫ (I_q^alpha f(x) / x^alpha)^p d_qx` over the operator domain.
pub fn rl_lhs(f: &LatticeFunction, op: &OperatorParams, params: &QParams) -> Result<SeriesResult> {
    let kernel = RlKernel::new(op.alpha, params)?;
    rl_lhs_with(f, op, &kernel, params)
}

/// [`rl_lhs`] with a prebuilt kernel; `op.alpha` must match the kernel.
pub fn rl_lhs_with(f: &LatticeFunction, op: &OperatorParams, kernel: &RlKernel, params: &QParams) -> Result<SeriesResult> {
    if op.alpha != kernel.alpha {
        return Err(QError::Parameter(format!(
            "kernel order {} does not match alpha = {}",
            kernel.alpha, op.alpha
        )));
    }
    outer_lattice_sum(f, op, params, "Riemann-Liouville functional", |s| rl_profile(s, kernel, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integral::jackson_integral;
    use crate::lattice::{make_extremal, ExtremalFamily, Positivity};
    use crate::special::{q_beta, q_number};
    use proptest::prelude::*;

    fn qp(q: f64) -> QParams {
        QParams::new(q).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    fn unit(beta: f64) -> LatticeFunction {
        make_extremal(ExtremalFamily::PowerUnit { beta })
    }

    /// Double sum with fixed index ranges and no recurrences, using
    /// `x^(alpha-1) ∫_0^x t^(-alpha) f d_qt = (1-q) Σ_m q^(m(1-alpha)) f(x q^m)`.
    fn brute_hardy(f: &LatticeFunction, alpha: f64, p: f64, qq: f64, js: std::ops::Range<i64>, ms: usize) -> f64 {
        let mut outer = 0.0;
        for j in js {
            let x = qq.powf(j as f64);
            let mut inner = 0.0;
            for m in 0..ms {
                let t = x * qq.powf(m as f64);
                if t < 1e-300 {
                    break;
                }
                inner += qq.powf(m as f64 * (1.0 - alpha)) * f.evaluate(t).unwrap();
            }
            let h = (1.0 - qq) * inner;
            outer += (1.0 - qq) * x * h.powf(p);
        }
        outer
    }

    #[test]
    fn transform_examples() {
        let p = qp(0.5);
        assert!(close(hardy_transform(&unit(0.0), 0.0, 1.0, &p).unwrap(), 1.0, 1e-15));
        assert!(close(hardy_transform(&LatticeFunction::power(1.0), 0.0, 1.0, &p).unwrap(), 2.0 / 3.0, 1e-15));
        let v = hardy_transform(&unit(-0.4), -1.0, 1.0, &p).unwrap();
        let oracle: f64 = 0.5 * (0..400).map(|k| 0.5f64.powf(k as f64 * 1.6)).sum::<f64>();
        assert!(close(v, oracle, 1e-14));
        assert!(close(v, 0.5 / (1.0 - 0.5f64.powf(1.6)), 1e-14));
    }

    #[test]
    fn hardy_lhs_examples() {
        let p = qp(0.5);
        let full = OperatorParams::new(0.0, 2.0, Domain::FullLine).unwrap();
        let l = hardy_lhs(&unit(1.0), &full, &p).unwrap();
        let floor = (0.5f64 / 0.75).powi(2) * 4.0 / 7.0;
        assert!(l.value >= floor);
        let oracle = brute_hardy(&unit(1.0), 0.0, 2.0, 0.5, -200..200, 200);
        assert!(close(l.value, oracle, 1e-13));

        assert_eq!(hardy_lhs(&LatticeFunction::zero(), &full, &p).unwrap().value, 0.0);

        let u = OperatorParams::new(-1.0, 1.0, Domain::UnitInterval).unwrap();
        let plain = make_extremal(ExtremalFamily::PowerPlain { beta: 0.0 });
        let l = hardy_lhs(&plain, &u, &p).unwrap();
        let oracle = brute_hardy(&plain, -1.0, 1.0, 0.5, 0..200, 200);
        assert!(close(l.value, oracle, 1e-13));
        let rhs = pnorm_p(&plain, 1.0, Domain::UnitInterval, &p).unwrap().value / q_number(1.0, &p);
        assert!(l.value < rhs);
    }

    #[test]
    fn hardy_lhs_matches_brute_force_with_tails() {
        let p = qp(0.7);
        let cases = [
            (0.0, 2.0, -0.3, -2.5),
            (-1.0, 3.0, -0.3, -2.5),
            (0.2, 2.0, 0.5, -1.0),
            (-2.0, -2.0, 0.3, 10.0),
        ];
        for (alpha, pp, beta1, beta2) in cases {
            let f = make_extremal(ExtremalFamily::PowerTwo { beta1, beta2 });
            let op = OperatorParams::new(alpha, pp, Domain::FullLine).unwrap();
            let l = hardy_lhs(&f, &op, &p).unwrap();
            let oracle = brute_hardy(&f, alpha, pp, 0.7, -150..1200, 1200);
            assert!(close(l.value, oracle, 1e-12), "{alpha} {pp}: {} vs {oracle}", l.value);
            assert!(l.abs_error < 1e-12 * l.value);
        }
    }

    #[test]
    fn hardy_lhs_negative_p_needs_positive_samples() {
        let p = qp(0.5);
        let op = OperatorParams::new(-2.0, -2.0, Domain::FullLine).unwrap();
        assert!(matches!(hardy_lhs(&unit(0.0), &op, &p), Err(QError::Domain(_))));
    }

    #[test]
    fn divergence_is_reported_per_tail() {
        let p = qp(0.5);
        let op = OperatorParams::new(0.0, 2.0, Domain::FullLine).unwrap();
        // p β + 1 < 0: the outer sum blows up toward t -> 0
        let err = hardy_lhs(&unit(-0.6), &op, &p).unwrap_err();
        assert!(matches!(err, QError::NonConvergent { tail: Some(Tail::SmallT), .. }), "{err:?}");
        let err = hardy_lhs(&LatticeFunction::constant(1.0), &op, &p).unwrap_err();
        assert!(matches!(err, QError::NonConvergent { tail: Some(Tail::LargeT), .. }), "{err:?}");
    }

    #[test]
    fn pnorm_examples() {
        let p = qp(0.5);
        let r = pnorm_p(&unit(1.0), 2.0, Domain::FullLine, &p).unwrap();
        assert!(close(r.value, 4.0 / 7.0, 1e-14));
        for pp in [0.5, 1.0, 3.0] {
            assert!(close(pnorm_p(&unit(0.0), pp, Domain::FullLine, &p).unwrap().value, 1.0, 1e-14));
        }
        let tail = make_extremal(ExtremalFamily::PowerTail { beta: -1.0 });
        assert!(close(pnorm_p(&tail, 2.0, Domain::FullLine, &p).unwrap().value, 1.0, 1e-14));
        assert!(matches!(pnorm_p(&unit(0.0), -1.0, Domain::FullLine, &p), Err(QError::Domain(_))));
        assert!(close(pnorm_p(&unit(0.0), -1.0, Domain::UnitInterval, &p).unwrap().value, 1.0, 1e-14));
    }

    #[test]
    fn rl_examples() {
        let p = qp(0.5);
        let f = make_extremal(ExtremalFamily::PowerTwo { beta1: 0.3, beta2: -2.0 });
        for x in [0.3, 1.0, 7.0] {
            let a = rl_transform(&f, 1.0, x, &p).unwrap();
            let b = jackson_integral(&f, x, &p).unwrap().value;
            assert!(close(a, b, 1e-14));
        }
        let one = LatticeFunction::constant(1.0);
        let v = rl_transform(&one, 2.0, 1.0, &p).unwrap();
        let g2 = q_gamma(2.0, &p).unwrap();
        let oracle = 0.5 * (0..200).map(|i| (1.0 - 0.5f64.powi(i + 1)) * 0.5f64.powi(i)).sum::<f64>() / g2;
        assert!(close(v, oracle, 1e-14));
        assert!(close(v, q_beta(1.0, 2.0, &p).unwrap() / g2, 1e-13));

        let v = rl_transform(&unit(0.5), 0.5, 1.0, &p).unwrap();
        let oracle = q_beta(1.5, 0.5, &p).unwrap() / q_gamma(0.5, &p).unwrap();
        assert!(close(v, oracle, 1e-12));
    }

    #[test]
    fn rl_lhs_examples() {
        let p = qp(0.5);
        let op = OperatorParams::new(0.5, 2.0, Domain::FullLine).unwrap();
        assert_eq!(rl_lhs(&LatticeFunction::zero(), &op, &p).unwrap().value, 0.0);

        let l = rl_lhs(&unit(0.0), &op, &p).unwrap();
        let g = q_gamma(0.5, &p).unwrap();
        let floor = 0.5 / (g * g * 0.5) * q_beta(1.0, 0.5, &p).unwrap().powi(2);
        assert!(l.value >= floor);

        // independent double sum with kernel weights from the real-order symbol
        let kernel = RlKernel::new(0.5, &p).unwrap();
        let mut oracle = 0.0;
        for j in -300i64..300 {
            let x = 0.5f64.powf(j as f64);
            let mut s = 0.0;
            for i in 0..300 {
                let w = crate::special::q_pochhammer_real(0.5f64.powi(i + 1), -0.5, &p).unwrap();
                s += w * 0.5f64.powi(i) * unit(0.0).evaluate(x * 0.5f64.powi(i)).unwrap();
            }
            oracle += 0.5 * x * (0.5 * s / g).powi(2);
        }
        assert!(close(l.value, oracle, 1e-12));
        let w0 = crate::special::q_pochhammer_real(0.5, -0.5, &p).unwrap();
        assert!(close(kernel.weight(0), w0, 1e-14));
    }

    #[test]
    fn rl_at_one_is_hardy_at_zero() {
        let p = qp(0.6);
        let f = make_extremal(ExtremalFamily::PowerTwo { beta1: -0.2, beta2: -1.5 });
        for pp in [1.5, 2.0, 3.0] {
            let a = rl_lhs(&f, &OperatorParams::new(1.0, pp, Domain::FullLine).unwrap(), &p).unwrap();
            let b = hardy_lhs(&f, &OperatorParams::new(0.0, pp, Domain::FullLine).unwrap(), &p).unwrap();
            assert!(close(a.value, b.value, 1e-13));
        }
    }

    #[test]
    fn unit_domain_only_uses_outer_nodes_in_unit_interval() {
        let p = qp(0.5);
        let f = make_extremal(ExtremalFamily::PowerPlain { beta: 0.3 });
        let op = OperatorParams::new(-0.5, 2.0, Domain::UnitInterval).unwrap();
        let l = hardy_lhs(&f, &op, &p).unwrap();
        assert!(close(l.value, brute_hardy(&f, -0.5, 2.0, 0.5, 0..300, 300), 1e-13));
    }

    #[test]
    fn accessors() {
        let op = OperatorParams::new(0.0, 2.0, Domain::FullLine).unwrap();
        assert_eq!(op.gamma(), 0.5);
        assert_eq!(op.p_conj(), 2.0);
        assert!(OperatorParams::new(0.0, 0.0, Domain::FullLine).is_err());
    }

    fn atom_mix(b1: f64, b2: f64, c: f64) -> LatticeFunction {
        unit(b1).sum(&make_extremal(ExtremalFamily::PowerTail { beta: b2 }).scaled(c))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn hardy_upper_bound_holds(
            qi in 0usize..3, pi in 0usize..3, ai in 0usize..3,
            b1 in 0.0f64..3.0, b2 in 0.0f64..3.0, c in 0.0f64..4.0,
        ) {
            let qq = [0.3, 0.5, 0.8][qi];
            let pp = [1.0, 2.0, 3.0][pi];
            // alpha = 0 needs p > 1
            let alpha = match (ai, pp) {
                (2, 2.0) => 0.2,
                (0, p1) if p1 > 1.0 => 0.0,
                _ => -1.0,
            };
            let p = qp(qq);
            let beta1 = -1.0 / pp + 0.05 + b1;
            let beta2 = -1.0 / pp - 0.05 - b2;
            let f = atom_mix(beta1, beta2, c);
            let op = OperatorParams::new(alpha, pp, Domain::FullLine).unwrap();
            let l = hardy_lhs(&f, &op, &p).unwrap();
            let n = pnorm_p(&f, pp, Domain::FullLine, &p).unwrap();
            let constant = q_number(op.gamma(), &p).powf(-pp);
            let budget = 10.0 * (l.abs_error + constant * n.abs_error);
            prop_assert!(l.value <= constant * n.value + budget);
        }

        #[test]
        fn rl_upper_bound_holds(
            pi in 0usize..3, ai in 0usize..3, qi in 0usize..3,
            b1 in 0.0f64..3.0, b2 in 0.0f64..3.0, c in 0.0f64..4.0,
        ) {
            let qq = [0.3, 0.5, 0.8][qi];
            let pp = [1.5, 2.0, 3.0][pi];
            let alpha = [0.5, 1.0, 2.0][ai];
            let p = qp(qq);
            let f = atom_mix(-1.0 / pp + 0.05 + b1, -1.0 / pp - 0.05 - b2, c);
            let op = OperatorParams::new(alpha, pp, Domain::FullLine).unwrap();
            let l = rl_lhs(&f, &op, &p).unwrap();
            let n = pnorm_p(&f, pp, Domain::FullLine, &p).unwrap();
            let ratio = q_gamma(1.0 - 1.0 / pp, &p).unwrap() / q_gamma(alpha + 1.0 - 1.0 / pp, &p).unwrap();
            let constant = ratio.powf(pp);
            let budget = 10.0 * (l.abs_error + constant * n.abs_error);
            prop_assert!(l.value <= constant * n.value + budget);
        }

        #[test]
        fn ratio_is_homogeneous(c in 0.01f64..100.0, b1 in 0.0f64..2.0) {
            let p = qp(0.5);
            let f = atom_mix(-0.45 + b1, -0.6 - b1, 1.0);
            let op = OperatorParams::new(0.0, 2.0, Domain::FullLine).unwrap();
            let r1 = hardy_lhs(&f, &op, &p).unwrap().value / pnorm_p(&f, 2.0, Domain::FullLine, &p).unwrap().value;
            let g = f.scaled(c);
            let r2 = hardy_lhs(&g, &op, &p).unwrap().value / pnorm_p(&g, 2.0, Domain::FullLine, &p).unwrap().value;
            prop_assert!(close(r1, r2, 1e-12));
        }
    }

    #[test]
    fn strictly_positive_negative_p() {
        let p = qp(0.5);
        let op = OperatorParams::new(-2.0, -2.0, Domain::FullLine).unwrap();
        let f = LatticeFunction::new("bump", Positivity::StrictlyPositive, Support::All, |t| {
            if t <= 1.0 { t.powf(0.3) } else { t.powf(10.0) }
        });
        let l = hardy_lhs(&f, &op, &p).unwrap();
        let n = pnorm_p(&f, -2.0, Domain::FullLine, &p).unwrap();
        let constant = q_number(op.gamma(), &p).powf(2.0);
        assert!(l.value <= constant * n.value);
    }
}
