//! Jackson q-integrals on `[0, x]`, improper q-integrals on `[0, inf)` and
//! integrals over `[a, b]`.

use crate::error::{QError, Result, Tail};
use crate::lattice::{first_index_at_most, last_index_at_least, LatticeFunction, Support};
use crate::params::QParams;
use crate::series::{sum_series, NeumaierSum, SeriesResult};

/// Indices for one side of a lattice sum. Every `k` from `start` through
/// `settle` is summed outright, the stopping rule only runs past `settle`,
/// and nothing past `end` is sampled. Summing through the cutoffs first keeps
/// a run of zeros between two pieces of a function from ending the sum early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SidePlan {
    pub start: i64,
    pub step: i64,
    pub settle: i64,
    pub end: Option<i64>,
}

impl SidePlan {
    /// `k = 0, 1, ...` over the nodes `x q^k`, toward `t -> 0`. `None` when
    /// the support misses every node.
    pub(crate) fn small(support: Support, breaks: (f64, f64), x: f64, params: &QParams) -> Option<Self> {
        let start = support.upper().map_or(0, |b| first_index_at_most(b, x, params).max(0));
        let end = support.lower().map(|a| last_index_at_least(a, x, params));
        if end.is_some_and(|e| e < start) {
            return None;
        }
        let settle = last_index_at_least(breaks.0, x, params);
        Some(Self { start, step: 1, settle, end })
    }

    /// `k = -1, -2, ...` over the nodes `q^k`, toward `t -> inf`.
    pub(crate) fn large(support: Support, breaks: (f64, f64), params: &QParams) -> Option<Self> {
        let start = support.lower().map_or(-1, |a| last_index_at_least(a, 1.0, params).min(-1));
        let end = support.upper().map(|b| first_index_at_most(b, 1.0, params));
        if end.is_some_and(|e| e > start) {
            return None;
        }
        let settle = first_index_at_most(breaks.1, 1.0, params);
        Some(Self { start, step: -1, settle, end })
    }

    /// The last index summed outright.
    pub(crate) fn last_explicit(&self) -> i64 {
        self.end.unwrap_or(self.settle)
    }
}

/// Sums `term` along `plan`; an empty plan sums to zero.
pub(crate) fn plan_sum<F>(
    mut term: F,
    plan: Option<SidePlan>,
    params: &QParams,
    what: &'static str,
    tail: Option<Tail>,
) -> Result<SeriesResult>
where
    F: FnMut(i64) -> Result<f64>,
{
    let Some(plan) = plan else {
        return Ok(SeriesResult::exact(0.0));
    };
    let last = plan.last_explicit();
    let count = ((last - plan.start) * plan.step + 1).max(0);
    if count > params.k_max as i64 {
        return Err(QError::NonConvergent { what, tail, terms: params.k_max });
    }
    let mut acc = NeumaierSum::new();
    for i in 0..count {
        let t = term(plan.start + i * plan.step)?;
        if !t.is_finite() {
            return Err(QError::NonConvergent { what, tail, terms: i as usize + 1 });
        }
        acc.add(t);
    }
    let head = SeriesResult {
        value: acc.value(),
        abs_error: acc.rounding_allowance(),
        terms_used: count as usize,
        converged: true,
    };
    if plan.end.is_some() {
        return Ok(head);
    }
    let next = if count > 0 { last + plan.step } else { plan.start };
    let rest = sum_series(term, next, plan.step, params.k_max, params, what, tail)?;
    Ok(head.plus(rest))
}

/// Sums `term(k)` over `k ∈ ℤ` as two independently truncated one-sided
/// series toward `t -> 0` and `t -> inf`.
pub(crate) fn bilateral_sum<F>(
    mut term: F,
    support: Support,
    breaks: (f64, f64),
    params: &QParams,
    what: &'static str,
) -> Result<SeriesResult>
where
    F: FnMut(i64) -> Result<f64>,
{
    let small = plan_sum(&mut term, SidePlan::small(support, breaks, 1.0, params), params, what, Some(Tail::SmallT))?;
    let large = plan_sum(&mut term, SidePlan::large(support, breaks, params), params, what, Some(Tail::LargeT))?;
    Ok(small.plus(large))
}

/// `∫_0^x f(t) d_qt = (1 - q) x Σ_{k≥0} q^k f(x q^k)`.
pub fn jackson_integral(f: &LatticeFunction, x: f64, params: &QParams) -> Result<SeriesResult> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(QError::Domain(format!("Jackson integral needs x > 0, got {x}")));
    }
    let s = plan_sum(
        |k| Ok(f.at_ln(x, k, params)?.scale_ln(k as f64 * params.ln_q()).to_f64()),
        SidePlan::small(f.support(), f.breaks(), x, params),
        params,
        "Jackson integral",
        Some(Tail::SmallT),
    )?;
    Ok(s.scaled((1.0 - params.q()) * x))
}

/// `∫_0^inf f(t) d_qt = (1 - q) Σ_{k∈ℤ} q^k f(q^k)`, each tail truncated on
/// its own.
pub fn improper_integral(f: &LatticeFunction, params: &QParams) -> Result<SeriesResult> {
    let s = bilateral_sum(
        |k| Ok(f.at_ln(1.0, k, params)?.scale_ln(k as f64 * params.ln_q()).to_f64()),
        f.support(),
        f.breaks(),
        params,
        "improper q-integral",
    )?;
    Ok(s.scaled(1.0 - params.q()))
}

/// `∫_a^b f d_qt = ∫_0^b - ∫_0^a`, with `b = inf` allowed.
pub fn interval_integral(f: &LatticeFunction, a: f64, b: f64, params: &QParams) -> Result<SeriesResult> {
    if !(a > 0.0 && a < b) {
        return Err(QError::Domain(format!("interval integral needs 0 < a < b, got a = {a}, b = {b}")));
    }
    let upper = if b == f64::INFINITY {
        improper_integral(f, params)?
    } else {
        jackson_integral(f, b, params)?
    };
    Ok(upper.minus(jackson_integral(f, a, params)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_extremal, ExtremalFamily, Positivity};
    use crate::special::q_number;
    use proptest::prelude::*;

    fn q(q: f64) -> QParams {
        QParams::new(q).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    /// Plain loop over `k` in `range`, no stopping rule.
    fn brute(f: impl Fn(f64) -> f64, qq: f64, range: std::ops::RangeInclusive<i64>) -> f64 {
        (1.0 - qq) * range.map(|k| qq.powi(k as i32) * f(qq.powi(k as i32))).sum::<f64>()
    }

    #[test]
    fn jackson_examples() {
        let p = q(0.5);
        assert!(close(jackson_integral(&LatticeFunction::constant(1.0), 1.0, &p).unwrap().value, 1.0, 1e-15));
        assert!(close(jackson_integral(&LatticeFunction::power(2.0), 1.0, &p).unwrap().value, 4.0 / 7.0, 1e-15));
        let r = jackson_integral(&LatticeFunction::power(-0.5), 1.0, &p).unwrap();
        let oracle = brute(|t| t.powf(-0.5), 0.5, 0..=200);
        assert!(close(r.value, oracle, 1e-14));
        assert!(close(r.value, 1.0 + 0.5f64.sqrt(), 1e-14));
        assert!(close(r.value, 1.0 / q_number(0.5, &p), 1e-14));
    }

    #[test]
    fn jackson_rejects_nonpositive_x() {
        assert!(jackson_integral(&LatticeFunction::constant(1.0), 0.0, &q(0.5)).is_err());
    }

    #[test]
    fn improper_examples() {
        let p = q(0.5);
        let f2 = make_extremal(ExtremalFamily::PowerUnit { beta: 2.0 });
        assert!(close(improper_integral(&f2, &p).unwrap().value, 4.0 / 7.0, 1e-14));
        let chi = make_extremal(ExtremalFamily::PowerUnit { beta: 0.0 });
        assert!(close(improper_integral(&chi, &p).unwrap().value, 1.0, 1e-15));

        // t^(-1/2) on [1, inf) is not q-integrable: q^k f(q^k) = q^(k/2) grows as k -> -inf
        let slow = make_extremal(ExtremalFamily::PowerTail { beta: -0.5 });
        let err = improper_integral(&slow, &p).unwrap_err();
        assert!(matches!(err, QError::NonConvergent { tail: Some(Tail::LargeT), .. }));

        let tail = make_extremal(ExtremalFamily::PowerTail { beta: -1.5 });
        let r = improper_integral(&tail, &p).unwrap();
        let oracle = brute(|t| t.powf(-1.5), 0.5, -200..=0);
        assert!(close(r.value, oracle, 1e-14));
        assert!(close(r.value, 1.0 + 0.5f64.sqrt(), 1e-14));
    }

    #[test]
    fn improper_reports_failing_tail() {
        let p = q(0.5);
        let err = improper_integral(&LatticeFunction::constant(1.0), &p).unwrap_err();
        assert!(matches!(err, QError::NonConvergent { tail: Some(Tail::LargeT), .. }));
        let err = improper_integral(&LatticeFunction::power(-1.5), &p).unwrap_err();
        assert!(matches!(err, QError::NonConvergent { tail: Some(Tail::SmallT), .. }));
    }

    #[test]
    fn zero_gaps_between_pieces_are_crossed() {
        let p = q(0.8);
        let near = LatticeFunction::power_atom(-1.0, Support::Between(1.5, 2.0), 1.0);
        let far = LatticeFunction::power_atom(-2.0, Support::From(50.0), 1.0);
        let tiny = LatticeFunction::power_atom(0.0, Support::Between(0.02, 0.03), 1.0);
        let f = near.sum(&far).sum(&tiny);
        let r = improper_integral(&f, &p).unwrap();
        let g = |t: f64| f.evaluate(t).unwrap();
        let oracle: f64 = (-400..=400).map(|k| 0.2 * 0.8f64.powi(k) * g(0.8f64.powi(k))).sum();
        assert!(close(r.value, oracle, 1e-12), "{} vs {oracle}", r.value);
        // Jackson integral from far above the support
        let j = jackson_integral(&f, 1e3, &p).unwrap();
        let oracle: f64 = (0..=600).map(|k| 0.2 * 1e3 * 0.8f64.powi(k) * g(1e3 * 0.8f64.powi(k))).sum();
        assert!(close(j.value, oracle, 1e-12), "{} vs {oracle}", j.value);
    }

    #[test]
    fn interval_examples() {
        let p = q(0.5);
        let one = LatticeFunction::constant(1.0);
        assert!(close(interval_integral(&one, 0.5, 1.0, &p).unwrap().value, 0.5, 1e-15));
        assert!(interval_integral(&one, 1.0, f64::INFINITY, &p).unwrap_err().is_non_convergent());

        let f = make_extremal(ExtremalFamily::PowerTail { beta: -2.0 });
        let r = interval_integral(&f, 1.0, f64::INFINITY, &p).unwrap();
        // jackson part on (0,1] samples only t = 1, the node shared by both pieces
        let oracle = brute(|t| t.powf(-2.0), 0.5, -200..=0) - 0.5;
        assert!(close(r.value, oracle, 1e-14));
        assert!(close(r.value, 0.5, 1e-14));
        assert!(interval_integral(&one, 1.0, 0.5, &p).is_err());
    }

    #[test]
    fn far_support_does_not_stop_early() {
        let p = q(0.99);
        let f = make_extremal(ExtremalFamily::PowerUnit { beta: 0.0 }).dilated(1e6);
        // f(u) = 1 on (0, 1e-6]
        let r = jackson_integral(&f, 1.0, &p).unwrap();
        let k0 = first_index_at_most(1e-6, 1.0, &p);
        assert!(close(r.value, p.pow(k0 as f64), 1e-12));
        let g = make_extremal(ExtremalFamily::PowerTail { beta: -2.0 }).dilated(1e-6);
        let r = improper_integral(&g, &p).unwrap();
        assert!(r.value > 0.0);
    }

    fn test_function(kind: u8, beta: f64) -> LatticeFunction {
        match kind % 3 {
            0 => make_extremal(ExtremalFamily::PowerUnit { beta }),
            1 => make_extremal(ExtremalFamily::PowerTail { beta: -beta - 2.0 }),
            _ => make_extremal(ExtremalFamily::PowerTwo { beta1: beta, beta2: -beta - 2.5 }),
        }
    }

    proptest! {
        #[test]
        fn additivity(kind in 0u8..3, beta in -0.9f64..3.0, qq in 0.2f64..0.9) {
            let p = q(qq);
            let f = test_function(kind, beta);
            let whole = improper_integral(&f, &p).unwrap();
            let head = jackson_integral(&f, 1.0, &p).unwrap();
            let tail = interval_integral(&f, 1.0, f64::INFINITY, &p).unwrap();
            let budget = whole.abs_error + head.abs_error + 2.0 * tail.abs_error + 1e-15 * whole.value.abs();
            prop_assert!((whole.value - head.value - tail.value).abs() <= budget);
        }

        #[test]
        fn homogeneity(kind in 0u8..3, beta in -0.9f64..3.0, qq in 0.2f64..0.9, ci in 0usize..3) {
            let c = [-2.0, 0.5, 10.0][ci];
            let p = q(qq);
            let f = test_function(kind, beta);
            let a = improper_integral(&f.scaled(c), &p).unwrap().value;
            let b = improper_integral(&f, &p).unwrap().value;
            prop_assert!(close(a, c * b, 1e-13));
        }

        #[test]
        fn scaling(beta in -0.9f64..3.0, qq in 0.2f64..0.9, li in 0usize..3) {
            let l = [0.25, 2.0, 8.0][li];
            let p = q(qq);
            let f = LatticeFunction::new("smooth", Positivity::StrictlyPositive, Support::All, move |t| {
                t.powf(beta) / (1.0 + t)
            });
            let lhs = jackson_integral(&f, l, &p).unwrap().value;
            let rhs = l * jackson_integral(&f.dilated(l), 1.0, &p).unwrap().value;
            prop_assert!(close(lhs, rhs, 1e-12));
        }

        #[test]
        fn power_rule(s in -0.95f64..5.0, x in 0.1f64..10.0, qq in 0.1f64..0.95) {
            let p = q(qq);
            let r = jackson_integral(&LatticeFunction::power(s), x, &p).unwrap();
            let exact = x.powf(s + 1.0) / q_number(s + 1.0, &p);
            prop_assert!((r.value - exact).abs() <= r.abs_error + 1e-13 * exact, "{} vs {exact}, budget {}", r.value, r.abs_error);
            prop_assert!(r.abs_error <= 1e-9 * exact);
        }

        #[test]
        fn monotonicity(beta in -0.9f64..3.0, shift in 0.0f64..2.0, qq in 0.2f64..0.9) {
            let p = q(qq);
            let f = make_extremal(ExtremalFamily::PowerUnit { beta });
            let g = make_extremal(ExtremalFamily::PowerUnit { beta: beta + shift });
            let a = jackson_integral(&f, 1.0, &p).unwrap();
            let b = jackson_integral(&g, 1.0, &p).unwrap();
            prop_assert!(a.value >= b.value - (a.abs_error + b.abs_error));
        }
    }
}
