//! Error-tracked summation: compensated accumulation, the shared stopping
//! rule, and the geometric tail bound used by every truncated series.

use serde::Serialize;

use crate::error::{QError, Result, Tail};
use crate::params::QParams;

/// Floor under the running sum in the negligibility test.
pub const TINY_FLOOR: f64 = 1e-300;

/// Rounding allowance per unit of absolute mass, covering the few ulps each
/// term picks up from `exp`/`powf` before it reaches the accumulator.
pub const ROUNDING_ULPS: f64 = 8.0;

/// Value of a truncated series or product with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesResult {
    pub value: f64,
    pub abs_error: f64,
    pub terms_used: usize,
    pub converged: bool,
}

impl SeriesResult {
    pub fn exact(value: f64) -> Self {
        Self { value, abs_error: 0.0, terms_used: 0, converged: true }
    }

    /// Converts a non-converged result into `NonConvergent`.
    pub fn require(self, what: &'static str, tail: Option<Tail>) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(QError::NonConvergent { what, tail, terms: self.terms_used })
        }
    }

    pub fn scaled(self, c: f64) -> Self {
        Self { value: self.value * c, abs_error: self.abs_error * c.abs(), ..self }
    }

    pub fn plus(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            abs_error: self.abs_error + other.abs_error,
            terms_used: self.terms_used + other.terms_used,
            converged: self.converged && other.converged,
        }
    }

    pub fn minus(self, other: Self) -> Self {
        self.plus(other.scaled(-1.0))
    }
}

/// Kahan-Babuska-Neumaier accumulator that also tracks total absolute mass.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
    abs_mass: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_mass += x.abs();
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn abs_mass(&self) -> f64 {
        self.abs_mass
    }

    pub fn rounding_allowance(&self) -> f64 {
        ROUNDING_ULPS * f64::EPSILON * self.abs_mass
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Outcome of feeding one term into a [`TailMonitor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Continue,
    Settled,
    Diverging,
}

/// Applies the stopping rule to a stream of terms.
///
/// A term is negligible when `|term| < eps * max(|partial|, TINY_FLOOR)`.
/// The series settles after `consecutive_small` negligible terms in a row. It
/// is declared divergent when successive non-negligible terms fail to shrink
/// over `consecutive_small` e-folds of the lattice variable, so that the
/// transient rise of a bump is not mistaken for divergence.
#[derive(Debug, Clone)]
pub struct TailMonitor {
    eps: f64,
    needed: usize,
    growth_needed: usize,
    small_run: usize,
    growth_run: usize,
    prev_abs: f64,
    worst_ratio: f64,
    recent: Vec<f64>,
    last_abs: f64,
}

impl TailMonitor {
    pub fn new(params: &QParams) -> Self {
        let per_efold = (1.0 / params.ln_q().abs()).ceil().max(1.0) as usize;
        let mut m = Self::with_policy(params.eps_tail, params.consecutive_small);
        m.growth_needed = m.needed.saturating_mul(per_efold);
        m
    }

    pub fn with_policy(eps: f64, needed: usize) -> Self {
        Self {
            eps,
            needed: needed.max(1),
            growth_needed: needed.max(1),
            small_run: 0,
            growth_run: 0,
            prev_abs: 0.0,
            worst_ratio: 0.0,
            recent: Vec::with_capacity(needed + 1),
            last_abs: 0.0,
        }
    }

    /// `partial` is the running sum including `term`.
    pub fn observe(&mut self, term: f64, partial: f64) -> Step {
        let a = term.abs();
        let negligible = a < self.eps * partial.abs().max(TINY_FLOOR);
        if negligible {
            self.small_run += 1;
            self.growth_run = 0;
        } else {
            self.small_run = 0;
            if self.prev_abs > 0.0 && a >= self.prev_abs {
                self.growth_run += 1;
            } else {
                self.growth_run = 0;
            }
        }
        self.recent.push(a);
        if self.recent.len() > self.needed + 1 {
            self.recent.remove(0);
        }
        self.prev_abs = a;
        self.last_abs = a;
        if self.small_run >= self.needed {
            self.worst_ratio = self.recent_ratio();
            Step::Settled
        } else if self.growth_run >= self.growth_needed {
            Step::Diverging
        } else {
            Step::Continue
        }
    }

    fn recent_ratio(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in self.recent.windows(2) {
            if w[0] > 0.0 {
                worst = worst.max(w[1] / w[0]);
            } else if w[1] > 0.0 {
                return f64::INFINITY;
            }
        }
        worst
    }

    /// Bound on the dropped remainder, extrapolating the worst recent
    /// term ratio geometrically.
    pub fn tail_bound(&self) -> f64 {
        geometric_tail(self.last_abs, self.worst_ratio, self.needed)
    }
}

/// `last * r / (1 - r)` when the ratio contracts, else a flat allowance.
pub fn geometric_tail(last: f64, ratio: f64, fallback_terms: usize) -> f64 {
    if last == 0.0 {
        0.0
    } else if ratio < 1.0 {
        last * ratio / (1.0 - ratio)
    } else {
        last * fallback_terms as f64
    }
}

/// Sums `term(start), term(start + step), ...` under the stopping rule.
///
/// `max_terms` caps the number of evaluated terms; exhausting it, or
/// detecting growth, yields `NonConvergent` tagged with `tail`.
pub fn sum_series<F>(
    mut term: F,
    start: i64,
    step: i64,
    max_terms: usize,
    params: &QParams,
    what: &'static str,
    tail: Option<Tail>,
) -> Result<SeriesResult>
where
    F: FnMut(i64) -> Result<f64>,
{
    let mut acc = NeumaierSum::new();
    let mut monitor = TailMonitor::new(params);
    let mut k = start;
    for n in 1..=max_terms {
        let t = term(k)?;
        if !t.is_finite() {
            return Err(QError::NonConvergent { what, tail, terms: n });
        }
        acc.add(t);
        match monitor.observe(t, acc.value()) {
            Step::Continue => {}
            Step::Settled => {
                return Ok(SeriesResult {
                    value: acc.value(),
                    abs_error: monitor.tail_bound() + acc.rounding_allowance(),
                    terms_used: n,
                    converged: true,
                });
            }
            Step::Diverging => return Err(QError::NonConvergent { what, tail, terms: n }),
        }
        k += step;
    }
    Err(QError::NonConvergent { what, tail, terms: max_terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_mass() {
        let s: NeumaierSum = [1e16, 1.0, -1e16, 1.0].into_iter().collect();
        assert_eq!(s.value(), 2.0);
        assert_eq!(s.abs_mass(), 2e16 + 2.0);
    }

    #[test]
    fn geometric_series_settles_with_tail_bound() {
        let params = QParams::new(0.5).unwrap();
        let r = sum_series(|k| Ok(0.5f64.powi(k as i32)), 0, 1, 1000, &params, "geo", None)
            .unwrap();
        assert!((r.value - 2.0).abs() <= r.abs_error.max(4.0 * f64::EPSILON));
        assert!(r.abs_error < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn growth_is_detected() {
        let params = QParams::new(0.5).unwrap();
        let err = sum_series(|k| Ok(2f64.powi(k as i32)), 0, 1, 1000, &params, "grow", Some(Tail::LargeT))
            .unwrap_err();
        assert!(matches!(err, QError::NonConvergent { tail: Some(Tail::LargeT), .. }));
    }

    #[test]
    fn budget_exhaustion_is_non_convergent() {
        let params = QParams::new(0.5).unwrap();
        let err = sum_series(|k| Ok(1.0 / (k as f64 + 1.0)), 0, 1, 50, &params, "harmonic", None)
            .unwrap_err();
        assert!(err.is_non_convergent());
    }

    #[test]
    fn zero_series_settles_at_zero() {
        let params = QParams::new(0.5).unwrap();
        let r = sum_series(|_| Ok(0.0), 0, 1, 100, &params, "zero", None).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.abs_error, 0.0);
        assert_eq!(r.terms_used, 5);
    }
}
