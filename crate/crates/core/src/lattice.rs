//! Functions sampled on the q-lattice `{x q^k}` and the power-law test
//! families whose ratios approach the sharp constants.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::params::QParams;

/// Sign contract of a [`LatticeFunction`], checked on every sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Positivity {
    NonNegative,
    StrictlyPositive,
    Unrestricted,
}

/// Where a function may be nonzero. Bounds are inclusive, so the lattice
/// point `t = 1 = q^0` belongs to both `(0,1]` and `[1,inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "bound")]
pub enum Support {
    All,
    /// `(0, b]`
    UpTo(f64),
    /// `[a, inf)`
    From(f64),
    /// `[a, b]`
    Between(f64, f64),
}

impl Support {
    pub const UNIT_INTERVAL: Support = Support::UpTo(1.0);
    pub const TAIL_INTERVAL: Support = Support::From(1.0);

    pub fn contains(&self, t: f64) -> bool {
        self.contains_ln(t.ln())
    }

    /// Membership of `t = exp(ln_t)`, decided on the logarithm so that it
    /// agrees with lattice points far outside the floating-point range.
    pub fn contains_ln(&self, ln_t: f64) -> bool {
        match *self {
            Support::All => true,
            Support::UpTo(b) => ln_t <= b.ln(),
            Support::From(a) => ln_t >= a.ln(),
            Support::Between(a, b) => ln_t >= a.ln() && ln_t <= b.ln(),
        }
    }

    /// Positive lower bound, if any.
    pub fn lower(&self) -> Option<f64> {
        match *self {
            Support::From(a) | Support::Between(a, _) if a > 0.0 => Some(a),
            _ => None,
        }
    }

    /// Finite upper bound, if any.
    pub fn upper(&self) -> Option<f64> {
        match *self {
            Support::UpTo(b) | Support::Between(_, b) if b.is_finite() => Some(b),
            _ => None,
        }
    }

    fn from_bounds(lower: Option<f64>, upper: Option<f64>) -> Self {
        match (lower, upper) {
            (None, None) => Support::All,
            (None, Some(b)) => Support::UpTo(b),
            (Some(a), None) => Support::From(a),
            (Some(a), Some(b)) => Support::Between(a, b),
        }
    }

    /// Smallest support containing both.
    pub fn hull(&self, other: &Support) -> Support {
        let lower = match (self.lower(), other.lower()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        };
        let upper = match (self.upper(), other.upper()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        Support::from_bounds(lower, upper)
    }

    /// The cutoff points, as `(smallest, largest)`; `(1, 1)` without any.
    fn breaks(&self) -> (f64, f64) {
        match (self.lower(), self.upper()) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, a),
            (None, Some(b)) => (b, b),
            (None, None) => (1.0, 1.0),
        }
    }

    fn dilated(self, l: f64) -> Self {
        Support::from_bounds(self.lower().map(|a| a / l), self.upper().map(|b| b / l))
    }
}

/// A real number stored as `sign * exp(ln_abs)`, so that samples like
/// `(q^k)^beta` with `|k|` in the tens of thousands stay representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    /// -1, 0 or 1
    pub sign: f64,
    pub ln_abs: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue { sign: 0.0, ln_abs: f64::NEG_INFINITY };

    pub fn positive(ln_abs: f64) -> Self {
        Self { sign: 1.0, ln_abs }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            Self { sign: v.signum(), ln_abs: v.abs().ln() }
        }
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.sign == 0.0 || self.ln_abs.is_finite()
    }

    /// Multiplies by `exp(d)`.
    pub fn scale_ln(self, d: f64) -> Self {
        if self.sign == 0.0 {
            self
        } else {
            Self { sign: self.sign, ln_abs: self.ln_abs + d }
        }
    }

    pub fn mul_f64(self, c: f64) -> Self {
        if c == 0.0 || self.sign == 0.0 {
            Self::ZERO
        } else {
            Self { sign: self.sign * c.signum(), ln_abs: self.ln_abs + c.abs().ln() }
        }
    }

    pub fn plus(self, other: Self) -> Self {
        if other.sign == 0.0 {
            return self;
        }
        if self.sign == 0.0 {
            return other;
        }
        let (big, small) = if self.ln_abs >= other.ln_abs { (self, other) } else { (other, self) };
        let rel = (small.ln_abs - big.ln_abs).exp();
        if big.sign == small.sign {
            Self { sign: big.sign, ln_abs: big.ln_abs + rel.ln_1p() }
        } else if rel == 1.0 {
            Self::ZERO
        } else {
            Self { sign: big.sign, ln_abs: big.ln_abs + (-rel).ln_1p() }
        }
    }

    /// `v^p`, refusing zeros for negative `p` and negative bases for
    /// non-integer `p`.
    pub fn powf(self, p: f64) -> Result<Self> {
        if self.sign > 0.0 {
            Ok(Self::positive(p * self.ln_abs))
        } else if self.sign == 0.0 {
            if p > 0.0 {
                Ok(Self::ZERO)
            } else {
                Err(QError::Domain(format!("zero raised to the power p = {p}")))
            }
        } else if p.fract() == 0.0 {
            let sign = if p % 2.0 == 0.0 { 1.0 } else { -1.0 };
            Ok(Self { sign, ln_abs: p * self.ln_abs })
        } else {
            Err(QError::Domain(format!("negative value raised to the non-integer power {p}")))
        }
    }
}

/// The lattice point `x q^k`.
#[inline]
pub fn lattice_point(x: f64, k: i64, params: &QParams) -> f64 {
    x * params.pow(k as f64)
}

/// `ln(x q^k)`
#[inline]
pub fn ln_lattice_point(x: f64, k: i64, params: &QParams) -> f64 {
    x.ln() + k as f64 * params.ln_q()
}

/// Smallest `k` with `x q^k ≤ b`.
pub(crate) fn first_index_at_most(b: f64, x: f64, params: &QParams) -> i64 {
    let s = Support::UpTo(b);
    let mut k = ((b / x).ln() / params.ln_q()).ceil() as i64 - 2;
    while !s.contains_ln(ln_lattice_point(x, k, params)) {
        k += 1;
    }
    while s.contains_ln(ln_lattice_point(x, k - 1, params)) {
        k -= 1;
    }
    k
}

/// Largest `k` with `x q^k ≥ a`.
pub(crate) fn last_index_at_least(a: f64, x: f64, params: &QParams) -> i64 {
    let s = Support::From(a);
    let mut k = ((a / x).ln() / params.ln_q()).floor() as i64 + 2;
    while !s.contains_ln(ln_lattice_point(x, k, params)) {
        k -= 1;
    }
    while s.contains_ln(ln_lattice_point(x, k + 1, params)) {
        k += 1;
    }
    k
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type LogEvaluator = Arc<dyn Fn(f64) -> LogValue + Send + Sync>;

/// An evaluation oracle `t -> f(t)` for `t > 0`, only ever sampled on
/// lattice points. The closure must be reentrant; it may be called from
/// several threads at once.
///
/// A function may also carry a log-space evaluator `ln t -> f(t)` as a
/// [`LogValue`]. Without one, lattice points beyond the range of `f64`
/// cannot be sampled.
#[derive(Clone)]
pub struct LatticeFunction {
    eval: Evaluator,
    log_eval: Option<LogEvaluator>,
    positivity: Positivity,
    support: Support,
    /// Outside `[breaks.0, breaks.1]` the function has no further cutoffs, so
    /// tail sums may apply the stopping rule there.
    breaks: (f64, f64),
    label: String,
}

impl fmt::Debug for LatticeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticeFunction")
            .field("label", &self.label)
            .field("positivity", &self.positivity)
            .field("support", &self.support)
            .field("log_space", &self.log_eval.is_some())
            .finish()
    }
}

impl LatticeFunction {
    pub fn new<F>(label: impl Into<String>, positivity: Positivity, support: Support, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { eval: Arc::new(f), log_eval: None, positivity, support, breaks: support.breaks(), label: label.into() }
    }

    /// Declares the range `[lo, hi]` holding every jump or kink of the
    /// function. Sums sample all of it before any stopping rule applies.
    pub fn with_breaks(mut self, lo: f64, hi: f64) -> Self {
        self.breaks = (lo.min(hi), lo.max(hi));
        self
    }

    pub fn breaks(&self) -> (f64, f64) {
        self.breaks
    }

    /// Attaches a log-space evaluator; it must agree with the plain one.
    pub fn with_log_eval<G>(mut self, g: G) -> Self
    where
        G: Fn(f64) -> LogValue + Send + Sync + 'static,
    {
        self.log_eval = Some(Arc::new(g));
        self
    }

    pub fn zero() -> Self {
        Self::new("zero", Positivity::NonNegative, Support::All, |_| 0.0).with_log_eval(|_| LogValue::ZERO)
    }

    pub fn constant(c: f64) -> Self {
        let pos = if c > 0.0 { Positivity::StrictlyPositive } else { Positivity::Unrestricted };
        Self::new(format!("const({c})"), pos, Support::All, move |_| c)
            .with_log_eval(move |_| LogValue::from_f64(c))
    }

    /// `t^s` on the whole half-line.
    pub fn power(s: f64) -> Self {
        Self::new(format!("t^{s}"), Positivity::StrictlyPositive, Support::All, move |t| t.powf(s))
            .with_log_eval(move |lt| LogValue::positive(s * lt))
    }

    /// `c t^s` on `(0, 1]` or `[1, inf)`: the building block of the test corpus.
    pub fn power_atom(s: f64, support: Support, c: f64) -> Self {
        let cut = support;
        Self::new(format!("{c}*t^{s}"), Positivity::NonNegative, support, move |t| {
            if cut.contains(t) { c * t.powf(s) } else { 0.0 }
        })
        .with_log_eval(move |lt| {
            if cut.contains_ln(lt) { LogValue::positive(s * lt).mul_f64(c) } else { LogValue::ZERO }
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn positivity(&self) -> Positivity {
        self.positivity
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn has_log_eval(&self) -> bool {
        self.log_eval.is_some()
    }

    fn check(&self, v: f64, t: impl Fn() -> f64) -> Result<()> {
        let ok = match self.positivity {
            Positivity::NonNegative => v >= 0.0,
            Positivity::StrictlyPositive => v > 0.0,
            Positivity::Unrestricted => true,
        };
        if ok {
            Ok(())
        } else {
            Err(QError::Domain(format!(
                "{} violates its {:?} contract at t = {}",
                self.label,
                self.positivity,
                t()
            )))
        }
    }

    /// Samples `f(t)`, enforcing finiteness and the positivity contract.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let v = if self.support.contains(t) { (self.eval)(t) } else { 0.0 };
        if !v.is_finite() {
            return Err(QError::Evaluation { t, value: v });
        }
        self.check(v, || t)?;
        Ok(v)
    }

    /// Samples `f(exp(ln_t))` in log space.
    pub fn evaluate_ln(&self, ln_t: f64) -> Result<LogValue> {
        if !self.support.contains_ln(ln_t) {
            let v = LogValue::ZERO;
            self.check(0.0, || ln_t.exp())?;
            return Ok(v);
        }
        let v = match &self.log_eval {
            Some(g) => {
                let v = g(ln_t);
                if !v.is_finite() || v.ln_abs.is_nan() {
                    return Err(QError::Evaluation { t: ln_t.exp(), value: v.to_f64() });
                }
                v
            }
            None => {
                let t = ln_t.exp();
                if !(t.is_normal()) {
                    return Err(QError::Domain(format!(
                        "{} has no log-space evaluator and ln t = {ln_t} is outside the floating-point range",
                        self.label
                    )));
                }
                LogValue::from_f64(self.evaluate(t)?)
            }
        };
        self.check(v.sign, || ln_t.exp())?;
        Ok(v)
    }

    /// `f(x q^k)` in log space.
    pub fn at_ln(&self, x: f64, k: i64, params: &QParams) -> Result<LogValue> {
        self.evaluate_ln(ln_lattice_point(x, k, params))
    }

    /// `f(x q^k)`.
    pub fn at(&self, x: f64, k: i64, params: &QParams) -> Result<f64> {
        Ok(self.at_ln(x, k, params)?.to_f64())
    }

    /// `c f`.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.eval.clone();
        let positivity = match (self.positivity, c) {
            (p, c) if c > 0.0 => p,
            (Positivity::Unrestricted, _) => Positivity::Unrestricted,
            (_, 0.0) => Positivity::NonNegative,
            _ => Positivity::Unrestricted,
        };
        Self {
            eval: Arc::new(move |t| c * inner(t)),
            log_eval: self.log_eval.clone().map(|g| -> LogEvaluator { Arc::new(move |lt| g(lt).mul_f64(c)) }),
            positivity,
            support: self.support,
            breaks: self.breaks,
            label: format!("{c}*{}", self.label),
        }
    }

    /// `u -> f(l u)`.
    pub fn dilated(&self, l: f64) -> Self {
        let inner = self.eval.clone();
        let ln_l = l.ln();
        Self {
            eval: Arc::new(move |u| inner(l * u)),
            log_eval: self.log_eval.clone().map(|g| -> LogEvaluator { Arc::new(move |lu| g(lu + ln_l)) }),
            positivity: self.positivity,
            support: self.support.dilated(l),
            breaks: (self.breaks.0 / l, self.breaks.1 / l),
            label: format!("{}(({l})*t)", self.label),
        }
    }

    /// Pointwise sum; positivity, support and breaks are joined.
    pub fn sum(&self, other: &Self) -> Self {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let (sa, sb) = (self.support, other.support);
        let positivity = match (self.positivity, other.positivity) {
            (Positivity::Unrestricted, _) | (_, Positivity::Unrestricted) => Positivity::Unrestricted,
            (Positivity::StrictlyPositive, _) | (_, Positivity::StrictlyPositive) => {
                Positivity::StrictlyPositive
            }
            _ => Positivity::NonNegative,
        };
        let support = sa.hull(&sb);
        let breaks = (self.breaks.0.min(other.breaks.0), self.breaks.1.max(other.breaks.1));
        let log_eval = match (&self.log_eval, &other.log_eval) {
            (Some(ga), Some(gb)) => {
                let (ga, gb) = (ga.clone(), gb.clone());
                let g: LogEvaluator = Arc::new(move |lt| {
                    let x = if sa.contains_ln(lt) { ga(lt) } else { LogValue::ZERO };
                    let y = if sb.contains_ln(lt) { gb(lt) } else { LogValue::ZERO };
                    x.plus(y)
                });
                Some(g)
            }
            _ => None,
        };
        Self {
            eval: Arc::new(move |t| {
                let x = if sa.contains(t) { a(t) } else { 0.0 };
                let y = if sb.contains(t) { b(t) } else { 0.0 };
                x + y
            }),
            log_eval,
            positivity,
            support,
            breaks,
            label: format!("{}+{}", self.label, other.label),
        }
    }
}

/// Power-law test functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ExtremalFamily {
    /// `t^beta χ_(0,1]`
    PowerUnit { beta: f64 },
    /// `t^beta χ_[1,inf)`
    PowerTail { beta: f64 },
    /// `t^beta1 χ_(0,1] + t^beta2 χ_(1,inf)`
    PowerTwo { beta1: f64, beta2: f64 },
    /// `t^beta` without cutoff, meant for the unit-interval domain.
    PowerPlain { beta: f64 },
}

impl ExtremalFamily {
    pub fn beta(&self) -> f64 {
        match *self {
            ExtremalFamily::PowerUnit { beta }
            | ExtremalFamily::PowerTail { beta }
            | ExtremalFamily::PowerPlain { beta } => beta,
            ExtremalFamily::PowerTwo { beta1, .. } => beta1,
        }
    }
}

pub fn make_extremal(family: ExtremalFamily) -> LatticeFunction {
    match family {
        ExtremalFamily::PowerUnit { beta } => LatticeFunction::new(
            format!("t^{beta}·χ(0,1]"),
            Positivity::NonNegative,
            Support::UNIT_INTERVAL,
            move |t| if t <= 1.0 { t.powf(beta) } else { 0.0 },
        )
        .with_log_eval(move |lt| if lt <= 0.0 { LogValue::positive(beta * lt) } else { LogValue::ZERO }),
        ExtremalFamily::PowerTail { beta } => LatticeFunction::new(
            format!("t^{beta}·χ[1,inf)"),
            Positivity::NonNegative,
            Support::TAIL_INTERVAL,
            move |t| if t >= 1.0 { t.powf(beta) } else { 0.0 },
        )
        .with_log_eval(move |lt| if lt >= 0.0 { LogValue::positive(beta * lt) } else { LogValue::ZERO }),
        ExtremalFamily::PowerTwo { beta1, beta2 } => LatticeFunction::new(
            format!("t^{beta1}·χ(0,1]+t^{beta2}·χ(1,inf)"),
            Positivity::StrictlyPositive,
            Support::All,
            move |t| if t <= 1.0 { t.powf(beta1) } else { t.powf(beta2) },
        )
        .with_log_eval(move |lt| LogValue::positive(if lt <= 0.0 { beta1 * lt } else { beta2 * lt })),
        ExtremalFamily::PowerPlain { beta } => LatticeFunction::new(
            format!("t^{beta}"),
            Positivity::StrictlyPositive,
            Support::All,
            move |t| t.powf(beta),
        )
        .with_log_eval(move |lt| LogValue::positive(beta * lt)),
    }
}
