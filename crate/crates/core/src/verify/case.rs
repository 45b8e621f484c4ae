//! Case registry: which inequality, its parameter window, its sharp constant
//! and how both sides are evaluated for a given function.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::lattice::LatticeFunction;
use crate::operators::{
    hardy_lhs, hardy_transform_series, pnorm_p, pnorm_weighted, pow_value, rl_lhs_with, Domain, OperatorParams,
    RlKernel,
};
use crate::params::QParams;
use crate::series::SeriesResult;
use crate::special::{q_gamma, q_number};

/// The registered inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    /// Weighted Hardy inequality on `(0, inf)`, `p ≥ 1`.
    #[serde(rename = "hardy")]
    Hardy,
    /// Same inequality for `p < 0` and strictly positive `f`.
    #[serde(rename = "hardy-negative")]
    HardyNegative,
    /// Reverse Hardy inequality on `(0, inf)` for `0 < p < 1`.
    #[serde(rename = "hardy-reverse")]
    HardyReverse,
    /// Strict Hardy inequality on `(0, 1]`, `p ≥ 1` or `p < 0`.
    #[serde(rename = "hardy-unit")]
    HardyUnit,
    /// Reverse inequality on `(0, 1]` with the weight `1 - t^γ` on the norm side.
    #[serde(rename = "reverse-weighted")]
    ReverseWeighted,
    /// Reverse inequality on `(0, 1]` with a boundary term on the operator side.
    #[serde(rename = "reverse-boundary")]
    ReverseBoundary,
    /// Riemann-Liouville inequality on `(0, inf)`.
    #[serde(rename = "rl")]
    RiemannLiouville,
    /// Riemann-Liouville inequality on `(0, 1]`.
    #[serde(rename = "rl-unit")]
    RiemannLiouvilleUnit,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::Hardy,
        TheoremId::HardyNegative,
        TheoremId::HardyReverse,
        TheoremId::HardyUnit,
        TheoremId::ReverseWeighted,
        TheoremId::ReverseBoundary,
        TheoremId::RiemannLiouville,
        TheoremId::RiemannLiouvilleUnit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Hardy => "hardy",
            TheoremId::HardyNegative => "hardy-negative",
            TheoremId::HardyReverse => "hardy-reverse",
            TheoremId::HardyUnit => "hardy-unit",
            TheoremId::ReverseWeighted => "reverse-weighted",
            TheoremId::ReverseBoundary => "reverse-boundary",
            TheoremId::RiemannLiouville => "rl",
            TheoremId::RiemannLiouvilleUnit => "rl-unit",
        }
    }

    pub fn domain(self) -> Domain {
        match self {
            TheoremId::Hardy | TheoremId::HardyNegative | TheoremId::HardyReverse | TheoremId::RiemannLiouville => {
                Domain::FullLine
            }
            _ => Domain::UnitInterval,
        }
    }

    /// Whether the operator sits on the small side of the inequality.
    pub fn direction(self) -> Direction {
        match self {
            TheoremId::HardyReverse | TheoremId::ReverseWeighted | TheoremId::ReverseBoundary => Direction::Reverse,
            _ => Direction::Upper,
        }
    }

    /// The unit-interval forms are strict for every nonzero `f`.
    pub fn is_strict(self) -> bool {
        matches!(
            self,
            TheoremId::HardyUnit
                | TheoremId::ReverseWeighted
                | TheoremId::ReverseBoundary
                | TheoremId::RiemannLiouvilleUnit
        )
    }

    pub fn uses_rl(self) -> bool {
        matches!(self, TheoremId::RiemannLiouville | TheoremId::RiemannLiouvilleUnit)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = QError;

    fn from_str(s: &str) -> Result<Self> {
        let id = match s.trim() {
            "hardy" | "T3.1-upper" => TheoremId::Hardy,
            "hardy-negative" | "T3.1-neg" => TheoremId::HardyNegative,
            "hardy-reverse" | "T3.1-reverse" => TheoremId::HardyReverse,
            "hardy-unit" | "T3.2" => TheoremId::HardyUnit,
            "reverse-weighted" | "T3.3-corrected-(5.6)" | "T3.3-(5.6)" | "T3.3-5.6" => TheoremId::ReverseWeighted,
            "reverse-boundary" | "T3.3-corrected-(5.7)" | "T3.3-(5.7)" | "T3.3-5.7" => TheoremId::ReverseBoundary,
            "rl" | "T4.1" => TheoremId::RiemannLiouville,
            "rl-unit" | "C4.2" => TheoremId::RiemannLiouvilleUnit,
            other => return Err(QError::Parameter(format!("unknown case id '{other}'"))),
        };
        Ok(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// operator side ≤ constant × norm side
    Upper,
    /// norm side ≤ constant × operator side
    Reverse,
}

/// One inequality at one parameter point; constructed only inside its window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCase {
    pub theorem: TheoremId,
    pub q: f64,
    pub p: f64,
    pub alpha: f64,
}

impl InequalityCase {
    pub fn new(theorem: TheoremId, q: f64, p: f64, alpha: f64) -> Result<Self> {
        QParams::new(q)?;
        if !(p.is_finite() && p != 0.0 && alpha.is_finite()) {
            return Err(QError::Parameter(format!("p and alpha must be finite with p ≠ 0, got p = {p}, alpha = {alpha}")));
        }
        let hardy_window = alpha < (p - 1.0) / p;
        let ok = match theorem {
            TheoremId::Hardy => p >= 1.0 && hardy_window,
            TheoremId::HardyNegative => p < 0.0 && hardy_window,
            TheoremId::HardyReverse | TheoremId::ReverseWeighted | TheoremId::ReverseBoundary => {
                p > 0.0 && p < 1.0 && hardy_window
            }
            TheoremId::HardyUnit => !(0.0..1.0).contains(&p) && hardy_window,
            TheoremId::RiemannLiouville | TheoremId::RiemannLiouvilleUnit => p > 1.0 && alpha > 0.0,
        };
        if !ok {
            return Err(QError::Parameter(format!(
                "{theorem} is not defined at p = {p}, alpha = {alpha}: {}",
                window_text(theorem)
            )));
        }
        Ok(Self { theorem, q, p, alpha })
    }

    /// `γ = (p - 1)/p - alpha`
    pub fn gamma(&self) -> f64 {
        (self.p - 1.0) / self.p - self.alpha
    }

    /// `p' = p/(p - 1)`
    pub fn p_conj(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn op(&self) -> OperatorParams {
        OperatorParams { alpha: self.alpha, p: self.p, domain: self.theorem.domain() }
    }

    /// The exponent `-1/p` every extremal family approaches.
    pub fn critical_beta(&self) -> f64 {
        -1.0 / self.p
    }
}

impl fmt::Display for InequalityCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(q={}, p={}, alpha={})", self.theorem, self.q, self.p, self.alpha)
    }
}

fn window_text(theorem: TheoremId) -> &'static str {
    match theorem {
        TheoremId::Hardy => "needs p ≥ 1 and alpha < (p-1)/p",
        TheoremId::HardyNegative => "needs p < 0 and alpha < (p-1)/p",
        TheoremId::HardyUnit => "needs p ≥ 1 or p < 0, and alpha < (p-1)/p",
        TheoremId::HardyReverse | TheoremId::ReverseWeighted | TheoremId::ReverseBoundary => {
            "needs 0 < p < 1 and alpha < (p-1)/p"
        }
        TheoremId::RiemannLiouville | TheoremId::RiemannLiouvilleUnit => "needs p > 1 and alpha > 0",
    }
}

/// `1/[γ]_q^p` for the Hardy cases, `[γ]_q^p` for the reverse ones and
/// `(Γ_q(1 - 1/p) / Γ_q(alpha + 1 - 1/p))^p` for the Riemann-Liouville ones.
pub fn sharp_constant(case: &InequalityCase, params: &QParams) -> Result<f64> {
    let c = InequalityCase::new(case.theorem, case.q, case.p, case.alpha)?;
    let p = c.p;
    Ok(match c.theorem.direction() {
        Direction::Reverse => q_number(c.gamma(), params).powf(p),
        Direction::Upper if c.theorem.uses_rl() => {
            let s = 1.0 - 1.0 / p;
            (q_gamma(s, params)? / q_gamma(c.alpha + s, params)?).powf(p)
        }
        Direction::Upper => q_number(c.gamma(), params).powf(-p),
    })
}

/// Both sides of one inequality for one function. `lhs ≤ rhs` is the claim,
/// with the constant folded into `rhs`; `ratio = lhs / (rhs / constant)`
/// never exceeds the constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case: InequalityCase,
    pub function: String,
    pub direction: Direction,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub ratio: f64,
    pub satisfied: bool,
    pub margin: f64,
    pub error_budget: f64,
    pub degenerate: bool,
    pub converged: bool,
    pub error: Option<String>,
}

impl VerificationReport {
    /// Margin beyond the error budget, as the strict forms require.
    pub fn strict(&self) -> bool {
        self.converged && self.margin > self.error_budget
    }

    /// A report for a run that failed before both sides were known.
    pub fn failed(case: InequalityCase, function: &str, constant: f64, err: &QError) -> Self {
        Self {
            case,
            function: function.to_string(),
            direction: case.theorem.direction(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            constant,
            ratio: f64::NAN,
            satisfied: false,
            margin: f64::NAN,
            error_budget: f64::NAN,
            degenerate: false,
            converged: !err.is_non_convergent(),
            error: Some(err.to_string()),
        }
    }
}

/// Operator side and norm side before the constant is applied.
pub(crate) struct Sides {
    pub operator: SeriesResult,
    pub norm: SeriesResult,
}

/// `(∫_0^1 t^(-alpha) f d_qt)^p / [γ]_q`, the boundary term of the
/// reverse-boundary case.
fn boundary_term(f: &LatticeFunction, case: &InequalityCase, params: &QParams) -> Result<SeriesResult> {
    let m = hardy_transform_series(f, case.alpha, 1.0, params)?;
    let g = q_number(case.gamma(), params);
    let v = pow_value(m.value, case.p)? / g;
    let rel = if m.value > 0.0 { m.abs_error / m.value } else { 0.0 };
    Ok(SeriesResult { value: v, abs_error: v * case.p.abs() * rel * 2.0, terms_used: m.terms_used, converged: true })
}

pub(crate) fn evaluate_sides(
    case: &InequalityCase,
    f: &LatticeFunction,
    params: &QParams,
    kernel: Option<&RlKernel>,
) -> Result<Sides> {
    let op = case.op();
    let domain = op.domain;
    let operator = match case.theorem {
        TheoremId::RiemannLiouville | TheoremId::RiemannLiouvilleUnit => match kernel {
            Some(k) => rl_lhs_with(f, &op, k, params)?,
            None => rl_lhs_with(f, &op, &RlKernel::new(case.alpha, params)?, params)?,
        },
        TheoremId::ReverseBoundary => hardy_lhs(f, &op, params)?.plus(boundary_term(f, case, params)?),
        _ => hardy_lhs(f, &op, params)?,
    };
    let norm = match case.theorem {
        TheoremId::ReverseWeighted => {
            // the weight 1 - t^gamma rises from zero at t = 1, which the
            // stopping rule would take for growth; both parts below are tails
            // of ordinary power integrals
            let g = case.gamma();
            let plain = pnorm_p(f, case.p, domain, params)?;
            plain.minus(pnorm_weighted(f, case.p, domain, params, move |t| t.powf(g))?)
        }
        _ => pnorm_p(f, case.p, domain, params)?,
    };
    Ok(Sides { operator, norm })
}

/// Evaluates both sides of `case` for `f` and compares them.
pub fn verify_case(case: &InequalityCase, f: &LatticeFunction, params: &QParams) -> Result<VerificationReport> {
    verify_case_with(case, f, params, None)
}

pub(crate) fn verify_case_with(
    case: &InequalityCase,
    f: &LatticeFunction,
    params: &QParams,
    kernel: Option<&RlKernel>,
) -> Result<VerificationReport> {
    let constant = sharp_constant(case, params)?;
    let Sides { operator, norm } = evaluate_sides(case, f, params, kernel)?;
    let direction = case.theorem.direction();
    // small side, and the big side before multiplying by the constant
    let (small, big) = match direction {
        Direction::Upper => (operator, norm),
        Direction::Reverse => (norm, operator),
    };
    let lhs = small.value;
    let rhs = constant * big.value;
    let error_budget = 10.0 * (small.abs_error + constant * big.abs_error);
    let degenerate = lhs == 0.0 && big.value == 0.0;
    let ratio = if degenerate { 0.0 } else { lhs / big.value };
    let margin = rhs - lhs;
    Ok(VerificationReport {
        case: *case,
        function: f.label().to_string(),
        direction,
        lhs,
        rhs,
        constant,
        ratio,
        satisfied: lhs <= rhs + error_budget,
        margin,
        error_budget,
        degenerate,
        converged: small.converged && big.converged,
        error: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_extremal, ExtremalFamily};

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn constants() {
        let params = QParams::new(0.5).unwrap();
        let c = InequalityCase::new(TheoremId::Hardy, 0.5, 2.0, 0.0).unwrap();
        let expected = (1.0 + 0.5f64.sqrt()).powi(2);
        assert!(close(sharp_constant(&c, &params).unwrap(), expected, 1e-14));
        assert!(close(expected, 2.91421356, 1e-8));
        for p in [1.5, 2.0, 4.0] {
            let c = InequalityCase::new(TheoremId::Hardy, 0.5, p, -1.0 / p).unwrap();
            assert!(close(sharp_constant(&c, &params).unwrap(), 1.0, 1e-14));
        }
        let rl = InequalityCase::new(TheoremId::RiemannLiouville, 0.5, 2.0, 1.0).unwrap();
        assert!(close(sharp_constant(&rl, &params).unwrap(), expected, 1e-12));
        let rev = InequalityCase::new(TheoremId::HardyReverse, 0.5, 0.5, -2.0).unwrap();
        assert!(close(sharp_constant(&rev, &params).unwrap(), 1.0, 1e-15));
    }

    #[test]
    fn windows() {
        assert!(InequalityCase::new(TheoremId::HardyUnit, 0.5, 2.0, 0.4).is_ok());
        assert!(matches!(InequalityCase::new(TheoremId::HardyUnit, 0.5, 2.0, 0.6), Err(QError::Parameter(_))));
        assert!(InequalityCase::new(TheoremId::HardyNegative, 0.5, 2.0, 0.0).is_err());
        assert!(InequalityCase::new(TheoremId::HardyReverse, 0.5, 0.5, -1.0).is_err());
        assert!(InequalityCase::new(TheoremId::RiemannLiouville, 0.5, 1.0, 1.0).is_err());
        assert!(InequalityCase::new(TheoremId::Hardy, 1.5, 2.0, 0.0).is_err());
        let c = InequalityCase::new(TheoremId::Hardy, 0.5, 4.0, 0.25).unwrap();
        assert_eq!(c.gamma(), 0.5);
        assert!(close(c.p_conj(), 4.0 / 3.0, 1e-15));
    }

    #[test]
    fn ids_round_trip() {
        for id in TheoremId::ALL {
            assert_eq!(id.name().parse::<TheoremId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{}\"", id.name()));
        }
        assert_eq!("T4.1".parse::<TheoremId>().unwrap(), TheoremId::RiemannLiouville);
        assert!("nope".parse::<TheoremId>().is_err());
    }

    #[test]
    fn hardy_example_report() {
        let params = QParams::new(0.5).unwrap();
        let c = InequalityCase::new(TheoremId::Hardy, 0.5, 2.0, 0.0).unwrap();
        let f = make_extremal(ExtremalFamily::PowerUnit { beta: 1.0 });
        let r = verify_case(&c, &f, &params).unwrap();
        assert!(r.satisfied && r.converged && !r.degenerate);
        assert!(r.ratio < 2.91421356);
        // the j ≥ 0 block of the outer sum alone
        let floor = (0.5f64 / (1.0 - 0.25)).powi(2) * 4.0 / 7.0;
        assert!(r.lhs >= floor);
        assert!(close(r.rhs / r.constant, 4.0 / 7.0, 1e-14));
    }

    #[test]
    fn reverse_example_report() {
        let params = QParams::new(0.5).unwrap();
        let c = InequalityCase::new(TheoremId::HardyReverse, 0.5, 0.5, -2.0).unwrap();
        let f = make_extremal(ExtremalFamily::PowerTail { beta: -2.5 });
        let r = verify_case(&c, &f, &params).unwrap();
        assert_eq!(r.direction, Direction::Reverse);
        assert!(r.satisfied);
        // the norm side is the closed form (1 - q)/(1 - q^|1 + p beta|)
        assert!(close(r.lhs, 0.5 / (1.0 - 0.5f64.powf(0.25)), 1e-13));
    }

    #[test]
    fn zero_function_is_degenerate() {
        let params = QParams::new(0.5).unwrap();
        for id in [TheoremId::Hardy, TheoremId::HardyUnit, TheoremId::ReverseBoundary] {
            let p = if id == TheoremId::ReverseBoundary { 0.5 } else { 2.0 };
            let c = InequalityCase::new(id, 0.5, p, -2.0).unwrap();
            let r = verify_case(&c, &LatticeFunction::zero(), &params).unwrap();
            assert!(r.degenerate && r.satisfied && r.lhs == 0.0 && r.rhs == 0.0);
        }
    }

    #[test]
    fn boundary_case_adds_the_boundary_term() {
        let params = QParams::new(0.5).unwrap();
        let w = InequalityCase::new(TheoremId::ReverseWeighted, 0.5, 0.5, -2.0).unwrap();
        let b = InequalityCase::new(TheoremId::ReverseBoundary, 0.5, 0.5, -2.0).unwrap();
        let f = make_extremal(ExtremalFamily::PowerUnit { beta: 0.0 });
        let rw = verify_case(&w, &f, &params).unwrap();
        let rb = verify_case(&b, &f, &params).unwrap();
        // with f = 1: ∫_0^1 t^2 d_qt = 1/[3]_q and [γ]_q = 1 at q = 1/2, gamma = 1
        let boundary = (1.0 / q_number(3.0, &params)).sqrt();
        assert!(close(rb.rhs - rw.rhs, rw.constant * boundary, 1e-12));
        // norm sides: ∫ (1 - t) d_qt = 1 - 1/[2]_q, and ∫ 1 d_qt = 1
        assert!(close(rw.lhs, 1.0 - 1.0 / 1.5, 1e-14));
        assert!(close(rb.lhs, 1.0, 1e-14));
        assert!(rw.strict() && rb.strict());
    }
}
