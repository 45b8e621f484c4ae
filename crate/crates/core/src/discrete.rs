//! Discrete Hardy and Copson sums with geometric weights, weighted means,
//! the classical power-weight forms, matrix operators built from the
//! Riemann-Liouville kernel, and the reverse inequalities for `0 < p < 1`.
//!
//! Sequences live on a finite window and are zero outside it. Where an outer
//! sum runs past the window its terms are geometric and are added in closed
//! form, so every value here is exact up to rounding.

use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::lattice::Positivity;
use crate::operators::{pow_value, RlKernel};
use crate::params::QParams;
use crate::series::{NeumaierSum, SeriesResult, ROUNDING_ULPS};
use crate::special::q_pochhammer_real;

/// Values `a_n` for `n` in `[n_lo, n_lo + len)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSequence {
    n_lo: i64,
    values: Vec<f64>,
    positivity: Positivity,
}

impl DiscreteSequence {
    pub fn new(n_lo: i64, values: Vec<f64>, positivity: Positivity) -> Result<Self> {
        if values.is_empty() {
            return Err(QError::Parameter("sequence window must be nonempty".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            let ok = v.is_finite()
                && match positivity {
                    Positivity::NonNegative => v >= 0.0,
                    Positivity::StrictlyPositive => v > 0.0,
                    Positivity::Unrestricted => true,
                };
            if !ok {
                return Err(QError::Domain(format!(
                    "entry a_{} = {v} violates the {positivity:?} contract",
                    n_lo + i as i64
                )));
            }
        }
        Ok(Self { n_lo, values, positivity })
    }

    /// A nonnegative sequence.
    pub fn nonneg(n_lo: i64, values: Vec<f64>) -> Result<Self> {
        Self::new(n_lo, values, Positivity::NonNegative)
    }

    pub fn impulse(n: i64) -> Self {
        Self { n_lo: n, values: vec![1.0], positivity: Positivity::NonNegative }
    }

    pub fn n_lo(&self) -> i64 {
        self.n_lo
    }

    pub fn n_hi(&self) -> i64 {
        self.n_lo + self.values.len() as i64 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn positivity(&self) -> Positivity {
        self.positivity
    }

    pub fn get(&self, n: i64) -> f64 {
        if n < self.n_lo || n > self.n_hi() {
            0.0
        } else {
            self.values[(n - self.n_lo) as usize]
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `Σ a_n^p` over the window.
    pub fn power_sum(&self, p: f64) -> Result<SeriesResult> {
        let mut acc = NeumaierSum::new();
        for &v in &self.values {
            acc.add(pow_value(v, p)?);
        }
        Ok(finish(acc, p))
    }

    /// `Σ w_n a_n^p` over the window.
    pub fn weighted_power_sum(&self, p: f64, w: impl Fn(i64) -> f64) -> Result<SeriesResult> {
        let mut acc = NeumaierSum::new();
        for (i, &v) in self.values.iter().enumerate() {
            acc.add(w(self.n_lo + i as i64) * pow_value(v, p)?);
        }
        Ok(finish(acc, p))
    }
}

/// `n -> -n`.
pub fn reflect(a: &DiscreteSequence) -> DiscreteSequence {
    let mut values = a.values.clone();
    values.reverse();
    DiscreteSequence { n_lo: -a.n_hi(), values, positivity: a.positivity }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexDomain {
    /// `n ∈ ℤ`
    Bilateral,
    /// `n = 0, 1, 2, ...`
    OneSided,
}

/// Exponent `λ > 0`, power `p` and base `q` of the geometric-weight sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteCase {
    pub lambda: f64,
    pub p: f64,
    pub q: f64,
    pub index_domain: IndexDomain,
}

impl DiscreteCase {
    pub fn new(lambda: f64, p: f64, q: f64, index_domain: IndexDomain) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(QError::Parameter(format!("lambda must be positive, got {lambda}")));
        }
        if !(p.is_finite() && p != 0.0) {
            return Err(QError::Parameter(format!("p must be finite and nonzero, got {p}")));
        }
        QParams::new(q)?;
        Ok(Self { lambda, p, q, index_domain })
    }

    /// `ρ = q^λ`
    pub fn rho(&self) -> f64 {
        (self.lambda * self.q.ln()).exp()
    }

    /// `(1 - q^λ)^(-p)`
    pub fn constant(&self) -> f64 {
        (-(self.lambda * self.q.ln()).exp_m1()).powf(-self.p)
    }
}

fn finish(acc: NeumaierSum, p: f64) -> SeriesResult {
    SeriesResult {
        value: acc.value(),
        abs_error: acc.rounding_allowance() * (2.0 + p.abs()),
        terms_used: 0,
        converged: true,
    }
}

fn check_domain(a: &DiscreteSequence, domain: IndexDomain, p: f64) -> Result<()> {
    if domain == IndexDomain::OneSided && a.n_lo < 0 {
        return Err(QError::Domain(format!(
            "one-sided sums need a window inside n ≥ 0, got n_lo = {}",
            a.n_lo
        )));
    }
    if p < 0.0 {
        return Err(QError::Domain(
            "p < 0 needs strictly positive inner sums at every index, which a finitely supported sequence cannot provide"
                .into(),
        ));
    }
    Ok(())
}

/// `Σ_{m=from}^{to} r^m`, with `to = None` meaning infinity.
fn geometric_block(ln_r: f64, from: i64, to: Option<i64>) -> f64 {
    let head = (from as f64 * ln_r).exp();
    match to {
        None => head / -ln_r.exp_m1(),
        Some(to) if to < from => 0.0,
        Some(to) => head * -((to - from + 1) as f64 * ln_r).exp_m1() / -ln_r.exp_m1(),
    }
}

/// Inner sums `C_n = Σ_{k≥n} ρ^(k-n) a_k` for `n` in the window, top down.
fn copson_inner(a: &DiscreteSequence, rho: f64) -> Vec<f64> {
    let mut out = vec![0.0; a.values.len()];
    let mut c = 0.0;
    for i in (0..a.values.len()).rev() {
        c = a.values[i] + rho * c;
        out[i] = c;
    }
    out
}

/// `Σ_n (q^(-λn) Σ_{k≥n} q^(λk) a_k)^p` over the index domain.
pub fn copson_lhs(a: &DiscreteSequence, case: &DiscreteCase) -> Result<SeriesResult> {
    check_domain(a, case.index_domain, case.p)?;
    let p = case.p;
    let inner = copson_inner(a, case.rho());
    let mut acc = NeumaierSum::new();
    for c in inner.iter().rev() {
        acc.add(pow_value(*c, p)?);
    }
    // below the window the inner sums are ρ^m C_(n_lo)
    let ln_r = p * case.lambda * case.q.ln();
    let to = match case.index_domain {
        IndexDomain::Bilateral => None,
        IndexDomain::OneSided => Some(a.n_lo),
    };
    acc.add(pow_value(inner[0], p)? * geometric_block(ln_r, 1, to));
    Ok(finish(acc, p))
}

/// `Σ_n (q^(λn) Σ_{k≤n} q^(-λk) a_k)^p` over the index domain.
pub fn hardy_discrete_lhs(a: &DiscreteSequence, case: &DiscreteCase) -> Result<SeriesResult> {
    check_domain(a, case.index_domain, case.p)?;
    let p = case.p;
    let rho = case.rho();
    let mut acc = NeumaierSum::new();
    let mut d = 0.0;
    for &v in &a.values {
        d = v + rho * d;
        acc.add(pow_value(d, p)?);
    }
    let ln_r = p * case.lambda * case.q.ln();
    acc.add(pow_value(d, p)? * geometric_block(ln_r, 1, None));
    Ok(finish(acc, p))
}

/// Weight families for the weighted means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MeanWeights {
    /// `λ_k = q^(λk)`
    Geometric { q: f64, lambda: f64 },
    /// `λ_k = q^(-λk)`
    ReciprocalGeometric { q: f64, lambda: f64 },
    /// `λ_k = k^(-alpha)` for `k ≥ 1`, with `λ_0 = a_0 = 0`.
    InversePower { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// averages over `k ≤ n`
    Hardy,
    /// averages over `k ≥ n`
    Copson,
}

/// `Σ_n ((Σ_{k∈dir(n)} λ_k a_k) / (Σ_{k∈dir(n)} λ_k))^p`.
///
/// Supported pairings are the ones whose weight sums are finite: geometric
/// weights with Copson means, reciprocal geometric weights with Hardy means,
/// and power weights with one-sided Hardy means. The geometric pairings sum
/// over the whole index domain; the power weights only over the window.
pub fn weighted_mean_lhs(
    a: &DiscreteSequence,
    weights: MeanWeights,
    direction: Direction,
    index_domain: IndexDomain,
    p: f64,
) -> Result<SeriesResult> {
    match (weights, direction) {
        (MeanWeights::Geometric { q, lambda }, Direction::Copson) => {
            // the normalised Copson mean is (1 - ρ) C_n
            let case = DiscreteCase::new(lambda, p, q, index_domain)?;
            let scale = (-(lambda * q.ln()).exp_m1()).powf(p);
            Ok(copson_lhs(a, &case)?.scaled(scale))
        }
        (MeanWeights::ReciprocalGeometric { q, lambda }, Direction::Hardy) => {
            let case = DiscreteCase::new(lambda, p, q, index_domain)?;
            match index_domain {
                IndexDomain::Bilateral => {
                    let scale = (-(lambda * q.ln()).exp_m1()).powf(p);
                    Ok(hardy_discrete_lhs(a, &case)?.scaled(scale))
                }
                IndexDomain::OneSided => one_sided_reciprocal_hardy(a, &case),
            }
        }
        (MeanWeights::InversePower { alpha }, Direction::Hardy) => {
            if index_domain != IndexDomain::OneSided {
                return Err(QError::Parameter("power weights are defined for one-sided sums only".into()));
            }
            check_domain(a, index_domain, p)?;
            if a.get(0) != 0.0 {
                return Err(QError::Domain("power weights need a_0 = 0".into()));
            }
            let mut num = NeumaierSum::new();
            let mut den = NeumaierSum::new();
            let mut acc = NeumaierSum::new();
            for n in a.n_lo.max(1)..=a.n_hi() {
                let w = (n as f64).powf(-alpha);
                num.add(w * a.get(n));
                den.add(w);
                if den.value() == 0.0 {
                    return Err(QError::DivisionByZero(format!("weight partial sum vanished at n = {n}")));
                }
                acc.add(pow_value(num.value() / den.value(), p)?);
            }
            // indices below n_lo have zero means and add nothing
            Ok(finish(acc, p))
        }
        _ => Err(QError::Parameter(format!(
            "weights {weights:?} with {direction:?} means have an infinite normaliser"
        ))),
    }
}

/// One-sided Hardy mean with `λ_k = q^(-λk)`: the normaliser is
/// `ρ^(-n) (1 - ρ^(n+1)) / (1 - ρ)`, so the mean is `D_n (1 - ρ)/(1 - ρ^(n+1))`.
fn one_sided_reciprocal_hardy(a: &DiscreteSequence, case: &DiscreteCase) -> Result<SeriesResult> {
    check_domain(a, case.index_domain, case.p)?;
    let p = case.p;
    let rho = case.rho();
    let ln_rho = case.lambda * case.q.ln();
    let mean = |d: f64, n: i64| d * (-ln_rho.exp_m1()) / (-((n + 1) as f64 * ln_rho).exp_m1());
    let mut acc = NeumaierSum::new();
    let mut d = 0.0;
    for n in 0..=a.n_hi() {
        d = a.get(n) + rho * d;
        acc.add(pow_value(mean(d, n), p)?);
    }
    // past the window D_n = ρ^m D_(n_hi); sum until the terms are negligible
    let params = QParams::new(case.q)?;
    let mut n = a.n_hi();
    let mut small = 0;
    while small < params.consecutive_small {
        n += 1;
        d *= rho;
        let t = pow_value(mean(d, n), p)?;
        acc.add(t);
        small = if t.abs() < params.eps_tail * acc.value().abs().max(1e-300) { small + 1 } else { 0 };
    }
    Ok(finish(acc, p))
}

/// The two power-weight forms of the classical discrete Hardy inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassicalForm {
    /// weights `k^(1-alpha) - (k-1)^(1-alpha)`, normaliser `n^(1-alpha)`
    DifferenceWeights,
    /// weights `k^(-alpha)`, normaliser their partial sum
    PowerWeights,
}

/// `k^s - (k-1)^s` without cancellation for large `k`.
pub fn power_difference(k: u64, s: f64) -> f64 {
    if k <= 1 {
        return if k == 1 { 1.0 } else { 0.0 };
    }
    let kf = k as f64;
    -kf.powf(s) * (s * (-1.0 / kf).ln_1p()).exp_m1()
}

/// `((1 - alpha) p / (p - alpha p - 1))^p`
pub fn classical_discrete_constant(alpha: f64, p: f64) -> f64 {
    ((1.0 - alpha) * p / (p - alpha * p - 1.0)).powf(p)
}

/// Both sides of the classical inequality on the window `n = 1..=N`, which
/// must start at 1. Only a sampled check: nothing is claimed about sharpness.
pub fn classical_discrete_check(
    a: &DiscreteSequence,
    alpha: f64,
    p: f64,
    form: ClassicalForm,
) -> Result<(SeriesResult, SeriesResult)> {
    if !(p > 1.0 && alpha < 1.0 - 1.0 / p) {
        return Err(QError::Parameter(format!(
            "the classical forms need p > 1 and alpha < 1 - 1/p, got p = {p}, alpha = {alpha}"
        )));
    }
    if a.n_lo != 1 {
        return Err(QError::Domain(format!("the classical forms index from n = 1, got n_lo = {}", a.n_lo)));
    }
    let lhs = match form {
        ClassicalForm::PowerWeights => {
            let mut padded = vec![0.0];
            padded.extend_from_slice(&a.values);
            let b = DiscreteSequence::new(0, padded, a.positivity)?;
            weighted_mean_lhs(&b, MeanWeights::InversePower { alpha }, Direction::Hardy, IndexDomain::OneSided, p)?
        }
        ClassicalForm::DifferenceWeights => {
            let s = 1.0 - alpha;
            let mut num = NeumaierSum::new();
            let mut acc = NeumaierSum::new();
            for (i, &v) in a.values.iter().enumerate() {
                let n = i as u64 + 1;
                num.add(power_difference(n, s) * v);
                acc.add(pow_value(num.value() / (n as f64).powf(s), p)?);
            }
            finish(acc, p)
        }
    };
    let rhs = a.power_sum(p)?.scaled(classical_discrete_constant(alpha, p));
    Ok((lhs, rhs))
}

/// Left and right sides of one reverse inequality for `0 < p < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReversePair {
    pub lhs: SeriesResult,
    pub rhs: SeriesResult,
}

impl ReversePair {
    /// `lhs > rhs` by more than the combined rounding error.
    pub fn strict(&self, budget_factor: f64) -> bool {
        self.lhs.value - self.rhs.value > budget_factor * (self.lhs.abs_error + self.rhs.abs_error)
    }
}

/// The two reverse Copson-type inequalities with correction terms, one-sided:
///
/// 1. `Σ_n C_n^p  >  (1 - ρ)^(-p) Σ_n (1 - ρ^n) a_n^p`
/// 2. `Σ_n C_n^p + (1 - ρ)^(-1) (Σ_n ρ^n a_n)^p  >  (1 - ρ)^(-p) Σ_n a_n^p`
pub fn reverse_discrete_check(a: &DiscreteSequence, case: &DiscreteCase) -> Result<[ReversePair; 2]> {
    if !(case.p > 0.0 && case.p < 1.0) {
        return Err(QError::Parameter(format!("the reverse inequalities need 0 < p < 1, got {}", case.p)));
    }
    if case.index_domain != IndexDomain::OneSided {
        return Err(QError::Parameter("the reverse inequalities are one-sided".into()));
    }
    let p = case.p;
    let ln_rho = case.lambda * case.q.ln();
    let one_minus = -ln_rho.exp_m1();
    let copson = copson_lhs(a, case)?;
    let c = case.constant();
    let rhs1 = a.weighted_power_sum(p, |n| -(n as f64 * ln_rho).exp_m1())?.scaled(c);
    let mut geo = NeumaierSum::new();
    for (i, &v) in a.values.iter().enumerate() {
        geo.add(((a.n_lo + i as i64) as f64 * ln_rho).exp() * v);
    }
    let extra = pow_value(geo.value(), p)? / one_minus;
    let extra = SeriesResult { value: extra, abs_error: extra * 4.0 * ROUNDING_ULPS * f64::EPSILON, terms_used: 0, converged: true };
    let rhs2 = a.power_sum(p)?.scaled(c);
    Ok([ReversePair { lhs: copson, rhs: rhs1 }, ReversePair { lhs: copson.plus(extra), rhs: rhs2 }])
}

/// Parameters of the matrix operators: kernel order `alpha > 0` and the
/// conjugate exponent `p' > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixWeight {
    pub alpha: f64,
    pub p_conj: f64,
    pub q: f64,
}

impl MatrixWeight {
    pub fn new(alpha: f64, p_conj: f64, q: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(QError::Parameter(format!("alpha must be positive, got {alpha}")));
        }
        if !(p_conj > 1.0 && p_conj.is_finite()) {
            return Err(QError::Parameter(format!("p' must exceed 1, got {p_conj}")));
        }
        QParams::new(q)?;
        Ok(Self { alpha, p_conj, q })
    }

    /// `p = p'/(p' - 1)`
    pub fn p(&self) -> f64 {
        self.p_conj / (self.p_conj - 1.0)
    }

    /// Exponent of `q^((k-n) e)` in the weights of the given direction:
    /// `1/p'` for the Copson form, `1/p` for its dual.
    fn decay(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Copson => 1.0 / self.p_conj,
            Direction::Hardy => 1.0 / self.p(),
        }
    }
}

/// `λ_(n,k) = q^((k-n)/p') (q^(k-n+1); q)_(alpha-1)` for `k ≥ n`, else 0.
pub fn matrix_weight(n: i64, k: i64, w: &MatrixWeight, params: &QParams) -> Result<f64> {
    if k < n {
        return Ok(0.0);
    }
    let m = (k - n) as f64;
    Ok(params.pow(m / w.p_conj) * q_pochhammer_real(params.pow(m + 1.0), w.alpha - 1.0, params)?)
}

/// `λ_(n,k) = q^((n-k)/p) (q^(n-k+1); q)_(alpha-1)` for `k ≤ n`, else 0.
pub fn matrix_weight_dual(n: i64, k: i64, w: &MatrixWeight, params: &QParams) -> Result<f64> {
    if k > n {
        return Ok(0.0);
    }
    let m = (n - k) as f64;
    Ok(params.pow(m / w.p()) * q_pochhammer_real(params.pow(m + 1.0), w.alpha - 1.0, params)?)
}

/// The row sum `Σ_m q^(m e) (q^(m+1); q)_(alpha-1)` shared by every row.
fn row_sum(kernel: &RlKernel, e: f64, params: &QParams) -> SeriesResult {
    let ln_r = e * params.ln_q();
    let mut acc = NeumaierSum::new();
    for m in 0..kernel.horizon() {
        acc.add((m as f64 * ln_r).exp() * kernel.correction(m));
    }
    // Σ_m r^m in closed form
    acc.add(1.0 / -ln_r.exp_m1());
    SeriesResult {
        value: acc.value(),
        abs_error: acc.rounding_allowance() + params.eps_tail * acc.value(),
        terms_used: kernel.horizon(),
        converged: true,
    }
}

/// `Q̄_n = Σ_{k≥n} q^(k/p') (q^(k-n+1); q)_(alpha-1)`, summed term by term.
pub fn q_bar(n: i64, w: &MatrixWeight, params: &QParams) -> Result<SeriesResult> {
    crate::series::sum_series(
        |k| Ok(params.pow(k as f64 / w.p_conj) * q_pochhammer_real(params.pow((k - n) as f64 + 1.0), w.alpha - 1.0, params)?),
        n,
        1,
        params.k_max,
        params,
        "matrix row sum",
        None,
    )
}

/// The best constant `E = (Σ_m q^(m e) (q^(m+1); q)_(alpha-1))^p` of the
/// un-normalised operator in the given direction.
pub fn matrix_constant(w: &MatrixWeight, direction: Direction, params: &QParams) -> Result<f64> {
    let kernel = RlKernel::new(w.alpha, params)?;
    Ok(row_sum(&kernel, w.decay(direction), params).value.powf(w.p()))
}

/// `Σ_n (Σ_k λ_(n,k) a_k)^p`, or with each inner sum divided by its row sum
/// when `normalized`. `direction` selects the Copson form (`k ≥ n`) or its
/// dual (`k ≤ n`).
pub fn matrix_lhs(
    a: &DiscreteSequence,
    w: &MatrixWeight,
    direction: Direction,
    index_domain: IndexDomain,
    normalized: bool,
    params: &QParams,
) -> Result<SeriesResult> {
    let p = w.p();
    check_domain(a, index_domain, p)?;
    if params.q() != w.q {
        return Err(QError::Parameter("matrix weight and params disagree on q".into()));
    }
    let kernel = RlKernel::new(w.alpha, params)?;
    let e = w.decay(direction);
    let r = params.pow(e);
    let ln_r = e * params.ln_q();
    let row = row_sum(&kernel, e, params);
    let scale = if normalized { 1.0 / row.value } else { 1.0 };
    let horizon = kernel.horizon() as i64;
    let cr: Vec<f64> = (0..horizon).map(|m| kernel.correction(m as usize) * params.pow(m as f64 * e)).collect();

    // inner_n = P_n + Σ_{m<M} c_m r^m a_(n±m), with P the plain geometric sum
    let mut acc = NeumaierSum::new();
    let (lo, hi) = (a.n_lo, a.n_hi());
    let edge;
    let outside;
    match direction {
        Direction::Copson => {
            let first = match index_domain {
                IndexDomain::Bilateral => lo - horizon,
                IndexDomain::OneSided => (lo - horizon).max(0),
            };
            let mut plain = 0.0;
            for n in (first..=hi).rev() {
                plain = a.get(n) + r * plain;
                let mut corr = NeumaierSum::new();
                for (m, c) in cr.iter().enumerate() {
                    corr.add(c * a.get(n + m as i64));
                }
                acc.add(pow_value(scale * (plain + corr.value()), p)?);
            }
            edge = plain;
            outside = match index_domain {
                IndexDomain::Bilateral => None,
                IndexDomain::OneSided => Some(first),
            };
        }
        Direction::Hardy => {
            let last = hi + horizon;
            let mut plain = 0.0;
            for n in lo..=last {
                plain = a.get(n) + r * plain;
                let mut corr = NeumaierSum::new();
                for (m, c) in cr.iter().enumerate() {
                    corr.add(c * a.get(n - m as i64));
                }
                acc.add(pow_value(scale * (plain + corr.value()), p)?);
            }
            edge = plain;
            outside = None;
        }
    }
    // beyond the explicit block the inner sums are r^m times the edge value
    acc.add(pow_value(scale * edge, p)? * geometric_block(p * ln_r, 1, outside));
    let mut out = finish(acc, p);
    out.abs_error += p * out.value * row.abs_error / row.value;
    Ok(out)
}

/// Longest window used by [`epsilon_sweep`].
pub const EPSILON_WINDOW_CAP: usize = 1_000_000;

/// One step of an ε-sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonRow {
    pub epsilon: f64,
    pub window: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / Σ a_n^p`
    pub ratio: f64,
    pub error_budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSweep {
    pub case: DiscreteCase,
    pub direction: Direction,
    pub rows: Vec<EpsilonRow>,
    pub sup_ratio: f64,
    pub constant: f64,
    /// `(constant - sup_ratio) / constant`
    pub relative_gap: f64,
}

/// Runs `a_k = q^(εk)` on `k = 0..⌈50/ε⌉` for `ε_j = eps0 2^(-j)`, the
/// geometric sequences whose ratio tends to `(1 - q^λ)^(-p)`.
pub fn epsilon_sweep(case: &DiscreteCase, direction: Direction, eps0: f64, steps: usize) -> Result<EpsilonSweep> {
    if !(eps0 > 0.0 && eps0.is_finite()) {
        return Err(QError::Parameter(format!("eps0 must be positive, got {eps0}")));
    }
    if case.p < 1.0 {
        return Err(QError::Parameter(format!("the ε-sweep needs p > 1, got p = {}", case.p)));
    }
    let ln_q = case.q.ln();
    let constant = case.constant();
    let mut rows = Vec::with_capacity(steps);
    for j in 0..steps {
        let eps = eps0 * 0.5f64.powi(j as i32);
        let window = ((50.0 / eps).ceil() as usize).min(EPSILON_WINDOW_CAP);
        let values: Vec<f64> = (0..window).map(|k| (eps * k as f64 * ln_q).exp()).collect();
        let a = DiscreteSequence::nonneg(0, values)?;
        let lhs = match direction {
            Direction::Copson => copson_lhs(&a, case)?,
            Direction::Hardy => hardy_discrete_lhs(&a, case)?,
        };
        let norm = a.power_sum(case.p)?;
        let budget = 10.0 * (lhs.abs_error + constant * norm.abs_error);
        rows.push(EpsilonRow {
            epsilon: eps,
            window,
            lhs: lhs.value,
            rhs: constant * norm.value,
            ratio: lhs.value / norm.value,
            error_budget: budget / norm.value,
        });
    }
    let sup_ratio = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(EpsilonSweep {
        case: *case,
        direction,
        rows,
        sup_ratio,
        constant,
        relative_gap: (constant - sup_ratio) / constant,
    })
}
