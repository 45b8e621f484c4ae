//! Scalar q-special functions: q-numbers, q-Pochhammer symbols of finite,
//! infinite and real order, the q-gamma and q-beta functions, and the
//! q-analogue of the power `(x - t)^alpha`.
//!
//! Infinite products are accumulated directly while at most
//! [`DIRECT_PRODUCT_LIMIT`] factors are needed and in log space beyond that,
//! so that `q` close to 1 neither underflows nor loses relative accuracy.

use crate::error::{QError, Result};
use crate::params::QParams;
use crate::series::{NeumaierSum, SeriesResult, TailMonitor, Step};

/// Factor count up to which infinite products are multiplied directly.
pub const DIRECT_PRODUCT_LIMIT: usize = 50;

/// Half-width of the window around nonpositive integers treated as poles.
pub const POLE_WINDOW: f64 = 1e-12;

/// Largest integer order routed through the exact finite product.
const FINITE_ORDER_LIMIT: f64 = 1e6;

/// `[alpha]_q = (1 - q^alpha) / (1 - q)`.
pub fn q_number(alpha: f64, params: &QParams) -> f64 {
    params.one_minus_pow(alpha) / (1.0 - params.q())
}

/// `(a; q)_k`, the finite q-shifted factorial.
pub fn q_pochhammer_finite(a: f64, k: usize, params: &QParams) -> f64 {
    let q = params.q();
    let mut qi = 1.0;
    let mut prod = 1.0;
    for _ in 0..k {
        prod *= 1.0 - a * qi;
        qi *= q;
    }
    prod
}

/// The base of a Pochhammer symbol: a plain real `a`, or `a = q^e` given by
/// its exponent so that factors `1 - q^(e+i)` keep full relative accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum PochBase {
    Value(f64),
    QPow(f64),
}

impl PochBase {
    fn magnitude(&self, params: &QParams) -> f64 {
        match *self {
            PochBase::Value(a) => a.abs(),
            PochBase::QPow(e) => params.pow(e),
        }
    }

    /// `1 - base * q^i`.
    fn factor(&self, i: usize, params: &QParams) -> f64 {
        match *self {
            PochBase::Value(a) => 1.0 - a * params.pow(i as f64),
            PochBase::QPow(e) => params.one_minus_pow(e + i as f64),
        }
    }

    /// `(ln|1 - base * q^i|, sign)`.
    fn ln_factor(&self, i: usize, params: &QParams) -> (f64, f64) {
        match *self {
            PochBase::Value(a) => {
                let t = a * params.pow(i as f64);
                if t < 1.0 {
                    ((-t).ln_1p(), 1.0)
                } else if t > 1.0 {
                    ((t - 1.0).ln(), -1.0)
                } else {
                    (f64::NEG_INFINITY, 0.0)
                }
            }
            PochBase::QPow(e) => {
                let x = e + i as f64;
                let f = params.one_minus_pow(x);
                if f == 0.0 {
                    (f64::NEG_INFINITY, 0.0)
                } else {
                    (f.abs().ln(), f.signum())
                }
            }
        }
    }

    fn scaled_by_q_pow(self, alpha: f64, params: &QParams) -> Self {
        match self {
            PochBase::Value(a) => PochBase::Value(a * params.pow(alpha)),
            PochBase::QPow(e) => PochBase::QPow(e + alpha),
        }
    }
}

/// `(base; q)_inf` in log form.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LnProduct {
    /// `ln |value|`; `-inf` when a factor vanishes.
    pub ln_abs: f64,
    /// `+1`, `-1`, or `0` for an exactly vanishing factor.
    pub sign: f64,
    /// Bound on `|ln(true) - ln(truncated)|` from the dropped factors.
    pub ln_tail: f64,
    /// Rounding allowance on `ln_abs`.
    pub ln_rounding: f64,
    pub factors: usize,
}

/// Number of factors to keep: stop once `|a| q^N < eps` has held for
/// `consecutive_small` successive N.
fn product_length(base: PochBase, params: &QParams) -> Result<usize> {
    let mag = base.magnitude(params);
    if mag == 0.0 {
        return Ok(0);
    }
    let mut small = 0;
    let mut n = 0usize;
    let ln_q = params.ln_q();
    let ln_mag = mag.ln();
    loop {
        if n >= params.n_max_product {
            return Err(QError::NonConvergent { what: "q-Pochhammer product", tail: None, terms: n });
        }
        let ln_t = ln_mag + n as f64 * ln_q;
        n += 1;
        if ln_t < params.eps_tail.ln() {
            small += 1;
            if small >= params.consecutive_small {
                return Ok(n);
            }
        }
    }
}

/// `Σ_{i≥N} |ln(1 - t_i)|` bounded through `-ln(1-t) ≤ t/(1-t)` on the
/// geometric remainder.
fn ln_tail_bound(base: PochBase, n: usize, params: &QParams) -> f64 {
    let r = base.magnitude(params) * params.pow(n as f64) / (1.0 - params.q());
    if r >= 1.0 {
        f64::INFINITY
    } else {
        r / (1.0 - r)
    }
}

pub(crate) fn ln_pochhammer_inf(base: PochBase, params: &QParams) -> Result<LnProduct> {
    let n = product_length(base, params)?;
    let ln_tail = ln_tail_bound(base, n, params);
    if n <= DIRECT_PRODUCT_LIMIT {
        let mut prod = 1.0;
        for i in 0..n {
            prod *= base.factor(i, params);
        }
        let (ln_abs, sign) = if prod == 0.0 {
            (f64::NEG_INFINITY, 0.0)
        } else {
            (prod.abs().ln(), prod.signum())
        };
        return Ok(LnProduct {
            ln_abs,
            sign,
            ln_tail,
            ln_rounding: (n as f64 + 1.0) * f64::EPSILON,
            factors: n,
        });
    }
    let mut acc = NeumaierSum::new();
    let mut sign = 1.0;
    for i in 0..n {
        let (l, s) = base.ln_factor(i, params);
        if s == 0.0 {
            return Ok(LnProduct {
                ln_abs: f64::NEG_INFINITY,
                sign: 0.0,
                ln_tail: 0.0,
                ln_rounding: 0.0,
                factors: i + 1,
            });
        }
        sign *= s;
        acc.add(l);
    }
    Ok(LnProduct {
        ln_abs: acc.value(),
        sign,
        ln_tail,
        ln_rounding: acc.rounding_allowance() + 2.0 * f64::EPSILON * acc.value().abs(),
        factors: n,
    })
}

/// `(a; q)_inf` with a bound on the truncation error.
pub fn q_pochhammer_infinite(a: f64, params: &QParams) -> Result<SeriesResult> {
    let lp = ln_pochhammer_inf(PochBase::Value(a), params)?;
    let value = lp.sign * lp.ln_abs.exp();
    Ok(SeriesResult {
        value,
        abs_error: value.abs() * (lp.ln_tail + lp.ln_rounding).exp_m1(),
        terms_used: lp.factors,
        converged: true,
    })
}

/// `ln (base; q)_alpha` for the positive-factor domain.
pub(crate) fn ln_pochhammer_ratio(base: PochBase, alpha: f64, params: &QParams) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let num = ln_pochhammer_inf(base, params)?;
    let den = ln_pochhammer_inf(base.scaled_by_q_pow(alpha, params), params)?;
    if den.sign == 0.0 {
        return Err(QError::DivisionByZero("denominator product (a q^alpha; q)_inf vanishes".into()));
    }
    if num.sign < 0.0 || den.sign < 0.0 {
        return Err(QError::Domain(
            "real-order q-Pochhammer symbol requires every factor 1 - a q^i to be nonnegative".into(),
        ));
    }
    Ok(num.ln_abs - den.ln_abs)
}

/// `(a; q)_alpha = (a; q)_inf / (a q^alpha; q)_inf`.
///
/// Restricted to bases whose factors stay nonnegative (`a ≤ 1` and
/// `a q^alpha < 1`); other bases raise a domain error.
pub fn q_pochhammer_real(a: f64, alpha: f64, params: &QParams) -> Result<f64> {
    Ok(ln_pochhammer_ratio(PochBase::Value(a), alpha, params)?.exp())
}

fn check_pole(x: f64) -> Result<()> {
    if x <= POLE_WINDOW {
        let nearest = x.round();
        if nearest <= 0.0 && (x - nearest).abs() < POLE_WINDOW {
            return Err(QError::Pole(nearest));
        }
    }
    Ok(())
}

/// `(sign, ln |Γ_q(x)|)`.
pub(crate) fn ln_q_gamma(x: f64, params: &QParams) -> Result<(f64, f64)> {
    check_pole(x)?;
    let num = ln_pochhammer_inf(PochBase::QPow(1.0), params)?;
    let den = ln_pochhammer_inf(PochBase::QPow(x), params)?;
    if den.sign == 0.0 {
        return Err(QError::Pole(x));
    }
    let ln = num.ln_abs - den.ln_abs + (1.0 - x) * (1.0 - params.q()).ln();
    Ok((den.sign, ln))
}

/// `Γ_q(x) = (q; q)_inf / (q^x; q)_inf · (1 - q)^(1-x)`.
pub fn q_gamma(x: f64, params: &QParams) -> Result<f64> {
    let (sign, ln) = ln_q_gamma(x, params)?;
    Ok(sign * ln.exp())
}

/// Streams `(q^(i+1); q)_(b-1)` for `i = 0, 1, 2, ...`.
///
/// The first weight comes from the product formula; later ones follow
/// `w_(i+1) = w_i (1 - q^(i+b)) / (1 - q^(i+1))` with the logarithm carried in
/// a compensated accumulator, so `w_i - 1` stays accurate as `w_i -> 1`.
#[derive(Debug, Clone)]
pub struct PochhammerKernel {
    b: f64,
    params: QParams,
    ln_w: NeumaierSum,
    index: usize,
}

impl PochhammerKernel {
    pub fn new(b: f64, params: &QParams) -> Result<Self> {
        if !(b > 0.0) {
            return Err(QError::Domain(format!("kernel order b = {b} must be positive")));
        }
        let ln_w0 = ln_pochhammer_ratio(PochBase::QPow(1.0), b - 1.0, params)?;
        let mut ln_w = NeumaierSum::new();
        ln_w.add(ln_w0);
        Ok(Self { b, params: *params, ln_w, index: 0 })
    }

    /// Index of the weight the next call to [`Self::next_weight`] returns.
    pub fn index(&self) -> usize {
        self.index
    }

    /// Returns `(w_i, w_i - 1)` and advances.
    pub fn next_weight(&mut self) -> (f64, f64) {
        let l = self.ln_w.value();
        let i = self.index as f64;
        let p = &self.params;
        self.ln_w.add(p.one_minus_pow(i + self.b).ln() - p.one_minus_pow(i + 1.0).ln());
        self.index += 1;
        (l.exp(), l.exp_m1())
    }
}

/// `B_q(a, b) = (1 - q) Σ_i q^(i a) (q^(i+1); q)_(b-1)`.
pub fn q_beta(a: f64, b: f64, params: &QParams) -> Result<f64> {
    Ok(q_beta_series(a, b, params)?.value)
}

/// [`q_beta`] with its truncation estimate.
pub fn q_beta_series(a: f64, b: f64, params: &QParams) -> Result<SeriesResult> {
    if !(a > 0.0) {
        return Err(QError::Domain(format!("q-beta requires a > 0, got {a}")));
    }
    let mut kernel = PochhammerKernel::new(b, params)?;
    let mut acc = NeumaierSum::new();
    let mut monitor = TailMonitor::new(params);
    for n in 0..params.k_max {
        let (w, _) = kernel.next_weight();
        let t = params.pow(a * n as f64) * w;
        acc.add(t);
        if monitor.observe(t, acc.value()) == Step::Settled {
            let scale = 1.0 - params.q();
            return Ok(SeriesResult {
                value: scale * acc.value(),
                abs_error: scale * (monitor.tail_bound() + acc.rounding_allowance()),
                terms_used: n + 1,
                converged: true,
            });
        }
    }
    Err(QError::NonConvergent { what: "q-beta series", tail: None, terms: params.k_max })
}

fn as_finite_order(alpha: f64) -> Option<usize> {
    ((0.0..=FINITE_ORDER_LIMIT).contains(&alpha) && alpha.fract() == 0.0).then_some(alpha as usize)
}

/// `(x - t)_q^alpha = x^alpha (t/x; q)_alpha`.
///
/// Nonnegative integer orders use the exact product `Π (x - q^i t)`; real
/// orders need `x ≥ t ≥ 0`.
pub fn q_power(x: f64, t: f64, alpha: f64, params: &QParams) -> Result<f64> {
    if !(x > 0.0) {
        return Err(QError::Domain(format!("q-power needs x > 0, got {x}")));
    }
    if let Some(k) = as_finite_order(alpha) {
        let q = params.q();
        let mut qi = 1.0;
        let mut prod = 1.0;
        for _ in 0..k {
            prod *= x - qi * t;
            qi *= q;
        }
        return Ok(prod);
    }
    if t == 0.0 {
        return Ok(x.powf(alpha));
    }
    if !(t > 0.0 && t <= x) {
        return Err(QError::Domain(format!("real-order q-power needs x ≥ t > 0, got x = {x}, t = {t}")));
    }
    Ok(x.powf(alpha) * q_pochhammer_real(t / x, alpha, params)?)
}
