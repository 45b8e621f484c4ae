use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};

/// The lattice base `q` together with the numerical policy shared by every
/// truncated series and product in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QParams {
    q: f64,
    /// Relative size below which a term counts as negligible.
    pub eps_tail: f64,
    /// Largest lattice index magnitude any sum may reach.
    pub k_max: usize,
    /// Largest number of factors in an infinite product.
    pub n_max_product: usize,
    /// Negligible terms required in a row before a series is cut.
    pub consecutive_small: usize,
}

impl QParams {
    pub const DEFAULT_EPS_TAIL: f64 = 1e-14;
    pub const DEFAULT_K_MAX: usize = 100_000;
    pub const DEFAULT_N_MAX_PRODUCT: usize = 100_000;
    pub const DEFAULT_CONSECUTIVE_SMALL: usize = 5;

    pub fn new(q: f64) -> Result<Self> {
        Self {
            q,
            eps_tail: Self::DEFAULT_EPS_TAIL,
            k_max: Self::DEFAULT_K_MAX,
            n_max_product: Self::DEFAULT_N_MAX_PRODUCT,
            consecutive_small: Self::DEFAULT_CONSECUTIVE_SMALL,
        }
        .validated()
    }

    /// Checks every invariant; used after manual field overrides.
    pub fn validated(self) -> Result<Self> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(QError::Parameter("q must lie in (0,1)".into()));
        }
        if !(self.eps_tail > 0.0 && self.eps_tail.is_finite()) {
            return Err(QError::Parameter("eps_tail must be positive".into()));
        }
        if self.k_max == 0 || self.n_max_product == 0 || self.consecutive_small == 0 {
            return Err(QError::Parameter(
                "k_max, n_max_product and consecutive_small must be at least 1".into(),
            ));
        }
        Ok(self)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn ln_q(&self) -> f64 {
        self.q.ln()
    }

    /// `q^e` for real `e`, evaluated as `exp(e ln q)`.
    pub fn pow(&self, e: f64) -> f64 {
        (e * self.ln_q()).exp()
    }

    /// `1 - q^e` without cancellation for small `e`.
    pub fn one_minus_pow(&self, e: f64) -> f64 {
        -(e * self.ln_q()).exp_m1()
    }

    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = k_max.max(1);
        self
    }

    pub fn with_eps_tail(mut self, eps_tail: f64) -> Result<Self> {
        self.eps_tail = eps_tail;
        self.validated()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_q_outside_unit_interval() {
        for q in [0.0, 1.0, 1.5, -0.2, f64::NAN] {
            let err = QParams::new(q).unwrap_err();
            assert_eq!(err, QError::Parameter("q must lie in (0,1)".into()));
        }
    }

    #[test]
    fn rejects_bad_policy() {
        let mut p = QParams::new(0.5).unwrap();
        p.consecutive_small = 0;
        assert!(p.validated().is_err());
        assert!(QParams::new(0.5).unwrap().with_eps_tail(0.0).is_err());
    }

    #[test]
    fn defaults() {
        let p = QParams::new(0.5).unwrap();
        assert_eq!(p.eps_tail, 1e-14);
        assert_eq!(p.k_max, 100_000);
        assert_eq!(p.n_max_product, 100_000);
        assert_eq!(p.consecutive_small, 5);
        assert_eq!(p.pow(2.0), 0.25);
        let x = 1e-9 * std::f64::consts::LN_2;
        assert!((p.one_minus_pow(1e-9) - x * (1.0 - x / 2.0)).abs() < 1e-24);
    }
}
