//! Table-driven checks of the discrete inequalities over seeded sequences.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discrete::{
    classical_discrete_check, classical_discrete_constant, copson_lhs, hardy_discrete_lhs, matrix_constant, matrix_lhs,
    reverse_discrete_check, weighted_mean_lhs, ClassicalForm, DiscreteCase, DiscreteSequence, Direction, IndexDomain,
    MatrixWeight, MeanWeights,
};
use crate::error::{QError, Result};
use crate::params::QParams;
use crate::series::SeriesResult;

/// The discrete inequality families. Equation-style labels are accepted
/// as aliases when parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscreteForm {
    /// power weights with a difference numerator, window from `n = 1`
    DifferenceWeights,
    /// power-weighted Hardy means, window from `n = 1`
    PowerWeights,
    /// geometric Copson sum over `ℤ`
    CopsonBilateral,
    /// geometric Copson sum over `n ≥ 0`
    Copson,
    /// geometric Hardy sum over `ℤ`
    HardyBilateral,
    /// geometric Hardy sum over `n ≥ 0`
    Hardy,
    /// the four normalised means with geometric weights
    WeightedMeans,
    /// normalised kernel-weighted Copson operator over `ℤ`
    MatrixCopsonBilateral,
    /// normalised kernel-weighted Copson operator over `n ≥ 0`
    MatrixCopson,
    /// normalised kernel-weighted Hardy operator over `ℤ`
    MatrixHardyBilateral,
    /// reverse Copson inequalities with correction terms, `0 < p < 1`
    Reverse,
}

impl DiscreteForm {
    pub const ALL: [DiscreteForm; 11] = [
        DiscreteForm::DifferenceWeights,
        DiscreteForm::PowerWeights,
        DiscreteForm::CopsonBilateral,
        DiscreteForm::Copson,
        DiscreteForm::HardyBilateral,
        DiscreteForm::Hardy,
        DiscreteForm::WeightedMeans,
        DiscreteForm::MatrixCopsonBilateral,
        DiscreteForm::MatrixCopson,
        DiscreteForm::MatrixHardyBilateral,
        DiscreteForm::Reverse,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DiscreteForm::DifferenceWeights => "difference-weights",
            DiscreteForm::PowerWeights => "power-weights",
            DiscreteForm::CopsonBilateral => "copson-bilateral",
            DiscreteForm::Copson => "copson",
            DiscreteForm::HardyBilateral => "hardy-bilateral",
            DiscreteForm::Hardy => "hardy",
            DiscreteForm::WeightedMeans => "weighted-means",
            DiscreteForm::MatrixCopsonBilateral => "matrix-copson-bilateral",
            DiscreteForm::MatrixCopson => "matrix-copson",
            DiscreteForm::MatrixHardyBilateral => "matrix-hardy-bilateral",
            DiscreteForm::Reverse => "reverse",
        }
    }

    fn aliases(&self) -> &'static [&'static str] {
        match self {
            DiscreteForm::DifferenceWeights => &["3.21"],
            DiscreteForm::PowerWeights => &["3.22"],
            DiscreteForm::CopsonBilateral => &["3.23"],
            DiscreteForm::Copson => &["3.24"],
            DiscreteForm::HardyBilateral => &["3.25"],
            DiscreteForm::Hardy => &["3.26"],
            DiscreteForm::WeightedMeans => &["w1", "w2"],
            DiscreteForm::MatrixCopsonBilateral => &["4.12", "4.10"],
            DiscreteForm::MatrixCopson => &["4.13", "4.11"],
            DiscreteForm::MatrixHardyBilateral => &["4.15", "4.14"],
            DiscreteForm::Reverse => &[],
        }
    }

    /// Whether the second parameter is the kernel order `alpha` rather than
    /// the geometric exponent `lambda`.
    pub fn uses_alpha(&self) -> bool {
        matches!(
            self,
            DiscreteForm::DifferenceWeights
                | DiscreteForm::PowerWeights
                | DiscreteForm::MatrixCopsonBilateral
                | DiscreteForm::MatrixCopson
                | DiscreteForm::MatrixHardyBilateral
        )
    }

    /// The geometric forms that have an ε-sweep, with their direction and
    /// index domain.
    pub fn geometric(&self) -> Option<(Direction, IndexDomain)> {
        match self {
            DiscreteForm::CopsonBilateral => Some((Direction::Copson, IndexDomain::Bilateral)),
            DiscreteForm::Copson => Some((Direction::Copson, IndexDomain::OneSided)),
            DiscreteForm::HardyBilateral => Some((Direction::Hardy, IndexDomain::Bilateral)),
            DiscreteForm::Hardy => Some((Direction::Hardy, IndexDomain::OneSided)),
            _ => None,
        }
    }

    pub fn is_classical(&self) -> bool {
        matches!(self, DiscreteForm::DifferenceWeights | DiscreteForm::PowerWeights)
    }

    fn is_bilateral(&self) -> bool {
        matches!(
            self,
            DiscreteForm::CopsonBilateral | DiscreteForm::HardyBilateral | DiscreteForm::MatrixCopsonBilateral
                | DiscreteForm::MatrixHardyBilateral
        )
    }

    /// Rejects `(p, param)` outside the form's range.
    pub fn check(&self, q: f64, p: f64, param: f64) -> Result<()> {
        QParams::new(q)?;
        let fail = |need: &str| {
            Err(QError::Parameter(format!("{} is not defined at p={p}, param={param}: needs {need}", self.name())))
        };
        match self {
            DiscreteForm::Reverse if !(p > 0.0 && p < 1.0) => fail("0 < p < 1"),
            DiscreteForm::Reverse if !(param > 0.0) => fail("lambda > 0"),
            DiscreteForm::Reverse => Ok(()),
            _ if !(p > 1.0) => fail("p > 1 (finitely supported sequences cannot serve p < 0)"),
            f if f.is_classical() && !(param < 1.0 - 1.0 / p) => fail("alpha < 1 - 1/p"),
            f if f.is_classical() => Ok(()),
            f if f.uses_alpha() && !(param > 0.0) => fail("alpha > 0"),
            _ if !(param > 0.0) => fail("a positive parameter"),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for DiscreteForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DiscreteForm {
    type Err = QError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        DiscreteForm::ALL
            .iter()
            .find(|f| f.name() == s || f.aliases().contains(&s))
            .copied()
            .ok_or_else(|| QError::Parameter(format!("unknown discrete form '{s}'")))
    }
}

/// A named sequence of the discrete corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteItem {
    pub label: String,
    pub sequence: DiscreteSequence,
}

/// Seeded nonnegative sequences of length `len` starting at `n_lo`: iid
/// uniform values, sparse spikes, slow geometric decay and power decay.
/// Every item has at least one positive entry.
pub fn discrete_corpus(seed: u64, count: usize, len: usize, n_lo: i64) -> Vec<DiscreteItem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = len.max(1);
    (0..count)
        .map(|i| {
            let kind = i % 4;
            let values: Vec<f64> = match kind {
                0 => (0..len).map(|_| rng.gen::<f64>()).collect(),
                1 => {
                    let mut v = vec![0.0; len];
                    let spikes = (len / 50).max(1);
                    for _ in 0..spikes {
                        let at = rng.gen_range(0..len);
                        v[at] = rng.gen_range(-3.0f64..3.0).exp();
                    }
                    v
                }
                2 => {
                    let r: f64 = rng.gen_range(0.9..0.9999);
                    let c: f64 = rng.gen_range(0.1..10.0);
                    (0..len).map(|k| c * r.powi(k as i32)).collect()
                }
                _ => {
                    let s: f64 = rng.gen_range(0.3..2.0);
                    (0..len).map(|k| ((k + 1) as f64).powf(-s)).collect()
                }
            };
            let label = ["uniform", "sparse", "geometric", "power"][kind];
            DiscreteItem {
                label: format!("{label}-{i}"),
                sequence: DiscreteSequence::nonneg(n_lo, values).expect("corpus values are finite and nonnegative"),
            }
        })
        .collect()
}

/// One checked inequality on one sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteRow {
    pub form: DiscreteForm,
    /// which inequality of the form
    pub check: String,
    pub q: f64,
    pub p: f64,
    /// `lambda` or `alpha`, depending on the form
    pub param: f64,
    pub sequence: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / Σ a_n^p`
    pub ratio: f64,
    /// the constant multiplying `Σ a_n^p`
    pub bound: f64,
    pub error_budget: f64,
    pub reverse: bool,
    pub satisfied: bool,
    pub strict: bool,
}

fn row(
    form: DiscreteForm,
    check: &str,
    (q, p, param): (f64, f64, f64),
    item: &DiscreteItem,
    lhs: SeriesResult,
    norm: SeriesResult,
    bound: f64,
) -> DiscreteRow {
    let rhs = norm.value * bound;
    let error_budget = 10.0 * (lhs.abs_error + bound * norm.abs_error);
    let margin = rhs - lhs.value;
    DiscreteRow {
        form,
        check: check.to_string(),
        q,
        p,
        param,
        sequence: item.label.clone(),
        lhs: lhs.value,
        rhs,
        ratio: lhs.value / norm.value,
        bound,
        error_budget,
        reverse: false,
        satisfied: margin >= -error_budget,
        strict: margin > error_budget,
    }
}

/// Window placement used by a form: bilateral forms center the window on
/// 0, the classical forms start at 1, the rest at 0.
pub fn window_start(form: DiscreteForm, len: usize) -> i64 {
    if form.is_bilateral() {
        -(len as i64 / 2)
    } else if form.is_classical() {
        1
    } else {
        0
    }
}

/// Runs every inequality of `form` at `(q, p, param)` over `corpus`. A
/// parameter outside the form's range is an error, so callers can report
/// the cell as skipped.
pub fn run_discrete(form: DiscreteForm, q: f64, p: f64, param: f64, corpus: &[DiscreteItem]) -> Result<Vec<DiscreteRow>> {
    form.check(q, p, param)?;
    let params = QParams::new(q)?;
    let key = (q, p, param);
    let mut rows = Vec::new();
    for item in corpus.iter().filter(|i| !i.sequence.is_zero()) {
        let a = &item.sequence;
        let norm = a.power_sum(p)?;
        match form {
            DiscreteForm::CopsonBilateral | DiscreteForm::Copson | DiscreteForm::HardyBilateral | DiscreteForm::Hardy => {
                let (direction, domain) = form.geometric().expect("geometric form");
                let case = DiscreteCase::new(param, p, q, domain)?;
                let lhs = match direction {
                    Direction::Copson => copson_lhs(a, &case)?,
                    Direction::Hardy => hardy_discrete_lhs(a, &case)?,
                };
                rows.push(row(form, "bound", key, item, lhs, norm, case.constant()));
            }
            DiscreteForm::DifferenceWeights | DiscreteForm::PowerWeights => {
                let cf = if form == DiscreteForm::DifferenceWeights {
                    ClassicalForm::DifferenceWeights
                } else {
                    ClassicalForm::PowerWeights
                };
                let (lhs, _) = classical_discrete_check(a, param, p, cf)?;
                rows.push(row(form, "sampled", key, item, lhs, norm, classical_discrete_constant(param, p)));
            }
            DiscreteForm::WeightedMeans => {
                let geo = MeanWeights::Geometric { q, lambda: param };
                let rec = MeanWeights::ReciprocalGeometric { q, lambda: param };
                // the bilateral means see the same values centered on 0
                let a_one = DiscreteSequence::nonneg(0, a.values().to_vec())?;
                let a_two = DiscreteSequence::nonneg(-(a.values().len() as i64 / 2), a.values().to_vec())?;
                let a_bound = DiscreteCase::new(param, p, q, IndexDomain::OneSided)?.constant();
                let cases = [
                    ("hardy-one-sided", &a_one, rec, Direction::Hardy, IndexDomain::OneSided, a_bound),
                    ("copson-one-sided", &a_one, geo, Direction::Copson, IndexDomain::OneSided, 1.0),
                    ("hardy-bilateral", &a_two, rec, Direction::Hardy, IndexDomain::Bilateral, 1.0),
                    ("copson-bilateral", &a_two, geo, Direction::Copson, IndexDomain::Bilateral, 1.0),
                ];
                for (check, seq, w, dir, dom, bound) in cases {
                    let lhs = weighted_mean_lhs(seq, w, dir, dom, p)?;
                    rows.push(row(form, check, key, item, lhs, norm, bound));
                }
            }
            DiscreteForm::MatrixCopsonBilateral | DiscreteForm::MatrixCopson | DiscreteForm::MatrixHardyBilateral => {
                let (direction, domain) = match form {
                    DiscreteForm::MatrixCopsonBilateral => (Direction::Copson, IndexDomain::Bilateral),
                    DiscreteForm::MatrixCopson => (Direction::Copson, IndexDomain::OneSided),
                    _ => (Direction::Hardy, IndexDomain::Bilateral),
                };
                let w = MatrixWeight::new(param, p / (p - 1.0), q)?;
                let normalized = matrix_lhs(a, &w, direction, domain, true, &params)?;
                rows.push(row(form, "normalized", key, item, normalized, norm, 1.0));
                let plain = matrix_lhs(a, &w, direction, domain, false, &params)?;
                rows.push(row(form, "unnormalized", key, item, plain, norm, matrix_constant(&w, direction, &params)?));
            }
            DiscreteForm::Reverse => {
                let case = DiscreteCase::new(param, p, q, IndexDomain::OneSided)?;
                let pairs = reverse_discrete_check(a, &case)?;
                for (i, pair) in pairs.iter().enumerate() {
                    let budget = 10.0 * (pair.lhs.abs_error + pair.rhs.abs_error);
                    let margin = pair.lhs.value - pair.rhs.value;
                    rows.push(DiscreteRow {
                        form,
                        check: format!("reverse-{}", i + 1),
                        q,
                        p,
                        param,
                        sequence: item.label.clone(),
                        lhs: pair.lhs.value,
                        rhs: pair.rhs.value,
                        ratio: pair.lhs.value / norm.value,
                        bound: case.constant(),
                        error_budget: budget,
                        reverse: true,
                        satisfied: margin >= -budget,
                        strict: margin > budget,
                    });
                }
            }
        }
    }
    Ok(rows)
}
