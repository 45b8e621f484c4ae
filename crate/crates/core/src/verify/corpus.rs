//! Seeded test functions: a few fixed members of the extremal families plus
//! random finite mixtures of power atoms whose exponents stay inside the
//! integrability window of the case.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::{make_extremal, ExtremalFamily, LatticeFunction, LogValue, Positivity, Support};

use super::case::{InequalityCase, TheoremId};

/// Distance kept from the edges of every exponent window.
const EDGE: f64 = 0.05;

/// One term of a corpus function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Atom {
    /// `c t^beta` on `(0, b]`
    Head { beta: f64, b: f64, c: f64 },
    /// `c t^beta` on `[a, inf)`
    Tail { beta: f64, a: f64, c: f64 },
    /// `c t^beta` on `[a, b]`
    Band { beta: f64, a: f64, b: f64, c: f64 },
    /// `c t^beta1` on `(0, 1]` and `c t^beta2` beyond, strictly positive
    Split { beta1: f64, beta2: f64, c: f64 },
    /// A member of an extremal family.
    Extremal { family: ExtremalFamily },
}

impl Atom {
    pub fn to_function(&self) -> LatticeFunction {
        match *self {
            Atom::Head { beta, b, c } => LatticeFunction::power_atom(beta, Support::UpTo(b), c),
            Atom::Tail { beta, a, c } => LatticeFunction::power_atom(beta, Support::From(a), c),
            Atom::Band { beta, a, b, c } => {
                let (la, lb) = (a.ln(), b.ln());
                LatticeFunction::new(
                    format!("{c}*t^{beta}·χ[{a},{b}]"),
                    Positivity::NonNegative,
                    Support::Between(a, b),
                    move |t| if t >= a && t <= b { c * t.powf(beta) } else { 0.0 },
                )
                .with_log_eval(move |lt| {
                    if lt >= la && lt <= lb { LogValue::positive(beta * lt).mul_f64(c) } else { LogValue::ZERO }
                })
            }
            Atom::Split { beta1, beta2, c } => make_extremal(ExtremalFamily::PowerTwo { beta1, beta2 }).scaled(c),
            Atom::Extremal { family } => make_extremal(family),
        }
    }
}

/// A named finite sum of atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusItem {
    pub label: String,
    pub atoms: Vec<Atom>,
}

impl CorpusItem {
    pub fn to_function(&self) -> LatticeFunction {
        let mut it = self.atoms.iter();
        let first = match it.next() {
            Some(a) => a.to_function(),
            None => return LatticeFunction::zero(),
        };
        it.fold(first, |acc, a| acc.sum(&a.to_function()))
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Open exponent windows `(lo, hi)` for atoms near `t = 0` and near `t = inf`.
struct Windows {
    head: (f64, f64),
    tail: (f64, f64),
}

fn windows(case: &InequalityCase) -> Windows {
    let crit = case.critical_beta();
    let floor = case.alpha - 1.0;
    if case.p > 0.0 {
        Windows { head: (crit.max(floor) + EDGE, crit.max(floor) + 2.5), tail: (crit - 2.5, crit - EDGE) }
    } else {
        // p < 0: f^p must be integrable at 0 and at infinity
        Windows { head: (floor + EDGE, crit - EDGE), tail: (crit + EDGE, crit + 3.0) }
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi <= lo { lo } else { rng.gen_range(lo..hi) }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// Stream seed for one case, so that corpora do not depend on which other
/// cases are requested.
fn case_seed(seed: u64, case: &InequalityCase) -> u64 {
    let tag = TheoremId::ALL.iter().position(|&t| t == case.theorem).unwrap_or(0) as u64;
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(tag + 1);
    for v in [case.q, case.p, case.alpha] {
        h = (h ^ v.to_bits()).wrapping_mul(0x1000_0000_01B3);
    }
    h
}

fn extremal_items(case: &InequalityCase) -> Vec<CorpusItem> {
    let w = windows(case);
    let mid_head = 0.5 * (w.head.0 + w.head.1.min(w.head.0 + 1.0));
    let mid_tail = 0.5 * (w.tail.0.max(w.tail.1 - 1.0) + w.tail.1);
    let fams: Vec<ExtremalFamily> = if case.p < 0.0 {
        vec![ExtremalFamily::PowerTwo { beta1: mid_head, beta2: mid_tail }]
    } else {
        match case.theorem.domain() {
            crate::operators::Domain::FullLine => vec![
                ExtremalFamily::PowerUnit { beta: mid_head },
                ExtremalFamily::PowerTail { beta: mid_tail },
            ],
            crate::operators::Domain::UnitInterval => vec![
                ExtremalFamily::PowerUnit { beta: mid_head },
                ExtremalFamily::PowerUnit { beta: 0.0f64.max(mid_head) },
            ],
        }
    };
    fams.into_iter()
        .map(|family| CorpusItem { label: make_extremal(family).label().to_string(), atoms: vec![Atom::Extremal { family }] })
        .collect()
}

fn random_item(case: &InequalityCase, rng: &mut ChaCha8Rng, index: usize) -> CorpusItem {
    let w = windows(case);
    let mut atoms = Vec::new();
    if case.p < 0.0 {
        atoms.push(Atom::Split {
            beta1: uniform(rng, w.head),
            beta2: uniform(rng, w.tail),
            c: log_uniform(rng, 0.1, 10.0),
        });
    }
    let unit = case.theorem.domain() == crate::operators::Domain::UnitInterval;
    let extra = rng.gen_range(1..=3usize);
    for _ in 0..extra {
        let c = log_uniform(rng, 0.1, 10.0);
        let kind = rng.gen_range(0..3u8);
        let atom = match kind {
            0 if case.p > 0.0 => Atom::Head { beta: uniform(rng, w.head), b: log_uniform(rng, 0.05, if unit { 1.0 } else { 20.0 }), c },
            1 if case.p > 0.0 && !unit => Atom::Tail { beta: uniform(rng, w.tail), a: log_uniform(rng, 0.05, 20.0), c },
            _ => {
                let a = log_uniform(rng, 0.01, if unit { 0.5 } else { 10.0 });
                let b = a * log_uniform(rng, 1.5, 50.0);
                Atom::Band { beta: rng.gen_range(-3.0..3.0), a, b: if unit { b.min(1.0) } else { b }, c }
            }
        };
        atoms.push(atom);
    }
    CorpusItem { label: format!("random-{index}"), atoms }
}

/// Extremal members followed by `count` random mixtures, reproducible from
/// `seed`.
pub fn generate_corpus(case: &InequalityCase, seed: u64, count: usize) -> Vec<CorpusItem> {
    let mut rng = ChaCha8Rng::seed_from_u64(case_seed(seed, case));
    let mut items = extremal_items(case);
    for i in 0..count {
        items.push(random_item(case, &mut rng, i));
    }
    items
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::QParams;

    #[test]
    fn corpus_is_reproducible() {
        let c = InequalityCase::new(TheoremId::Hardy, 0.5, 2.0, 0.0).unwrap();
        assert_eq!(generate_corpus(&c, 7, 10), generate_corpus(&c, 7, 10));
        assert_ne!(generate_corpus(&c, 7, 10), generate_corpus(&c, 8, 10));
    }

    #[test]
    fn negative_p_corpus_is_strictly_positive() {
        let c = InequalityCase::new(TheoremId::HardyNegative, 0.5, -2.0, -2.0).unwrap();
        let params = QParams::new(0.5).unwrap();
        for item in generate_corpus(&c, 1, 20) {
            let f = item.to_function();
            assert_eq!(f.positivity(), Positivity::StrictlyPositive, "{}", item.label);
            for k in [-200i64, -3, 0, 5, 400] {
                assert!(f.at(1.0, k, &params).unwrap() > 0.0 || k.abs() > 100);
            }
        }
    }

    #[test]
    fn band_atom_matches_its_log_form() {
        let f = Atom::Band { beta: -1.5, a: 0.2, b: 3.0, c: 2.0 }.to_function();
        for t in [0.1, 0.2, 1.0, 2.9, 3.0, 3.1] {
            let v = f.evaluate(t).unwrap();
            let lv = f.evaluate_ln(t.ln()).unwrap().to_f64();
            assert!((v - lv).abs() <= 1e-14 * v.abs());
        }
    }
}
