//! Checks of the Schwartz-Zippel bound with per-variable sample sets of
//! different sizes, over F₂(z).
//!
//! For a nonzero `P(x₁..x_N)` with degree `dᵢ` in `xᵢ`, and `xᵢ` drawn
//! uniformly from `Sᵢ`, the probability that `P` vanishes is at most
//! `Σ dᵢ/|Sᵢ|`. Small instances are enumerated exhaustively so the bound is
//! checked exactly, not statistically.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{BinaryPoly, Rational};
use crate::codes::splitmix64;

/// Largest product set `sz_exhaustive` will enumerate.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SzError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("term has {got} exponents, expected {expected}")]
    Arity { expected: usize, got: usize },
    #[error("sample set {0} is empty")]
    EmptySet(usize),
    #[error("sample set {0} repeats a value")]
    RepeatedValue(usize),
    #[error("product set has {0} outcomes, above the exhaustive limit")]
    TooLarge(u128),
    #[error("trials must be positive")]
    ZeroTrials,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub exps: Vec<u32>,
    pub coeff: Rational,
}

/// A nonzero multivariate polynomial over F₂(z), canonical (like terms
/// combined, zero terms dropped), with one sample set per variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SzInstance {
    terms: Vec<Term>,
    sets: Vec<Vec<Rational>>,
    /// Derived from the terms, so not part of the JSON form.
    #[serde(skip)]
    degrees: Vec<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    terms: Vec<Term>,
    sets: Vec<Vec<Rational>>,
}

impl<'de> Deserialize<'de> for SzInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawInstance::deserialize(d)?;
        SzInstance::new(raw.terms, raw.sets).map_err(serde::de::Error::custom)
    }
}

impl SzInstance {
    pub fn new(terms: Vec<Term>, sets: Vec<Vec<Rational>>) -> Result<Self, SzError> {
        let n = sets.len();
        let mut combined: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for t in terms {
            if t.exps.len() != n {
                return Err(SzError::Arity { expected: n, got: t.exps.len() });
            }
            let slot = combined.entry(t.exps).or_insert_with(Rational::zero);
            *slot = slot.add(&t.coeff);
        }
        combined.retain(|_, c| !c.is_zero());
        if combined.is_empty() {
            return Err(SzError::ZeroPolynomial);
        }
        for (i, s) in sets.iter().enumerate() {
            if s.is_empty() {
                return Err(SzError::EmptySet(i));
            }
            if s.iter().collect::<BTreeSet<_>>().len() != s.len() {
                return Err(SzError::RepeatedValue(i));
            }
        }
        let degrees = (0..n).map(|i| combined.keys().map(|e| e[i]).max().unwrap_or(0)).collect();
        let terms = combined.into_iter().map(|(exps, coeff)| Term { exps, coeff }).collect();
        Ok(Self { terms, sets, degrees })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn sets(&self) -> &[Vec<Rational>] {
        &self.sets
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn vars(&self) -> usize {
        self.sets.len()
    }

    pub fn outcomes(&self) -> u128 {
        self.sets.iter().map(|s| s.len() as u128).product()
    }

    /// Exact value of `P` at `x`.
    pub fn eval(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for t in &self.terms {
            let mut v = t.coeff.clone();
            for (xi, &e) in x.iter().zip(&t.exps) {
                for _ in 0..e {
                    v = v.mul(xi);
                }
            }
            acc = acc.add(&v);
        }
        acc
    }

    /// Evaluation at set indices, with all needed powers precomputed.
    fn eval_indexed(&self, powers: &[Vec<Vec<Rational>>], idx: &[usize]) -> bool {
        let mut acc = Rational::zero();
        for t in &self.terms {
            let mut v = t.coeff.clone();
            for (i, &e) in t.exps.iter().enumerate() {
                if e > 0 {
                    v = v.mul(&powers[i][idx[i]][e as usize]);
                }
            }
            acc = acc.add(&v);
        }
        acc.is_zero()
    }

    fn powers(&self) -> Vec<Vec<Vec<Rational>>> {
        self.sets
            .iter()
            .zip(&self.degrees)
            .map(|(s, &d)| {
                s.iter()
                    .map(|x| {
                        let mut p = vec![Rational::one()];
                        for k in 0..d as usize {
                            p.push(p[k].mul(x));
                        }
                        p
                    })
                    .collect()
            })
            .collect()
    }
}

/// `Σ dᵢ/|Sᵢ|`. May exceed one.
pub fn sz_bound(inst: &SzInstance) -> f64 {
    inst.degrees.iter().zip(&inst.sets).map(|(&d, s)| f64::from(d) / s.len() as f64).sum()
}

/// Numerator of the bound over the common denominator `Π|Sᵢ|`.
pub fn sz_bound_scaled(inst: &SzInstance) -> u128 {
    let total = inst.outcomes();
    inst.degrees.iter().zip(&inst.sets).map(|(&d, s)| u128::from(d) * (total / s.len() as u128)).sum()
}

/// Fraction of `trials` uniform draws at which `P` vanishes.
pub fn sz_empirical(inst: &SzInstance, trials: u64, seed: u64) -> Result<f64, SzError> {
    if trials == 0 {
        return Err(SzError::ZeroTrials);
    }
    let powers = inst.powers();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = vec![0; inst.vars()];
    let mut zeros = 0u64;
    for _ in 0..trials {
        for (i, s) in inst.sets.iter().enumerate() {
            idx[i] = rng.gen_range(0..s.len());
        }
        zeros += u64::from(inst.eval_indexed(&powers, &idx));
    }
    Ok(zeros as f64 / trials as f64)
}

/// Number of zeros of `P` on the product set, and the size of that set.
pub fn sz_exhaustive_counts(inst: &SzInstance) -> Result<(u64, u64), SzError> {
    let total = inst.outcomes();
    if total > u128::from(EXHAUSTIVE_LIMIT) {
        return Err(SzError::TooLarge(total));
    }
    let powers = inst.powers();
    let mut idx = vec![0; inst.vars()];
    let mut zeros = 0u64;
    loop {
        zeros += u64::from(inst.eval_indexed(&powers, &idx));
        // Odometer over the product set.
        let mut i = 0;
        loop {
            if i == idx.len() {
                return Ok((zeros, total as u64));
            }
            idx[i] += 1;
            if idx[i] < inst.sets[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Exact probability that `P` vanishes.
pub fn sz_exhaustive(inst: &SzInstance) -> Result<f64, SzError> {
    let (zeros, total) = sz_exhaustive_counts(inst)?;
    Ok(zeros as f64 / total as f64)
}

/// Whether the exact zero count exceeds the bound, compared in integers.
pub fn violates_bound(inst: &SzInstance) -> Result<bool, SzError> {
    let (zeros, _) = sz_exhaustive_counts(inst)?;
    Ok(u128::from(zeros) > sz_bound_scaled(inst))
}

/// Values the generator draws sample sets from: every polynomial of degree
/// below 4, and the inverses of the non-constant ones of degree below 3.
fn value_pool() -> Vec<Rational> {
    let polys: Vec<BinaryPoly> = (0u64..16).map(|w| BinaryPoly::from_words(vec![w])).collect();
    let mut pool: Vec<Rational> = polys.iter().cloned().map(Rational::from_poly).collect();
    for p in polys.iter().filter(|p| p.small_degree().is_some_and(|d| (1..3).contains(&d))) {
        pool.push(Rational::from_poly(p.clone()).inv().expect("nonzero"));
    }
    pool
}

type TermMap = BTreeMap<Vec<u32>, Rational>;

fn poly_mul(a: &TermMap, b: &TermMap) -> TermMap {
    let mut out = TermMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let slot = out.entry(e).or_insert_with(Rational::zero);
            *slot = slot.add(&ca.mul(cb));
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// A random instance with at most `max_vars` variables, per-variable degree
/// at most `max_degree` and set sizes drawn from `sizes`.
///
/// Half of the instances are products of linear factors `xᵢ + s` with `s`
/// taken from `Sᵢ`, which come close to the bound; the rest have random
/// terms.
pub fn random_instance(rng: &mut impl Rng, max_vars: usize, max_degree: u32, sizes: &[usize]) -> SzInstance {
    let pool = value_pool();
    let n = rng.gen_range(1..=max_vars);
    let sets: Vec<Vec<Rational>> = (0..n)
        .map(|_| {
            let size = *sizes.choose(rng).expect("sizes");
            pool.choose_multiple(rng, size).cloned().collect()
        })
        .collect();
    let small = |rng: &mut dyn rand::RngCore| Rational::from_poly(BinaryPoly::from_words(vec![rng.gen_range(1u64..8)]));
    loop {
        let terms: TermMap = if rng.gen_bool(0.5) {
            let mut p = TermMap::from([(vec![0; n], small(rng))]);
            for (i, s) in sets.iter().enumerate() {
                let d = rng.gen_range(0..=max_degree as usize).min(s.len());
                for root in s.choose_multiple(rng, d) {
                    let mut unit = vec![0; n];
                    unit[i] = 1;
                    let lin = TermMap::from([(unit, Rational::one()), (vec![0; n], root.clone())]);
                    p = poly_mul(&p, &lin);
                }
            }
            p
        } else {
            (0..rng.gen_range(1..=6))
                .map(|_| ((0..n).map(|_| rng.gen_range(0..=max_degree)).collect(), small(rng)))
                .collect()
        };
        let terms = terms.into_iter().map(|(exps, coeff)| Term { exps, coeff }).collect();
        if let Ok(inst) = SzInstance::new(terms, sets.clone()) {
            return inst;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SzResult {
    pub vars: usize,
    pub degrees: Vec<u32>,
    pub set_sizes: Vec<usize>,
    pub bound: f64,
    pub exhaustive: f64,
    pub empirical: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SzReport {
    pub instances: usize,
    pub violations: usize,
    pub results: Vec<SzResult>,
}

impl SzReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Generates `count` instances from `seed` and checks each one exactly and
/// by sampling.
pub fn sz_corpus(
    count: usize,
    max_vars: usize,
    max_degree: u32,
    sizes: &[usize],
    trials: u64,
    seed: u64,
) -> Result<SzReport, SzError> {
    let results = (0..count)
        .into_par_iter()
        .map(|k| {
            let s = splitmix64(seed ^ splitmix64(k as u64));
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let inst = random_instance(&mut rng, max_vars, max_degree, sizes);
            Ok(SzResult {
                vars: inst.vars(),
                degrees: inst.degrees.clone(),
                set_sizes: inst.sets.iter().map(Vec::len).collect(),
                bound: sz_bound(&inst),
                exhaustive: sz_exhaustive(&inst)?,
                empirical: sz_empirical(&inst, trials, s)?,
                violation: violates_bound(&inst)?,
            })
        })
        .collect::<Result<Vec<_>, SzError>>()?;
    let violations = results.iter().filter(|r| r.violation).count();
    Ok(SzReport { instances: count, violations, results })
}
