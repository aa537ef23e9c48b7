//! Weighted growth of solution languages and solution sets: exact
//! coefficient counting, minimal linear-recurrence fitting with a held-out
//! verification window, multivariate weight tables, and coset-wise
//! polyhedral witnesses.
//!
//! Rationality is certified empirically: a minimal recurrence is fitted on
//! a prefix of the coefficient sequence in exact rational arithmetic and
//! must reproduce the held-out remainder exactly before a report is marked
//! verified. The rational generating function is emitted as integer
//! numerator and denominator polynomials, the denominator mirroring the
//! fitted recurrence.

use crate::edt0l::Edt0lSystem;
use crate::equations::CosetDecomposition;
use crate::group::GroupElement;
use crate::polyhedral::{ElementarySet, PolyhedralSet};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrowthError {
    #[error("fit window {fit} + verify window {verify} exceed {have} coefficients")]
    WindowTooLarge { fit: usize, verify: usize, have: usize },
    #[error("fit window must be nonempty")]
    EmptyFitWindow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitStatus {
    /// The minimal recurrence fitted on the fit window reproduces the
    /// verify window exactly.
    Verified,
    /// No recurrence of order at most half the fit window fits, or the
    /// fitted one fails on the verify window.
    NoRecurrenceAtOrder,
    /// The underlying enumeration hit its cap; counts may be incomplete.
    CapSaturated,
}

impl FitStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitStatus::Verified => "verified",
            FitStatus::NoRecurrenceAtOrder => "no-recurrence-at-order",
            FitStatus::CapSaturated => "cap-saturated",
        }
    }
}

/// Fitted growth data for one coefficient sequence.
#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub coefficients: Vec<BigInt>,
    pub fit_len: usize,
    pub verify_len: usize,
    /// Recurrence coefficients `r_1..r_L`: `s(n) = sum r_j s(n-j)`.
    pub recurrence: Option<Vec<BigRational>>,
    pub numerator: Vec<BigInt>,
    pub denominator: Vec<BigInt>,
    pub status: FitStatus,
}

impl GrowthReport {
    fn unfitted(coefficients: Vec<BigInt>, fit_len: usize, verify_len: usize, status: FitStatus) -> Self {
        GrowthReport {
            coefficients,
            fit_len,
            verify_len,
            recurrence: None,
            numerator: vec![BigInt::zero()],
            denominator: vec![BigInt::one()],
            status,
        }
    }

    /// Expand the stored rational function back into a power series; a
    /// cross-check used by tests and the report printer.
    pub fn series_from_rational(&self, terms: usize) -> Vec<BigInt> {
        series_of_rational(&self.numerator, &self.denominator, terms)
    }
}

/// Power-series expansion of `numerator / denominator`; the denominator
/// must have a nonzero constant term that divides every convolution (true
/// for all reports produced here).
pub fn series_of_rational(numerator: &[BigInt], denominator: &[BigInt], terms: usize) -> Vec<BigInt> {
    assert!(!denominator.is_empty() && !denominator[0].is_zero());
    let d0 = BigRational::from(denominator[0].clone());
    let mut series: Vec<BigRational> = Vec::with_capacity(terms);
    for n in 0..terms {
        let mut acc = BigRational::from(
            numerator.get(n).cloned().unwrap_or_else(BigInt::zero),
        );
        for j in 1..denominator.len().min(n + 1) {
            let term = BigRational::from(denominator[j].clone()) * &series[n - j];
            acc -= term;
        }
        series.push(acc / &d0);
    }
    series
        .into_iter()
        .map(|r| {
            assert!(r.is_integer(), "series expansion must be integral");
            r.to_integer()
        })
        .collect()
}

/// Fit and verify windows over a coefficient sequence.
#[derive(Clone, Copy, Debug)]
pub struct FitWindows {
    pub fit_len: usize,
    pub verify_len: usize,
}

impl FitWindows {
    /// Default split: first 60% of the coefficients fit, remainder verify.
    pub fn default_split(total: usize) -> Self {
        let fit_len = ((total * 3).div_ceil(5)).clamp(1, total.max(1));
        FitWindows { fit_len, verify_len: total.saturating_sub(fit_len) }
    }
}

/// Berlekamp-Massey over the rationals: the minimal `L` and coefficients
/// `r_1..r_L` with `s(n) = sum r_j s(n-j)` for `L <= n < len`.
fn minimal_recurrence(seq: &[BigRational]) -> (usize, Vec<BigRational>) {
    let mut connection = vec![BigRational::one()];
    let mut previous = vec![BigRational::one()];
    let mut order = 0usize;
    let mut gap = 1usize;
    let mut last_discrepancy = BigRational::one();
    for n in 0..seq.len() {
        let mut discrepancy = seq[n].clone();
        for i in 1..=order {
            discrepancy += &connection[i] * &seq[n - i];
        }
        if discrepancy.is_zero() {
            gap += 1;
        } else if 2 * order <= n {
            let snapshot = connection.clone();
            let factor = &discrepancy / &last_discrepancy;
            if connection.len() < previous.len() + gap {
                connection.resize(previous.len() + gap, BigRational::zero());
            }
            for (i, p) in previous.iter().enumerate() {
                let term = &factor * p;
                connection[i + gap] -= term;
            }
            order = n + 1 - order;
            previous = snapshot;
            last_discrepancy = discrepancy;
            gap = 1;
        } else {
            let factor = &discrepancy / &last_discrepancy;
            if connection.len() < previous.len() + gap {
                connection.resize(previous.len() + gap, BigRational::zero());
            }
            for (i, p) in previous.iter().enumerate() {
                let term = &factor * p;
                connection[i + gap] -= term;
            }
            gap += 1;
        }
    }
    connection.resize(order + 1, BigRational::zero());
    let recurrence = connection[1..].iter().map(|c| -c.clone()).collect();
    (order, recurrence)
}

fn trim_trailing_zeros(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.len() > 1 && v.last().is_some_and(|x| x.is_zero()) {
        v.pop();
    }
    v
}

/// Fit the minimal linear recurrence on the first `fit_len` coefficients
/// (exact arithmetic), verify it on the next `verify_len`, and emit the
/// rational generating function. Orders above `fit_len / 2` are rejected
/// rather than silently accepted.
pub fn fit_rational(
    coefficients: &[BigInt],
    windows: FitWindows,
) -> Result<GrowthReport, GrowthError> {
    let FitWindows { fit_len, verify_len } = windows;
    if fit_len == 0 {
        return Err(GrowthError::EmptyFitWindow);
    }
    if fit_len + verify_len > coefficients.len() {
        return Err(GrowthError::WindowTooLarge {
            fit: fit_len,
            verify: verify_len,
            have: coefficients.len(),
        });
    }
    let coefficients = coefficients.to_vec();
    let rational: Vec<BigRational> =
        coefficients.iter().map(|c| BigRational::from(c.clone())).collect();
    let (order, recurrence) = minimal_recurrence(&rational[..fit_len]);
    if 2 * order > fit_len {
        return Ok(GrowthReport::unfitted(
            coefficients,
            fit_len,
            verify_len,
            FitStatus::NoRecurrenceAtOrder,
        ));
    }
    for n in fit_len..fit_len + verify_len {
        let mut predicted = BigRational::zero();
        for (j, r) in recurrence.iter().enumerate() {
            predicted += r * &rational[n - 1 - j];
        }
        if predicted != rational[n] {
            return Ok(GrowthReport::unfitted(
                coefficients,
                fit_len,
                verify_len,
                FitStatus::NoRecurrenceAtOrder,
            ));
        }
    }

    // Generating function: den = 1 - sum r_j z^j, num = truncation of
    // den * series below degree `order`.
    let mut den_rational = vec![BigRational::one()];
    den_rational.extend(recurrence.iter().map(|r| -r.clone()));
    // num_n = s_n - sum_{j=1..min(n,order)} r_j s_{n-j}, degrees below `order`.
    let mut num_rational = Vec::with_capacity(order.max(1));
    for n in 0..order {
        let mut acc = rational[n].clone();
        for (j, r) in recurrence.iter().enumerate().take(n) {
            acc -= r * &rational[n - 1 - j];
        }
        num_rational.push(acc);
    }
    if order == 0 {
        num_rational.push(BigRational::zero());
    }

    let mut lcm = BigInt::one();
    for c in den_rational.iter().chain(num_rational.iter()) {
        lcm = num_integer::lcm(lcm, c.denom().clone());
    }
    let scale = |v: &[BigRational]| -> Vec<BigInt> {
        v.iter().map(|c| (c * BigRational::from(lcm.clone())).to_integer()).collect()
    };
    let mut numerator = scale(&num_rational);
    let mut denominator = scale(&den_rational);
    let mut content = BigInt::zero();
    for c in numerator.iter().chain(denominator.iter()) {
        content = num_integer::gcd(content, c.clone());
    }
    if !content.is_zero() && !content.is_one() {
        for c in numerator.iter_mut().chain(denominator.iter_mut()) {
            *c = &*c / &content;
        }
    }
    if denominator[0].is_negative() {
        for c in numerator.iter_mut().chain(denominator.iter_mut()) {
            *c = -c.clone();
        }
    }
    let numerator = trim_trailing_zeros(numerator);
    let denominator = trim_trailing_zeros(denominator);

    Ok(GrowthReport {
        coefficients,
        fit_len,
        verify_len,
        recurrence: Some(recurrence),
        numerator,
        denominator,
        status: FitStatus::Verified,
    })
}

/// Count words by weight and fit. Letter weights default to 1; the word
/// weight is the sum of its letter weights.
pub fn language_growth(
    system: &Edt0lSystem,
    letter_weights: &BTreeMap<String, u64>,
    max_weight: u64,
    max_steps: usize,
    windows: Option<FitWindows>,
) -> Result<GrowthReport, GrowthError> {
    let enumeration = system.enumerate(max_weight as usize, max_steps);
    let mut counts = vec![BigInt::zero(); max_weight as usize + 1];
    for word in &enumeration.words {
        let weight: u64 = word
            .iter()
            .map(|&c| letter_weights.get(system.alphabet.name(c)).copied().unwrap_or(1))
            .sum();
        if weight <= max_weight {
            counts[weight as usize] += 1;
        }
    }
    if enumeration.saturated {
        let n = counts.len();
        return Ok(GrowthReport::unfitted(counts, n, 0, FitStatus::CapSaturated));
    }
    counts_growth(counts, windows)
}

/// Fit a coefficient sequence directly.
pub fn counts_growth(
    counts: Vec<BigInt>,
    windows: Option<FitWindows>,
) -> Result<GrowthReport, GrowthError> {
    let windows = windows.unwrap_or_else(|| FitWindows::default_split(counts.len()));
    fit_rational(&counts, windows)
}

/// Weighted relative growth of a set of solution tuples: the weight of a
/// tuple is the sum of the geodesic weights of its coordinates, read from
/// a precomputed ball. Tuples with any coordinate outside the ball weigh
/// more than `max_weight` and are skipped.
pub fn relative_growth(
    solutions: &[Vec<GroupElement>],
    ball: &BTreeMap<GroupElement, u64>,
    max_weight: u64,
    windows: Option<FitWindows>,
) -> Result<GrowthReport, GrowthError> {
    let counts = tuple_weight_counts(solutions, ball, max_weight);
    counts_growth(counts, windows)
}

pub fn tuple_weight_counts(
    solutions: &[Vec<GroupElement>],
    ball: &BTreeMap<GroupElement, u64>,
    max_weight: u64,
) -> Vec<BigInt> {
    let mut counts = vec![BigInt::zero(); max_weight as usize + 1];
    'tuples: for tuple in solutions {
        let mut total = 0u64;
        for g in tuple {
            match ball.get(g) {
                Some(&w) => total += w,
                None => continue 'tuples,
            }
            if total > max_weight {
                continue 'tuples;
            }
        }
        counts[total as usize] += 1;
    }
    counts
}

/// Exact counts per coordinate-wise weight tuple, complete up to the cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultivariateTable {
    pub cap: u64,
    pub entries: BTreeMap<Vec<u64>, u64>,
}

pub fn multivariate_growth(
    solutions: &[Vec<GroupElement>],
    ball: &BTreeMap<GroupElement, u64>,
    cap: u64,
) -> MultivariateTable {
    let mut entries: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    'tuples: for tuple in solutions {
        let mut weights = Vec::with_capacity(tuple.len());
        let mut total = 0u64;
        for g in tuple {
            match ball.get(g) {
                Some(&w) => {
                    weights.push(w);
                    total += w;
                }
                None => continue 'tuples,
            }
            if total > cap {
                continue 'tuples;
            }
        }
        *entries.entry(weights).or_insert(0) += 1;
    }
    MultivariateTable { cap, entries }
}

/// Identify all variables: `sigma(n)` sums the table entries of total
/// weight `n`.
pub fn specialize(table: &MultivariateTable) -> Vec<BigInt> {
    let mut counts = vec![BigInt::zero(); table.cap as usize + 1];
    for (weights, &count) in &table.entries {
        let total: u64 = weights.iter().sum();
        if total <= table.cap {
            counts[total as usize] += count;
        }
    }
    counts
}

/// For each valid transversal tuple, the basic polyhedral set over
/// `Z^(k*n)` cut out by the tuple's scalar equations. An empty conjunction
/// (no equations) is all of `Z^(k*n)`.
pub fn cosetwise_polyhedral_witness(
    decomposition: &CosetDecomposition,
) -> Vec<(Vec<usize>, PolyhedralSet)> {
    let dim = decomposition.rank * decomposition.variables;
    decomposition
        .cases
        .iter()
        .map(|case| {
            let conjuncts = case
                .linear
                .raw_equations
                .iter()
                .map(|(coeffs, rhs)| ElementarySet::equation(coeffs.clone(), rhs.clone()))
                .collect();
            let set = PolyhedralSet::from_basic(dim, conjuncts).expect("dimensions agree");
            (case.tuple.clone(), set)
        })
        .collect()
}
