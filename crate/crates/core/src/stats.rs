//! Exact binomial machinery: pmf, the significance test over equally-or-less
//! probable outcomes, and the compatible-parameter scan.
//!
//! An observed count k out of n trials is *significant* at level α under the
//! hypothesis p = p0 when the total probability of the observation together
//! with every outcome at most as probable is strictly below α; a tail mass
//! exactly equal to α is not significant. The *compatible set* of a result
//! is the set of hypothesis values p under which it is not significant — a
//! scan over a finite grid, reported as maximal intervals.
//!
//! Everything stays in exact rational arithmetic when inputs are rational;
//! float inputs flow through shortest-round-trip `f64` with a relative
//! `1e-12` tie tolerance when comparing pmf values, so that the symmetric
//! ties at p0 = 1/2 survive rounding.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::dataset::ExperimentDataset;
use crate::error::{Error, Result};
use crate::model::{RespondentKind, TestFormat};
use crate::num::{Interval, Prob, Scalar};

/// A count of k successes in n Bernoulli trials, 0 ≤ k ≤ n, n ≥ 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BinomialObservation {
    n: u64,
    k: u64,
}

impl BinomialObservation {
    pub fn new(n: u64, k: u64) -> Result<BinomialObservation> {
        if n == 0 || k > n {
            return Err(Error::InvalidObservation { n, k });
        }
        Ok(BinomialObservation { n, k })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// The point rate k/n, exact.
    pub fn rate(&self) -> Prob {
        let ratio = BigRational::new(BigInt::from(self.k), BigInt::from(self.n));
        Prob::new(Scalar::from_ratio(ratio)).expect("k/n is in [0, 1]")
    }
}

impl std::fmt::Display for BinomialObservation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} of {}", self.k, self.n)
    }
}

/// C(n, k) in exact integer arithmetic (multiplicative form, no factorials).
fn binomial_coefficient(n: u64, k: u64) -> BigInt {
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    // Each partial product is itself a binomial coefficient, so the division
    // is exact at every step.
    for i in 1..=k {
        acc = acc * (n - k + i) / i;
    }
    acc
}

fn exact_pmf(n: u64, k: u64, p: &BigRational) -> BigRational {
    let q = BigRational::one() - p;
    let coeff = BigRational::from(binomial_coefficient(n, k));
    coeff * rational_pow(p, k) * rational_pow(&q, n - k)
}

/// x^e with the convention x^0 = 1 (covers 0^0 at degenerate p).
fn rational_pow(x: &BigRational, e: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

fn float_pmf(n: u64, k: u64, p: f64) -> f64 {
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    // Run the explicit product over the smaller of k and n-k.
    let (k, p, q) = if 2 * k > n {
        (n - k, 1.0 - p, p)
    } else {
        (k, p, 1.0 - p)
    };
    let nq = n - k;
    // Interleave coefficient factors (≥ 1) with q factors (≤ 1) to keep the
    // running product in range even for large n.
    let mut acc = 1.0_f64;
    let mut q_applied = 0u64;
    for i in 1..=k {
        acc *= (nq + i) as f64 / i as f64;
        acc *= p;
        while acc > 1.0 && q_applied < nq {
            acc *= q;
            q_applied += 1;
        }
    }
    while q_applied < nq {
        acc *= q;
        q_applied += 1;
    }
    acc
}

/// P(X = k) for X ~ Binomial(n, p): C(n,k)·p^k·(1−p)^(n−k). Exact when `p`
/// is exact.
pub fn binomial_pmf(obs: &BinomialObservation, p: &Prob) -> Prob {
    match p.value() {
        Scalar::Exact(r) => {
            Prob::new(Scalar::Exact(exact_pmf(obs.n, obs.k, r))).expect("exact pmf is in [0, 1]")
        }
        Scalar::Float(f) => Prob::from_f64(float_pmf(obs.n, obs.k, *f).clamp(0.0, 1.0))
            .expect("clamped pmf is in [0, 1]"),
    }
}

/// All n+1 pmf values under one hypothesis, sharing the power tables.
fn pmf_vector(n: u64, p: &Prob) -> Vec<Prob> {
    match p.value() {
        Scalar::Exact(r) => {
            let un = n as usize;
            let q = BigRational::one() - r;
            let mut p_pows = Vec::with_capacity(un + 1);
            p_pows.push(BigRational::one());
            for _ in 0..un {
                p_pows.push(p_pows.last().expect("nonempty") * r);
            }
            let mut q_pows = Vec::with_capacity(un + 1);
            q_pows.push(BigRational::one());
            for _ in 0..un {
                q_pows.push(q_pows.last().expect("nonempty") * &q);
            }
            let mut coeff = BigInt::one();
            (0..=un)
                .map(|k| {
                    if k > 0 {
                        coeff = &coeff * (n - k as u64 + 1) / (k as u64);
                    }
                    let value = BigRational::from(coeff.clone()) * &p_pows[k] * &q_pows[un - k];
                    Prob::new(Scalar::Exact(value)).expect("exact pmf is in [0, 1]")
                })
                .collect()
        }
        Scalar::Float(f) => (0..=n)
            .map(|k| {
                Prob::from_f64(float_pmf(n, k, *f).clamp(0.0, 1.0))
                    .expect("clamped pmf is in [0, 1]")
            })
            .collect(),
    }
}

fn validate_level(level: &Prob) -> Result<()> {
    let v = level.value();
    if v.is_zero() || v >= &Scalar::one() {
        return Err(Error::InvalidLevel {
            value: level.to_string(),
        });
    }
    Ok(())
}

/// Outcome of the exact significance test at one hypothesis value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignificanceResult {
    observation: BinomialObservation,
    p0: Prob,
    pmf_at_k: Prob,
    tail_mass: Prob,
    level: Prob,
    significant: bool,
    contributing_outcomes: BTreeSet<u64>,
}

impl SignificanceResult {
    pub fn observation(&self) -> &BinomialObservation {
        &self.observation
    }

    pub fn p0(&self) -> &Prob {
        &self.p0
    }

    /// P(X = k) under the hypothesis.
    pub fn pmf_at_k(&self) -> &Prob {
        &self.pmf_at_k
    }

    /// Total probability of the observation and every outcome at most as
    /// probable.
    pub fn tail_mass(&self) -> &Prob {
        &self.tail_mass
    }

    pub fn level(&self) -> &Prob {
        &self.level
    }

    /// Strictly below the level? (A tail mass equal to α is not significant.)
    pub fn significant(&self) -> bool {
        self.significant
    }

    /// The outcomes j with pmf(j) ≤ pmf(k); always contains k itself.
    pub fn contributing_outcomes(&self) -> &BTreeSet<u64> {
        &self.contributing_outcomes
    }
}

/// The exact significance test: sums pmf(j) over every outcome j whose
/// probability under p0 is at most pmf(k) (ties exact in rational mode,
/// within relative 1e-12 in float mode) and compares the sum strictly
/// against the level.
///
/// A degenerate hypothesis under which the observation is impossible
/// (p0 = 0 with k > 0, or p0 = 1 with k < n) yields pmf(k) = 0, an
/// all-impossible contributing set, tail mass 0, and therefore
/// significant = true rather than an error.
pub fn exact_significance(
    obs: &BinomialObservation,
    p0: &Prob,
    level: &Prob,
) -> Result<SignificanceResult> {
    validate_level(level)?;
    let pmfs = pmf_vector(obs.n, p0);
    significance_from_pmfs(obs, p0, &pmfs, level)
}

fn significance_from_pmfs(
    obs: &BinomialObservation,
    p0: &Prob,
    pmfs: &[Prob],
    level: &Prob,
) -> Result<SignificanceResult> {
    let pmf_at_k = pmfs[obs.k as usize].clone();
    let mut contributing_outcomes = BTreeSet::new();
    let mut tail = Scalar::zero();
    for (j, pj) in pmfs.iter().enumerate() {
        if pj.value().le_or_tied(pmf_at_k.value()) {
            contributing_outcomes.insert(j as u64);
            tail = &tail + pj.value();
        }
    }
    if let Scalar::Float(f) = tail {
        tail = Scalar::from_f64(f.clamp(0.0, 1.0));
    }
    let significant = &tail < level.value();
    Ok(SignificanceResult {
        observation: *obs,
        p0: p0.clone(),
        pmf_at_k,
        tail_mass: Prob::new(tail)?,
        level: level.clone(),
        significant,
        contributing_outcomes,
    })
}

/// Per-count rejection decisions for a fixed (n, p0, level): entry k says
/// whether observing k of n is significant. Shares one pmf table across all
/// n+1 tests, which matters inside simulation sweeps.
pub fn rejection_table(n: u64, p0: &Prob, level: &Prob) -> Result<Vec<bool>> {
    validate_level(level)?;
    let pmfs = pmf_vector(n, p0);
    (0..=n)
        .map(|k| {
            let obs = BinomialObservation::new(n, k)?;
            Ok(significance_from_pmfs(&obs, p0, &pmfs, level)?.significant)
        })
        .collect()
}

/// A refined classification boundary: a bracket of width ≤ 1e-6 around the
/// point where significance flips, and its midpoint estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Crossing {
    bracket: Interval,
    estimate: Scalar,
}

impl Crossing {
    pub fn bracket(&self) -> &Interval {
        &self.bracket
    }

    pub fn estimate(&self) -> &Scalar {
        &self.estimate
    }
}

/// Result of scanning hypothesis values over a grid: which p are compatible
/// with the observation (not significant) and which are not.
///
/// `undetermined` holds the *open* gaps between adjacent grid points of
/// different classification — at the grid's resolution the flip point is
/// only known to lie somewhere inside. A refined scan empties that list and
/// reports [`Crossing`]s instead.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompatibleSet {
    grid_step: Scalar,
    level: Prob,
    compatible: Vec<Interval>,
    significant: Vec<Interval>,
    undetermined: Vec<Interval>,
    crossings: Vec<Crossing>,
}

impl CompatibleSet {
    pub fn grid_step(&self) -> &Scalar {
        &self.grid_step
    }

    pub fn level(&self) -> &Prob {
        &self.level
    }

    /// Maximal closed grid intervals where the observation is compatible.
    pub fn compatible(&self) -> &[Interval] {
        &self.compatible
    }

    /// Maximal closed grid intervals where the observation is significant.
    pub fn significant(&self) -> &[Interval] {
        &self.significant
    }

    /// Open gaps between differently classified neighbors (unrefined scans).
    pub fn undetermined(&self) -> &[Interval] {
        &self.undetermined
    }

    /// Refined boundary estimates (refined scans).
    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }
}

/// Classifies every grid point p ∈ {0, step, 2·step, …, 1} as compatible or
/// significant for the observation and returns maximal intervals.
///
/// Boundary rule: at a degenerate hypothesis (grid endpoint 0 or 1) under
/// which the observed count is impossible, the raw test trivially rejects —
/// the tail is empty — even when every nearby hypothesis is compatible. The
/// scan therefore extends the classification of the adjacent interior grid
/// point to that endpoint, so reported intervals reach the parameter-space
/// boundary they adjoin. (The significance test itself, and curve output
/// built on it, keep the strict classification.)
///
/// With `refine = true` each boundary gap is bisected to a width of at most
/// 1e-6 and reported as a [`Crossing`]; otherwise the gap is listed as
/// undetermined.
/// The scan grid {0, step, 2·step, …, 1}: multiples of the step below 1,
/// then 1 itself.
pub(crate) fn grid_points(grid_step: &Scalar) -> Result<Vec<Scalar>> {
    if grid_step.is_zero() || grid_step.is_negative() || grid_step > &Scalar::one() {
        return Err(Error::InvalidGridStep {
            value: grid_step.to_string(),
        });
    }
    let one = Scalar::one();
    let mut points = Vec::new();
    let mut m: i64 = 0;
    loop {
        let point = grid_step * &Scalar::exact(m, 1);
        if point >= one {
            break;
        }
        points.push(point);
        m += 1;
    }
    points.push(one);
    Ok(points)
}

pub fn compatible_set(
    obs: &BinomialObservation,
    level: &Prob,
    grid_step: &Scalar,
    refine: bool,
) -> Result<CompatibleSet> {
    validate_level(level)?;
    let points = grid_points(grid_step)?;

    let mut classes = Vec::with_capacity(points.len());
    for point in &points {
        let p = Prob::new(point.clone())?;
        classes.push(exact_significance(obs, &p, level)?.significant);
    }

    // Boundary rule (see above): an endpoint where the observation is
    // impossible inherits its interior neighbor's raw classification.
    if points.len() >= 2 {
        let raw_first_neighbor = classes[1];
        let raw_last_neighbor = classes[classes.len() - 2];
        if obs.k > 0 {
            classes[0] = raw_first_neighbor; // pmf(k | p=0) = 0
        }
        if obs.k < obs.n {
            let last = classes.len() - 1;
            classes[last] = raw_last_neighbor; // pmf(k | p=1) = 0
        }
    }

    // Group into maximal runs of one classification.
    let mut compatible = Vec::new();
    let mut significant = Vec::new();
    let mut undetermined = Vec::new();
    let mut crossings = Vec::new();
    let mut run_start = 0usize;
    for i in 0..points.len() {
        let run_ends = i + 1 == points.len() || classes[i + 1] != classes[i];
        if !run_ends {
            continue;
        }
        let interval = Interval::new(points[run_start].clone(), points[i].clone())?;
        if classes[i] {
            significant.push(interval);
        } else {
            compatible.push(interval);
        }
        if i + 1 < points.len() {
            if refine {
                crossings.push(bisect_crossing(
                    obs,
                    level,
                    points[i].clone(),
                    points[i + 1].clone(),
                    classes[i],
                )?);
            } else {
                undetermined.push(Interval::new(points[i].clone(), points[i + 1].clone())?);
            }
            run_start = i + 1;
        }
    }

    Ok(CompatibleSet {
        grid_step: grid_step.clone(),
        level: level.clone(),
        compatible,
        significant,
        undetermined,
        crossings,
    })
}

fn bisect_crossing(
    obs: &BinomialObservation,
    level: &Prob,
    mut lo: Scalar,
    mut hi: Scalar,
    lo_class: bool,
) -> Result<Crossing> {
    let tolerance = Scalar::exact(1, 1_000_000);
    let two = Scalar::exact(2, 1);
    while (&hi - &lo) > tolerance {
        let mid = &(&lo + &hi) / &two;
        let significant = exact_significance(obs, &Prob::new(mid.clone())?, level)?.significant;
        if significant == lo_class {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let estimate = &(&lo + &hi) / &two;
    Ok(Crossing {
        bracket: Interval::new(lo, hi)?,
        estimate,
    })
}

/// Maps a compatible set over *correct*-identification probability to the
/// corresponding range of *incorrect*-identification probabilities: each
/// compatible interval [a, b] becomes [1−b, 1−a], and the hull of the union
/// is returned. `None` when nothing is compatible.
pub fn misid_bounds_from_correct(compatible: &CompatibleSet) -> Option<Interval> {
    let mut hull: Option<Interval> = None;
    for interval in &compatible.compatible {
        let flipped = interval.complement();
        hull = Some(match hull {
            None => flipped,
            Some(h) => h.hull(&flipped),
        });
    }
    hull
}

/// Point estimate for one respondent kind: the observation and its rate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateEstimate {
    observation: BinomialObservation,
    rate: Prob,
}

impl RateEstimate {
    fn from_counts(n: u64, k: u64) -> Result<RateEstimate> {
        let observation = BinomialObservation::new(n, k)?;
        let rate = observation.rate();
        Ok(RateEstimate { observation, rate })
    }

    pub fn observation(&self) -> &BinomialObservation {
        &self.observation
    }

    /// Correct-identification rate k/n.
    pub fn rate(&self) -> &Prob {
        &self.rate
    }

    /// Misidentification rate 1 − k/n.
    pub fn misid_rate(&self) -> Prob {
        self.rate.complement()
    }
}

/// Observed rates per respondent kind.
///
/// A three-player dataset reduces to a single joint observation — each trial
/// is one Bernoulli outcome in which both respondents are identified
/// correctly or neither is. A two-player dataset yields independent machine
/// and human observations; a kind with no sessions is reported as absent,
/// not as zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum RateEstimates {
    ThreePlayer {
        joint: RateEstimate,
    },
    TwoPlayer {
        machine: Option<RateEstimate>,
        human: Option<RateEstimate>,
    },
}

impl RateEstimates {
    pub fn format(&self) -> TestFormat {
        match self {
            RateEstimates::ThreePlayer { .. } => TestFormat::ThreePlayer,
            RateEstimates::TwoPlayer { .. } => TestFormat::TwoPlayer,
        }
    }

    /// The observation the significance machinery runs on: the joint
    /// observation of a three-player dataset, or the machine sessions of a
    /// two-player one.
    pub fn primary(&self) -> Result<&RateEstimate> {
        match self {
            RateEstimates::ThreePlayer { joint } => Ok(joint),
            RateEstimates::TwoPlayer { machine, .. } => {
                machine.as_ref().ok_or(Error::MissingRespondentKind {
                    kind: RespondentKind::Machine.to_string(),
                })
            }
        }
    }

    /// The human-control estimate, when the format has one and it was
    /// measured.
    pub fn human(&self) -> Option<&RateEstimate> {
        match self {
            RateEstimates::ThreePlayer { .. } => None,
            RateEstimates::TwoPlayer { human, .. } => human.as_ref(),
        }
    }
}

/// Counts correct identifications per respondent kind.
pub fn estimate_rates(dataset: &ExperimentDataset) -> Result<RateEstimates> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    match dataset.format() {
        TestFormat::ThreePlayer => {
            let n = dataset.len() as u64;
            let k = dataset
                .trials()
                .iter()
                .filter(|t| t.joint_correct() == Some(true))
                .count() as u64;
            Ok(RateEstimates::ThreePlayer {
                joint: RateEstimate::from_counts(n, k)?,
            })
        }
        TestFormat::TwoPlayer => {
            let mut counts = [(0u64, 0u64); 2]; // (n, k) for machine, human
            for trial in dataset.trials() {
                for (kind, _verdict, correct) in trial.responses() {
                    let slot = match kind {
                        RespondentKind::Machine => &mut counts[0],
                        RespondentKind::Human => &mut counts[1],
                    };
                    slot.0 += 1;
                    if correct {
                        slot.1 += 1;
                    }
                }
            }
            let build = |(n, k): (u64, u64)| -> Result<Option<RateEstimate>> {
                if n == 0 {
                    Ok(None)
                } else {
                    Ok(Some(RateEstimate::from_counts(n, k)?))
                }
            };
            Ok(RateEstimates::TwoPlayer {
                machine: build(counts[0])?,
                human: build(counts[1])?,
            })
        }
    }
}
