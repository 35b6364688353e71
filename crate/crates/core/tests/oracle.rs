//! Brute-force oracles for the binomial layer.
//!
//! Every probability here is obtained by enumerating all 2^n verdict
//! sequences and summing per-sequence probabilities directly — no binomial
//! coefficients, no code shared with the closed-form paths under test.

use std::collections::BTreeSet;

use ttstat::stats::{binomial_pmf, compatible_set, exact_significance, BinomialObservation};
use ttstat::{Prob, Scalar};

const MAX_N: u64 = 12;

fn probe_values() -> Vec<Scalar> {
    vec![
        Scalar::exact(0, 1),
        Scalar::exact(1, 4),
        Scalar::exact(1, 3),
        Scalar::exact(1, 2),
        Scalar::exact(3, 4),
        Scalar::exact(1, 1),
    ]
}

/// Distribution of the success count over n independent trials, by
/// exhaustive enumeration. Walks every one of the 2^n sequences and adds
/// that sequence's probability (a product of its per-trial factors) into
/// the bucket of its success count; the coefficient of each bucket is the
/// number of sequences actually visited, never a closed form.
fn enumerated_pmf(n: u64, p: &Scalar) -> Vec<Scalar> {
    let q = &Scalar::one() - p;
    let mut p_pow = vec![Scalar::one()];
    let mut q_pow = vec![Scalar::one()];
    for i in 1..=n as usize {
        p_pow.push(&p_pow[i - 1] * p);
        q_pow.push(&q_pow[i - 1] * &q);
    }
    let mut buckets = vec![Scalar::zero(); n as usize + 1];
    for mask in 0u64..(1u64 << n) {
        let successes = mask.count_ones() as usize;
        let sequence_probability = &p_pow[successes] * &q_pow[n as usize - successes];
        buckets[successes] = &buckets[successes] + &sequence_probability;
    }
    buckets
}

/// Tail mass of the equally-or-less-probable region, from the enumerated
/// distribution: sum pmf(j) over every j whose mass does not exceed the
/// mass at k.
fn enumerated_tail(pmf: &[Scalar], k: u64) -> (Scalar, BTreeSet<u64>) {
    let at_k = &pmf[k as usize];
    let mut tail = Scalar::zero();
    let mut contributing = BTreeSet::new();
    for (j, mass) in pmf.iter().enumerate() {
        if mass <= at_k {
            tail = &tail + mass;
            contributing.insert(j as u64);
        }
    }
    (tail, contributing)
}

#[test]
fn exact_pmf_matches_enumeration() {
    for n in 1..=MAX_N {
        for p in probe_values() {
            let oracle = enumerated_pmf(n, &p);
            let prob = Prob::new(p.clone()).unwrap();
            for k in 0..=n {
                let obs = BinomialObservation::new(n, k).unwrap();
                let lib = binomial_pmf(&obs, &prob);
                assert_eq!(
                    lib.value(),
                    &oracle[k as usize],
                    "pmf mismatch at n={n} k={k} p={p}"
                );
            }
        }
    }
}

#[test]
fn float_pmf_matches_enumeration_within_1e_12() {
    for n in 1..=MAX_N {
        for p in probe_values() {
            let oracle = enumerated_pmf(n, &p);
            let prob = Prob::from_f64(p.to_f64()).unwrap();
            for k in 0..=n {
                let obs = BinomialObservation::new(n, k).unwrap();
                let lib = binomial_pmf(&obs, &prob);
                assert!(!lib.is_exact(), "float input must stay in float mode");
                let got = lib.value().to_f64();
                let want = oracle[k as usize].to_f64();
                assert!(
                    (got - want).abs() <= 1e-12 * want.max(1.0),
                    "float pmf off at n={n} k={k} p={p}: got {got}, want {want}"
                );
            }
        }
    }
}

#[test]
fn significance_tail_matches_enumeration() {
    let level = Prob::exact(1, 100).unwrap();
    for n in 1..=MAX_N {
        for p in probe_values() {
            let oracle = enumerated_pmf(n, &p);
            let p0 = Prob::new(p.clone()).unwrap();
            for k in 0..=n {
                let obs = BinomialObservation::new(n, k).unwrap();
                let (tail, contributing) = enumerated_tail(&oracle, k);
                let result = exact_significance(&obs, &p0, &level).unwrap();
                assert_eq!(
                    result.tail_mass().value(),
                    &tail,
                    "tail mismatch at n={n} k={k} p0={p}"
                );
                assert_eq!(
                    result.contributing_outcomes(),
                    &contributing,
                    "contributing set mismatch at n={n} k={k} p0={p}"
                );
                assert_eq!(result.significant(), &tail < level.value());
            }
        }
    }
}

#[test]
fn compatible_set_matches_enumerated_classification() {
    // Quarter grid so each grid point is independently checkable against
    // the enumeration.
    let level = Prob::exact(5, 100).unwrap();
    let step = Scalar::exact(1, 4);
    let grid: Vec<Scalar> = (0..=4).map(|i| Scalar::exact(i, 4)).collect();
    for (n, k) in [(6u64, 5u64), (8, 8), (10, 9), (12, 3), (12, 0)] {
        let obs = BinomialObservation::new(n, k).unwrap();
        let set = compatible_set(&obs, &level, &step, false).unwrap();
        let in_compatible = |p: &Scalar| {
            set.compatible()
                .iter()
                .any(|iv| iv.lo() <= p && p <= iv.hi())
        };
        let strict = |p: &Scalar| {
            let (tail, _) = enumerated_tail(&enumerated_pmf(n, p), k);
            &tail < level.value()
        };
        for p in &grid {
            let impossible_endpoint = (p.is_zero() && k > 0) || (p == &Scalar::one() && k < n);
            let expected_compatible = if impossible_endpoint {
                // Documented presentation rule: an endpoint where the
                // observation is impossible takes the class of its interior
                // neighbor.
                let neighbor = if p.is_zero() {
                    Scalar::exact(1, 4)
                } else {
                    Scalar::exact(3, 4)
                };
                !strict(&neighbor)
            } else {
                !strict(p)
            };
            assert_eq!(
                in_compatible(p),
                expected_compatible,
                "classification mismatch at n={n} k={k} p={p}"
            );
        }
    }
}
