//! Pass criteria: the absolute criterion and the relative
//! "degree of humanness" score.
//!
//! The absolute criterion asks whether the machine's misidentification
//! probability equals the human's correct-identification probability; in a
//! three-player test this pins both to 50%. The relative criterion scores
//! the machine against an optimal-performance reference instead: the ratio
//! of its misidentification probability to that reference, which is 0.5 in
//! the three-player format and the measured human correct-identification
//! rate in the two-player format. The ratio may exceed 1 and is reported
//! as-is, never clamped.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{BernoulliModel, TestFormat};
use crate::num::{Interval, Prob, Scalar};

/// A commonly proposed humanness threshold: misidentified in 3 of 10 trials
/// against the 50% reference, i.e. a ratio of 6/10. Exposed as a default;
/// where to draw the line is ultimately a judgment call.
pub fn turing_threshold() -> Scalar {
    Scalar::exact(3, 5)
}

/// The relative-criterion score: machine misidentification probability over
/// the format's optimal-performance reference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HumannessScore {
    ratio: Scalar,
    numerator: Prob,
    denominator: Prob,
    format: TestFormat,
}

impl HumannessScore {
    /// The dimensionless score. May exceed 1.
    pub fn ratio(&self) -> &Scalar {
        &self.ratio
    }

    /// Machine misidentification probability.
    pub fn numerator(&self) -> &Prob {
        &self.numerator
    }

    /// Optimal-performance reference: 0.5 for three-player, the human
    /// correct-identification probability for two-player.
    pub fn denominator(&self) -> &Prob {
        &self.denominator
    }

    pub fn format(&self) -> TestFormat {
        self.format
    }
}

impl std::fmt::Display for HumannessScore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} / {} = {}",
            self.numerator, self.denominator, self.ratio
        )
    }
}

/// Absolute criterion: does the machine's misidentification probability
/// equal the human's correct-identification probability, within
/// `tolerance`? For a three-player model this reduces to p = 0.5.
pub fn absolute_pass(model: &BernoulliModel, tolerance: &Scalar) -> Result<bool> {
    model.is_equal_recognition_point(tolerance)
}

/// Relative criterion: the degree-of-humanness score for a model.
///
/// Fails with a degenerate-baseline error for a two-player model whose
/// human correct-identification probability is zero — there is no reference
/// performance to compare against.
pub fn humanness(model: &BernoulliModel) -> Result<HumannessScore> {
    let numerator = model.p_machine_misid();
    let denominator = match model.format() {
        TestFormat::ThreePlayer => Prob::half(),
        TestFormat::TwoPlayer => model.p_human_correct(),
    };
    if denominator.value().is_zero() {
        return Err(Error::DegenerateHumanBaseline);
    }
    let ratio = numerator.value() / denominator.value();
    Ok(HumannessScore {
        ratio,
        numerator,
        denominator,
        format: model.format(),
    })
}

/// Humanness bounds from a range of misidentification probabilities
/// compatible with the data: `[misid_low/denominator, misid_high/denominator]`.
pub fn humanness_bounds(
    misid_low: &Prob,
    misid_high: &Prob,
    denominator: &Prob,
) -> Result<Interval> {
    if misid_high.value() < misid_low.value() {
        return Err(Error::InvertedBounds {
            lo: misid_low.to_string(),
            hi: misid_high.to_string(),
        });
    }
    if denominator.value().is_zero() {
        return Err(Error::ZeroDenominator {
            value: denominator.to_string(),
        });
    }
    Interval::new(
        misid_low.value() / denominator.value(),
        misid_high.value() / denominator.value(),
    )
}

/// Result of [`required_human_rate`]: either the human correct-identification
/// rate the controls would have to exceed for the machine's humanness to
/// fall below the threshold, or `Overflow` when that quotient exceeds 1 and
/// no human baseline can push the machine under the threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RequiredRate {
    Rate(Prob),
    Overflow(Scalar),
}

impl RequiredRate {
    pub fn as_scalar(&self) -> &Scalar {
        match self {
            RequiredRate::Rate(p) => p.value(),
            RequiredRate::Overflow(s) => s,
        }
    }

    pub fn is_overflow(&self) -> bool {
        matches!(self, RequiredRate::Overflow(_))
    }
}

/// Inverts the humanness ratio: given a machine misidentification rate and
/// a humanness threshold, returns the human correct-identification rate
/// above which the machine's score falls below the threshold. Useful when
/// an experiment reported the machine sessions but not the human controls.
pub fn required_human_rate(
    machine_misid_rate: &Prob,
    humanness_threshold: &Scalar,
) -> Result<RequiredRate> {
    if humanness_threshold.is_zero() || humanness_threshold.is_negative() {
        return Err(Error::NonpositiveThreshold {
            value: humanness_threshold.to_string(),
        });
    }
    let quotient = machine_misid_rate.value() / humanness_threshold;
    Ok(match Prob::new(quotient.clone()) {
        Ok(rate) => RequiredRate::Rate(rate),
        Err(_) => RequiredRate::Overflow(quotient),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_three_player_model, make_two_player_model};

    fn p(num: i64, den: i64) -> Prob {
        Prob::exact(num, den).unwrap()
    }

    #[test]
    fn absolute_pass_three_player_is_the_fifty_percent_criterion() {
        let zero = Scalar::zero();
        assert!(absolute_pass(&make_three_player_model(p(1, 2)), &zero).unwrap());
        assert!(!absolute_pass(&make_three_player_model(p(3, 10)), &zero).unwrap());
    }

    #[test]
    fn absolute_pass_two_player() {
        let zero = Scalar::zero();
        // Misidentified half the time while humans are spotted 75% of the
        // time: not optimal.
        let m = make_two_player_model(p(1, 2), p(3, 4));
        assert!(!absolute_pass(&m, &zero).unwrap());
        // Optimal performance means matching the human baseline exactly.
        let opt = make_two_player_model(p(3, 4), p(3, 4));
        assert!(absolute_pass(&opt, &zero).unwrap());
    }

    #[test]
    fn humanness_examples() {
        // Three-player at 30% misidentification: 30/50 = 6/10.
        let score = humanness(&make_three_player_model(p(3, 10))).unwrap();
        assert_eq!(score.ratio(), &Scalar::exact(3, 5));
        assert_eq!(score.denominator(), &Prob::half());

        // Two-player, 50% misidentification against a 75% baseline: 50/75.
        let score = humanness(&make_two_player_model(p(1, 2), p(3, 4))).unwrap();
        assert_eq!(score.ratio(), &Scalar::exact(2, 3));

        // Total failure.
        let score = humanness(&make_three_player_model(p(0, 1))).unwrap();
        assert!(score.ratio().is_zero());
    }

    #[test]
    fn humanness_reduction_property() {
        // Three-player ratio is exactly twice the misidentification
        // probability.
        for num in 0..=10 {
            let prob = p(num, 10);
            let score = humanness(&make_three_player_model(prob.clone())).unwrap();
            assert_eq!(score.ratio(), &(&Scalar::exact(2, 1) * prob.value()));
        }
    }

    #[test]
    fn humanness_degenerate_baseline() {
        let err = humanness(&make_two_player_model(p(1, 2), p(0, 1))).unwrap_err();
        assert!(matches!(err, Error::DegenerateHumanBaseline));
        // The three-player reference is a constant 0.5, so no degenerate
        // case exists there.
        assert!(humanness(&make_three_player_model(p(0, 1))).is_ok());
    }

    #[test]
    fn humanness_consistency_with_absolute_pass() {
        for m in [
            make_three_player_model(p(1, 2)),
            make_three_player_model(p(2, 5)),
            make_two_player_model(p(3, 4), p(3, 4)),
            make_two_player_model(p(1, 2), p(3, 4)),
        ] {
            let passes = absolute_pass(&m, &Scalar::zero()).unwrap();
            let ratio_is_one = humanness(&m).unwrap().ratio() == &Scalar::one();
            assert_eq!(passes, ratio_is_one);
        }
    }

    #[test]
    fn bounds_examples() {
        let b = humanness_bounds(&p(0, 1), &p(44, 100), &Prob::half()).unwrap();
        assert_eq!(b.lo(), &Scalar::zero());
        assert_eq!(b.hi(), &Scalar::exact(22, 25)); // 0.88

        let b = humanness_bounds(&p(0, 1), &p(51, 100), &Prob::half()).unwrap();
        assert_eq!(b.hi(), &Scalar::exact(51, 50)); // 1.02 — above 1, unclamped

        let b = humanness_bounds(&Prob::half(), &Prob::half(), &Prob::half()).unwrap();
        assert_eq!(b, Interval::point(Scalar::one()));
    }

    #[test]
    fn bounds_errors() {
        assert!(matches!(
            humanness_bounds(&p(1, 2), &p(1, 4), &Prob::half()),
            Err(Error::InvertedBounds { .. })
        ));
        assert!(matches!(
            humanness_bounds(&p(0, 1), &p(1, 2), &p(0, 1)),
            Err(Error::ZeroDenominator { .. })
        ));
    }

    #[test]
    fn required_rate_examples() {
        // Misidentified 10 times out of 30 against a 6/10 threshold: the
        // humans would need a correct-identification rate above 5/9 ≈ 55.6%.
        let r = required_human_rate(&p(10, 30), &turing_threshold()).unwrap();
        assert_eq!(r, RequiredRate::Rate(p(5, 9)));

        // Three-player case: 0.3 / 0.6 = the 50% reference itself.
        let r = required_human_rate(&p(3, 10), &turing_threshold()).unwrap();
        assert_eq!(r, RequiredRate::Rate(p(1, 2)));

        // A machine misidentified 80% of the time clears a 6/10 threshold
        // against every possible baseline.
        let r = required_human_rate(&p(4, 5), &turing_threshold()).unwrap();
        assert_eq!(r, RequiredRate::Overflow(Scalar::exact(4, 3)));
    }

    #[test]
    fn required_rate_inverts_exactly() {
        for (num, den) in [(10i64, 30i64), (1, 2), (0, 1), (3, 10)] {
            let rate = p(num, den);
            let t = turing_threshold();
            let r = required_human_rate(&rate, &t).unwrap();
            assert_eq!(r.as_scalar() * &t, rate.value().clone());
        }
    }

    #[test]
    fn required_rate_rejects_nonpositive_threshold() {
        assert!(matches!(
            required_human_rate(&p(1, 2), &Scalar::zero()),
            Err(Error::NonpositiveThreshold { .. })
        ));
        assert!(matches!(
            required_human_rate(&p(1, 2), &Scalar::exact(-3, 5)),
            Err(Error::NonpositiveThreshold { .. })
        ));
    }
}
