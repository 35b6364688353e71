//! Bernoulli-experiment models of the two test formats.
//!
//! A three-player test puts one interrogator in front of a machine and a
//! human at once; the interrogator's two identifications are logically
//! complementary, so the whole test is one Bernoulli experiment and a single
//! probability (the machine misidentification probability) determines all
//! four event probabilities. A two-player test interrogates one respondent
//! per session; the machine and human experiments are uncorrelated and carry
//! independent probabilities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{Prob, Scalar};

/// The interrogator's identification of one respondent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    DeclaredHuman,
    DeclaredMachine,
}

impl Verdict {
    pub fn opposite(self) -> Verdict {
        match self {
            Verdict::DeclaredHuman => Verdict::DeclaredMachine,
            Verdict::DeclaredMachine => Verdict::DeclaredHuman,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::DeclaredHuman => write!(f, "declared_human"),
            Verdict::DeclaredMachine => write!(f, "declared_machine"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RespondentKind {
    Machine,
    Human,
}

impl RespondentKind {
    /// Whether a verdict correctly identifies this kind of respondent.
    pub fn is_correct(self, verdict: Verdict) -> bool {
        match self {
            RespondentKind::Machine => verdict == Verdict::DeclaredMachine,
            RespondentKind::Human => verdict == Verdict::DeclaredHuman,
        }
    }
}

impl std::fmt::Display for RespondentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RespondentKind::Machine => write!(f, "machine"),
            RespondentKind::Human => write!(f, "human"),
        }
    }
}

/// One of the four elementary events: a (respondent kind, correctness) pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OutcomeEvent {
    pub kind: RespondentKind,
    pub correct: bool,
}

impl OutcomeEvent {
    pub fn new(kind: RespondentKind, correct: bool) -> Self {
        OutcomeEvent { kind, correct }
    }
}

/// The two outcomes of a three-player test viewed as a single experiment:
/// either both respondents are misidentified or both are correctly
/// identified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum JointOutcome {
    BothMisidentified,
    BothCorrect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFormat {
    ThreePlayer,
    TwoPlayer,
}

impl std::fmt::Display for TestFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TestFormat::ThreePlayer => write!(f, "three-player"),
            TestFormat::TwoPlayer => write!(f, "two-player"),
        }
    }
}

/// The probability assignment for one test format.
///
/// Three-player models are keyed on the machine misidentification
/// probability alone; the human correct-identification probability is always
/// its complement, so the correlation constraint cannot be violated by
/// construction. Two-player models carry both probabilities independently.
#[derive(Clone, Debug, PartialEq)]
pub enum BernoulliModel {
    ThreePlayer {
        p_machine_misid: Prob,
    },
    TwoPlayer {
        p_machine_misid: Prob,
        p_human_correct: Prob,
    },
}

/// Three-player model from the machine misidentification probability.
pub fn make_three_player_model(p_machine_misid: Prob) -> BernoulliModel {
    BernoulliModel::ThreePlayer { p_machine_misid }
}

/// Two-player model; the two probabilities are unconstrained.
pub fn make_two_player_model(p_machine_misid: Prob, p_human_correct: Prob) -> BernoulliModel {
    BernoulliModel::TwoPlayer {
        p_machine_misid,
        p_human_correct,
    }
}

impl BernoulliModel {
    pub fn format(&self) -> TestFormat {
        match self {
            BernoulliModel::ThreePlayer { .. } => TestFormat::ThreePlayer,
            BernoulliModel::TwoPlayer { .. } => TestFormat::TwoPlayer,
        }
    }

    /// P(machine declared human).
    pub fn p_machine_misid(&self) -> Prob {
        match self {
            BernoulliModel::ThreePlayer { p_machine_misid }
            | BernoulliModel::TwoPlayer {
                p_machine_misid, ..
            } => p_machine_misid.clone(),
        }
    }

    /// P(human declared human). Derived as the complement in a three-player
    /// model, stored independently in a two-player one.
    pub fn p_human_correct(&self) -> Prob {
        match self {
            BernoulliModel::ThreePlayer { p_machine_misid } => p_machine_misid.complement(),
            BernoulliModel::TwoPlayer {
                p_human_correct, ..
            } => p_human_correct.clone(),
        }
    }

    /// Probability of one elementary event.
    pub fn event_probability(&self, event: OutcomeEvent) -> Prob {
        match (event.kind, event.correct) {
            (RespondentKind::Machine, false) => self.p_machine_misid(),
            (RespondentKind::Machine, true) => self.p_machine_misid().complement(),
            (RespondentKind::Human, true) => self.p_human_correct(),
            (RespondentKind::Human, false) => self.p_human_correct().complement(),
        }
    }

    /// Probability of a joint outcome under the single-experiment view of
    /// the three-player test. Undefined for two-player models, whose two
    /// experiments have no joint sample space.
    pub fn joint_probability(&self, outcome: JointOutcome) -> Result<Prob> {
        match self {
            BernoulliModel::ThreePlayer { p_machine_misid } => Ok(match outcome {
                JointOutcome::BothMisidentified => p_machine_misid.clone(),
                JointOutcome::BothCorrect => p_machine_misid.complement(),
            }),
            BernoulliModel::TwoPlayer { .. } => Err(Error::JointOutcomeUndefined),
        }
    }

    /// Whether the machine misidentification probability equals the human
    /// correct-identification probability, within `tolerance`. For a
    /// three-player model this holds only at 50%.
    pub fn is_equal_recognition_point(&self, tolerance: &Scalar) -> Result<bool> {
        if tolerance.is_negative() {
            return Err(Error::NegativeTolerance {
                value: tolerance.to_string(),
            });
        }
        Ok(self
            .p_machine_misid()
            .value()
            .within(self.p_human_correct().value(), tolerance))
    }

    /// Default equality tolerance: zero when the model is exact, `1e-12`
    /// when any stored probability is float-mode.
    pub fn default_tolerance(&self) -> Scalar {
        let exact = match self {
            BernoulliModel::ThreePlayer { p_machine_misid } => p_machine_misid.is_exact(),
            BernoulliModel::TwoPlayer {
                p_machine_misid,
                p_human_correct,
            } => p_machine_misid.is_exact() && p_human_correct.is_exact(),
        };
        crate::num::default_tolerance(exact)
    }
}
