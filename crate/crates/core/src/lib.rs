//! Bernoulli-experiment modeling and exact binomial evaluation of
//! Turing-test trial data.
//!
//! The library treats an imitation-game experiment as one or two Bernoulli
//! experiments, depending on format:
//!
//! * **Three-player** — interrogator, machine, and human foil. The
//!   interrogator's two identifications are complementary, so a single
//!   probability parameter drives everything ([`model::BernoulliModel`]).
//! * **Two-player** — interrogator and one hidden respondent per session.
//!   Machine sessions and human-control sessions are independent
//!   experiments.
//!
//! On top of the models sit the pass criteria ([`criteria`]): the absolute
//! criterion compares a misidentification rate against a threshold, and the
//! relative criterion scores a machine's *degree of humanness* against the
//! human controls. Observed trial counts are evaluated with an exact
//! binomial significance test and compatible-parameter-interval analysis
//! ([`stats`]), datasets are read and written in JSONL and CSV ([`dataset`]),
//! seeded Monte Carlo simulation drives power studies ([`sim`]), and the
//! whole pipeline is packaged into a reportable verdict ([`report`]).
//!
//! All probability arithmetic runs in a dual-mode scalar type ([`num`]):
//! exact rational when inputs are rational, shortest-round-trip `f64`
//! otherwise. Exactness is contagious in the sane direction — exact inputs
//! never silently degrade to float.

pub mod criteria;
pub mod dataset;
pub mod error;
pub mod model;
pub mod num;
pub mod report;
pub mod sim;
pub mod stats;

pub use error::{Error, ErrorClass, Result};
pub use model::{
    make_three_player_model, make_two_player_model, BernoulliModel, JointOutcome, OutcomeEvent,
    RespondentKind, TestFormat, Verdict,
};
pub use num::{parse_exact, Interval, Prob, Scalar, FLOAT_TIE_TOLERANCE};
