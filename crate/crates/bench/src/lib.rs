//! Shared fixtures for the benchmark suite.

use ttstat::sim::SimulationConfig;
use ttstat::stats::BinomialObservation;
use ttstat::{make_three_player_model, Prob};

/// The 9-of-10 observation used throughout the docs and tests.
pub fn replication_observation() -> BinomialObservation {
    BinomialObservation::new(10, 9).expect("valid observation")
}

/// A mid-sized observation that keeps the exact arithmetic honest.
pub fn large_observation() -> BinomialObservation {
    BinomialObservation::new(100, 60).expect("valid observation")
}

/// A 10k-trial three-player simulation at p = 1/3, seed 7.
pub fn simulation_config() -> SimulationConfig {
    SimulationConfig::new(
        make_three_player_model(Prob::exact(1, 3).expect("valid probability")),
        10_000,
        0,
        7,
    )
    .expect("valid configuration")
}
