//! Seeded Monte Carlo generation of synthetic experiments.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`), a portable stream
//! cipher RNG whose output is stable across platforms and releases, seeded
//! with a 64-bit value. Independent purposes get independent ChaCha streams:
//! a three-player run draws from stream 0; a two-player run draws machine
//! sessions from stream 0 and human sessions from stream 1; a power sweep
//! gives every replication its own stream. Datasets are therefore
//! byte-identical across runs and machines for a given configuration.
//!
//! Each Bernoulli draw takes the top 53 bits of a `u64` and succeeds iff
//! `u < ceil(p·2^53)`, with the threshold computed exactly from the rational
//! probability — equivalent to comparing u/2^53 < p at fixed 2^-53
//! granularity, and exact for degenerate p ∈ {0, 1}.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{ExperimentDataset, TrialRecord};
use crate::error::{Error, Result};
use crate::model::{BernoulliModel, RespondentKind, TestFormat, Verdict};
use crate::num::{Prob, Scalar};
use crate::stats::rejection_table;

const GRANULARITY_BITS: u32 = 53;
const GRANULARITY: u64 = 1 << GRANULARITY_BITS;

/// Success threshold ceil(p·2^53): a 53-bit draw u succeeds iff u < threshold.
fn threshold_53(p: &Prob) -> u64 {
    match p.value() {
        Scalar::Exact(r) => {
            let scaled = r * BigRational::from(BigInt::from(GRANULARITY));
            scaled
                .ceil()
                .to_integer()
                .to_u64()
                .unwrap_or(GRANULARITY)
                .min(GRANULARITY)
        }
        Scalar::Float(f) => ((f * GRANULARITY as f64).ceil() as u64).min(GRANULARITY),
    }
}

fn draw_53(rng: &mut ChaCha8Rng) -> u64 {
    rng.next_u64() >> (64 - GRANULARITY_BITS)
}

/// What to simulate: a model, how many trials, and a seed.
///
/// For a three-player model `trials_machine` counts *joint* trials (each
/// produces one machine and one human record with complementary verdicts)
/// and `trials_human` must be 0. For a two-player model the two counts are
/// independent session counts; a human count of 0 reproduces experiments
/// that ran no controls.
#[derive(Clone, Debug)]
pub struct SimulationConfig {
    model: BernoulliModel,
    trials_machine: u64,
    trials_human: u64,
    seed: u64,
}

impl SimulationConfig {
    pub fn new(
        model: BernoulliModel,
        trials_machine: u64,
        trials_human: u64,
        seed: u64,
    ) -> Result<SimulationConfig> {
        if trials_machine == 0 {
            return Err(Error::InvalidSimulationConfig {
                message: "at least one machine/joint trial is required".to_string(),
            });
        }
        if model.format() == TestFormat::ThreePlayer && trials_human != 0 {
            return Err(Error::InvalidSimulationConfig {
                message: format!(
                    "three-player trials are joint; trials_human must be 0, got {trials_human}"
                ),
            });
        }
        Ok(SimulationConfig {
            model,
            trials_machine,
            trials_human,
            seed,
        })
    }

    pub fn model(&self) -> &BernoulliModel {
        &self.model
    }

    pub fn trials_machine(&self) -> u64 {
        self.trials_machine
    }

    pub fn trials_human(&self) -> u64 {
        self.trials_human
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Draws a synthetic dataset under the configured model. Deterministic for
/// a given configuration.
pub fn simulate(config: &SimulationConfig) -> ExperimentDataset {
    let seed = config.seed;
    match config.model {
        BernoulliModel::ThreePlayer {
            ref p_machine_misid,
        } => {
            let threshold = threshold_53(p_machine_misid);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(0);
            let trials: Vec<TrialRecord> = (0..config.trials_machine)
                .map(|i| {
                    let misidentified = draw_53(&mut rng) < threshold;
                    let machine_verdict = if misidentified {
                        Verdict::DeclaredHuman
                    } else {
                        Verdict::DeclaredMachine
                    };
                    TrialRecord::three_player(
                        format!("sim-{:05}", i + 1),
                        machine_verdict,
                        machine_verdict.opposite(),
                    )
                    .expect("complementary by construction")
                })
                .collect();
            let source = format!(
                "simulated three-player: p_misid={} trials={} seed={}",
                p_machine_misid, config.trials_machine, seed
            );
            ExperimentDataset::new(trials, source).expect("valid simulated dataset")
        }
        BernoulliModel::TwoPlayer {
            ref p_machine_misid,
            ref p_human_correct,
        } => {
            let mut trials =
                Vec::with_capacity((config.trials_machine + config.trials_human) as usize);

            let machine_threshold = threshold_53(p_machine_misid);
            let mut machine_rng = ChaCha8Rng::seed_from_u64(seed);
            machine_rng.set_stream(0);
            for i in 0..config.trials_machine {
                let misidentified = draw_53(&mut machine_rng) < machine_threshold;
                let verdict = if misidentified {
                    Verdict::DeclaredHuman
                } else {
                    Verdict::DeclaredMachine
                };
                trials.push(TrialRecord::two_player(
                    format!("sim-m-{:05}", i + 1),
                    RespondentKind::Machine,
                    verdict,
                ));
            }

            let human_threshold = threshold_53(p_human_correct);
            let mut human_rng = ChaCha8Rng::seed_from_u64(seed);
            human_rng.set_stream(1);
            for i in 0..config.trials_human {
                let correct = draw_53(&mut human_rng) < human_threshold;
                let verdict = if correct {
                    Verdict::DeclaredHuman
                } else {
                    Verdict::DeclaredMachine
                };
                trials.push(TrialRecord::two_player(
                    format!("sim-h-{:05}", i + 1),
                    RespondentKind::Human,
                    verdict,
                ));
            }

            let source = format!(
                "simulated two-player: p_misid={} p_human={} sessions={}+{} seed={}",
                p_machine_misid, p_human_correct, config.trials_machine, config.trials_human, seed
            );
            ExperimentDataset::new(trials, source).expect("valid simulated dataset")
        }
    }
}

/// One row of a power sweep: how often `replications` simulated experiments
/// of n trials under `p_true` were rejected against p0.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerRow {
    pub n: u64,
    pub rejections: u64,
    pub replications: u64,
    pub frequency: Prob,
}

/// Estimates the rejection frequency of the exact significance test for each
/// trial count: data drawn under `p_true`, tested against `p0` at `level`.
///
/// Every replication owns its own RNG stream (numbered globally across the
/// sweep), so results are deterministic for a given seed and independent of
/// evaluation order. Per trial count, the n+1 possible outcomes are
/// pre-classified once and replications only tally their success counts.
pub fn power_sweep(
    p_true: &Prob,
    p0: &Prob,
    level: &Prob,
    trial_counts: &[u64],
    replications: u64,
    seed: u64,
) -> Result<Vec<PowerRow>> {
    let interior = |p: &Prob, name: &str| -> Result<()> {
        if p.value().is_zero() || p.value() >= &Scalar::one() {
            return Err(Error::InvalidSimulationConfig {
                message: format!("{name} must lie strictly between 0 and 1, got {p}"),
            });
        }
        Ok(())
    };
    interior(p_true, "p_true")?;
    interior(p0, "p0")?;
    if replications == 0 {
        return Err(Error::InvalidSimulationConfig {
            message: "at least one replication is required".to_string(),
        });
    }
    if let Some(&bad) = trial_counts.iter().find(|&&n| n == 0) {
        return Err(Error::InvalidSimulationConfig {
            message: format!("trial counts must be positive, got {bad}"),
        });
    }

    let threshold = threshold_53(p_true);
    let mut rows = Vec::with_capacity(trial_counts.len());
    let mut stream = 0u64;
    for &n in trial_counts {
        let reject = rejection_table(n, p0, level)?;
        let mut rejections = 0u64;
        for _ in 0..replications {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            stream += 1;
            let k = (0..n).filter(|_| draw_53(&mut rng) < threshold).count();
            if reject[k] {
                rejections += 1;
            }
        }
        let frequency = Prob::new(Scalar::from_ratio(BigRational::new(
            BigInt::from(rejections),
            BigInt::from(replications),
        )))
        .expect("frequency is in [0, 1]");
        rows.push(PowerRow {
            n,
            rejections,
            replications,
            frequency,
        });
    }
    Ok(rows)
}
