//! `ttstat` — exact Bernoulli-experiment statistics for Turing-test trial
//! data.
//!
//! Each subcommand invokes one library computation so results can be
//! replicated piecemeal: `analyze` runs the full verdict pipeline on a trial
//! file, while `pmf`, `significance`, `interval`, `humanness`, `simulate`,
//! `curve`, and `classify` expose the individual stages. Probabilities and
//! levels are parsed exactly (`0.05` means 1/20, `1/3` means 1/3), so
//! command-line runs reproduce library results digit for digit.
//!
//! Exit codes: 0 = analysis completed; 2 = input validation failure;
//! 3 = statistical precondition failure.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::{fs, io};

use clap::{Parser, Subcommand, ValueEnum};

use ttstat::criteria::humanness;
use ttstat::dataset::{classify_format, parse_trials_str};
use ttstat::report::{emit_curve, emit_report, verdict, AnalysisConfig, ReportMode};
use ttstat::sim::{simulate, SimulationConfig};
use ttstat::stats::{binomial_pmf, compatible_set, exact_significance, BinomialObservation};
use ttstat::{
    make_three_player_model, make_two_player_model, parse_exact, ErrorClass, Prob, Result, Scalar,
    TestFormat,
};

#[derive(Parser)]
#[command(
    name = "ttstat",
    version,
    about = "Exact Bernoulli-experiment statistics for Turing-test trial data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    ThreePlayer,
    TwoPlayer,
}

impl From<FormatArg> for TestFormat {
    fn from(arg: FormatArg) -> TestFormat {
        match arg {
            FormatArg::ThreePlayer => TestFormat::ThreePlayer,
            FormatArg::TwoPlayer => TestFormat::TwoPlayer,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full verdict pipeline on a trial file (JSONL or CSV).
    Analyze {
        /// Trial file; `-` reads standard input.
        path: PathBuf,
        /// Null-hypothesis success probability.
        #[arg(long, default_value = "1/2")]
        p0: String,
        /// Significance level.
        #[arg(long, default_value = "0.01")]
        level: String,
        /// Hypothesis grid step.
        #[arg(long, default_value = "0.01")]
        grid_step: String,
        /// Bisect significance boundaries instead of reporting gaps.
        #[arg(long)]
        refine: bool,
        /// Humanness threshold for the required-rate inversion.
        #[arg(long, default_value = "3/5")]
        threshold: String,
        /// Reject the file unless it holds this test format.
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Emit the JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Binomial point probability P[K = k | n, p].
    Pmf {
        n: u64,
        k: u64,
        p: String,
        #[arg(long)]
        json: bool,
    },
    /// Exact test of H0: p = p0 against the observation k of n.
    Significance {
        n: u64,
        k: u64,
        #[arg(long, default_value = "1/2")]
        p0: String,
        #[arg(long, default_value = "0.01")]
        level: String,
        #[arg(long)]
        json: bool,
    },
    /// Grid scan for the hypothesis values compatible with k of n.
    Interval {
        n: u64,
        k: u64,
        #[arg(long, default_value = "0.01")]
        level: String,
        #[arg(long, default_value = "0.01")]
        grid_step: String,
        /// Bisect significance boundaries instead of reporting gaps.
        #[arg(long)]
        refine: bool,
        #[arg(long)]
        json: bool,
    },
    /// Degree of humanness for a machine misidentification probability.
    Humanness {
        /// Probability that the machine is taken for the human.
        p_misid: String,
        /// Human-control correct rate (two-player); omitted = three-player.
        #[arg(long)]
        human_correct: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Generate a seeded synthetic trial dataset on standard output.
    Simulate {
        #[arg(long, value_enum, default_value_t = FormatArg::ThreePlayer)]
        format: FormatArg,
        /// Machine misidentification probability.
        #[arg(long)]
        p_misid: String,
        /// Human-control correct probability (two-player only).
        #[arg(long, required_if_eq("format", "two-player"))]
        p_human_correct: Option<String>,
        /// Number of trials (three-player) or machine sessions (two-player).
        #[arg(long)]
        trials: u64,
        /// Number of human-control sessions (two-player only).
        #[arg(long, default_value_t = 0)]
        human_trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit CSV instead of JSONL.
        #[arg(long)]
        csv: bool,
    },
    /// Significance curve over the hypothesis grid, as CSV.
    Curve {
        n: u64,
        k: u64,
        #[arg(long, default_value = "0.01")]
        level: String,
        #[arg(long, default_value = "0.01")]
        grid_step: String,
    },
    /// Decide the test format from the experiment-design flags.
    Classify {
        /// Did each interrogator talk to a machine and a human in parallel?
        #[arg(long, action = clap::ArgAction::Set)]
        paired_conversations: bool,
        /// Was exactly one respondent per conversation declared human?
        #[arg(long, action = clap::ArgAction::Set)]
        forced_complementary_verdicts: bool,
        #[arg(long)]
        json: bool,
    },
}

fn prob(s: &str) -> Result<Prob> {
    Prob::new(parse_exact(s)?)
}

/// Fraction and decimal forms when they differ, e.g. `5/512 = 0.009765625`.
fn render(s: &Scalar) -> String {
    match (s.fraction_string(), s.decimal_string()) {
        (Some(frac), Some(dec)) if frac != dec => format!("{frac} = {dec}"),
        _ => s.to_string(),
    }
}

fn mode(json: bool) -> ReportMode {
    if json {
        ReportMode::Json
    } else {
        ReportMode::Text
    }
}

fn read_input(path: &PathBuf) -> Result<(String, String)> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok((text, "stdin".to_string()))
    } else {
        let text = fs::read_to_string(path)?;
        Ok((text, path.display().to_string()))
    }
}

fn run(command: Command) -> Result<String> {
    match command {
        Command::Analyze {
            path,
            p0,
            level,
            grid_step,
            refine,
            threshold,
            format,
            json,
        } => {
            let (text, source) = read_input(&path)?;
            let mut dataset = parse_trials_str(&text, format.map(Into::into))?;
            dataset.set_source(source);
            let config = AnalysisConfig {
                p0: prob(&p0)?,
                level: prob(&level)?,
                grid_step: parse_exact(&grid_step)?,
                refine,
                humanness_threshold: parse_exact(&threshold)?,
            };
            let v = verdict(&dataset, &config)?;
            Ok(emit_report(&v, mode(json)))
        }
        Command::Pmf { n, k, p, json } => {
            let obs = BinomialObservation::new(n, k)?;
            let p = prob(&p)?;
            let mass = binomial_pmf(&obs, &p);
            if json {
                Ok(format!(
                    "{}\n",
                    serde_json::json!({ "n": n, "k": k, "p": p, "pmf": mass })
                ))
            } else {
                Ok(format!(
                    "P[K = {k} | n = {n}, p = {}] = {}\n",
                    p.value(),
                    render(mass.value())
                ))
            }
        }
        Command::Significance {
            n,
            k,
            p0,
            level,
            json,
        } => {
            let obs = BinomialObservation::new(n, k)?;
            let result = exact_significance(&obs, &prob(&p0)?, &prob(&level)?)?;
            if json {
                Ok(format!(
                    "{}\n",
                    serde_json::to_string(&result).expect("significance serialization")
                ))
            } else {
                let outcomes: Vec<String> = result
                    .contributing_outcomes()
                    .iter()
                    .map(|j| j.to_string())
                    .collect();
                Ok(format!(
                    "observation: {}\np0: {}, level: {}\npmf at k: {}\n\
                     equally-or-less-probable outcomes: {{{}}}\ntail mass: {}\nsignificant: {}\n",
                    result.observation(),
                    result.p0().value(),
                    result.level().value(),
                    render(result.pmf_at_k().value()),
                    outcomes.join(", "),
                    render(result.tail_mass().value()),
                    result.significant(),
                ))
            }
        }
        Command::Interval {
            n,
            k,
            level,
            grid_step,
            refine,
            json,
        } => {
            let obs = BinomialObservation::new(n, k)?;
            let set = compatible_set(&obs, &prob(&level)?, &parse_exact(&grid_step)?, refine)?;
            if json {
                return Ok(format!(
                    "{}\n",
                    serde_json::to_string(&set).expect("interval serialization")
                ));
            }
            let list = |intervals: &[ttstat::Interval]| -> String {
                if intervals.is_empty() {
                    "none".to_string()
                } else {
                    intervals
                        .iter()
                        .map(|iv| iv.to_string())
                        .collect::<Vec<_>>()
                        .join(" ∪ ")
                }
            };
            let mut out = format!(
                "observation: {}\nlevel: {}, grid step: {}\ncompatible: {}\nsignificant: {}\n",
                obs,
                set.level().value(),
                set.grid_step(),
                list(set.compatible()),
                list(set.significant()),
            );
            for gap in set.undetermined() {
                out.push_str(&format!("undetermined: ({}, {})\n", gap.lo(), gap.hi()));
            }
            for crossing in set.crossings() {
                out.push_str(&format!(
                    "boundary: near {} within {}\n",
                    crossing.estimate(),
                    crossing.bracket()
                ));
            }
            Ok(out)
        }
        Command::Humanness {
            p_misid,
            human_correct,
            json,
        } => {
            let misid = prob(&p_misid)?;
            let model = match human_correct {
                Some(rate) => make_two_player_model(misid, prob(&rate)?),
                None => make_three_player_model(misid),
            };
            let score = humanness(&model)?;
            if json {
                Ok(format!(
                    "{}\n",
                    serde_json::to_string(&score).expect("humanness serialization")
                ))
            } else {
                Ok(format!(
                    "format: {}\ndegree of humanness: {score}\n",
                    score.format()
                ))
            }
        }
        Command::Simulate {
            format,
            p_misid,
            p_human_correct,
            trials,
            human_trials,
            seed,
            csv,
        } => {
            let model = match format {
                FormatArg::ThreePlayer => make_three_player_model(prob(&p_misid)?),
                FormatArg::TwoPlayer => {
                    let human =
                        p_human_correct.ok_or_else(|| ttstat::Error::InvalidSimulationConfig {
                            message: "--p-human-correct is required for two-player simulation"
                                .to_string(),
                        })?;
                    make_two_player_model(prob(&p_misid)?, prob(&human)?)
                }
            };
            let config = SimulationConfig::new(model, trials, human_trials, seed)?;
            let dataset = simulate(&config);
            Ok(if csv {
                dataset.to_csv()
            } else {
                dataset.to_jsonl()
            })
        }
        Command::Curve {
            n,
            k,
            level,
            grid_step,
        } => {
            let obs = BinomialObservation::new(n, k)?;
            emit_curve(&obs, &prob(&level)?, &parse_exact(&grid_step)?)
        }
        Command::Classify {
            paired_conversations,
            forced_complementary_verdicts,
            json,
        } => {
            let format = classify_format(paired_conversations, forced_complementary_verdicts);
            if json {
                Ok(format!("{}\n", serde_json::json!({ "format": format })))
            } else {
                Ok(format!("{format}\n"))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err.class() {
                ErrorClass::InvalidInput => 2,
                ErrorClass::StatisticalPrecondition => 3,
            })
        }
    }
}
