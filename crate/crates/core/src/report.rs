//! The end-to-end verdict pipeline and report rendering.
//!
//! [`verdict`] runs estimate-rates → significance → compatible-set →
//! misidentification bounds → humanness on a dataset and packages the
//! results; every number in a [`TestVerdict`] is reproducible from the
//! dataset and the configuration alone. [`emit_report`] renders a verdict as
//! plain text (full-precision values, with two-decimal companions where they
//! differ) or as JSON under the stable `tt-verdict/1` schema, where exact
//! rationals appear as `{num, den}` objects and floats as decimal strings.
//! [`emit_curve`] writes the per-grid-point significance curve as CSV for
//! external plotting.

use serde::Serialize;

use crate::criteria::{
    humanness, humanness_bounds, required_human_rate, turing_threshold, HumannessScore,
    RequiredRate,
};
use crate::dataset::ExperimentDataset;
use crate::error::Result;
use crate::model::{make_three_player_model, make_two_player_model, TestFormat};
use crate::num::{Interval, Prob, Scalar};
use crate::stats::{
    compatible_set, estimate_rates, exact_significance, grid_points, misid_bounds_from_correct,
    BinomialObservation, CompatibleSet, RateEstimates, SignificanceResult,
};

/// Schema tag of the JSON report.
pub const VERDICT_SCHEMA: &str = "tt-verdict/1";

/// Header of the curve CSV.
pub const CSV_CURVE_HEADER: &str = "p,tail_mass,significant";

/// Tunable knobs of the analysis pipeline. The defaults follow the usual
/// replication setup: p0 = 1/2, level 1%, two-decimal grid, no refinement,
/// humanness threshold 6/10.
#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    pub p0: Prob,
    pub level: Prob,
    pub grid_step: Scalar,
    pub refine: bool,
    pub humanness_threshold: Scalar,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            p0: Prob::half(),
            level: Prob::exact(1, 100).expect("1/100 is a probability"),
            grid_step: Scalar::exact(1, 100),
            refine: false,
            humanness_threshold: turing_threshold(),
        }
    }
}

impl AnalysisConfig {
    pub fn with_level(mut self, level: Prob) -> Self {
        self.level = level;
        self
    }
}

/// Structured summary lines of a verdict, rendered once at build time so
/// text and JSON reports agree verbatim.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Narrative {
    pub observation: String,
    pub significance: String,
    pub compatibility: String,
    pub humanness: String,
    pub notes: Vec<String>,
}

/// Everything the pipeline concluded about one dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct TestVerdict {
    format: TestFormat,
    source: String,
    rates: RateEstimates,
    significance: SignificanceResult,
    compatible: CompatibleSet,
    misid_bounds: Option<Interval>,
    humanness_point: Option<HumannessScore>,
    humanness_bounds: Option<Interval>,
    required_human_rate: Option<RequiredRate>,
    humanness_threshold: Scalar,
    narrative: Narrative,
}

impl TestVerdict {
    pub fn format(&self) -> TestFormat {
        self.format
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn rates(&self) -> &RateEstimates {
        &self.rates
    }

    pub fn significance(&self) -> &SignificanceResult {
        &self.significance
    }

    pub fn compatible(&self) -> &CompatibleSet {
        &self.compatible
    }

    /// Misidentification probabilities compatible with the data.
    pub fn misid_bounds(&self) -> Option<&Interval> {
        self.misid_bounds.as_ref()
    }

    /// Point humanness score; absent when the reference rate is unmeasured.
    pub fn humanness_point(&self) -> Option<&HumannessScore> {
        self.humanness_point.as_ref()
    }

    /// Humanness range induced by the misidentification bounds.
    pub fn humanness_bounds(&self) -> Option<&Interval> {
        self.humanness_bounds.as_ref()
    }

    /// For a two-player dataset without human controls: the human rate the
    /// controls would have needed to exceed for the machine to miss the
    /// humanness threshold.
    pub fn required_human_rate(&self) -> Option<&RequiredRate> {
        self.required_human_rate.as_ref()
    }

    pub fn humanness_threshold(&self) -> &Scalar {
        &self.humanness_threshold
    }

    pub fn narrative(&self) -> &Narrative {
        &self.narrative
    }
}

/// Full-precision rendering with a two-decimal companion when they differ.
fn show(s: &Scalar) -> String {
    let full = s.to_string();
    let two = s.two_decimals();
    if full == two {
        full
    } else {
        format!("{full} ({two})")
    }
}

fn show_interval(iv: &Interval) -> String {
    let full = iv.to_string();
    let two = format!("[{}, {}]", iv.lo().two_decimals(), iv.hi().two_decimals());
    if full == two {
        full
    } else {
        format!("{full} (two-decimal {two})")
    }
}

fn percent(s: &Scalar) -> String {
    format!("{:.2}%", s.to_f64() * 100.0)
}

/// Runs the whole pipeline on a dataset. Component failures are tagged with
/// the stage they occurred in.
pub fn verdict(dataset: &ExperimentDataset, config: &AnalysisConfig) -> Result<TestVerdict> {
    let rates = estimate_rates(dataset).map_err(|e| e.at_stage("estimate_rates"))?;
    let primary = rates
        .primary()
        .map_err(|e| e.at_stage("estimate_rates"))?
        .clone();
    let observation = *primary.observation();

    let significance = exact_significance(&observation, &config.p0, &config.level)
        .map_err(|e| e.at_stage("significance"))?;
    let compatible = compatible_set(
        &observation,
        &config.level,
        &config.grid_step,
        config.refine,
    )
    .map_err(|e| e.at_stage("compatible_set"))?;
    let misid_bounds = misid_bounds_from_correct(&compatible);

    // Relative criterion. The reference rate is 0.5 for three-player tests
    // and the measured human-control rate for two-player tests; with no
    // controls the score is absent and the required-rate inversion speaks
    // instead.
    let machine_misid_point = primary.misid_rate();
    let (humanness_point, humanness_bounds_iv, required) = match &rates {
        RateEstimates::ThreePlayer { .. } => {
            let score = humanness(&make_three_player_model(machine_misid_point.clone()))
                .map_err(|e| e.at_stage("humanness"))?;
            let bounds = bounds_over(&misid_bounds, &Prob::half())?;
            (Some(score), bounds, None)
        }
        RateEstimates::TwoPlayer { human, .. } => match human {
            Some(human) => {
                let score = humanness(&make_two_player_model(
                    machine_misid_point.clone(),
                    human.rate().clone(),
                ))
                .map_err(|e| e.at_stage("humanness"))?;
                let bounds = bounds_over(&misid_bounds, human.rate())?;
                (Some(score), bounds, None)
            }
            None => {
                let required =
                    required_human_rate(&machine_misid_point, &config.humanness_threshold)
                        .map_err(|e| e.at_stage("humanness"))?;
                (None, None, Some(required))
            }
        },
    };

    let narrative = build_narrative(
        &rates,
        &significance,
        &compatible,
        &misid_bounds,
        &humanness_point,
        &humanness_bounds_iv,
        &required,
        &config.humanness_threshold,
    );

    Ok(TestVerdict {
        format: dataset.format(),
        source: dataset.source().to_string(),
        rates,
        significance,
        compatible,
        misid_bounds,
        humanness_point,
        humanness_bounds: humanness_bounds_iv,
        required_human_rate: required,
        humanness_threshold: config.humanness_threshold.clone(),
        narrative,
    })
}

fn bounds_over(misid_bounds: &Option<Interval>, reference: &Prob) -> Result<Option<Interval>> {
    match misid_bounds {
        None => Ok(None),
        Some(iv) => {
            let lo = Prob::new(iv.lo().clone()).map_err(|e| e.at_stage("humanness"))?;
            let hi = Prob::new(iv.hi().clone()).map_err(|e| e.at_stage("humanness"))?;
            humanness_bounds(&lo, &hi, reference)
                .map(Some)
                .map_err(|e| e.at_stage("humanness"))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn build_narrative(
    rates: &RateEstimates,
    significance: &SignificanceResult,
    compatible: &CompatibleSet,
    misid_bounds: &Option<Interval>,
    humanness_point: &Option<HumannessScore>,
    humanness_bounds: &Option<Interval>,
    required: &Option<RequiredRate>,
    threshold: &Scalar,
) -> Narrative {
    let obs = significance.observation();
    let observation = match rates {
        RateEstimates::ThreePlayer { joint } => format!(
            "{} of {} joint trials identified both respondents correctly (rate {})",
            obs.k(),
            obs.n(),
            show(joint.rate().value()),
        ),
        RateEstimates::TwoPlayer { machine, human } => {
            let m = machine.as_ref().expect("primary observation is machine");
            let mut line = format!(
                "machine declared human in {} of {} sessions (misidentification rate {})",
                m.observation().n() - m.observation().k(),
                m.observation().n(),
                show(m.misid_rate().value()),
            );
            match human {
                Some(h) => line.push_str(&format!(
                    "; human controls correct in {} of {} sessions (rate {})",
                    h.observation().k(),
                    h.observation().n(),
                    show(h.rate().value()),
                )),
                None => line.push_str("; human baseline: not reported"),
            }
            line
        }
    };

    let relation = if significance.significant() {
        "<"
    } else {
        ">="
    };
    let significance_line = format!(
        "tail mass {} {relation} level {}: {} p0 = {}",
        show(significance.tail_mass().value()),
        show(significance.level().value()),
        if significance.significant() {
            "reject"
        } else {
            "cannot reject"
        },
        show(significance.p0().value()),
    );

    let compatibility = {
        let ranges: Vec<String> = compatible.compatible().iter().map(show_interval).collect();
        let mut line = format!(
            "correct-identification probabilities compatible with the result: {}",
            if ranges.is_empty() {
                "none".to_string()
            } else {
                ranges.join(" ∪ ")
            }
        );
        if let Some(misid) = misid_bounds {
            line.push_str(&format!(
                "; misidentification probabilities {}",
                show_interval(misid)
            ));
        }
        line
    };

    let humanness_line = match (humanness_point, humanness_bounds, required) {
        (Some(score), Some(bounds), _) => format!(
            "degree of humanness: point {}, compatible range {}",
            show(score.ratio()),
            show_interval(bounds),
        ),
        (Some(score), None, _) => {
            format!("degree of humanness: point {}", show(score.ratio()))
        }
        (None, _, Some(required)) => {
            let mut line =
                String::from("human baseline: not reported — degree of humanness not computable; ");
            match required {
                RequiredRate::Rate(rate) => line.push_str(&format!(
                    "a human correct-identification rate above {} (≈ {}) would put the machine below the {} humanness threshold",
                    rate.value(),
                    percent(rate.value()),
                    show(threshold),
                )),
                RequiredRate::Overflow(q) => line.push_str(&format!(
                    "the machine clears the {} humanness threshold against every possible human baseline (quotient {})",
                    show(threshold),
                    show(q),
                )),
            }
            line
        }
        (None, _, None) => "degree of humanness: not computable".to_string(),
    };

    let mut notes = vec!["trials are assumed independent and are unweighted".to_string()];
    for gap in compatible.undetermined() {
        notes.push(format!(
            "significance undetermined on the open interval ({}, {}) at this grid resolution",
            show(gap.lo()),
            show(gap.hi()),
        ));
    }
    for crossing in compatible.crossings() {
        notes.push(format!(
            "significance boundary near {} (bracketed within {})",
            show(crossing.estimate()),
            show_interval(crossing.bracket()),
        ));
    }

    Narrative {
        observation,
        significance: significance_line,
        compatibility,
        humanness: humanness_line,
        notes,
    }
}

/// Report rendering mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportMode {
    Text,
    Json,
}

#[derive(Serialize)]
struct VerdictWire<'a> {
    schema: &'static str,
    format: TestFormat,
    source: &'a str,
    rates: &'a RateEstimates,
    significance: &'a SignificanceResult,
    compatible: &'a CompatibleSet,
    misid_bounds: &'a Option<Interval>,
    humanness_point: &'a Option<HumannessScore>,
    humanness_bounds: &'a Option<Interval>,
    required_human_rate: &'a Option<RequiredRate>,
    humanness_threshold: &'a Scalar,
    narrative: &'a Narrative,
}

/// Renders a verdict. Text and JSON draw on the same stored values, so the
/// two modes always agree numerically.
pub fn emit_report(v: &TestVerdict, mode: ReportMode) -> String {
    match mode {
        ReportMode::Json => {
            let wire = VerdictWire {
                schema: VERDICT_SCHEMA,
                format: v.format,
                source: &v.source,
                rates: &v.rates,
                significance: &v.significance,
                compatible: &v.compatible,
                misid_bounds: &v.misid_bounds,
                humanness_point: &v.humanness_point,
                humanness_bounds: &v.humanness_bounds,
                required_human_rate: &v.required_human_rate,
                humanness_threshold: &v.humanness_threshold,
                narrative: &v.narrative,
            };
            serde_json::to_string(&wire).expect("verdict serialization")
        }
        ReportMode::Text => {
            let mut out = String::new();
            let s = &v.significance;
            out.push_str(&format!("format: {}\n", v.format));
            out.push_str(&format!("source: {}\n", v.source));
            out.push_str(&format!("observation: {}\n", v.narrative.observation));
            out.push_str(&format!(
                "null hypothesis: p0 = {}, level {}\n",
                show(s.p0().value()),
                show(s.level().value()),
            ));
            out.push_str(&format!("pmf at k: {}\n", show(s.pmf_at_k().value())));
            let outcomes: Vec<String> = s
                .contributing_outcomes()
                .iter()
                .map(|j| j.to_string())
                .collect();
            out.push_str(&format!(
                "equally-or-less-probable outcomes: {{{}}}\n",
                outcomes.join(", ")
            ));
            out.push_str(&format!("tail mass: {}\n", show(s.tail_mass().value())));
            out.push_str(&format!("significant: {}\n", s.significant()));
            out.push_str(&format!("grid step: {}\n", show(v.compatible.grid_step())));
            out.push_str(&format!("compatibility: {}\n", v.narrative.compatibility));
            if let Some(bounds) = &v.humanness_bounds {
                out.push_str(&format!("humanness bounds: {}\n", show_interval(bounds)));
            }
            out.push_str(&format!("humanness: {}\n", v.narrative.humanness));
            for note in &v.narrative.notes {
                out.push_str(&format!("note: {note}\n"));
            }
            out
        }
    }
}

/// One row per grid point: the hypothesis value, the tail mass of the
/// observation under it, and the strict significance verdict. Numbers are
/// written as decimals (exact when terminating, shortest-round-trip float
/// otherwise) for direct consumption by plotting tools.
pub fn emit_curve(obs: &BinomialObservation, level: &Prob, grid_step: &Scalar) -> Result<String> {
    let points = grid_points(grid_step)?;
    let mut out = String::from(CSV_CURVE_HEADER);
    out.push('\n');
    for point in points {
        let p = Prob::new(point)?;
        let result = exact_significance(obs, &p, level)?;
        out.push_str(&format!(
            "{},{},{}\n",
            csv_number(p.value()),
            csv_number(result.tail_mass().value()),
            result.significant(),
        ));
    }
    Ok(out)
}

fn csv_number(s: &Scalar) -> String {
    s.decimal_string().unwrap_or_else(|| s.to_f64().to_string())
}
