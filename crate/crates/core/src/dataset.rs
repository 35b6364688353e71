//! Recorded trial data: schema, validation, and the JSONL/CSV wire formats.
//!
//! The primary on-disk format is JSON lines, one trial object per line,
//! tagged `"schema": "tt-trial/1"`. A three-player trial carries exactly two
//! response entries (one per respondent) whose verdicts are complementary —
//! the interrogator names one respondent human and the other machine. A
//! two-player trial carries a single response entry. A flat CSV importer
//! (header `trial_id,format,respondent,verdict,correct`) is provided as a
//! convenience; three-player trials span two CSV rows sharing a `trial_id`.
//!
//! `correct` is always derivable from the respondent kind and the verdict;
//! when a file supplies it redundantly it must agree, and emitted files
//! always include it for readability.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{RespondentKind, TestFormat, Verdict};

/// Schema tag required on every JSONL trial line.
pub const TRIAL_SCHEMA: &str = "tt-trial/1";

/// Fixed header of the CSV trial format.
pub const CSV_TRIAL_HEADER: &str = "trial_id,format,respondent,verdict,correct";

/// The format-specific payload of a trial.
///
/// A three-player trial stores only the machine's verdict; the human foil's
/// verdict is the opposite one by the structure of the test (the
/// interrogator must call one respondent human and the other machine), so
/// the complementarity invariant cannot be violated once a record exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrialBody {
    ThreePlayer {
        machine_verdict: Verdict,
    },
    TwoPlayer {
        respondent: RespondentKind,
        verdict: Verdict,
    },
}

/// One interrogation outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial_id: String,
    pub body: TrialBody,
    pub duration_note: Option<String>,
    pub metadata: BTreeMap<String, String>,
}

impl TrialRecord {
    /// Three-player trial. Fails unless the two verdicts are complementary
    /// (exactly one respondent declared human).
    pub fn three_player(
        trial_id: impl Into<String>,
        machine_verdict: Verdict,
        human_verdict: Verdict,
    ) -> Result<TrialRecord> {
        let trial_id = trial_id.into();
        if human_verdict != machine_verdict.opposite() {
            return Err(Error::InvalidTrial {
                trial_id,
                message: format!(
                    "three-player verdicts must be complementary, got machine {machine_verdict} and human {human_verdict}"
                ),
            });
        }
        Ok(TrialRecord {
            trial_id,
            body: TrialBody::ThreePlayer { machine_verdict },
            duration_note: None,
            metadata: BTreeMap::new(),
        })
    }

    /// Two-player session with a single hidden respondent.
    pub fn two_player(
        trial_id: impl Into<String>,
        respondent: RespondentKind,
        verdict: Verdict,
    ) -> TrialRecord {
        TrialRecord {
            trial_id: trial_id.into(),
            body: TrialBody::TwoPlayer {
                respondent,
                verdict,
            },
            duration_note: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_duration_note(mut self, note: impl Into<String>) -> TrialRecord {
        self.duration_note = Some(note.into());
        self
    }

    pub fn format(&self) -> TestFormat {
        match self.body {
            TrialBody::ThreePlayer { .. } => TestFormat::ThreePlayer,
            TrialBody::TwoPlayer { .. } => TestFormat::TwoPlayer,
        }
    }

    /// The responses as (respondent, verdict, correct) triples — two for a
    /// three-player trial, one for a two-player session.
    pub fn responses(&self) -> Vec<(RespondentKind, Verdict, bool)> {
        match self.body {
            TrialBody::ThreePlayer { machine_verdict } => {
                let human_verdict = machine_verdict.opposite();
                vec![
                    (
                        RespondentKind::Machine,
                        machine_verdict,
                        RespondentKind::Machine.is_correct(machine_verdict),
                    ),
                    (
                        RespondentKind::Human,
                        human_verdict,
                        RespondentKind::Human.is_correct(human_verdict),
                    ),
                ]
            }
            TrialBody::TwoPlayer {
                respondent,
                verdict,
            } => {
                vec![(respondent, verdict, respondent.is_correct(verdict))]
            }
        }
    }

    /// For a three-player trial: were both respondents identified correctly?
    /// (They stand or fall together.) `None` for two-player sessions.
    pub fn joint_correct(&self) -> Option<bool> {
        match self.body {
            TrialBody::ThreePlayer { machine_verdict } => {
                Some(machine_verdict == Verdict::DeclaredMachine)
            }
            TrialBody::TwoPlayer { .. } => None,
        }
    }
}

/// A validated, format-homogeneous collection of trials.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentDataset {
    format: TestFormat,
    trials: Vec<TrialRecord>,
    source: String,
}

impl ExperimentDataset {
    /// Validates that trials exist, share one format, and have unique ids.
    pub fn new(trials: Vec<TrialRecord>, source: impl Into<String>) -> Result<ExperimentDataset> {
        let first = trials.first().ok_or(Error::EmptyDataset)?;
        let format = first.format();
        let mut seen = BTreeSet::new();
        for trial in &trials {
            if trial.format() != format {
                return Err(Error::MixedFormats {
                    first: format.to_string(),
                    second: trial.format().to_string(),
                });
            }
            if !seen.insert(trial.trial_id.clone()) {
                return Err(Error::DuplicateTrialId {
                    trial_id: trial.trial_id.clone(),
                });
            }
        }
        Ok(ExperimentDataset {
            format,
            trials,
            source: source.into(),
        })
    }

    pub fn format(&self) -> TestFormat {
        self.format
    }

    pub fn trials(&self) -> &[TrialRecord] {
        &self.trials
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn set_source(&mut self, source: impl Into<String>) {
        self.source = source.into();
    }

    /// Serializes to JSON lines, one `tt-trial/1` object per trial.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for trial in &self.trials {
            let wire = TrialWire::from_record(trial);
            // Serialization of these plain structs cannot fail.
            out.push_str(&serde_json::to_string(&wire).expect("trial serialization"));
            out.push('\n');
        }
        out
    }

    /// Serializes to the flat CSV form. Duration notes and metadata have no
    /// CSV columns and are dropped; use JSONL to preserve them.
    pub fn to_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        for trial in &self.trials {
            for (respondent, verdict, correct) in trial.responses() {
                wtr.serialize(CsvRow {
                    trial_id: trial.trial_id.clone(),
                    format: trial.format(),
                    respondent,
                    verdict,
                    correct,
                })
                .expect("csv serialization");
            }
        }
        String::from_utf8(wtr.into_inner().expect("csv flush")).expect("csv utf8")
    }
}

/// Decides the test format from an experiment's structural properties: only
/// a design with paired conversations *and* forced complementary verdicts is
/// a three-player test; parallel-but-unconstrained sessions are a particular
/// type of two-player test.
pub fn classify_format(
    paired_conversations: bool,
    forced_complementary_verdicts: bool,
) -> TestFormat {
    if paired_conversations && forced_complementary_verdicts {
        TestFormat::ThreePlayer
    } else {
        TestFormat::TwoPlayer
    }
}

/// Reads a dataset from JSONL or CSV (auto-detected: a first non-space byte
/// of `{` means JSONL). `format_hint`, when given, asserts the expected test
/// format. Errors name the offending line.
pub fn parse_trials<R: Read>(
    mut input: R,
    format_hint: Option<TestFormat>,
) -> Result<ExperimentDataset> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    parse_trials_str(&text, format_hint)
}

/// [`parse_trials`] over an in-memory string.
pub fn parse_trials_str(text: &str, format_hint: Option<TestFormat>) -> Result<ExperimentDataset> {
    let trimmed = text.trim_start();
    let dataset = if trimmed.starts_with('{') {
        parse_jsonl(text)?
    } else if trimmed.is_empty() {
        return Err(Error::EmptyDataset);
    } else {
        parse_csv(text)?
    };
    if let Some(expected) = format_hint {
        if dataset.format() != expected {
            return Err(Error::FormatHintMismatch {
                expected: expected.to_string(),
                found: dataset.format().to_string(),
            });
        }
    }
    Ok(dataset)
}

// ---------------------------------------------------------------------------
// JSONL wire form

#[derive(Serialize, Deserialize)]
struct TrialWire {
    schema: String,
    trial_id: String,
    format: TestFormat,
    responses: Vec<ResponseWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    duration_note: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct ResponseWire {
    respondent: RespondentKind,
    verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    correct: Option<bool>,
}

impl TrialWire {
    fn from_record(trial: &TrialRecord) -> TrialWire {
        TrialWire {
            schema: TRIAL_SCHEMA.to_string(),
            trial_id: trial.trial_id.clone(),
            format: trial.format(),
            responses: trial
                .responses()
                .into_iter()
                .map(|(respondent, verdict, correct)| ResponseWire {
                    respondent,
                    verdict,
                    correct: Some(correct),
                })
                .collect(),
            duration_note: trial.duration_note.clone(),
            metadata: trial.metadata.clone(),
        }
    }

    fn into_record(self) -> Result<TrialRecord> {
        if self.schema != TRIAL_SCHEMA {
            return Err(Error::InvalidTrial {
                trial_id: self.trial_id,
                message: format!(
                    "unsupported schema {:?}, expected {TRIAL_SCHEMA:?}",
                    self.schema
                ),
            });
        }
        for response in &self.responses {
            if let Some(correct) = response.correct {
                let derived = response.respondent.is_correct(response.verdict);
                if correct != derived {
                    return Err(Error::InvalidTrial {
                        trial_id: self.trial_id,
                        message: format!(
                            "correct={correct} contradicts {} with verdict {}",
                            response.respondent, response.verdict
                        ),
                    });
                }
            }
        }
        let mut record = match self.format {
            TestFormat::ThreePlayer => {
                let find = |kind: RespondentKind| -> Result<Verdict> {
                    let mut found = self.responses.iter().filter(|r| r.respondent == kind);
                    let verdict = found.next().map(|r| r.verdict);
                    if found.next().is_some() {
                        return Err(Error::InvalidTrial {
                            trial_id: self.trial_id.clone(),
                            message: format!("more than one {kind} response"),
                        });
                    }
                    verdict.ok_or_else(|| Error::InvalidTrial {
                        trial_id: self.trial_id.clone(),
                        message: format!("missing the {kind} response"),
                    })
                };
                if self.responses.len() != 2 {
                    return Err(Error::InvalidTrial {
                        trial_id: self.trial_id,
                        message: format!(
                            "a three-player trial needs exactly 2 responses, got {}",
                            self.responses.len()
                        ),
                    });
                }
                let machine = find(RespondentKind::Machine)?;
                let human = find(RespondentKind::Human)?;
                TrialRecord::three_player(self.trial_id, machine, human)?
            }
            TestFormat::TwoPlayer => {
                if self.responses.len() != 1 {
                    return Err(Error::InvalidTrial {
                        trial_id: self.trial_id,
                        message: format!(
                            "a two-player session needs exactly 1 response, got {}",
                            self.responses.len()
                        ),
                    });
                }
                let r = &self.responses[0];
                TrialRecord::two_player(self.trial_id, r.respondent, r.verdict)
            }
        };
        record.duration_note = self.duration_note;
        record.metadata = self.metadata;
        Ok(record)
    }
}

fn parse_jsonl(text: &str) -> Result<ExperimentDataset> {
    let mut trials = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let wire: TrialWire = serde_json::from_str(line).map_err(|e| Error::ParseLine {
            line: line_no,
            message: e.to_string(),
        })?;
        trials.push(wire.into_record().map_err(|e| Error::ParseLine {
            line: line_no,
            message: e.to_string(),
        })?);
    }
    ExperimentDataset::new(trials, "jsonl input")
}

// ---------------------------------------------------------------------------
// CSV wire form

#[derive(Serialize, Deserialize)]
struct CsvRow {
    trial_id: String,
    format: TestFormat,
    respondent: RespondentKind,
    verdict: Verdict,
    correct: bool,
}

fn parse_csv(text: &str) -> Result<ExperimentDataset> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| Error::ParseLine {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let expected: Vec<&str> = CSV_TRIAL_HEADER.split(',').collect();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::ParseLine {
            line: 1,
            message: format!(
                "unexpected CSV header {:?}, expected {CSV_TRIAL_HEADER:?}",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    // Collect rows with their line numbers, then group consecutive rows that
    // share a trial_id into three-player trials.
    let mut rows: Vec<(usize, CsvRow)> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::ParseLine {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let row: CsvRow = record
            .deserialize(Some(&headers))
            .map_err(|e| Error::ParseLine {
                line,
                message: e.to_string(),
            })?;
        if row.correct != row.respondent.is_correct(row.verdict) {
            return Err(Error::ParseLine {
                line,
                message: format!(
                    "correct={} contradicts {} with verdict {}",
                    row.correct, row.respondent, row.verdict
                ),
            });
        }
        rows.push((line, row));
    }

    let mut trials = Vec::new();
    let mut iter = rows.into_iter().peekable();
    while let Some((line, row)) = iter.next() {
        match row.format {
            TestFormat::TwoPlayer => {
                trials.push(TrialRecord::two_player(
                    row.trial_id,
                    row.respondent,
                    row.verdict,
                ));
            }
            TestFormat::ThreePlayer => {
                let (second_line, second) = match iter.peek() {
                    Some((_, next)) if next.trial_id == row.trial_id => {
                        iter.next().expect("peeked row")
                    }
                    _ => {
                        return Err(Error::ParseLine {
                            line,
                            message: format!(
                                "three-player trial {:?} needs two consecutive rows",
                                row.trial_id
                            ),
                        })
                    }
                };
                let (machine, human) = match (row.respondent, second.respondent) {
                    (RespondentKind::Machine, RespondentKind::Human) => {
                        (row.verdict, second.verdict)
                    }
                    (RespondentKind::Human, RespondentKind::Machine) => {
                        (second.verdict, row.verdict)
                    }
                    _ => {
                        return Err(Error::ParseLine {
                            line: second_line,
                            message: format!(
                                "three-player trial {:?} needs one machine and one human row",
                                row.trial_id
                            ),
                        })
                    }
                };
                trials.push(
                    TrialRecord::three_player(row.trial_id, machine, human).map_err(|e| {
                        Error::ParseLine {
                            line,
                            message: e.to_string(),
                        }
                    })?,
                );
            }
        }
    }
    ExperimentDataset::new(trials, "csv input")
}
