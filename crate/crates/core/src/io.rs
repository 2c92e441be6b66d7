//! JSONL dataset formats, matrix dumps, and the metrics CSV.
//!
//! Every dataset is UTF-8 JSONL, one object per line, with a fixed key
//! order on save so that reruns produce byte-identical files. Loading in
//! strict mode rejects unknown keys; lenient mode collects warnings
//! instead.

use crate::curation::WarmupExample;
use crate::model::{
    validate_example, PreferenceExample, PreferenceLabel, TokenConvention, TrajectoryRecord,
};
use crate::trainer::StepMetrics;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fs;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io error")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
}

impl IoError {
    fn schema(line: usize, message: impl Into<String>) -> Self {
        IoError::Schema {
            line,
            message: message.into(),
        }
    }
}

/// Whether unknown JSONL fields are fatal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    Strict,
    Lenient,
}

/// A judged response group for matrix construction: one prompt, G
/// responses, and (for simulated judging) their true rewards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseGroup {
    pub group_id: String,
    pub prompt: String,
    pub responses: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_rewards: Option<Vec<f64>>,
}

// On-disk trajectory shape; reasoning_len is derived on load.
#[derive(Serialize, Deserialize)]
struct TrajectoryDto {
    example_id: String,
    reasoning: String,
    predicted_label: PreferenceLabel,
}

// On-disk warm-up shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarmupRecord {
    pub example_id: String,
    pub reasoning: String,
    pub label: PreferenceLabel,
}

impl From<&WarmupExample> for WarmupRecord {
    fn from(w: &WarmupExample) -> Self {
        Self {
            example_id: w.example.id.clone(),
            reasoning: w.chosen.reasoning.clone(),
            label: w.chosen.predicted_label,
        }
    }
}

const LABEL_KEYS: [&str; 2] = ["kind", "value"];

fn check_keys(
    value: &Value,
    allowed: &[&str],
    label_fields: &[&str],
    line: usize,
    strictness: Strictness,
    warnings: &mut Vec<String>,
) -> Result<(), IoError> {
    let Some(object) = value.as_object() else {
        return Err(IoError::schema(line, "expected a JSON object"));
    };
    let mut complain = |key: &str| -> Result<(), IoError> {
        match strictness {
            Strictness::Strict => Err(IoError::schema(line, format!("unknown field {key:?}"))),
            Strictness::Lenient => {
                warnings.push(format!("line {line}: ignoring unknown field {key:?}"));
                Ok(())
            }
        }
    };
    for key in object.keys() {
        if !allowed.contains(&key.as_str()) {
            complain(key)?;
        }
    }
    for field in label_fields {
        if let Some(label) = object.get(*field).and_then(|v| v.as_object()) {
            for key in label.keys() {
                if !LABEL_KEYS.contains(&key.as_str()) {
                    complain(&format!("{field}.{key}"))?;
                }
            }
        }
    }
    Ok(())
}

fn load_jsonl<T: DeserializeOwned>(
    path: &Path,
    allowed: &[&str],
    label_fields: &[&str],
    strictness: Strictness,
) -> Result<(Vec<T>, Vec<String>), IoError> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(raw)
            .map_err(|e| IoError::schema(line, format!("invalid JSON: {e}")))?;
        check_keys(
            &value,
            allowed,
            label_fields,
            line,
            strictness,
            &mut warnings,
        )?;
        let record: T =
            serde_json::from_value(value).map_err(|e| IoError::schema(line, e.to_string()))?;
        out.push(record);
    }
    Ok((out, warnings))
}

fn save_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), IoError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut file = fs::File::create(path)?;
    for record in records {
        let line = serde_json::to_string(record).expect("serializable record");
        file.write_all(line.as_bytes())?;
        file.write_all(b"\n")?;
    }
    Ok(())
}

/// Loads a preference dataset, validating every example.
pub fn load_examples(
    path: &Path,
    strictness: Strictness,
) -> Result<(Vec<PreferenceExample>, Vec<String>), IoError> {
    let allowed = ["id", "context", "response_a", "response_b", "gold_label"];
    let (examples, warnings): (Vec<PreferenceExample>, _) =
        load_jsonl(path, &allowed, &["gold_label"], strictness)?;
    let mut seen = std::collections::HashSet::new();
    for (i, ex) in examples.iter().enumerate() {
        validate_example(ex).map_err(|e| IoError::schema(i + 1, e.to_string()))?;
        if !seen.insert(ex.id.as_str()) {
            return Err(IoError::schema(i + 1, format!("duplicate id {:?}", ex.id)));
        }
    }
    Ok((examples, warnings))
}

pub fn save_examples(path: &Path, examples: &[PreferenceExample]) -> Result<(), IoError> {
    save_jsonl(path, examples)
}

pub fn load_trajectories(
    path: &Path,
    strictness: Strictness,
    convention: TokenConvention,
) -> Result<(Vec<TrajectoryRecord>, Vec<String>), IoError> {
    let allowed = ["example_id", "reasoning", "predicted_label"];
    let (dtos, warnings): (Vec<TrajectoryDto>, _) =
        load_jsonl(path, &allowed, &["predicted_label"], strictness)?;
    let records = dtos
        .into_iter()
        .map(|d| TrajectoryRecord::new(d.example_id, d.reasoning, d.predicted_label, convention))
        .collect();
    Ok((records, warnings))
}

pub fn save_trajectories(path: &Path, records: &[TrajectoryRecord]) -> Result<(), IoError> {
    let dtos: Vec<TrajectoryDto> = records
        .iter()
        .map(|r| TrajectoryDto {
            example_id: r.example_id.clone(),
            reasoning: r.reasoning.clone(),
            predicted_label: r.predicted_label,
        })
        .collect();
    save_jsonl(path, &dtos)
}

pub fn load_warmups(
    path: &Path,
    strictness: Strictness,
) -> Result<(Vec<WarmupRecord>, Vec<String>), IoError> {
    load_jsonl(
        path,
        &["example_id", "reasoning", "label"],
        &["label"],
        strictness,
    )
}

pub fn save_warmups(path: &Path, records: &[WarmupRecord]) -> Result<(), IoError> {
    save_jsonl(path, records)
}

pub fn load_response_groups(
    path: &Path,
    strictness: Strictness,
) -> Result<(Vec<ResponseGroup>, Vec<String>), IoError> {
    let allowed = ["group_id", "prompt", "responses", "true_rewards"];
    load_jsonl(path, &allowed, &[], strictness)
}

pub fn save_response_groups(path: &Path, groups: &[ResponseGroup]) -> Result<(), IoError> {
    save_jsonl(path, groups)
}

pub fn save_matrices(
    path: &Path,
    matrices: &[crate::advantage::PreferenceMatrix],
) -> Result<(), IoError> {
    save_jsonl(path, matrices)
}

pub fn load_matrices(path: &Path) -> Result<Vec<crate::advantage::PreferenceMatrix>, IoError> {
    let allowed = ["group_id", "g", "entries"];
    let (matrices, _) = load_jsonl(path, &allowed, &[], Strictness::Strict)?;
    Ok(matrices)
}

pub const METRICS_HEADER: &str = "step,mean_true_reward,mean_reward,clip_frac,kl,judge_errors";

/// Writes the run metrics CSV with the fixed header.
pub fn write_metrics_csv(path: &Path, metrics: &[StepMetrics]) -> Result<(), IoError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut file = fs::File::create(path)?;
    writeln!(file, "{METRICS_HEADER}")?;
    for m in metrics {
        writeln!(
            file,
            "{},{},{},{},{},{}",
            m.step, m.mean_true_reward, m.mean_reward, m.clip_fraction, m.kl, m.judge_errors
        )?;
    }
    Ok(())
}

/// One parsed metrics row; used by run summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub step: usize,
    pub mean_true_reward: f64,
    pub mean_reward: f64,
    pub clip_frac: f64,
    pub kl: f64,
    pub judge_errors: usize,
}

pub fn read_metrics_csv(path: &Path) -> Result<Vec<MetricsRow>, IoError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == METRICS_HEADER => {}
        Some((_, other)) => {
            return Err(IoError::schema(1, format!("bad metrics header {other:?}")))
        }
        None => return Ok(Vec::new()),
    }
    let mut rows = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 6 {
            return Err(IoError::schema(
                line,
                format!("expected 6 fields, got {}", fields.len()),
            ));
        }
        let parse_f = |s: &str| -> Result<f64, IoError> {
            s.parse()
                .map_err(|_| IoError::schema(line, format!("bad number {s:?}")))
        };
        let parse_u = |s: &str| -> Result<usize, IoError> {
            s.parse()
                .map_err(|_| IoError::schema(line, format!("bad integer {s:?}")))
        };
        rows.push(MetricsRow {
            step: parse_u(fields[0])?,
            mean_true_reward: parse_f(fields[1])?,
            mean_reward: parse_f(fields[2])?,
            clip_frac: parse_f(fields[3])?,
            kl: parse_f(fields[4])?,
            judge_errors: parse_u(fields[5])?,
        });
    }
    Ok(rows)
}
