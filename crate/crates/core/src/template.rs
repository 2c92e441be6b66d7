//! Judge task instructions: prompt rendering and answer-tag parsing.
//!
//! The instruction texts are checked in under `templates/` at the
//! repository root and embedded at compile time. Rendering substitutes the
//! `{context}`, `{response1}`, `{response2}` placeholders; parsing
//! extracts the final `<answer>...</answer>` tag from a judge's output.

use crate::model::{
    validate_example, BinaryChoice, Judgment, LabelKind, PreferenceExample, PreferenceLabel,
    TokenConvention, ValidationError,
};
use thiserror::Error;

const BINARY_SYSTEM: &str = include_str!("../../../templates/binary_system.txt");
const MULTICLASS_SYSTEM: &str = include_str!("../../../templates/multiclass_system.txt");
const USER: &str = include_str!("../../../templates/user.txt");

const ANSWER_OPEN: &str = "<answer>";
const ANSWER_CLOSE: &str = "</answer>";

/// A rendered judge prompt: fixed system text plus the interpolated pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskInstruction {
    pub kind: LabelKind,
    pub system_text: String,
    pub user_text: String,
}

/// Failure to extract a label from a judge's raw output.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("no <answer></answer> tag in judge output")]
    NoTag,
    #[error("bad answer payload {payload:?}")]
    BadPayload { payload: String },
}

// Template files end with a single newline; the rendered text does not.
fn template_text(raw: &str) -> &str {
    raw.strip_suffix('\n').unwrap_or(raw)
}

/// Fixed system text for a label kind.
pub fn system_text(kind: LabelKind) -> &'static str {
    match kind {
        LabelKind::Binary => template_text(BINARY_SYSTEM),
        LabelKind::Multiclass => template_text(MULTICLASS_SYSTEM),
    }
}

/// Renders the judge prompt for a preference pair.
///
/// The user text places the context and the two responses inside the
/// bracketed `[The Start of ...]` sections, byte for byte as laid out in
/// the checked-in template.
pub fn render_prompt(
    kind: LabelKind,
    ex: &PreferenceExample,
) -> Result<TaskInstruction, ValidationError> {
    validate_example(ex)?;
    let user_text = template_text(USER)
        .replace("{context}", &ex.context)
        .replace("{response1}", &ex.response_a)
        .replace("{response2}", &ex.response_b);
    Ok(TaskInstruction {
        kind,
        system_text: system_text(kind).to_string(),
        user_text,
    })
}

/// A single turn of a multi-turn conversation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Turn {
    User(String),
    Assistant(String),
}

/// Flattens a multi-turn conversation into the single `{context}` slot as
/// `User: ...` / `Assistant: ...` alternation.
pub fn flatten_context(turns: &[Turn]) -> String {
    let mut out = String::new();
    for (i, turn) in turns.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match turn {
            Turn::User(text) => {
                out.push_str("User: ");
                out.push_str(text);
            }
            Turn::Assistant(text) => {
                out.push_str("Assistant: ");
                out.push_str(text);
            }
        }
    }
    out
}

// Byte span of the last complete <answer>...</answer> tag.
fn last_answer_span(raw: &str) -> Option<(usize, usize)> {
    let mut last = None;
    let mut search_from = 0;
    while let Some(rel) = raw[search_from..].find(ANSWER_OPEN) {
        let open = search_from + rel;
        let payload_start = open + ANSWER_OPEN.len();
        match raw[payload_start..].find(ANSWER_CLOSE) {
            Some(close_rel) => {
                let end = payload_start + close_rel + ANSWER_CLOSE.len();
                last = Some((open, end));
            }
            None => break,
        }
        search_from = payload_start;
    }
    last
}

fn parse_payload(kind: LabelKind, payload: &str) -> Result<PreferenceLabel, ParseError> {
    let bad = || ParseError::BadPayload {
        payload: payload.to_string(),
    };
    match kind {
        LabelKind::Binary => match payload {
            "A" => Ok(PreferenceLabel::Binary(BinaryChoice::A)),
            "B" => Ok(PreferenceLabel::Binary(BinaryChoice::B)),
            _ => Err(bad()),
        },
        LabelKind::Multiclass => {
            let v: i8 = payload.parse().map_err(|_| bad())?;
            PreferenceLabel::multiclass(v).map_err(|_| bad())
        }
    }
}

/// Parses a judge's raw output into a [`Judgment`].
///
/// The LAST complete `<answer>...</answer>` tag wins, since reasoning text
/// frequently quotes the answer format before committing. Payloads are
/// whitespace-stripped but case-sensitive. The reasoning is the raw text
/// with the matched tag removed.
pub fn parse_judgment(
    kind: LabelKind,
    raw: &str,
    convention: TokenConvention,
) -> Result<Judgment, ParseError> {
    let (start, end) = last_answer_span(raw).ok_or(ParseError::NoTag)?;
    let payload = raw[start + ANSWER_OPEN.len()..end - ANSWER_CLOSE.len()].trim();
    let label = parse_payload(kind, payload)?;
    let reasoning = format!("{}{}", &raw[..start], &raw[end..]);
    Ok(Judgment::new(reasoning, label, convention))
}

/// Canonical `<answer>...</answer>` string for a label.
///
/// `parse_judgment(kind, format_answer(l))` recovers `l` for every valid
/// label.
pub fn format_answer(label: &PreferenceLabel) -> String {
    match label {
        PreferenceLabel::Binary(c) => format!("{ANSWER_OPEN}{}{ANSWER_CLOSE}", c.as_str()),
        PreferenceLabel::Multiclass(v) => format!("{ANSWER_OPEN}{v}{ANSWER_CLOSE}"),
    }
}
