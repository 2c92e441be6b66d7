//! Shared domain types: preference labels, examples, judgments, and
//! trajectory records.
//!
//! A preference label is either binary (which of two responses wins) or
//! multiclass (a signed strength in `{-3,-2,-1,1,2,3}`, negative favoring
//! response A). Both conventions share one sign mapping: A maps to -1 and
//! B to +1, so negative always favors response A.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Error returned when a domain value violates an invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid {field}: {reason}")]
pub struct ValidationError {
    /// The offending field, e.g. `"response_b"` or `"gold_label"`.
    pub field: String,
    pub reason: String,
}

impl ValidationError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// Which of the two responses a binary judgment prefers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryChoice {
    A,
    B,
}

impl BinaryChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            BinaryChoice::A => "A",
            BinaryChoice::B => "B",
        }
    }

    /// The opposite choice.
    pub fn flipped(&self) -> Self {
        match self {
            BinaryChoice::A => BinaryChoice::B,
            BinaryChoice::B => BinaryChoice::A,
        }
    }
}

/// Label kind: binary A/B preference or signed multiclass strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Binary,
    Multiclass,
}

/// A preference label, binary or multiclass.
///
/// Multiclass values live in `{-3,-2,-1,1,2,3}`; the scale has no tie
/// value, so zero is rejected everywhere a label is constructed or parsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PreferenceLabel {
    Binary(BinaryChoice),
    /// Signed strength; magnitude 1-3, negative favors response A.
    Multiclass(i8),
}

impl PreferenceLabel {
    /// Validated multiclass constructor.
    pub fn multiclass(value: i8) -> Result<Self, ValidationError> {
        let label = PreferenceLabel::Multiclass(value);
        label.validate().map(|_| label)
    }

    pub fn kind(&self) -> LabelKind {
        match self {
            PreferenceLabel::Binary(_) => LabelKind::Binary,
            PreferenceLabel::Multiclass(_) => LabelKind::Multiclass,
        }
    }

    /// Checks the multiclass range invariant (`{-3..3}` minus zero).
    pub fn validate(&self) -> Result<(), ValidationError> {
        match self {
            PreferenceLabel::Binary(_) => Ok(()),
            PreferenceLabel::Multiclass(v) => {
                if *v == 0 || *v < -3 || *v > 3 {
                    Err(ValidationError::new(
                        "gold_label",
                        format!("multiclass value {v} outside {{-3,-2,-1,1,2,3}}"),
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Every valid label of each kind, in a fixed order. Handy for
    /// exhaustive round-trip tests.
    pub fn all_valid() -> Vec<PreferenceLabel> {
        let mut labels = vec![
            PreferenceLabel::Binary(BinaryChoice::A),
            PreferenceLabel::Binary(BinaryChoice::B),
        ];
        for v in [-3i8, -2, -1, 1, 2, 3] {
            labels.push(PreferenceLabel::Multiclass(v));
        }
        labels
    }
}

/// Sign of a preference label: -1 favors response A, +1 favors response B.
///
/// Binary labels map A to -1 and B to +1, matching the multiclass
/// convention that negative values favor response A. Never returns 0 on a
/// valid label.
pub fn label_sign(label: &PreferenceLabel) -> i32 {
    match label {
        PreferenceLabel::Binary(BinaryChoice::A) => -1,
        PreferenceLabel::Binary(BinaryChoice::B) => 1,
        PreferenceLabel::Multiclass(v) => {
            if *v < 0 {
                -1
            } else {
                1
            }
        }
    }
}

// Wire shape shared by all JSONL formats: {"kind": "...", "value": "..."}
// with the value always a string ("A"/"B" or an integer rendered as text).
#[derive(Serialize, Deserialize)]
struct LabelDto {
    kind: LabelKind,
    value: String,
}

impl Serialize for PreferenceLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let dto = LabelDto {
            kind: self.kind(),
            value: match self {
                PreferenceLabel::Binary(c) => c.as_str().to_string(),
                PreferenceLabel::Multiclass(v) => v.to_string(),
            },
        };
        dto.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PreferenceLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = LabelDto::deserialize(deserializer)?;
        match dto.kind {
            LabelKind::Binary => match dto.value.as_str() {
                "A" => Ok(PreferenceLabel::Binary(BinaryChoice::A)),
                "B" => Ok(PreferenceLabel::Binary(BinaryChoice::B)),
                other => Err(D::Error::custom(format!(
                    "binary label value must be \"A\" or \"B\", got {other:?}"
                ))),
            },
            LabelKind::Multiclass => {
                let v: i8 = dto.value.parse().map_err(|_| {
                    D::Error::custom(format!("bad multiclass value {:?}", dto.value))
                })?;
                PreferenceLabel::multiclass(v).map_err(D::Error::custom)
            }
        }
    }
}

/// One unit of preference data: a prompt context, two candidate responses,
/// and the gold preference label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceExample {
    pub id: String,
    /// Prompt context; multi-turn conversations are flattened into this
    /// single field (see the template module).
    pub context: String,
    pub response_a: String,
    pub response_b: String,
    pub gold_label: PreferenceLabel,
}

/// Checks all [`PreferenceExample`] invariants, naming the violated field.
pub fn validate_example(ex: &PreferenceExample) -> Result<(), ValidationError> {
    if ex.id.is_empty() {
        return Err(ValidationError::new("id", "must be non-empty"));
    }
    if ex.context.is_empty() {
        return Err(ValidationError::new("context", "must be non-empty"));
    }
    if ex.response_a.is_empty() {
        return Err(ValidationError::new("response_a", "must be non-empty"));
    }
    if ex.response_b.is_empty() {
        return Err(ValidationError::new("response_b", "must be non-empty"));
    }
    ex.gold_label.validate()
}

/// How reasoning length is counted.
///
/// The default counts whitespace-delimited tokens: deterministic and
/// independent of any model tokenizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenConvention {
    #[default]
    Whitespace,
    Chars,
}

impl TokenConvention {
    pub fn count(&self, text: &str) -> usize {
        match self {
            TokenConvention::Whitespace => text.split_whitespace().count(),
            TokenConvention::Chars => text.chars().count(),
        }
    }
}

/// A judge's output: the reasoning trace, its token length, and the parsed
/// preference label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Judgment {
    pub reasoning: String,
    pub reasoning_len: usize,
    pub label: PreferenceLabel,
}

impl Judgment {
    /// Builds a judgment, counting `reasoning_len` with the given convention.
    pub fn new(reasoning: String, label: PreferenceLabel, convention: TokenConvention) -> Self {
        let reasoning_len = convention.count(&reasoning);
        Self {
            reasoning,
            reasoning_len,
            label,
        }
    }
}

/// A stored reasoning trajectory for one preference example, as produced
/// by an upstream reasoning model and consumed by warm-up curation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub example_id: String,
    pub reasoning: String,
    pub reasoning_len: usize,
    pub predicted_label: PreferenceLabel,
}

impl TrajectoryRecord {
    pub fn new(
        example_id: String,
        reasoning: String,
        predicted_label: PreferenceLabel,
        convention: TokenConvention,
    ) -> Self {
        let reasoning_len = convention.count(&reasoning);
        Self {
            example_id,
            reasoning,
            reasoning_len,
            predicted_label,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> PreferenceExample {
        PreferenceExample {
            id: "ex-1".to_string(),
            context: "What is 2+2?".to_string(),
            response_a: "4".to_string(),
            response_b: "5".to_string(),
            gold_label: PreferenceLabel::Binary(BinaryChoice::A),
        }
    }

    #[test]
    fn well_formed_example_validates() {
        assert!(validate_example(&example()).is_ok());
    }

    #[test]
    fn empty_response_b_names_the_field() {
        let mut ex = example();
        ex.response_b.clear();
        let err = validate_example(&ex).unwrap_err();
        assert_eq!(err.field, "response_b");
    }

    #[test]
    fn multiclass_zero_is_rejected() {
        let mut ex = example();
        ex.gold_label = PreferenceLabel::Multiclass(0);
        let err = validate_example(&ex).unwrap_err();
        assert_eq!(err.field, "gold_label");
        assert!(PreferenceLabel::multiclass(0).is_err());
        assert!(PreferenceLabel::multiclass(4).is_err());
        assert!(PreferenceLabel::multiclass(-4).is_err());
    }

    #[test]
    fn label_sign_examples() {
        assert_eq!(label_sign(&PreferenceLabel::Multiclass(-2)), -1);
        assert_eq!(label_sign(&PreferenceLabel::Multiclass(3)), 1);
        assert_eq!(label_sign(&PreferenceLabel::Binary(BinaryChoice::A)), -1);
        assert_eq!(label_sign(&PreferenceLabel::Binary(BinaryChoice::B)), 1);
    }

    #[test]
    fn label_sign_never_zero_on_valid_labels() {
        for label in PreferenceLabel::all_valid() {
            assert_ne!(label_sign(&label), 0, "{label:?}");
        }
    }

    #[test]
    fn label_serde_shape() {
        let a = PreferenceLabel::Binary(BinaryChoice::A);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            r#"{"kind":"binary","value":"A"}"#
        );
        let m = PreferenceLabel::Multiclass(-2);
        assert_eq!(
            serde_json::to_string(&m).unwrap(),
            r#"{"kind":"multiclass","value":"-2"}"#
        );
    }

    #[test]
    fn label_deserialize_rejects_zero_and_garbage() {
        assert!(
            serde_json::from_str::<PreferenceLabel>(r#"{"kind":"multiclass","value":"0"}"#)
                .is_err()
        );
        assert!(
            serde_json::from_str::<PreferenceLabel>(r#"{"kind":"binary","value":"C"}"#).is_err()
        );
        assert!(
            serde_json::from_str::<PreferenceLabel>(r#"{"kind":"binary","value":"a"}"#).is_err()
        );
    }

    #[test]
    fn label_round_trip_all_valid() {
        for label in PreferenceLabel::all_valid() {
            let json = serde_json::to_string(&label).unwrap();
            let back: PreferenceLabel = serde_json::from_str(&json).unwrap();
            assert_eq!(back, label);
        }
    }

    #[test]
    fn token_conventions() {
        assert_eq!(TokenConvention::Whitespace.count("a b  c\nd"), 4);
        assert_eq!(TokenConvention::Whitespace.count(""), 0);
        assert_eq!(TokenConvention::Chars.count("abc"), 3);
    }
}
