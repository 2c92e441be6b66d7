//! Remote judge over an OpenAI-compatible chat-completion endpoint.
//!
//! One POST per judgment: the rendered system and user texts go out as
//! chat messages, the generated text comes back at
//! `choices[0].message.content` and is parsed for the answer tag.

use crate::judge::JudgeError;
use crate::model::{Judgment, LabelKind, PreferenceExample, TokenConvention};
use crate::template::{parse_judgment, render_prompt};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

pub const JUDGE_URL_ENV: &str = "PAIRADV_JUDGE_URL";
pub const JUDGE_TOKEN_ENV: &str = "PAIRADV_JUDGE_TOKEN";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteJudgeConfig {
    /// Chat-completion endpoint; falls back to `PAIRADV_JUDGE_URL`.
    pub url: Option<String>,
    pub model: String,
    /// Bearer token; falls back to `PAIRADV_JUDGE_TOKEN`.
    pub token: Option<String>,
    /// Judge sampling temperature.
    pub temperature: f64,
    /// Optional nucleus cutoff; omitted from the request when unset.
    pub top_p: Option<f64>,
    pub max_tokens: usize,
    pub timeout_secs: u64,
    /// Bound on concurrent requests in [`remote_judge_many`].
    pub max_inflight: usize,
}

impl Default for RemoteJudgeConfig {
    fn default() -> Self {
        Self {
            url: None,
            model: "judge".to_string(),
            token: None,
            temperature: 0.6,
            top_p: Some(1.0),
            max_tokens: 2048,
            timeout_secs: 120,
            max_inflight: 4,
        }
    }
}

impl RemoteJudgeConfig {
    fn resolve_url(&self) -> Result<String, JudgeError> {
        self.url
            .clone()
            .or_else(|| std::env::var(JUDGE_URL_ENV).ok())
            .ok_or_else(|| {
                JudgeError::InvalidConfig(format!("no judge url configured (set {JUDGE_URL_ENV})"))
            })
    }

    fn resolve_token(&self) -> Option<String> {
        self.token
            .clone()
            .or_else(|| std::env::var(JUDGE_TOKEN_ENV).ok())
    }
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: String,
}

/// Sends one judgment request and parses the answer tag.
pub fn remote_judge(
    ex: &PreferenceExample,
    kind: LabelKind,
    cfg: &RemoteJudgeConfig,
    convention: TokenConvention,
) -> Result<Judgment, JudgeError> {
    let url = cfg.resolve_url()?;
    let instruction =
        render_prompt(kind, ex).map_err(|e| JudgeError::InvalidConfig(e.to_string()))?;
    let mut body = json!({
        "model": cfg.model,
        "messages": [
            {"role": "system", "content": instruction.system_text},
            {"role": "user", "content": instruction.user_text},
        ],
        "temperature": cfg.temperature,
        "max_tokens": cfg.max_tokens,
    });
    if let Some(top_p) = cfg.top_p {
        body["top_p"] = json!(top_p);
    }

    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(cfg.timeout_secs)))
        .build()
        .into();
    let mut request = agent.post(&url);
    if let Some(token) = cfg.resolve_token() {
        request = request.header("Authorization", &format!("Bearer {token}"));
    }
    let mut response = request
        .send_json(&body)
        .map_err(|e| JudgeError::Transport(e.to_string()))?;
    let parsed: ChatResponse = response
        .body_mut()
        .read_json()
        .map_err(|e| JudgeError::Transport(format!("bad response body: {e}")))?;
    let content = parsed
        .choices
        .first()
        .map(|c| c.message.content.as_str())
        .ok_or_else(|| JudgeError::Transport("response has no choices".to_string()))?;
    parse_judgment(kind, content, convention).map_err(|source| JudgeError::Parse {
        raw: content.to_string(),
        source,
    })
}

/// Judges a batch with at most `max_inflight` requests in flight.
///
/// Results come back in input order regardless of completion order.
pub fn remote_judge_many(
    examples: &[PreferenceExample],
    kind: LabelKind,
    cfg: &RemoteJudgeConfig,
    convention: TokenConvention,
) -> Vec<Result<Judgment, JudgeError>> {
    let workers = cfg.max_inflight.max(1).min(examples.len().max(1));
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<Judgment, JudgeError>>>> =
        Mutex::new((0..examples.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= examples.len() {
                    break;
                }
                let outcome = remote_judge(&examples[i], kind, cfg, convention);
                results.lock().unwrap()[i] = Some(outcome);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("every index judged"))
        .collect()
}
