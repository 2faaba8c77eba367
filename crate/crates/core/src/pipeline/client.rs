//! Clients for the external ASR and translation services, plus
//! deterministic mocks addressable as `mock:*` pseudo-URLs.

use std::collections::HashMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Sample;
use crate::prompting::PromptBundle;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);
pub const DEFAULT_RETRIES: u32 = 3;
const BACKOFF_BASE: Duration = Duration::from_millis(250);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClientError {
    #[error("service unavailable: {0}")]
    Unavailable(String),
    #[error("request timed out")]
    Timeout,
    #[error("service returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("invalid response: {0}")]
    InvalidResponse(String),
    #[error("mock has no reference text for {0}")]
    NoReference(String),
    #[error("unsupported client address {0:?}")]
    BadAddress(String),
}

impl ClientError {
    fn retryable(&self) -> bool {
        match self {
            Self::Unavailable(_) | Self::Timeout => true,
            Self::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TranscriptionRequest<'a> {
    pub sample_id: &'a str,
    pub audio_ref: &'a str,
    pub language_token: &'a str,
}

#[derive(Debug, Clone)]
pub struct TranslationRequest<'a> {
    pub sample_id: &'a str,
    pub bundle: &'a PromptBundle,
    /// Glosses of the matched lexicon entries, in prompt order. Not sent over
    /// the wire; only mocks look at it.
    pub glosses: &'a [String],
}

pub trait Transcriber: Send + Sync {
    fn transcribe(&self, request: &TranscriptionRequest<'_>) -> Result<String, ClientError>;
}

pub trait Translator: Send + Sync {
    fn translate(&self, request: &TranslationRequest<'_>) -> Result<String, ClientError>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpSettings {
    pub timeout: Duration,
    pub retries: u32,
    /// Sent as a bearer token when present.
    pub api_key: Option<String>,
    /// Model name forwarded to the translation service.
    pub model: String,
}

impl Default for HttpSettings {
    fn default() -> Self {
        Self {
            timeout: DEFAULT_TIMEOUT,
            retries: DEFAULT_RETRIES,
            api_key: None,
            model: "default".into(),
        }
    }
}

#[derive(Debug, Serialize)]
struct TranslateBody<'a> {
    model: &'a str,
    system: &'a str,
    user: &'a str,
}

#[derive(Debug, Serialize)]
struct TranscribeBody<'a> {
    audio_url: &'a str,
    language: &'a str,
}

#[derive(Debug, Deserialize)]
struct TextResponse {
    text: String,
}

/// JSON-over-HTTP endpoint: POST a body, read back `{"text": ...}`.
#[derive(Debug, Clone)]
struct JsonEndpoint {
    url: String,
    settings: HttpSettings,
    agent: ureq::Agent,
}

impl JsonEndpoint {
    fn new(url: &str, settings: HttpSettings) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(settings.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            url: url.to_owned(),
            settings,
            agent,
        }
    }

    fn post_once<B: Serialize>(&self, body: &B) -> Result<String, ClientError> {
        let mut req = self.agent.post(&self.url);
        if let Some(key) = &self.settings.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(body).map_err(|e| match e {
            ureq::Error::Timeout(_) => ClientError::Timeout,
            other => ClientError::Unavailable(other.to_string()),
        })?;
        let status = resp.status().as_u16();
        if !(200..300).contains(&status) {
            let body = resp.body_mut().read_to_string().unwrap_or_default();
            return Err(ClientError::Status { status, body });
        }
        let parsed: TextResponse = resp.body_mut().read_json().map_err(|e| match e {
            ureq::Error::Timeout(_) => ClientError::Timeout,
            other => ClientError::InvalidResponse(other.to_string()),
        })?;
        Ok(parsed.text)
    }

    fn post<B: Serialize>(&self, body: &B) -> Result<String, ClientError> {
        let mut attempt = 0;
        loop {
            match self.post_once(body) {
                Err(e) if e.retryable() && attempt < self.settings.retries => {
                    let wait = BACKOFF_BASE * 2u32.pow(attempt);
                    log::warn!("{}: {e}; retrying in {wait:?}", self.url);
                    std::thread::sleep(wait);
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}

/// Sends `{model, system, user}` and expects `{text}`.
#[derive(Debug, Clone)]
pub struct HttpTranslator(JsonEndpoint);

impl HttpTranslator {
    pub fn new(url: &str, settings: HttpSettings) -> Self {
        Self(JsonEndpoint::new(url, settings))
    }
}

impl Translator for HttpTranslator {
    fn translate(&self, request: &TranslationRequest<'_>) -> Result<String, ClientError> {
        self.0.post(&TranslateBody {
            model: &self.0.settings.model,
            system: &request.bundle.system,
            user: &request.bundle.user,
        })
    }
}

/// Sends `{audio_url, language}` and expects `{text}`.
#[derive(Debug, Clone)]
pub struct HttpTranscriber(JsonEndpoint);

impl HttpTranscriber {
    pub fn new(url: &str, settings: HttpSettings) -> Self {
        Self(JsonEndpoint::new(url, settings))
    }
}

impl Transcriber for HttpTranscriber {
    fn transcribe(&self, request: &TranscriptionRequest<'_>) -> Result<String, ClientError> {
        self.0.post(&TranscribeBody {
            audio_url: request.audio_ref,
            language: request.language_token,
        })
    }
}

/// Replaces a `rate` fraction of tokens: token `i` (0-based) is altered when
/// `floor((i + 1) * rate)` steps past `floor(i * rate)`, so a text of `n`
/// tokens gets exactly `floor(n * rate)` substitutions.
pub fn inject_substitutions(text: &str, rate: f64) -> String {
    text.split_whitespace()
        .enumerate()
        .map(|(i, tok)| {
            let before = (i as f64 * rate).floor();
            let after = ((i + 1) as f64 * rate).floor();
            if after > before {
                format!("{tok}q")
            } else {
                tok.to_owned()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq)]
enum MockMode {
    Echo,
    Gloss,
    Noise(f64),
}

/// Deterministic stand-in for a service.
///
/// `echo` returns the reference text for the sample, `noise:<rate>` the
/// reference with [`inject_substitutions`] applied, and `gloss` (translation
/// only) the matched glosses joined by spaces.
#[derive(Debug, Clone)]
pub struct MockClient {
    mode: MockMode,
    references: HashMap<String, String>,
}

impl MockClient {
    fn reference(&self, id: &str) -> Result<&str, ClientError> {
        self.references
            .get(id)
            .map(String::as_str)
            .ok_or_else(|| ClientError::NoReference(id.to_owned()))
    }

    fn respond(&self, id: &str, glosses: Option<&[String]>) -> Result<String, ClientError> {
        match (&self.mode, glosses) {
            (MockMode::Echo, _) => Ok(self.reference(id)?.to_owned()),
            (MockMode::Noise(rate), _) => Ok(inject_substitutions(self.reference(id)?, *rate)),
            (MockMode::Gloss, Some(g)) => Ok(g.join(" ")),
            (MockMode::Gloss, None) => Err(ClientError::BadAddress("mock:gloss is translation-only".into())),
        }
    }
}

impl Transcriber for MockClient {
    fn transcribe(&self, request: &TranscriptionRequest<'_>) -> Result<String, ClientError> {
        self.respond(request.sample_id, None)
    }
}

impl Translator for MockClient {
    fn translate(&self, request: &TranslationRequest<'_>) -> Result<String, ClientError> {
        self.respond(request.sample_id, Some(request.glosses))
    }
}

fn parse_mock(address: &str) -> Result<Option<MockMode>, ClientError> {
    let Some(rest) = address.strip_prefix("mock:") else {
        return Ok(None);
    };
    let bad = || ClientError::BadAddress(address.to_owned());
    let mode = match rest.split_once(':') {
        None if rest == "echo" => MockMode::Echo,
        None if rest == "gloss" => MockMode::Gloss,
        Some(("noise", rate)) => {
            let rate: f64 = rate.parse().map_err(|_| bad())?;
            if !(0.0..=1.0).contains(&rate) {
                return Err(bad());
            }
            MockMode::Noise(rate)
        }
        _ => return Err(bad()),
    };
    Ok(Some(mode))
}

fn check_http(address: &str) -> Result<(), ClientError> {
    if address.starts_with("http://") || address.starts_with("https://") {
        Ok(())
    } else {
        Err(ClientError::BadAddress(address.to_owned()))
    }
}

/// Builds a translator from an `http(s)://` URL or a `mock:` address. Mocks
/// take their reference texts from the samples' gold translations.
pub fn translator_for(
    address: &str,
    samples: &[Sample],
    settings: HttpSettings,
) -> Result<Box<dyn Translator>, ClientError> {
    match parse_mock(address)? {
        Some(mode) => Ok(Box::new(MockClient {
            mode,
            references: samples.iter().map(|s| (s.id.clone(), s.translation.clone())).collect(),
        })),
        None => {
            check_http(address)?;
            Ok(Box::new(HttpTranslator::new(address, settings)))
        }
    }
}

/// Builds a transcriber; mocks use the gold transcriptions.
pub fn transcriber_for(
    address: &str,
    samples: &[Sample],
    settings: HttpSettings,
) -> Result<Box<dyn Transcriber>, ClientError> {
    match parse_mock(address)? {
        Some(MockMode::Gloss) => Err(ClientError::BadAddress(address.to_owned())),
        Some(mode) => Ok(Box::new(MockClient {
            mode,
            references: samples
                .iter()
                .map(|s| (s.id.clone(), s.transcription.clone()))
                .collect(),
        })),
        None => {
            check_http(address)?;
            Ok(Box::new(HttpTranscriber::new(address, settings)))
        }
    }
}
