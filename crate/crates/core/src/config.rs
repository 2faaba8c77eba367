//! Run configuration: a flat key/value document whose keys mirror the CLI
//! flags. Values given on the command line take precedence.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::DEFAULT_MAX_DURATION_MS;
use crate::matcher::{DEFAULT_K, DEFAULT_TAU};
use crate::pipeline::{DEFAULT_IN_FLIGHT, DEFAULT_RETRIES, DEFAULT_TIMEOUT};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid {key}: {message}")]
    Invalid { key: &'static str, message: String },
}

pub const DEFAULT_TEST_FRACTION: f64 = 0.1;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_LANGUAGE_TOKEN: &str = "su";
pub const DEFAULT_TAUS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];
pub const DEFAULT_KS: [usize; 5] = [1, 2, 3, 4, 5];

/// Every key is optional; unset keys fall back to the defaults below.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub utterances: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub phoible: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub transcription_tier: Option<String>,
    pub translation_tier: Option<String>,
    pub tau: Option<f64>,
    pub k: Option<usize>,
    pub max_duration_ms: Option<u64>,
    pub test_fraction: Option<f64>,
    pub seed: Option<u64>,
    pub taus: Option<Vec<f64>>,
    pub ks: Option<Vec<usize>>,
    pub asr_url: Option<String>,
    pub translator_url: Option<String>,
    pub language_token: Option<String>,
    pub in_flight: Option<usize>,
    pub timeout_secs: Option<u64>,
    pub retries: Option<u32>,
    pub include_short: Option<bool>,
    pub include_long: Option<bool>,
    pub include_predicted: Option<bool>,
}

macro_rules! overlay {
    ($self:ident, $other:ident, $($field:ident),* $(,)?) => {
        $( if $other.$field.is_some() { $self.$field = $other.$field; } )*
    };
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(mut self, flags: RunConfig) -> Self {
        overlay!(
            self,
            flags,
            corpus,
            manifest,
            utterances,
            lexicon,
            phoible,
            out,
            transcription_tier,
            translation_tier,
            tau,
            k,
            max_duration_ms,
            test_fraction,
            seed,
            taus,
            ks,
            asr_url,
            translator_url,
            language_token,
            in_flight,
            timeout_secs,
            retries,
            include_short,
            include_long,
            include_predicted,
        );
        self
    }

    pub fn tau(&self) -> f64 {
        self.tau.unwrap_or(DEFAULT_TAU)
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or(DEFAULT_K)
    }

    pub fn max_duration_ms(&self) -> u64 {
        self.max_duration_ms.unwrap_or(DEFAULT_MAX_DURATION_MS)
    }

    pub fn test_fraction(&self) -> f64 {
        self.test_fraction.unwrap_or(DEFAULT_TEST_FRACTION)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn taus(&self) -> Vec<f64> {
        self.taus.clone().unwrap_or_else(|| DEFAULT_TAUS.to_vec())
    }

    pub fn ks(&self) -> Vec<usize> {
        self.ks.clone().unwrap_or_else(|| DEFAULT_KS.to_vec())
    }

    pub fn language_token(&self) -> &str {
        self.language_token.as_deref().unwrap_or(DEFAULT_LANGUAGE_TOKEN)
    }

    pub fn in_flight(&self) -> usize {
        self.in_flight.unwrap_or(DEFAULT_IN_FLIGHT)
    }

    pub fn timeout(&self) -> std::time::Duration {
        self.timeout_secs
            .map(std::time::Duration::from_secs)
            .unwrap_or(DEFAULT_TIMEOUT)
    }

    pub fn retries(&self) -> u32 {
        self.retries.unwrap_or(DEFAULT_RETRIES)
    }

    /// Range checks on numeric parameters.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key, message: String| Err(ConfigError::Invalid { key, message });
        let tau_ok = |t: f64| t > 0.0 && t <= 1.0;
        if !tau_ok(self.tau()) {
            return invalid("tau", format!("{} is outside (0, 1]", self.tau()));
        }
        if self.k() == 0 {
            return invalid("k", "must be at least 1".into());
        }
        if self.max_duration_ms() == 0 {
            return invalid("max_duration_ms", "must be positive".into());
        }
        let f = self.test_fraction();
        if !(f > 0.0 && f < 1.0) {
            return invalid("test_fraction", format!("{f} is outside (0, 1)"));
        }
        if let Some(t) = self.taus.as_ref().and_then(|ts| ts.iter().find(|t| !tau_ok(**t))) {
            return invalid("taus", format!("{t} is outside (0, 1]"));
        }
        if self.taus.as_ref().is_some_and(Vec::is_empty) {
            return invalid("taus", "empty list".into());
        }
        if self.ks.as_ref().is_some_and(|ks| ks.is_empty() || ks.contains(&0)) {
            return invalid("ks", "must be a non-empty list of positive integers".into());
        }
        if self.in_flight == Some(0) {
            return invalid("in_flight", "must be at least 1".into());
        }
        Ok(())
    }
}
