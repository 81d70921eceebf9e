//! Pipeline configuration: a flat TOML file with the sampling/rendering
//! keys at the top level plus optional `[rtsd]` and `[reward]` tables.
//! Unknown keys are rejected and ranges are checked before any work runs.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rtsd::RtsdConfig;
use crate::sampler::{RangePreset, SamplerConfig};
use crate::scorer::RewardConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("config does not parse: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Full run configuration. Defaults reproduce the standard corpus recipe:
/// up to 3 sources, 10 s at 16 kHz, mic at 1.7 m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub n_scenes: usize,
    pub n_items: usize,
    pub out_dir: String,
    pub k_max: usize,
    pub duration_s: f64,
    pub sample_rate: u32,
    pub mic_height_m: f64,
    pub range_preset: RangePreset,
    pub n_reject: usize,
    pub gain_db_min: f64,
    pub gain_db_max: f64,
    /// Reflection-order override; per-category defaults when absent.
    pub rir_max_order: Option<u32>,
    pub truncation_db: f64,
    /// Worker threads for scene rendering; logical CPUs when absent.
    pub workers: Option<usize>,
    /// Also write per-source RIR WAVs.
    pub dump_rirs: bool,
    /// Export WAVs with FuMa W scaling instead of SN3D.
    pub fuma_output: bool,
    /// Optional dry-source manifest (JSON list of {path, class_label,
    /// domain, transcript?}); merged with the synthetic palette.
    pub dry_manifest: Option<String>,
    pub rtsd: RtsdConfig,
    pub reward: RewardConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let s = SamplerConfig::default();
        PipelineConfig {
            seed: 0,
            n_scenes: 10,
            n_items: 100,
            out_dir: "out".into(),
            k_max: s.k_max,
            duration_s: s.duration_s,
            sample_rate: s.sample_rate,
            mic_height_m: s.mic_height_m,
            range_preset: s.range_preset,
            n_reject: s.n_reject,
            gain_db_min: s.gain_db_min,
            gain_db_max: s.gain_db_max,
            rir_max_order: None,
            truncation_db: -60.0,
            workers: None,
            dump_rirs: false,
            fuma_output: false,
            dry_manifest: None,
            rtsd: RtsdConfig::default(),
            reward: RewardConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: PipelineConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Invalid(msg));
        if self.k_max == 0 {
            return fail("k_max must be at least 1".into());
        }
        if self.n_scenes == 0 {
            return fail("n_scenes must be at least 1".into());
        }
        if !self.duration_s.is_finite() || self.duration_s <= 0.0 {
            return fail(format!("duration_s must be positive, got {}", self.duration_s));
        }
        if self.sample_rate < 8000 {
            return fail(format!("sample_rate must be >= 8000 Hz, got {}", self.sample_rate));
        }
        if !self.mic_height_m.is_finite() || self.mic_height_m < 0.5 {
            return fail(format!("mic_height_m must be >= 0.5 m, got {}", self.mic_height_m));
        }
        if self.gain_db_min > self.gain_db_max {
            return fail("gain_db_min must not exceed gain_db_max".into());
        }
        if !self.truncation_db.is_finite() || self.truncation_db >= 0.0 {
            return fail(format!("truncation_db must be negative, got {}", self.truncation_db));
        }
        if self.rtsd.near_max_m >= self.rtsd.far_min_m {
            return fail("rtsd near_max_m must be below far_min_m".into());
        }
        Ok(())
    }

    pub fn sampler_config(&self) -> SamplerConfig {
        SamplerConfig {
            k_max: self.k_max,
            duration_s: self.duration_s,
            sample_rate: self.sample_rate,
            mic_height_m: self.mic_height_m,
            range_preset: self.range_preset,
            n_reject: self.n_reject,
            gain_db_min: self.gain_db_min,
            gain_db_max: self.gain_db_max,
        }
    }
}
