//! `configuracao.conf` and `servo_<id>.conf` loading.
//!
//! Both are UTF-8 `key=value` files with `#` comments. Unknown keys are
//! rejected so typos surface immediately.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameConfig, Servant, DEFAULT_ROUNDS_PER_MATCH};
use crate::imaging::MAX_SUBTRACTION_K;
use crate::pipeline::PipelineConfig;
use crate::recognition::RecognitionConfig;

pub const CONFIG_FILE_NAME: &str = "configuracao.conf";
pub const CONFIG_ENV_VAR: &str = "GESTURE_RPS_CONFIG";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{file}:{line}: expected `key=value`")]
    MalformedLine { file: String, line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`")]
    InvalidValue { key: String, value: String },
    #[error("servant file {0}: missing key `{1}`")]
    MissingServantKey(String, &'static str),
    #[error("cannot read {0}: {1}")]
    Io(String, String),
    #[error("{0}")]
    Invalid(String),
}

/// Parses `key=value` lines, trimming whitespace and skipping blanks and
/// `#` comments. Returns `(line number, key, value)` triples.
pub fn parse_key_values(
    text: &str,
    file: &str,
) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::MalformedLine {
                file: file.to_owned(),
                line: i + 1,
            })?;
        out.push((i + 1, key.trim().to_owned(), value.trim().to_owned()));
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::InvalidValue {
        key: key.to_owned(),
        value: value.to_owned(),
    })
}

/// Fully resolved configuration of a game session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub game: GameConfig,
    pub recognition: RecognitionConfig,
    pub pipeline: PipelineConfig,
    pub default_language: String,
    pub rng_seed: Option<u64>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            game: GameConfig::default(),
            recognition: RecognitionConfig::default(),
            pipeline: PipelineConfig::default(),
            default_language: "pt_BR".into(),
            rng_seed: None,
        }
    }
}

impl Settings {
    /// Sets one general config key.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "boss_threshold" => self.game.boss_threshold = parse_value(key, value)?,
            "initial_respect" => self.game.initial_respect = parse_value(key, value)?,
            "boss_rounds_per_match" => self.game.boss_rounds_per_match = parse_value(key, value)?,
            "default_language" => {
                if value.is_empty() {
                    return Err(ConfigError::InvalidValue {
                        key: key.into(),
                        value: value.into(),
                    });
                }
                self.default_language = value.to_owned();
            }
            "rng_seed" => self.rng_seed = Some(parse_value(key, value)?),
            "scissors_ratio_max" => self.recognition.scissors_ratio_max = parse_value(key, value)?,
            "paper_extent_factor" => {
                self.recognition.paper_extent_factor = parse_value(key, value)?
            }
            "min_area" => self.recognition.min_area = parse_value(key, value)?,
            "smoothing_window" => self.recognition.smoothing_window = parse_value(key, value)?,
            "threshold_k" => self.pipeline.subtraction_k = parse_value(key, value)?,
            "edge_level" => self.pipeline.edge_level = parse_value(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_owned())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.game
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.recognition
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.pipeline.subtraction_k > MAX_SUBTRACTION_K {
            return Err(ConfigError::Invalid(format!(
                "threshold_k must be at most {MAX_SUBTRACTION_K}"
            )));
        }
        Ok(())
    }

    /// Parses the general config text on top of the defaults.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut settings = Settings::default();
        for (_, key, value) in parse_key_values(text, CONFIG_FILE_NAME)? {
            settings.apply(&key, &value)?;
        }
        settings.validate()?;
        Ok(settings)
    }

    /// Loads a general config file plus every `servo_<id>.conf` next to it.
    /// Without servant files the default five-servant roster is kept.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(path.display().to_string(), e.to_string()))?;
        let mut settings = Settings::default();
        for (_, key, value) in parse_key_values(&text, &path.display().to_string())? {
            settings.apply(&key, &value)?;
        }
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let roster = load_roster(dir)?;
        if !roster.is_empty() {
            settings.game.roster = roster;
        }
        settings.validate()?;
        Ok(settings)
    }
}

fn servant_id(path: &Path) -> Option<u32> {
    path.file_name()?
        .to_str()?
        .strip_prefix("servo_")?
        .strip_suffix(".conf")?
        .parse()
        .ok()
}

pub fn parse_servant(id: u32, text: &str, file: &str) -> Result<Servant, ConfigError> {
    let (mut awarded, mut removed, mut probability) = (None, None, None);
    let mut rounds = DEFAULT_ROUNDS_PER_MATCH;
    for (_, key, value) in parse_key_values(text, file)? {
        match key.as_str() {
            "points_awarded" => awarded = Some(parse_value(&key, &value)?),
            "points_removed" => removed = Some(parse_value(&key, &value)?),
            "probability" => probability = Some(parse_value(&key, &value)?),
            "rounds_per_match" => rounds = parse_value(&key, &value)?,
            _ => return Err(ConfigError::UnknownKey(key)),
        }
    }
    Ok(Servant {
        id,
        points_awarded: awarded.ok_or(ConfigError::MissingServantKey(
            file.into(),
            "points_awarded",
        ))?,
        points_removed: removed.ok_or(ConfigError::MissingServantKey(
            file.into(),
            "points_removed",
        ))?,
        probability: probability
            .ok_or(ConfigError::MissingServantKey(file.into(), "probability"))?,
        rounds_per_match: rounds,
    })
}

/// Servants from `servo_<id>.conf` files in `dir`, sorted by id.
pub fn load_roster(dir: &Path) -> Result<Vec<Servant>, ConfigError> {
    let entries = match fs::read_dir(dir) {
        Ok(entries) => entries,
        Err(e) => return Err(ConfigError::Io(dir.display().to_string(), e.to_string())),
    };
    let mut files: Vec<(u32, PathBuf)> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter_map(|p| servant_id(&p).map(|id| (id, p)))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|(id, path)| {
            let text = fs::read_to_string(&path)
                .map_err(|e| ConfigError::Io(path.display().to_string(), e.to_string()))?;
            parse_servant(id, &text, &path.display().to_string())
        })
        .collect()
}

/// Config file location: explicit path, then `$GESTURE_RPS_CONFIG`, then
/// `configuracao.conf` in the working directory if it exists.
pub fn resolve_config_path(explicit: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    if let Some(p) = std::env::var_os(CONFIG_ENV_VAR).filter(|v| !v.is_empty()) {
        return Some(PathBuf::from(p));
    }
    let local = PathBuf::from(CONFIG_FILE_NAME);
    local.is_file().then_some(local)
}
