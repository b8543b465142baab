//! Gesture classification from hull features.
//!
//! Scissors leave gaps inside their hull, so the white/total area ratio
//! separates them. Rock and paper both fill their hull; they are told apart
//! by comparing the hull extent with the extent recorded for rock at
//! calibration time.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::HullFeatures;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecognitionError {
    #[error("calibration rejected: hull area {area} is below the minimum {min_area}")]
    CalibrationRejected { area: f64, min_area: f64 },
    #[error("no valid calibration")]
    NotCalibrated,
    #[error("invalid recognition config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gesture {
    Rock,
    Paper,
    Scissors,
    Unknown,
}

impl Gesture {
    pub const PLAYABLE: [Gesture; 3] = [Gesture::Rock, Gesture::Paper, Gesture::Scissors];

    pub fn as_str(self) -> &'static str {
        match self {
            Gesture::Rock => "rock",
            Gesture::Paper => "paper",
            Gesture::Scissors => "scissors",
            Gesture::Unknown => "unknown",
        }
    }

    /// English display key used for phrase lookups.
    pub fn phrase_key(self) -> &'static str {
        match self {
            Gesture::Rock => "Rock",
            Gesture::Paper => "Paper",
            Gesture::Scissors => "Scissors",
            Gesture::Unknown => "No gesture detected",
        }
    }

    pub fn parse(s: &str) -> Option<Gesture> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rock" | "r" => Some(Gesture::Rock),
            "paper" | "p" => Some(Gesture::Paper),
            "scissors" | "s" => Some(Gesture::Scissors),
            "unknown" | "u" => Some(Gesture::Unknown),
            _ => None,
        }
    }
}

impl fmt::Display for Gesture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecognitionConfig {
    pub scissors_ratio_max: f64,
    pub paper_extent_factor: f64,
    pub min_area: f64,
    pub smoothing_window: usize,
}

impl Default for RecognitionConfig {
    fn default() -> Self {
        Self {
            scissors_ratio_max: 0.80,
            paper_extent_factor: 1.25,
            min_area: 500.0,
            smoothing_window: 5,
        }
    }
}

impl RecognitionConfig {
    pub fn validate(&self) -> Result<(), RecognitionError> {
        if !(self.scissors_ratio_max > 0.0 && self.scissors_ratio_max < 1.0) {
            return Err(RecognitionError::InvalidConfig(format!(
                "scissors_ratio_max must be in (0, 1), got {}",
                self.scissors_ratio_max
            )));
        }
        if !self.paper_extent_factor.is_finite() || self.paper_extent_factor <= 1.0 {
            return Err(RecognitionError::InvalidConfig(format!(
                "paper_extent_factor must be > 1, got {}",
                self.paper_extent_factor
            )));
        }
        if !self.min_area.is_finite() || self.min_area < 0.0 {
            return Err(RecognitionError::InvalidConfig(format!(
                "min_area must be >= 0, got {}",
                self.min_area
            )));
        }
        if self.smoothing_window == 0 {
            return Err(RecognitionError::InvalidConfig(
                "smoothing_window must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Rock extent captured while the player held a fist.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Calibration {
    pub rock_extent: f64,
    pub captured_at: u64,
    pub valid: bool,
}

/// Which branch of the decision table produced a label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionRule {
    BelowMinArea,
    RatioBelowScissorsMax,
    ExtentAboveRock,
    ExtentWithinRock,
    NotCalibrated,
    NoMajority,
    Majority,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GestureReading {
    pub label: Gesture,
    pub features: HullFeatures,
    pub rule: DecisionRule,
}

impl GestureReading {
    pub fn unknown(features: HullFeatures, rule: DecisionRule) -> Self {
        Self {
            label: Gesture::Unknown,
            features,
            rule,
        }
    }
}

pub fn calibrate(
    features: &HullFeatures,
    cfg: &RecognitionConfig,
    captured_at: u64,
) -> Result<Calibration, RecognitionError> {
    if features.total_area < cfg.min_area || features.extent <= 0.0 {
        return Err(RecognitionError::CalibrationRejected {
            area: features.total_area,
            min_area: cfg.min_area,
        });
    }
    Ok(Calibration {
        rock_extent: features.extent,
        captured_at,
        valid: true,
    })
}

pub fn classify(
    features: &HullFeatures,
    calib: &Calibration,
    cfg: &RecognitionConfig,
) -> Result<GestureReading, RecognitionError> {
    if !calib.valid {
        return Err(RecognitionError::NotCalibrated);
    }
    let (label, rule) = if features.total_area < cfg.min_area {
        (Gesture::Unknown, DecisionRule::BelowMinArea)
    } else if features.ratio < cfg.scissors_ratio_max {
        (Gesture::Scissors, DecisionRule::RatioBelowScissorsMax)
    } else if features.extent > cfg.paper_extent_factor * calib.rock_extent {
        (Gesture::Paper, DecisionRule::ExtentAboveRock)
    } else {
        (Gesture::Rock, DecisionRule::ExtentWithinRock)
    };
    Ok(GestureReading {
        label,
        features: *features,
        rule,
    })
}

/// Majority vote over a window of readings. A label wins only when it
/// covers more than half of the readings; otherwise the result is Unknown.
/// The winning reading carries the features of its most recent occurrence.
pub fn smooth(readings: &[GestureReading]) -> GestureReading {
    let Some(last) = readings.last() else {
        return GestureReading::unknown(HullFeatures::default(), DecisionRule::NoMajority);
    };
    for label in Gesture::PLAYABLE {
        let votes = readings.iter().filter(|r| r.label == label).count();
        if votes * 2 > readings.len() {
            let latest = readings.iter().rev().find(|r| r.label == label).unwrap();
            return GestureReading {
                label,
                features: latest.features,
                rule: DecisionRule::Majority,
            };
        }
    }
    GestureReading::unknown(last.features, DecisionRule::NoMajority)
}

/// Sliding window over the most recent readings.
#[derive(Debug, Clone)]
pub struct Smoother {
    window: usize,
    readings: VecDeque<GestureReading>,
}

impl Smoother {
    pub fn new(window: usize) -> Self {
        Self {
            window: window.max(1),
            readings: VecDeque::with_capacity(window.max(1)),
        }
    }

    pub fn push(&mut self, reading: GestureReading) -> GestureReading {
        if self.readings.len() == self.window {
            self.readings.pop_front();
        }
        self.readings.push_back(reading);
        if self.window == 1 {
            return reading;
        }
        smooth(self.readings.make_contiguous())
    }

    pub fn clear(&mut self) {
        self.readings.clear();
    }
}
