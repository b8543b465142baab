//! One player's game session: frames in, gesture readings and game state out.
//!
//! A session is a deterministic state machine over an ordered stream of
//! events (frames, commands and countdown ticks). Replaying the same events
//! into a session created with the same options reproduces every output.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, Settings};
use crate::game::{Game, GameError, Opponent, Phase, RoundRecord, RoundReport};
use crate::geometry::{HullFeatures, Point};
use crate::i18n::{self, I18nError, PhraseTable};
use crate::imaging::{Frame, ImagingError};
use crate::pipeline;
use crate::recognition::{
    self, Calibration, DecisionRule, Gesture, GestureReading, RecognitionError, Smoother,
};

/// Countdown ticks between `next_round` and the reveal.
pub const COUNTDOWN_TICKS: u8 = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SessionError {
    #[error("no background frame has been captured")]
    BackgroundMissing,
    #[error("frame is {got_width}x{got_height}, session frames are {width}x{height}")]
    DimensionMismatch {
        width: usize,
        height: usize,
        got_width: usize,
        got_height: usize,
    },
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Recognition(#[from] RecognitionError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    I18n(#[from] I18nError),
}

impl SessionError {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::BackgroundMissing => "background_missing",
            SessionError::DimensionMismatch { .. } => "dimension_mismatch",
            SessionError::Imaging(_) => "imaging",
            SessionError::Recognition(RecognitionError::CalibrationRejected { .. }) => {
                "calibration_rejected"
            }
            SessionError::Recognition(RecognitionError::NotCalibrated) => "not_calibrated",
            SessionError::Recognition(RecognitionError::InvalidConfig(_)) => "config_invalid",
            SessionError::Game(GameError::IllegalTransition { .. }) => "illegal_transition",
            SessionError::Game(GameError::RoundNotPlayable(_)) => "round_not_playable",
            SessionError::Game(GameError::ConfigInvalid(_)) => "config_invalid",
            SessionError::Config(_) => "config_invalid",
            SessionError::I18n(_) => "locale_invalid",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionOptions {
    pub locale: Option<String>,
    pub seed: Option<u64>,
    /// General config keys applied on top of the base settings.
    pub config: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameRole {
    Background,
    Live,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "cmd", content = "arg", rename_all = "snake_case")]
pub enum Command {
    Calibrate,
    StartMatch,
    NextRound,
    SetLanguage(String),
    GetState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameResult {
    pub frame_index: u64,
    pub role: FrameRole,
    /// Smoothed reading.
    pub gesture: GestureReading,
    /// Single-frame label before smoothing.
    pub raw_label: Gesture,
    /// Hull vertices in march order, for the debug overlay.
    pub hull: Vec<Point>,
    pub otsu_level: Option<u8>,
    pub phase: Phase,
    pub countdown: Option<u8>,
    pub texts: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSnapshot {
    pub session_id: String,
    pub phase: Phase,
    pub respect: u32,
    pub boss_threshold: u32,
    pub opponent: Option<Opponent>,
    pub round_wins: u32,
    pub round_losses: u32,
    pub round_draws: u32,
    pub history: Vec<RoundRecord>,
    pub calibration: Calibration,
    pub countdown: Option<u8>,
    pub last_round: Option<RoundReport>,
    pub locale: String,
    pub texts: BTreeMap<String, String>,
}

/// An input to a session's ordered event stream.
#[derive(Debug, Clone, PartialEq)]
pub enum SessionEvent {
    Frame(FrameRole, Frame),
    Command(Command),
    Tick,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SessionOutput {
    Frame(FrameResult),
    State(GameSnapshot),
    Error { code: String, message: String },
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    settings: Settings,
    seed: u64,
    locale_dir: Option<PathBuf>,
    phrases: PhraseTable,
    dims: Option<(usize, usize)>,
    background: Option<Frame>,
    calibration: Calibration,
    game: Game,
    smoother: Smoother,
    frame_index: u64,
    last_features: Option<HullFeatures>,
    current: GestureReading,
    countdown: Option<u8>,
    last_round: Option<RoundReport>,
    notice: Option<&'static str>,
}

impl Session {
    /// Creates a session in the calibrating phase. `base` supplies the
    /// configuration that `options.config` overrides.
    pub fn new(
        id: impl Into<String>,
        base: &Settings,
        options: &SessionOptions,
        locale_dir: Option<PathBuf>,
    ) -> Result<Self, SessionError> {
        let mut settings = base.clone();
        for (key, value) in &options.config {
            settings.apply(key, value)?;
        }
        settings.validate()?;
        let seed = options
            .seed
            .or(settings.rng_seed)
            .unwrap_or_else(rand::random);
        let locale = options
            .locale
            .clone()
            .unwrap_or_else(|| settings.default_language.clone());
        let phrases = i18n::resolve_locale(locale_dir.as_deref(), &locale)?;
        let game = Game::new(settings.game.clone(), seed)?;
        let smoother = Smoother::new(settings.recognition.smoothing_window);
        Ok(Self {
            id: id.into(),
            settings,
            seed,
            locale_dir,
            phrases,
            dims: None,
            background: None,
            calibration: Calibration::default(),
            game,
            smoother,
            frame_index: 0,
            last_features: None,
            current: GestureReading::unknown(HullFeatures::default(), DecisionRule::NoMajority),
            countdown: None,
            last_round: None,
            notice: None,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    pub fn calibration(&self) -> &Calibration {
        &self.calibration
    }

    pub fn phase(&self) -> Phase {
        self.game.state().phase
    }

    pub fn countdown(&self) -> Option<u8> {
        self.countdown
    }

    fn text(&self, key: &str) -> String {
        self.phrases.lookup(key).to_owned()
    }

    fn check_dims(&mut self, frame: &Frame) -> Result<(), SessionError> {
        match self.dims {
            None => {
                self.dims = Some((frame.width(), frame.height()));
                Ok(())
            }
            Some((width, height)) if (width, height) != (frame.width(), frame.height()) => {
                Err(SessionError::DimensionMismatch {
                    width,
                    height,
                    got_width: frame.width(),
                    got_height: frame.height(),
                })
            }
            Some(_) => Ok(()),
        }
    }

    pub fn submit_frame(
        &mut self,
        frame: Frame,
        role: FrameRole,
    ) -> Result<FrameResult, SessionError> {
        if role == FrameRole::Live && self.background.is_none() {
            return Err(SessionError::BackgroundMissing);
        }
        self.check_dims(&frame)?;
        let frame_index = self.frame_index;
        self.frame_index += 1;

        if role == FrameRole::Background {
            self.background = Some(frame);
            self.smoother.clear();
            self.last_features = None;
            self.current =
                GestureReading::unknown(HullFeatures::default(), DecisionRule::NoMajority);
            self.notice = Some("Background captured");
            return Ok(self.frame_result(frame_index, role, Gesture::Unknown, Vec::new(), None));
        }

        let background = self.background.as_ref().expect("checked above");
        let out = pipeline::process_frame(background, &frame, &self.settings.pipeline)?;
        let raw = if self.calibration.valid {
            recognition::classify(&out.features, &self.calibration, &self.settings.recognition)?
        } else {
            GestureReading::unknown(out.features, DecisionRule::NotCalibrated)
        };
        self.last_features = Some(out.features);
        self.current = self.smoother.push(raw);
        let hull = out.hull.map(|h| h.vertices).unwrap_or_default();
        Ok(self.frame_result(frame_index, role, raw.label, hull, Some(out.otsu_level)))
    }

    fn frame_result(
        &self,
        frame_index: u64,
        role: FrameRole,
        raw_label: Gesture,
        hull: Vec<Point>,
        otsu_level: Option<u8>,
    ) -> FrameResult {
        let mut texts = BTreeMap::new();
        texts.insert("gesture".into(), self.text(self.current.label.phrase_key()));
        texts.insert("phase".into(), self.text(self.phase().phrase_key()));
        if let Some(notice) = self.notice {
            texts.insert("notice".into(), self.text(notice));
        }
        if self.countdown.is_some() {
            texts.insert("countdown".into(), self.text("Get ready"));
        }
        FrameResult {
            frame_index,
            role,
            gesture: self.current,
            raw_label,
            hull,
            otsu_level,
            phase: self.phase(),
            countdown: self.countdown,
            texts,
        }
    }

    pub fn command(&mut self, cmd: Command) -> Result<GameSnapshot, SessionError> {
        match cmd {
            Command::Calibrate => {
                let phase = self.phase();
                if !matches!(phase, Phase::Calibrating | Phase::SelectingOpponent) {
                    return Err(GameError::IllegalTransition {
                        action: "calibrate",
                        phase,
                    }
                    .into());
                }
                let features = self.last_features.unwrap_or_default();
                let calibration = recognition::calibrate(
                    &features,
                    &self.settings.recognition,
                    self.frame_index.saturating_sub(1),
                )
                .inspect_err(|_| self.notice = Some("Calibration rejected"))?;
                self.game.finish_calibration()?;
                self.calibration = calibration;
                self.smoother.clear();
                self.notice = Some("Calibration saved");
            }
            Command::StartMatch => {
                self.game.start_match()?;
                self.last_round = None;
                self.notice = Some("Duel in progress");
            }
            Command::NextRound => {
                let phase = self.phase();
                if !matches!(phase, Phase::InMatch | Phase::BossMatch) || self.countdown.is_some() {
                    return Err(GameError::IllegalTransition {
                        action: "next_round",
                        phase,
                    }
                    .into());
                }
                self.countdown = Some(COUNTDOWN_TICKS);
                self.notice = Some("Get ready");
            }
            Command::SetLanguage(tag) => {
                self.phrases = i18n::resolve_locale(self.locale_dir.as_deref(), &tag)?;
            }
            Command::GetState => {}
        }
        Ok(self.snapshot())
    }

    /// Advances the countdown by one tick. At zero the smoothed reading
    /// becomes the player's move; an Unknown reading voids the round.
    pub fn tick(&mut self) -> Result<GameSnapshot, SessionError> {
        let Some(remaining) = self.countdown else {
            return Ok(self.snapshot());
        };
        let remaining = remaining.saturating_sub(1);
        if remaining > 0 {
            self.countdown = Some(remaining);
            return Ok(self.snapshot());
        }
        self.countdown = None;
        match self.game.play_round(self.current.label) {
            Ok(report) => {
                self.notice = Some(match report.verdict {
                    crate::game::MatchVerdict::Continue => report.record.outcome.phrase_key(),
                    crate::game::MatchVerdict::PlayerWon => "Match won",
                    crate::game::MatchVerdict::OpponentWon => "Match lost",
                    crate::game::MatchVerdict::Replay => "Match drawn, replaying",
                });
                self.last_round = Some(report);
            }
            Err(GameError::RoundNotPlayable(_)) => {
                self.notice = Some(Gesture::Unknown.phrase_key());
                self.last_round = None;
            }
            Err(e) => return Err(e.into()),
        }
        Ok(self.snapshot())
    }

    pub fn snapshot(&self) -> GameSnapshot {
        let state = self.game.state();
        let mut texts = BTreeMap::new();
        texts.insert("phase".into(), self.text(state.phase.phrase_key()));
        texts.insert("respect".into(), self.text("Respect"));
        if let Some(notice) = self.notice {
            texts.insert("notice".into(), self.text(notice));
        }
        if let Some(opponent) = &state.opponent {
            let key = match opponent {
                Opponent::Servant(_) => "Servant",
                Opponent::Boss { .. } => "Boss",
            };
            texts.insert("opponent".into(), self.text(key));
        }
        if let Some(report) = &self.last_round {
            texts.insert(
                "player_move".into(),
                self.text(report.record.player.phrase_key()),
            );
            texts.insert(
                "opponent_move".into(),
                self.text(report.record.opponent.phrase_key()),
            );
            texts.insert(
                "outcome".into(),
                self.text(report.record.outcome.phrase_key()),
            );
        }
        GameSnapshot {
            session_id: self.id.clone(),
            phase: state.phase,
            respect: state.respect,
            boss_threshold: self.settings.game.boss_threshold,
            opponent: state.opponent,
            round_wins: state.round_wins,
            round_losses: state.round_losses,
            round_draws: state.round_draws,
            history: state.history.clone(),
            calibration: self.calibration,
            countdown: self.countdown,
            last_round: self.last_round.clone(),
            locale: self.phrases.locale().to_owned(),
            texts,
        }
    }

    /// Applies one event; errors become an `Error` output.
    pub fn handle(&mut self, event: SessionEvent) -> SessionOutput {
        let result = match event {
            SessionEvent::Frame(role, frame) => {
                self.submit_frame(frame, role).map(SessionOutput::Frame)
            }
            SessionEvent::Command(cmd) => self.command(cmd).map(SessionOutput::State),
            SessionEvent::Tick => self.tick().map(SessionOutput::State),
        };
        result.unwrap_or_else(|e| SessionOutput::Error {
            code: e.code().to_owned(),
            message: e.to_string(),
        })
    }
}
