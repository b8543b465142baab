//! Match engine: round resolution, respect-point scoring and opponent choice.
//!
//! The player starts with a small amount of respect and duels servants
//! picked at random from a weighted roster. Winning a match awards the
//! servant's points, losing removes them. Reaching the boss threshold
//! unlocks the final match against the boss.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::recognition::Gesture;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("round is not playable: {0} is not a move")]
    RoundNotPlayable(Gesture),
    #[error("invalid game config: {0}")]
    ConfigInvalid(String),
    #[error("{action} is not allowed in phase {phase:?}")]
    IllegalTransition { action: &'static str, phase: Phase },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    PlayerWins,
    OpponentWins,
    Draw,
}

impl Outcome {
    pub fn phrase_key(self) -> &'static str {
        match self {
            Outcome::PlayerWins => "You win the round",
            Outcome::OpponentWins => "You lose the round",
            Outcome::Draw => "Draw",
        }
    }
}

fn beats(a: Gesture, b: Gesture) -> bool {
    matches!(
        (a, b),
        (Gesture::Rock, Gesture::Scissors)
            | (Gesture::Scissors, Gesture::Paper)
            | (Gesture::Paper, Gesture::Rock)
    )
}

pub fn resolve_round(player: Gesture, opponent: Gesture) -> Result<Outcome, GameError> {
    for g in [player, opponent] {
        if g == Gesture::Unknown {
            return Err(GameError::RoundNotPlayable(g));
        }
    }
    Ok(if player == opponent {
        Outcome::Draw
    } else if beats(player, opponent) {
        Outcome::PlayerWins
    } else {
        Outcome::OpponentWins
    })
}

/// The move that beats `g`.
pub fn counter_move(g: Gesture) -> Gesture {
    match g {
        Gesture::Rock => Gesture::Paper,
        Gesture::Paper => Gesture::Scissors,
        Gesture::Scissors => Gesture::Rock,
        Gesture::Unknown => Gesture::Unknown,
    }
}

/// The move that loses to `g`.
pub fn losing_move(g: Gesture) -> Gesture {
    counter_move(counter_move(g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Servant {
    pub id: u32,
    pub points_awarded: u32,
    pub points_removed: u32,
    /// Selection weight in percent.
    pub probability: u32,
    pub rounds_per_match: u32,
}

pub const DEFAULT_ROUNDS_PER_MATCH: u32 = 3;
pub const DEFAULT_BOSS_ROUNDS: u32 = 5;

/// The five-servant roster with 40/35/15/5/5 selection weights.
pub fn default_roster() -> Vec<Servant> {
    [
        (1, 1, 1, 40),
        (2, 3, 2, 35),
        (3, 2, 3, 15),
        (4, 0, 10, 5),
        (5, 2, 3, 5),
    ]
    .into_iter()
    .map(
        |(id, points_awarded, points_removed, probability)| Servant {
            id,
            points_awarded,
            points_removed,
            probability,
            rounds_per_match: DEFAULT_ROUNDS_PER_MATCH,
        },
    )
    .collect()
}

pub fn validate_roster(roster: &[Servant]) -> Result<(), GameError> {
    if roster.is_empty() {
        return Err(GameError::ConfigInvalid("servant roster is empty".into()));
    }
    let total: u32 = roster.iter().map(|s| s.probability).sum();
    if total != 100 {
        return Err(GameError::ConfigInvalid(format!(
            "servant probabilities sum to {total}, expected 100"
        )));
    }
    if let Some(s) = roster.iter().find(|s| s.rounds_per_match == 0) {
        return Err(GameError::ConfigInvalid(format!(
            "servant {} has zero rounds per match",
            s.id
        )));
    }
    Ok(())
}

/// Maps a uniform draw `u ∈ [0, 1)` onto the roster's cumulative weights.
pub fn servant_for_draw(roster: &[Servant], u: f64) -> Result<&Servant, GameError> {
    validate_roster(roster)?;
    let mut cumulative = 0;
    for s in roster {
        cumulative += s.probability;
        if u < cumulative as f64 / 100.0 {
            return Ok(s);
        }
    }
    // u rounding up against the final boundary
    Ok(roster.iter().rev().find(|s| s.probability > 0).unwrap())
}

pub fn pick_servant<'a, R: Rng + ?Sized>(
    roster: &'a [Servant],
    rng: &mut R,
) -> Result<&'a Servant, GameError> {
    validate_roster(roster)?;
    let u: f64 = rng.random();
    servant_for_draw(roster, u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Calibrating,
    SelectingOpponent,
    InMatch,
    BossMatch,
    Victory,
    Defeat,
}

impl Phase {
    pub fn phrase_key(self) -> &'static str {
        match self {
            Phase::Calibrating => "Show your fist to calibrate",
            Phase::SelectingOpponent => "Choose your next duel",
            Phase::InMatch => "Duel in progress",
            Phase::BossMatch => "Final duel against the boss",
            Phase::Victory => "You defeated the boss",
            Phase::Defeat => "You lost all your respect",
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, Phase::Victory | Phase::Defeat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Opponent {
    Servant(Servant),
    Boss { rounds_per_match: u32 },
}

impl Opponent {
    pub fn rounds_per_match(&self) -> u32 {
        match self {
            Opponent::Servant(s) => s.rounds_per_match,
            Opponent::Boss { rounds_per_match } => *rounds_per_match,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub player: Gesture,
    pub opponent: Gesture,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub boss_threshold: u32,
    pub initial_respect: u32,
    pub boss_rounds_per_match: u32,
    pub roster: Vec<Servant>,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            boss_threshold: 10,
            initial_respect: 1,
            boss_rounds_per_match: DEFAULT_BOSS_ROUNDS,
            roster: default_roster(),
        }
    }
}

impl GameConfig {
    pub fn validate(&self) -> Result<(), GameError> {
        if self.initial_respect == 0 || self.boss_threshold <= self.initial_respect {
            return Err(GameError::ConfigInvalid(format!(
                "need boss_threshold > initial_respect > 0, got {} and {}",
                self.boss_threshold, self.initial_respect
            )));
        }
        if self.boss_rounds_per_match == 0 {
            return Err(GameError::ConfigInvalid(
                "boss_rounds_per_match must be positive".into(),
            ));
        }
        validate_roster(&self.roster)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    pub respect: u32,
    pub phase: Phase,
    pub opponent: Option<Opponent>,
    pub round_wins: u32,
    pub round_losses: u32,
    pub round_draws: u32,
    pub history: Vec<RoundRecord>,
}

impl GameState {
    pub fn new(cfg: &GameConfig) -> Self {
        Self {
            respect: cfg.initial_respect,
            phase: Phase::Calibrating,
            opponent: None,
            round_wins: 0,
            round_losses: 0,
            round_draws: 0,
            history: Vec::new(),
        }
    }

    fn reset_rounds(&mut self) {
        self.round_wins = 0;
        self.round_losses = 0;
        self.round_draws = 0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchVerdict {
    Continue,
    PlayerWon,
    OpponentWon,
    /// Every round was played without a majority; the match is replayed.
    Replay,
}

/// Decides a match of `rounds_per_match` decisive rounds. Draws do not
/// count toward the round total.
pub fn match_over(state: &GameState, rounds_per_match: u32) -> MatchVerdict {
    if state.round_wins * 2 > rounds_per_match {
        MatchVerdict::PlayerWon
    } else if state.round_losses * 2 > rounds_per_match {
        MatchVerdict::OpponentWon
    } else if state.round_wins + state.round_losses >= rounds_per_match {
        MatchVerdict::Replay
    } else {
        MatchVerdict::Continue
    }
}

/// Scores a finished servant match.
pub fn apply_match_result(
    state: &GameState,
    won: bool,
    opponent: &Servant,
    cfg: &GameConfig,
) -> Result<GameState, GameError> {
    if state.phase != Phase::InMatch {
        return Err(GameError::IllegalTransition {
            action: "apply_match_result",
            phase: state.phase,
        });
    }
    let mut next = state.clone();
    next.respect = if won {
        state.respect + opponent.points_awarded
    } else {
        state.respect.saturating_sub(opponent.points_removed)
    };
    next.phase = if next.respect == 0 {
        Phase::Defeat
    } else if next.respect >= cfg.boss_threshold {
        Phase::BossMatch
    } else {
        Phase::SelectingOpponent
    };
    next.opponent = (next.phase == Phase::BossMatch).then_some(Opponent::Boss {
        rounds_per_match: cfg.boss_rounds_per_match,
    });
    next.reset_rounds();
    Ok(next)
}

/// Scores the boss match: winning ends the game, losing forfeits all respect.
pub fn apply_boss_result(state: &GameState, won: bool) -> Result<GameState, GameError> {
    if state.phase != Phase::BossMatch {
        return Err(GameError::IllegalTransition {
            action: "apply_boss_result",
            phase: state.phase,
        });
    }
    let mut next = state.clone();
    if won {
        next.phase = Phase::Victory;
    } else {
        next.respect = 0;
        next.phase = Phase::Defeat;
    }
    next.opponent = None;
    next.reset_rounds();
    Ok(next)
}

/// Everything that happened in one played round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundReport {
    pub record: RoundRecord,
    pub opponent: Opponent,
    pub verdict: MatchVerdict,
    pub respect_before: u32,
    pub respect_after: u32,
    pub phase_after: Phase,
}

/// A seeded game: config, state and the generator driving every random choice.
#[derive(Debug, Clone)]
pub struct Game {
    config: GameConfig,
    state: GameState,
    rng: ChaCha8Rng,
}

impl Game {
    pub fn new(config: GameConfig, seed: u64) -> Result<Self, GameError> {
        config.validate()?;
        let state = GameState::new(&config);
        Ok(Self {
            config,
            state,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    fn require(&self, action: &'static str, allowed: &[Phase]) -> Result<(), GameError> {
        if allowed.contains(&self.state.phase) {
            Ok(())
        } else {
            Err(GameError::IllegalTransition {
                action,
                phase: self.state.phase,
            })
        }
    }

    /// Leaves calibration. Recalibrating between matches is also allowed.
    pub fn finish_calibration(&mut self) -> Result<(), GameError> {
        self.require("calibrate", &[Phase::Calibrating, Phase::SelectingOpponent])?;
        self.state.phase = Phase::SelectingOpponent;
        Ok(())
    }

    pub fn start_match(&mut self) -> Result<Servant, GameError> {
        self.require("start_match", &[Phase::SelectingOpponent])?;
        let servant = *pick_servant(&self.config.roster, &mut self.rng)?;
        self.state.phase = Phase::InMatch;
        self.state.opponent = Some(Opponent::Servant(servant));
        self.state.reset_rounds();
        Ok(servant)
    }

    /// Uniform opponent move.
    pub fn draw_opponent_move(&mut self) -> Gesture {
        Gesture::PLAYABLE[self.rng.random_range(0..3)]
    }

    pub fn play_round(&mut self, player: Gesture) -> Result<RoundReport, GameError> {
        self.require("play_round", &[Phase::InMatch, Phase::BossMatch])?;
        if player == Gesture::Unknown {
            return Err(GameError::RoundNotPlayable(player));
        }
        self.play_round_with(|_| player)
    }

    /// Plays a round where the player's move may depend on the opponent's.
    pub fn play_round_with(
        &mut self,
        choose: impl FnOnce(Gesture) -> Gesture,
    ) -> Result<RoundReport, GameError> {
        self.require("play_round", &[Phase::InMatch, Phase::BossMatch])?;
        let opponent = self
            .state
            .opponent
            .expect("match phases always carry an opponent");
        let opponent_move = self.draw_opponent_move();
        let player = choose(opponent_move);
        let outcome = resolve_round(player, opponent_move)?;
        let record = RoundRecord {
            player,
            opponent: opponent_move,
            outcome,
        };
        self.state.history.push(record);
        match outcome {
            Outcome::PlayerWins => self.state.round_wins += 1,
            Outcome::OpponentWins => self.state.round_losses += 1,
            Outcome::Draw => self.state.round_draws += 1,
        }

        let respect_before = self.state.respect;
        let verdict = match_over(&self.state, opponent.rounds_per_match());
        match (verdict, opponent) {
            (MatchVerdict::Continue, _) => {}
            (MatchVerdict::Replay, _) => self.state.reset_rounds(),
            (v, Opponent::Servant(s)) => {
                self.state =
                    apply_match_result(&self.state, v == MatchVerdict::PlayerWon, &s, &self.config)?
            }
            (v, Opponent::Boss { .. }) => {
                self.state = apply_boss_result(&self.state, v == MatchVerdict::PlayerWon)?
            }
        }
        Ok(RoundReport {
            record,
            opponent,
            verdict,
            respect_before,
            respect_after: self.state.respect,
            phase_after: self.state.phase,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Gesture::*;

    fn state_in_match(respect: u32) -> GameState {
        GameState {
            respect,
            phase: Phase::InMatch,
            ..GameState::new(&GameConfig::default())
        }
    }

    fn servant(id: u32) -> Servant {
        default_roster()[id as usize - 1]
    }

    #[test]
    fn round_rules() {
        assert_eq!(resolve_round(Rock, Scissors), Ok(Outcome::PlayerWins));
        assert_eq!(resolve_round(Paper, Paper), Ok(Outcome::Draw));
        assert_eq!(resolve_round(Rock, Paper), Ok(Outcome::OpponentWins));
        assert_eq!(
            resolve_round(Unknown, Rock),
            Err(GameError::RoundNotPlayable(Unknown))
        );
    }

    #[test]
    fn round_table_matches_oracle() {
        // rows: player, cols: opponent; order rock, paper, scissors
        let oracle = [
            [Outcome::Draw, Outcome::OpponentWins, Outcome::PlayerWins],
            [Outcome::PlayerWins, Outcome::Draw, Outcome::OpponentWins],
            [Outcome::OpponentWins, Outcome::PlayerWins, Outcome::Draw],
        ];
        for (i, &p) in Gesture::PLAYABLE.iter().enumerate() {
            for (j, &o) in Gesture::PLAYABLE.iter().enumerate() {
                assert_eq!(resolve_round(p, o).unwrap(), oracle[i][j], "{p} vs {o}");
            }
        }
    }

    #[test]
    fn counter_moves() {
        for g in Gesture::PLAYABLE {
            assert_eq!(resolve_round(counter_move(g), g), Ok(Outcome::PlayerWins));
            assert_eq!(resolve_round(losing_move(g), g), Ok(Outcome::OpponentWins));
        }
    }

    #[test]
    fn cumulative_boundaries() {
        let roster = default_roster();
        let id = |u| servant_for_draw(&roster, u).unwrap().id;
        assert_eq!(id(0.0), 1);
        assert_eq!(id(0.39), 1);
        assert_eq!(id(0.41), 2);
        assert_eq!(id(0.74), 2);
        assert_eq!(id(0.76), 3);
        assert_eq!(id(0.91), 4);
        assert_eq!(id(0.96), 5);
        assert_eq!(id(0.999_999), 5);
    }

    #[test]
    fn single_servant_roster() {
        let only = vec![Servant {
            probability: 100,
            ..servant(3)
        }];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(pick_servant(&only, &mut rng).unwrap().id, 3);
        }
    }

    #[test]
    fn roster_weights_must_total_100() {
        let mut roster = default_roster();
        roster[0].probability = 39;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            pick_servant(&roster, &mut rng),
            Err(GameError::ConfigInvalid(_))
        ));
    }

    #[test]
    fn match_scoring() {
        let cfg = GameConfig::default();
        let s = apply_match_result(&state_in_match(9), true, &servant(2), &cfg).unwrap();
        assert_eq!((s.respect, s.phase), (12, Phase::BossMatch));
        assert!(matches!(
            s.opponent,
            Some(Opponent::Boss {
                rounds_per_match: 5
            })
        ));

        let s = apply_match_result(&state_in_match(1), false, &servant(4), &cfg).unwrap();
        assert_eq!((s.respect, s.phase), (0, Phase::Defeat));

        let s = apply_match_result(&state_in_match(5), false, &servant(1), &cfg).unwrap();
        assert_eq!((s.respect, s.phase), (4, Phase::SelectingOpponent));
    }

    #[test]
    fn match_result_needs_match_phase() {
        let cfg = GameConfig::default();
        let state = GameState::new(&cfg);
        assert_eq!(
            apply_match_result(&state, true, &servant(1), &cfg),
            Err(GameError::IllegalTransition {
                action: "apply_match_result",
                phase: Phase::Calibrating
            })
        );
    }

    #[test]
    fn majority_verdicts() {
        let mut s = state_in_match(1);
        s.round_wins = 2;
        assert_eq!(match_over(&s, 3), MatchVerdict::PlayerWon);
        s.round_wins = 0;
        s.round_losses = 2;
        assert_eq!(match_over(&s, 3), MatchVerdict::OpponentWon);
        s.round_losses = 1;
        s.round_draws = 4;
        assert_eq!(match_over(&s, 3), MatchVerdict::Continue);
        s.round_wins = 2;
        s.round_losses = 2;
        assert_eq!(match_over(&s, 4), MatchVerdict::Replay);
    }

    #[test]
    fn win_loss_win_sequence() {
        let mut s = state_in_match(1);
        let mut verdicts = vec![];
        for outcome in [
            Outcome::PlayerWins,
            Outcome::OpponentWins,
            Outcome::PlayerWins,
        ] {
            match outcome {
                Outcome::PlayerWins => s.round_wins += 1,
                _ => s.round_losses += 1,
            }
            verdicts.push(match_over(&s, 3));
        }
        assert_eq!(
            verdicts,
            [
                MatchVerdict::Continue,
                MatchVerdict::Continue,
                MatchVerdict::PlayerWon
            ]
        );
        assert_eq!((s.round_wins, s.round_losses), (2, 1));
    }

    #[test]
    fn engine_phases() {
        let mut game = Game::new(GameConfig::default(), 7).unwrap();
        assert_eq!(game.state().respect, 1);
        assert!(matches!(
            game.start_match(),
            Err(GameError::IllegalTransition {
                phase: Phase::Calibrating,
                ..
            })
        ));
        game.finish_calibration().unwrap();
        game.start_match().unwrap();
        assert_eq!(game.state().phase, Phase::InMatch);
        assert_eq!(
            game.play_round(Unknown),
            Err(GameError::RoundNotPlayable(Unknown))
        );
        let report = game.play_round_with(counter_move).unwrap();
        assert_eq!(report.record.outcome, Outcome::PlayerWins);
    }

    #[test]
    fn boss_outcomes() {
        let mut s = state_in_match(10);
        s.phase = Phase::BossMatch;
        assert_eq!(apply_boss_result(&s, true).unwrap().phase, Phase::Victory);
        let lost = apply_boss_result(&s, false).unwrap();
        assert_eq!((lost.phase, lost.respect), (Phase::Defeat, 0));
    }

    #[test]
    fn config_validation() {
        assert!(GameConfig::default().validate().is_ok());
        let cfg = GameConfig {
            boss_threshold: 1,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = GameConfig {
            initial_respect: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
