use std::fmt::Write as _;
use std::str::FromStr;

use clap::Args;
use gesture_rps::config::Settings;
use gesture_rps::game::{self, Game, MatchVerdict, Opponent, Phase};
use gesture_rps::i18n::PhraseTable;
use gesture_rps::Gesture;

use crate::Failure;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Generator seed; falls back to `rng_seed` from the config, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// `always-win`, `always-lose`, or a comma-separated move list that is
    /// repeated as needed.
    #[arg(long, default_value = "always-win")]
    script: Script,
    /// Stop after this many rounds even if the game has not ended.
    #[arg(long, default_value_t = 1000)]
    max_rounds: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Script {
    AlwaysWin,
    AlwaysLose,
    Moves(Vec<Gesture>),
}

impl FromStr for Script {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "always-win" => Ok(Script::AlwaysWin),
            "always-lose" => Ok(Script::AlwaysLose),
            list => {
                let moves = list
                    .split(',')
                    .map(|m| match Gesture::parse(m) {
                        Some(g) if g != Gesture::Unknown => Ok(g),
                        _ => Err(format!("unknown move {m:?}")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Script::Moves(moves))
            }
        }
    }
}

impl Script {
    fn choose(&self, round: usize, opponent: Gesture) -> Gesture {
        match self {
            Script::AlwaysWin => game::counter_move(opponent),
            Script::AlwaysLose => game::losing_move(opponent),
            Script::Moves(moves) => moves[round % moves.len()],
        }
    }
}

fn phase_name(phase: Phase) -> String {
    serde_json::to_value(phase)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn opponent_line(opponent: &Opponent) -> String {
    match opponent {
        Opponent::Servant(s) => format!(
            "servant {} (+{} / -{}, {} rounds)",
            s.id, s.points_awarded, s.points_removed, s.rounds_per_match
        ),
        Opponent::Boss { rounds_per_match } => format!("boss ({rounds_per_match} rounds)"),
    }
}

/// Plays the script to a terminal phase and returns the transcript text.
pub fn transcript(
    settings: &Settings,
    seed: u64,
    script: &Script,
    max_rounds: u32,
    phrases: &PhraseTable,
) -> Result<String, Failure> {
    let mut game = Game::new(settings.game.clone(), seed).map_err(Failure::new)?;
    game.finish_calibration().map_err(Failure::new)?;
    let mut out = String::new();
    writeln!(out, "seed {seed}").unwrap();
    writeln!(out, "respect {}", game.state().respect).unwrap();

    let mut rounds = 0usize;
    let mut match_no = 0;
    let mut announced = false;
    while !game.state().phase.is_terminal() && rounds < max_rounds as usize {
        if game.state().phase == Phase::SelectingOpponent {
            game.start_match().map_err(Failure::new)?;
            announced = false;
        }
        if !announced {
            match_no += 1;
            let opponent = game.state().opponent.expect("a match is in progress");
            writeln!(out, "match {match_no}: {}", opponent_line(&opponent)).unwrap();
            announced = true;
        }
        let report = game
            .play_round_with(|opp| script.choose(rounds, opp))
            .map_err(Failure::new)?;
        rounds += 1;
        let r = report.record;
        writeln!(
            out,
            "  round {rounds}: {} vs {} -> {}",
            r.player,
            r.opponent,
            serde_json::to_value(r.outcome).unwrap().as_str().unwrap()
        )
        .unwrap();
        match report.verdict {
            MatchVerdict::Continue => {}
            MatchVerdict::Replay => writeln!(out, "  drawn match, replaying").unwrap(),
            v => {
                let result = if v == MatchVerdict::PlayerWon {
                    "won"
                } else {
                    "lost"
                };
                writeln!(
                    out,
                    "  {result}: respect {} -> {}, phase {}",
                    report.respect_before,
                    report.respect_after,
                    phase_name(report.phase_after)
                )
                .unwrap();
                announced = false;
            }
        }
    }
    let phase = game.state().phase;
    writeln!(
        out,
        "final {} respect {} rounds {rounds} ({})",
        phase_name(phase),
        game.state().respect,
        phrases.lookup(phase.phrase_key())
    )
    .unwrap();
    Ok(out)
}

pub fn simulate(
    args: &SimulateArgs,
    settings: &Settings,
    phrases: &PhraseTable,
) -> Result<(), Failure> {
    let seed = args.seed.or(settings.rng_seed).unwrap_or(0);
    print!(
        "{}",
        transcript(settings, seed, &args.script, args.max_rounds, phrases)?
    );
    Ok(())
}
