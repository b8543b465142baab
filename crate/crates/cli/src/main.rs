//! Offline harness for the gesture pipeline and the game rules.

mod run;
mod simulate;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gesture_rps::config::{self, Settings};
use gesture_rps::i18n::{self, PhraseTable};

#[derive(Debug, Parser)]
#[command(name = "gesture-rps", version, about)]
struct Cli {
    /// General configuration file. Servant files are read from its directory.
    #[arg(long, global = true, env = config::CONFIG_ENV_VAR)]
    config: Option<PathBuf>,
    /// Locale for user-visible text; defaults to the configured language.
    #[arg(long, global = true)]
    lang: Option<String>,
    #[command(subcommand)]
    command: Action,
}

#[derive(Debug, Subcommand)]
enum Action {
    /// Run pipeline stages on an image and write each intermediate.
    Run(run::RunArgs),
    /// Play a scripted game headlessly and print the transcript.
    Simulate(simulate::SimulateArgs),
}

/// A failure reported on stderr with exit status 2.
#[derive(Debug)]
pub struct Failure(String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Failure {
    pub fn new(msg: impl fmt::Display) -> Self {
        Self(msg.to_string())
    }
}

fn load_settings(explicit: Option<&Path>) -> Result<Settings, Failure> {
    match config::resolve_config_path(explicit) {
        Some(path) => Settings::load(&path).map_err(Failure::new),
        None => Ok(Settings::default()),
    }
}

fn load_phrases(settings: &Settings, lang: Option<&str>) -> Result<PhraseTable, Failure> {
    let tag = lang.unwrap_or(&settings.default_language);
    i18n::resolve_locale(None, tag).map_err(Failure::new)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_settings(cli.config.as_deref()).and_then(|settings| {
        let phrases = load_phrases(&settings, cli.lang.as_deref())?;
        match cli.command {
            Action::Run(args) => run::run(&args, &settings, &phrases),
            Action::Simulate(args) => simulate::simulate(&args, &settings, &phrases),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
