use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use gesture_rps::config::{self, Settings};
use gesture_rps_service::{router, AppState, ServiceConfig};
use tracing_subscriber::EnvFilter;

/// Serves gesture rock-paper-scissors sessions over HTTP and WebSocket.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[arg(long, env = "GESTURE_RPS_BIND", default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// General configuration file; servant files are read from its directory.
    #[arg(long, env = config::CONFIG_ENV_VAR)]
    config: Option<PathBuf>,
    /// Directory holding `<locale>.conf` phrase files. Built-in locales are
    /// used when unset.
    #[arg(long)]
    locale_dir: Option<PathBuf>,
    /// Milliseconds between countdown ticks.
    #[arg(long, default_value_t = 1000)]
    tick_ms: u64,
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();
    let args = Args::parse();

    let settings = match config::resolve_config_path(args.config.as_deref()) {
        Some(path) => match Settings::load(&path) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => Settings::default(),
    };
    let state = AppState::new(ServiceConfig {
        settings,
        locale_dir: args.locale_dir,
        tick_interval: Duration::from_millis(args.tick_ms),
        ..ServiceConfig::default()
    });

    let listener = match tokio::net::TcpListener::bind(args.bind).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot bind {}: {e}", args.bind);
            return ExitCode::from(2);
        }
    };
    tracing::info!(addr = %args.bind, "listening");
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    match axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
    {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
