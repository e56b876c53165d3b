use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use sereni_core::events::EventsProvider;
use sereni_core::GameType;
use sereni_server::state::events_provider;
use sereni_server::{openapi, play, router, AppState, ServiceConfig};
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "sereni", version, about = "Biography-based cognitive training")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "SERENI_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "SERENI_BIND", default_value = "127.0.0.1")]
        bind: IpAddr,
        #[arg(long, env = "SERENI_DATA_DIR", default_value = "sereni-data")]
        data_dir: PathBuf,
        /// Base URL of an external historical-events service.
        #[arg(long, env = "SERENI_EVENTS_URL")]
        events_url: Option<String>,
        /// Seconds before an events request gives up.
        #[arg(long, env = "SERENI_REQUEST_TIMEOUT", default_value_t = 5)]
        request_timeout: u64,
    },
    /// Play a session in the terminal.
    Play {
        #[arg(long, env = "SERENI_DATA_DIR", default_value = "sereni-data")]
        data_dir: PathBuf,
        /// Display name of the player.
        #[arg(long)]
        name: String,
        /// Restrict the session to one game type, e.g. MemoryCompletion.
        #[arg(long)]
        game: Option<GameType>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "SERENI_EVENTS_URL")]
        events_url: Option<String>,
    },
    /// Print the OpenAPI document.
    Openapi,
    /// Print the historical events of a year.
    Events {
        #[arg(long)]
        year: i32,
        #[arg(long, env = "SERENI_EVENTS_URL")]
        events_url: Option<String>,
        #[arg(long, env = "SERENI_REQUEST_TIMEOUT", default_value_t = 5)]
        request_timeout: u64,
    },
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<(), Box<dyn std::error::Error>> {
    match command {
        Command::Serve {
            port,
            bind,
            data_dir,
            events_url,
            request_timeout,
        } => {
            let state = AppState::open(&ServiceConfig {
                data_dir,
                events_url,
                request_timeout: Duration::from_secs(request_timeout),
            })?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::bind(SocketAddr::new(bind, port)).await?;
                tracing::info!(addr = %listener.local_addr()?, "listening");
                axum::serve(listener, router(state))
                    .with_graceful_shutdown(async {
                        let _ = tokio::signal::ctrl_c().await;
                    })
                    .await
            })?;
        }
        Command::Play {
            data_dir,
            name,
            game,
            seed,
            events_url,
        } => {
            let events = events_provider(events_url.as_deref(), Duration::from_secs(5));
            let seed = seed.unwrap_or_else(|| uuid::Uuid::new_v4().as_u64_pair().0);
            let record = play::play(
                &data_dir,
                &name,
                game,
                seed,
                &events,
                std::io::stdin().lock(),
                std::io::stdout(),
            )?;
            println!(
                "Session {} finished: {} of {} exercises, completion {:.0}%.",
                record.session_id,
                record.outcomes.len(),
                record.planned,
                record.completion_level * 100.0
            );
        }
        Command::Openapi => println!("{}", serde_json::to_string_pretty(&openapi::document())?),
        Command::Events {
            year,
            events_url,
            request_timeout,
        } => {
            let events = events_provider(events_url.as_deref(), Duration::from_secs(request_timeout));
            for e in events.events_for_year(year)? {
                println!("{}: {}", e.year, e.event_text);
            }
        }
    }
    Ok(())
}
