use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::Duration;

use chrono::{DateTime, Utc};
use sereni_core::analytics::{EventLog, TelemetryEvent};
use sereni_core::events::{ChainedEvents, EventsProvider, FallbackEvents};
use sereni_core::session::{ActiveSession, SessionPlan, SessionRecord, SessionRegistry};

use crate::http_events::HttpEvents;
use crate::store::Store;

pub type SharedEvents = Arc<dyn EventsProvider + Send + Sync>;

/// A session being played over HTTP.
pub struct LiveSession {
    pub plan: SessionPlan,
    pub record: SessionRecord,
    pub next: usize,
    pub presented_at: DateTime<Utc>,
    pub _slot: ActiveSession,
}

pub struct AppState {
    store: Mutex<Store>,
    log: Mutex<EventLog>,
    live: Mutex<HashMap<String, LiveSession>>,
    pub registry: Arc<SessionRegistry>,
    pub events: SharedEvents,
    pub media_dir: PathBuf,
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    pub events_url: Option<String>,
    pub request_timeout: Duration,
}

#[derive(Debug, thiserror::Error)]
pub enum OpenError {
    #[error(transparent)]
    Store(#[from] crate::store::StoreError),
    #[error(transparent)]
    Log(#[from] sereni_core::analytics::AnalyticsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The external events source (if any) backed by the bundled dataset.
pub fn events_provider(url: Option<&str>, timeout: Duration) -> ChainedEvents<HttpEvents> {
    ChainedEvents::new(url.map(|u| HttpEvents::new(u, timeout)), FallbackEvents::bundled())
}

impl AppState {
    /// Opens the journals under `data_dir`, creating it when missing.
    pub fn open(cfg: &ServiceConfig) -> Result<Arc<Self>, OpenError> {
        let dir = &cfg.data_dir;
        std::fs::create_dir_all(dir)?;
        let events = events_provider(cfg.events_url.as_deref(), cfg.request_timeout);
        Ok(Self::new(
            Store::open(dir.join("store.ndjson"))?,
            EventLog::open(dir.join("events.ndjson"))?,
            dir.join("media"),
            Arc::new(events),
        ))
    }

    pub fn new(store: Store, log: EventLog, media_dir: impl AsRef<Path>, events: SharedEvents) -> Arc<Self> {
        Arc::new(Self {
            store: Mutex::new(store),
            log: Mutex::new(log),
            live: Mutex::new(HashMap::new()),
            registry: SessionRegistry::new(),
            events,
            media_dir: media_dir.as_ref().to_path_buf(),
        })
    }

    pub fn store(&self) -> MutexGuard<'_, Store> {
        self.store.lock().expect("store lock poisoned")
    }

    pub fn log(&self) -> MutexGuard<'_, EventLog> {
        self.log.lock().expect("event log lock poisoned")
    }

    pub fn live(&self) -> MutexGuard<'_, HashMap<String, LiveSession>> {
        self.live.lock().expect("session table lock poisoned")
    }

    pub fn record_telemetry(&self, event: TelemetryEvent) {
        if let Err(e) = self.log().record_event(event) {
            tracing::warn!(error = %e, "telemetry event dropped");
        }
    }
}
