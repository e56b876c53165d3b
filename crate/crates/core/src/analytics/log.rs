//! Append-only event log: one canonical JSON event per line, UTF-8.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::report::{self, OverviewReport, Period};
use super::{AnalyticsError, TelemetryEvent};
use crate::model::UserId;
use crate::session::TelemetrySink;

#[derive(Debug)]
struct Backing {
    path: PathBuf,
    file: File,
    durable: bool,
}

/// Telemetry store. Events are immutable once recorded; each one is
/// appended to the backing file (if any) before it becomes visible.
#[derive(Debug, Default)]
pub struct EventLog {
    events: Vec<TelemetryEvent>,
    by_id: HashMap<String, usize>,
    backing: Option<Backing>,
}

impl EventLog {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (or creates) a log file. A torn final line left by a crash is
    /// dropped and the file compacted; corruption anywhere else is an error.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, AnalyticsError> {
        let path = path.as_ref().to_path_buf();
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(e.into()),
        };

        let mut log = Self::default();
        let mut torn = false;
        let lines: Vec<&str> = text.split_inclusive('\n').collect();
        for (i, raw) in lines.iter().enumerate() {
            let line = raw.trim_end_matches(['\n', '\r']);
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<TelemetryEvent>(line) {
                Ok(ev) => log.insert(ev)?,
                Err(_) if i + 1 == lines.len() && !raw.ends_with('\n') => torn = true,
                Err(e) => {
                    return Err(AnalyticsError::StorageFailure(format!(
                        "{}:{}: {e}",
                        path.display(),
                        i + 1
                    )))
                }
            }
        }

        if torn {
            tracing::warn!(path = %path.display(), "dropping torn final line of event log");
        }
        let needs_rewrite = torn || (!text.is_empty() && !text.ends_with('\n'));
        log.backing = Some(Backing {
            file: open_append(&path)?,
            path,
            durable: true,
        });
        if needs_rewrite {
            log.compact()?;
        }
        Ok(log)
    }

    /// Skip fsync after each append. Suitable for tests and demos.
    pub fn without_fsync(mut self) -> Self {
        if let Some(b) = &mut self.backing {
            b.durable = false;
        }
        self
    }

    pub fn record_event(&mut self, event: TelemetryEvent) -> Result<String, AnalyticsError> {
        event.check()?;
        if self.by_id.contains_key(&event.event_id) {
            return Err(AnalyticsError::DuplicateEvent(event.event_id));
        }
        if let Some(b) = &mut self.backing {
            let mut line = serde_json::to_string(&event).map_err(|e| AnalyticsError::StorageFailure(e.to_string()))?;
            line.push('\n');
            b.file.write_all(line.as_bytes())?;
            if b.durable {
                b.file.sync_data()?;
            }
        }
        let id = event.event_id.clone();
        self.insert(event)?;
        Ok(id)
    }

    fn insert(&mut self, event: TelemetryEvent) -> Result<(), AnalyticsError> {
        if self.by_id.contains_key(&event.event_id) {
            return Err(AnalyticsError::DuplicateEvent(event.event_id));
        }
        self.by_id.insert(event.event_id.clone(), self.events.len());
        self.events.push(event);
        Ok(())
    }

    /// Rewrites the backing file from the in-memory events, atomically.
    pub fn compact(&mut self) -> Result<(), AnalyticsError> {
        let Some(b) = &mut self.backing else { return Ok(()) };
        let tmp = b.path.with_extension("compact.tmp");
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            for ev in &self.events {
                serde_json::to_writer(&mut w, ev).map_err(|e| AnalyticsError::StorageFailure(e.to_string()))?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
            w.get_ref().sync_all()?;
        }
        std::fs::rename(&tmp, &b.path)?;
        b.file = open_append(&b.path)?;
        Ok(())
    }

    pub fn get(&self, event_id: &str) -> Option<&TelemetryEvent> {
        self.by_id.get(event_id).map(|&i| &self.events[i])
    }

    /// All events in recording order.
    pub fn events(&self) -> &[TelemetryEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn overview(&self, user: &UserId, period: &Period) -> OverviewReport {
        report::overview(&self.events, user, period)
    }

    pub fn detail(&self, user: &UserId, session_id: &str) -> Result<Vec<TelemetryEvent>, AnalyticsError> {
        report::detail(&self.events, user, session_id)
    }

    /// Session detail without knowing the owner up front.
    pub fn session_events(&self, session_id: &str) -> Result<Vec<TelemetryEvent>, AnalyticsError> {
        let user = self
            .events
            .iter()
            .find(|e| e.session_id == session_id)
            .map(|e| e.user_id.clone())
            .ok_or_else(|| AnalyticsError::UnknownSession(session_id.to_string()))?;
        self.detail(&user, session_id)
    }
}

fn open_append(path: &Path) -> Result<File, AnalyticsError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(OpenOptions::new().create(true).append(true).open(path)?)
}

impl TelemetrySink for EventLog {
    fn record(&mut self, event: TelemetryEvent) -> Result<(), AnalyticsError> {
        self.record_event(event).map(|_| ())
    }
}
