//! Historical events by calendar year.
//!
//! Exercises about "what happened in the same year" draw their options from an
//! [`EventsProvider`]. The crate ships a curated offline dataset covering
//! 1900-2000 so the system works without network access; an external source
//! can be chained in front of it with [`ChainedEvents`].

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Bundled dataset, also available on disk under `crates/core/data/`.
pub const BUNDLED_EVENTS_JSON: &str = include_str!("../data/historical_events.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoricalEvent {
    pub year: i32,
    pub event_text: String,
}

#[derive(Debug, thiserror::Error)]
pub enum EventsError {
    #[error("events source unavailable: {0}")]
    Unavailable(String),
    #[error("malformed events dataset: {0}")]
    MalformedDataset(String),
}

/// Anything that can list historical events for a year.
pub trait EventsProvider {
    fn events_for_year(&self, year: i32) -> Result<Vec<HistoricalEvent>, EventsError>;
}

impl<P: EventsProvider + ?Sized> EventsProvider for &P {
    fn events_for_year(&self, year: i32) -> Result<Vec<HistoricalEvent>, EventsError> {
        (**self).events_for_year(year)
    }
}

impl<P: EventsProvider + ?Sized> EventsProvider for Box<P> {
    fn events_for_year(&self, year: i32) -> Result<Vec<HistoricalEvent>, EventsError> {
        (**self).events_for_year(year)
    }
}

impl<P: EventsProvider + ?Sized> EventsProvider for std::sync::Arc<P> {
    fn events_for_year(&self, year: i32) -> Result<Vec<HistoricalEvent>, EventsError> {
        (**self).events_for_year(year)
    }
}

#[derive(Deserialize)]
struct DatasetFile {
    coverage: Coverage,
    events: Vec<HistoricalEvent>,
}

#[derive(Deserialize)]
struct Coverage {
    from: i32,
    to: i32,
}

/// In-memory year index over an offline dataset.
#[derive(Debug, Clone, Default)]
pub struct FallbackEvents {
    by_year: BTreeMap<i32, Vec<String>>,
}

impl FallbackEvents {
    /// The dataset shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_EVENTS_JSON).expect("bundled events dataset is well-formed")
    }

    pub fn from_json(json: &str) -> Result<Self, EventsError> {
        let file: DatasetFile =
            serde_json::from_str(json).map_err(|e| EventsError::MalformedDataset(e.to_string()))?;
        let mut by_year: BTreeMap<i32, Vec<String>> = BTreeMap::new();
        for ev in file.events {
            if ev.event_text.trim().is_empty() {
                return Err(EventsError::MalformedDataset(format!(
                    "empty event text for year {}",
                    ev.year
                )));
            }
            by_year.entry(ev.year).or_default().push(ev.event_text);
        }
        if let Some(missing) = (file.coverage.from..=file.coverage.to).find(|y| !by_year.contains_key(y)) {
            return Err(EventsError::MalformedDataset(format!(
                "declared coverage {}..={} but year {missing} has no events",
                file.coverage.from, file.coverage.to
            )));
        }
        Ok(Self { by_year })
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.by_year.keys().copied()
    }

    pub fn lookup(&self, year: i32) -> Vec<HistoricalEvent> {
        self.by_year
            .get(&year)
            .map(|texts| {
                texts
                    .iter()
                    .map(|t| HistoricalEvent {
                        year,
                        event_text: t.clone(),
                    })
                    .collect()
            })
            .unwrap_or_default()
    }
}

impl EventsProvider for FallbackEvents {
    fn events_for_year(&self, year: i32) -> Result<Vec<HistoricalEvent>, EventsError> {
        Ok(self.lookup(year))
    }
}

/// Reads and indexes a dataset file.
pub fn load_fallback_events(path: impl AsRef<Path>) -> Result<FallbackEvents, EventsError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| EventsError::MalformedDataset(format!("{}: {e}", path.as_ref().display())))?;
    FallbackEvents::from_json(&text)
}

/// A primary source backed by the offline dataset.
///
/// The fallback is consulted only when the primary fails or returns nothing
/// for the year. Entries whose year differs from the query are dropped.
#[derive(Debug, Clone)]
pub struct ChainedEvents<P> {
    primary: Option<P>,
    fallback: FallbackEvents,
}

impl<P: EventsProvider> ChainedEvents<P> {
    pub fn new(primary: Option<P>, fallback: FallbackEvents) -> Self {
        Self { primary, fallback }
    }

    pub fn fallback(&self) -> &FallbackEvents {
        &self.fallback
    }
}

impl<P: EventsProvider> EventsProvider for ChainedEvents<P> {
    fn events_for_year(&self, year: i32) -> Result<Vec<HistoricalEvent>, EventsError> {
        let primary_failure = match &self.primary {
            None => None,
            Some(primary) => match primary.events_for_year(year) {
                Ok(events) => {
                    let events: Vec<_> = events.into_iter().filter(|e| e.year == year).collect();
                    if !events.is_empty() {
                        return Ok(events);
                    }
                    None
                }
                Err(e) => {
                    tracing::warn!(year, error = %e, "external events source failed, using fallback");
                    Some(e)
                }
            },
        };
        let events = self.fallback.lookup(year);
        match primary_failure {
            Some(e) if events.is_empty() => Err(e),
            _ => Ok(events),
        }
    }
}
