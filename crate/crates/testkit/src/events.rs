use std::collections::BTreeMap;

use sereni_core::events::{ChainedEvents, EventsError, EventsProvider, FallbackEvents, HistoricalEvent};

/// A fixed year → events table standing in for an external service.
#[derive(Debug, Clone, Default)]
pub struct StaticEvents(pub BTreeMap<i32, Vec<String>>);

impl EventsProvider for StaticEvents {
    fn events_for_year(&self, year: i32) -> Result<Vec<HistoricalEvent>, EventsError> {
        Ok(self
            .0
            .get(&year)
            .into_iter()
            .flatten()
            .map(|t| HistoricalEvent {
                year,
                event_text: t.clone(),
            })
            .collect())
    }
}

/// A source that is always down.
#[derive(Debug, Clone, Copy, Default)]
pub struct Unreachable;

impl EventsProvider for Unreachable {
    fn events_for_year(&self, _year: i32) -> Result<Vec<HistoricalEvent>, EventsError> {
        Err(EventsError::Unavailable("connection refused".into()))
    }
}

/// One event each for 1945, 1969 and 1946 as the external source, with
/// the bundled dataset behind it for every other year.
pub fn worked_example_events() -> ChainedEvents<StaticEvents> {
    let table = [
        (1945, "the end of second world war"),
        (1969, "the first man on the moon"),
        (1946, "women gain the right to vote in Italy"),
    ]
    .into_iter()
    .map(|(y, t)| (y, vec![t.to_string()]))
    .collect();
    ChainedEvents::new(Some(StaticEvents(table)), FallbackEvents::bundled())
}
