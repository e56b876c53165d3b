use std::time::Duration;

use serde::Deserialize;
use sereni_core::events::{EventsError, EventsProvider, HistoricalEvent};

/// Client for an external `GET {base}/events?year=Y` service answering
/// with a JSON list of `{year, event_text}` (bare or under `"events"`).
#[derive(Debug, Clone)]
pub struct HttpEvents {
    url: String,
    agent: ureq::Agent,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Reply {
    List(Vec<HistoricalEvent>),
    Wrapped { events: Vec<HistoricalEvent> },
}

impl HttpEvents {
    pub fn new(base_url: &str, timeout: Duration) -> Self {
        Self {
            url: format!("{}/events", base_url.trim_end_matches('/')),
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
        }
    }
}

impl EventsProvider for HttpEvents {
    fn events_for_year(&self, year: i32) -> Result<Vec<HistoricalEvent>, EventsError> {
        let reply: Reply = self
            .agent
            .get(&self.url)
            .query("year", &year.to_string())
            .call()
            .map_err(|e| EventsError::Unavailable(e.to_string()))?
            .into_json()
            .map_err(|e| EventsError::Unavailable(format!("unreadable reply: {e}")))?;
        let events = match reply {
            Reply::List(events) | Reply::Wrapped { events } => events,
        };
        Ok(events.into_iter().filter(|e| e.year == year).collect())
    }
}
