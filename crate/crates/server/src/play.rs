//! Console play against a data directory, the same one `serve` uses.

use std::io::{BufRead, Write};
use std::path::Path;

use sereni_core::analytics::{AnalyticsError, EventLog};
use sereni_core::events::EventsProvider;
use sereni_core::session::{identify_user, plan_session, run_session, ConsolePresenter, SessionError, SessionRecord};
use sereni_core::{GameType, UserProfile};

use crate::store::{Store, StoreError};

#[derive(Debug, thiserror::Error)]
pub enum PlayError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Log(#[from] AnalyticsError),
    #[error(transparent)]
    Session(#[from] SessionError),
}

/// Identifies the player by name, plans a session from the stored material
/// and plays it on `input`/`output`. The record is stored even when the
/// console breaks mid-session.
pub fn play<R: BufRead, W: Write, E: EventsProvider + ?Sized>(
    data_dir: &Path,
    name: &str,
    chosen: Option<GameType>,
    seed: u64,
    events: &E,
    input: R,
    output: W,
) -> Result<SessionRecord, PlayError> {
    std::fs::create_dir_all(data_dir).map_err(StoreError::Io)?;
    let mut store = Store::open(data_dir.join("store.ndjson"))?;
    let mut log = EventLog::open(data_dir.join("events.ndjson"))?;

    let profiles: Vec<UserProfile> = store.users().cloned().collect();
    let profile = identify_user(name, &profiles)?.clone();
    let id = &profile.user_id;
    let settings = store.config(id).settings(seed);
    let plan = plan_session(&profile, store.memories(id), &settings, chosen, &store.sessions(id), events)?;

    let mut presenter = ConsolePresenter::new(input, output);
    let record = match run_session(&plan, &mut presenter, &mut log) {
        Ok(r) => r,
        Err(SessionError::PresenterFailure { reason, record }) => {
            store.put_session((*record).clone())?;
            return Err(SessionError::PresenterFailure { reason, record }.into());
        }
        Err(e) => return Err(e.into()),
    };
    store.put_session(record.clone())?;
    Ok(record)
}
