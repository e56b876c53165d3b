//! Play sessions: who is playing, what they will play, and how it went.
//!
//! A session is planned up front ([`plan_session`]) to fit the configured
//! duration window, then run turn by turn against a [`Presenter`]
//! ([`run_session`]). Each attempted exercise yields one [`Outcome`] in the
//! [`SessionRecord`] and one telemetry event.

mod console;
mod identify;
mod plan;
mod registry;
mod run;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::games::{Exercise, GameError, GradeResult};
use crate::model::{GameType, MemoryId, UserId};

pub use console::ConsolePresenter;
pub use identify::identify_user;
pub use plan::plan_session;
pub use registry::{ActiveSession, SessionRegistry};
pub use run::{
    run_session, run_session_with_clock, Clock, Presenter, PresenterError, Reply, ShowContent, SystemClock,
    TelemetrySink,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionPlan {
    pub session_id: String,
    pub user_id: UserId,
    pub exercises: Vec<Exercise>,
    pub estimated_seconds: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game_type_filter: Option<GameType>,
    /// Not enough material to fill the minimum session length.
    pub short: bool,
    pub answer_timeout_seconds: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub exercise_id: String,
    pub game_type: GameType,
    pub source_memory_ids: Vec<MemoryId>,
    pub grade: GradeResult,
    pub elapsed_seconds: f64,
    pub timed_out: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    Completed,
    Stopped,
    PresenterFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub session_id: String,
    pub user_id: UserId,
    pub started_at: DateTime<Utc>,
    pub ended_at: DateTime<Utc>,
    pub planned: usize,
    pub outcomes: Vec<Outcome>,
    pub completion_level: f64,
    pub end_reason: EndReason,
}

impl SessionRecord {
    pub fn new(plan: &SessionPlan, started_at: DateTime<Utc>) -> Self {
        Self {
            session_id: plan.session_id.clone(),
            user_id: plan.user_id.clone(),
            started_at,
            ended_at: started_at,
            planned: plan.exercises.len(),
            outcomes: Vec::new(),
            completion_level: 0.0,
            end_reason: EndReason::Completed,
        }
    }

    pub fn push(&mut self, outcome: Outcome) {
        self.outcomes.push(outcome);
        self.completion_level = completion_level(self.outcomes.len(), self.planned);
    }

    pub fn close(&mut self, at: DateTime<Utc>, reason: EndReason) {
        self.ended_at = at.max(self.started_at);
        self.end_reason = reason;
    }
}

pub fn completion_level(attempted: usize, planned: usize) -> f64 {
    if planned == 0 {
        0.0
    } else {
        attempted.min(planned) as f64 / planned as f64
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("no user is called {0:?}")]
    UnknownUser(String),
    #[error("{0} users are called {1:?}")]
    AmbiguousName(usize, String),
    #[error("no eligible material: {0}")]
    NoEligibleMaterial(String),
    #[error("user {0} already has an open session")]
    AlreadyActive(UserId),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("presenter failed: {reason}")]
    PresenterFailure { reason: String, record: Box<SessionRecord> },
}
