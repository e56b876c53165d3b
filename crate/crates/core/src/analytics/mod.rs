//! Per-exercise telemetry and the caregiver-facing reports built from it.

mod log;
mod report;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::model::{GameType, UserId};
use crate::session::{Outcome, SessionPlan};

pub use self::log::EventLog;
pub use report::{detail, overview, GameStats, OverviewReport, Period, TrendPoint};

#[derive(Debug, thiserror::Error)]
pub enum AnalyticsError {
    #[error("event {0} already recorded")]
    DuplicateEvent(String),
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("storage failure: {0}")]
    StorageFailure(String),
}

impl From<std::io::Error> for AnalyticsError {
    fn from(e: std::io::Error) -> Self {
        AnalyticsError::StorageFailure(e.to_string())
    }
}

/// One attempted exercise, as tracked for analytics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetryEvent {
    pub event_id: String,
    pub user_id: UserId,
    pub session_id: String,
    pub game_type: GameType,
    pub timestamp: DateTime<Utc>,
    pub elapsed_seconds: f64,
    pub errors: u32,
    pub passed: bool,
    pub score: f64,
    pub completion_level_at_event: f64,
    #[serde(default)]
    pub timed_out: bool,
}

impl TelemetryEvent {
    pub fn from_outcome(
        plan: &SessionPlan,
        index: usize,
        outcome: &Outcome,
        timestamp: DateTime<Utc>,
        completion_level: f64,
    ) -> Self {
        Self {
            event_id: format!("{}:{index}", plan.session_id),
            user_id: plan.user_id.clone(),
            session_id: plan.session_id.clone(),
            game_type: outcome.game_type,
            timestamp,
            elapsed_seconds: outcome.elapsed_seconds,
            errors: outcome.grade.errors,
            passed: outcome.grade.correct,
            score: outcome.grade.score,
            completion_level_at_event: completion_level,
            timed_out: outcome.timed_out,
        }
    }

    pub fn check(&self) -> Result<(), AnalyticsError> {
        let bad = |msg: &str| Err(AnalyticsError::InvalidEvent(format!("{}: {msg}", self.event_id)));
        if self.event_id.is_empty() {
            return bad("empty event_id");
        }
        if !(0.0..=1.0).contains(&self.score) {
            return bad("score outside [0, 1]");
        }
        if self.passed != (self.score == 1.0) {
            return bad("passed must hold exactly when score is 1");
        }
        if !self.elapsed_seconds.is_finite() || self.elapsed_seconds < 0.0 {
            return bad("elapsed_seconds must be a non-negative number");
        }
        if !(0.0..=1.0).contains(&self.completion_level_at_event) {
            return bad("completion level outside [0, 1]");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn event(id: &str, score: f64) -> TelemetryEvent {
        TelemetryEvent {
            event_id: id.into(),
            user_id: "u1".into(),
            session_id: "s1".into(),
            game_type: GameType::MemoryCompletion,
            timestamp: Utc::now(),
            elapsed_seconds: 12.5,
            errors: u32::from(score < 1.0),
            passed: score == 1.0,
            score,
            completion_level_at_event: 0.5,
            timed_out: false,
        }
    }

    #[test]
    fn passed_must_match_score() {
        assert!(event("e", 1.0).check().is_ok());
        let mut e = event("e", 1.0);
        e.passed = false;
        assert!(matches!(e.check(), Err(AnalyticsError::InvalidEvent(_))));
        let mut e = event("e", 0.5);
        e.elapsed_seconds = -1.0;
        assert!(e.check().is_err());
        let mut e = event("e", 0.5);
        e.score = 1.5;
        assert!(e.check().is_err());
    }
}
