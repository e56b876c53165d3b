use std::collections::{BTreeMap, HashMap};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{AnalyticsError, TelemetryEvent};
use crate::model::{GameType, UserId};

/// Half-open time window `[from, to)`. Missing ends are unbounded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<DateTime<Utc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<DateTime<Utc>>,
}

impl Period {
    pub fn all() -> Self {
        Self::default()
    }

    pub fn contains(&self, t: DateTime<Utc>) -> bool {
        self.from.is_none_or(|f| t >= f) && self.to.is_none_or(|end| t < end)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameStats {
    pub attempts: usize,
    pub pass_rate: f64,
    pub mean_score: f64,
    pub mean_errors: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub session_id: String,
    pub started_at: DateTime<Utc>,
    pub mean_score: f64,
    /// Highest completion level reached in the session.
    pub completion_level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverviewReport {
    pub user_id: UserId,
    pub period: Period,
    pub sessions_played: usize,
    pub total_events: usize,
    pub total_play_seconds: f64,
    pub timeouts: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_score: Option<f64>,
    pub per_game_type: BTreeMap<GameType, GameStats>,
    pub score_trend: Vec<TrendPoint>,
}

#[derive(Default)]
struct Acc {
    n: usize,
    passed: usize,
    score: f64,
    errors: f64,
}

struct SessionAcc {
    first: DateTime<Utc>,
    n: usize,
    score: f64,
    completion: f64,
}

/// Aggregates the user's events inside `period`, in recording order.
pub fn overview(events: &[TelemetryEvent], user: &UserId, period: &Period) -> OverviewReport {
    let mut per_type: BTreeMap<GameType, Acc> = BTreeMap::new();
    let mut sessions: HashMap<&str, SessionAcc> = HashMap::new();
    let mut total = Acc::default();
    let mut play_seconds = 0.0;
    let mut timeouts = 0;

    for e in events.iter().filter(|e| &e.user_id == user && period.contains(e.timestamp)) {
        for acc in [per_type.entry(e.game_type).or_default(), &mut total] {
            acc.n += 1;
            acc.passed += usize::from(e.passed);
            acc.score += e.score;
            acc.errors += f64::from(e.errors);
        }
        play_seconds += e.elapsed_seconds;
        timeouts += usize::from(e.timed_out);
        let s = sessions.entry(&e.session_id).or_insert(SessionAcc {
            first: e.timestamp,
            n: 0,
            score: 0.0,
            completion: 0.0,
        });
        s.first = s.first.min(e.timestamp);
        s.n += 1;
        s.score += e.score;
        s.completion = s.completion.max(e.completion_level_at_event);
    }

    let mut score_trend: Vec<TrendPoint> = sessions
        .into_iter()
        .map(|(id, s)| TrendPoint {
            session_id: id.to_string(),
            started_at: s.first,
            mean_score: s.score / s.n as f64,
            completion_level: s.completion,
        })
        .collect();
    score_trend.sort_by(|a, b| (a.started_at, &a.session_id).cmp(&(b.started_at, &b.session_id)));

    OverviewReport {
        user_id: user.clone(),
        period: *period,
        sessions_played: score_trend.len(),
        total_events: total.n,
        total_play_seconds: play_seconds,
        timeouts,
        mean_score: (total.n > 0).then(|| total.score / total.n as f64),
        per_game_type: per_type
            .into_iter()
            .map(|(g, a)| {
                let n = a.n as f64;
                (
                    g,
                    GameStats {
                        attempts: a.n,
                        pass_rate: a.passed as f64 / n,
                        mean_score: a.score / n,
                        mean_errors: a.errors / n,
                    },
                )
            })
            .collect(),
        score_trend,
    }
}

/// All of one session's events for `user`, oldest first.
pub fn detail(events: &[TelemetryEvent], user: &UserId, session_id: &str) -> Result<Vec<TelemetryEvent>, AnalyticsError> {
    let mut out: Vec<TelemetryEvent> = events
        .iter()
        .filter(|e| &e.user_id == user && e.session_id == session_id)
        .cloned()
        .collect();
    if out.is_empty() {
        return Err(AnalyticsError::UnknownSession(session_id.to_string()));
    }
    out.sort_by_key(|e| e.timestamp);
    Ok(out)
}
