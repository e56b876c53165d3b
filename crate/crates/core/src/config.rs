//! Caregiver-tunable settings for generation and session planning.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::games::GenConfig;
use crate::model::{GameType, Violation};

/// Expected seconds a senior spends on one exercise of each type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeEstimates {
    pub memory_completion: u32,
    pub activities_ordering: u32,
    pub memory_association: u32,
    pub memory_related_event: u32,
    /// Excludes the clip itself, which is added on top.
    pub music_game: u32,
}

impl Default for TimeEstimates {
    fn default() -> Self {
        Self {
            memory_completion: 90,
            activities_ordering: 120,
            memory_association: 120,
            memory_related_event: 90,
            music_game: 60,
        }
    }
}

impl TimeEstimates {
    pub fn uniform(seconds: u32) -> Self {
        Self {
            memory_completion: seconds,
            activities_ordering: seconds,
            memory_association: seconds,
            memory_related_event: seconds,
            music_game: seconds,
        }
    }

    pub fn seconds_for(&self, game: GameType, clip_seconds: u32) -> u32 {
        match game {
            GameType::MemoryCompletion => self.memory_completion,
            GameType::ActivitiesOrdering => self.activities_ordering,
            GameType::MemoryAssociation => self.memory_association,
            GameType::MemoryRelatedEvent => self.memory_related_event,
            GameType::MusicGame => self.music_game + clip_seconds,
        }
    }
}

/// Target duration window for a play session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionBounds {
    pub min_seconds: u32,
    pub max_seconds: u32,
}

impl Default for SessionBounds {
    fn default() -> Self {
        Self {
            min_seconds: 15 * 60,
            max_seconds: 20 * 60,
        }
    }
}

pub const DEFAULT_ANSWER_TIMEOUT_SECONDS: u32 = 60;

/// Everything `plan_session` needs besides the user's material.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanSettings {
    pub gen: GenConfig,
    pub estimates: TimeEstimates,
    pub bounds: SessionBounds,
    pub enabled_games: BTreeSet<GameType>,
    pub answer_timeout_seconds: u32,
}

impl Default for PlanSettings {
    fn default() -> Self {
        Self {
            gen: GenConfig::default(),
            estimates: TimeEstimates::default(),
            bounds: SessionBounds::default(),
            enabled_games: GameType::ALL.into_iter().collect(),
            answer_timeout_seconds: DEFAULT_ANSWER_TIMEOUT_SECONDS,
        }
    }
}

/// Per-user overrides a caregiver can store. Absent fields keep defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaregiverConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub option_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub association_pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip_seconds: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enabled_games: Option<BTreeSet<GameType>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_bounds: Option<SessionBounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_estimates: Option<TimeEstimates>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer_timeout_seconds: Option<u32>,
}

impl CaregiverConfig {
    pub fn settings(&self, seed: u64) -> PlanSettings {
        let defaults = PlanSettings::default();
        PlanSettings {
            gen: GenConfig {
                option_count: self.option_count.unwrap_or(defaults.gen.option_count),
                association_pairs: self.association_pairs.unwrap_or(defaults.gen.association_pairs),
                clip_seconds: self.clip_seconds.unwrap_or(defaults.gen.clip_seconds),
                rng_seed: seed,
            },
            estimates: self.time_estimates.unwrap_or(defaults.estimates),
            bounds: self.session_bounds.unwrap_or(defaults.bounds),
            enabled_games: self.enabled_games.clone().unwrap_or(defaults.enabled_games),
            answer_timeout_seconds: self.answer_timeout_seconds.unwrap_or(defaults.answer_timeout_seconds),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let settings = self.settings(0);
        let mut out = settings.gen.validate();
        if settings.enabled_games.is_empty() {
            out.push(Violation::new("enabled_games", "at least one game type must be enabled"));
        }
        let b = settings.bounds;
        if b.min_seconds == 0 || b.min_seconds > b.max_seconds {
            out.push(Violation::new(
                "session_bounds",
                "session bounds need 0 < min_seconds <= max_seconds",
            ));
        }
        if settings.answer_timeout_seconds == 0 {
            out.push(Violation::new("answer_timeout_seconds", "answer timeout must be positive"));
        }
        let e = settings.estimates;
        if [
            e.memory_completion,
            e.activities_ordering,
            e.memory_association,
            e.memory_related_event,
            e.music_game,
        ]
        .contains(&0)
        {
            out.push(Violation::new("time_estimates", "time estimates must be positive"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        assert!(CaregiverConfig::default().validate().is_empty());
        let s = CaregiverConfig::default().settings(9);
        assert_eq!(s.gen.rng_seed, 9);
        assert_eq!(s.gen.option_count, 4);
        assert_eq!(s.bounds, SessionBounds { min_seconds: 900, max_seconds: 1200 });
        assert_eq!(s.estimates.seconds_for(GameType::MusicGame, 10), 70);
    }

    #[test]
    fn no_games_enabled_is_rejected() {
        let cfg = CaregiverConfig {
            enabled_games: Some(BTreeSet::new()),
            ..Default::default()
        };
        assert_eq!(cfg.validate()[0].field, "enabled_games");
    }

    #[test]
    fn bad_overrides() {
        let cfg = CaregiverConfig {
            option_count: Some(1),
            association_pairs: Some(2),
            session_bounds: Some(SessionBounds { min_seconds: 600, max_seconds: 300 }),
            answer_timeout_seconds: Some(0),
            ..Default::default()
        };
        let fields: Vec<_> = cfg.validate().into_iter().map(|v| v.field).collect();
        assert_eq!(fields, ["option_count", "association_pairs", "session_bounds", "answer_timeout_seconds"]);
    }
}
