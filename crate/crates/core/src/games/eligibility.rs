use std::collections::{BTreeMap, BTreeSet};

use super::association::association_groups;
use super::music::{music_distractors, MusicQuestionKind};
use super::ordering::MIN_STEPS;
use super::GenConfig;
use crate::model::{memory_year, normalize, validate_memory, GameType, Memory, MemoryCategory, UserProfile};

/// Memories that can seed each game type for one user.
#[derive(Debug, Clone, Default)]
pub struct EligibleSources<'a> {
    pub completion: Vec<&'a Memory>,
    pub ordering: Vec<&'a Memory>,
    /// Association boards draw several memories at once; this only records
    /// whether one can be built.
    pub association: bool,
    pub event: Vec<&'a Memory>,
    pub music: Vec<&'a Memory>,
}

impl EligibleSources<'_> {
    pub fn count(&self, game: GameType) -> usize {
        match game {
            GameType::MemoryCompletion => self.completion.len(),
            GameType::ActivitiesOrdering => self.ordering.len(),
            GameType::MemoryAssociation => usize::from(self.association),
            GameType::MemoryRelatedEvent => self.event.len(),
            GameType::MusicGame => self.music.len(),
        }
    }
}

pub fn eligible_sources<'a>(memories: &'a [Memory], profile: &UserProfile, cfg: &GenConfig) -> EligibleSources<'a> {
    if !cfg.validate().is_empty() {
        return EligibleSources::default();
    }
    let own: Vec<&Memory> = memories
        .iter()
        .filter(|m| m.owner_id == profile.user_id && validate_memory(m).is_empty())
        .collect();

    let mut details: BTreeMap<MemoryCategory, BTreeSet<String>> = BTreeMap::new();
    for m in &own {
        if let Some(d) = m.key_detail.as_deref() {
            details.entry(m.category).or_default().insert(normalize(d));
        }
    }
    let completion = own
        .iter()
        .filter(|m| m.key_detail.is_some())
        .filter(|m| details.get(&m.category).is_some_and(|d| d.len() >= cfg.option_count))
        .copied()
        .collect();

    let ordering = own
        .iter()
        .filter(|m| m.category == MemoryCategory::Hobbies)
        .filter(|m| m.hobby_steps.as_ref().is_some_and(|s| s.len() >= MIN_STEPS))
        .copied()
        .collect();

    let owned: Vec<Memory> = own.iter().map(|m| (*m).clone()).collect();
    let association = association_groups(&owned)
        .values()
        .any(|g| g.usable.len() >= cfg.association_pairs);

    let event = own.iter().filter(|m| memory_year(m, profile).is_some()).copied().collect();

    let music = own
        .iter()
        .filter(|m| m.category == MemoryCategory::Music)
        .filter(|m| {
            let Some(meta) = &m.music_meta else { return false };
            if meta.audio_ref.as_deref().is_none_or(|a| a.trim().is_empty()) {
                return false;
            }
            [MusicQuestionKind::Artist, MusicQuestionKind::Title].into_iter().all(|kind| {
                let (mine, fallback) = music_distractors(m, meta, memories, kind);
                mine.len() + fallback.len() >= cfg.option_count - 1
            })
        })
        .copied()
        .collect();

    EligibleSources {
        completion,
        ordering,
        association,
        event,
        music,
    }
}

/// How many sources each game type can draw from; zero means the game
/// cannot be offered.
pub fn eligible_games(memories: &[Memory], profile: &UserProfile, cfg: &GenConfig) -> BTreeMap<GameType, usize> {
    let sources = eligible_sources(memories, profile, cfg);
    GameType::ALL.into_iter().map(|g| (g, sources.count(g))).collect()
}
