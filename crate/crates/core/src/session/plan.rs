use std::collections::{BTreeMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use sha2::{Digest, Sha256};

use super::{SessionError, SessionPlan, SessionRecord};
use crate::config::PlanSettings;
use crate::events::EventsProvider;
use crate::games::{
    eligible_sources, generate_activities_ordering, generate_event_question, generate_memory_association,
    generate_memory_completion, generate_music_game, rng_for, Exercise, GameError, GenConfig,
};
use crate::model::{GameType, Memory, MemoryId, UserProfile};

/// Picks exercises for one session.
///
/// Game types take turns so a session mixes games. Within a type, memories
/// used in the user's previous session go to the back of the queue. Items
/// are added while they fit under `bounds.max_seconds`, until the estimate
/// reaches `bounds.min_seconds`; a plan that cannot get there is marked short.
pub fn plan_session<E: EventsProvider + ?Sized>(
    profile: &UserProfile,
    memories: &[Memory],
    settings: &PlanSettings,
    chosen_type: Option<GameType>,
    history: &[SessionRecord],
    events: &E,
) -> Result<SessionPlan, SessionError> {
    let violations = settings.gen.validate();
    if !violations.is_empty() {
        return Err(GameError::InvalidConfig(violations).into());
    }
    let own: Vec<Memory> = memories
        .iter()
        .filter(|m| m.owner_id == profile.user_id)
        .cloned()
        .collect();
    let sources = eligible_sources(&own, profile, &settings.gen);

    let mut types: Vec<GameType> = GameType::ALL
        .into_iter()
        .filter(|g| settings.enabled_games.contains(g))
        .filter(|g| chosen_type.is_none_or(|c| c == *g))
        .filter(|g| sources.count(*g) > 0)
        .collect();
    if types.is_empty() {
        return Err(SessionError::NoEligibleMaterial(match chosen_type {
            Some(g) => format!("{g} cannot be played with the current memories"),
            None => "no game can be played with the current memories".into(),
        }));
    }

    let recent = recently_used(profile, history);
    let mut rng = rng_for(settings.gen.rng_seed, "session-plan");
    types.shuffle(&mut rng);

    let mut queues: BTreeMap<GameType, VecDeque<Option<&Memory>>> = BTreeMap::new();
    for &game in &types {
        let mut targets: Vec<Option<&Memory>> = match game {
            GameType::MemoryCompletion => sources.completion.iter().copied().map(Some).collect(),
            GameType::ActivitiesOrdering => sources.ordering.iter().copied().map(Some).collect(),
            GameType::MemoryRelatedEvent => sources.event.iter().copied().map(Some).collect(),
            GameType::MusicGame => sources.music.iter().copied().map(Some).collect(),
            GameType::MemoryAssociation => vec![None],
        };
        targets.shuffle(&mut rng);
        // stable: fresh memories first, recently used ones after
        targets.sort_by_key(|t| t.is_some_and(|m| recent.contains(&m.memory_id)));
        queues.insert(game, targets.into());
    }

    let bounds = settings.bounds;
    let mut exercises = Vec::new();
    let mut total = 0u32;
    let mut attempt = 0u64;
    'fill: while total < bounds.min_seconds && queues.values().any(|q| !q.is_empty()) {
        for &game in &types {
            let Some(target) = queues.get_mut(&game).and_then(VecDeque::pop_front) else {
                continue;
            };
            let cost = settings.estimates.seconds_for(game, settings.gen.clip_seconds);
            if total + cost > bounds.max_seconds {
                continue;
            }
            attempt += 1;
            let cfg = GenConfig {
                rng_seed: derive_seed(settings.gen.rng_seed, attempt),
                ..settings.gen
            };
            match generate(game, target, &own, profile, events, &cfg) {
                Ok(ex) => {
                    exercises.push(ex);
                    total += cost;
                }
                Err(e) => tracing::debug!(%game, error = %e, "skipping candidate exercise"),
            }
            if total >= bounds.min_seconds {
                break 'fill;
            }
        }
    }

    if exercises.is_empty() {
        return Err(SessionError::NoEligibleMaterial(
            "every candidate exercise failed to generate".into(),
        ));
    }
    Ok(SessionPlan {
        session_id: session_id(profile, settings.gen.rng_seed, history.len()),
        user_id: profile.user_id.clone(),
        exercises,
        estimated_seconds: total,
        game_type_filter: chosen_type,
        short: total < bounds.min_seconds,
        answer_timeout_seconds: settings.answer_timeout_seconds,
    })
}

fn generate<E: EventsProvider + ?Sized>(
    game: GameType,
    target: Option<&Memory>,
    own: &[Memory],
    profile: &UserProfile,
    events: &E,
    cfg: &GenConfig,
) -> Result<Exercise, GameError> {
    let need_target = || target.ok_or_else(|| GameError::InsufficientMaterial("no target memory".into()));
    match game {
        GameType::MemoryCompletion => generate_memory_completion(need_target()?, own, cfg),
        GameType::ActivitiesOrdering => generate_activities_ordering(need_target()?, cfg),
        GameType::MemoryAssociation => generate_memory_association(own, cfg),
        GameType::MemoryRelatedEvent => generate_event_question(need_target()?, profile, events, cfg),
        GameType::MusicGame => generate_music_game(need_target()?, own, cfg),
    }
}

/// Memories played in the user's most recent session.
fn recently_used(profile: &UserProfile, history: &[SessionRecord]) -> HashSet<MemoryId> {
    history
        .iter()
        .filter(|r| r.user_id == profile.user_id)
        .max_by_key(|r| (r.started_at, r.session_id.clone()))
        .map(|r| {
            r.outcomes
                .iter()
                .flat_map(|o| o.source_memory_ids.iter().cloned())
                .collect()
        })
        .unwrap_or_default()
}

fn derive_seed(seed: u64, n: u64) -> u64 {
    seed ^ n.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn session_id(profile: &UserProfile, seed: u64, past_sessions: usize) -> String {
    let mut h = Sha256::new();
    h.update(profile.user_id.as_str().as_bytes());
    h.update(seed.to_le_bytes());
    h.update((past_sessions as u64).to_le_bytes());
    format!("s-{}", hex::encode(&h.finalize()[..8]))
}
