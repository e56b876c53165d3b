//! Independent checks of generated exercises against the material they were
//! built from. Each returns a list of human-readable violations.

use std::collections::HashSet;

use sereni_core::events::EventsProvider;
use sereni_core::games::{
    eligible_sources, fallback_songs, generate_activities_ordering, generate_event_question,
    generate_memory_association, generate_memory_completion, generate_music_game, grade, Exercise, GameError, GenConfig,
    MultipleChoice, Payload, DISTRACTOR_YEARS,
};
use sereni_core::model::{memory_year, normalize, validate_memory, GameType, Memory, MemoryCategory, UserProfile};

use crate::Fixture;

/// Targets the eligibility rules offer for `game`. Association boards have
/// no single target and yield one `None`.
pub fn targets<'a>(f: &'a Fixture, game: GameType, cfg: &GenConfig) -> Vec<Option<&'a Memory>> {
    let s = eligible_sources(&f.memories, &f.profile, cfg);
    match game {
        GameType::MemoryCompletion => s.completion.into_iter().map(Some).collect(),
        GameType::ActivitiesOrdering => s.ordering.into_iter().map(Some).collect(),
        GameType::MemoryRelatedEvent => s.event.into_iter().map(Some).collect(),
        GameType::MusicGame => s.music.into_iter().map(Some).collect(),
        GameType::MemoryAssociation => {
            if s.association {
                vec![None]
            } else {
                vec![]
            }
        }
    }
}

/// Runs the generator for `game`. Association draws from the user's own
/// memories; the others get the whole mixed pool.
pub fn generate(
    game: GameType,
    target: Option<&Memory>,
    f: &Fixture,
    events: &dyn EventsProvider,
    cfg: &GenConfig,
) -> Result<Exercise, GameError> {
    let any = || target.ok_or_else(|| GameError::InsufficientMaterial("no target".into()));
    match game {
        GameType::MemoryCompletion => generate_memory_completion(any()?, &f.memories, cfg),
        GameType::ActivitiesOrdering => generate_activities_ordering(any()?, cfg),
        GameType::MemoryRelatedEvent => generate_event_question(any()?, &f.profile, events, cfg),
        GameType::MusicGame => generate_music_game(any()?, &f.memories, cfg),
        GameType::MemoryAssociation => {
            let own: Vec<Memory> = f.memories.iter().filter(|m| m.owner_id == f.profile.user_id).cloned().collect();
            generate_memory_association(&own, cfg)
        }
    }
}

pub struct Context<'a> {
    pub profile: &'a UserProfile,
    pub pool: &'a [Memory],
    pub events: &'a dyn EventsProvider,
    pub cfg: &'a GenConfig,
}

pub fn exercise_violations(ex: &Exercise, target: Option<&Memory>, cx: &Context<'_>) -> Vec<String> {
    let mut v = Vec::new();
    key_soundness(ex, &mut v);
    let sources = closure(ex, cx, &mut v);
    if let Some(t) = target {
        if !ex.source_memory_ids.contains(&t.memory_id) {
            v.push(format!("target {} missing from sources", t.memory_id.as_str()));
        }
    }
    match (&ex.payload, ex.game_type) {
        (Payload::MultipleChoice(mc), GameType::MemoryCompletion) => {
            hygiene(mc, cx.cfg, &mut v);
            if let Some(t) = sources.first() {
                completion(mc, t, cx, &mut v);
            }
        }
        (Payload::MultipleChoice(mc), GameType::MemoryRelatedEvent) => {
            hygiene(mc, cx.cfg, &mut v);
            if let Some(t) = sources.first() {
                event(mc, t, cx, &mut v);
            }
        }
        (Payload::Music(task), GameType::MusicGame) => {
            hygiene(&task.question, cx.cfg, &mut v);
            if task.clip_seconds != cx.cfg.clip_seconds {
                v.push("clip length differs from configuration".into());
            }
            if let Some(t) = sources.first() {
                music(&task.question, &task.audio_ref, t, cx, &mut v);
            }
        }
        (Payload::Ordering(o), GameType::ActivitiesOrdering) => {
            if let Some(t) = sources.first() {
                let steps = t.hobby_steps.clone().unwrap_or_default();
                let rebuilt: Vec<String> = o.correct_order.iter().map(|&i| o.presented_items[i].clone()).collect();
                if rebuilt != steps {
                    v.push("correct order does not rebuild the hobby steps".into());
                }
                let distinct: HashSet<&String> = steps.iter().collect();
                if distinct.len() > 1 && o.presented_items == steps {
                    v.push("ordering presented already solved".into());
                }
            }
        }
        (Payload::Association(a), GameType::MemoryAssociation) => association(a, &sources, cx.cfg, &mut v),
        (_, g) => v.push(format!("payload kind does not match {g}")),
    }
    v
}

fn key_soundness(ex: &Exercise, v: &mut Vec<String>) {
    let key = ex.answer_key();
    if !ex.expected_shape().accepts(&key) {
        v.push("answer key rejected by the expected shape".into());
    }
    match grade(ex, &key) {
        Ok(g) if g.correct && g.score == 1.0 && g.errors == 0 => {}
        Ok(g) => v.push(format!("answer key graded {g:?}")),
        Err(e) => v.push(format!("answer key failed to grade: {e}")),
    }
}

/// Sources must exist, belong to the user, and be valid.
fn closure<'a>(ex: &Exercise, cx: &Context<'a>, v: &mut Vec<String>) -> Vec<&'a Memory> {
    let mut out = Vec::new();
    if ex.source_memory_ids.is_empty() {
        v.push("exercise has no source memory".into());
    }
    for id in &ex.source_memory_ids {
        match cx.pool.iter().find(|m| &m.memory_id == id) {
            None => v.push(format!("source {} not in the pool", id.as_str())),
            Some(m) if m.owner_id != cx.profile.user_id => {
                v.push(format!("source {} belongs to {}", id.as_str(), m.owner_id.as_str()))
            }
            Some(m) if !validate_memory(m).is_empty() => v.push(format!("source {} is invalid", id.as_str())),
            Some(m) => out.push(m),
        }
    }
    out
}

fn hygiene(mc: &MultipleChoice, cfg: &GenConfig, v: &mut Vec<String>) {
    if mc.options.len() != cfg.option_count {
        v.push(format!("{} options, {} configured", mc.options.len(), cfg.option_count));
    }
    if mc.correct_index >= mc.options.len() {
        v.push("correct index out of range".into());
        return;
    }
    let distinct: HashSet<String> = mc.options.iter().map(|o| normalize(o)).collect();
    if distinct.len() != mc.options.len() {
        v.push(format!("duplicate options {:?}", mc.options));
    }
    if mc.options.iter().any(|o| o.trim().is_empty()) {
        v.push("empty option".into());
    }
}

fn distractors(mc: &MultipleChoice) -> impl Iterator<Item = &String> {
    mc.options
        .iter()
        .enumerate()
        .filter(move |(i, _)| *i != mc.correct_index)
        .map(|(_, o)| o)
}

fn completion(mc: &MultipleChoice, target: &Memory, cx: &Context<'_>, v: &mut Vec<String>) {
    let detail = target.key_detail.as_deref().unwrap_or_default();
    if mc.options.get(mc.correct_index).map(String::as_str) != Some(detail) {
        v.push(format!("correct option is not the detail {detail:?}"));
    }
    let allowed: HashSet<String> = cx
        .pool
        .iter()
        .filter(|m| m.owner_id == target.owner_id && m.category == target.category && m.memory_id != target.memory_id)
        .filter(|m| validate_memory(m).is_empty())
        .filter_map(|m| m.key_detail.as_deref().map(normalize))
        .collect();
    for d in distractors(mc) {
        if !allowed.contains(&normalize(d)) {
            v.push(format!("distractor {d:?} is not one of the user's {} details", target.category));
        }
    }
    if mc.prompt.to_lowercase().contains(&detail.trim().to_lowercase()) {
        v.push("prompt gives the answer away".into());
    }
    if mc.reread_text.is_none() {
        v.push("completion without re-read text".into());
    }
}

fn event(mc: &MultipleChoice, target: &Memory, cx: &Context<'_>, v: &mut Vec<String>) {
    let Some(year) = memory_year(target, cx.profile) else {
        v.push("event question for a memory without a year".into());
        return;
    };
    let texts = |y: i32| -> HashSet<String> {
        cx.events
            .events_for_year(y)
            .unwrap_or_default()
            .into_iter()
            .filter(|e| e.year == y)
            .map(|e| normalize(&e.event_text))
            .collect()
    };
    let same_year = texts(year);
    if !same_year.contains(&normalize(&mc.options[mc.correct_index])) {
        v.push(format!("correct option is not an event of {year}"));
    }
    let elsewhere: HashSet<String> = DISTRACTOR_YEARS.filter(|&y| y != year).flat_map(texts).collect();
    for d in distractors(mc) {
        let d = normalize(d);
        if same_year.contains(&d) {
            v.push(format!("distractor {d:?} also happened in {year}"));
        } else if !elsewhere.contains(&d) {
            v.push(format!("distractor {d:?} is not a known event"));
        }
    }
}

fn music(q: &MultipleChoice, audio: &str, target: &Memory, cx: &Context<'_>, v: &mut Vec<String>) {
    let Some(meta) = target.music_meta.as_ref() else {
        v.push("music game from a memory without music".into());
        return;
    };
    if meta.audio_ref.as_deref() != Some(audio) {
        v.push("audio does not come from the target memory".into());
    }
    let by_artist = q.prompt.contains("singing");
    let field = |song: &str, artist: &str| normalize(if by_artist { artist } else { song });
    let correct = field(&meta.song_title, &meta.artist);
    if normalize(&q.options[q.correct_index]) != correct {
        v.push("correct option is not the target's song".into());
    }
    let own: HashSet<String> = cx
        .pool
        .iter()
        .filter(|m| {
            m.owner_id == target.owner_id
                && m.category == MemoryCategory::Music
                && m.memory_id != target.memory_id
                && validate_memory(m).is_empty()
        })
        .filter_map(|m| m.music_meta.as_ref())
        .map(|mm| field(&mm.song_title, &mm.artist))
        .filter(|t| *t != correct)
        .collect();
    let fallback: HashSet<String> = fallback_songs().iter().map(|s| field(&s.song_title, &s.artist)).collect();
    let needed = cx.cfg.option_count - 1;
    let mut from_own = 0;
    for d in distractors(q) {
        let d = normalize(d);
        if own.contains(&d) {
            from_own += 1;
        } else if !fallback.contains(&d) {
            v.push(format!("distractor {d:?} is neither the user's nor a known song"));
        }
        if d.contains(&correct) || correct.contains(&d) {
            v.push(format!("distractor {d:?} overlaps the answer"));
        }
    }
    if from_own < own.len().min(needed) {
        v.push("fallback songs used while the user's own music was available".into());
    }
}

fn association(a: &sereni_core::games::AssociationTask, sources: &[&Memory], cfg: &GenConfig, v: &mut Vec<String>) {
    let n = cfg.association_pairs;
    if a.left_items.len() != n || a.right_items.len() != n || a.correct_mapping.len() != n || sources.len() != n {
        v.push(format!("association board is not {n} pairs"));
        return;
    }
    let owner_cat: HashSet<_> = sources.iter().map(|m| (&m.owner_id, m.category)).collect();
    if owner_cat.len() != 1 {
        v.push("association mixes categories".into());
    }
    for (i, m) in sources.iter().enumerate() {
        let (l, r) = match (&m.music_meta, m.category) {
            (Some(mm), MemoryCategory::Music) => (mm.song_title.as_str(), mm.artist.as_str()),
            _ => (m.title.as_str(), m.key_detail.as_deref().unwrap_or_default()),
        };
        if a.left_items[i] != l || a.right_items[a.correct_mapping[i]] != r {
            v.push(format!("pair {i} does not match memory {}", m.memory_id.as_str()));
        }
    }
    for items in [&a.left_items, &a.right_items] {
        let distinct: HashSet<String> = items.iter().map(|s| normalize(s)).collect();
        if distinct.len() != n {
            v.push(format!("ambiguous association items {items:?}"));
        }
    }
    if a.correct_mapping.iter().enumerate().all(|(i, &j)| i == j) {
        v.push("association presented already solved".into());
    }
}
