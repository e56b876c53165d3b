use std::collections::HashSet;
use std::ops::RangeInclusive;

use rand::seq::{IndexedRandom, SliceRandom};

use super::{check_config, check_memory, rng_for, shuffle_options, Exercise, GameError, GenConfig, MultipleChoice, Payload};
use crate::events::EventsProvider;
use crate::model::{memory_year, normalize, GameType, Memory, UserProfile};

/// Years that distractor events are drawn from.
pub const DISTRACTOR_YEARS: RangeInclusive<i32> = 1900..=2000;
/// Upper bound on provider lookups spent finding distractors.
pub const MAX_DISTRACTOR_YEAR_PROBES: usize = 32;

/// "What happened in the same year ...?" with real events from other years
/// as distractors.
pub fn generate_event_question<E: EventsProvider + ?Sized>(
    target: &Memory,
    profile: &UserProfile,
    events: &E,
    cfg: &GenConfig,
) -> Result<Exercise, GameError> {
    check_config(cfg)?;
    check_memory(target)?;
    let year = memory_year(target, profile).ok_or(GameError::NoYear)?;

    let same_year: Vec<String> = events
        .events_for_year(year)
        .unwrap_or_default()
        .into_iter()
        .filter(|e| e.year == year && !e.event_text.trim().is_empty())
        .map(|e| e.event_text)
        .collect();
    let mut rng = rng_for(cfg.rng_seed, "memory-related-event");
    let correct = same_year.choose(&mut rng).ok_or(GameError::NoEventData(year))?.clone();

    // any event of the target year would also be a right answer
    let mut taken: HashSet<String> = same_year.iter().map(|t| normalize(t)).collect();
    let needed = cfg.option_count - 1;
    let mut years: Vec<i32> = DISTRACTOR_YEARS.filter(|&y| y != year).collect();
    years.shuffle(&mut rng);

    let mut distractors = Vec::with_capacity(needed);
    for other in years.into_iter().take(MAX_DISTRACTOR_YEAR_PROBES) {
        if distractors.len() == needed {
            break;
        }
        let Ok(found) = events.events_for_year(other) else { continue };
        let fresh: Vec<String> = found
            .into_iter()
            .filter(|e| e.year == other && !taken.contains(&normalize(&e.event_text)))
            .map(|e| e.event_text)
            .collect();
        if let Some(pick) = fresh.choose(&mut rng) {
            taken.insert(normalize(pick));
            distractors.push(pick.clone());
        }
    }
    if distractors.len() < needed {
        return Err(GameError::InsufficientMaterial(format!(
            "found {} distractor events, {needed} needed",
            distractors.len()
        )));
    }

    let (options, correct_index) = shuffle_options(correct, distractors, &mut rng);
    Ok(Exercise::new(
        GameType::MemoryRelatedEvent,
        vec![target.memory_id.clone()],
        cfg.rng_seed,
        Payload::MultipleChoice(MultipleChoice {
            prompt: prompt(target.title.trim(), year),
            options,
            correct_index,
            reread_text: None,
        }),
    ))
}

/// Lower-case titles read as something the user did ("got married");
/// others are quoted as names.
fn prompt(title: &str, year: i32) -> String {
    if title.starts_with(|c: char| c.is_lowercase()) {
        format!("What happened in the same year you {title} ({year})?")
    } else {
        format!("What happened in {year}, the year of \"{title}\"?")
    }
}
