use std::collections::BTreeMap;

use rand::seq::IndexedRandom;

use super::{check_config, check_memory, rng_for, shuffle_options, Exercise, GameError, GenConfig, MultipleChoice, Payload};
use crate::model::{normalize, validate_memory, GameType, Memory};

/// Marker replacing the missing detail in the prompt.
pub const BLANK: &str = "___";
/// Appended when the detail does not occur verbatim in the description.
pub const NOT_VERBATIM_QUESTION: &str = "Which was it?";

/// Distinct details of the owner's other same-category memories, keyed by
/// normalized text, excluding the target's own detail.
pub(crate) fn detail_distractors<'a>(target: &Memory, pool: &'a [Memory]) -> BTreeMap<String, &'a str> {
    let own = target.key_detail.as_deref().map(normalize).unwrap_or_default();
    let mut out = BTreeMap::new();
    for m in pool {
        if m.memory_id == target.memory_id
            || m.owner_id != target.owner_id
            || m.category != target.category
            || !validate_memory(m).is_empty()
        {
            continue;
        }
        if let Some(detail) = m.key_detail.as_deref() {
            let key = normalize(detail);
            if !key.is_empty() && key != own {
                out.entry(key).or_insert(detail);
            }
        }
    }
    out
}

/// A memory with its salient detail blanked out, to be picked among details
/// from the user's other memories.
pub fn generate_memory_completion(target: &Memory, pool: &[Memory], cfg: &GenConfig) -> Result<Exercise, GameError> {
    check_config(cfg)?;
    check_memory(target)?;
    let detail = target
        .key_detail
        .as_deref()
        .filter(|d| !d.trim().is_empty())
        .ok_or(GameError::MissingDetail)?;

    let candidates: Vec<&str> = detail_distractors(target, pool).into_values().collect();
    let needed = cfg.option_count - 1;
    if candidates.len() < needed {
        return Err(GameError::InsufficientMaterial(format!(
            "{} distinct distractor details, {needed} needed",
            candidates.len()
        )));
    }

    let mut rng = rng_for(cfg.rng_seed, "memory-completion");
    let distractors: Vec<String> = candidates
        .choose_multiple(&mut rng, needed)
        .map(|s| s.to_string())
        .collect();
    let (options, correct_index) = shuffle_options(detail.to_string(), distractors, &mut rng);

    let description = if target.description.trim().is_empty() {
        target.title.as_str()
    } else {
        target.description.as_str()
    };
    let prompt = blank_out(description, detail.trim())
        .unwrap_or_else(|| format!("{} {NOT_VERBATIM_QUESTION}", description.trim_end()));

    Ok(Exercise::new(
        GameType::MemoryCompletion,
        vec![target.memory_id.clone()],
        cfg.rng_seed,
        Payload::MultipleChoice(MultipleChoice {
            prompt,
            options,
            correct_index,
            reread_text: Some(description.to_string()),
        }),
    ))
}

/// Replaces every occurrence of `detail` (ASCII case-insensitive) with
/// [`BLANK`]; `None` if there is none.
fn blank_out(text: &str, detail: &str) -> Option<String> {
    let needle = detail.as_bytes();
    let hay = text.as_bytes();
    let mut out = String::with_capacity(text.len());
    let (mut i, mut copied, mut found) = (0, 0, false);
    while i + needle.len() <= hay.len() {
        if text.is_char_boundary(i) && hay[i..i + needle.len()].eq_ignore_ascii_case(needle) {
            out.push_str(&text[copied..i]);
            out.push_str(BLANK);
            i += needle.len();
            copied = i;
            found = true;
        } else {
            i += 1;
        }
    }
    out.push_str(&text[copied..]);
    found.then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MemoryCategory;

    fn place(id: &str, detail: &str) -> Memory {
        Memory::new(id, "u1", MemoryCategory::Places, format!("Summer {id}"))
            .with_description(format!("When I was 12 years old I used to spend summer time in {detail}."))
            .with_detail(detail)
    }

    fn pool() -> Vec<Memory> {
        ["Marina di Pisa", "Tirrenia", "San Vincenzo", "Castiglioncello", "Livorno"]
            .iter()
            .enumerate()
            .map(|(i, d)| place(&format!("m{i}"), d))
            .collect()
    }

    #[test]
    fn worked_example_options() {
        let pool = pool();
        let ex = generate_memory_completion(&pool[0], &pool, &GenConfig::with_seed(42)).unwrap();
        let Payload::MultipleChoice(mc) = &ex.payload else { panic!() };
        assert_eq!(mc.options.len(), 4);
        assert_eq!(mc.correct_option(), "Marina di Pisa");
        let mut sorted = mc.options.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
        assert_eq!(mc.prompt, "When I was 12 years old I used to spend summer time in ___.");
        assert_eq!(
            mc.reread_text.as_deref(),
            Some("When I was 12 years old I used to spend summer time in Marina di Pisa.")
        );
    }

    #[test]
    fn too_few_distractors() {
        let pool = pool()[..3].to_vec();
        assert!(matches!(
            generate_memory_completion(&pool[0], &pool, &GenConfig::default()),
            Err(GameError::InsufficientMaterial(_))
        ));
    }

    #[test]
    fn missing_detail() {
        let mut pool = pool();
        pool[0].key_detail = None;
        assert_eq!(
            generate_memory_completion(&pool[0], &pool, &GenConfig::default()),
            Err(GameError::MissingDetail)
        );
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let pool = pool();
        let cfg = GenConfig::with_seed(42);
        let a = serde_json::to_vec(&generate_memory_completion(&pool[1], &pool, &cfg).unwrap()).unwrap();
        let b = serde_json::to_vec(&generate_memory_completion(&pool[1], &pool, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn detail_not_in_description_appends_question() {
        let mut pool = pool();
        pool[0].description = "Summers by the sea with my cousins.".into();
        let ex = generate_memory_completion(&pool[0], &pool, &GenConfig::default()).unwrap();
        let Payload::MultipleChoice(mc) = &ex.payload else { panic!() };
        assert_eq!(mc.prompt, "Summers by the sea with my cousins. Which was it?");
    }

    #[test]
    fn ignores_other_owners_categories_and_duplicates() {
        let mut pool = pool()[..2].to_vec();
        let mut stranger = place("x1", "Viareggio");
        stranger.owner_id = "u2".into();
        pool.push(stranger);
        let mut music = place("x2", "Forte dei Marmi");
        music.category = MemoryCategory::Events;
        pool.push(music);
        pool.push(place("x3", "tirrenia "));
        pool.push(place("x4", "marina di pisa"));
        let got = detail_distractors(&pool[0], &pool);
        assert_eq!(got.into_values().collect::<Vec<_>>(), ["Tirrenia"]);
    }

    #[test]
    fn blanks_every_occurrence() {
        assert_eq!(
            blank_out("Tirrenia, always tirrenia.", "Tirrenia").as_deref(),
            Some("___, always ___.")
        );
        assert_eq!(blank_out("Caffè Nero è qui", "è").as_deref(), Some("Caff___ Nero ___ qui"));
        assert_eq!(blank_out("nothing here", "Elba"), None);
    }
}
