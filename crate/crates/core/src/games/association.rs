use std::collections::{BTreeMap, HashSet};

use rand::seq::IndexedRandom;

use super::{check_config, rng_for, shuffle_unsolved, AssociationTask, Exercise, GameError, GenConfig, Payload};
use crate::model::{normalize, validate_memory, GameType, Memory, MemoryCategory, UserId};

/// The (left, right) texts a memory contributes to an association board.
/// Music memories pair song titles with singers.
pub(crate) fn association_pair(m: &Memory) -> Option<(&str, &str)> {
    if let Some(meta) = &m.music_meta {
        return Some((meta.song_title.as_str(), meta.artist.as_str()));
    }
    let detail = m.key_detail.as_deref().filter(|d| !d.trim().is_empty())?;
    Some((m.title.as_str(), detail))
}

pub(crate) struct Group<'a> {
    /// Memories with an association pair in this (owner, category).
    pub raw: usize,
    /// Subset with pairwise distinct titles and details.
    pub usable: Vec<&'a Memory>,
}

pub(crate) fn association_groups(pool: &[Memory]) -> BTreeMap<(UserId, MemoryCategory), Group<'_>> {
    let mut by_group: BTreeMap<(UserId, MemoryCategory), Vec<&Memory>> = BTreeMap::new();
    for m in pool {
        if association_pair(m).is_some() && validate_memory(m).is_empty() {
            by_group.entry((m.owner_id.clone(), m.category)).or_default().push(m);
        }
    }
    by_group
        .into_iter()
        .map(|(key, mut members)| {
            members.sort_by(|a, b| a.memory_id.cmp(&b.memory_id));
            let raw = members.len();
            let mut titles = HashSet::new();
            let mut details = HashSet::new();
            let usable = members
                .into_iter()
                .filter(|m| {
                    let (left, right) = association_pair(m).expect("filtered above");
                    let (l, r) = (normalize(left), normalize(right));
                    if titles.contains(&l) || details.contains(&r) {
                        return false;
                    }
                    titles.insert(l);
                    details.insert(r);
                    true
                })
                .collect();
            (key, Group { raw, usable })
        })
        .collect()
}

/// A board of memory titles to be linked with their details.
pub fn generate_memory_association(pool: &[Memory], cfg: &GenConfig) -> Result<Exercise, GameError> {
    check_config(cfg)?;
    let pairs = cfg.association_pairs;
    let groups = association_groups(pool);
    let playable: Vec<&Group> = groups.values().filter(|g| g.usable.len() >= pairs).collect();

    let mut rng = rng_for(cfg.rng_seed, "memory-association");
    let Some(group) = playable.choose(&mut rng) else {
        if groups.values().any(|g| g.raw >= pairs) {
            return Err(GameError::DuplicateDetails);
        }
        return Err(GameError::InsufficientMaterial(format!(
            "fewer than {pairs} same-category memories with details"
        )));
    };

    let chosen: Vec<&Memory> = group.usable.choose_multiple(&mut rng, pairs).copied().collect();
    let texts: Vec<(&str, &str)> = chosen
        .iter()
        .map(|m| association_pair(m).expect("usable memories have pairs"))
        .collect();
    let details: Vec<&str> = texts.iter().map(|(_, r)| *r).collect();
    let perm = shuffle_unsolved(&details, &mut rng);

    let left_items = texts.iter().map(|(l, _)| l.to_string()).collect();
    let right_items = perm.iter().map(|&i| details[i].to_string()).collect();
    let mut correct_mapping = vec![0; pairs];
    for (pos, &src) in perm.iter().enumerate() {
        correct_mapping[src] = pos;
    }

    Ok(Exercise::new(
        GameType::MemoryAssociation,
        chosen.iter().map(|m| m.memory_id.clone()).collect(),
        cfg.rng_seed,
        Payload::Association(AssociationTask {
            left_items,
            right_items,
            correct_mapping,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn song(id: &str, title: &str, artist: &str) -> Memory {
        Memory::new(id, "u1", MemoryCategory::Music, format!("Song {id}")).with_music(title, artist, None)
    }

    #[test]
    fn songs_and_singers() {
        let pool = vec![
            song("s1", "Volare", "Modugno"),
            song("s2", "Azzurro", "Celentano"),
            song("s3", "Fatti mandare dalla mamma", "Morandi"),
        ];
        let ex = generate_memory_association(&pool, &GenConfig::with_seed(3)).unwrap();
        let Payload::Association(a) = &ex.payload else { panic!() };
        let mut left = a.left_items.clone();
        left.sort();
        assert_eq!(left, ["Azzurro", "Fatti mandare dalla mamma", "Volare"]);
        let mut right = a.right_items.clone();
        right.sort();
        assert_eq!(right, ["Celentano", "Modugno", "Morandi"]);
        for (i, l) in a.left_items.iter().enumerate() {
            let m = pool.iter().find(|m| &m.music_meta.as_ref().unwrap().song_title == l).unwrap();
            assert_eq!(a.right_items[a.correct_mapping[i]], m.music_meta.as_ref().unwrap().artist);
        }
        let identity: Vec<usize> = (0..3).collect();
        assert_ne!(a.correct_mapping, identity);
    }

    #[test]
    fn too_few_memories() {
        let pool = vec![song("s1", "Volare", "Modugno"), song("s2", "Azzurro", "Celentano")];
        assert!(matches!(
            generate_memory_association(&pool, &GenConfig::default()),
            Err(GameError::InsufficientMaterial(_))
        ));
    }

    #[test]
    fn shared_detail_is_ambiguous() {
        let place = |id: &str, title: &str, detail: &str| {
            Memory::new(id, "u1", MemoryCategory::Places, title).with_detail(detail)
        };
        let pool = vec![
            place("p1", "Honeymoon", "Rome"),
            place("p2", "First job", "Rome"),
            place("p3", "Military service", "Turin"),
        ];
        assert_eq!(
            generate_memory_association(&pool, &GenConfig::default()),
            Err(GameError::DuplicateDetails)
        );
    }

    #[test]
    fn four_pairs() {
        let pool = vec![
            song("s1", "Volare", "Modugno"),
            song("s2", "Azzurro", "Celentano"),
            song("s3", "Emozioni", "Battisti"),
            song("s4", "Se telefonando", "Mina"),
        ];
        let cfg = GenConfig {
            association_pairs: 4,
            ..GenConfig::with_seed(11)
        };
        let ex = generate_memory_association(&pool, &cfg).unwrap();
        assert_eq!(ex.source_memory_ids.len(), 4);
    }
}
