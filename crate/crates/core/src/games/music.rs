use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_config, check_memory, rng_for, shuffle_options, Exercise, GameError, GenConfig, MultipleChoice, MusicTask, Payload};
use crate::model::{normalize, validate_memory, GameType, Memory, MemoryCategory, MusicMeta};

const FALLBACK_SONGS_JSON: &str = include_str!("../../data/fallback_songs.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FallbackSong {
    pub artist: String,
    pub song_title: String,
    pub year: i32,
}

/// Popular songs used to top up music options for small collections.
pub fn fallback_songs() -> &'static [FallbackSong] {
    static SONGS: OnceLock<Vec<FallbackSong>> = OnceLock::new();
    SONGS.get_or_init(|| {
        #[derive(Deserialize)]
        struct File {
            songs: Vec<FallbackSong>,
        }
        serde_json::from_str::<File>(FALLBACK_SONGS_JSON)
            .expect("bundled song list is well-formed")
            .songs
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MusicQuestionKind {
    Artist,
    Title,
}

impl MusicQuestionKind {
    fn pick(self, meta: &MusicMeta) -> &str {
        match self {
            MusicQuestionKind::Artist => &meta.artist,
            MusicQuestionKind::Title => &meta.song_title,
        }
    }

    fn pick_fallback(self, song: &FallbackSong) -> &str {
        match self {
            MusicQuestionKind::Artist => &song.artist,
            MusicQuestionKind::Title => &song.song_title,
        }
    }
}

/// Distractor texts for `target`: the user's own music first, then the
/// fallback list. Returns (own, fallback), both deduplicated and disjoint.
pub(crate) fn music_distractors<'a>(
    target: &Memory,
    meta: &MusicMeta,
    pool: &'a [Memory],
    kind: MusicQuestionKind,
) -> (Vec<&'a str>, Vec<&'static str>) {
    let correct = normalize(kind.pick(meta));
    let mut own: BTreeMap<String, &str> = BTreeMap::new();
    for m in pool {
        if m.memory_id == target.memory_id
            || m.owner_id != target.owner_id
            || m.category != MemoryCategory::Music
            || !validate_memory(m).is_empty()
        {
            continue;
        }
        if let Some(other) = &m.music_meta {
            let text = kind.pick(other);
            let key = normalize(text);
            if key != correct {
                own.entry(key).or_insert(text);
            }
        }
    }
    let mut fallback: BTreeMap<String, &str> = BTreeMap::new();
    for song in fallback_songs() {
        let text = kind.pick_fallback(song);
        let key = normalize(text);
        // "Domenico Modugno" must not appear next to "Modugno"
        let overlaps = key.contains(&correct) || correct.contains(&key);
        if !overlaps && !own.contains_key(&key) {
            fallback.entry(key).or_insert(text);
        }
    }
    (own.into_values().collect(), fallback.into_values().collect())
}

fn audio_of(target: &Memory) -> Result<(&MusicMeta, &str), GameError> {
    if target.category != MemoryCategory::Music {
        return Err(GameError::NotMusic);
    }
    let meta = target.music_meta.as_ref().ok_or(GameError::NotMusic)?;
    let audio = meta
        .audio_ref
        .as_deref()
        .filter(|a| !a.trim().is_empty())
        .ok_or(GameError::NoAudio)?;
    Ok((meta, audio))
}

/// Plays the opening of a song and asks for its singer or its title,
/// whichever the seed selects.
pub fn generate_music_game(target: &Memory, pool: &[Memory], cfg: &GenConfig) -> Result<Exercise, GameError> {
    let kind = if rng_for(cfg.rng_seed, "music-kind").random_bool(0.5) {
        MusicQuestionKind::Artist
    } else {
        MusicQuestionKind::Title
    };
    generate_music_question(target, pool, cfg, kind)
}

pub fn generate_music_question(
    target: &Memory,
    pool: &[Memory],
    cfg: &GenConfig,
    kind: MusicQuestionKind,
) -> Result<Exercise, GameError> {
    check_config(cfg)?;
    let (meta, audio) = audio_of(target)?;
    check_memory(target)?;

    let needed = cfg.option_count - 1;
    let (own, fallback) = music_distractors(target, meta, pool, kind);
    if own.len() + fallback.len() < needed {
        return Err(GameError::InsufficientMaterial(format!(
            "{} distinct {kind:?} options available, {needed} needed",
            own.len() + fallback.len()
        )));
    }

    let mut rng = rng_for(cfg.rng_seed, "music-game");
    let mut distractors: Vec<String> = own
        .choose_multiple(&mut rng, needed)
        .map(|s| s.to_string())
        .collect();
    let mut extra: Vec<&str> = fallback;
    extra.shuffle(&mut rng);
    distractors.extend(extra.into_iter().take(needed - distractors.len()).map(str::to_string));

    let (options, correct_index) = shuffle_options(kind.pick(meta).to_string(), distractors, &mut rng);
    let prompt = match kind {
        MusicQuestionKind::Artist => "Who is singing this song?",
        MusicQuestionKind::Title => "What is the title of this song?",
    };

    Ok(Exercise::new(
        GameType::MusicGame,
        vec![target.memory_id.clone()],
        cfg.rng_seed,
        Payload::Music(MusicTask {
            audio_ref: audio.to_string(),
            clip_seconds: cfg.clip_seconds,
            question: MultipleChoice {
                prompt: prompt.to_string(),
                options,
                correct_index,
                reread_text: None,
            },
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn song(id: &str, title: &str, artist: &str, audio: Option<&str>) -> Memory {
        Memory::new(id, "u1", MemoryCategory::Music, format!("Car trips {id}")).with_music(title, artist, audio)
    }

    #[test]
    fn fallback_pool_is_large_and_distinct() {
        let songs = fallback_songs();
        assert!(songs.len() >= 20);
        let artists: HashSet<_> = songs.iter().map(|s| normalize(&s.artist)).collect();
        let titles: HashSet<_> = songs.iter().map(|s| normalize(&s.song_title)).collect();
        assert_eq!(artists.len(), songs.len());
        assert_eq!(titles.len(), songs.len());
    }

    #[test]
    fn modugno_with_three_own_artists() {
        let pool = vec![
            song("m1", "Volare", "Modugno", Some("sha256:aa")),
            song("m2", "Azzurro", "Celentano", None),
            song("m3", "Un mondo d'amore", "Morandi", None),
            song("m4", "Dio è morto", "Guccini", None),
        ];
        let ex = generate_music_question(&pool[0], &pool, &GenConfig::with_seed(5), MusicQuestionKind::Artist).unwrap();
        let Payload::Music(task) = &ex.payload else { panic!() };
        assert_eq!(task.audio_ref, "sha256:aa");
        assert_eq!(task.clip_seconds, 10);
        let got: HashSet<_> = task.question.options.iter().map(String::as_str).collect();
        assert_eq!(got, HashSet::from(["Modugno", "Morandi", "Celentano", "Guccini"]));
        assert_eq!(task.question.correct_option(), "Modugno");
    }

    #[test]
    fn no_audio() {
        let m = song("m1", "Volare", "Modugno", None);
        assert_eq!(generate_music_game(&m, &[], &GenConfig::default()), Err(GameError::NoAudio));
        let e = Memory::new("e1", "u1", MemoryCategory::Events, "Wedding");
        assert_eq!(generate_music_game(&e, &[], &GenConfig::default()), Err(GameError::NotMusic));
    }

    #[test]
    fn empty_pool_tops_up_from_fallback() {
        let m = song("m1", "Volare", "Modugno", Some("a"));
        let fallback: HashSet<&str> = fallback_songs().iter().map(|s| s.artist.as_str()).collect();
        for seed in 0..20 {
            let ex = generate_music_question(&m, &[], &GenConfig::with_seed(seed), MusicQuestionKind::Artist).unwrap();
            let Payload::Music(task) = &ex.payload else { panic!() };
            let opts = &task.question.options;
            assert_eq!(opts.len(), 4);
            assert_eq!(opts.iter().collect::<HashSet<_>>().len(), 4);
            for (i, o) in opts.iter().enumerate() {
                assert!(i == task.question.correct_index || fallback.contains(o.as_str()));
            }
        }
    }

    #[test]
    fn fallback_exhausted() {
        let m = song("m1", "Volare", "Modugno", Some("a"));
        let cfg = GenConfig {
            option_count: 40,
            ..GenConfig::default()
        };
        assert!(matches!(
            generate_music_game(&m, &[], &cfg),
            Err(GameError::InsufficientMaterial(_))
        ));
    }

    #[test]
    fn seed_selects_both_kinds() {
        let m = song("m1", "Volare", "Modugno", Some("a"));
        let kinds: HashSet<_> = (0..32)
            .map(|seed| {
                let ex = generate_music_game(&m, &[], &GenConfig::with_seed(seed)).unwrap();
                let Payload::Music(t) = ex.payload else { panic!() };
                t.question.correct_option().to_string()
            })
            .collect();
        assert_eq!(kinds, HashSet::from(["Modugno".to_string(), "Volare".to_string()]));
    }
}
