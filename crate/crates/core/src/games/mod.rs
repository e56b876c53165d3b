//! Seed-driven exercise generation from a user's memories, and grading.
//!
//! Every generator is a pure function of its inputs and `GenConfig::rng_seed`:
//! the same call always produces a byte-identical [`Exercise`].

mod association;
mod completion;
mod eligibility;
mod event_question;
mod grade;
mod music;
mod ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{GameType, MemoryId, Violation};

pub use association::generate_memory_association;
pub use completion::{generate_memory_completion, BLANK, NOT_VERBATIM_QUESTION};
pub use eligibility::{eligible_games, eligible_sources, EligibleSources};
pub use event_question::{generate_event_question, DISTRACTOR_YEARS, MAX_DISTRACTOR_YEAR_PROBES};
pub use grade::grade;
pub use music::{fallback_songs, generate_music_game, generate_music_question, FallbackSong, MusicQuestionKind};
pub use ordering::generate_activities_ordering;

/// Re-shuffle attempts before falling back to a rotation by one.
pub const MAX_RESHUFFLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub option_count: usize,
    pub association_pairs: usize,
    pub clip_seconds: u32,
    pub rng_seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            option_count: 4,
            association_pairs: 3,
            clip_seconds: 10,
            rng_seed: 0,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            rng_seed: seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.option_count < 2 {
            out.push(Violation::new("option_count", "option_count must be at least 2"));
        }
        if !(3..=4).contains(&self.association_pairs) {
            out.push(Violation::new("association_pairs", "association_pairs must be 3 or 4"));
        }
        if self.clip_seconds == 0 {
            out.push(Violation::new("clip_seconds", "clip_seconds must be positive"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultipleChoice {
    pub prompt: String,
    pub options: Vec<String>,
    pub correct_index: usize,
    /// Full memory text to read back after a correct answer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reread_text: Option<String>,
}

impl MultipleChoice {
    pub fn correct_option(&self) -> &str {
        &self.options[self.correct_index]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingTask {
    pub presented_items: Vec<String>,
    /// `presented_items[correct_order[k]]` is the k-th step.
    pub correct_order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociationTask {
    pub left_items: Vec<String>,
    pub right_items: Vec<String>,
    /// `right_items[correct_mapping[i]]` belongs with `left_items[i]`.
    pub correct_mapping: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MusicTask {
    pub audio_ref: String,
    pub clip_seconds: u32,
    pub question: MultipleChoice,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    MultipleChoice(MultipleChoice),
    Ordering(OrderingTask),
    Association(AssociationTask),
    Music(MusicTask),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exercise {
    pub exercise_id: String,
    pub game_type: GameType,
    pub source_memory_ids: Vec<MemoryId>,
    pub payload: Payload,
}

impl Exercise {
    pub(crate) fn new(game_type: GameType, sources: Vec<MemoryId>, seed: u64, payload: Payload) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(game_type.as_str().as_bytes());
        hasher.update(seed.to_le_bytes());
        for id in &sources {
            hasher.update([0u8]);
            hasher.update(id.as_str().as_bytes());
        }
        let digest = hasher.finalize();
        Self {
            exercise_id: format!("ex-{}", hex::encode(&digest[..8])),
            game_type,
            source_memory_ids: sources,
            payload,
        }
    }

    /// The response that grades as fully correct.
    pub fn answer_key(&self) -> Answer {
        match &self.payload {
            Payload::MultipleChoice(mc) => Answer::Choice(mc.correct_index),
            Payload::Music(m) => Answer::Choice(m.question.correct_index),
            Payload::Ordering(o) => Answer::Order(o.correct_order.clone()),
            Payload::Association(a) => Answer::Mapping(a.correct_mapping.clone()),
        }
    }

    pub fn expected_shape(&self) -> AnswerShape {
        match &self.payload {
            Payload::MultipleChoice(mc) => AnswerShape::Choice {
                options: mc.options.len(),
            },
            Payload::Music(m) => AnswerShape::Choice {
                options: m.question.options.len(),
            },
            Payload::Ordering(o) => AnswerShape::Order {
                items: o.presented_items.len(),
            },
            Payload::Association(a) => AnswerShape::Mapping {
                left: a.left_items.len(),
                right: a.right_items.len(),
            },
        }
    }

    pub fn reread_text(&self) -> Option<&str> {
        match &self.payload {
            Payload::MultipleChoice(mc) => mc.reread_text.as_deref(),
            _ => None,
        }
    }
}

/// A user's response to an exercise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    /// Index of the chosen option.
    Choice(usize),
    /// The user's arrangement, as presented-item indices in chosen order.
    Order(Vec<usize>),
    /// For each left item, the index of the right item it was linked to.
    Mapping(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnswerShape {
    Choice { options: usize },
    Order { items: usize },
    Mapping { left: usize, right: usize },
}

impl AnswerShape {
    pub fn accepts(&self, answer: &Answer) -> bool {
        match (self, answer) {
            (AnswerShape::Choice { options }, Answer::Choice(i)) => i < options,
            (AnswerShape::Order { items }, Answer::Order(order)) => is_permutation(order, *items),
            (AnswerShape::Mapping { left, right }, Answer::Mapping(map)) => {
                map.len() == *left && map.iter().all(|j| j < right)
            }
            _ => false,
        }
    }
}

pub(crate) fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeResult {
    pub correct: bool,
    pub item_correct: Vec<bool>,
    pub score: f64,
    pub errors: u32,
}

impl GradeResult {
    pub(crate) fn from_items(item_correct: Vec<bool>) -> Self {
        let total = item_correct.len();
        let right = item_correct.iter().filter(|&&c| c).count();
        let score = if total == 0 { 0.0 } else { right as f64 / total as f64 };
        Self {
            correct: total > 0 && right == total,
            errors: (total - right) as u32,
            item_correct,
            score,
        }
    }

    /// An unanswered exercise: one error, zero score.
    pub fn timed_out() -> Self {
        Self::from_items(vec![false])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("not enough material: {0}")]
    InsufficientMaterial(String),
    #[error("memory has no key detail")]
    MissingDetail,
    #[error("memory is not a hobby")]
    NotAHobby,
    #[error("hobby needs at least 3 steps, found {0}")]
    TooFewSteps(usize),
    #[error("details are not distinct, the association would be ambiguous")]
    DuplicateDetails,
    #[error("memory year cannot be derived")]
    NoYear,
    #[error("no historical events for {0}")]
    NoEventData(i32),
    #[error("memory is not a music memory")]
    NotMusic,
    #[error("music memory has no audio")]
    NoAudio,
    #[error("answer does not match the exercise shape")]
    ShapeMismatch,
    #[error("invalid memory: {0:?}")]
    InvalidMemory(Vec<Violation>),
    #[error("invalid configuration: {0:?}")]
    InvalidConfig(Vec<Violation>),
}

pub(crate) fn check_config(cfg: &GenConfig) -> Result<(), GameError> {
    let v = cfg.validate();
    if v.is_empty() {
        Ok(())
    } else {
        Err(GameError::InvalidConfig(v))
    }
}

pub(crate) fn check_memory(m: &crate::model::Memory) -> Result<(), GameError> {
    let v = crate::model::validate_memory(m);
    if v.is_empty() {
        Ok(())
    } else {
        Err(GameError::InvalidMemory(v))
    }
}

/// Independent RNG stream per (seed, purpose).
pub(crate) fn rng_for(seed: u64, purpose: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(purpose.as_bytes());
    let mut key = [0u8; 32];
    key.copy_from_slice(&hasher.finalize());
    ChaCha8Rng::from_seed(key)
}

/// Permutation `p` such that `items[p[i]]` is the presented order, never
/// equal to `items` itself when that is possible.
pub(crate) fn shuffle_unsolved<T: PartialEq>(items: &[T], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = items.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let solved = |p: &[usize]| p.iter().enumerate().all(|(i, &j)| items[i] == items[j]);
    for _ in 0..MAX_RESHUFFLES {
        perm.shuffle(rng);
        if !solved(&perm) {
            return perm;
        }
    }
    perm = (0..n).map(|i| (i + 1) % n.max(1)).collect();
    perm
}

/// Shuffles `correct` together with `distractors`, returning the options and
/// the position of the correct one.
pub(crate) fn shuffle_options(
    correct: String,
    distractors: Vec<String>,
    rng: &mut ChaCha8Rng,
) -> (Vec<String>, usize) {
    let mut options = Vec::with_capacity(distractors.len() + 1);
    options.push(correct);
    options.extend(distractors);
    let mut order: Vec<usize> = (0..options.len()).collect();
    order.shuffle(rng);
    let correct_index = order.iter().position(|&i| i == 0).unwrap_or(0);
    let mut slots: Vec<Option<String>> = options.into_iter().map(Some).collect();
    let shuffled = order.iter().map(|&i| slots[i].take().unwrap_or_default()).collect();
    (shuffled, correct_index)
}
