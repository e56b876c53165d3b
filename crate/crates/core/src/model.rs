//! Users, memories and the biography category schema.
//!
//! Everything in here is a plain value type. The JSON encoding produced by
//! serde for these types is the canonical wire format: field names are the
//! struct field names, optional fields are omitted when absent, and enum
//! values serialize as their token strings.

use std::fmt;
use std::str::FromStr;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

/// Oldest accepted birth year.
pub const MIN_BIRTH_YEAR: i32 = 1900;
/// Upper bound for `age_at_event`.
pub const MAX_AGE_AT_EVENT: u32 = 120;

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_string())
            }
        }
    };
}

id_newtype!(
    /// Opaque user identifier.
    UserId
);
id_newtype!(
    /// Opaque memory identifier.
    MemoryId
);

/// The closed set of biography categories a memory can belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MemoryCategory {
    Affections,
    Events,
    Games,
    Hobbies,
    Places,
    Music,
}

impl MemoryCategory {
    pub const ALL: [MemoryCategory; 6] = [
        MemoryCategory::Affections,
        MemoryCategory::Events,
        MemoryCategory::Games,
        MemoryCategory::Hobbies,
        MemoryCategory::Places,
        MemoryCategory::Music,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MemoryCategory::Affections => "Affections",
            MemoryCategory::Events => "Events",
            MemoryCategory::Games => "Games",
            MemoryCategory::Hobbies => "Hobbies",
            MemoryCategory::Places => "Places",
            MemoryCategory::Music => "Music",
        }
    }
}

impl fmt::Display for MemoryCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown token {0:?}")]
pub struct UnknownToken(pub String);

impl FromStr for MemoryCategory {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MemoryCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownToken(s.to_string()))
    }
}

/// The five exercise kinds the engine can generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GameType {
    MemoryCompletion,
    ActivitiesOrdering,
    MemoryAssociation,
    MemoryRelatedEvent,
    MusicGame,
}

impl GameType {
    pub const ALL: [GameType; 5] = [
        GameType::MemoryCompletion,
        GameType::ActivitiesOrdering,
        GameType::MemoryAssociation,
        GameType::MemoryRelatedEvent,
        GameType::MusicGame,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            GameType::MemoryCompletion => "MemoryCompletion",
            GameType::ActivitiesOrdering => "ActivitiesOrdering",
            GameType::MemoryAssociation => "MemoryAssociation",
            GameType::MemoryRelatedEvent => "MemoryRelatedEvent",
            GameType::MusicGame => "MusicGame",
        }
    }
}

impl fmt::Display for GameType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GameType {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GameType::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| UnknownToken(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Senior,
    Caregiver,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: UserId,
    pub display_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub birth_year: Option<i32>,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MusicMeta {
    pub song_title: String,
    pub artist: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audio_ref: Option<String>,
}

/// One categorized biographical record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Memory {
    pub memory_id: MemoryId,
    pub owner_id: UserId,
    pub category: MemoryCategory,
    pub title: String,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub age_at_event: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_ref: Option<String>,
    /// The salient detail of the memory (a place, a person, a singer).
    /// Memories without one cannot feed completion or association games.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key_detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hobby_steps: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub music_meta: Option<MusicMeta>,
}

impl Memory {
    /// A bare memory with only the required fields set.
    pub fn new(
        memory_id: impl Into<MemoryId>,
        owner_id: impl Into<UserId>,
        category: MemoryCategory,
        title: impl Into<String>,
    ) -> Self {
        Self {
            memory_id: memory_id.into(),
            owner_id: owner_id.into(),
            category,
            title: title.into(),
            description: String::new(),
            age_at_event: None,
            image_ref: None,
            key_detail: None,
            hobby_steps: None,
            music_meta: None,
        }
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    pub fn with_age(mut self, age: u32) -> Self {
        self.age_at_event = Some(age);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.key_detail = Some(detail.into());
        self
    }

    pub fn with_steps<S: Into<String>>(mut self, steps: impl IntoIterator<Item = S>) -> Self {
        self.hobby_steps = Some(steps.into_iter().map(Into::into).collect());
        self
    }

    pub fn with_music(
        mut self,
        song_title: impl Into<String>,
        artist: impl Into<String>,
        audio_ref: Option<&str>,
    ) -> Self {
        self.music_meta = Some(MusicMeta {
            song_title: song_title.into(),
            artist: artist.into(),
            audio_ref: audio_ref.map(str::to_string),
        });
        self
    }
}

impl From<String> for MemoryId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

impl From<String> for UserId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

/// A single failed validation rule, naming the offending field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Checks every memory invariant. An empty list means the memory is valid.
pub fn validate_memory(m: &Memory) -> Vec<Violation> {
    let mut out = Vec::new();

    if m.title.trim().is_empty() {
        out.push(Violation::new("title", "title empty"));
    }
    if let Some(age) = m.age_at_event {
        if age > MAX_AGE_AT_EVENT {
            out.push(Violation::new(
                "age_at_event",
                format!("age_at_event {age} outside 0..={MAX_AGE_AT_EVENT}"),
            ));
        }
    }

    if let Some(steps) = &m.hobby_steps {
        if m.category != MemoryCategory::Hobbies {
            out.push(Violation::new("hobby_steps", "hobby_steps on non-Hobbies category"));
        }
        if steps.is_empty() {
            out.push(Violation::new("hobby_steps", "hobby_steps empty"));
        }
        for (i, step) in steps.iter().enumerate() {
            if step.trim().is_empty() {
                out.push(Violation::new(format!("hobby_steps[{i}]"), "step empty"));
            } else if steps[..i].iter().any(|prev| prev == step) {
                out.push(Violation::new(format!("hobby_steps[{i}]"), "duplicate step"));
            }
        }
    }

    if let Some(meta) = &m.music_meta {
        if m.category != MemoryCategory::Music {
            out.push(Violation::new("music_meta", "music_meta on non-Music category"));
        }
        if meta.song_title.trim().is_empty() {
            out.push(Violation::new("music_meta.song_title", "music_meta.song_title empty"));
        }
        if meta.artist.trim().is_empty() {
            out.push(Violation::new("music_meta.artist", "music_meta.artist empty"));
        }
    }

    if let Some(detail) = &m.key_detail {
        if detail.trim().is_empty() {
            out.push(Violation::new("key_detail", "key_detail empty"));
        }
    }

    out
}

pub fn validate_profile(p: &UserProfile) -> Vec<Violation> {
    validate_profile_at(p, chrono::Utc::now().year())
}

pub fn validate_profile_at(p: &UserProfile, current_year: i32) -> Vec<Violation> {
    let mut out = Vec::new();
    if p.display_name.trim().is_empty() {
        out.push(Violation::new("display_name", "display_name empty"));
    }
    if let Some(year) = p.birth_year {
        if !(MIN_BIRTH_YEAR..=current_year).contains(&year) {
            out.push(Violation::new(
                "birth_year",
                format!("birth_year {year} outside {MIN_BIRTH_YEAR}..={current_year}"),
            ));
        }
    }
    out
}

/// Calendar year of a memory, derived from the owner's birth year.
pub fn memory_year(m: &Memory, p: &UserProfile) -> Option<i32> {
    let birth = p.birth_year?;
    let age = i32::try_from(m.age_at_event?).ok()?;
    birth.checked_add(age)
}

/// Client-submitted memory, before ids are assigned.
///
/// The category is kept as a raw token so that an unknown category surfaces
/// as a field violation instead of a parse error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryInput {
    pub category: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub age_at_event: Option<u32>,
    #[serde(default)]
    pub image_ref: Option<String>,
    #[serde(default)]
    pub key_detail: Option<String>,
    #[serde(default)]
    pub hobby_steps: Option<Vec<String>>,
    #[serde(default)]
    pub music_meta: Option<MusicMeta>,
}

impl MemoryInput {
    pub fn into_memory(self, memory_id: MemoryId, owner_id: UserId) -> Result<Memory, Vec<Violation>> {
        let category = self.category.parse::<MemoryCategory>().map_err(|_| {
            vec![Violation::new(
                "category",
                format!("unknown category {:?}", self.category),
            )]
        })?;
        let memory = Memory {
            memory_id,
            owner_id,
            category,
            title: self.title,
            description: self.description,
            age_at_event: self.age_at_event,
            image_ref: self.image_ref,
            key_detail: self.key_detail,
            hobby_steps: self.hobby_steps,
            music_meta: self.music_meta,
        };
        let violations = validate_memory(&memory);
        if violations.is_empty() {
            Ok(memory)
        } else {
            Err(violations)
        }
    }
}

/// Trimmed, case-folded form used whenever two texts are compared for
/// sameness (names, details, option texts).
pub fn normalize(text: &str) -> String {
    text.trim().to_lowercase()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(birth: Option<i32>) -> UserProfile {
        UserProfile {
            user_id: "u1".into(),
            display_name: "Maria".into(),
            birth_year: birth,
            role: Role::Senior,
        }
    }

    #[test]
    fn hobby_with_four_steps_is_valid() {
        let m = Memory::new("m1", "u1", MemoryCategory::Hobbies, "Making bread")
            .with_steps(["mix flour", "knead", "let rise", "bake"]);
        assert!(validate_memory(&m).is_empty());
    }

    #[test]
    fn steps_on_events_memory_are_rejected() {
        let m = Memory::new("m1", "u1", MemoryCategory::Events, "Wedding").with_steps(["a", "b"]);
        let v = validate_memory(&m);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "hobby_steps");
        assert_eq!(v[0].message, "hobby_steps on non-Hobbies category");
    }

    #[test]
    fn music_with_empty_artist_is_rejected() {
        let m = Memory::new("m1", "u1", MemoryCategory::Music, "Song").with_music("Volare", " ", None);
        let v = validate_memory(&m);
        assert_eq!(v, vec![Violation::new("music_meta.artist", "music_meta.artist empty")]);
    }

    #[test]
    fn empty_title_and_old_age() {
        let m = Memory::new("m1", "u1", MemoryCategory::Places, "  ").with_age(121);
        let fields: Vec<_> = validate_memory(&m).into_iter().map(|v| v.field).collect();
        assert_eq!(fields, ["title", "age_at_event"]);
    }

    #[test]
    fn duplicate_and_blank_steps() {
        let m = Memory::new("m1", "u1", MemoryCategory::Hobbies, "Fishing").with_steps(["a", "", "a"]);
        let fields: Vec<_> = validate_memory(&m).into_iter().map(|v| v.field).collect();
        assert_eq!(fields, ["hobby_steps[1]", "hobby_steps[2]"]);
        let empty = Memory::new("m1", "u1", MemoryCategory::Hobbies, "Fishing").with_steps(Vec::<String>::new());
        assert_eq!(validate_memory(&empty)[0].message, "hobby_steps empty");
    }

    #[test]
    fn memory_year_examples() {
        let m = Memory::new("m1", "u1", MemoryCategory::Events, "got married").with_age(12);
        assert_eq!(memory_year(&m, &profile(Some(1933))), Some(1945));
        assert_eq!(memory_year(&m, &profile(None)), None);
        let m = m.with_age(25);
        assert_eq!(memory_year(&m, &profile(Some(1920))), Some(1945));
        let no_age = Memory::new("m2", "u1", MemoryCategory::Events, "x");
        assert_eq!(memory_year(&no_age, &profile(Some(1920))), None);
    }

    #[test]
    fn profile_validation() {
        assert!(validate_profile_at(&profile(Some(1940)), 2026).is_empty());
        assert_eq!(validate_profile_at(&profile(Some(1899)), 2026)[0].field, "birth_year");
        assert_eq!(validate_profile_at(&profile(Some(2027)), 2026)[0].field, "birth_year");
        let mut p = profile(None);
        p.display_name = "   ".into();
        assert_eq!(validate_profile_at(&p, 2026)[0].field, "display_name");
    }

    #[test]
    fn category_tokens_are_closed() {
        let tokens: Vec<_> = MemoryCategory::ALL.iter().map(|c| c.as_str()).collect();
        assert_eq!(tokens, ["Affections", "Events", "Games", "Hobbies", "Places", "Music"]);
        for c in MemoryCategory::ALL {
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(json, format!("\"{c}\""));
            assert_eq!(serde_json::from_str::<MemoryCategory>(&json).unwrap(), c);
            assert_eq!(c.as_str().parse::<MemoryCategory>().unwrap(), c);
        }
        assert!("Food".parse::<MemoryCategory>().is_err());
        assert!("events".parse::<MemoryCategory>().is_err());
        assert!(serde_json::from_str::<MemoryCategory>("\"Food\"").is_err());
    }

    #[test]
    fn input_with_unknown_category() {
        let input: MemoryInput =
            serde_json::from_str(r#"{"category":"Food","title":"Lasagne"}"#).unwrap();
        let err = input.into_memory("m1".into(), "u1".into()).unwrap_err();
        assert_eq!(err[0].field, "category");
    }

    #[test]
    fn canonical_json_omits_absent_fields() {
        let m = Memory::new("m1", "u1", MemoryCategory::Places, "Summer").with_detail("Tirrenia");
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(
            json,
            r#"{"memory_id":"m1","owner_id":"u1","category":"Places","title":"Summer","description":"","key_detail":"Tirrenia"}"#
        );
    }
}
