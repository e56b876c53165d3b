//! Biography-based cognitive training.
//!
//! Older adults' categorized memories are turned into personalised
//! exercises ([`games`]), played in timed sessions through a pluggable
//! [`session::Presenter`], and tracked for caregivers ([`analytics`]).

pub mod analytics;
pub mod config;
pub mod events;
pub mod games;
pub mod model;
pub mod session;

pub use model::{GameType, Memory, MemoryCategory, MemoryId, Role, UserId, UserProfile};
