//! Shared test support for the sereni crates.

pub mod checks;
pub mod events;
pub mod fixtures;
pub mod oracles;
pub mod presenters;

pub use fixtures::{five_game_user, random_user, rich_user, worked_example, Fixture};
