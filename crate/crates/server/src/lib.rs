//! HTTP service over `sereni-core`: user and memory management, session
//! play, analytics for caregivers, historical events and media storage.

pub mod api;
pub mod auth;
pub mod error;
pub mod http_events;
pub mod media;
pub mod openapi;
pub mod play;
pub mod state;
pub mod store;

pub use api::router;
pub use state::{AppState, ServiceConfig};
