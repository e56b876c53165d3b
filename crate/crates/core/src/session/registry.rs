use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::SessionError;
use crate::model::UserId;

/// Tracks which users are mid-session. At most one open session per user.
#[derive(Debug, Default)]
pub struct SessionRegistry {
    active: Mutex<HashMap<UserId, String>>,
}

impl SessionRegistry {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    pub fn begin(self: &Arc<Self>, user: &UserId, session_id: &str) -> Result<ActiveSession, SessionError> {
        let mut active = self.active.lock().expect("session registry poisoned");
        if active.contains_key(user) {
            return Err(SessionError::AlreadyActive(user.clone()));
        }
        active.insert(user.clone(), session_id.to_string());
        Ok(ActiveSession {
            registry: Arc::clone(self),
            user: user.clone(),
            session_id: session_id.to_string(),
        })
    }

    pub fn active_session(&self, user: &UserId) -> Option<String> {
        self.active.lock().expect("session registry poisoned").get(user).cloned()
    }
}

/// Releases the user's slot when dropped.
#[derive(Debug)]
pub struct ActiveSession {
    registry: Arc<SessionRegistry>,
    user: UserId,
    session_id: String,
}

impl ActiveSession {
    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    pub fn user(&self) -> &UserId {
        &self.user
    }
}

impl Drop for ActiveSession {
    fn drop(&mut self) {
        if let Ok(mut active) = self.registry.active.lock() {
            active.remove(&self.user);
        }
    }
}
