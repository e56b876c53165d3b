//! Single-writer document store for profiles, memories, configuration,
//! access tokens and finished session records.
//!
//! Every change is one canonical JSON line appended to a journal; opening
//! the store replays it. A torn final line is dropped.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sereni_core::config::CaregiverConfig;
use sereni_core::session::SessionRecord;
use sereni_core::{Memory, MemoryId, Role, UserId, UserProfile};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("storage failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt journal {0}")]
    Corrupt(String),
    #[error("{0} already exists")]
    Conflict(String),
    #[error("{0} not found")]
    NotFound(String),
}

/// What a bearer token allows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grant {
    pub user_id: UserId,
    pub role: Role,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum Op {
    PutUser { user: UserProfile },
    PutMemory { memory: Memory },
    DeleteMemory { user_id: UserId, memory_id: MemoryId },
    PutConfig { user_id: UserId, config: CaregiverConfig },
    PutToken { token_sha256: String, grant: Grant },
    PutSession { record: SessionRecord },
}

#[derive(Debug, Default)]
pub struct Store {
    users: BTreeMap<UserId, UserProfile>,
    memories: HashMap<UserId, Vec<Memory>>,
    configs: HashMap<UserId, CaregiverConfig>,
    tokens: HashMap<String, Grant>,
    sessions: Vec<SessionRecord>,
    journal: Option<(PathBuf, File)>,
}

fn token_digest(token: &str) -> String {
    hex::encode(Sha256::digest(token.as_bytes()))
}

impl Store {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(e.into()),
        };
        let mut store = Self::default();
        let lines: Vec<&str> = text.split_inclusive('\n').collect();
        let mut torn = false;
        for (i, raw) in lines.iter().enumerate() {
            let line = raw.trim_end_matches(['\n', '\r']);
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<Op>(line) {
                Ok(op) => store.apply(op),
                Err(_) if i + 1 == lines.len() && !raw.ends_with('\n') => torn = true,
                Err(e) => return Err(StoreError::Corrupt(format!("{}:{}: {e}", path.display(), i + 1))),
            }
        }
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        if torn || (!text.is_empty() && !text.ends_with('\n')) {
            tracing::warn!(path = %path.display(), "dropping torn final journal line");
            let keep: String = lines.iter().filter(|l| l.ends_with('\n')).copied().collect();
            let tmp = path.with_extension("tmp");
            {
                let mut w = BufWriter::new(File::create(&tmp)?);
                w.write_all(keep.as_bytes())?;
                w.flush()?;
                w.get_ref().sync_all()?;
            }
            std::fs::rename(&tmp, &path)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        store.journal = Some((path, file));
        Ok(store)
    }

    fn commit(&mut self, op: Op) -> Result<(), StoreError> {
        if let Some((_, file)) = &mut self.journal {
            let mut line = serde_json::to_string(&op).map_err(|e| StoreError::Corrupt(e.to_string()))?;
            line.push('\n');
            file.write_all(line.as_bytes())?;
            file.sync_data()?;
        }
        self.apply(op);
        Ok(())
    }

    fn apply(&mut self, op: Op) {
        match op {
            Op::PutUser { user } => {
                self.users.insert(user.user_id.clone(), user);
            }
            Op::PutMemory { memory } => {
                let list = self.memories.entry(memory.owner_id.clone()).or_default();
                match list.iter_mut().find(|m| m.memory_id == memory.memory_id) {
                    Some(slot) => *slot = memory,
                    None => list.push(memory),
                }
            }
            Op::DeleteMemory { user_id, memory_id } => {
                if let Some(list) = self.memories.get_mut(&user_id) {
                    list.retain(|m| m.memory_id != memory_id);
                }
            }
            Op::PutConfig { user_id, config } => {
                self.configs.insert(user_id, config);
            }
            Op::PutToken { token_sha256, grant } => {
                self.tokens.insert(token_sha256, grant);
            }
            Op::PutSession { record } => self.sessions.push(record),
        }
    }

    pub fn users(&self) -> impl Iterator<Item = &UserProfile> {
        self.users.values()
    }

    pub fn user(&self, id: &UserId) -> Option<&UserProfile> {
        self.users.get(id)
    }

    pub fn has_caregiver(&self) -> bool {
        self.users.values().any(|u| u.role == Role::Caregiver)
    }

    pub fn create_user(&mut self, user: UserProfile) -> Result<(), StoreError> {
        if self.users.contains_key(&user.user_id) {
            return Err(StoreError::Conflict(format!("user {}", user.user_id.as_str())));
        }
        self.commit(Op::PutUser { user })
    }

    /// The user's memories in creation order.
    pub fn memories(&self, user: &UserId) -> &[Memory] {
        self.memories.get(user).map_or(&[], Vec::as_slice)
    }

    pub fn memory(&self, user: &UserId, id: &MemoryId) -> Option<&Memory> {
        self.memories(user).iter().find(|m| &m.memory_id == id)
    }

    pub fn put_memory(&mut self, memory: Memory) -> Result<(), StoreError> {
        if !self.users.contains_key(&memory.owner_id) {
            return Err(StoreError::NotFound(format!("user {}", memory.owner_id.as_str())));
        }
        self.commit(Op::PutMemory { memory })
    }

    pub fn delete_memory(&mut self, user: &UserId, id: &MemoryId) -> Result<(), StoreError> {
        if self.memory(user, id).is_none() {
            return Err(StoreError::NotFound(format!("memory {}", id.as_str())));
        }
        self.commit(Op::DeleteMemory {
            user_id: user.clone(),
            memory_id: id.clone(),
        })
    }

    pub fn config(&self, user: &UserId) -> CaregiverConfig {
        self.configs.get(user).cloned().unwrap_or_default()
    }

    pub fn put_config(&mut self, user: &UserId, config: CaregiverConfig) -> Result<(), StoreError> {
        self.commit(Op::PutConfig {
            user_id: user.clone(),
            config,
        })
    }

    /// Stores a new token for `grant`. Only a digest is kept.
    pub fn issue_token(&mut self, token: &str, grant: Grant) -> Result<(), StoreError> {
        self.commit(Op::PutToken {
            token_sha256: token_digest(token),
            grant,
        })
    }

    pub fn grant(&self, token: &str) -> Option<&Grant> {
        self.tokens.get(&token_digest(token))
    }

    /// Finished sessions of `user`, oldest first.
    pub fn sessions(&self, user: &UserId) -> Vec<SessionRecord> {
        self.sessions.iter().filter(|r| &r.user_id == user).cloned().collect()
    }

    pub fn session(&self, id: &str) -> Option<&SessionRecord> {
        self.sessions.iter().find(|r| r.session_id == id)
    }

    pub fn put_session(&mut self, record: SessionRecord) -> Result<(), StoreError> {
        if self.session(&record.session_id).is_some() {
            return Err(StoreError::Conflict(format!("session {}", record.session_id)));
        }
        self.commit(Op::PutSession { record })
    }
}
