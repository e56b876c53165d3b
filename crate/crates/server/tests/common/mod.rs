#![allow(dead_code)]

use std::net::SocketAddr;
use std::sync::mpsc;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use sereni_core::analytics::EventLog;
use sereni_core::Memory;
use sereni_server::state::events_provider;
use sereni_server::store::Store;
use sereni_server::{router, AppState};

/// Nothing listens on port 1, so the external events source always fails.
pub const DEAD_EVENTS_URL: &str = "http://127.0.0.1:1";

pub struct Server {
    pub base: String,
    _media: tempfile::TempDir,
}

/// Starts the service on an ephemeral port with in-memory storage.
pub fn start() -> Server {
    let media = tempfile::tempdir().unwrap();
    let events = events_provider(Some(DEAD_EVENTS_URL), Duration::from_secs(2));
    let state = AppState::new(Store::in_memory(), EventLog::in_memory(), media.path(), std::sync::Arc::new(events));
    let (tx, rx) = mpsc::channel::<SocketAddr>();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, router(state)).await.unwrap();
        });
    });
    let addr = rx.recv_timeout(Duration::from_secs(10)).expect("server did not start");
    Server {
        base: format!("http://{addr}"),
        _media: media,
    }
}

#[derive(Debug)]
pub struct Reply {
    pub status: u16,
    pub body: String,
}

impl Reply {
    pub fn json<T: DeserializeOwned>(&self) -> T {
        serde_json::from_str(&self.body).unwrap_or_else(|e| panic!("{e}: {}", self.body))
    }

    pub fn value(&self) -> Value {
        self.json()
    }
}

impl Server {
    fn request(&self, method: &str, path: &str, token: Option<&str>) -> ureq::Request {
        let mut req = ureq::request(method, &format!("{}{path}", self.base)).timeout(Duration::from_secs(20));
        if let Some(t) = token {
            req = req.set("Authorization", &format!("Bearer {t}"));
        }
        req
    }

    fn finish(result: Result<ureq::Response, ureq::Error>) -> Reply {
        let resp = match result {
            Ok(r) => r,
            Err(ureq::Error::Status(_, r)) => r,
            Err(e) => panic!("transport error: {e}"),
        };
        let status = resp.status();
        Reply {
            status,
            body: resp.into_string().unwrap(),
        }
    }

    pub fn get(&self, path: &str, token: Option<&str>) -> Reply {
        Self::finish(self.request("GET", path, token).call())
    }

    pub fn delete(&self, path: &str, token: Option<&str>) -> Reply {
        Self::finish(self.request("DELETE", path, token).call())
    }

    pub fn send<B: Serialize>(&self, method: &str, path: &str, token: Option<&str>, body: &B) -> Reply {
        Self::finish(self.request(method, path, token).send_json(body))
    }

    pub fn send_raw(&self, method: &str, path: &str, token: Option<&str>, content_type: &str, body: &[u8]) -> Reply {
        Self::finish(
            self.request(method, path, token)
                .set("Content-Type", content_type)
                .send_bytes(body),
        )
    }

    pub fn post<B: Serialize>(&self, path: &str, token: Option<&str>, body: &B) -> Reply {
        self.send("POST", path, token, body)
    }

    /// Creates a user and returns its token.
    pub fn user(&self, token: Option<&str>, id: &str, name: &str, birth_year: Option<i32>, role: &str) -> String {
        let r = self.post(
            "/users",
            token,
            &serde_json::json!({ "user_id": id, "display_name": name, "birth_year": birth_year, "role": role }),
        );
        assert_eq!(r.status, 201, "{}", r.body);
        r.value()["token"].as_str().unwrap().to_string()
    }

    /// Uploads fixture memories for `user` and returns the stored versions.
    pub fn upload_memories(&self, token: &str, user: &str, memories: &[Memory]) -> Vec<Memory> {
        memories
            .iter()
            .filter(|m| m.owner_id.as_str() == user)
            .map(|m| {
                let r = self.post(&format!("/users/{user}/memories"), Some(token), &memory_input(m));
                assert_eq!(r.status, 201, "{}", r.body);
                r.json()
            })
            .collect()
    }
}

/// The request body that recreates `m` under a new id.
pub fn memory_input(m: &Memory) -> Value {
    let mut v = serde_json::to_value(m).unwrap();
    let o = v.as_object_mut().unwrap();
    o.remove("memory_id");
    o.remove("owner_id");
    v
}
