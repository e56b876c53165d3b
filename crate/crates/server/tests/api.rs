mod common;

use std::collections::BTreeMap;

use serde_json::{json, Value};
use sereni_core::analytics::{OverviewReport, Period, TelemetryEvent};
use sereni_core::config::PlanSettings;
use sereni_core::events::{FallbackEvents, HistoricalEvent};
use sereni_core::games::{eligible_games, Answer, GenConfig};
use sereni_core::session::{plan_session, SessionPlan, SessionRecord};
use sereni_core::{GameType, Memory, MemoryCategory, UserProfile};
use sereni_server::openapi::ENDPOINTS;
use sereni_testkit::oracles::naive_overview;
use sereni_testkit::{five_game_user, presenters::wrong_answer, worked_example};

use common::{memory_input, start, Server};

/// A server with a caregiver `carla` and the worked-example senior `maria`.
fn seeded() -> (Server, String, String, Vec<Memory>) {
    let s = start();
    let care = s.user(None, "carla", "Carla", None, "caregiver");
    let f = worked_example();
    let senior = s.user(Some(&care), "maria", &f.profile.display_name, f.profile.birth_year, "senior");
    let stored = s.upload_memories(&care, "maria", &f.memories);
    (s, care, senior, stored)
}

#[test]
fn every_documented_route_is_served() {
    let (s, care, _, _) = seeded();
    for e in ENDPOINTS {
        let path = e.path.replace("{id}", "nobody").replace("{memory_id}", "none").replace("{media_ref}", "none");
        let r = match e.method {
            "get" => s.get(&path, Some(&care)),
            "delete" => s.delete(&path, Some(&care)),
            m => s.send_raw(&m.to_uppercase(), &path, Some(&care), "application/json", b"{}"),
        };
        assert_ne!(r.status, 405, "{} {} is not routed", e.method, e.path);
        assert!(
            !r.body.contains("no such route"),
            "{} {} fell through to the fallback",
            e.method,
            e.path
        );
        let documented = std::iter::once(e.success).chain(e.errors.iter().copied()).any(|c| c == r.status);
        assert!(documented, "{} {} answered undocumented {}: {}", e.method, e.path, r.status, r.body);
    }
    assert_eq!(s.get("/no/such/thing", Some(&care)).status, 404);
}

#[test]
fn openapi_document_is_served() {
    let s = start();
    let r = s.get("/openapi.json", None);
    assert_eq!(r.status, 200);
    assert_eq!(r.value(), sereni_server::openapi::document());
    assert_eq!(r.value()["openapi"], "3.0.3");
}

#[test]
fn bootstrap_then_caregiver_only_user_creation() {
    let s = start();
    let care = s.user(None, "carla", "Carla", None, "caregiver");
    let body = json!({ "display_name": "Piero", "role": "senior" });
    assert_eq!(s.post("/users", None, &body).status, 401);
    assert_eq!(s.post("/users", Some("bogus"), &body).status, 401);
    let senior = s.user(Some(&care), "piero", "Piero", Some(1938), "senior");
    assert_eq!(s.post("/users", Some(&senior), &body).status, 403);
    let dup = json!({ "user_id": "piero", "display_name": "Other", "role": "senior" });
    assert_eq!(s.post("/users", Some(&care), &dup).status, 409);
    let bad = json!({ "display_name": "  ", "role": "senior" });
    assert_eq!(s.post("/users", Some(&care), &bad).status, 400);
    let future = json!({ "display_name": "Neo", "birth_year": 3000, "role": "senior" });
    assert_eq!(s.post("/users", Some(&care), &future).status, 400);
    let generated = s.post("/users", Some(&care), &json!({ "display_name": "Ugo" }));
    assert_eq!(generated.status, 201);
    assert!(!generated.value()["user"]["user_id"].as_str().unwrap().is_empty());
    assert_eq!(generated.value()["user"]["role"], "senior");
}

#[test]
fn seniors_cannot_reach_caregiver_surfaces() {
    let (s, care, senior, _) = seeded();
    let other = s.user(Some(&care), "piero", "Piero", Some(1938), "senior");
    assert_eq!(s.get("/users/maria/config", Some(&senior)).status, 403);
    assert_eq!(s.send("PUT", "/users/maria/config", Some(&senior), &json!({})).status, 403);
    assert_eq!(s.get("/users/maria/analytics/overview", Some(&senior)).status, 403);
    assert_eq!(s.get("/sessions/anything/analytics", Some(&senior)).status, 403);
    assert_eq!(s.get("/users", Some(&senior)).status, 403);
    assert_eq!(s.get("/users/maria/memories", Some(&other)).status, 403);
    assert_eq!(s.post("/users/maria/sessions", Some(&other), &json!({})).status, 403);
    assert_eq!(s.get("/users/maria/memories", None).status, 401);
    assert_eq!(s.get("/events?year=1945", None).status, 401);

    assert_eq!(s.get("/users/maria", Some(&senior)).status, 200);
    assert_eq!(s.get("/users/maria/memories", Some(&senior)).status, 200);
    assert_eq!(s.get("/users/maria/config", Some(&care)).status, 200);
    assert_eq!(s.get("/users/maria/analytics/overview", Some(&care)).status, 200);
}

#[test]
fn stored_memory_reads_back_as_canonical_json() {
    let (s, care, senior, _) = seeded();
    let m = Memory::new("ignored", "ignored", MemoryCategory::Hobbies, "Making tomato sauce")
        .with_description("Every August with my mother.")
        .with_age(9)
        .with_steps(["pick", "boil", "sieve", "bottle"]);
    let created = s.post("/users/maria/memories", Some(&senior), &memory_input(&m));
    assert_eq!(created.status, 201, "{}", created.body);
    let stored: Memory = created.json();
    let expected = Memory {
        memory_id: stored.memory_id.clone(),
        owner_id: "maria".into(),
        ..m
    };
    assert_eq!(stored, expected);

    let got = s.get(&format!("/users/maria/memories/{}", stored.memory_id), Some(&care));
    assert_eq!(got.status, 200);
    assert_eq!(got.body, serde_json::to_string(&expected).unwrap());

    let listed = s.get("/users/maria/memories?category=Hobbies", Some(&care));
    assert_eq!(listed.body, serde_json::to_string(&vec![expected.clone()]).unwrap());

    let edited = Memory {
        title: "Bottling tomatoes".into(),
        ..expected.clone()
    };
    let put = s.send("PUT", &format!("/users/maria/memories/{}", stored.memory_id), Some(&senior), &memory_input(&edited));
    assert_eq!(put.status, 200, "{}", put.body);
    assert_eq!(put.body, serde_json::to_string(&edited).unwrap());

    let path = format!("/users/maria/memories/{}", stored.memory_id);
    assert_eq!(s.delete(&path, Some(&care)).status, 204);
    assert_eq!(s.get(&path, Some(&care)).status, 404);
    assert_eq!(s.delete(&path, Some(&care)).status, 404);
}

#[test]
fn invalid_memories_are_rejected_with_field_violations() {
    let (s, _, senior, _) = seeded();
    let path = "/users/maria/memories";
    let steps_on_event = json!({ "category": "Events", "title": "Moon landing", "hobby_steps": ["a", "b", "c"] });
    let r = s.post(path, Some(&senior), &steps_on_event);
    assert_eq!(r.status, 400);
    let fields: Vec<String> = r.value()["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["field"].as_str().unwrap().to_string())
        .collect();
    assert!(fields.contains(&"hobby_steps".to_string()), "{fields:?}");

    let unknown = s.post(path, Some(&senior), &json!({ "category": "Sports", "title": "Football" }));
    assert_eq!(unknown.status, 400);
    assert_eq!(unknown.value()["violations"][0]["field"], "category");

    let missing_category = s.post(path, Some(&senior), &json!({ "title": "Football" }));
    assert_eq!(missing_category.status, 400);
    let garbage = s.send_raw("POST", path, Some(&senior), "application/json", b"{not json");
    assert_eq!(garbage.status, 400);
    assert!(garbage.value()["error"].is_string());
    assert_eq!(s.get("/users/maria/memories?category=Sports", Some(&senior)).status, 400);
    let fine = json!({ "category": "Places", "title": "Genoa" });
    assert_eq!(s.post("/users/nobody/memories", Some(&senior), &fine).status, 403);
}

#[test]
fn events_fall_back_to_the_bundled_dataset() {
    let (s, care, _, _) = seeded();
    let r = s.get("/events?year=1945", Some(&care));
    assert_eq!(r.status, 200, "{}", r.body);
    let got: Vec<HistoricalEvent> = r.json();
    let file: Value = serde_json::from_str(
        &std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/historical_events.json")).unwrap(),
    )
    .unwrap();
    let shipped: Vec<String> = file["events"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["year"] == 1945)
        .map(|e| e["event_text"].as_str().unwrap().to_string())
        .collect();
    assert!(!shipped.is_empty());
    assert!(got.iter().all(|e| e.year == 1945));
    assert_eq!(got.iter().map(|e| e.event_text.clone()).collect::<Vec<_>>(), shipped);
    assert_eq!(got, FallbackEvents::bundled().lookup(1945));
    assert_eq!(s.get("/events?year=1850", Some(&care)).status, 502);
    assert_eq!(s.get("/events?year=soon", Some(&care)).status, 400);
    assert_eq!(s.get("/events", Some(&care)).status, 400);
}

#[test]
fn api_matches_the_domain_functions() {
    let (s, care, senior, stored) = seeded();
    let profile: UserProfile = s.get("/users/maria", Some(&senior)).json();

    let counts: BTreeMap<GameType, usize> = s.get("/users/maria/eligible-games", Some(&senior)).json();
    assert_eq!(counts, eligible_games(&stored, &profile, &GenConfig::default()));

    let events = common_events();
    let r = s.post("/users/maria/sessions", Some(&senior), &json!({ "seed": 77 }));
    assert_eq!(r.status, 201, "{}", r.body);
    let plan: SessionPlan = r.json();
    let settings = PlanSettings {
        gen: GenConfig::with_seed(77),
        ..PlanSettings::default()
    };
    let direct = plan_session(&profile, &stored, &settings, None, &[], &events).unwrap();
    assert_eq!(plan, direct);

    let record = play_through(&s, &senior, &plan, |_, _| None);
    assert_eq!(record.completion_level, 1.0);

    let session_events: Vec<TelemetryEvent> = s.get(&format!("/sessions/{}/analytics", plan.session_id), Some(&care)).json();
    assert_eq!(session_events.len(), plan.exercises.len());
    let overview: OverviewReport = s.get("/users/maria/analytics/overview", Some(&care)).json();
    assert_eq!(overview, naive_overview(&session_events, &"maria".into(), &Period::all()));
    assert_eq!(overview.sessions_played, 1);
    assert_eq!(overview.mean_score, Some(1.0));

    let recent: OverviewReport = s.get("/users/maria/analytics/overview?period=30d", Some(&care)).json();
    assert_eq!(recent.total_events, plan.exercises.len());
    let future: OverviewReport = s
        .get("/users/maria/analytics/overview?from=2999-01-01T00:00:00Z", Some(&care))
        .json();
    assert_eq!(future.total_events, 0);
    assert_eq!(s.get("/users/maria/analytics/overview?period=soon", Some(&care)).status, 400);
}

fn common_events() -> sereni_core::events::ChainedEvents<sereni_server::http_events::HttpEvents> {
    sereni_server::state::events_provider(Some(common::DEAD_EVENTS_URL), std::time::Duration::from_secs(2))
}

/// Answers every exercise of `plan`, correctly unless `override_answer`
/// returns something else, and returns the closing summary.
fn play_through(
    s: &Server,
    token: &str,
    plan: &SessionPlan,
    override_answer: impl Fn(usize, &sereni_core::games::Exercise) -> Option<Value>,
) -> SessionRecord {
    let path = format!("/sessions/{}/answers", plan.session_id);
    let mut summary = None;
    for (i, e) in plan.exercises.iter().enumerate() {
        let body = override_answer(i, e).unwrap_or_else(|| json!({ "answer": e.answer_key() }));
        let r = s.post(&path, Some(token), &body);
        assert_eq!(r.status, 200, "{}", r.body);
        let v = r.value();
        assert_eq!(v["next_index"], i + 1);
        let next = plan.exercises.get(i + 1).map(|n| serde_json::to_value(n).unwrap());
        assert_eq!(v.get("next_exercise").cloned(), next);
        if i + 1 == plan.exercises.len() {
            summary = Some(serde_json::from_value(v["summary"].clone()).unwrap());
        } else {
            assert!(v.get("summary").is_none());
        }
    }
    summary.expect("plan had exercises")
}

#[test]
fn a_user_has_at_most_one_open_session() {
    let (s, care, senior, _) = seeded();
    let first = s.post("/users/maria/sessions", Some(&senior), &json!({}));
    assert_eq!(first.status, 201, "{}", first.body);
    let plan: SessionPlan = first.json();
    assert_eq!(s.post("/users/maria/sessions", Some(&care), &json!({ "seed": 5 })).status, 409);

    let open = s.get(&format!("/sessions/{}", plan.session_id), Some(&senior)).value();
    assert_eq!(open["status"], "open");
    assert_eq!(open["next_index"], 0);

    let stop = s.post(&format!("/sessions/{}/answers", plan.session_id), Some(&senior), &json!({ "stop": true }));
    assert_eq!(stop.status, 200);
    let record: SessionRecord = serde_json::from_value(stop.value()["summary"].clone()).unwrap();
    assert_eq!(record.completion_level, 0.0);
    assert_eq!(
        s.post(&format!("/sessions/{}/answers", plan.session_id), Some(&senior), &json!({ "stop": true }))
            .status,
        409
    );
    let closed = s.get(&format!("/sessions/{}", plan.session_id), Some(&care)).value();
    assert_eq!(closed["status"], "closed");

    let again = s.post("/users/maria/sessions", Some(&senior), &json!({ "chosen_type": "MusicGame" }));
    assert_eq!(again.status, 201, "{}", again.body);
    let plan: SessionPlan = again.json();
    assert!(plan.exercises.iter().all(|e| e.game_type == GameType::MusicGame));
    assert_eq!(s.get("/sessions/unknown", Some(&care)).status, 404);
    assert_eq!(s.post("/sessions/unknown/answers", Some(&care), &json!({ "stop": true })).status, 404);
}

#[test]
fn answers_are_graded_with_feedback_and_reread() {
    let s = start();
    let care = s.user(None, "carla", "Carla", None, "caregiver");
    let f = five_game_user();
    let token = s.user(Some(&care), f.profile.user_id.as_str(), &f.profile.display_name, f.profile.birth_year, "senior");
    s.upload_memories(&care, f.profile.user_id.as_str(), &f.memories);
    let sessions = format!("/users/{}/sessions", f.profile.user_id);
    let plan: SessionPlan = s.post(&sessions, Some(&token), &json!({ "seed": 3 })).json();
    let path = format!("/sessions/{}/answers", plan.session_id);

    assert_eq!(s.post(&path, Some(&token), &json!({})).status, 400);
    assert_eq!(s.post(&path, Some(&token), &json!({ "stop": true, "timed_out": true })).status, 400);
    let mismatched = match plan.exercises[0].answer_key() {
        Answer::Choice(_) => json!({ "answer": { "order": [0] } }),
        _ => json!({ "answer": { "choice": 0 } }),
    };
    assert_eq!(s.post(&path, Some(&token), &mismatched).status, 400);

    let mut seen_timeout = false;
    for (i, e) in plan.exercises.iter().enumerate() {
        let (body, correct) = match i % 3 {
            0 => (json!({ "answer": e.answer_key() }), true),
            1 => (json!({ "answer": wrong_answer(e) }), false),
            _ => (json!({ "timed_out": true }), false),
        };
        let v = s.post(&path, Some(&token), &body).value();
        assert_eq!(v["grade"]["correct"], correct, "{v}");
        let reread = v.get("reread_text").is_some();
        assert_eq!(reread, correct && e.game_type == GameType::MemoryCompletion);
        if i % 3 == 2 {
            assert_eq!(v["timed_out"], true);
            assert_eq!(v["grade"]["errors"], 1);
            assert_eq!(v["grade"]["score"], 0.0);
            seen_timeout = true;
        }
        if !correct && matches!(e.answer_key(), Answer::Choice(_)) {
            assert!(v["correct_answer"].is_string(), "{v}");
        }
    }
    assert!(seen_timeout);

    let view: Value = s.get(&format!("/sessions/{}", plan.session_id), Some(&token)).value();
    assert_eq!(view["status"], "closed");
    assert_eq!(view["record"]["end_reason"], "completed");
}

#[test]
fn caregiver_config_shapes_the_next_plan() {
    let (s, care, senior, _) = seeded();
    assert_eq!(s.get("/users/maria/config", Some(&care)).body, "{}");
    let bad = s.send("PUT", "/users/maria/config", Some(&care), &json!({ "option_count": 1 }));
    assert_eq!(bad.status, 400);
    assert_eq!(bad.value()["violations"][0]["field"], "option_count");
    let cfg = json!({ "option_count": 3, "enabled_games": ["MemoryCompletion"] });
    let put = s.send("PUT", "/users/maria/config", Some(&care), &cfg);
    assert_eq!(put.status, 200, "{}", put.body);
    assert_eq!(s.get("/users/maria/config", Some(&care)).value(), cfg);

    let plan: SessionPlan = s.post("/users/maria/sessions", Some(&senior), &json!({ "seed": 1 })).json();
    assert!(!plan.exercises.is_empty());
    for e in &plan.exercises {
        assert_eq!(e.game_type, GameType::MemoryCompletion);
        let sereni_core::games::Payload::MultipleChoice(mc) = &e.payload else {
            panic!("completion is multiple choice");
        };
        assert_eq!(mc.options.len(), 3);
    }
}

#[test]
fn media_is_content_addressed() {
    let (s, care, senior, _) = seeded();
    let clip = b"ID3 not really an mp3";
    let up = s.send_raw("POST", "/media", Some(&care), "audio/mpeg", clip);
    assert_eq!(up.status, 201, "{}", up.body);
    let media_ref = up.value()["media_ref"].as_str().unwrap().to_string();
    assert_eq!(media_ref, sereni_server::media::media_ref(clip));
    let again = s.send_raw("POST", "/media", Some(&senior), "audio/mpeg", clip);
    assert_eq!(again.value()["media_ref"], media_ref.as_str());

    let resp = ureq::get(&format!("{}/media/{media_ref}", s.base))
        .set("Authorization", &format!("Bearer {senior}"))
        .call()
        .unwrap();
    assert_eq!(resp.content_type(), "audio/mpeg");
    let mut bytes = Vec::new();
    std::io::Read::read_to_end(&mut resp.into_reader(), &mut bytes).unwrap();
    assert_eq!(bytes, clip);
    assert_eq!(s.get("/media/sha256:00", Some(&care)).status, 404);
    assert_eq!(s.send_raw("POST", "/media", Some(&care), "audio/mpeg", b"").status, 400);
    assert_eq!(s.send_raw("POST", "/media", None, "audio/mpeg", clip).status, 401);
}

#[test]
fn state_survives_a_restart() {
    use sereni_server::{AppState, ServiceConfig};
    let dir = tempfile::tempdir().unwrap();
    let cfg = ServiceConfig {
        data_dir: dir.path().to_path_buf(),
        events_url: None,
        request_timeout: std::time::Duration::from_secs(1),
    };
    {
        let state = AppState::open(&cfg).unwrap();
        let mut store = state.store();
        store.create_user(sereni_testkit::fixtures::senior("ada", "Ada", Some(1930))).unwrap();
        store.put_memory(Memory::new("m1", "ada", MemoryCategory::Places, "Genoa")).unwrap();
    }
    let state = AppState::open(&cfg).unwrap();
    let store = state.store();
    assert_eq!(store.users().count(), 1);
    assert_eq!(store.memories(&"ada".into()).len(), 1);
}
