use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::JsonRejection;
use axum::extract::{DefaultBodyLimit, FromRequest, Path, Query, Request, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sereni_core::analytics::{OverviewReport, Period, TelemetryEvent};
use sereni_core::events::HistoricalEvent;
use sereni_core::games::{eligible_games, grade, Answer, Exercise, GameError, GradeResult, Payload};
use sereni_core::model::{validate_profile, MemoryInput};
use sereni_core::session::{completion_level, plan_session, EndReason, Outcome, SessionError, SessionPlan, SessionRecord};
use sereni_core::{GameType, Memory, MemoryCategory, MemoryId, Role, UserId, UserProfile};

use crate::auth::{Caller, MaybeCaller};
use crate::error::ApiError;
use crate::media;
use crate::openapi;
use crate::state::{AppState, LiveSession};
use crate::store::Grant;

type ApiResult<T> = Result<T, ApiError>;

/// JSON body whose rejections come back as 400 with the usual error shape.
pub struct Body<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for Body<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        match Json::<T>::from_request(req, state).await {
            Ok(Json(v)) => Ok(Body(v)),
            Err(e @ JsonRejection::MissingJsonContentType(_)) => Err(ApiError::bad(e.body_text())),
            Err(e) => Err(ApiError::bad(e.body_text())),
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/users", post(create_user).get(list_users))
        .route("/users/{id}", get(get_user))
        .route("/users/{id}/memories", post(create_memory).get(list_memories))
        .route(
            "/users/{id}/memories/{memory_id}",
            get(get_memory).put(replace_memory).delete(delete_memory),
        )
        .route("/users/{id}/eligible-games", get(eligible))
        .route("/users/{id}/sessions", post(start_session))
        .route("/sessions/{id}", get(session_state))
        .route("/sessions/{id}/answers", post(answer))
        .route("/users/{id}/analytics/overview", get(overview))
        .route("/sessions/{id}/analytics", get(session_analytics))
        .route("/users/{id}/config", get(get_config).put(put_config))
        .route("/events", get(events))
        .route(
            "/media",
            post(upload_media).layer(DefaultBodyLimit::max(media::MAX_UPLOAD_BYTES)),
        )
        .route("/media/{media_ref}", get(download_media))
        .route("/openapi.json", get(|| async { Json(openapi::document()) }))
        .fallback(|| async { ApiError::NotFound(NO_ROUTE.into()) })
        .with_state(state)
}

pub const NO_ROUTE: &str = "no such route";

fn user_exists(state: &AppState, id: &UserId) -> ApiResult<UserProfile> {
    state
        .store()
        .user(id)
        .cloned()
        .ok_or_else(|| ApiError::NotFound(format!("user {} not found", id.as_str())))
}

fn new_id(prefix: &str) -> String {
    format!("{prefix}-{}", uuid::Uuid::new_v4().simple())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NewUser {
    #[serde(default)]
    user_id: Option<String>,
    display_name: String,
    #[serde(default)]
    birth_year: Option<i32>,
    #[serde(default = "senior")]
    role: Role,
}

fn senior() -> Role {
    Role::Senior
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CreatedUser {
    pub user: UserProfile,
    /// Bearer token for the new user; shown only once.
    pub token: String,
}

/// Open until the first caregiver exists; caregivers only afterwards.
async fn create_user(
    State(state): State<Arc<AppState>>,
    MaybeCaller(caller): MaybeCaller,
    Body(body): Body<NewUser>,
) -> ApiResult<(StatusCode, Json<CreatedUser>)> {
    let mut store = state.store();
    if store.has_caregiver() && !caller.as_ref().is_some_and(|g| g.role == Role::Caregiver) {
        return Err(match caller {
            None => ApiError::Unauthorized,
            Some(_) => ApiError::Forbidden("caregiver role required".into()),
        });
    }
    let user = UserProfile {
        user_id: body.user_id.unwrap_or_else(|| new_id("u")).into(),
        display_name: body.display_name,
        birth_year: body.birth_year,
        role: body.role,
    };
    let mut violations = validate_profile(&user);
    if user.user_id.as_str().trim().is_empty() {
        violations.push(sereni_core::model::Violation::new("user_id", "user_id must not be empty"));
    }
    if !violations.is_empty() {
        return Err(ApiError::invalid(violations));
    }
    store.create_user(user.clone())?;
    let token = format!("{}{}", uuid::Uuid::new_v4().simple(), uuid::Uuid::new_v4().simple());
    store.issue_token(
        &token,
        Grant {
            user_id: user.user_id.clone(),
            role: user.role,
        },
    )?;
    Ok((StatusCode::CREATED, Json(CreatedUser { user, token })))
}

async fn list_users(State(state): State<Arc<AppState>>, caller: Caller) -> ApiResult<Json<Vec<UserProfile>>> {
    caller.caregiver_only()?;
    Ok(Json(state.store().users().cloned().collect()))
}

async fn get_user(
    State(state): State<Arc<AppState>>,
    caller: Caller,
    Path(id): Path<String>,
) -> ApiResult<Json<UserProfile>> {
    let id = UserId::from(id);
    caller.may_act_for(&id)?;
    Ok(Json(user_exists(&state, &id)?))
}

async fn create_memory(
    State(state): State<Arc<AppState>>,
    caller: Caller,
    Path(id): Path<String>,
    Body(input): Body<MemoryInput>,
) -> ApiResult<(StatusCode, Json<Memory>)> {
    let id = UserId::from(id);
    caller.may_act_for(&id)?;
    user_exists(&state, &id)?;
    let memory = input
        .into_memory(new_id("m").into(), id)
        .map_err(ApiError::invalid)?;
    state.store().put_memory(memory.clone())?;
    Ok((StatusCode::CREATED, Json(memory)))
}

#[derive(Debug, Deserialize)]
struct CategoryFilter {
    category: Option<String>,
}

async fn list_memories(
    State(state): State<Arc<AppState>>,
    caller: Caller,
    Path(id): Path<String>,
    Query(filter): Query<CategoryFilter>,
) -> ApiResult<Json<Vec<Memory>>> {
    let id = UserId::from(id);
    caller.may_act_for(&id)?;
    user_exists(&state, &id)?;
    let category = match filter.category.as_deref() {
        None => None,
        Some(token) => Some(token.parse::<MemoryCategory>().map_err(|e| {
            ApiError::invalid(vec![sereni_core::model::Violation::new("category", e.to_string())])
        })?),
    };
    let store = state.store();
    Ok(Json(
        store
            .memories(&id)
            .iter()
            .filter(|m| category.is_none_or(|c| m.category == c))
            .cloned()
            .collect(),
    ))
}

fn find_memory(state: &AppState, user: &UserId, memory: &MemoryId) -> ApiResult<Memory> {
    state
        .store()
        .memory(user, memory)
        .cloned()
        .ok_or_else(|| ApiError::NotFound(format!("memory {} not found", memory.as_str())))
}

async fn get_memory(
    State(state): State<Arc<AppState>>,
    caller: Caller,
    Path((id, memory_id)): Path<(String, String)>,
) -> ApiResult<Json<Memory>> {
    let id = UserId::from(id);
    caller.may_act_for(&id)?;
    Ok(Json(find_memory(&state, &id, &memory_id.into())?))
}

async fn replace_memory(
    State(state): State<Arc<AppState>>,
    caller: Caller,
    Path((id, memory_id)): Path<(String, String)>,
    Body(input): Body<MemoryInput>,
) -> ApiResult<Json<Memory>> {
    let id = UserId::from(id);
    caller.may_act_for(&id)?;
    let existing = find_memory(&state, &id, &memory_id.into())?;
    let memory = input
        .into_memory(existing.memory_id, id)
        .map_err(ApiError::invalid)?;
    state.store().put_memory(memory.clone())?;
    Ok(Json(memory))
}

async fn delete_memory(
    State(state): State<Arc<AppState>>,
    caller: Caller,
    Path((id, memory_id)): Path<(String, String)>,
) -> ApiResult<StatusCode> {
    let id = UserId::from(id);
    caller.may_act_for(&id)?;
    state.store().delete_memory(&id, &memory_id.into())?;
    Ok(StatusCode::NO_CONTENT)
}

async fn eligible(
    State(state): State<Arc<AppState>>,
    caller: Caller,
    Path(id): Path<String>,
) -> ApiResult<Json<BTreeMap<GameType, usize>>> {
    let id = UserId::from(id);
    caller.may_act_for(&id)?;
    let profile = user_exists(&state, &id)?;
    let store = state.store();
    let settings = store.config(&id).settings(0);
    Ok(Json(eligible_games(store.memories(&id), &profile, &settings.gen)))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionRequest {
    #[serde(default)]
    pub chosen_type: Option<GameType>,
    #[serde(default)]
    pub seed: Option<u64>,
}

async fn start_session(
    State(state): State<Arc<AppState>>,
    caller: Caller,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<SessionPlan>)> {
    let id = UserId::from(id);
    caller.may_act_for(&id)?;
    let request: SessionRequest = if body.iter().all(u8::is_ascii_whitespace) {
        SessionRequest::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::bad(format!("invalid session request: {e}")))?
    };
    let profile = user_exists(&state, &id)?;
    if let Some(open) = state.registry.active_session(&id) {
        return Err(ApiError::Conflict(format!("session {open} is still open")));
    }

    let (memories, history, config) = {
        let store = state.store();
        (store.memories(&id).to_vec(), store.sessions(&id), store.config(&id))
    };
    let seed = request
        .seed
        .unwrap_or_else(|| uuid::Uuid::new_v4().as_u64_pair().0);
    let settings = config.settings(seed);
    let events = Arc::clone(&state.events);
    let chosen = request.chosen_type;
    let plan = tokio::task::spawn_blocking(move || {
        plan_session(&profile, &memories, &settings, chosen, &history, &*events)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))?
    .map_err(|e| match e {
        SessionError::NoEligibleMaterial(_) => ApiError::invalid(vec![sereni_core::model::Violation::new(
            "chosen_type",
            e.to_string(),
        )]),
        SessionError::Game(GameError::InvalidConfig(v)) => ApiError::invalid(v),
        other => ApiError::Internal(other.to_string()),
    })?;

    let mut live = state.live();
    if live.contains_key(&plan.session_id) || state.store().session(&plan.session_id).is_some() {
        return Err(ApiError::Conflict(format!(
            "session {} already exists; retry with another seed",
            plan.session_id
        )));
    }
    let slot = state
        .registry
        .begin(&id, &plan.session_id)
        .map_err(|e| ApiError::Conflict(e.to_string()))?;
    let now = Utc::now();
    live.insert(
        plan.session_id.clone(),
        LiveSession {
            record: SessionRecord::new(&plan, now),
            plan: plan.clone(),
            next: 0,
            presented_at: now,
            _slot: slot,
        },
    );
    Ok((StatusCode::CREATED, Json(plan)))
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer: Option<Answer>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub timed_out: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub stop: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AnswerResponse {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grade: Option<GradeResult>,
    #[serde(default)]
    pub timed_out: bool,
    /// The right option, for choice questions answered wrongly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correct_answer: Option<String>,
    /// Memory text to display and read back after a right completion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reread_text: Option<String>,
    /// Index of `next_exercise` in the plan.
    pub next_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub next_exercise: Option<Exercise>,
    /// Present once the session has ended.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<SessionRecord>,
}

fn correct_text(e: &Exercise) -> Option<String> {
    match &e.payload {
        Payload::MultipleChoice(mc) => Some(mc.correct_option().to_string()),
        Payload::Music(m) => Some(m.question.correct_option().to_string()),
        _ => None,
    }
}

async fn answer(
    State(state): State<Arc<AppState>>,
    caller: Caller,
    Path(sid): Path<String>,
    Body(req): Body<AnswerRequest>,
) -> ApiResult<Json<AnswerResponse>> {
    if usize::from(req.answer.is_some()) + usize::from(req.timed_out) + usize::from(req.stop) != 1 {
        return Err(ApiError::bad("send exactly one of answer, timed_out or stop"));
    }
    let mut live = state.live();
    let Some(session) = live.get_mut(&sid) else {
        drop(live);
        return Err(match state.store().session(&sid) {
            Some(_) => ApiError::Conflict(format!("session {sid} has already ended")),
            None => ApiError::NotFound(format!("session {sid} not found")),
        });
    };
    caller.may_act_for(&session.plan.user_id)?;
    let now = Utc::now();

    if req.stop {
        let session = live.remove(&sid).expect("present");
        drop(live);
        let record = finish(&state, session, now, EndReason::Stopped)?;
        return Ok(Json(AnswerResponse {
            grade: None,
            timed_out: false,
            correct_answer: None,
            reread_text: None,
            next_index: record.outcomes.len(),
            next_exercise: None,
            summary: Some(record),
        }));
    }

    let index = session.next;
    let exercise = &session.plan.exercises[index];
    let result = match &req.answer {
        Some(a) => grade(exercise, a).map_err(|e| ApiError::bad(format!("answer does not fit the exercise: {e}")))?,
        None => GradeResult::timed_out(),
    };
    let elapsed = (now - session.presented_at).num_milliseconds().max(0) as f64 / 1000.0;
    let outcome = Outcome {
        exercise_id: exercise.exercise_id.clone(),
        game_type: exercise.game_type,
        source_memory_ids: exercise.source_memory_ids.clone(),
        grade: result.clone(),
        elapsed_seconds: elapsed,
        timed_out: req.timed_out,
    };
    let total = session.plan.exercises.len();
    let event = TelemetryEvent::from_outcome(&session.plan, index, &outcome, now, completion_level(index + 1, total));
    let reread_text = (result.correct && exercise.game_type == GameType::MemoryCompletion)
        .then(|| exercise.reread_text().map(str::to_string))
        .flatten();
    let correct_answer = (!result.correct).then(|| correct_text(exercise)).flatten();
    session.record.push(outcome);
    session.next += 1;
    session.presented_at = now;
    state.record_telemetry(event);

    let mut response = AnswerResponse {
        grade: Some(result),
        timed_out: req.timed_out,
        correct_answer,
        reread_text,
        next_index: session.next,
        next_exercise: session.plan.exercises.get(session.next).cloned(),
        summary: None,
    };
    if session.next == total {
        let session = live.remove(&sid).expect("present");
        drop(live);
        response.summary = Some(finish(&state, session, now, EndReason::Completed)?);
    }
    Ok(Json(response))
}

fn finish(state: &AppState, mut session: LiveSession, at: DateTime<Utc>, reason: EndReason) -> ApiResult<SessionRecord> {
    session.record.close(at, reason);
    state.store().put_session(session.record.clone())?;
    Ok(session.record)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SessionState {
    Open {
        plan: SessionPlan,
        next_index: usize,
        record: SessionRecord,
    },
    Closed {
        record: SessionRecord,
    },
}

async fn session_state(
    State(state): State<Arc<AppState>>,
    caller: Caller,
    Path(sid): Path<String>,
) -> ApiResult<Json<SessionState>> {
    let open = state.live().get(&sid).map(|s| SessionState::Open {
        plan: s.plan.clone(),
        next_index: s.next,
        record: s.record.clone(),
    });
    let found = match open {
        Some(s) => s,
        None => SessionState::Closed {
            record: state
                .store()
                .session(&sid)
                .cloned()
                .ok_or_else(|| ApiError::NotFound(format!("session {sid} not found")))?,
        },
    };
    let user = match &found {
        SessionState::Open { plan, .. } => &plan.user_id,
        SessionState::Closed { record } => &record.user_id,
    };
    caller.may_act_for(user)?;
    Ok(Json(found))
}

#[derive(Debug, Deserialize)]
struct PeriodQuery {
    from: Option<DateTime<Utc>>,
    to: Option<DateTime<Utc>>,
    /// Trailing window such as `30d` or `12h`.
    period: Option<String>,
}

fn parse_window(text: &str) -> Option<chrono::Duration> {
    let (n, unit) = text.split_at(text.len().checked_sub(1)?);
    let n: i64 = n.parse().ok().filter(|&n| n > 0)?;
    match unit {
        "d" => chrono::Duration::try_days(n),
        "h" => chrono::Duration::try_hours(n),
        "w" => chrono::Duration::try_weeks(n),
        _ => None,
    }
}

async fn overview(
    State(state): State<Arc<AppState>>,
    caller: Caller,
    Path(id): Path<String>,
    Query(q): Query<PeriodQuery>,
) -> ApiResult<Json<OverviewReport>> {
    caller.caregiver_only()?;
    let id = UserId::from(id);
    user_exists(&state, &id)?;
    let period = match q.period.as_deref() {
        Some(_) if q.from.is_some() => return Err(ApiError::bad("use either period or from/to")),
        Some(p) => Period {
            from: Some(Utc::now() - parse_window(p).ok_or_else(|| ApiError::bad(format!("bad period {p:?}")))?),
            to: q.to,
        },
        None => Period { from: q.from, to: q.to },
    };
    Ok(Json(state.log().overview(&id, &period)))
}

async fn session_analytics(
    State(state): State<Arc<AppState>>,
    caller: Caller,
    Path(sid): Path<String>,
) -> ApiResult<Json<Vec<TelemetryEvent>>> {
    caller.caregiver_only()?;
    state
        .log()
        .session_events(&sid)
        .map(Json)
        .map_err(|e| ApiError::NotFound(e.to_string()))
}

async fn get_config(
    State(state): State<Arc<AppState>>,
    caller: Caller,
    Path(id): Path<String>,
) -> ApiResult<Json<sereni_core::config::CaregiverConfig>> {
    caller.caregiver_only()?;
    let id = UserId::from(id);
    user_exists(&state, &id)?;
    Ok(Json(state.store().config(&id)))
}

async fn put_config(
    State(state): State<Arc<AppState>>,
    caller: Caller,
    Path(id): Path<String>,
    Body(config): Body<sereni_core::config::CaregiverConfig>,
) -> ApiResult<Json<sereni_core::config::CaregiverConfig>> {
    caller.caregiver_only()?;
    let id = UserId::from(id);
    user_exists(&state, &id)?;
    let violations = config.validate();
    if !violations.is_empty() {
        return Err(ApiError::invalid(violations));
    }
    state.store().put_config(&id, config.clone())?;
    Ok(Json(config))
}

#[derive(Debug, Deserialize)]
struct YearQuery {
    year: Option<String>,
}

async fn events(
    State(state): State<Arc<AppState>>,
    _caller: Caller,
    Query(q): Query<YearQuery>,
) -> ApiResult<Json<Vec<HistoricalEvent>>> {
    let year: i32 = q
        .year
        .as_deref()
        .and_then(|y| y.trim().parse().ok())
        .ok_or_else(|| ApiError::bad("year must be an integer"))?;
    let provider = Arc::clone(&state.events);
    tokio::task::spawn_blocking(move || provider.events_for_year(year))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
        .map(Json)
        .map_err(|e| ApiError::BadGateway(e.to_string()))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StoredMedia {
    pub media_ref: String,
    pub bytes: usize,
}

async fn upload_media(
    State(state): State<Arc<AppState>>,
    _caller: Caller,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<StoredMedia>)> {
    if body.is_empty() {
        return Err(ApiError::bad("empty upload"));
    }
    let content_type = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("application/octet-stream")
        .to_string();
    let dir = state.media_dir.clone();
    let bytes = body.len();
    let media_ref = tokio::task::spawn_blocking(move || media::save(&dir, &body, &content_type))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok((StatusCode::CREATED, Json(StoredMedia { media_ref, bytes })))
}

async fn download_media(
    State(state): State<Arc<AppState>>,
    _caller: Caller,
    Path(media_ref): Path<String>,
) -> ApiResult<Response> {
    let dir = state.media_dir.clone();
    let found = tokio::task::spawn_blocking(move || media::load(&dir, &media_ref))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    match found {
        Ok(Some((bytes, content_type))) => Ok(([(header::CONTENT_TYPE, content_type)], bytes).into_response()),
        Ok(None) => Err(ApiError::NotFound("media not found".into())),
        Err(e) => Err(ApiError::Internal(e.to_string())),
    }
}
