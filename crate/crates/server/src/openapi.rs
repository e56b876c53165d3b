//! OpenAPI 3.0 description of the routes, built from one table so the
//! document and the router can be checked against each other.

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    Public,
    /// Open while no caregiver exists, caregiver-only afterwards.
    Bootstrap,
    /// Any valid token.
    Authenticated,
    /// The user themself or a caregiver.
    SelfOrCaregiver,
    Caregiver,
}

#[derive(Debug, Clone, Copy)]
pub struct Endpoint {
    pub method: &'static str,
    pub path: &'static str,
    pub summary: &'static str,
    pub access: Access,
    pub request: Option<&'static str>,
    pub response: Option<&'static str>,
    pub success: u16,
    pub errors: &'static [u16],
}

#[allow(clippy::too_many_arguments)]
const fn ep(
    method: &'static str,
    path: &'static str,
    summary: &'static str,
    access: Access,
    request: Option<&'static str>,
    response: Option<&'static str>,
    success: u16,
    errors: &'static [u16],
) -> Endpoint {
    Endpoint {
        method,
        path,
        summary,
        access,
        request,
        response,
        success,
        errors,
    }
}

use Access::*;

pub const ENDPOINTS: &[Endpoint] = &[
    ep("post", "/users", "Create a user and issue its token", Bootstrap, Some("NewUser"), Some("CreatedUser"), 201, &[400, 401, 403, 409]),
    ep("get", "/users", "List users", Caregiver, None, Some("UserList"), 200, &[401, 403]),
    ep("get", "/users/{id}", "Get a user profile", SelfOrCaregiver, None, Some("UserProfile"), 200, &[401, 403, 404]),
    ep("post", "/users/{id}/memories", "Add a memory", SelfOrCaregiver, Some("MemoryInput"), Some("Memory"), 201, &[400, 401, 403, 404]),
    ep("get", "/users/{id}/memories", "List memories, optionally by category", SelfOrCaregiver, None, Some("MemoryList"), 200, &[400, 401, 403, 404]),
    ep("get", "/users/{id}/memories/{memory_id}", "Get a memory", SelfOrCaregiver, None, Some("Memory"), 200, &[401, 403, 404]),
    ep("put", "/users/{id}/memories/{memory_id}", "Replace a memory", SelfOrCaregiver, Some("MemoryInput"), Some("Memory"), 200, &[400, 401, 403, 404]),
    ep("delete", "/users/{id}/memories/{memory_id}", "Delete a memory", SelfOrCaregiver, None, None, 204, &[401, 403, 404]),
    ep("get", "/users/{id}/eligible-games", "Count eligible source memories per game type", SelfOrCaregiver, None, Some("EligibleGames"), 200, &[401, 403, 404]),
    ep("post", "/users/{id}/sessions", "Plan and open a session", SelfOrCaregiver, Some("SessionRequest"), Some("SessionPlan"), 201, &[400, 401, 403, 404, 409]),
    ep("get", "/sessions/{id}", "Get an open or finished session", SelfOrCaregiver, None, Some("SessionState"), 200, &[401, 403, 404]),
    ep("post", "/sessions/{id}/answers", "Answer, time out or stop the current exercise", SelfOrCaregiver, Some("AnswerRequest"), Some("AnswerResponse"), 200, &[400, 401, 403, 404, 409]),
    ep("get", "/users/{id}/analytics/overview", "Aggregated results over a period", Caregiver, None, Some("OverviewReport"), 200, &[400, 401, 403, 404]),
    ep("get", "/sessions/{id}/analytics", "Per-exercise events of one session", Caregiver, None, Some("TelemetryEventList"), 200, &[401, 403, 404]),
    ep("get", "/users/{id}/config", "Get the caregiver configuration", Caregiver, None, Some("CaregiverConfig"), 200, &[401, 403, 404]),
    ep("put", "/users/{id}/config", "Replace the caregiver configuration", Caregiver, Some("CaregiverConfig"), Some("CaregiverConfig"), 200, &[400, 401, 403, 404]),
    ep("get", "/events", "Historical events of a year", Authenticated, None, Some("HistoricalEventList"), 200, &[400, 401, 502]),
    ep("post", "/media", "Upload a media file", Authenticated, Some("Binary"), Some("StoredMedia"), 201, &[400, 401, 413]),
    ep("get", "/media/{media_ref}", "Download a media file", Authenticated, None, Some("Binary"), 200, &[401, 404]),
    ep("get", "/openapi.json", "This document", Public, None, Some("Object"), 200, &[]),
];

fn obj(props: &[(&str, Value)], required: &[&str]) -> Value {
    let properties: Map<String, Value> = props.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    json!({ "type": "object", "properties": properties, "required": required })
}

fn r(name: &str) -> Value {
    json!({ "$ref": format!("#/components/schemas/{name}") })
}

fn list(item: Value) -> Value {
    json!({ "type": "array", "items": item })
}

fn schemas() -> Value {
    let s = || json!({ "type": "string" });
    let int = || json!({ "type": "integer" });
    let num = || json!({ "type": "number" });
    let boolean = || json!({ "type": "boolean" });
    let ints = || list(int());
    let category = json!({ "type": "string", "enum": ["Affections", "Events", "Games", "Hobbies", "Places", "Music"] });
    let game = json!({ "type": "string", "enum": ["MemoryCompletion", "ActivitiesOrdering", "MemoryAssociation", "MemoryRelatedEvent", "MusicGame"] });
    let music = obj(&[("song_title", s()), ("artist", s()), ("audio_ref", s())], &["song_title", "artist"]);
    let choice = obj(
        &[("prompt", s()), ("options", list(s())), ("correct_index", int()), ("reread_text", s())],
        &["prompt", "options", "correct_index"],
    );
    json!({
        "NewUser": obj(&[("user_id", s()), ("display_name", s()), ("birth_year", int()), ("role", json!({"type":"string","enum":["senior","caregiver"]}))], &["display_name"]),
        "UserProfile": obj(&[("user_id", s()), ("display_name", s()), ("birth_year", int()), ("role", s())], &["user_id", "display_name", "role"]),
        "UserList": list(r("UserProfile")),
        "CreatedUser": obj(&[("user", r("UserProfile")), ("token", s())], &["user", "token"]),
        "MemoryCategory": category,
        "GameType": game,
        "MusicMeta": music,
        "MemoryInput": obj(&[
            ("category", r("MemoryCategory")), ("title", s()), ("description", s()), ("age_at_event", int()),
            ("image_ref", s()), ("key_detail", s()), ("hobby_steps", list(s())), ("music_meta", r("MusicMeta")),
        ], &["category", "title"]),
        "Memory": obj(&[
            ("memory_id", s()), ("owner_id", s()), ("category", r("MemoryCategory")), ("title", s()), ("description", s()),
            ("age_at_event", int()), ("image_ref", s()), ("key_detail", s()), ("hobby_steps", list(s())), ("music_meta", r("MusicMeta")),
        ], &["memory_id", "owner_id", "category", "title"]),
        "MemoryList": list(r("Memory")),
        "EligibleGames": { "type": "object", "additionalProperties": { "type": "integer" } },
        "SessionRequest": obj(&[("chosen_type", r("GameType")), ("seed", int())], &[]),
        "MultipleChoice": choice,
        "OrderingTask": obj(&[("presented_items", list(s())), ("correct_order", ints())], &["presented_items", "correct_order"]),
        "AssociationTask": obj(
            &[("left_items", list(s())), ("right_items", list(s())), ("correct_mapping", ints())],
            &["left_items", "right_items", "correct_mapping"],
        ),
        "MusicTask": obj(
            &[("audio_ref", s()), ("clip_seconds", int()), ("question", r("MultipleChoice"))],
            &["audio_ref", "clip_seconds", "question"],
        ),
        "Payload": {
            "description": "One of the task objects with an added `kind` tag.",
            "oneOf": [r("MultipleChoice"), r("OrderingTask"), r("AssociationTask"), r("MusicTask")],
            "discriminator": { "propertyName": "kind", "mapping": {
                "multiple_choice": "#/components/schemas/MultipleChoice",
                "ordering": "#/components/schemas/OrderingTask",
                "association": "#/components/schemas/AssociationTask",
                "music": "#/components/schemas/MusicTask",
            } },
        },
        "Exercise": obj(&[("exercise_id", s()), ("game_type", r("GameType")), ("source_memory_ids", list(s())), ("payload", r("Payload"))], &["exercise_id", "game_type", "source_memory_ids", "payload"]),
        "SessionPlan": obj(&[
            ("session_id", s()), ("user_id", s()), ("exercises", list(r("Exercise"))), ("estimated_seconds", int()),
            ("game_type_filter", r("GameType")), ("short", boolean()), ("answer_timeout_seconds", int()),
        ], &["session_id", "user_id", "exercises", "estimated_seconds", "short", "answer_timeout_seconds"]),
        "Answer": { "oneOf": [obj(&[("choice", int())], &["choice"]), obj(&[("order", ints())], &["order"]), obj(&[("mapping", ints())], &["mapping"])] },
        "AnswerRequest": obj(&[("answer", r("Answer")), ("timed_out", boolean()), ("stop", boolean())], &[]),
        "GradeResult": obj(&[("correct", boolean()), ("item_correct", list(boolean())), ("score", num()), ("errors", int())], &["correct", "item_correct", "score", "errors"]),
        "Outcome": obj(&[
            ("exercise_id", s()), ("game_type", r("GameType")), ("source_memory_ids", list(s())), ("grade", r("GradeResult")),
            ("elapsed_seconds", num()), ("timed_out", boolean()),
        ], &["exercise_id", "game_type", "grade", "elapsed_seconds", "timed_out"]),
        "SessionRecord": obj(&[
            ("session_id", s()), ("user_id", s()), ("started_at", s()), ("ended_at", s()), ("planned", int()),
            ("outcomes", list(r("Outcome"))), ("completion_level", num()),
            ("end_reason", json!({"type":"string","enum":["completed","stopped","presenter_failure"]})),
        ], &["session_id", "user_id", "started_at", "ended_at", "planned", "outcomes", "completion_level", "end_reason"]),
        "AnswerResponse": obj(&[
            ("grade", r("GradeResult")), ("timed_out", boolean()), ("correct_answer", s()), ("reread_text", s()),
            ("next_index", int()), ("next_exercise", r("Exercise")), ("summary", r("SessionRecord")),
        ], &["timed_out", "next_index"]),
        "SessionState": obj(&[
            ("status", json!({"type":"string","enum":["open","closed"]})), ("plan", r("SessionPlan")),
            ("next_index", int()), ("record", r("SessionRecord")),
        ], &["status", "record"]),
        "TelemetryEvent": obj(&[
            ("event_id", s()), ("user_id", s()), ("session_id", s()), ("game_type", r("GameType")), ("timestamp", s()),
            ("elapsed_seconds", num()), ("errors", int()), ("passed", boolean()), ("score", num()),
            ("completion_level_at_event", num()), ("timed_out", boolean()),
        ], &["event_id", "user_id", "session_id", "game_type", "timestamp", "elapsed_seconds", "errors", "passed", "score", "completion_level_at_event"]),
        "TelemetryEventList": list(r("TelemetryEvent")),
        "OverviewReport": { "type": "object", "additionalProperties": true, "required": ["user_id", "sessions_played", "total_events", "per_game_type", "score_trend"] },
        "CaregiverConfig": obj(&[
            ("option_count", int()), ("association_pairs", int()), ("clip_seconds", int()),
            ("enabled_games", list(r("GameType"))),
            ("session_bounds", obj(&[("min_seconds", int()), ("max_seconds", int())], &["min_seconds", "max_seconds"])),
            ("time_estimates", obj(&[
                ("memory_completion", int()), ("activities_ordering", int()), ("memory_association", int()),
                ("memory_related_event", int()), ("music_game", int()),
            ], &["memory_completion", "activities_ordering", "memory_association", "memory_related_event", "music_game"])), ("answer_timeout_seconds", int()),
        ], &[]),
        "HistoricalEvent": obj(&[("year", int()), ("event_text", s())], &["year", "event_text"]),
        "HistoricalEventList": list(r("HistoricalEvent")),
        "StoredMedia": obj(&[("media_ref", s()), ("bytes", int())], &["media_ref", "bytes"]),
        "Binary": { "type": "string", "format": "binary" },
        "Object": { "type": "object" },
        "Error": obj(&[("error", s()), ("violations", list(obj(&[("field", s()), ("message", s())], &["field", "message"])))], &["error"]),
    })
}

fn content(schema: &str) -> Value {
    let media = if schema == "Binary" { "application/octet-stream" } else { "application/json" };
    json!({ media: { "schema": r(schema) } })
}

fn status_text(code: u16) -> &'static str {
    match code {
        200 => "OK",
        201 => "Created",
        204 => "No Content",
        400 => "Invalid request",
        401 => "Missing or unknown token",
        403 => "Not allowed for this caller",
        404 => "Not found",
        409 => "Conflict",
        413 => "Upload too large",
        502 => "Events source unavailable",
        _ => "Error",
    }
}

fn parameters(e: &Endpoint) -> Vec<Value> {
    let mut out: Vec<Value> = e
        .path
        .split('/')
        .filter_map(|seg| seg.strip_prefix('{')?.strip_suffix('}'))
        .map(|name| json!({ "name": name, "in": "path", "required": true, "schema": { "type": "string" } }))
        .collect();
    let query = |name: &str, required: bool, ty: &str| json!({ "name": name, "in": "query", "required": required, "schema": { "type": ty } });
    match e.path {
        "/users/{id}/memories" if e.method == "get" => out.push(query("category", false, "string")),
        "/users/{id}/analytics/overview" => {
            out.push(query("from", false, "string"));
            out.push(query("to", false, "string"));
            out.push(query("period", false, "string"));
        }
        "/events" => out.push(query("year", true, "integer")),
        _ => {}
    }
    out
}

fn operation(e: &Endpoint) -> Value {
    let mut responses = Map::new();
    let mut ok = json!({ "description": status_text(e.success) });
    if let Some(schema) = e.response {
        ok["content"] = content(schema);
    }
    responses.insert(e.success.to_string(), ok);
    for code in e.errors {
        responses.insert(
            code.to_string(),
            json!({ "description": status_text(*code), "content": content("Error") }),
        );
    }
    let mut op = json!({
        "summary": e.summary,
        "operationId": format!("{}{}", e.method, e.path.replace(['/', '{', '}', '-', '.'], "_")),
        "parameters": parameters(e),
        "responses": responses,
    });
    if let Some(schema) = e.request {
        op["requestBody"] = json!({ "required": schema != "SessionRequest", "content": content(schema) });
    }
    match e.access {
        Public => op["security"] = json!([]),
        Bootstrap => op["security"] = json!([{}, { "bearer": [] }]),
        Caregiver => op["x-required-role"] = json!("caregiver"),
        Authenticated | SelfOrCaregiver => {}
    }
    op
}

pub fn document() -> Value {
    let mut paths = Map::new();
    for e in ENDPOINTS {
        let entry = paths.entry(e.path.to_string()).or_insert_with(|| json!({}));
        entry[e.method] = operation(e);
    }
    json!({
        "openapi": "3.0.3",
        "info": { "title": "sereni", "version": env!("CARGO_PKG_VERSION") },
        "security": [{ "bearer": [] }],
        "paths": paths,
        "components": {
            "securitySchemes": { "bearer": { "type": "http", "scheme": "bearer" } },
            "schemas": schemas(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_reference_resolves() {
        let doc = document();
        let text = doc.to_string();
        let schemas = doc["components"]["schemas"].as_object().unwrap();
        for piece in text.split("#/components/schemas/").skip(1) {
            let name: String = piece.chars().take_while(|c| c.is_ascii_alphanumeric()).collect();
            assert!(schemas.contains_key(&name), "dangling $ref {name}");
        }
    }

    #[test]
    fn no_duplicate_operations() {
        let mut seen = std::collections::BTreeSet::new();
        for e in ENDPOINTS {
            assert!(seen.insert((e.method, e.path)), "{} {}", e.method, e.path);
        }
    }
}
