//! Bearer tokens with two roles. Caregivers may act on every user; seniors
//! only on themselves, and never on configuration or analytics.

use std::sync::Arc;

use axum::extract::FromRequestParts;
use axum::http::header::AUTHORIZATION;
use axum::http::request::Parts;
use sereni_core::{Role, UserId};

use crate::error::ApiError;
use crate::state::AppState;
use crate::store::Grant;

/// The authenticated caller.
#[derive(Debug, Clone)]
pub struct Caller(pub Grant);

/// The caller if a valid token was sent.
#[derive(Debug, Clone)]
pub struct MaybeCaller(pub Option<Grant>);

fn bearer(parts: &Parts) -> Option<&str> {
    let value = parts.headers.get(AUTHORIZATION)?.to_str().ok()?;
    let (scheme, token) = value.split_once(' ')?;
    scheme.eq_ignore_ascii_case("bearer").then(|| token.trim())
}

impl FromRequestParts<Arc<AppState>> for MaybeCaller {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &Arc<AppState>) -> Result<Self, Self::Rejection> {
        let Some(token) = bearer(parts) else {
            return Ok(MaybeCaller(None));
        };
        match state.store().grant(token) {
            Some(g) => Ok(MaybeCaller(Some(g.clone()))),
            None => Err(ApiError::Unauthorized),
        }
    }
}

impl FromRequestParts<Arc<AppState>> for Caller {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &Arc<AppState>) -> Result<Self, Self::Rejection> {
        MaybeCaller::from_request_parts(parts, state)
            .await?
            .0
            .map(Caller)
            .ok_or(ApiError::Unauthorized)
    }
}

impl Caller {
    pub fn is_caregiver(&self) -> bool {
        self.0.role == Role::Caregiver
    }

    /// The user themself or any caregiver.
    pub fn may_act_for(&self, user: &UserId) -> Result<(), ApiError> {
        if self.is_caregiver() || &self.0.user_id == user {
            Ok(())
        } else {
            Err(ApiError::Forbidden("not allowed to act for this user".into()))
        }
    }

    pub fn caregiver_only(&self) -> Result<(), ApiError> {
        if self.is_caregiver() {
            Ok(())
        } else {
            Err(ApiError::Forbidden("caregiver role required".into()))
        }
    }
}
