use super::SessionError;
use crate::model::{normalize, UserProfile};

/// Finds the one profile whose display name matches, ignoring case and
/// surrounding whitespace.
pub fn identify_user<'a>(name: &str, profiles: &'a [UserProfile]) -> Result<&'a UserProfile, SessionError> {
    let wanted = normalize(name);
    if wanted.is_empty() {
        return Err(SessionError::UnknownUser(name.to_string()));
    }
    let mut matches = profiles.iter().filter(|p| normalize(&p.display_name) == wanted);
    match (matches.next(), matches.count()) {
        (None, _) => Err(SessionError::UnknownUser(name.to_string())),
        (Some(p), 0) => Ok(p),
        (Some(_), more) => Err(SessionError::AmbiguousName(more + 1, name.to_string())),
    }
}
