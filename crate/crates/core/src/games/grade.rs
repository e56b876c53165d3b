use super::{Answer, Exercise, GameError, GradeResult, Payload};

/// Scores a response against the exercise's answer key.
///
/// Choice questions are all-or-nothing. Ordering gives credit per position
/// that holds the right step; association gives credit per left item linked
/// to its own detail.
pub fn grade(e: &Exercise, response: &Answer) -> Result<GradeResult, GameError> {
    if !e.expected_shape().accepts(response) {
        return Err(GameError::ShapeMismatch);
    }
    let items = match (&e.payload, response) {
        (Payload::MultipleChoice(mc), Answer::Choice(i)) => vec![*i == mc.correct_index],
        (Payload::Music(m), Answer::Choice(i)) => vec![*i == m.question.correct_index],
        (Payload::Ordering(o), Answer::Order(order)) => order
            .iter()
            .zip(&o.correct_order)
            .map(|(got, want)| got == want)
            .collect(),
        (Payload::Association(a), Answer::Mapping(map)) => map
            .iter()
            .zip(&a.correct_mapping)
            .map(|(got, want)| got == want)
            .collect(),
        _ => return Err(GameError::ShapeMismatch),
    };
    Ok(GradeResult::from_items(items))
}
