use std::time::Duration;

use chrono::{DateTime, Utc};

use super::{completion_level, EndReason, Outcome, SessionError, SessionPlan, SessionRecord};
use crate::analytics::{AnalyticsError, TelemetryEvent};
use crate::games::{grade, Answer, AnswerShape, Exercise, GradeResult, Payload};
use crate::model::GameType;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct PresenterError(pub String);

/// What a presenter is asked to display.
#[derive(Debug, Clone, Copy)]
pub enum ShowContent<'a> {
    Exercise(&'a Payload),
    MemoryText(&'a str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reply {
    Answer(Answer),
    Timeout,
    /// The user or operator ended the session.
    Stop,
}

/// Output and input channels of whatever is running the session: a robot,
/// a console, a browser.
///
/// `await_answer` must return an answer accepted by `expected`, a timeout,
/// or a stop; anything else is treated as a broken channel.
pub trait Presenter {
    fn say(&mut self, text: &str) -> Result<(), PresenterError>;
    fn show(&mut self, content: ShowContent<'_>) -> Result<(), PresenterError>;
    fn play_audio(&mut self, audio_ref: &str, clip_seconds: u32) -> Result<(), PresenterError>;
    fn await_answer(&mut self, expected: AnswerShape, timeout: Duration) -> Result<Reply, PresenterError>;
}

/// Receives one event per attempted exercise.
pub trait TelemetrySink {
    fn record(&mut self, event: TelemetryEvent) -> Result<(), AnalyticsError>;
}

impl TelemetrySink for Vec<TelemetryEvent> {
    fn record(&mut self, event: TelemetryEvent) -> Result<(), AnalyticsError> {
        event.check()?;
        self.push(event);
        Ok(())
    }
}

pub trait Clock {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

pub fn run_session<P, T>(plan: &SessionPlan, presenter: &mut P, tracker: &mut T) -> Result<SessionRecord, SessionError>
where
    P: Presenter + ?Sized,
    T: TelemetrySink + ?Sized,
{
    run_session_with_clock(plan, presenter, tracker, &SystemClock)
}

/// Plays every exercise of `plan` in order.
///
/// A timeout is scored as one error and play moves on. After a correct
/// memory-completion answer the whole memory is read back. A stop reply ends
/// the session early; a presenter error closes the record and is returned
/// together with it.
pub fn run_session_with_clock<P, T, C>(
    plan: &SessionPlan,
    presenter: &mut P,
    tracker: &mut T,
    clock: &C,
) -> Result<SessionRecord, SessionError>
where
    P: Presenter + ?Sized,
    T: TelemetrySink + ?Sized,
    C: Clock + ?Sized,
{
    let mut record = SessionRecord::new(plan, clock.now());
    let timeout = Duration::from_secs(u64::from(plan.answer_timeout_seconds));

    for (index, exercise) in plan.exercises.iter().enumerate() {
        let turn = play_one(exercise, presenter, timeout, clock);
        let (reply, elapsed) = match turn {
            Ok(Some(r)) => r,
            Ok(None) => {
                record.close(clock.now(), EndReason::Stopped);
                return Ok(record);
            }
            Err(e) => return Err(fail(record, clock, e)),
        };

        let (result, timed_out) = match reply {
            Some(answer) => match grade(exercise, &answer) {
                Ok(g) => (g, false),
                Err(e) => return Err(fail(record, clock, PresenterError(format!("malformed answer: {e}")))),
            },
            None => (GradeResult::timed_out(), true),
        };

        if let Err(e) = give_feedback(exercise, &result, timed_out, presenter) {
            return Err(fail(record, clock, e));
        }

        let outcome = Outcome {
            exercise_id: exercise.exercise_id.clone(),
            game_type: exercise.game_type,
            source_memory_ids: exercise.source_memory_ids.clone(),
            grade: result,
            elapsed_seconds: elapsed,
            timed_out,
        };
        let event = TelemetryEvent::from_outcome(
            plan,
            index,
            &outcome,
            clock.now(),
            completion_level(index + 1, plan.exercises.len()),
        );
        if let Err(e) = tracker.record(event) {
            tracing::warn!(session = %plan.session_id, error = %e, "telemetry event dropped");
        }
        record.push(outcome);
    }

    record.close(clock.now(), EndReason::Completed);
    Ok(record)
}

fn fail<C: Clock + ?Sized>(mut record: SessionRecord, clock: &C, e: PresenterError) -> SessionError {
    record.close(clock.now(), EndReason::PresenterFailure);
    SessionError::PresenterFailure {
        reason: e.0,
        record: Box::new(record),
    }
}

type Turn = Option<(Option<Answer>, f64)>;

/// Presents one exercise and waits for the reply. `None` means stop.
fn play_one<P, C>(exercise: &Exercise, presenter: &mut P, timeout: Duration, clock: &C) -> Result<Turn, PresenterError>
where
    P: Presenter + ?Sized,
    C: Clock + ?Sized,
{
    match &exercise.payload {
        Payload::MultipleChoice(mc) => presenter.say(&mc.prompt)?,
        Payload::Ordering(_) => presenter.say("Put these steps in the right order.")?,
        Payload::Association(_) => presenter.say("Match each memory with its detail.")?,
        Payload::Music(_) => presenter.say("Listen to this song.")?,
    }
    presenter.show(ShowContent::Exercise(&exercise.payload))?;
    if let Payload::Music(task) = &exercise.payload {
        presenter.play_audio(&task.audio_ref, task.clip_seconds)?;
        presenter.say(&task.question.prompt)?;
    }

    let asked_at = clock.now();
    let reply = presenter.await_answer(exercise.expected_shape(), timeout)?;
    let elapsed = (clock.now() - asked_at).num_milliseconds().max(0) as f64 / 1000.0;
    Ok(match reply {
        Reply::Stop => None,
        Reply::Timeout => Some((None, elapsed)),
        Reply::Answer(a) => Some((Some(a), elapsed)),
    })
}

fn give_feedback<P: Presenter + ?Sized>(
    exercise: &Exercise,
    result: &GradeResult,
    timed_out: bool,
    presenter: &mut P,
) -> Result<(), PresenterError> {
    if result.correct {
        presenter.say("Well done!")?;
        if exercise.game_type == GameType::MemoryCompletion {
            if let Some(text) = exercise.reread_text() {
                presenter.show(ShowContent::MemoryText(text))?;
                presenter.say(text)?;
            }
        }
        return Ok(());
    }
    if timed_out {
        presenter.say("Let's move on to the next one.")?;
    }
    let right = match &exercise.payload {
        Payload::MultipleChoice(mc) => Some(mc.correct_option()),
        Payload::Music(m) => Some(m.question.correct_option()),
        _ => None,
    };
    match right {
        Some(answer) => presenter.say(&format!("The answer was: {answer}.")),
        None => presenter.say("Good try, here is the right solution."),
    }
}
