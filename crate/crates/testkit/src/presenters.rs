use std::collections::VecDeque;
use std::time::Duration;

use sereni_core::games::{Answer, AnswerShape, Exercise, Payload};
use sereni_core::session::{Presenter, PresenterError, Reply, ShowContent, SessionPlan};

/// Everything a presenter was asked to do, in order.
#[derive(Debug, Clone, PartialEq)]
pub enum Call {
    Say(String),
    ShowExercise(Payload),
    ShowMemory(String),
    PlayAudio(String, u32),
    Await(AnswerShape),
}

/// Replies from a fixed script and records every call. Optionally fails
/// on the n-th call (0-based) to simulate a broken channel.
#[derive(Debug, Default)]
pub struct RecordingPresenter {
    pub calls: Vec<Call>,
    replies: VecDeque<Reply>,
    fail_at: Option<usize>,
}

impl RecordingPresenter {
    pub fn new(replies: impl IntoIterator<Item = Reply>) -> Self {
        Self {
            calls: Vec::new(),
            replies: replies.into_iter().collect(),
            fail_at: None,
        }
    }

    pub fn failing_at(mut self, call: usize) -> Self {
        self.fail_at = Some(call);
        self
    }

    pub fn said(&self) -> impl Iterator<Item = &str> {
        self.calls.iter().filter_map(|c| match c {
            Call::Say(s) => Some(s.as_str()),
            _ => None,
        })
    }

    /// Calls grouped per exercise, split at each `ShowExercise`.
    pub fn turns(&self) -> Vec<&[Call]> {
        let starts: Vec<usize> = self
            .calls
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c, Call::ShowExercise(_)))
            .map(|(i, _)| i)
            .collect();
        let mut out = Vec::new();
        for (k, &s) in starts.iter().enumerate() {
            let end = starts.get(k + 1).map_or(self.calls.len(), |&n| n - 1);
            out.push(&self.calls[s..end]);
        }
        out
    }

    fn log(&mut self, call: Call) -> Result<(), PresenterError> {
        if self.fail_at == Some(self.calls.len()) {
            return Err(PresenterError("channel closed".into()));
        }
        self.calls.push(call);
        Ok(())
    }
}

impl Presenter for RecordingPresenter {
    fn say(&mut self, text: &str) -> Result<(), PresenterError> {
        self.log(Call::Say(text.into()))
    }

    fn show(&mut self, content: ShowContent<'_>) -> Result<(), PresenterError> {
        self.log(match content {
            ShowContent::Exercise(p) => Call::ShowExercise(p.clone()),
            ShowContent::MemoryText(t) => Call::ShowMemory(t.into()),
        })
    }

    fn play_audio(&mut self, audio_ref: &str, clip_seconds: u32) -> Result<(), PresenterError> {
        self.log(Call::PlayAudio(audio_ref.into(), clip_seconds))
    }

    fn await_answer(&mut self, expected: AnswerShape, _timeout: Duration) -> Result<Reply, PresenterError> {
        self.log(Call::Await(expected))?;
        Ok(self.replies.pop_front().unwrap_or(Reply::Stop))
    }
}

/// A wrong but well-formed answer, when one exists.
pub fn wrong_answer(e: &Exercise) -> Answer {
    match e.answer_key() {
        Answer::Choice(i) => {
            let n = match &e.payload {
                Payload::MultipleChoice(mc) => mc.options.len(),
                Payload::Music(m) => m.question.options.len(),
                _ => unreachable!(),
            };
            Answer::Choice((i + 1) % n)
        }
        Answer::Order(mut o) => {
            o.rotate_left(1);
            Answer::Order(o)
        }
        Answer::Mapping(mut m) => {
            m.rotate_left(1);
            Answer::Mapping(m)
        }
    }
}

/// Answers every exercise of `plan` with its key.
pub fn all_correct(plan: &SessionPlan) -> Vec<Reply> {
    plan.exercises.iter().map(|e| Reply::Answer(e.answer_key())).collect()
}

/// Console input that types the 1-based form of each answer.
pub fn console_input(answers: &[Answer]) -> String {
    let one_based = |v: &[usize]| v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" ");
    let mut s = String::new();
    for a in answers {
        match a {
            Answer::Choice(i) => s.push_str(&(i + 1).to_string()),
            Answer::Order(v) | Answer::Mapping(v) => s.push_str(&one_based(v)),
        }
        s.push('\n');
    }
    s
}
