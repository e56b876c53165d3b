use std::io::{BufRead, Write};
use std::time::Duration;

use super::run::{Presenter, PresenterError, Reply, ShowContent};
use crate::games::{Answer, AnswerShape, Payload};

/// Line-oriented presenter over any reader/writer pair, usually stdin and
/// stdout.
///
/// Answers are typed as 1-based numbers: `2` for a choice, `3 1 2` for an
/// order, `2 3 1` for an association (one right-hand number per letter).
/// An empty line skips the exercise and counts as a timeout; `stop` or end
/// of input ends the session. Unparseable input is asked again, so the
/// orchestrator only ever sees well-formed answers.
pub struct ConsolePresenter<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> ConsolePresenter<R, W> {
    pub fn new(input: R, output: W) -> Self {
        Self { input, output }
    }

    pub fn into_output(self) -> W {
        self.output
    }

    fn line(&mut self, text: &str) -> Result<(), PresenterError> {
        writeln!(self.output, "{text}").map_err(io_err)
    }
}

fn io_err(e: std::io::Error) -> PresenterError {
    PresenterError(e.to_string())
}

fn letter(i: usize) -> char {
    char::from(b'A' + (i % 26) as u8)
}

fn parse_numbers(line: &str) -> Option<Vec<usize>> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().ok().filter(|&n| n >= 1).map(|n| n - 1))
        .collect()
}

fn parse_answer(line: &str, shape: AnswerShape) -> Option<Answer> {
    let nums = parse_numbers(line)?;
    let answer = match shape {
        AnswerShape::Choice { .. } => match nums.as_slice() {
            [one] => Answer::Choice(*one),
            _ => return None,
        },
        AnswerShape::Order { .. } => Answer::Order(nums),
        AnswerShape::Mapping { .. } => Answer::Mapping(nums),
    };
    shape.accepts(&answer).then_some(answer)
}

impl<R: BufRead, W: Write> Presenter for ConsolePresenter<R, W> {
    fn say(&mut self, text: &str) -> Result<(), PresenterError> {
        self.line(text)
    }

    fn show(&mut self, content: ShowContent<'_>) -> Result<(), PresenterError> {
        match content {
            ShowContent::MemoryText(text) => self.line(&format!("  \"{text}\"")),
            ShowContent::Exercise(Payload::MultipleChoice(mc)) => {
                for (i, o) in mc.options.iter().enumerate() {
                    self.line(&format!("  {}) {o}", i + 1))?;
                }
                Ok(())
            }
            ShowContent::Exercise(Payload::Music(m)) => {
                for (i, o) in m.question.options.iter().enumerate() {
                    self.line(&format!("  {}) {o}", i + 1))?;
                }
                Ok(())
            }
            ShowContent::Exercise(Payload::Ordering(o)) => {
                for (i, item) in o.presented_items.iter().enumerate() {
                    self.line(&format!("  {}) {item}", i + 1))?;
                }
                self.line("Type the numbers in the right order, for example: 2 3 1")
            }
            ShowContent::Exercise(Payload::Association(a)) => {
                for (i, item) in a.left_items.iter().enumerate() {
                    self.line(&format!("  {}. {item}", letter(i)))?;
                }
                for (i, item) in a.right_items.iter().enumerate() {
                    self.line(&format!("  {}) {item}", i + 1))?;
                }
                self.line("For each letter, type the matching number, for example: 2 3 1")
            }
        }
    }

    fn play_audio(&mut self, audio_ref: &str, clip_seconds: u32) -> Result<(), PresenterError> {
        self.line(&format!("[playing the first {clip_seconds} seconds of {audio_ref}]"))
    }

    fn await_answer(&mut self, expected: AnswerShape, _timeout: Duration) -> Result<Reply, PresenterError> {
        loop {
            write!(self.output, "> ").map_err(io_err)?;
            self.output.flush().map_err(io_err)?;
            let mut buf = String::new();
            if self.input.read_line(&mut buf).map_err(io_err)? == 0 {
                return Ok(Reply::Stop);
            }
            let line = buf.trim();
            if line.is_empty() {
                return Ok(Reply::Timeout);
            }
            if matches!(line.to_lowercase().as_str(), "stop" | "quit" | "q") {
                return Ok(Reply::Stop);
            }
            match parse_answer(line, expected) {
                Some(a) => return Ok(Reply::Answer(a)),
                None => self.line("Sorry, I did not understand. Please try again.")?,
            }
        }
    }
}
