use std::io::Cursor;

use sereni_core::analytics::TelemetryEvent;
use sereni_core::config::PlanSettings;
use sereni_core::events::FallbackEvents;
use sereni_core::games::{grade, Answer, GenConfig};
use sereni_core::model::GameType;
use sereni_core::session::{
    plan_session, run_session, ConsolePresenter, EndReason, Reply, SessionError, SessionPlan,
};
use sereni_testkit::presenters::{all_correct, console_input, wrong_answer, Call, RecordingPresenter};
use sereni_testkit::{five_game_user, rich_user};

fn plan_for(seed: u64) -> SessionPlan {
    let f = rich_user(seed);
    let settings = PlanSettings {
        gen: GenConfig::with_seed(seed),
        ..PlanSettings::default()
    };
    plan_session(&f.profile, &f.memories, &settings, None, &[], &FallbackEvents::bundled()).unwrap()
}

fn truncated(mut plan: SessionPlan, n: usize) -> SessionPlan {
    plan.exercises.truncate(n);
    plan
}

#[test]
fn all_correct_plan_completes() {
    let plan = truncated(plan_for(1), 3);
    let mut p = RecordingPresenter::new(all_correct(&plan));
    let mut events: Vec<TelemetryEvent> = Vec::new();
    let record = run_session(&plan, &mut p, &mut events).unwrap();
    assert_eq!(record.completion_level, 1.0);
    assert_eq!(record.end_reason, EndReason::Completed);
    assert_eq!(record.outcomes.len(), 3);
    assert!(record.outcomes.iter().all(|o| o.grade.score == 1.0));
}

#[test]
fn stop_after_one_of_four() {
    let plan = truncated(plan_for(2), 4);
    let first = plan.exercises[0].answer_key();
    let mut p = RecordingPresenter::new([Reply::Answer(first), Reply::Stop]);
    let mut events: Vec<TelemetryEvent> = Vec::new();
    let record = run_session(&plan, &mut p, &mut events).unwrap();
    assert_eq!(record.completion_level, 0.25);
    assert_eq!(record.end_reason, EndReason::Stopped);
    assert_eq!(events.len(), 1);
}

#[test]
fn option_zero_scores_match_direct_grading() {
    for seed in 0..20 {
        let plan = plan_for(seed);
        let replies: Vec<Reply> = plan
            .exercises
            .iter()
            .map(|e| match e.answer_key() {
                Answer::Choice(_) => Reply::Answer(Answer::Choice(0)),
                key => Reply::Answer(key),
            })
            .collect();
        let mut p = RecordingPresenter::new(replies.clone());
        let mut events: Vec<TelemetryEvent> = Vec::new();
        let record = run_session(&plan, &mut p, &mut events).unwrap();
        for ((e, o), r) in plan.exercises.iter().zip(&record.outcomes).zip(&replies) {
            let Reply::Answer(a) = r else { unreachable!() };
            assert_eq!(o.grade, grade(e, a).unwrap());
        }
    }
}

#[test]
fn reread_fires_iff_completion_is_correct() {
    for seed in 0..40 {
        let plan = plan_for(seed);
        let replies: Vec<Reply> = plan
            .exercises
            .iter()
            .enumerate()
            .map(|(i, e)| match (seed as usize + i) % 3 {
                0 => Reply::Answer(e.answer_key()),
                1 => Reply::Answer(wrong_answer(e)),
                _ => Reply::Timeout,
            })
            .collect();
        let mut p = RecordingPresenter::new(replies);
        let mut events: Vec<TelemetryEvent> = Vec::new();
        let record = run_session(&plan, &mut p, &mut events).unwrap();
        let turns = p.turns();
        assert_eq!(turns.len(), plan.exercises.len());
        for ((e, o), turn) in plan.exercises.iter().zip(&record.outcomes).zip(turns) {
            let expect = e.game_type == GameType::MemoryCompletion && o.grade.correct;
            let text = e.reread_text().unwrap_or("\u{0}");
            let reread = turn.iter().any(|c| *c == Call::Say(text.to_string()));
            let shown = turn.iter().any(|c| *c == Call::ShowMemory(text.to_string()));
            assert_eq!(reread, expect, "seed {seed}, {}", e.exercise_id);
            assert_eq!(shown, expect);
            assert!(!turn.iter().any(|c| matches!(c, Call::ShowMemory(_))) || expect);
        }
    }
}

#[test]
fn timeouts_count_as_one_error() {
    let plan = truncated(plan_for(3), 2);
    let mut p = RecordingPresenter::new([Reply::Timeout, Reply::Timeout]);
    let mut events: Vec<TelemetryEvent> = Vec::new();
    let record = run_session(&plan, &mut p, &mut events).unwrap();
    for (o, e) in record.outcomes.iter().zip(&events) {
        assert!(o.timed_out && e.timed_out);
        assert_eq!((o.grade.errors, o.grade.score, o.grade.correct), (1, 0.0, false));
    }
    assert_eq!(record.completion_level, 1.0);
}

#[test]
fn music_plays_before_the_question() {
    let f = five_game_user();
    let settings = PlanSettings::default();
    let plan = plan_session(
        &f.profile,
        &f.memories,
        &settings,
        Some(GameType::MusicGame),
        &[],
        &FallbackEvents::bundled(),
    )
    .unwrap();
    let mut p = RecordingPresenter::new(all_correct(&plan));
    run_session(&plan, &mut p, &mut Vec::new()).unwrap();
    for turn in p.turns() {
        let audio = turn.iter().position(|c| matches!(c, Call::PlayAudio(_, 10))).unwrap();
        let wait = turn.iter().position(|c| matches!(c, Call::Await(_))).unwrap();
        assert!(audio < wait);
    }
}

#[test]
fn presenter_failure_returns_partial_record() {
    let plan = truncated(plan_for(4), 4);
    let mut p = RecordingPresenter::new(all_correct(&plan));
    run_session(&plan, &mut p, &mut Vec::new()).unwrap();
    // break the channel during the third exercise
    let third = p
        .calls
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c, Call::Await(_)))
        .nth(2)
        .unwrap()
        .0;
    let mut p = RecordingPresenter::new(all_correct(&plan)).failing_at(third);
    let mut events: Vec<TelemetryEvent> = Vec::new();
    match run_session(&plan, &mut p, &mut events) {
        Err(SessionError::PresenterFailure { record, .. }) => {
            assert_eq!(record.outcomes.len(), 2);
            assert_eq!(record.completion_level, 0.5);
            assert_eq!(record.end_reason, EndReason::PresenterFailure);
            assert!(record.ended_at >= record.started_at);
        }
        other => panic!("expected a presenter failure, got {other:?}"),
    }
    assert_eq!(events.len(), 2);
}

#[test]
fn telemetry_matches_outcomes() {
    for seed in 0..20 {
        let plan = plan_for(seed);
        let mut p = RecordingPresenter::new(all_correct(&plan));
        let mut events: Vec<TelemetryEvent> = Vec::new();
        let record = run_session(&plan, &mut p, &mut events).unwrap();
        assert_eq!(events.len(), record.outcomes.len());
        let n = plan.exercises.len();
        for (i, (o, e)) in record.outcomes.iter().zip(&events).enumerate() {
            assert_eq!(e.event_id, format!("{}:{i}", plan.session_id));
            assert_eq!(e.game_type, o.game_type);
            assert_eq!(e.score, o.grade.score);
            assert_eq!(e.errors, o.grade.errors);
            assert_eq!(e.elapsed_seconds, o.elapsed_seconds);
            assert_eq!(e.completion_level_at_event, (i + 1) as f64 / n as f64);
        }
    }
}

#[test]
fn console_session_end_to_end() {
    let plan = plan_for(7);
    let answers: Vec<Answer> = plan.exercises.iter().map(|e| e.answer_key()).collect();
    let input = console_input(&answers);
    let mut console = ConsolePresenter::new(Cursor::new(input), Vec::new());
    let mut events: Vec<TelemetryEvent> = Vec::new();
    let record = run_session(&plan, &mut console, &mut events).unwrap();
    assert_eq!(record.end_reason, EndReason::Completed);
    assert_eq!(record.completion_level, 1.0);
    assert!(record.outcomes.iter().all(|o| o.grade.correct));
    let out = String::from_utf8(console.into_output()).unwrap();
    assert_eq!(out.matches("Well done!").count(), plan.exercises.len());
}
