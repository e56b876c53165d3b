//! Brute-force reference computations used to cross-check the library.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sereni_core::analytics::{GameStats, OverviewReport, Period, TelemetryEvent, TrendPoint};
use sereni_core::games::{grade, Answer, AssociationTask, Exercise, OrderingTask, Payload};
use sereni_core::model::{GameType, UserId};

/// All permutations of `0..n`, in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All functions `0..n -> 0..n`.
pub fn mappings(n: usize) -> Vec<Vec<usize>> {
    (0..n.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let d = code % n;
                    code /= n;
                    d
                })
                .collect()
        })
        .collect()
}

fn exercise(game: GameType, payload: Payload) -> Exercise {
    Exercise {
        exercise_id: "oracle".into(),
        game_type: game,
        source_memory_ids: vec![],
        payload,
    }
}

#[derive(Debug, Default)]
pub struct OracleRun {
    pub cases: usize,
    pub mismatches: Vec<String>,
}

/// Grades every response to every `n`-item ordering and association task
/// and compares against counting matches by item text.
pub fn grading_oracle(n: usize) -> OracleRun {
    let mut run = OracleRun::default();
    let steps: Vec<String> = (0..n).map(|i| format!("step {i}")).collect();
    let details: Vec<String> = (0..n).map(|i| format!("detail {i}")).collect();

    for shown in permutations(n) {
        // ordering: presented_items[j] = steps[shown[j]]
        let presented: Vec<String> = shown.iter().map(|&s| steps[s].clone()).collect();
        let correct_order: Vec<usize> = (0..n).map(|k| shown.iter().position(|&s| s == k).unwrap()).collect();
        let ex = exercise(
            GameType::ActivitiesOrdering,
            Payload::Ordering(OrderingTask {
                presented_items: presented.clone(),
                correct_order,
            }),
        );
        for response in permutations(n) {
            let right = (0..n).filter(|&k| presented[response[k]] == steps[k]).count();
            check(&mut run, &ex, Answer::Order(response), right, n);
        }

        // association: left i belongs with details[i], shown as right_items
        let right_items: Vec<String> = shown.iter().map(|&s| details[s].clone()).collect();
        let correct_mapping: Vec<usize> = (0..n).map(|i| shown.iter().position(|&s| s == i).unwrap()).collect();
        let ex = exercise(
            GameType::MemoryAssociation,
            Payload::Association(AssociationTask {
                left_items: (0..n).map(|i| format!("memory {i}")).collect(),
                right_items: right_items.clone(),
                correct_mapping,
            }),
        );
        for response in mappings(n) {
            let right = (0..n).filter(|&i| right_items[response[i]] == details[i]).count();
            check(&mut run, &ex, Answer::Mapping(response), right, n);
        }
    }
    run
}

fn check(run: &mut OracleRun, ex: &Exercise, answer: Answer, right: usize, n: usize) {
    run.cases += 1;
    let want_score = right as f64 / n as f64;
    match grade(ex, &answer) {
        Ok(g) if g.score == want_score && g.errors as usize == n - right && g.correct == (right == n) => {}
        other => run
            .mismatches
            .push(format!("{:?} {answer:?}: expected {right}/{n}, got {other:?}", ex.game_type)),
    }
}

/// A random telemetry log over a few users and sessions.
pub fn random_events(seed: u64, count: usize) -> Vec<TelemetryEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users = ["ada", "bruno", "carla"];
    let base = chrono::DateTime::from_timestamp(1_700_000_000, 0).unwrap();
    let sessions = rng.random_range(1..=(count / 3).max(1));
    (0..count)
        .map(|i| {
            let s = rng.random_range(0..sessions);
            let items = rng.random_range(1..=4u32);
            let right = rng.random_range(0..=items);
            let timed_out = rng.random_bool(0.05);
            let right = if timed_out { 0 } else { right };
            let items = if timed_out { 1 } else { items };
            TelemetryEvent {
                event_id: format!("e{i}"),
                user_id: (*users.choose(&mut rng).unwrap()).into(),
                session_id: format!("s{s}"),
                game_type: *GameType::ALL.choose(&mut rng).unwrap(),
                timestamp: base + chrono::Duration::seconds(rng.random_range(0..90 * 24 * 3600)),
                elapsed_seconds: f64::from(rng.random_range(0..600_000)) / 1000.0,
                errors: items - right,
                passed: right == items,
                score: f64::from(right) / f64::from(items),
                completion_level_at_event: f64::from(rng.random_range(1..=10)) / 10.0,
                timed_out,
            }
        })
        .collect()
}

/// Overview recomputed by re-scanning the log once per figure.
pub fn naive_overview(events: &[TelemetryEvent], user: &UserId, period: &Period) -> OverviewReport {
    let inside = |e: &&TelemetryEvent| {
        &e.user_id == user
            && period.from.is_none_or(|f| e.timestamp >= f)
            && period.to.is_none_or(|t| e.timestamp < t)
    };
    let mine: Vec<&TelemetryEvent> = events.iter().filter(inside).collect();
    let sum = |f: &dyn Fn(&TelemetryEvent) -> f64, of: &[&TelemetryEvent]| of.iter().fold(0.0, |acc, e| acc + f(e));

    let mut per_game_type = BTreeMap::new();
    for g in GameType::ALL {
        let of: Vec<&TelemetryEvent> = mine.iter().copied().filter(|e| e.game_type == g).collect();
        if of.is_empty() {
            continue;
        }
        let n = of.len() as f64;
        per_game_type.insert(
            g,
            GameStats {
                attempts: of.len(),
                pass_rate: of.iter().filter(|e| e.passed).count() as f64 / n,
                mean_score: sum(&|e| e.score, &of) / n,
                mean_errors: sum(&|e| f64::from(e.errors), &of) / n,
            },
        );
    }

    let ids: BTreeSet<&str> = mine.iter().map(|e| e.session_id.as_str()).collect();
    let mut score_trend: Vec<TrendPoint> = ids
        .into_iter()
        .map(|id| {
            let of: Vec<&TelemetryEvent> = mine.iter().copied().filter(|e| e.session_id == id).collect();
            TrendPoint {
                session_id: id.to_string(),
                started_at: of.iter().map(|e| e.timestamp).min().unwrap(),
                mean_score: sum(&|e| e.score, &of) / of.len() as f64,
                completion_level: of.iter().map(|e| e.completion_level_at_event).fold(0.0, f64::max),
            }
        })
        .collect();
    score_trend.sort_by(|a, b| a.started_at.cmp(&b.started_at).then_with(|| a.session_id.cmp(&b.session_id)));

    OverviewReport {
        user_id: user.clone(),
        period: *period,
        sessions_played: score_trend.len(),
        total_events: mine.len(),
        total_play_seconds: sum(&|e| e.elapsed_seconds, &mine),
        timeouts: mine.iter().filter(|e| e.timed_out).count(),
        mean_score: (!mine.is_empty()).then(|| sum(&|e| e.score, &mine) / mine.len() as f64),
        per_game_type,
        score_trend,
    }
}
