use super::{check_config, check_memory, rng_for, shuffle_unsolved, Exercise, GameError, GenConfig, OrderingTask, Payload};
use crate::model::{GameType, Memory, MemoryCategory};

pub(crate) const MIN_STEPS: usize = 3;

/// The steps of a hobby, presented out of order.
pub fn generate_activities_ordering(target: &Memory, cfg: &GenConfig) -> Result<Exercise, GameError> {
    check_config(cfg)?;
    if target.category != MemoryCategory::Hobbies {
        return Err(GameError::NotAHobby);
    }
    let steps = target.hobby_steps.as_deref().unwrap_or_default();
    if steps.len() < MIN_STEPS {
        return Err(GameError::TooFewSteps(steps.len()));
    }
    check_memory(target)?;

    let mut rng = rng_for(cfg.rng_seed, "activities-ordering");
    let perm = shuffle_unsolved(steps, &mut rng);
    let presented_items: Vec<String> = perm.iter().map(|&i| steps[i].clone()).collect();
    // step k sits at the presented position p where perm[p] == k
    let mut correct_order = vec![0; steps.len()];
    for (pos, &step) in perm.iter().enumerate() {
        correct_order[step] = pos;
    }

    Ok(Exercise::new(
        GameType::ActivitiesOrdering,
        vec![target.memory_id.clone()],
        cfg.rng_seed,
        Payload::Ordering(OrderingTask {
            presented_items,
            correct_order,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hobby(steps: &[&str]) -> Memory {
        Memory::new("h1", "u1", MemoryCategory::Hobbies, "Bread").with_steps(steps.iter().copied())
    }

    #[test]
    fn three_steps_never_presented_solved() {
        let m = hobby(&["a", "b", "c"]);
        for seed in 0..100 {
            let ex = generate_activities_ordering(&m, &GenConfig::with_seed(seed)).unwrap();
            let Payload::Ordering(o) = &ex.payload else { panic!() };
            assert_ne!(o.presented_items, ["a", "b", "c"]);
            let mut sorted = o.presented_items.clone();
            sorted.sort();
            assert_eq!(sorted, ["a", "b", "c"]);
            let rebuilt: Vec<_> = o.correct_order.iter().map(|&i| o.presented_items[i].as_str()).collect();
            assert_eq!(rebuilt, ["a", "b", "c"]);
        }
    }

    #[test]
    fn two_steps_is_too_few() {
        assert_eq!(
            generate_activities_ordering(&hobby(&["a", "b"]), &GenConfig::default()),
            Err(GameError::TooFewSteps(2))
        );
    }

    #[test]
    fn five_steps_fixed_seed() {
        let steps = ["knead", "mix", "bake", "rise", "shape"];
        let m = hobby(&steps);
        let a = generate_activities_ordering(&m, &GenConfig::with_seed(7)).unwrap();
        let b = generate_activities_ordering(&m, &GenConfig::with_seed(7)).unwrap();
        assert_eq!(a, b);
        let Payload::Ordering(o) = &a.payload else { panic!() };
        let mut presented = o.presented_items.clone();
        presented.sort();
        let mut expected: Vec<String> = steps.iter().map(|s| s.to_string()).collect();
        expected.sort();
        assert_eq!(presented, expected);
    }

    #[test]
    fn non_hobby_rejected() {
        let m = Memory::new("e1", "u1", MemoryCategory::Events, "Wedding");
        assert_eq!(generate_activities_ordering(&m, &GenConfig::default()), Err(GameError::NotAHobby));
    }
}
