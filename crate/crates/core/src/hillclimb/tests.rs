use super::*;
use crate::harness::{generate_nurse_instance, NurseParams, Tightness};
use crate::nurse::{full_fitness, Contract, PatternKind, ShiftPattern};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn day(cover: u16) -> ShiftPattern {
    ShiftPattern::new(cover, PatternKind::Day).unwrap()
}

fn night(bits: u16) -> ShiftPattern {
    ShiftPattern::new(bits << DAYS, PatternKind::Night).unwrap()
}

/// Two grade-1 nurses, one day pattern and one night pattern each can work.
/// Demand: one nurse on Monday day, one on Monday night.
fn two_nurses(costs: [[f64; 2]; 2]) -> NurseInstance<f64> {
    let mut demand = vec![vec![0u32; 3]; PERIODS];
    demand[0][0] = 1;
    demand[DAYS][0] = 1;
    let contract = Contract { days: 1, nights: 1, both: 1 };
    NurseInstance::new(
        vec![day(0b1), night(0b1)],
        vec![0, 0],
        3,
        vec![contract; 2],
        costs.iter().map(|r| r.to_vec()).collect(),
        demand,
    )
    .unwrap()
}

fn penalised(inst: &NurseInstance<f64>, a: &[usize], w: f64) -> f64 {
    full_fitness(inst, a, w).unwrap().total
}

#[test]
fn balance_detection() {
    let inst = two_nurses([[0.0, 0.0], [0.0, 0.0]]);
    // both on days: Monday day over-covered, Monday night short
    assert!(!is_balanced(&inst, &[0, 0]));
    assert!(!is_balanced(&inst, &[0, 1]));
    let mut demand = vec![vec![0u32; 3]; PERIODS];
    demand[0][0] = 1;
    demand[1][0] = 1;
    let contract = Contract { days: 1, nights: 1, both: 1 };
    let inst = NurseInstance::new(vec![day(0b1), day(0b10)], vec![0, 0], 3, vec![contract; 2], vec![vec![0.0; 2]; 2], demand).unwrap();
    assert!(is_balanced(&inst, &[0, 0]));
    assert!(!is_balanced(&inst, &[0, 1]));
}

#[test]
fn all_shortage_is_not_balanced() {
    let mut demand = vec![vec![0u32; 3]; PERIODS];
    for row in demand.iter_mut() {
        *row = vec![1, 1, 5];
    }
    let contract = Contract { days: 1, nights: 1, both: 1 };
    let inst = NurseInstance::new(vec![day(0b1)], vec![0], 3, vec![contract], vec![vec![0.0]], demand).unwrap();
    let profile = BalanceProfile::of(&inst, &[0]).unwrap();
    assert!(!profile.is_balanced());
    assert_eq!(profile.uncovered()[0], vec![0, 0, 4]);
}

#[test]
fn single_move_repairs_cover() {
    let inst = two_nurses([[1.0, 5.0], [1.0, 5.0]]);
    let out = improve(&inst, &[0, 0], 100.0);
    assert!(inst.evaluate(&out).unwrap().feasible());
    assert_eq!(penalised(&inst, &out, 100.0), 6.0);
}

#[test]
fn swap_repairs_day_night_mismatch_to_optimum() {
    // nurse 0 prefers nights, nurse 1 prefers days; the input has them the wrong way round
    let inst = two_nurses([[9.0, 1.0], [1.0, 9.0]]);
    let out = improve(&inst, &[0, 1], 100.0);
    assert_eq!(out, vec![1, 0]);
    // exhaustive optimum over the four assignments
    let best = [[0, 0], [0, 1], [1, 0], [1, 1]]
        .iter()
        .filter(|a| inst.evaluate(&a[..]).unwrap().feasible())
        .map(|a| penalised(&inst, a, 100.0))
        .fold(f64::INFINITY, f64::min);
    assert_eq!(penalised(&inst, &out, 100.0), best);
}

#[test]
fn swap_needs_pairs_when_single_moves_cannot_help() {
    // with feasibility protected, no single move keeps cover; only the swap does
    let inst = two_nurses([[9.0, 1.0], [1.0, 9.0]]);
    assert_eq!(improve_with(&inst, &[0, 1], 100.0, 1), vec![0, 1]);
    assert_eq!(improve_with(&inst, &[0, 1], 100.0, 2), vec![1, 0]);
}

#[test]
fn local_optimum_is_a_fixpoint() {
    let inst = two_nurses([[9.0, 1.0], [1.0, 9.0]]);
    assert_eq!(improve(&inst, &[1, 0], 100.0), vec![1, 0]);
}

#[test]
fn chain_of_three_rotates_patterns() {
    // three nurses each on the pattern the next one wants; every pair swap leaves one unhappy
    let mut demand = vec![vec![0u32; 3]; PERIODS];
    for k in 0..3 {
        demand[k][0] = 1;
    }
    let contract = Contract { days: 1, nights: 1, both: 1 };
    let costs = vec![vec![5.0, 0.0, 20.0], vec![20.0, 5.0, 0.0], vec![0.0, 20.0, 5.0]];
    let inst = NurseInstance::new(vec![day(0b1), day(0b10), day(0b100)], vec![0; 3], 3, vec![contract; 3], costs, demand).unwrap();
    let start = [0, 1, 2];
    assert_eq!(improve_with(&inst, &start, 100.0, 2), start.to_vec());
    let out = improve_with(&inst, &start, 100.0, 3);
    assert_eq!(out, vec![1, 2, 0]);
    assert_eq!(penalised(&inst, &out, 100.0), 0.0);
}

#[test]
fn invalid_input_is_returned_unchanged() {
    let inst = two_nurses([[0.0, 0.0], [0.0, 0.0]]);
    assert_eq!(improve(&inst, &[0, 7], 1.0), vec![0, 7]);
    assert_eq!(improve(&inst, &[0], 1.0), vec![0]);
}

#[test]
fn never_worse_on_random_generated_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for round in 0..1000u64 {
        let tier = Tightness::ALL[(round % 3) as usize];
        let inst = generate_nurse_instance(&NurseParams { tightness: tier, ..NurseParams::tiny(8, 20) }, round % 25).unwrap();
        let a: Vec<usize> = (0..inst.nurse_count())
            .map(|i| {
                let set = inst.feasible_set(i);
                set[rng.gen_range(0..set.len())]
            })
            .collect();
        let w = rng.gen_range(0.5..200.0);
        let out = improve(&inst, &a, w);
        assert!(penalised(&inst, &out, w) <= penalised(&inst, &a, w));
        if inst.evaluate(&a).unwrap().feasible() {
            assert!(inst.evaluate(&out).unwrap().feasible());
        }
        assert!(out.iter().enumerate().all(|(i, &j)| inst.is_pattern_feasible(i, j)));
    }
}

#[test]
fn adapter_applies_only_to_balanced_schedules() {
    let inst = two_nurses([[9.0, 1.0], [1.0, 9.0]]);
    let climber = NurseHillClimber::new(&inst);
    assert!(!climber.applies(&[0, 1]));
    assert_eq!(LocalSearch::improve(&climber, &[0, 1], 10.0), vec![1, 0]);
}

proptest! {
    #[test]
    fn improve_is_monotone(seed in 0u64..200, w in 0.1f64..500.0, genes in proptest::collection::vec(0usize..1000, 10)) {
        let inst = generate_nurse_instance(&NurseParams::tiny(10, 30), seed).unwrap();
        let a: Vec<usize> = genes.iter().enumerate().map(|(i, &g)| inst.feasible_set(i)[g % inst.feasible_set(i).len()]).collect();
        let out = improve(&inst, &a, w);
        prop_assert!(penalised(&inst, &out, w) <= penalised(&inst, &a, w));
        // a second pass finds nothing more
        prop_assert_eq!(improve(&inst, &out, w), out);
    }
}
