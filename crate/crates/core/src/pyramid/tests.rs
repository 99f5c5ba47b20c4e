use super::*;
use crate::mall::{CountBounds, MallTables};
use crate::nurse::{Contract, PatternKind, ShiftPattern, PERIODS};

fn nurses(grades: Vec<usize>) -> NurseInstance<f64> {
    let n = grades.len();
    let pattern = ShiftPattern::new(0b1, PatternKind::Day).unwrap();
    let contract = Contract { days: 1, nights: 1, both: 1 };
    NurseInstance::new(vec![pattern], grades, 3, vec![contract; n], vec![vec![0.0]; n], vec![vec![0; 3]; PERIODS]).unwrap()
}

fn mall() -> MallInstance<f64> {
    let types = 3;
    MallInstance::new(MallTables {
        areas: 5,
        per_area: 20,
        groups: vec![0; types],
        attract: vec![vec![0.0; types]; 5],
        fixed_rent: vec![vec![0.0; 5]; types],
        size_rent: [0.0; 3],
        synergy: 0.0,
        bounds: vec![CountBounds { min: 0, ideal: 0, max: 100 }; types],
        count_peak: vec![0.0; types],
        size_limits: [100; 3],
    })
    .unwrap()
}

#[test]
fn nurse_topology_has_eight_levels_of_1000_agents() {
    let t = build_nurse_topology(&nurses(vec![2, 0, 1, 2, 0, 1])).unwrap();
    assert_eq!(t.levels().len(), 8);
    assert_eq!(t.total_capacity(), 1000);
    assert_eq!(t.top(), 7);
    assert_eq!(t.level(7).unwrap().capacity, 300);
    assert_eq!(t.slot_order(), &[1, 4, 2, 5, 0, 3]);
}

#[test]
fn wrapping_grade_pair_is_two_segments() {
    let t = build_nurse_topology(&nurses(vec![2, 0, 1, 2, 0, 1])).unwrap();
    let l = t.level(5).unwrap();
    assert_eq!(l.fitness, LevelFitness::Grades(GradeSet::of(&[0, 2])));
    assert_eq!(l.slots, vec![1, 4, 0, 3]);
    assert_eq!(t.segments(5), vec![(0, 2), (4, 6)]);
    assert_eq!(t.segments(3), vec![(0, 4)]);
}

#[test]
fn each_level_and_its_complement_partition_the_nurses() {
    let t = build_nurse_topology(&nurses(vec![0, 1, 2, 1, 2, 2, 0])).unwrap();
    for level in t.levels() {
        let mut covered: Vec<usize> = level.slots.clone();
        for &c in &level.evaluation_complements {
            covered.extend(&t.level(c).unwrap().slots);
        }
        covered.sort_unstable();
        assert_eq!(covered, (0..7).collect::<Vec<_>>(), "level {}", level.name);
        for &src in &level.crossover_sources {
            assert!(t.is_subset(src, level.id));
        }
    }
}

#[test]
fn missing_grade_gives_empty_level() {
    let t = build_nurse_topology(&nurses(vec![0, 2, 0, 2])).unwrap();
    assert!(t.level(1).unwrap().slots.is_empty());
    assert_eq!(t.level(3).unwrap().slots, vec![0, 2]);
    assert_eq!(t.level(4).unwrap().slots, vec![1, 3]);
}

#[test]
fn nurse_topology_needs_three_grades() {
    let pattern = ShiftPattern::new(0b1, PatternKind::Day).unwrap();
    let contract = Contract { days: 1, nights: 1, both: 1 };
    let inst = NurseInstance::<f64>::new(vec![pattern], vec![0, 1], 2, vec![contract; 2], vec![vec![0.0]; 2], vec![vec![0; 2]; PERIODS]).unwrap();
    assert!(matches!(build_nurse_topology(&inst), Err(Error::NurseTopologyGrades(2))));
}

#[test]
fn mall_topology_has_five_areas_and_top() {
    let t = build_mall_topology(&mall()).unwrap();
    assert_eq!(t.levels().len(), 6);
    assert_eq!(t.total_capacity(), 1000);
    assert_eq!(t.level(2).unwrap().slots, (40..60).collect::<Vec<_>>());
    assert_eq!(t.level(5).unwrap().crossover_sources, vec![0, 1, 2, 3, 4]);
    assert_eq!(complement_levels(0, &t).unwrap(), &[1, 2, 3, 4]);
}

#[test]
fn single_topology_is_one_full_level() {
    let t = build_single_topology(30).unwrap();
    assert_eq!(t.levels().len(), 1);
    assert_eq!(t.total_capacity(), 1000);
    assert!(t.is_bottom(0));
}

#[test]
fn graft_overwrites_lower_slots() {
    // nurses 0,1 grade 1; 2,3 grade 2
    let t = build_nurse_topology(&nurses(vec![0, 0, 1, 1])).unwrap();
    let lower = Genome::<f64>::new(0, vec![10, 11]);
    let higher = Genome::<f64>::new(3, vec![20, 21, 22, 23]);
    let child = fixed_point_crossover(&lower, &higher, &t).unwrap();
    assert_eq!(child.level, 3);
    assert_eq!(child.genes, vec![10, 11, 22, 23]);
}

#[test]
fn graft_of_empty_level_copies_higher() {
    let t = build_nurse_topology(&nurses(vec![0, 2, 0, 2])).unwrap();
    let lower = Genome::<f64>::new(1, vec![]);
    let higher = Genome::<f64>::new(3, vec![5, 6]);
    assert_eq!(fixed_point_crossover(&lower, &higher, &t).unwrap().genes, vec![5, 6]);
}

#[test]
fn mall_graft_changes_one_area() {
    let t = build_mall_topology(&mall()).unwrap();
    let lower = Genome::<f64>::new(1, vec![2; 20]);
    let higher = Genome::<f64>::new(5, vec![0; 100]);
    let child = fixed_point_crossover(&lower, &higher, &t).unwrap();
    let changed: Vec<usize> = (0..100).filter(|&i| child.genes[i] != 0).collect();
    assert_eq!(changed, (20..40).collect::<Vec<_>>());
}

#[test]
fn graft_rejects_non_nested_levels() {
    let t = build_mall_topology(&mall()).unwrap();
    let a = Genome::<f64>::new(0, vec![0; 20]);
    let b = Genome::<f64>::new(1, vec![0; 20]);
    assert!(matches!(fixed_point_crossover(&a, &b, &t), Err(Error::NonNestedLevels { .. })));
    let short = Genome::<f64>::new(5, vec![0; 99]);
    assert!(matches!(fixed_point_crossover(&a, &short, &t), Err(Error::IncompatibleGenomes(_))));
}

#[test]
fn invalid_topologies_are_rejected() {
    let full = |slots: Vec<usize>| level("all", slots, 10, vec![], vec![], LevelFitness::Full);
    assert!(Topology::new(vec![full(vec![0, 1])], vec![0, 0]).is_err());
    assert!(Topology::new(vec![full(vec![1, 0])], vec![0, 1]).is_err());
    assert!(Topology::new(vec![full(vec![0, 1]), full(vec![0, 1])], vec![0, 1]).is_err());
    // complement leaves a gap
    let part = level("a", vec![0], 10, vec![], vec![], LevelFitness::Full);
    assert!(Topology::new(vec![part, full(vec![0, 1, 2])], vec![0, 1, 2]).is_err());
    // source not nested
    let a = level("a", vec![0], 10, vec![], vec![2], LevelFitness::Area(0));
    let b = level("b", vec![1], 10, vec![0], vec![0], LevelFitness::Area(1));
    assert!(Topology::new(vec![a, b, full(vec![0, 1])], vec![0, 1]).is_err());
}

#[test]
fn projection_round_trips() {
    let t = build_nurse_topology(&nurses(vec![2, 0, 1, 2, 0, 1])).unwrap();
    let assignment = vec![7, 8, 9, 10, 11, 12];
    let genes = t.project(5, &assignment);
    assert_eq!(genes, vec![8, 11, 7, 10]);
    let mut out = vec![0; 6];
    t.write_into(5, &genes, &mut out);
    assert_eq!(out, vec![7, 8, 0, 10, 11, 0]);
    assert_eq!(t.to_assignment(7, &t.project(7, &assignment)), assignment);
}

#[test]
fn scaling_keeps_two_agents() {
    let t = build_mall_topology(&mall()).unwrap().scaled(0.001);
    assert!(t.levels().iter().all(|l| l.capacity == 2));
    let t = build_mall_topology(&mall()).unwrap().scaled(0.5);
    assert_eq!(t.total_capacity(), 500);
}

#[test]
fn describe_lists_every_level() {
    let text = build_nurse_topology(&nurses(vec![0, 1, 2])).unwrap().describe();
    assert!(text.contains("1+2+3"));
    assert!(text.contains("total capacity 1000"));
}
