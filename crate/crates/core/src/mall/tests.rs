use super::*;
use proptest::prelude::*;

/// Tables with every rent term zero and loose bounds.
fn blank(areas: usize, per_area: usize, types: usize) -> MallTables<f64> {
    MallTables {
        areas,
        per_area,
        groups: vec![0; types],
        attract: vec![vec![0.0; types]; areas],
        fixed_rent: vec![vec![0.0; areas]; types],
        size_rent: [0.0; 3],
        synergy: 0.0,
        bounds: vec![CountBounds { min: 0, ideal: 0, max: 1000 }; types],
        count_peak: vec![0.0; types],
        size_limits: [1000; 3],
    }
}

fn standard(types: usize) -> MallTables<f64> {
    blank(5, 20, types)
}

#[test]
fn run_of_five_is_one_large_one_medium() {
    assert_eq!(split_run(5), SizeCounts { small: 0, medium: 1, large: 1 });
}

#[test]
fn small_run_examples() {
    assert_eq!(split_run(1), SizeCounts { small: 1, medium: 0, large: 0 });
    assert_eq!(split_run(4), SizeCounts { small: 1, medium: 0, large: 1 });
    assert_eq!(split_run(7), SizeCounts { small: 1, medium: 0, large: 2 });
}

#[test]
fn runs_up_to_twenty_follow_greedy_rule() {
    for len in 1..=20 {
        let c = split_run(len);
        assert_eq!(c.locations(), len);
        assert_eq!(c.large, len / 3);
        assert!(c.small + c.medium <= 1);
        assert_eq!(c.medium == 1, len % 3 == 2);
        assert_eq!(c.small == 1, len % 3 == 1);
    }
}

#[test]
fn fixed_rent_only_counts_shops() {
    let mut t = standard(100);
    t.fixed_rent = vec![vec![1.0; 5]; 100];
    let inst = MallInstance::new(t).unwrap();
    let layout: Vec<usize> = (0..100).collect();
    let r = inst.rent(&layout).unwrap();
    assert_eq!(r, MallRent { rent: 100.0, violation: 0.0 });
}

#[test]
fn single_type_area_decomposes_into_six_large_one_medium() {
    let mut t = standard(3);
    t.fixed_rent = vec![vec![1.0; 5]; 3];
    t.size_rent = [1.0, 2.0, 4.0];
    t.attract = vec![vec![0.5; 3]; 5];
    let inst = MallInstance::new(t).unwrap();
    let mut layout: Vec<usize> = (0..100).map(|i| 1 + i % 2).collect();
    layout[..20].fill(0);
    let d = decompose_sizes(&inst, &layout).unwrap();
    assert_eq!(d.get(0, 0), SizeCounts { small: 0, medium: 1, large: 6 });
    assert_eq!(d.type_total(0), 7);
    // area 0: 7 shops at fixed 1 plus 0.5 * (6 * 4 + 2); other areas 80 singletons at 1 + 0.5
    let expected = 7.0 + 0.5 * 26.0 + 80.0 * 1.5;
    assert_eq!(inst.rent(&layout).unwrap().rent, expected);
}

#[test]
fn below_minimum_is_infeasible() {
    let mut t = standard(2);
    t.bounds[1] = CountBounds { min: 1, ideal: 1, max: 5 };
    let inst = MallInstance::new(t).unwrap();
    let r = inst.rent(&vec![0; 100]).unwrap();
    assert!(!r.feasible());
    assert_eq!(r.violation, 1.0);
}

#[test]
fn size_limits_are_mall_wide() {
    let mut t = standard(2);
    t.size_limits = [100, 100, 30];
    let inst = MallInstance::new(t).unwrap();
    // every area of one type: 6 large + 1 medium each, 30 large total
    assert!(inst.rent(&vec![0; 100]).unwrap().feasible());
    let mut tighter = inst.tables();
    tighter.size_limits = [100, 4, 29];
    let inst = MallInstance::new(tighter).unwrap();
    assert_eq!(inst.rent(&vec![0; 100]).unwrap().violation, 2.0);
}

#[test]
fn count_rent_peaks_at_ideal() {
    let mut t = standard(1);
    t.bounds[0] = CountBounds { min: 2, ideal: 4, max: 7 };
    t.count_peak[0] = 12.0;
    let inst = MallInstance::new(t).unwrap();
    let values: Vec<f64> = (0..10).map(|c| inst.count_rent(0, c)).collect();
    assert_eq!(values, vec![0.0, 0.0, 4.0, 8.0, 12.0, 9.0, 6.0, 3.0, 0.0, 0.0]);
}

#[test]
fn synergy_counts_adjacent_shops_sharing_a_group() {
    let mut t = blank(1, 7, 3);
    t.groups = vec![0b01, 0b11, 0b10];
    t.synergy = 1.0;
    let inst = MallInstance::new(t).unwrap();
    // shops: [0][1][2][0 0 0 0]: 0-1 share, 1-2 share, 2-0 no; run of 4 = large + small sharing
    assert_eq!(inst.rent(&[0, 1, 2, 0, 0, 0, 0]).unwrap().rent, 2.0 + 1.0);
    // three distinct groups-free neighbours
    let mut t = blank(1, 3, 3);
    t.synergy = 5.0;
    assert_eq!(MallInstance::new(t).unwrap().rent(&[0, 1, 2]).unwrap().rent, 0.0);
}

#[test]
fn distinct_area_gives_singletons() {
    let inst = MallInstance::new(standard(25)).unwrap();
    let mut layout = vec![0; 100];
    for (i, g) in layout[..20].iter_mut().enumerate() {
        *g = i;
    }
    let d = decompose_sizes(&inst, &layout).unwrap();
    for t in 0..20 {
        assert_eq!(d.get(0, t), SizeCounts { small: 1, medium: 0, large: 0 });
    }
}

#[test]
fn area_rents_sum_to_full_rent_without_global_terms() {
    let mut t = standard(4);
    t.groups = vec![1, 1, 2, 3];
    t.synergy = 3.0;
    t.size_rent = [1.0, 3.0, 6.0];
    t.attract = (0..5).map(|a| (0..4).map(|x| (a + x) as f64 * 0.25).collect()).collect();
    t.fixed_rent = (0..4).map(|x| (0..5).map(|a| (x * 5 + a) as f64).collect()).collect();
    let inst = MallInstance::new(t).unwrap();
    let layout: Vec<usize> = (0..100).map(|i| (i * 7 / 3) % 4).collect();
    let areas: f64 = (0..5).map(|a| inst.area_rent(a, &layout[a * 20..(a + 1) * 20]).unwrap().rent).sum();
    assert_eq!(areas, inst.rent(&layout).unwrap().rent);
}

#[test]
fn area_violation_only_counts_local_excess() {
    let mut t = standard(2);
    t.bounds[0] = CountBounds { min: 0, ideal: 0, max: 3 };
    t.bounds[1] = CountBounds { min: 10, ideal: 10, max: 10 };
    let inst = MallInstance::new(t).unwrap();
    // area of alternating types: 10 shops of each; type 0 exceeds max by 7, type 1 below min is global only
    let genes: Vec<usize> = (0..20).map(|i| i % 2).collect();
    assert_eq!(inst.area_rent(0, &genes).unwrap().violation, 7.0);
}

#[test]
fn rejects_bad_input() {
    let inst = MallInstance::new(standard(2)).unwrap();
    assert!(matches!(inst.rent(&[0; 99]), Err(Error::SlotMismatch(_))));
    let mut layout = vec![0; 100];
    layout[42] = 2;
    assert!(matches!(inst.rent(&layout), Err(Error::InvalidShopType { location: 42, shop_type: 2 })));
    assert!(inst.area_rent(0, &[0; 19]).is_err());
    let mut bad = standard(2);
    bad.bounds[0] = CountBounds { min: 3, ideal: 2, max: 4 };
    assert!(MallInstance::new(bad).is_err());
}

#[test]
fn internal_objective_is_negated_rent() {
    let mut t = standard(2);
    t.fixed_rent = vec![vec![2.0; 5], vec![1.0; 5]];
    let inst = MallInstance::new(t).unwrap();
    let e = inst.evaluate_full(&vec![1; 100]).unwrap();
    assert_eq!(inst.reported(e.objective), inst.rent(&vec![1; 100]).unwrap().rent);
    assert!(inst.evaluate_full(&vec![0; 100]).unwrap().objective < e.objective);
}

#[test]
fn argmax_rent_equals_argmin_objective_on_toy_mall() {
    let mut t = blank(1, 4, 3);
    t.groups = vec![1, 1, 2];
    t.synergy = 2.0;
    t.fixed_rent = vec![vec![1.0], vec![3.0], vec![2.0]];
    t.size_rent = [1.0, 4.0, 9.0];
    t.attract = vec![vec![0.5, 0.25, 1.0]];
    t.bounds = vec![CountBounds { min: 1, ideal: 1, max: 2 }; 3];
    let inst = MallInstance::new(t).unwrap();
    let layouts: Vec<Vec<usize>> = (0..81).map(|mut c| (0..4).map(|_| { let g = c % 3; c /= 3; g }).collect()).collect();
    let feasible: Vec<&Vec<usize>> = layouts.iter().filter(|l| inst.rent(l).unwrap().feasible()).collect();
    let by_rent = feasible.iter().max_by(|a, b| inst.rent(a).unwrap().rent.total_cmp(&inst.rent(b).unwrap().rent)).unwrap();
    let by_obj = feasible
        .iter()
        .min_by(|a, b| inst.evaluate_full(a).unwrap().objective.total_cmp(&inst.evaluate_full(b).unwrap().objective))
        .unwrap();
    assert_eq!(inst.rent(by_rent).unwrap().rent, inst.rent(by_obj).unwrap().rent);
}

#[test]
fn io_round_trip() {
    let mut t = blank(2, 3, 3);
    t.groups = vec![0, 0b101, 1 << 63];
    t.attract = vec![vec![0.25, 1.5, 2.0], vec![0.75, 0.0, 3.25]];
    t.fixed_rent = vec![vec![1.0, -2.5], vec![3.0, 4.0], vec![0.125, 7.0]];
    t.size_rent = [8.0, 18.0, 30.5];
    t.synergy = 2.0;
    t.bounds = vec![CountBounds { min: 0, ideal: 1, max: 3 }; 3];
    t.count_peak = vec![9.84375, 19.6875, 0.1];
    t.size_limits = [4, 2, 1];
    let inst = MallInstance::new(t).unwrap();
    let text = write_mall_instance(&inst);
    let back: MallInstance<f64> = read_mall_instance(&text).unwrap();
    assert_eq!(back, inst);
    assert_eq!(write_mall_instance(&back), text);
}

proptest! {
    #[test]
    fn decomposition_depends_only_on_run_lengths(runs in proptest::collection::vec(1usize..6, 1..8), shift in 0usize..3) {
        let per_area: usize = runs.iter().sum();
        let mut t = blank(1, per_area, 3);
        // both labelings alternate two distinct types, so the run structure is shared
        t.size_limits = [0; 3];
        let inst = MallInstance::new(t).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (i, &len) in runs.iter().enumerate() {
            a.extend(std::iter::repeat_n(i % 2, len));
            b.extend(std::iter::repeat_n((i % 2 + shift + 1) % 3, len));
        }
        let total = |layout: &[usize]| {
            let d = decompose_sizes(&inst, layout).unwrap();
            SizeClass::ALL.map(|s| d.size_total(s))
        };
        prop_assert_eq!(total(&a), total(&b));
        prop_assert_eq!(inst.rent(&a).unwrap().violation, inst.rent(&b).unwrap().violation);
    }

    #[test]
    fn positive_shop_never_lowers_rent(fixed in 0.25f64..5.0, attract in 0.0f64..3.0) {
        // grow one area from a singleton-only layout by turning a zero-rent slot into a paid type
        let mut t = blank(1, 4, 4);
        t.fixed_rent = vec![vec![0.0], vec![0.0], vec![0.0], vec![fixed]];
        t.attract = vec![vec![0.0, 0.0, 0.0, attract]];
        t.size_rent = [1.0, 2.0, 3.0];
        let inst = MallInstance::new(t).unwrap();
        let before = inst.rent(&[0, 1, 2, 0]).unwrap();
        let after = inst.rent(&[0, 1, 2, 3]).unwrap();
        prop_assert!(after.rent >= before.rent);
    }
}
