//! Reference implementations used to check the solver.
//!
//! Everything here is written from the problem definitions directly and reads
//! only raw instance data; none of the solver's evaluation code is reused.
//! The code favours obviousness over speed.

use pyramid_core::mall::{MallInstance, SizeClass};
use pyramid_core::nurse::NurseInstance;
use pyramid_core::nurse::PERIODS;

/// Cost and uncovered demand of a nurse assignment, recomputed from scratch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NurseCheck {
    pub cost: f64,
    pub uncovered: f64,
}

impl NurseCheck {
    pub fn feasible(&self) -> bool {
        self.uncovered == 0.0
    }

    pub fn penalised(&self, weight: f64) -> f64 {
        self.cost + weight * self.uncovered
    }
}

/// Preference cost plus uncovered demand, counting a nurse towards her own
/// grade and every lower one.
pub fn recompute_fitness(inst: &NurseInstance<f64>, assignment: &[usize]) -> NurseCheck {
    let mut cost = 0.0;
    for (nurse, &pattern) in assignment.iter().enumerate() {
        cost += inst.pref_cost(nurse, pattern);
    }
    let mut uncovered = 0.0;
    for period in 0..PERIODS {
        for grade in 0..inst.grade_count() {
            let mut working = 0u32;
            for (nurse, &pattern) in assignment.iter().enumerate() {
                let on_shift = inst.patterns()[pattern].covers(period);
                let qualified = inst.grade_of(nurse) <= grade;
                if on_shift && qualified {
                    working += 1;
                }
            }
            let required = inst.demand(period, grade);
            if required > working {
                uncovered += f64::from(required - working);
            }
        }
    }
    NurseCheck { cost, uncovered }
}

/// Every assignment drawing each nurse's pattern from her feasible set, in
/// lexicographic order of feasible-set positions.
pub fn enumerate_nurse(inst: &NurseInstance<f64>) -> Vec<Vec<usize>> {
    let n = inst.nurse_count();
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    fn recurse(inst: &NurseInstance<f64>, nurse: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if nurse == current.len() {
            out.push(current.clone());
            return;
        }
        for &p in inst.feasible_set(nurse) {
            current[nurse] = p;
            recurse(inst, nurse + 1, current, out);
        }
    }
    recurse(inst, 0, &mut current, &mut out);
    out
}

/// Lowest-cost demand-covering assignment, or `None` when no assignment covers demand.
pub fn brute_force_nurse(inst: &NurseInstance<f64>) -> Option<(f64, Vec<usize>)> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for assignment in enumerate_nurse(inst) {
        let check = recompute_fitness(inst, &assignment);
        if check.feasible() && best.as_ref().is_none_or(|(c, _)| check.cost < *c) {
            best = Some((check.cost, assignment));
        }
    }
    best
}

/// Rent and violation of a mall layout, recomputed from scratch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MallCheck {
    pub rent: f64,
    pub violation: f64,
}

impl MallCheck {
    pub fn feasible(&self) -> bool {
        self.violation == 0.0
    }

    /// Penalised rent, to be maximised.
    pub fn penalised(&self, weight: f64) -> f64 {
        self.rent - weight * self.violation
    }
}

#[derive(Debug, Clone, Copy)]
struct Shop {
    area: usize,
    shop_type: usize,
    size: SizeClass,
}

/// Shops of one area in sequence order. A run of equal types becomes as many
/// three-location shops as fit, then one two- or one-location shop.
fn shops_of_area(inst: &MallInstance<f64>, area: usize, layout: &[usize]) -> Vec<Shop> {
    let locations: Vec<usize> = inst.area_locations(area).collect();
    let mut shops = Vec::new();
    let mut i = 0;
    while i < locations.len() {
        let t = layout[locations[i]];
        let mut len = 1;
        while i + len < locations.len() && layout[locations[i + len]] == t {
            len += 1;
        }
        let mut left = len;
        while left >= 3 {
            shops.push(Shop { area, shop_type: t, size: SizeClass::Large });
            left -= 3;
        }
        if left == 2 {
            shops.push(Shop { area, shop_type: t, size: SizeClass::Medium });
        } else if left == 1 {
            shops.push(Shop { area, shop_type: t, size: SizeClass::Small });
        }
        i += len;
    }
    shops
}

fn count_rent(inst: &MallInstance<f64>, shop_type: usize, count: u32) -> f64 {
    let b = inst.bounds(shop_type);
    let peak = inst.count_peak(shop_type);
    if count < b.min || count > b.max {
        0.0
    } else if count <= b.ideal {
        peak * f64::from(count - b.min + 1) / f64::from(b.ideal - b.min + 1)
    } else {
        peak * f64::from(b.max + 1 - count) / f64::from(b.max + 1 - b.ideal)
    }
}

fn shop_rent(inst: &MallInstance<f64>, shop: &Shop) -> f64 {
    inst.fixed_rent(shop.shop_type, shop.area) + inst.attract(shop.area, shop.shop_type) * inst.size_rent(shop.size)
}

fn synergy_pairs(inst: &MallInstance<f64>, shops: &[Shop]) -> usize {
    shops.windows(2).filter(|w| inst.groups(w[0].shop_type) & inst.groups(w[1].shop_type) != 0).count()
}

fn size_excess(inst: &MallInstance<f64>, shops: &[Shop]) -> f64 {
    SizeClass::ALL
        .iter()
        .map(|&size| {
            let n = shops.iter().filter(|s| s.size == size).count() as u32;
            f64::from(n.saturating_sub(inst.size_limit(size)))
        })
        .sum()
}

pub fn recompute_rent(inst: &MallInstance<f64>, layout: &[usize]) -> MallCheck {
    let mut rent = 0.0;
    let mut all_shops = Vec::new();
    for area in 0..inst.area_count() {
        let shops = shops_of_area(inst, area, layout);
        for shop in &shops {
            rent += shop_rent(inst, shop);
        }
        rent += inst.synergy() * synergy_pairs(inst, &shops) as f64;
        all_shops.extend(shops);
    }
    let mut violation = size_excess(inst, &all_shops);
    for t in 0..inst.type_count() {
        let count = all_shops.iter().filter(|s| s.shop_type == t).count() as u32;
        rent += count_rent(inst, t, count);
        let b = inst.bounds(t);
        violation += f64::from(b.min.saturating_sub(count)) + f64::from(count.saturating_sub(b.max));
    }
    MallCheck { rent, violation }
}

/// Area-local rent of one area's genes and the violations that area alone
/// already incurs: types over their maximum and size classes over their limit.
pub fn recompute_area_rent(inst: &MallInstance<f64>, area: usize, genes: &[usize]) -> MallCheck {
    let mut layout = vec![0usize; inst.location_count()];
    for (location, &t) in inst.area_locations(area).zip(genes) {
        layout[location] = t;
    }
    let shops = shops_of_area(inst, area, &layout);
    let mut rent: f64 = shops.iter().map(|s| shop_rent(inst, s)).sum();
    rent += inst.synergy() * synergy_pairs(inst, &shops) as f64;
    let mut violation = size_excess(inst, &shops);
    for t in 0..inst.type_count() {
        let count = shops.iter().filter(|s| s.shop_type == t).count() as u32;
        violation += f64::from(count.saturating_sub(inst.bounds(t).max));
    }
    MallCheck { rent, violation }
}

/// Highest-rent feasible layout by exhaustive search. Only usable on toy
/// instances; `None` when no layout is feasible.
pub fn brute_force_mall(inst: &MallInstance<f64>) -> Option<(f64, Vec<usize>)> {
    let n = inst.location_count();
    let t = inst.type_count();
    let total = (t as u128).checked_pow(n as u32).filter(|&total| total <= 10_000_000);
    let total = total.unwrap_or_else(|| panic!("search space of {t}^{n} layouts is too large to enumerate"));
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut layout = vec![0usize; n];
    for _ in 0..total {
        let check = recompute_rent(inst, &layout);
        if check.feasible() && best.as_ref().is_none_or(|(r, _)| check.rent > *r) {
            best = Some((check.rent, layout.clone()));
        }
        for gene in layout.iter_mut() {
            *gene += 1;
            if *gene < t {
                break;
            }
            *gene = 0;
        }
    }
    best
}
