//! Seeded synthetic instance generators.
//!
//! Both generators plant a solution first and derive the constraints from it,
//! so every generated instance has at least one feasible solution. The
//! tightness tier sets how much slack is removed around the planted solution.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mall::{split_run, CountBounds, MallInstance, MallTables, SizeClass};
use crate::nurse::{Contract, NurseInstance, PatternKind, ShiftPattern, DAYS, PERIODS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tightness {
    Loose,
    Medium,
    Tight,
}

impl Tightness {
    pub const ALL: [Tightness; 3] = [Tightness::Loose, Tightness::Medium, Tightness::Tight];

    pub fn name(self) -> &'static str {
        match self {
            Tightness::Loose => "loose",
            Tightness::Medium => "medium",
            Tightness::Tight => "tight",
        }
    }
}

impl fmt::Display for Tightness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tightness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tightness::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown tightness tier `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NurseParams {
    pub nurses: usize,
    /// Share of nurses in grades 1, 2 and 3.
    pub grade_mix: [f64; 3],
    pub tightness: Tightness,
    /// Add patterns mixing days and nights.
    pub combined_patterns: bool,
    /// Keep a random subset of at most this many patterns.
    pub max_patterns: Option<usize>,
    /// Share of nurses whose preferred shift kind matches their planted one.
    pub preference_alignment: f64,
    /// Extra preference cost of a pattern outside the nurse's preferred kind.
    pub kind_aversion: u32,
    /// Share of nurses working nights in the planted schedule.
    pub planted_night_share: f64,
    /// Planted patterns are drawn from each nurse's this-many cheapest of the planted kind.
    pub planted_choice: usize,
}

impl Default for NurseParams {
    fn default() -> Self {
        Self {
            nurses: 30,
            grade_mix: [0.25, 0.35, 0.40],
            tightness: Tightness::Medium,
            combined_patterns: false,
            max_patterns: None,
            preference_alignment: 0.9,
            kind_aversion: 30,
            planted_night_share: 0.4,
            planted_choice: 3,
        }
    }
}

impl NurseParams {
    pub fn tiny(nurses: usize, max_patterns: usize) -> Self {
        Self { nurses, max_patterns: Some(max_patterns), ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        let mix_ok = self.grade_mix.iter().all(|&g| g >= 0.0) && self.grade_mix.iter().sum::<f64>() > 0.0;
        if self.nurses == 0 || !mix_ok {
            return Err(Error::Config("nurse generator needs nurses and a non-negative grade mix".into()));
        }
        if self.max_patterns == Some(0) || self.planted_choice == 0 {
            return Err(Error::Config("max_patterns and planted_choice must be positive".into()));
        }
        for share in [self.preference_alignment, self.planted_night_share] {
            if !(0.0..=1.0).contains(&share) {
                return Err(Error::Config("generator shares must lie in [0, 1]".into()));
            }
        }
        Ok(())
    }
}

/// Weekly contracts as (days, nights, both) and their frequency weights.
const CONTRACTS: [((u32, u32, u32), u32); 3] = [((5, 4, 5), 6), ((4, 3, 4), 2), ((3, 3, 3), 2)];

fn combinations(bits: usize, count: u32) -> Vec<u16> {
    (0u16..1 << bits).filter(|m| m.count_ones() == count).collect()
}

/// Draw of `floor(100 * X)` with `X ~ Beta(1, 4)`, by inverting `1 - (1 - x)^4`.
pub fn biased_cost<R: Rng + ?Sized>(rng: &mut R) -> u32 {
    let u: f64 = rng.gen();
    ((100.0 * (1.0 - (1.0 - u).powf(0.25))).floor() as u32).min(100)
}

fn grade_counts(n: usize, mix: [f64; 3]) -> [usize; 3] {
    let total: f64 = mix.iter().sum();
    let mut counts = [0usize; 3];
    let mut assigned = 0;
    for g in 0..2 {
        counts[g] = ((mix[g] / total) * n as f64).round() as usize;
        counts[g] = counts[g].min(n - assigned);
        assigned += counts[g];
    }
    counts[2] = n - assigned;
    counts
}

pub fn generate_nurse_instance(params: &NurseParams, seed: u64) -> Result<NurseInstance<f64>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.nurses;

    let weights: u32 = CONTRACTS.iter().map(|(_, w)| w).sum();
    let contracts: Vec<Contract> = (0..n)
        .map(|_| {
            let mut pick = rng.gen_range(0..weights);
            let ((days, nights, both), _) = *CONTRACTS
                .iter()
                .find(|(_, w)| {
                    if pick < *w {
                        true
                    } else {
                        pick -= w;
                        false
                    }
                })
                .expect("weights cover the draw");
            Contract { days, nights, both }
        })
        .collect();

    let mut patterns: Vec<ShiftPattern> = Vec::new();
    let mut day_counts: Vec<u32> = contracts.iter().map(|c| c.days).collect();
    day_counts.sort_unstable();
    day_counts.dedup();
    let mut night_counts: Vec<u32> = contracts.iter().map(|c| c.nights).collect();
    night_counts.sort_unstable();
    night_counts.dedup();
    for &d in &day_counts {
        for cover in combinations(DAYS, d) {
            patterns.push(ShiftPattern::new(cover, PatternKind::Day)?);
        }
    }
    for &c in &night_counts {
        for cover in combinations(DAYS, c) {
            patterns.push(ShiftPattern::new(cover << DAYS, PatternKind::Night)?);
        }
    }
    if params.combined_patterns {
        let mut both: Vec<u32> = contracts.iter().map(|c| c.both).collect();
        both.sort_unstable();
        both.dedup();
        for &b in &both {
            let mut mixed: Vec<u16> = combinations(PERIODS, b)
                .into_iter()
                .filter(|m| m & ((1 << DAYS) - 1) != 0 && m >> DAYS != 0)
                .collect();
            mixed.shuffle(&mut rng);
            mixed.truncate(24);
            mixed.sort_unstable();
            for cover in mixed {
                patterns.push(ShiftPattern::new(cover, PatternKind::Combined)?);
            }
        }
    }
    let mut contracts = contracts;
    if let Some(limit) = params.max_patterns {
        patterns.shuffle(&mut rng);
        patterns.truncate(limit);
        // re-fit every contract to the kept patterns so each nurse keeps a feasible one
        for contract in &mut contracts {
            let anchor = patterns[rng.gen_range(0..patterns.len())];
            let nights: Vec<u32> = patterns.iter().filter(|p| p.kind == PatternKind::Night).map(|p| p.night_count()).collect();
            let days: Vec<u32> = patterns.iter().filter(|p| p.kind == PatternKind::Day).map(|p| p.day_count()).collect();
            *contract = match anchor.kind {
                PatternKind::Day => Contract {
                    days: anchor.day_count(),
                    nights: nights.choose(&mut rng).copied().unwrap_or(contract.nights),
                    both: contract.both,
                },
                PatternKind::Night => Contract {
                    days: days.choose(&mut rng).copied().unwrap_or(contract.days),
                    nights: anchor.night_count(),
                    both: contract.both,
                },
                PatternKind::Combined => Contract { both: anchor.total_count(), ..*contract },
            };
        }
    }

    let [g1, g2, _] = grade_counts(n, params.grade_mix);
    let mut grades: Vec<usize> = (0..n).map(|i| if i < g1 { 0 } else if i < g1 + g2 { 1 } else { 2 }).collect();
    grades.shuffle(&mut rng);

    let zero_demand = vec![vec![0u32; 3]; PERIODS];
    let zero_cost = vec![vec![0.0; patterns.len()]; n];
    let shell = NurseInstance::new(patterns, grades, 3, contracts, zero_cost, zero_demand)?;
    let is_night = |j: usize| shell.patterns()[j].kind == PatternKind::Night;

    let planted_nights: Vec<bool> = (0..n)
        .map(|i| {
            let set = shell.feasible_set(i);
            let has_nights = set.iter().any(|&j| is_night(j));
            let has_days = set.iter().any(|&j| !is_night(j));
            has_nights && (!has_days || rng.gen::<f64>() < params.planted_night_share)
        })
        .collect();
    let pref_cost: Vec<Vec<f64>> = planted_nights
        .iter()
        .map(|&nights| {
            let prefers_nights = nights == (rng.gen::<f64>() < params.preference_alignment);
            shell
                .patterns()
                .iter()
                .map(|p| {
                    let mut cost = biased_cost(&mut rng);
                    let preferred = if prefers_nights { p.kind == PatternKind::Night } else { p.kind == PatternKind::Day };
                    if !preferred {
                        cost = (cost + params.kind_aversion).min(100);
                    }
                    f64::from(cost)
                })
                .collect()
        })
        .collect();
    let planted: Vec<usize> = (0..n)
        .map(|i| {
            let mut pool: Vec<usize> =
                shell.feasible_set(i).iter().copied().filter(|&j| is_night(j) == planted_nights[i]).collect();
            pool.sort_by(|&a, &b| pref_cost[i][a].total_cmp(&pref_cost[i][b]).then(a.cmp(&b)));
            pool.truncate(params.planted_choice);
            pool[rng.gen_range(0..pool.len())]
        })
        .collect();
    let surplus = shell.surplus(&planted)?;
    let demand: Vec<Vec<u32>> = surplus
        .iter()
        .map(|row| {
            row.iter()
                .map(|&supply| {
                    let slack = nurse_slack(params.tightness, &mut rng);
                    (supply - slack).max(0) as u32
                })
                .collect()
        })
        .collect();
    NurseInstance::new(
        shell.patterns().to_vec(),
        shell.grades().to_vec(),
        3,
        (0..n).map(|i| shell.contract(i)).collect(),
        pref_cost,
        demand,
    )
}

fn nurse_slack<R: Rng + ?Sized>(tightness: Tightness, rng: &mut R) -> i64 {
    let u: f64 = rng.gen();
    match tightness {
        Tightness::Tight => i64::from(u >= 0.8),
        Tightness::Medium => {
            if u < 0.5 {
                0
            } else if u < 0.9 {
                1
            } else {
                2
            }
        }
        Tightness::Loose => 1 + i64::from(u >= 0.5),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MallParams {
    pub areas: usize,
    pub locations_per_area: usize,
    /// Fixed type count; drawn from 20..=50 when `None`.
    pub types: Option<usize>,
    pub groups: usize,
    pub tightness: Tightness,
}

impl Default for MallParams {
    fn default() -> Self {
        Self { areas: 5, locations_per_area: 20, types: None, groups: 8, tightness: Tightness::Medium }
    }
}

/// Count-rent peaks are multiples of this; with at most ten counts on either
/// side of the ideal every count rent stays a dyadic rational, so rents sum
/// exactly in binary floating point regardless of order.
const PEAK_UNIT: f64 = 2520.0 / 256.0;
const SIZE_RENT: [f64; 3] = [8.0, 18.0, 30.0];

pub fn generate_mall_instance(params: &MallParams, seed: u64) -> Result<MallInstance<f64>> {
    if params.areas == 0 || params.locations_per_area == 0 || params.groups == 0 || params.groups > 64 {
        return Err(Error::Config("mall generator needs areas, locations and 1..=64 groups".into()));
    }
    if params.types.is_some_and(|t| t < 2) {
        return Err(Error::Config("mall generator needs at least two shop types".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = params.types.unwrap_or_else(|| rng.gen_range(20..=50));
    let areas = params.areas;

    let groups: Vec<u64> = (0..t)
        .map(|_| {
            let mut mask = 1u64 << rng.gen_range(0..params.groups);
            if rng.gen::<f64>() < 0.3 {
                mask |= 1 << rng.gen_range(0..params.groups);
            }
            mask
        })
        .collect();
    let attract: Vec<Vec<f64>> =
        (0..areas).map(|_| (0..t).map(|_| f64::from(rng.gen_range(2u32..=12)) / 4.0).collect()).collect();
    let fixed_rent: Vec<Vec<f64>> =
        (0..t).map(|_| (0..areas).map(|_| f64::from(rng.gen_range(1u32..=10))).collect()).collect();

    // planted layout: runs of 1..=4 locations, neighbouring runs of different types
    let mut counts = vec![0u32; t];
    let mut sizes = [0u32; 3];
    for _ in 0..areas {
        let mut filled = 0;
        let mut prev = usize::MAX;
        while filled < params.locations_per_area {
            let len = rng.gen_range(1..=4).min(params.locations_per_area - filled);
            let mut ty = rng.gen_range(0..t);
            while ty == prev {
                ty = rng.gen_range(0..t);
            }
            let split = split_run(len);
            counts[ty] += split.shops() as u32;
            for size in SizeClass::ALL {
                sizes[size as usize] += split.get(size) as u32;
            }
            prev = ty;
            filled += len;
        }
    }

    let (lo, hi) = match params.tightness {
        Tightness::Loose => (2, 4),
        Tightness::Medium => (1, 2),
        Tightness::Tight => (0, 1),
    };
    let bounds: Vec<CountBounds> = counts
        .iter()
        .map(|&c| {
            let min = c.saturating_sub(rng.gen_range(lo..=hi));
            let max = c + rng.gen_range(lo..=hi);
            let ideal = (c + rng.gen_range(0..=2)).saturating_sub(1).clamp(min, max);
            CountBounds { min, ideal, max }
        })
        .collect();
    let count_peak: Vec<f64> = (0..t).map(|_| f64::from(rng.gen_range(1u32..=6)) * PEAK_UNIT).collect();
    let size_limits = sizes.map(|s| s + rng.gen_range(lo..=hi * 2));

    MallInstance::new(MallTables {
        areas,
        per_area: params.locations_per_area,
        groups,
        attract,
        fixed_rent,
        size_rent: SIZE_RENT,
        synergy: 2.0,
        bounds,
        count_peak,
        size_limits,
    })
}
