//! Mall tenant selection: assign a shop type to every location so that rent
//! is maximised under per-type count bounds and mall-wide size limits.
//!
//! Locations are grouped into areas; within an area they form a fixed linear
//! sequence, and a contiguous run of one type forms shops greedily: as many
//! large (3 locations) as fit, then one medium (2) or small (1) for the rest.
//! Internally the objective is the negated rent.

mod io;

pub use io::{read_mall_instance, write_mall_instance};

use crate::error::{Error, Result};
use crate::problem::{Evaluation, Problem};
use crate::pyramid::LevelFitness;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SizeClass {
    Small = 0,
    Medium = 1,
    Large = 2,
}

impl SizeClass {
    pub const ALL: [SizeClass; 3] = [SizeClass::Small, SizeClass::Medium, SizeClass::Large];

    pub fn footprint(self) -> usize {
        self as usize + 1
    }
}

/// Large, medium and small shop counts for one run of `len` locations.
pub fn split_run(len: usize) -> SizeCounts {
    let large = len / 3;
    match len % 3 {
        0 => SizeCounts { small: 0, medium: 0, large },
        1 => SizeCounts { small: 1, medium: 0, large },
        _ => SizeCounts { small: 0, medium: 1, large },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct SizeCounts {
    pub small: usize,
    pub medium: usize,
    pub large: usize,
}

impl SizeCounts {
    pub fn get(&self, size: SizeClass) -> usize {
        match size {
            SizeClass::Small => self.small,
            SizeClass::Medium => self.medium,
            SizeClass::Large => self.large,
        }
    }

    pub fn shops(&self) -> usize {
        self.small + self.medium + self.large
    }

    pub fn locations(&self) -> usize {
        self.small + 2 * self.medium + 3 * self.large
    }

    fn add(&mut self, other: SizeCounts) {
        self.small += other.small;
        self.medium += other.medium;
        self.large += other.large;
    }
}

/// Shop counts per (area, type).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeDecomposition {
    type_count: usize,
    counts: Vec<SizeCounts>,
}

impl SizeDecomposition {
    pub fn get(&self, area: usize, shop_type: usize) -> SizeCounts {
        self.counts[area * self.type_count + shop_type]
    }

    pub fn type_total(&self, shop_type: usize) -> usize {
        self.counts.chunks(self.type_count).map(|row| row[shop_type].shops()).sum()
    }

    pub fn size_total(&self, size: SizeClass) -> usize {
        self.counts.iter().map(|c| c.get(size)).sum()
    }
}

/// Minimum, ideal and maximum number of shops of one type in the mall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CountBounds {
    pub min: u32,
    pub ideal: u32,
    pub max: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MallInstance<F> {
    areas: usize,
    per_area: usize,
    type_count: usize,
    groups: Vec<u64>,
    attract: Vec<Vec<F>>,
    fixed_rent: Vec<Vec<F>>,
    size_rent: [F; 3],
    synergy: F,
    bounds: Vec<CountBounds>,
    count_peak: Vec<F>,
    size_limits: [u32; 3],
    domain: Vec<usize>,
}

/// Everything needed to build a [`MallInstance`].
#[derive(Debug, Clone, PartialEq)]
pub struct MallTables<F> {
    pub areas: usize,
    pub per_area: usize,
    /// Group membership bitmask per type.
    pub groups: Vec<u64>,
    /// Rent multiplier, `areas x types`.
    pub attract: Vec<Vec<F>>,
    /// Fixed rent, `types x areas`.
    pub fixed_rent: Vec<Vec<F>>,
    /// Base rent of a small, medium and large shop.
    pub size_rent: [F; 3],
    /// Bonus per adjacent pair of shops sharing a group.
    pub synergy: F,
    pub bounds: Vec<CountBounds>,
    /// Count-dependent rent at the ideal count, per type.
    pub count_peak: Vec<F>,
    /// Mall-wide maximum number of small, medium and large shops.
    pub size_limits: [u32; 3],
}

impl<F: Scalar> MallInstance<F> {
    pub fn new(tables: MallTables<F>) -> Result<Self> {
        let MallTables { areas, per_area, groups, attract, fixed_rent, size_rent, synergy, bounds, count_peak, size_limits } =
            tables;
        let t = groups.len();
        let bad = |msg: &str| Err(Error::InvalidInstance(msg.to_string()));
        if areas == 0 || per_area == 0 || t == 0 {
            return bad("mall needs at least one area, location and shop type");
        }
        if attract.len() != areas || attract.iter().any(|row| row.len() != t) {
            return bad("attractiveness table must be areas x types");
        }
        if fixed_rent.len() != t || fixed_rent.iter().any(|row| row.len() != areas) {
            return bad("fixed rent table must be types x areas");
        }
        if bounds.len() != t || count_peak.len() != t {
            return bad("count bounds and peaks need one entry per type");
        }
        if bounds.iter().any(|b| !(b.min <= b.ideal && b.ideal <= b.max)) {
            return bad("count bounds must satisfy min <= ideal <= max");
        }
        let finite = attract.iter().flatten().chain(fixed_rent.iter().flatten()).chain(&count_peak).chain(&size_rent)
            .all(|v| v.is_finite())
            && synergy.is_finite();
        if !finite {
            return bad("rent tables must be finite");
        }
        Ok(Self {
            areas,
            per_area,
            type_count: t,
            groups,
            attract,
            fixed_rent,
            size_rent,
            synergy,
            bounds,
            count_peak,
            size_limits,
            domain: (0..t).collect(),
        })
    }

    pub fn tables(&self) -> MallTables<F> {
        MallTables {
            areas: self.areas,
            per_area: self.per_area,
            groups: self.groups.clone(),
            attract: self.attract.clone(),
            fixed_rent: self.fixed_rent.clone(),
            size_rent: self.size_rent,
            synergy: self.synergy,
            bounds: self.bounds.clone(),
            count_peak: self.count_peak.clone(),
            size_limits: self.size_limits,
        }
    }

    pub fn area_count(&self) -> usize {
        self.areas
    }

    pub fn locations_per_area(&self) -> usize {
        self.per_area
    }

    pub fn location_count(&self) -> usize {
        self.areas * self.per_area
    }

    pub fn type_count(&self) -> usize {
        self.type_count
    }

    pub fn area_of(&self, location: usize) -> usize {
        location / self.per_area
    }

    pub fn area_locations(&self, area: usize) -> std::ops::Range<usize> {
        area * self.per_area..(area + 1) * self.per_area
    }

    pub fn groups(&self, shop_type: usize) -> u64 {
        self.groups[shop_type]
    }

    pub fn attract(&self, area: usize, shop_type: usize) -> F {
        self.attract[area][shop_type]
    }

    pub fn fixed_rent(&self, shop_type: usize, area: usize) -> F {
        self.fixed_rent[shop_type][area]
    }

    pub fn size_rent(&self, size: SizeClass) -> F {
        self.size_rent[size as usize]
    }

    pub fn synergy(&self) -> F {
        self.synergy
    }

    pub fn bounds(&self, shop_type: usize) -> CountBounds {
        self.bounds[shop_type]
    }

    pub fn count_peak(&self, shop_type: usize) -> F {
        self.count_peak[shop_type]
    }

    pub fn size_limit(&self, size: SizeClass) -> u32 {
        self.size_limits[size as usize]
    }

    /// Rent earned by a type as a function of its mall-wide shop count:
    /// linear up to the peak at the ideal count, linear down to the maximum,
    /// zero outside `[min, max]`.
    pub fn count_rent(&self, shop_type: usize, count: usize) -> F {
        let b = self.bounds[shop_type];
        let c = count as u32;
        if c < b.min || c > b.max {
            return F::zero();
        }
        let peak = self.count_peak[shop_type];
        if c <= b.ideal {
            peak * F::of_count((c - b.min + 1) as usize) / F::of_count((b.ideal - b.min + 1) as usize)
        } else {
            peak * F::of_count((b.max + 1 - c) as usize) / F::of_count((b.max + 1 - b.ideal) as usize)
        }
    }

    fn check_layout(&self, slots: impl Iterator<Item = (usize, usize)>) -> Result<()> {
        for (location, shop_type) in slots {
            if shop_type >= self.type_count {
                return Err(Error::InvalidShopType { location, shop_type });
            }
        }
        Ok(())
    }

    /// Walks one area's genes, emitting `(type, size)` for each shop in
    /// sequence order and the number of adjacent shop pairs sharing a group.
    fn area_shops(&self, genes: &[usize], mut shop: impl FnMut(usize, SizeCounts)) -> usize {
        let mut synergy_pairs = 0;
        let mut prev_groups: Option<u64> = None;
        let mut start = 0;
        while start < genes.len() {
            let t = genes[start];
            let mut end = start + 1;
            while end < genes.len() && genes[end] == t {
                end += 1;
            }
            let counts = split_run(end - start);
            let g = self.groups[t];
            if let Some(prev) = prev_groups {
                if prev & g != 0 {
                    synergy_pairs += 1;
                }
            }
            // shops inside a run are neighbours of the same type
            if g != 0 {
                synergy_pairs += counts.shops() - 1;
            }
            prev_groups = Some(g);
            shop(t, counts);
            start = end;
        }
        synergy_pairs
    }

    /// Area-local rent of one area: fixed rent, attractiveness-weighted size
    /// rent and synergy. Also returns the per-type and per-size shop counts.
    fn area_terms(&self, area: usize, genes: &[usize]) -> (F, Vec<usize>, SizeCounts) {
        let mut rent = F::zero();
        let mut per_type = vec![0usize; self.type_count];
        let mut sizes = SizeCounts::default();
        let pairs = self.area_shops(genes, |t, counts| {
            for size in SizeClass::ALL {
                let k = counts.get(size);
                if k > 0 {
                    let each = self.fixed_rent[t][area] + self.attract[area][t] * self.size_rent[size as usize];
                    rent += each * F::of_count(k);
                }
            }
            per_type[t] += counts.shops();
            sizes.add(counts);
        });
        rent += self.synergy * F::of_count(pairs);
        (rent, per_type, sizes)
    }

    fn size_violation(&self, sizes: &SizeCounts) -> usize {
        SizeClass::ALL
            .iter()
            .map(|&s| sizes.get(s).saturating_sub(self.size_limits[s as usize] as usize))
            .sum()
    }

    /// Rent and violation of a full layout.
    pub fn rent(&self, layout: &[usize]) -> Result<MallRent<F>> {
        if layout.len() != self.location_count() {
            return Err(Error::SlotMismatch(format!(
                "layout has {} genes, mall has {} locations",
                layout.len(),
                self.location_count()
            )));
        }
        self.check_layout(layout.iter().copied().enumerate())?;
        let mut rent = F::zero();
        let mut per_type = vec![0usize; self.type_count];
        let mut sizes = SizeCounts::default();
        for area in 0..self.areas {
            let (r, counts, s) = self.area_terms(area, &layout[self.area_locations(area)]);
            rent += r;
            per_type.iter_mut().zip(counts).for_each(|(a, b)| *a += b);
            sizes.add(s);
        }
        let mut violation = self.size_violation(&sizes);
        for (t, &count) in per_type.iter().enumerate() {
            rent += self.count_rent(t, count);
            let b = self.bounds[t];
            violation += (b.min as usize).saturating_sub(count) + count.saturating_sub(b.max as usize);
        }
        Ok(MallRent { rent, violation: F::of_count(violation) })
    }

    /// Area-only rent minus nothing global; violation counts only what one
    /// area alone already breaks (a type or size class over its mall-wide cap).
    pub fn area_rent(&self, area: usize, genes: &[usize]) -> Result<MallRent<F>> {
        if area >= self.areas {
            return Err(Error::SlotMismatch(format!("area {area} out of range")));
        }
        if genes.len() != self.per_area {
            return Err(Error::SlotMismatch(format!(
                "area string has {} genes, areas have {} locations",
                genes.len(),
                self.per_area
            )));
        }
        let first = area * self.per_area;
        self.check_layout(genes.iter().enumerate().map(|(i, &t)| (first + i, t)))?;
        let (rent, per_type, sizes) = self.area_terms(area, genes);
        let mut violation = self.size_violation(&sizes);
        for (t, &count) in per_type.iter().enumerate() {
            violation += count.saturating_sub(self.bounds[t].max as usize);
        }
        Ok(MallRent { rent, violation: F::of_count(violation) })
    }

    pub fn mean_abs_fixed_rent(&self) -> F {
        let cells = self.type_count * self.areas;
        let total: F = self.fixed_rent.iter().flatten().map(|v| v.abs()).sum();
        let mean = total / F::of_count(cells);
        if mean > F::zero() {
            mean
        } else {
            F::one()
        }
    }
}

/// Rent (to maximise) and total constraint violation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MallRent<F> {
    pub rent: F,
    pub violation: F,
}

impl<F: Scalar> MallRent<F> {
    pub fn feasible(&self) -> bool {
        self.violation == F::zero()
    }

    /// Internal minimisation form: `-rent + w * violation`.
    pub fn penalised(&self, weight: F) -> F {
        -self.rent + weight * self.violation
    }

    pub fn evaluation(&self) -> Evaluation<F> {
        Evaluation::new(-self.rent, self.violation)
    }
}

pub fn decompose_sizes<F: Scalar>(inst: &MallInstance<F>, layout: &[usize]) -> Result<SizeDecomposition> {
    if layout.len() != inst.location_count() {
        return Err(Error::SlotMismatch("layout length differs from location count".into()));
    }
    inst.check_layout(layout.iter().copied().enumerate())?;
    let t = inst.type_count;
    let mut counts = vec![SizeCounts::default(); inst.areas * t];
    for area in 0..inst.areas {
        inst.area_shops(&layout[inst.area_locations(area)], |shop_type, c| counts[area * t + shop_type].add(c));
    }
    Ok(SizeDecomposition { type_count: t, counts })
}

/// Rent, violation and feasibility of a full layout, plus its penalised
/// minimisation value under `weight`.
pub fn full_rent<F: Scalar>(inst: &MallInstance<F>, layout: &[usize], weight: F) -> Result<(MallRent<F>, F)> {
    let r = inst.rent(layout)?;
    Ok((r, r.penalised(weight)))
}

/// Penalised area sub-fitness in minimisation form.
pub fn area_sub_fitness<F: Scalar>(inst: &MallInstance<F>, area: usize, genes: &[usize], weight: F) -> Result<F> {
    Ok(inst.area_rent(area, genes)?.penalised(weight))
}

impl<F: Scalar> Problem<F> for MallInstance<F> {
    fn slot_count(&self) -> usize {
        self.location_count()
    }

    fn domain(&self, _slot: usize) -> &[usize] {
        &self.domain
    }

    fn evaluate_full(&self, assignment: &[usize]) -> Result<Evaluation<F>> {
        Ok(self.rent(assignment)?.evaluation())
    }

    fn evaluate_partial(&self, fitness: &LevelFitness, slots: &[usize], genes: &[usize]) -> Result<Evaluation<F>> {
        match fitness {
            LevelFitness::Area(area) => {
                let expected = self.area_locations(*area);
                if slots.len() != expected.len() || slots.iter().zip(expected).any(|(&a, b)| a != b) {
                    return Err(Error::SlotMismatch(format!("partial string does not cover area {area}")));
                }
                Ok(self.area_rent(*area, genes)?.evaluation())
            }
            LevelFitness::Full => {
                let mut layout = vec![0; self.location_count()];
                if slots.len() != layout.len() {
                    return Err(Error::SlotMismatch("full fitness needs every location".into()));
                }
                for (&slot, &gene) in slots.iter().zip(genes) {
                    layout[slot] = gene;
                }
                self.evaluate_full(&layout)
            }
            other => Err(Error::SlotMismatch(format!("{other:?} fitness on a mall instance"))),
        }
    }

    fn penalty_scale(&self) -> F {
        self.mean_abs_fixed_rent()
    }

    fn reported(&self, objective: F) -> F {
        -objective
    }
}

#[cfg(test)]
mod tests;
