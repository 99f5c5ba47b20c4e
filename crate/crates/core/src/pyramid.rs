//! The sub-population hierarchy: which problem slots each level evolves,
//! which lower levels feed its cross-level crossover, and which levels
//! complete its partial strings for evaluation.
//!
//! A level's genome lists its slots in global `slot_order`. Levels need not be
//! contiguous in that order; every graft goes through explicit slot positions.

use std::fmt::Write as _;

use crate::engine::Genome;
use crate::error::{Error, Result};
use crate::mall::MallInstance;
use crate::nurse::{GradeSet, NurseInstance};
use crate::scalar::Scalar;

pub type LevelId = usize;

/// Which (sub-)fitness a level's agents receive when evaluated on their own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LevelFitness {
    /// The original problem.
    Full,
    /// Nurse cover and requests restricted to a grade set.
    Grades(GradeSet),
    /// Nurse cover counted without grades, against total staff demand.
    GradeBlind,
    /// Mall rent terms local to one area.
    Area(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSpec {
    pub id: LevelId,
    pub name: String,
    /// Slots carried by this level's genomes, in genome order.
    pub slots: Vec<usize>,
    pub capacity: usize,
    pub crossover_sources: Vec<LevelId>,
    pub evaluation_complements: Vec<LevelId>,
    pub fitness: LevelFitness,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    levels: Vec<LevelSpec>,
    slot_order: Vec<usize>,
    top: LevelId,
    /// `positions[level][slot]` is the gene index of `slot`, or `usize::MAX`.
    positions: Vec<Vec<usize>>,
}

const ABSENT: usize = usize::MAX;

impl Topology {
    /// Validates and indexes a hierarchy.
    ///
    /// Requirements: `slot_order` is a permutation of the slot ids; every
    /// level lists distinct slots following `slot_order`; exactly one level
    /// covers all slots with [`LevelFitness::Full`] (the top); each level's
    /// complements together with its own slots cover every slot exactly once;
    /// crossover sources are subsets of the receiving level.
    pub fn new(mut levels: Vec<LevelSpec>, slot_order: Vec<usize>) -> Result<Self> {
        let n = slot_order.len();
        let invalid = |msg: String| Err(Error::InvalidTopology(msg));
        let mut rank = vec![ABSENT; n];
        for (r, &slot) in slot_order.iter().enumerate() {
            if slot >= n || rank[slot] != ABSENT {
                return invalid(format!("slot order is not a permutation of 0..{n}"));
            }
            rank[slot] = r;
        }
        if levels.is_empty() {
            return invalid("no levels".into());
        }
        for (i, level) in levels.iter_mut().enumerate() {
            level.id = i;
        }
        let mut positions = Vec::with_capacity(levels.len());
        for level in &levels {
            if level.capacity == 0 {
                return invalid(format!("level {} has zero capacity", level.name));
            }
            let mut pos = vec![ABSENT; n];
            for (g, &slot) in level.slots.iter().enumerate() {
                if slot >= n || pos[slot] != ABSENT {
                    return invalid(format!("level {} repeats or overflows slot {slot}", level.name));
                }
                pos[slot] = g;
            }
            if level.slots.windows(2).any(|w| rank[w[0]] > rank[w[1]]) {
                return invalid(format!("level {} does not follow the global slot order", level.name));
            }
            positions.push(pos);
        }
        let tops: Vec<LevelId> = levels
            .iter()
            .filter(|l| l.slots.len() == n && l.fitness == LevelFitness::Full)
            .map(|l| l.id)
            .collect();
        if tops.len() != 1 {
            return invalid(format!("expected exactly one full-fitness top level, found {}", tops.len()));
        }
        let topology = Self { top: tops[0], levels, slot_order, positions };
        for level in &topology.levels {
            for &src in level.crossover_sources.iter().chain(&level.evaluation_complements) {
                if src >= topology.levels.len() || src == level.id {
                    return invalid(format!("level {} references invalid level {src}", level.name));
                }
            }
            for &src in &level.crossover_sources {
                if !topology.is_subset(src, level.id) {
                    return invalid(format!(
                        "crossover source {} is not nested in {}",
                        topology.levels[src].name, level.name
                    ));
                }
            }
            topology.check_partition(level.id)?;
        }
        Ok(topology)
    }

    fn check_partition(&self, id: LevelId) -> Result<()> {
        let level = &self.levels[id];
        if level.slots.len() == self.slot_count() && level.evaluation_complements.is_empty() {
            return Ok(());
        }
        let mut written = vec![0u32; self.slot_count()];
        let all = std::iter::once(id).chain(level.evaluation_complements.iter().copied());
        for l in all {
            for &slot in &self.levels[l].slots {
                written[slot] += 1;
            }
        }
        if written.iter().all(|&c| c == 1) {
            Ok(())
        } else {
            Err(Error::InvalidTopology(format!(
                "level {} and its complements do not partition the slots",
                level.name
            )))
        }
    }

    /// Whether every slot of `lower` is also carried by `higher`.
    pub fn is_subset(&self, lower: LevelId, higher: LevelId) -> bool {
        self.levels[lower].slots.iter().all(|&s| self.positions[higher][s] != ABSENT)
    }

    pub fn levels(&self) -> &[LevelSpec] {
        &self.levels
    }

    pub fn level(&self, id: LevelId) -> Result<&LevelSpec> {
        self.levels.get(id).ok_or(Error::UnknownLevel(id))
    }

    pub fn top(&self) -> LevelId {
        self.top
    }

    pub fn slot_order(&self) -> &[usize] {
        &self.slot_order
    }

    pub fn slot_count(&self) -> usize {
        self.slot_order.len()
    }

    pub fn total_capacity(&self) -> usize {
        self.levels.iter().map(|l| l.capacity).sum()
    }

    /// Gene index of `slot` within `level`'s genomes.
    pub fn position(&self, level: LevelId, slot: usize) -> Option<usize> {
        self.positions.get(level)?.get(slot).copied().filter(|&p| p != ABSENT)
    }

    /// Levels whose genomes are never built by cross-level crossover.
    pub fn is_bottom(&self, level: LevelId) -> bool {
        self.levels[level].crossover_sources.is_empty()
    }

    /// Contiguous runs of the level's slots as `[start, end)` ranges of `slot_order` positions.
    pub fn segments(&self, level: LevelId) -> Vec<(usize, usize)> {
        let mut rank = vec![0; self.slot_count()];
        for (r, &s) in self.slot_order.iter().enumerate() {
            rank[s] = r;
        }
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &slot in &self.levels[level].slots {
            let r = rank[slot];
            match out.last_mut() {
                Some(last) if last.1 == r => last.1 = r + 1,
                _ => out.push((r, r + 1)),
            }
        }
        out
    }

    /// Multiplies every capacity by `factor`, keeping at least two agents per level.
    pub fn scaled(mut self, factor: f64) -> Self {
        for level in &mut self.levels {
            level.capacity = ((level.capacity as f64 * factor).round() as usize).max(2);
        }
        self
    }

    /// Writes `genes` of a `level` genome into a full assignment indexed by slot.
    pub fn write_into(&self, level: LevelId, genes: &[usize], assignment: &mut [usize]) {
        for (&slot, &gene) in self.levels[level].slots.iter().zip(genes) {
            assignment[slot] = gene;
        }
    }

    /// Full assignment of a genome that covers every slot.
    pub fn to_assignment(&self, level: LevelId, genes: &[usize]) -> Vec<usize> {
        let mut out = vec![0; self.slot_count()];
        self.write_into(level, genes, &mut out);
        out
    }

    /// Genes of `level` read from a full assignment.
    pub fn project(&self, level: LevelId, assignment: &[usize]) -> Vec<usize> {
        self.levels[level].slots.iter().map(|&s| assignment[s]).collect()
    }

    /// Level table for `describe`.
    pub fn describe(&self) -> String {
        let names = |ids: &[LevelId]| {
            if ids.is_empty() {
                "-".to_string()
            } else {
                ids.iter().map(|&i| self.levels[i].name.as_str()).collect::<Vec<_>>().join(",")
            }
        };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<3} {:<8} {:>8} {:>6} {:<14} {:<22} {:<22} fitness",
            "id", "level", "capacity", "slots", "segments", "crossover-sources", "complements"
        );
        for level in &self.levels {
            let segments: Vec<String> = self.segments(level.id).iter().map(|(a, b)| format!("{a}..{b}")).collect();
            let fitness = match level.fitness {
                LevelFitness::Full => "full".to_string(),
                LevelFitness::Grades(g) => format!("grades {}", g.label()),
                LevelFitness::GradeBlind => "grade-blind".to_string(),
                LevelFitness::Area(a) => format!("area {}", a + 1),
            };
            let _ = writeln!(
                out,
                "{:<3} {:<8} {:>8} {:>6} {:<14} {:<22} {:<22} {}{}",
                level.id,
                level.name,
                level.capacity,
                level.slots.len(),
                if segments.is_empty() { "-".to_string() } else { segments.join(",") },
                names(&level.crossover_sources),
                names(&level.evaluation_complements),
                fitness,
                if level.id == self.top { " (top)" } else { "" }
            );
        }
        let _ = writeln!(out, "total capacity {}", self.total_capacity());
        out
    }
}

fn level(name: &str, slots: Vec<usize>, capacity: usize, sources: Vec<LevelId>, complements: Vec<LevelId>, fitness: LevelFitness) -> LevelSpec {
    LevelSpec {
        id: 0,
        name: name.to_string(),
        slots,
        capacity,
        crossover_sources: sources,
        evaluation_complements: complements,
        fitness,
    }
}

/// Eight-level nurse hierarchy: single grades, grade pairs, the grade-blind
/// full string and the top level solving the original problem.
pub fn build_nurse_topology<F: Scalar>(inst: &NurseInstance<F>) -> Result<Topology> {
    if inst.grade_count() != 3 {
        return Err(Error::NurseTopologyGrades(inst.grade_count()));
    }
    let mut slot_order: Vec<usize> = (0..inst.nurse_count()).collect();
    slot_order.sort_by_key(|&i| (inst.grade_of(i), i));
    let slots_of = |set: GradeSet| -> Vec<usize> {
        slot_order.iter().copied().filter(|&i| set.contains(inst.grade_of(i))).collect()
    };
    // ids: 0 {1}, 1 {2}, 2 {3}, 3 {1+2}, 4 {2+3}, 5 {3+1}, 6 {1+2+3}, 7 all
    let g = |grades: &[usize]| GradeSet::of(grades);
    let pair = |name: &str, set: GradeSet, sources: Vec<LevelId>, complement: LevelId| {
        level(name, slots_of(set), 100, sources, vec![complement], LevelFitness::Grades(set))
    };
    let levels = vec![
        pair("1", g(&[0]), vec![], 4),
        pair("2", g(&[1]), vec![], 5),
        pair("3", g(&[2]), vec![], 3),
        pair("1+2", g(&[0, 1]), vec![0, 1], 2),
        pair("2+3", g(&[1, 2]), vec![1, 2], 0),
        pair("3+1", g(&[0, 2]), vec![2, 0], 1),
        level("1+2+3", slots_of(g(&[0, 1, 2])), 100, (0..6).collect(), vec![], LevelFitness::GradeBlind),
        level("all", slot_order.clone(), 300, (0..7).collect(), vec![], LevelFitness::Full),
    ];
    Topology::new(levels, slot_order)
}

/// Two-level mall hierarchy: one level per area plus the full layout.
pub fn build_mall_topology<F: Scalar>(inst: &MallInstance<F>) -> Result<Topology> {
    if inst.area_count() != 5 {
        return Err(Error::MallTopologyAreas(inst.area_count()));
    }
    let areas = inst.area_count();
    let mut levels: Vec<LevelSpec> = (0..areas)
        .map(|a| {
            level(
                &(a + 1).to_string(),
                inst.area_locations(a).collect(),
                100,
                vec![],
                (0..areas).filter(|&b| b != a).collect(),
                LevelFitness::Area(a),
            )
        })
        .collect();
    levels.push(level("all", (0..inst.location_count()).collect(), 500, (0..areas).collect(), vec![], LevelFitness::Full));
    Topology::new(levels, (0..inst.location_count()).collect())
}

/// One population of 1000 agents solving the full problem: the plain GA baseline.
pub fn build_single_topology(slot_count: usize) -> Result<Topology> {
    let order: Vec<usize> = (0..slot_count).collect();
    Topology::new(vec![level("all", order.clone(), 1000, vec![], vec![], LevelFitness::Full)], order)
}

/// Grafts `lower`'s genes into a copy of `higher` at `lower`'s slots.
pub fn fixed_point_crossover<F: Scalar>(lower: &Genome<F>, higher: &Genome<F>, topology: &Topology) -> Result<Genome<F>> {
    let low = topology.level(lower.level)?;
    let high = topology.level(higher.level)?;
    if !topology.is_subset(low.id, high.id) {
        return Err(Error::NonNestedLevels { lower: low.name.clone(), higher: high.name.clone() });
    }
    if lower.genes.len() != low.slots.len() || higher.genes.len() != high.slots.len() {
        return Err(Error::IncompatibleGenomes("genome length differs from its level".into()));
    }
    let mut genes = higher.genes.clone();
    for (&slot, &gene) in low.slots.iter().zip(&lower.genes) {
        genes[topology.positions[high.id][slot]] = gene;
    }
    Ok(Genome::new(high.id, genes))
}

/// Levels that complete a partial genome of `level` into a full solution.
pub fn complement_levels(level: LevelId, topology: &Topology) -> Result<&[LevelId]> {
    Ok(&topology.level(level)?.evaluation_complements)
}

#[cfg(test)]
mod tests;
