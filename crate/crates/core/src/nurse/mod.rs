//! Nurse scheduling: every nurse works exactly one shift pattern from their
//! feasible set, and cumulative per-grade demand must be covered on each of
//! the 7 days and 7 nights.
//!
//! Grades are zero-based internally (`0` is the most qualified). A nurse of
//! grade `g` counts towards the demand of every grade `s >= g`.

mod io;

pub use io::{read_nurse_instance, write_nurse_instance};

use crate::error::{Error, Result};
use crate::problem::{Evaluation, Problem};
use crate::pyramid::LevelFitness;
use crate::scalar::Scalar;

/// Days are periods `0..7`, nights `7..14`.
pub const PERIODS: usize = 14;
pub const DAYS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternKind {
    Day,
    Night,
    Combined,
}

impl PatternKind {
    pub fn code(self) -> char {
        match self {
            PatternKind::Day => 'D',
            PatternKind::Night => 'N',
            PatternKind::Combined => 'B',
        }
    }

    pub fn from_code(code: char) -> Option<Self> {
        match code {
            'D' => Some(PatternKind::Day),
            'N' => Some(PatternKind::Night),
            'B' => Some(PatternKind::Combined),
            _ => None,
        }
    }
}

/// Weekly shift pattern; bit `k` of `cover` is set when period `k` is worked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShiftPattern {
    pub cover: u16,
    pub kind: PatternKind,
}

impl ShiftPattern {
    pub fn new(cover: u16, kind: PatternKind) -> Result<Self> {
        if cover >> PERIODS != 0 {
            return Err(Error::InvalidInstance(format!("pattern cover {cover:#x} exceeds 14 periods")));
        }
        let ok = match kind {
            PatternKind::Day => cover >> DAYS == 0,
            PatternKind::Night => cover & ((1 << DAYS) - 1) == 0,
            PatternKind::Combined => true,
        };
        if !ok {
            return Err(Error::InvalidInstance(format!(
                "{kind:?} pattern {cover:#016b} covers the wrong half of the week"
            )));
        }
        Ok(Self { cover, kind })
    }

    pub fn covers(&self, period: usize) -> bool {
        self.cover >> period & 1 == 1
    }

    pub fn day_count(&self) -> u32 {
        (self.cover & ((1 << DAYS) - 1)).count_ones()
    }

    pub fn night_count(&self) -> u32 {
        (self.cover >> DAYS).count_ones()
    }

    pub fn total_count(&self) -> u32 {
        self.cover.count_ones()
    }

    pub fn periods(&self) -> impl Iterator<Item = usize> + '_ {
        (0..PERIODS).filter(move |&k| self.covers(k))
    }
}

/// Shifts per week worked under each pattern kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Contract {
    pub days: u32,
    pub nights: u32,
    pub both: u32,
}

impl Contract {
    pub fn admits(&self, pattern: &ShiftPattern) -> bool {
        match pattern.kind {
            PatternKind::Day => pattern.day_count() == self.days,
            PatternKind::Night => pattern.night_count() == self.nights,
            PatternKind::Combined => pattern.total_count() == self.both,
        }
    }
}

/// Set of zero-based grades as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GradeSet(pub u8);

impl GradeSet {
    pub fn of(grades: &[usize]) -> Self {
        GradeSet(grades.iter().fold(0, |acc, &g| acc | 1 << g))
    }

    pub fn all(grade_count: usize) -> Self {
        GradeSet(((1u16 << grade_count) - 1) as u8)
    }

    pub fn contains(&self, grade: usize) -> bool {
        grade < 8 && self.0 >> grade & 1 == 1
    }

    pub fn grades(&self) -> impl Iterator<Item = usize> + '_ {
        (0..8).filter(move |&g| self.contains(g))
    }

    /// One-based label such as `1+2`.
    pub fn label(&self) -> String {
        self.grades().map(|g| (g + 1).to_string()).collect::<Vec<_>>().join("+")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NurseInstance<F> {
    patterns: Vec<ShiftPattern>,
    grades: Vec<usize>,
    grade_count: usize,
    contracts: Vec<Contract>,
    pref_cost: Vec<Vec<F>>,
    demand: Vec<Vec<u32>>,
    feasible_sets: Vec<Vec<usize>>,
    feasible_mask: Vec<Vec<bool>>,
}

impl<F: Scalar> NurseInstance<F> {
    /// Builds an instance and derives every nurse's feasible pattern set.
    ///
    /// `pref_cost` is `n x m`, `demand` is `14 x grade_count` with cumulative
    /// semantics: row `k`, column `s` asks for nurses of grade `s` or better.
    pub fn new(
        patterns: Vec<ShiftPattern>,
        grades: Vec<usize>,
        grade_count: usize,
        contracts: Vec<Contract>,
        pref_cost: Vec<Vec<F>>,
        demand: Vec<Vec<u32>>,
    ) -> Result<Self> {
        let n = grades.len();
        let m = patterns.len();
        if grade_count == 0 || grade_count > 8 {
            return Err(Error::InvalidInstance(format!("grade count {grade_count} out of range")));
        }
        if contracts.len() != n || pref_cost.len() != n {
            return Err(Error::InvalidInstance("per-nurse tables disagree on nurse count".into()));
        }
        if let Some(g) = grades.iter().find(|&&g| g >= grade_count) {
            return Err(Error::InvalidInstance(format!("grade {} exceeds grade count", g + 1)));
        }
        if pref_cost.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidInstance("preference cost row length differs from pattern count".into()));
        }
        if pref_cost.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInstance("non-finite preference cost".into()));
        }
        if demand.len() != PERIODS || demand.iter().any(|row| row.len() != grade_count) {
            return Err(Error::InvalidInstance("demand must be 14 x grade_count".into()));
        }
        let mut feasible_sets = Vec::with_capacity(n);
        let mut feasible_mask = Vec::with_capacity(n);
        for (i, contract) in contracts.iter().enumerate() {
            let mask: Vec<bool> = patterns.iter().map(|p| contract.admits(p)).collect();
            let set: Vec<usize> = (0..m).filter(|&j| mask[j]).collect();
            if set.is_empty() {
                return Err(Error::InvalidInstance(format!("nurse {i} has no feasible shift pattern")));
            }
            feasible_sets.push(set);
            feasible_mask.push(mask);
        }
        Ok(Self { patterns, grades, grade_count, contracts, pref_cost, demand, feasible_sets, feasible_mask })
    }

    pub fn nurse_count(&self) -> usize {
        self.grades.len()
    }

    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    pub fn grade_count(&self) -> usize {
        self.grade_count
    }

    pub fn patterns(&self) -> &[ShiftPattern] {
        &self.patterns
    }

    pub fn grade_of(&self, nurse: usize) -> usize {
        self.grades[nurse]
    }

    pub fn grades(&self) -> &[usize] {
        &self.grades
    }

    pub fn contract(&self, nurse: usize) -> Contract {
        self.contracts[nurse]
    }

    pub fn pref_cost(&self, nurse: usize, pattern: usize) -> F {
        self.pref_cost[nurse][pattern]
    }

    pub fn pref_costs(&self) -> &[Vec<F>] {
        &self.pref_cost
    }

    /// Cumulative demand for grade `grade` or better in period `period`.
    pub fn demand(&self, period: usize, grade: usize) -> u32 {
        self.demand[period][grade]
    }

    pub fn demand_rows(&self) -> &[Vec<u32>] {
        &self.demand
    }

    pub fn feasible_set(&self, nurse: usize) -> &[usize] {
        &self.feasible_sets[nurse]
    }

    pub fn is_pattern_feasible(&self, nurse: usize, pattern: usize) -> bool {
        self.feasible_mask[nurse].get(pattern).copied().unwrap_or(false)
    }

    /// `q_is`: nurse is of grade `s` or higher.
    pub fn qualifies(&self, nurse: usize, grade: usize) -> bool {
        self.grades[nurse] <= grade
    }

    /// Nurses whose grade lies in `set`, in index order.
    pub fn nurses_in(&self, set: GradeSet) -> Vec<usize> {
        (0..self.nurse_count()).filter(|&i| set.contains(self.grades[i])).collect()
    }

    /// Mean preference cost over all nurse/pattern pairs.
    pub fn mean_pref_cost(&self) -> F {
        let cells = self.nurse_count() * self.pattern_count();
        if cells == 0 {
            return F::one();
        }
        let total: F = self.pref_cost.iter().flatten().copied().sum();
        total / F::of_count(cells)
    }

    fn check_gene(&self, nurse: usize, pattern: usize) -> Result<()> {
        if self.is_pattern_feasible(nurse, pattern) {
            Ok(())
        } else {
            Err(Error::InfeasiblePattern { nurse, pattern })
        }
    }

    /// Per (period, grade) supply counting only `nurses`, with cumulative substitution.
    fn supply<'a>(
        &self,
        nurses: impl Iterator<Item = (usize, usize)> + 'a,
    ) -> Result<(F, Vec<u32>)> {
        let p = self.grade_count;
        let mut supply = vec![0u32; PERIODS * p];
        let mut pref = F::zero();
        for (nurse, pattern) in nurses {
            self.check_gene(nurse, pattern)?;
            pref += self.pref_cost[nurse][pattern];
            let grade = self.grades[nurse];
            let mut cover = self.patterns[pattern].cover;
            while cover != 0 {
                let k = cover.trailing_zeros() as usize;
                cover &= cover - 1;
                for cell in &mut supply[k * p + grade..(k + 1) * p] {
                    *cell += 1;
                }
            }
        }
        Ok((pref, supply))
    }

    fn uncovered_matrix(&self, supply: &[u32]) -> Vec<Vec<u32>> {
        let p = self.grade_count;
        (0..PERIODS)
            .map(|k| (0..p).map(|s| self.demand[k][s].saturating_sub(supply[k * p + s])).collect())
            .collect()
    }

    /// Objective and violation of a full assignment (gene `i` = pattern of nurse `i`).
    pub fn evaluate(&self, assignment: &[usize]) -> Result<Evaluation<F>> {
        self.check_length(assignment)?;
        let (pref, supply) = self.supply(assignment.iter().copied().enumerate())?;
        let p = self.grade_count;
        let mut uncovered = 0u64;
        for k in 0..PERIODS {
            for s in 0..p {
                uncovered += u64::from(self.demand[k][s].saturating_sub(supply[k * p + s]));
            }
        }
        Ok(Evaluation::new(pref, F::of(uncovered as f64)))
    }

    fn check_length(&self, assignment: &[usize]) -> Result<()> {
        if assignment.len() != self.nurse_count() {
            return Err(Error::SlotMismatch(format!(
                "assignment has {} genes, instance has {} nurses",
                assignment.len(),
                self.nurse_count()
            )));
        }
        Ok(())
    }

    /// Signed surplus `supply - demand` per (period, grade), row-major `14 x p`.
    pub fn surplus(&self, assignment: &[usize]) -> Result<Vec<Vec<i64>>> {
        self.check_length(assignment)?;
        let (_, supply) = self.supply(assignment.iter().copied().enumerate())?;
        let p = self.grade_count;
        Ok((0..PERIODS)
            .map(|k| (0..p).map(|s| i64::from(supply[k * p + s]) - i64::from(self.demand[k][s])).collect())
            .collect())
    }

    /// Preference cost plus demand shortfall restricted to the grades in `set`.
    ///
    /// Only nurses inside `set` supply cover, and only demand rows of grades in
    /// `set` are checked, so substitution from outside the set is ignored.
    pub fn evaluate_grades(&self, set: GradeSet, slots: &[usize], genes: &[usize]) -> Result<Evaluation<F>> {
        self.check_partial(set, slots, genes)?;
        let (pref, supply) = self.supply(slots.iter().copied().zip(genes.iter().copied()))?;
        let p = self.grade_count;
        let mut uncovered = 0u64;
        for k in 0..PERIODS {
            for s in set.grades().filter(|&s| s < p) {
                uncovered += u64::from(self.demand[k][s].saturating_sub(supply[k * p + s]));
            }
        }
        Ok(Evaluation::new(pref, F::of(uncovered as f64)))
    }

    /// Grade-blind cover: total staff per period against the lowest-grade
    /// cumulative row, which is the total staff requirement.
    pub fn evaluate_grade_blind(&self, slots: &[usize], genes: &[usize]) -> Result<Evaluation<F>> {
        self.check_partial(GradeSet::all(self.grade_count), slots, genes)?;
        let (pref, supply) = self.supply(slots.iter().copied().zip(genes.iter().copied()))?;
        let p = self.grade_count;
        let last = p - 1;
        let uncovered: u64 = (0..PERIODS)
            .map(|k| u64::from(self.demand[k][last].saturating_sub(supply[k * p + last])))
            .sum();
        Ok(Evaluation::new(pref, F::of(uncovered as f64)))
    }

    fn check_partial(&self, set: GradeSet, slots: &[usize], genes: &[usize]) -> Result<()> {
        if slots.len() != genes.len() {
            return Err(Error::SlotMismatch("slot and gene counts differ".into()));
        }
        let mut seen = vec![false; self.nurse_count()];
        for &i in slots {
            if i >= self.nurse_count() || !set.contains(self.grades[i]) || seen[i] {
                return Err(Error::SlotMismatch(format!("nurse {i} is not in grade set {}", set.label())));
            }
            seen[i] = true;
        }
        let expected = self.grades.iter().filter(|&&g| set.contains(g)).count();
        if expected != slots.len() {
            return Err(Error::SlotMismatch(format!(
                "grade set {} has {expected} nurses, partial string covers {}",
                set.label(),
                slots.len()
            )));
        }
        Ok(())
    }
}

/// Fitness of a full schedule split into its terms.
#[derive(Debug, Clone, PartialEq)]
pub struct NurseFitnessBreakdown<F> {
    pub preference_cost: F,
    /// `max(R_ks - supply_ks, 0)`, `14 x p`.
    pub uncovered: Vec<Vec<u32>>,
    pub penalty_weight: F,
    pub total: F,
}

impl<F: Scalar> NurseFitnessBreakdown<F> {
    pub fn uncovered_total(&self) -> u64 {
        self.uncovered.iter().flatten().map(|&u| u64::from(u)).sum()
    }

    pub fn feasible(&self) -> bool {
        self.uncovered_total() == 0
    }
}

/// Preference cost plus `weight` times the number of uncovered shifts.
pub fn full_fitness<F: Scalar>(
    inst: &NurseInstance<F>,
    assignment: &[usize],
    weight: F,
) -> Result<NurseFitnessBreakdown<F>> {
    inst.check_length(assignment)?;
    let (preference_cost, supply) = inst.supply(assignment.iter().copied().enumerate())?;
    let uncovered = inst.uncovered_matrix(&supply);
    let count: u64 = uncovered.iter().flatten().map(|&u| u64::from(u)).sum();
    let total = preference_cost + weight * F::of(count as f64);
    Ok(NurseFitnessBreakdown { preference_cost, uncovered, penalty_weight: weight, total })
}

/// Penalised sub-fitness of the nurses of `set`; `slots[i]` is the nurse carried by `genes[i]`.
pub fn sub_fitness<F: Scalar>(
    inst: &NurseInstance<F>,
    set: GradeSet,
    slots: &[usize],
    genes: &[usize],
    weight: F,
) -> Result<F> {
    Ok(inst.evaluate_grades(set, slots, genes)?.penalised(weight))
}

/// Whether every cumulative grade demand is met. Invalid genes yield `false`.
pub fn is_feasible<F: Scalar>(inst: &NurseInstance<F>, assignment: &[usize]) -> bool {
    inst.evaluate(assignment).map(|e| e.feasible()).unwrap_or(false)
}

impl<F: Scalar> Problem<F> for NurseInstance<F> {
    fn slot_count(&self) -> usize {
        self.nurse_count()
    }

    fn domain(&self, slot: usize) -> &[usize] {
        &self.feasible_sets[slot]
    }

    fn evaluate_full(&self, assignment: &[usize]) -> Result<Evaluation<F>> {
        self.evaluate(assignment)
    }

    fn evaluate_partial(&self, fitness: &LevelFitness, slots: &[usize], genes: &[usize]) -> Result<Evaluation<F>> {
        match fitness {
            LevelFitness::Full => {
                let mut assignment = vec![0; self.nurse_count()];
                if slots.len() != assignment.len() {
                    return Err(Error::SlotMismatch("full fitness needs every nurse".into()));
                }
                for (&slot, &gene) in slots.iter().zip(genes) {
                    assignment[slot] = gene;
                }
                self.evaluate(&assignment)
            }
            LevelFitness::Grades(set) => self.evaluate_grades(*set, slots, genes),
            LevelFitness::GradeBlind => self.evaluate_grade_blind(slots, genes),
            LevelFitness::Area(_) => Err(Error::SlotMismatch("area fitness on a nurse instance".into())),
        }
    }

    fn penalty_scale(&self) -> F {
        self.mean_pref_cost()
    }
}
