//! Local search for nurse schedules: single reassignments, pairwise pattern
//! swaps and three-nurse chain swaps, first improvement in nurse index order.

use crate::error::Result;
use crate::nurse::{NurseInstance, DAYS, PERIODS};
use crate::problem::LocalSearch;
use crate::scalar::Scalar;

/// Signed `supply - demand` per (period, grade).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceProfile {
    pub surplus: Vec<Vec<i64>>,
}

impl BalanceProfile {
    pub fn of<F: Scalar>(inst: &NurseInstance<F>, assignment: &[usize]) -> Result<Self> {
        Ok(Self { surplus: inst.surplus(assignment)? })
    }

    pub fn uncovered(&self) -> Vec<Vec<u32>> {
        self.surplus.iter().map(|row| row.iter().map(|&s| (-s).max(0) as u32).collect()).collect()
    }

    fn class_has(&self, periods: std::ops::Range<usize>, pred: impl Fn(i64) -> bool) -> bool {
        self.surplus[periods].iter().flatten().any(|&s| pred(s))
    }

    /// Surplus somewhere and shortage somewhere within the days, or within the nights.
    pub fn is_balanced(&self) -> bool {
        [0..DAYS, DAYS..PERIODS]
            .into_iter()
            .any(|class| self.class_has(class.clone(), |s| s > 0) && self.class_has(class, |s| s < 0))
    }
}

pub fn is_balanced<F: Scalar>(inst: &NurseInstance<F>, assignment: &[usize]) -> bool {
    BalanceProfile::of(inst, assignment).map(|b| b.is_balanced()).unwrap_or(false)
}

/// Incrementally maintained schedule for move evaluation.
struct Schedule<'a, F> {
    inst: &'a NurseInstance<F>,
    genes: Vec<usize>,
    supply: Vec<i64>,
    scratch: Vec<i64>,
    pref: F,
    weight: F,
    keep_feasible: bool,
    value: F,
}

impl<'a, F: Scalar> Schedule<'a, F> {
    fn new(inst: &'a NurseInstance<F>, assignment: &[usize], weight: F) -> Self {
        let p = inst.grade_count();
        let mut supply = vec![0i64; PERIODS * p];
        let mut pref = F::zero();
        for (i, &j) in assignment.iter().enumerate() {
            pref += inst.pref_cost(i, j);
            Self::apply_cover(inst, &mut supply, i, j, 1);
        }
        let mut s = Self {
            inst,
            genes: assignment.to_vec(),
            scratch: supply.clone(),
            supply,
            pref,
            weight,
            keep_feasible: false,
            value: F::zero(),
        };
        let uncovered = s.uncovered(&s.supply);
        s.keep_feasible = uncovered == 0;
        s.value = pref + weight * F::of(uncovered as f64);
        s
    }

    fn apply_cover(inst: &NurseInstance<F>, supply: &mut [i64], nurse: usize, pattern: usize, delta: i64) {
        let p = inst.grade_count();
        let grade = inst.grade_of(nurse);
        for k in inst.patterns()[pattern].periods() {
            for cell in &mut supply[k * p + grade..(k + 1) * p] {
                *cell += delta;
            }
        }
    }

    fn uncovered(&self, supply: &[i64]) -> u64 {
        let p = self.inst.grade_count();
        let mut total = 0u64;
        for k in 0..PERIODS {
            for s in 0..p {
                total += (i64::from(self.inst.demand(k, s)) - supply[k * p + s]).max(0) as u64;
            }
        }
        total
    }

    /// Penalised value after reassigning `changes`, or `None` when the move
    /// would break feasibility of a feasible schedule.
    fn try_moves(&mut self, changes: &[(usize, usize)]) -> Option<F> {
        self.scratch.copy_from_slice(&self.supply);
        let mut pref = self.pref;
        for &(i, j) in changes {
            let old = self.genes[i];
            pref = pref - self.inst.pref_cost(i, old) + self.inst.pref_cost(i, j);
            Self::apply_cover(self.inst, &mut self.scratch, i, old, -1);
            Self::apply_cover(self.inst, &mut self.scratch, i, j, 1);
        }
        let uncovered = self.uncovered(&self.scratch);
        if self.keep_feasible && uncovered > 0 {
            return None;
        }
        Some(pref + self.weight * F::of(uncovered as f64))
    }

    fn improves(&self, candidate: F) -> bool {
        // margin keeps accumulated rounding from admitting cycles
        let margin = F::of(1e-9) * self.value.abs().max(F::one());
        candidate < self.value - margin
    }

    fn commit(&mut self, changes: &[(usize, usize)], value: F) {
        for &(i, j) in changes {
            let old = self.genes[i];
            self.pref = self.pref - self.inst.pref_cost(i, old) + self.inst.pref_cost(i, j);
            Self::apply_cover(self.inst, &mut self.supply, i, old, -1);
            Self::apply_cover(self.inst, &mut self.supply, i, j, 1);
            self.genes[i] = j;
        }
        self.value = value;
    }

    fn attempt(&mut self, changes: &[(usize, usize)]) -> bool {
        match self.try_moves(changes) {
            Some(v) if self.improves(v) => {
                self.commit(changes, v);
                true
            }
            _ => false,
        }
    }

    fn single_move(&mut self) -> bool {
        for i in 0..self.genes.len() {
            for idx in 0..self.inst.feasible_set(i).len() {
                let j = self.inst.feasible_set(i)[idx];
                if j != self.genes[i] && self.attempt(&[(i, j)]) {
                    return true;
                }
            }
        }
        false
    }

    fn pair_swap(&mut self) -> bool {
        let n = self.genes.len();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (self.genes[i], self.genes[j]);
                if a != b
                    && self.inst.is_pattern_feasible(i, b)
                    && self.inst.is_pattern_feasible(j, a)
                    && self.attempt(&[(i, b), (j, a)])
                {
                    return true;
                }
            }
        }
        false
    }

    /// `i` takes `j`'s pattern, `j` takes `k`'s, `k` takes `i`'s, with `i` the
    /// smallest index so each cycle direction is tried once.
    fn chain_swap(&mut self) -> bool {
        let n = self.genes.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in i + 1..n {
                    if k == j {
                        continue;
                    }
                    let (a, b, c) = (self.genes[i], self.genes[j], self.genes[k]);
                    if a == b || b == c || a == c {
                        continue;
                    }
                    if self.inst.is_pattern_feasible(i, b)
                        && self.inst.is_pattern_feasible(j, c)
                        && self.inst.is_pattern_feasible(k, a)
                        && self.attempt(&[(i, b), (j, c), (k, a)])
                    {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Applies improving moves until none is left. Never increases penalised
/// fitness under `weight` and never makes a feasible schedule infeasible.
/// Invalid assignments are returned unchanged.
pub fn improve<F: Scalar>(inst: &NurseInstance<F>, assignment: &[usize], weight: F) -> Vec<usize> {
    improve_with(inst, assignment, weight, 3)
}

/// [`improve`] with chain swaps up to `max_chain` nurses (2 disables chains, 1 disables swaps).
pub fn improve_with<F: Scalar>(inst: &NurseInstance<F>, assignment: &[usize], weight: F, max_chain: usize) -> Vec<usize> {
    if inst.evaluate(assignment).is_err() {
        return assignment.to_vec();
    }
    let mut schedule = Schedule::new(inst, assignment, weight);
    loop {
        if schedule.single_move() {
            continue;
        }
        if max_chain >= 2 && schedule.pair_swap() {
            continue;
        }
        if max_chain >= 3 && schedule.chain_swap() {
            continue;
        }
        break;
    }
    schedule.genes
}

/// [`LocalSearch`] adapter applying [`improve`] to balanced schedules.
#[derive(Debug, Clone, Copy)]
pub struct NurseHillClimber<'a, F> {
    inst: &'a NurseInstance<F>,
    max_chain: usize,
}

impl<'a, F: Scalar> NurseHillClimber<'a, F> {
    pub fn new(inst: &'a NurseInstance<F>) -> Self {
        Self { inst, max_chain: 3 }
    }

    pub fn with_max_chain(mut self, max_chain: usize) -> Self {
        self.max_chain = max_chain;
        self
    }
}

impl<F: Scalar> LocalSearch<F> for NurseHillClimber<'_, F> {
    fn applies(&self, assignment: &[usize]) -> bool {
        is_balanced(self.inst, assignment)
    }

    fn improve(&self, assignment: &[usize], weight: F) -> Vec<usize> {
        improve_with(self.inst, assignment, weight, self.max_chain)
    }
}

#[cfg(test)]
mod tests;
