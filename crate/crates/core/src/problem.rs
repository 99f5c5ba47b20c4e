//! The interface the engine needs from a problem model.

use crate::error::Result;
use crate::pyramid::LevelFitness;
use crate::scalar::Scalar;

/// Raw objective (lower is better) and total constraint violation of a solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<F> {
    pub objective: F,
    pub violation: F,
}

impl<F: Scalar> Evaluation<F> {
    pub fn new(objective: F, violation: F) -> Self {
        Self { objective, violation }
    }

    pub fn feasible(&self) -> bool {
        self.violation == F::zero()
    }

    pub fn penalised(&self, weight: F) -> F {
        self.objective + weight * self.violation
    }
}

/// A multiple-choice assignment problem: every slot takes one value from its domain.
///
/// Assignments passed to [`Problem::evaluate_full`] are indexed by slot id.
/// Objectives are minimised; maximisation problems negate on ingestion.
pub trait Problem<F: Scalar>: Sync {
    fn slot_count(&self) -> usize;

    /// Feasible gene values for a slot. Never empty for a valid instance.
    fn domain(&self, slot: usize) -> &[usize];

    fn evaluate_full(&self, assignment: &[usize]) -> Result<Evaluation<F>>;

    /// Substitute fitness of a partial string. `slots[i]` is the slot carried by `genes[i]`.
    fn evaluate_partial(
        &self,
        fitness: &LevelFitness,
        slots: &[usize],
        genes: &[usize],
    ) -> Result<Evaluation<F>>;

    /// Typical magnitude of a unit of objective; seeds the initial penalty weight.
    fn penalty_scale(&self) -> F;

    /// Converts an internal objective into the reported orientation (cost or rent).
    fn reported(&self, objective: F) -> F {
        objective
    }
}

/// Optional local search hook run on the top sub-population.
pub trait LocalSearch<F: Scalar>: Sync {
    /// Whether an assignment is worth handing to [`LocalSearch::improve`].
    fn applies(&self, assignment: &[usize]) -> bool;

    fn improve(&self, assignment: &[usize], weight: F) -> Vec<usize>;
}
