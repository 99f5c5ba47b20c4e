use crate::partnering::Cell;
use crate::penalty::PenaltyState;
use crate::problem::Evaluation;
use crate::pyramid::LevelId;
use crate::scalar::Scalar;

/// How an agent entered its sub-population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    Initial,
    Uniform,
    CrossLevel,
    LocalSearch,
}

/// Partial or full solution string of one level: `genes[i]` is the value of
/// the level's `i`-th slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Genome<F> {
    pub level: LevelId,
    pub genes: Vec<usize>,
    /// Raw objective and violation from the last evaluation.
    pub eval: Option<Evaluation<F>>,
    /// Grid placement, used by distributed partnering.
    pub cell: Option<Cell>,
    pub origin: Origin,
    /// Set once local search has left this genome unchanged or improved it.
    pub polished: bool,
}

impl<F: Scalar> Genome<F> {
    pub fn new(level: LevelId, genes: Vec<usize>) -> Self {
        Self { level, genes, eval: None, cell: None, origin: Origin::Initial, polished: false }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// Penalised fitness under `weight`, if evaluated.
    pub fn fitness(&self, weight: F) -> Option<F> {
        self.eval.map(|e| e.penalised(weight))
    }

    pub fn feasible(&self) -> Option<bool> {
        self.eval.map(|e| e.feasible())
    }

    pub fn clear_cache(&mut self) {
        self.eval = None;
        self.polished = false;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubPopulation<F> {
    pub level: LevelId,
    pub agents: Vec<Genome<F>>,
    pub capacity: usize,
    pub penalty: PenaltyState<F>,
}

impl<F: Scalar> SubPopulation<F> {
    pub fn weight(&self) -> F {
        self.penalty.weight()
    }

    /// Penalised fitness of every agent under the current weight; unevaluated agents rank last.
    pub fn fitnesses(&self) -> Vec<F> {
        let w = self.weight();
        self.agents.iter().map(|a| a.fitness(w).unwrap_or_else(F::infinity)).collect()
    }

    /// Lowest penalised fitness and lowest penalised fitness among feasible agents.
    pub fn best_and_best_feasible(&self) -> (F, Option<F>) {
        let w = self.weight();
        let mut best = F::infinity();
        let mut best_feasible: Option<F> = None;
        for eval in self.agents.iter().filter_map(|a| a.eval) {
            let f = eval.penalised(w);
            best = best.min(f);
            if eval.feasible() {
                best_feasible = Some(best_feasible.map_or(f, |b| b.min(f)));
            }
        }
        (best, best_feasible)
    }
}
