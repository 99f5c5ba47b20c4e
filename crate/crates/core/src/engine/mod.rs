//! Generational loop over every sub-population of a topology.
//!
//! Each generation every level breeds `ceil(replacement_fraction * capacity)`
//! children. Levels without crossover sources use uniform crossover only;
//! the others draw a cross-level parent with probability
//! `cross_level_fraction` and graft it into one of their own by fixed-point
//! crossover. Children are mutated, evaluated against the previous
//! generation's pools, and replace the worst parents. Each level then adapts
//! its own penalty weight.

mod genome;
mod operators;

pub use genome::{Genome, Origin, SubPopulation};
pub use operators::{
    check_stop, mutate, mutate_in_place, rank_order, rank_roulette_select, replace_generation, replaced_count,
    uniform_crossover, RankWheel,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::partnering::{self, grid_insert_child, PartnerPools, StrategyKind, ToroidalGrid};
use crate::penalty::{PenaltyConfig, PenaltyState};
use crate::problem::{Evaluation, LocalSearch, Problem};
use crate::pyramid::{fixed_point_crossover, LevelId, Topology};
use crate::scalar::Scalar;

/// Side of the shared toroidal grid used by distributed partnering.
pub const GRID_SIDE: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    /// Probability that a child's gene comes from the first parent.
    pub uniform_inherit_prob: f64,
    pub mutation_rate: f64,
    pub replacement_fraction: f64,
    pub stagnation_window: usize,
    pub cross_level_fraction: f64,
    pub max_generations: usize,
    pub rng_seed: u64,
    /// Let replaced parents compete with children for the freed slots.
    pub elitist_pool: bool,
    /// Share of the top level handed to local search each generation.
    pub local_search_fraction: f64,
    pub penalty: PenaltyConfig,
    /// Check population sizes and gene domains after every generation.
    pub audit: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            uniform_inherit_prob: 0.66,
            mutation_rate: 0.01,
            replacement_fraction: 0.9,
            stagnation_window: 50,
            cross_level_fraction: 0.5,
            max_generations: 2000,
            rng_seed: 0,
            elitist_pool: false,
            local_search_fraction: 0.05,
            penalty: PenaltyConfig::default(),
            audit: cfg!(debug_assertions),
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if !(self.uniform_inherit_prob > 0.0 && self.uniform_inherit_prob <= 1.0) {
            return bad("uniform_inherit_prob must lie in (0, 1]");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad("mutation_rate must lie in [0, 1]");
        }
        if !(self.replacement_fraction > 0.0 && self.replacement_fraction <= 1.0) {
            return bad("replacement_fraction must lie in (0, 1]");
        }
        if !(0.0..=1.0).contains(&self.cross_level_fraction) {
            return bad("cross_level_fraction must lie in [0, 1]");
        }
        if self.stagnation_window == 0 || self.max_generations == 0 {
            return bad("stagnation_window and max_generations must be positive");
        }
        if !(0.0..=1.0).contains(&self.local_search_fraction) {
            return bad("local_search_fraction must lie in [0, 1]");
        }
        if !(self.penalty.beta > 1.0) || !(self.penalty.w0_scale > 0.0) {
            return bad("penalty beta must exceed 1 and the w0 scale must be positive");
        }
        Ok(())
    }
}

/// Outcome of a finished run. Objectives are in internal (minimisation) orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary<F> {
    pub generations: usize,
    pub best_feasible: Option<F>,
    pub best_assignment: Option<Vec<usize>>,
    pub best_history: Vec<F>,
    pub evaluations: u64,
}

impl<F: Scalar> RunSummary<F> {
    pub fn feasible(&self) -> bool {
        self.best_feasible.is_some()
    }
}

pub struct Engine<'p, F: Scalar, P: Problem<F> + ?Sized> {
    problem: &'p P,
    topology: Topology,
    strategy: StrategyKind,
    config: EngineConfig,
    local_search: Option<&'p dyn LocalSearch<F>>,
    pops: Vec<SubPopulation<F>>,
    grid: Option<ToroidalGrid>,
    domains: Vec<Vec<Vec<usize>>>,
    rng: ChaCha8Rng,
    generation: usize,
    best_history: Vec<F>,
    best_feasible: Option<(F, Vec<usize>)>,
    cross_level_children: Vec<usize>,
    evaluations: u64,
}

impl<'p, F: Scalar, P: Problem<F> + ?Sized> Engine<'p, F, P> {
    /// Builds random initial sub-populations and evaluates them.
    pub fn new(problem: &'p P, topology: Topology, strategy: StrategyKind, config: EngineConfig) -> Result<Self> {
        Self::build(problem, topology, strategy, config, None)
    }

    pub fn with_local_search(
        problem: &'p P,
        topology: Topology,
        strategy: StrategyKind,
        config: EngineConfig,
        local_search: &'p dyn LocalSearch<F>,
    ) -> Result<Self> {
        Self::build(problem, topology, strategy, config, Some(local_search))
    }

    fn build(
        problem: &'p P,
        topology: Topology,
        strategy: StrategyKind,
        config: EngineConfig,
        local_search: Option<&'p dyn LocalSearch<F>>,
    ) -> Result<Self> {
        config.validate()?;
        if topology.slot_count() != problem.slot_count() {
            return Err(Error::InvalidTopology(format!(
                "topology has {} slots, problem has {}",
                topology.slot_count(),
                problem.slot_count()
            )));
        }
        let domains: Vec<Vec<Vec<usize>>> = topology
            .levels()
            .iter()
            .map(|l| l.slots.iter().map(|&s| problem.domain(s).to_vec()).collect())
            .collect();
        for (slot, d) in (0..problem.slot_count()).map(|s| (s, problem.domain(s))) {
            if d.is_empty() {
                return Err(Error::InfeasibleSlotDomain(slot));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let grid = strategy.needs_grid().then(|| ToroidalGrid::new(GRID_SIDE, GRID_SIDE, topology.levels().len()));
        let mut pops = Vec::with_capacity(topology.levels().len());
        for level in topology.levels() {
            let penalty = PenaltyState::for_scale(problem.penalty_scale(), &config.penalty)?;
            let agents = (0..level.capacity)
                .map(|i| {
                    let genes = domains[level.id].iter().map(|d| d[rng.gen_range(0..d.len())]).collect();
                    let mut g = Genome::new(level.id, genes);
                    g.cell = grid.as_ref().map(|grid| grid.initial_cell(i, level.capacity));
                    g
                })
                .collect();
            pops.push(SubPopulation { level: level.id, agents, capacity: level.capacity, penalty });
        }
        let levels = topology.levels().len();
        let mut engine = Self {
            problem,
            topology,
            strategy,
            config,
            local_search,
            pops,
            grid,
            domains,
            rng,
            generation: 0,
            best_history: Vec::new(),
            best_feasible: None,
            cross_level_children: vec![0; levels],
            evaluations: 0,
        };
        engine.evaluate_initial()?;
        engine.record_top();
        engine.audit()?;
        Ok(engine)
    }

    /// Scores the initial agents on their own sub-fitness, then, for
    /// partnering strategies, re-scores them against that provisional ranking.
    fn evaluate_initial(&mut self) -> Result<()> {
        for pop in &mut self.pops {
            let spec = self.topology.level(pop.level)?;
            for agent in &mut pop.agents {
                agent.eval = Some(self.problem.evaluate_partial(&spec.fitness, &spec.slots, &agent.genes)?);
                self.evaluations += 1;
            }
        }
        if self.strategy == StrategyKind::S {
            return Ok(());
        }
        self.rebuild_grid();
        let pools = PartnerPools::new(&self.pops, self.grid.as_ref());
        let mut fresh: Vec<Vec<Evaluation<F>>> = Vec::with_capacity(self.pops.len());
        for pop in &self.pops {
            let w = pop.weight();
            let mut evals = Vec::with_capacity(pop.agents.len());
            for agent in &pop.agents {
                evals.push(partnering::evaluate(
                    &agent.genes,
                    pop.level,
                    agent.cell,
                    self.strategy,
                    &self.topology,
                    &pools,
                    self.problem,
                    w,
                    &mut self.rng,
                )?);
                self.evaluations += self.strategy.composites().len().max(1) as u64;
            }
            fresh.push(evals);
        }
        for (pop, evals) in self.pops.iter_mut().zip(fresh) {
            for (agent, eval) in pop.agents.iter_mut().zip(evals) {
                agent.eval = Some(eval);
            }
        }
        Ok(())
    }

    fn rebuild_grid(&mut self) {
        if let Some(grid) = self.grid.as_mut() {
            for pop in &self.pops {
                grid.clear_level(pop.level);
                for (i, agent) in pop.agents.iter().enumerate() {
                    if let Some(cell) = agent.cell {
                        grid.place(pop.level, i, cell);
                    }
                }
            }
        }
    }

    /// Runs one generation.
    pub fn step(&mut self) -> Result<()> {
        self.rebuild_grid();
        let Self { problem, topology, strategy, config, pops, grid, domains, rng, cross_level_children, evaluations, .. } =
            self;
        let pools = PartnerPools::new(pops, grid.as_ref());

        let mut offspring: Vec<Vec<Genome<F>>> = Vec::with_capacity(pops.len());
        for pop in pops.iter() {
            let level = pop.level;
            let spec = topology.level(level)?;
            let needed = replaced_count(pop.capacity, config.replacement_fraction);
            let own = pools.wheel(level);
            let mut children = Vec::with_capacity(needed + 1);
            while children.len() < needed {
                let cross = !spec.crossover_sources.is_empty() && rng.gen::<f64>() < config.cross_level_fraction;
                if cross {
                    let host = &pop.agents[own.sample(rng)?];
                    let source = spec.crossover_sources[rng.gen_range(0..spec.crossover_sources.len())];
                    let donor = &pools.population(source).agents[pools.wheel(source).sample(rng)?];
                    let mut child = fixed_point_crossover(donor, host, topology)?;
                    child.origin = Origin::CrossLevel;
                    child.cell = host.cell.zip(grid.as_ref()).map(|(c, g)| grid_insert_child(c, g, rng));
                    cross_level_children[level] += 1;
                    children.push(child);
                } else {
                    let a = &pop.agents[own.sample(rng)?];
                    let b = &pop.agents[own.sample(rng)?];
                    let (mut c1, mut c2) = uniform_crossover(a, b, config.uniform_inherit_prob, rng)?;
                    for (child, parent) in [(&mut c1, a), (&mut c2, b)] {
                        child.origin = Origin::Uniform;
                        child.cell = parent.cell.zip(grid.as_ref()).map(|(c, g)| grid_insert_child(c, g, rng));
                    }
                    children.push(c1);
                    if children.len() < needed {
                        children.push(c2);
                    }
                }
            }
            for child in &mut children {
                mutate_in_place(child, config.mutation_rate, &domains[level], rng)?;
            }
            offspring.push(children);
        }

        let per_eval = strategy.composites().len().max(1) as u64;
        for (pop, children) in pops.iter().zip(offspring.iter_mut()) {
            let w = pop.weight();
            for child in children.iter_mut() {
                let eval = partnering::evaluate(
                    &child.genes,
                    pop.level,
                    child.cell,
                    *strategy,
                    topology,
                    &pools,
                    *problem,
                    w,
                    rng,
                )?;
                child.eval = Some(eval);
                *evaluations += per_eval;
            }
        }
        drop(pools);

        let next: Vec<SubPopulation<F>> = pops
            .iter()
            .zip(offspring)
            .map(|(pop, children)| replace_generation(pop, children, config.replacement_fraction, config.elitist_pool))
            .collect::<Result<_>>()?;
        *pops = next;

        self.apply_local_search()?;
        self.generation += 1;
        self.record_top();
        for pop in &mut self.pops {
            let (best, best_feasible) = pop.best_and_best_feasible();
            pop.penalty.update(best, best_feasible);
        }
        self.audit()
    }

    /// Hands the best unpolished top-level agents to local search.
    fn apply_local_search(&mut self) -> Result<()> {
        let Some(search) = self.local_search else { return Ok(()) };
        let top = self.topology.top();
        let pop = &mut self.pops[top];
        let w = pop.weight();
        let order = rank_order(&pop.fitnesses());
        let count = ((pop.capacity as f64 * self.config.local_search_fraction).ceil() as usize).min(order.len());
        for &i in &order[..count] {
            let agent = &mut pop.agents[i];
            if agent.polished {
                continue;
            }
            let assignment = self.topology.to_assignment(top, &agent.genes);
            if search.applies(&assignment) {
                let improved = search.improve(&assignment, w);
                if improved != assignment {
                    agent.genes = self.topology.project(top, &improved);
                    agent.eval = Some(self.problem.evaluate_full(&improved)?);
                    agent.origin = Origin::LocalSearch;
                    self.evaluations += 1;
                }
            }
            agent.polished = true;
        }
        Ok(())
    }

    fn record_top(&mut self) {
        let top = &self.pops[self.topology.top()];
        let (best, _) = top.best_and_best_feasible();
        self.best_history.push(best);
        let best_feasible = top
            .agents
            .iter()
            .filter_map(|a| a.eval.filter(|e| e.feasible()).map(|e| (e.objective, a)))
            .fold(None::<(F, &Genome<F>)>, |acc, (obj, a)| match acc {
                Some((b, _)) if b <= obj => acc,
                _ => Some((obj, a)),
            });
        if let Some((objective, agent)) = best_feasible {
            if self.best_feasible.as_ref().is_none_or(|(b, _)| objective < *b) {
                let assignment = self.topology.to_assignment(self.topology.top(), &agent.genes);
                self.best_feasible = Some((objective, assignment));
            }
        }
    }

    fn audit(&self) -> Result<()> {
        if !self.config.audit {
            return Ok(());
        }
        for pop in &self.pops {
            if pop.agents.len() != pop.capacity {
                return Err(Error::InvalidTopology(format!(
                    "level {} holds {} agents, capacity {}",
                    pop.level,
                    pop.agents.len(),
                    pop.capacity
                )));
            }
            for agent in &pop.agents {
                let domains = &self.domains[pop.level];
                if agent.level != pop.level || agent.genes.len() != domains.len() {
                    return Err(Error::IncompatibleGenomes(format!("agent misplaced in level {}", pop.level)));
                }
                if let Some(i) = agent.genes.iter().zip(domains).position(|(g, d)| !d.contains(g)) {
                    return Err(Error::InfeasibleSlotDomain(self.topology.levels()[pop.level].slots[i]));
                }
                if agent.eval.is_none() {
                    return Err(Error::InvalidTopology("unevaluated agent after a generation".into()));
                }
            }
        }
        Ok(())
    }

    pub fn should_stop(&self) -> bool {
        check_stop(&self.best_history, self.config.stagnation_window, self.config.max_generations, self.generation)
    }

    /// Steps until the top level stagnates or the generation cap is hit.
    pub fn run(mut self) -> Result<RunSummary<F>> {
        while !self.should_stop() {
            self.step()?;
        }
        Ok(self.summary())
    }

    pub fn summary(&self) -> RunSummary<F> {
        RunSummary {
            generations: self.generation,
            best_feasible: self.best_feasible.as_ref().map(|(f, _)| *f),
            best_assignment: self.best_feasible.as_ref().map(|(_, a)| a.clone()),
            best_history: self.best_history.clone(),
            evaluations: self.evaluations,
        }
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn populations(&self) -> &[SubPopulation<F>] {
        &self.pops
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn best_history(&self) -> &[F] {
        &self.best_history
    }

    /// Lowest internal objective among feasible top-level agents seen so far.
    pub fn best_feasible(&self) -> Option<(F, &[usize])> {
        self.best_feasible.as_ref().map(|(f, a)| (*f, a.as_slice()))
    }

    /// Number of cross-level children bred by each level so far.
    pub fn cross_level_children(&self, level: LevelId) -> usize {
        self.cross_level_children[level]
    }

    pub fn grid(&self) -> Option<&ToroidalGrid> {
        self.grid.as_ref()
    }
}
