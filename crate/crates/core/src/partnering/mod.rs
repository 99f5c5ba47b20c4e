//! Evaluation partnering: how a partial genome is completed with agents from
//! complementary sub-populations so it can be scored as a full solution.
//!
//! | kind | composites |
//! |------|------------|
//! | `S`  | none: the level's own sub-fitness |
//! | `R`  | one, uniform random partners |
//! | `B`  | one, the best agent of each complement |
//! | `D`  | one, co-located partners on the toroidal grid |
//! | `SR` | rank-roulette partners and random partners, better kept |
//! | `BR` | best partners and random partners, better kept |
//! | `RR` | two independent sets of random partners, better kept |
//!
//! Partner rankings come from the previous generation's cached fitness.

mod grid;

pub use grid::{grid_insert_child, pick_partner_d, pick_partner_d_widening, Cell, ToroidalGrid};

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::engine::{RankWheel, SubPopulation};
use crate::error::{Error, Result};
use crate::problem::{Evaluation, Problem};
use crate::pyramid::{LevelFitness, LevelId, Topology};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    S,
    R,
    B,
    D,
    SR,
    BR,
    RR,
}

/// How one composite chooses its partners.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartnerPick {
    Rank,
    Random,
    Best,
    Distributed,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 7] =
        [StrategyKind::S, StrategyKind::R, StrategyKind::B, StrategyKind::D, StrategyKind::SR, StrategyKind::BR, StrategyKind::RR];

    /// Composite evaluations performed per agent; empty for the sub-fitness strategy.
    pub fn composites(self) -> &'static [PartnerPick] {
        use PartnerPick::*;
        match self {
            StrategyKind::S => &[],
            StrategyKind::R => &[Random],
            StrategyKind::B => &[Best],
            StrategyKind::D => &[Distributed],
            StrategyKind::SR => &[Rank, Random],
            StrategyKind::BR => &[Best, Random],
            StrategyKind::RR => &[Random, Random],
        }
    }

    pub fn is_double(self) -> bool {
        self.composites().len() == 2
    }

    pub fn needs_grid(self) -> bool {
        self == StrategyKind::D
    }

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::S => "S",
            StrategyKind::R => "R",
            StrategyKind::B => "B",
            StrategyKind::D => "D",
            StrategyKind::SR => "SR",
            StrategyKind::BR => "BR",
            StrategyKind::RR => "RR",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown strategy `{s}`")))
    }
}

/// Frozen view of every sub-population used as the partner pool for one generation.
pub struct PartnerPools<'a, F> {
    pops: &'a [SubPopulation<F>],
    fitness: Vec<Vec<F>>,
    wheels: Vec<RankWheel>,
    best: Vec<Option<usize>>,
    grid: Option<&'a ToroidalGrid>,
}

impl<'a, F: Scalar> PartnerPools<'a, F> {
    pub fn new(pops: &'a [SubPopulation<F>], grid: Option<&'a ToroidalGrid>) -> Self {
        let fitness: Vec<Vec<F>> = pops.iter().map(SubPopulation::fitnesses).collect();
        let wheels: Vec<RankWheel> = fitness.iter().map(|f| RankWheel::new(f)).collect();
        let best = wheels.iter().map(RankWheel::best).collect();
        Self { pops, fitness, wheels, best, grid }
    }

    pub fn population(&self, level: LevelId) -> &SubPopulation<F> {
        &self.pops[level]
    }

    pub fn fitness(&self, level: LevelId) -> &[F] {
        &self.fitness[level]
    }

    pub fn wheel(&self, level: LevelId) -> &RankWheel {
        &self.wheels[level]
    }

    pub fn grid(&self) -> Option<&ToroidalGrid> {
        self.grid
    }

    fn pick<R: Rng + ?Sized>(&self, how: PartnerPick, level: LevelId, cell: Option<Cell>, rng: &mut R) -> Result<usize> {
        let size = self.pops[level].agents.len();
        match how {
            PartnerPick::Rank => pick_partner_s(&self.wheels[level], rng),
            PartnerPick::Random => pick_partner_r(size, rng),
            PartnerPick::Best => self.best[level].ok_or(Error::EmptyPartnerPool),
            PartnerPick::Distributed => {
                let grid = self.grid.ok_or(Error::MissingGrid)?;
                let cell = cell.ok_or(Error::MissingGrid)?;
                pick_partner_d_widening(cell, level, grid, rng)
            }
        }
    }
}

/// Rank-roulette partner.
pub fn pick_partner_s<R: Rng + ?Sized>(wheel: &RankWheel, rng: &mut R) -> Result<usize> {
    if wheel.is_empty() {
        return Err(Error::EmptyPartnerPool);
    }
    wheel.sample(rng)
}

/// Uniform random partner from a pool of `size` agents.
pub fn pick_partner_r<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Result<usize> {
    if size == 0 {
        return Err(Error::EmptyPartnerPool);
    }
    Ok(rng.gen_range(0..size))
}

/// Best agent across several pools; ties go to the lower level id, then the lower agent index.
pub fn pick_partner_b<F: Scalar>(pools: &[(LevelId, &[F])]) -> Result<(LevelId, usize)> {
    let mut sorted: Vec<&(LevelId, &[F])> = pools.iter().collect();
    sorted.sort_by_key(|(level, _)| *level);
    let mut best: Option<(F, LevelId, usize)> = None;
    for &&(level, fitness) in &sorted {
        for (i, &f) in fitness.iter().enumerate() {
            if best.is_none_or(|(b, _, _)| f < b) {
                best = Some((f, level, i));
            }
        }
    }
    best.map(|(_, level, i)| (level, i)).ok_or(Error::EmptyPartnerPool)
}

/// Every composite evaluation an agent receives under `strategy`, in composite order.
///
/// Agents whose level covers every slot, and all agents under `S`, get a
/// single evaluation of their own genes (sub-fitness for `S`, full otherwise).
#[allow(clippy::too_many_arguments)]
pub fn composite_evaluations<F, P, R>(
    genes: &[usize],
    level: LevelId,
    cell: Option<Cell>,
    strategy: StrategyKind,
    topology: &Topology,
    pools: &PartnerPools<'_, F>,
    problem: &P,
    rng: &mut R,
) -> Result<Vec<Evaluation<F>>>
where
    F: Scalar,
    P: Problem<F> + ?Sized,
    R: Rng + ?Sized,
{
    let spec = topology.level(level)?;
    let complements = &spec.evaluation_complements;
    if strategy == StrategyKind::S {
        return Ok(vec![problem.evaluate_partial(&spec.fitness, &spec.slots, genes)?]);
    }
    if complements.is_empty() {
        let fitness = if spec.slots.len() == topology.slot_count() { LevelFitness::Full } else { spec.fitness };
        return Ok(vec![problem.evaluate_partial(&fitness, &spec.slots, genes)?]);
    }
    if strategy.needs_grid() && pools.grid().is_none() {
        return Err(Error::MissingGrid);
    }
    let mut assignment = vec![0usize; topology.slot_count()];
    let mut out = Vec::with_capacity(2);
    for &how in strategy.composites() {
        topology.write_into(level, genes, &mut assignment);
        for &other in complements {
            let partner = pools.pick(how, other, cell, rng)?;
            topology.write_into(other, &pools.population(other).agents[partner].genes, &mut assignment);
        }
        out.push(problem.evaluate_full(&assignment)?);
    }
    Ok(out)
}

/// Fitness evaluation under a partnering strategy; double strategies keep the
/// composite with the lower penalised fitness under `weight`.
#[allow(clippy::too_many_arguments)]
pub fn evaluate<F, P, R>(
    genes: &[usize],
    level: LevelId,
    cell: Option<Cell>,
    strategy: StrategyKind,
    topology: &Topology,
    pools: &PartnerPools<'_, F>,
    problem: &P,
    weight: F,
    rng: &mut R,
) -> Result<Evaluation<F>>
where
    F: Scalar,
    P: Problem<F> + ?Sized,
    R: Rng + ?Sized,
{
    let evals = composite_evaluations(genes, level, cell, strategy, topology, pools, problem, rng)?;
    let mut best = evals[0];
    for e in &evals[1..] {
        if e.penalised(weight) < best.penalised(weight) {
            best = *e;
        }
    }
    Ok(best)
}
