//! Selection, variation and replacement operators.

use std::cmp::Ordering;

use rand::Rng;

use super::genome::{Genome, SubPopulation};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Agent indices sorted best first; fitness ties go to the lower index.
pub fn rank_order<F: Scalar>(fitness: &[F]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| fitness[a].partial_cmp(&fitness[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    order
}

/// Roulette wheel over ranks: rank `r` (1 = best) of `n` has weight `n - r + 1`.
///
/// Agents with equal fitness share their ranks' weights evenly, so a
/// population of equals is selected uniformly.
#[derive(Debug, Clone, PartialEq)]
pub struct RankWheel {
    order: Vec<usize>,
    /// `[start, end)` of the tie group at each rank position.
    ties: Vec<(usize, usize)>,
}

impl RankWheel {
    pub fn new<F: Scalar>(fitness: &[F]) -> Self {
        let order = rank_order(fitness);
        let mut ties = vec![(0, 0); order.len()];
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len() && fitness[order[end]] == fitness[order[start]] {
                end += 1;
            }
            ties[start..end].fill((start, end));
            start = end;
        }
        Self { order, ties }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Index of the best agent.
    pub fn best(&self) -> Option<usize> {
        self.order.first().copied()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        let n = self.order.len() as u64;
        if n == 0 {
            return Err(Error::EmptyPopulation);
        }
        let u = rng.gen_range(0..n * (n + 1) / 2);
        // cumulative weight of ranks 0..=r is (r + 1) * n - r * (r + 1) / 2
        let cum = |r: u64| (r + 1) * n - r * (r + 1) / 2;
        let (mut lo, mut hi) = (0u64, n - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if cum(mid) > u {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let (start, end) = self.ties[lo as usize];
        let pos = if end - start > 1 { rng.gen_range(start..end) } else { lo as usize };
        Ok(self.order[pos])
    }
}

/// Rank-based roulette selection within a sub-population.
pub fn rank_roulette_select<F: Scalar, R: Rng + ?Sized>(subpop: &SubPopulation<F>, rng: &mut R) -> Result<usize> {
    RankWheel::new(&subpop.fitnesses()).sample(rng)
}

/// Parameterised uniform crossover: the first child takes each gene from `a`
/// with probability `p`, the second child takes the other parent's gene.
pub fn uniform_crossover<F: Scalar, R: Rng + ?Sized>(
    a: &Genome<F>,
    b: &Genome<F>,
    p: f64,
    rng: &mut R,
) -> Result<(Genome<F>, Genome<F>)> {
    if a.level != b.level || a.genes.len() != b.genes.len() {
        return Err(Error::IncompatibleGenomes(format!(
            "level {} length {} vs level {} length {}",
            a.level,
            a.genes.len(),
            b.level,
            b.genes.len()
        )));
    }
    let mut first = Vec::with_capacity(a.genes.len());
    let mut second = Vec::with_capacity(a.genes.len());
    for (&x, &y) in a.genes.iter().zip(&b.genes) {
        if rng.gen::<f64>() < p {
            first.push(x);
            second.push(y);
        } else {
            first.push(y);
            second.push(x);
        }
    }
    Ok((Genome::new(a.level, first), Genome::new(a.level, second)))
}

/// Re-draws each gene with probability `rate` uniformly from its slot's domain.
/// Returns the number of genes whose value changed.
pub fn mutate_in_place<F: Scalar, R: Rng + ?Sized>(
    genome: &mut Genome<F>,
    rate: f64,
    domains: &[Vec<usize>],
    rng: &mut R,
) -> Result<usize> {
    if domains.len() < genome.genes.len() {
        return Err(Error::SlotMismatch("mutation domains do not cover the genome".into()));
    }
    if let Some(slot) = domains.iter().position(Vec::is_empty) {
        return Err(Error::InfeasibleSlotDomain(slot));
    }
    if rate <= 0.0 {
        return Ok(0);
    }
    let mut changed = 0;
    for (gene, domain) in genome.genes.iter_mut().zip(domains) {
        if rng.gen::<f64>() < rate {
            let value = domain[rng.gen_range(0..domain.len())];
            if value != *gene {
                *gene = value;
                changed += 1;
            }
        }
    }
    if changed > 0 {
        genome.clear_cache();
    }
    Ok(changed)
}

pub fn mutate<F: Scalar, R: Rng + ?Sized>(
    genome: &Genome<F>,
    rate: f64,
    domains: &[Vec<usize>],
    rng: &mut R,
) -> Result<Genome<F>> {
    let mut out = genome.clone();
    mutate_in_place(&mut out, rate, domains, rng)?;
    Ok(out)
}

/// Number of parents replaced per generation, `ceil(fraction * capacity)`.
pub fn replaced_count(capacity: usize, fraction: f64) -> usize {
    // tolerance absorbs products such as 0.9 * 100 = 90.00000000000001
    let raw = fraction * capacity as f64;
    ((raw - 1e-9).ceil().max(0.0) as usize).min(capacity)
}

/// Keeps the best `capacity - replaced_count` parents and fills the rest with
/// the best children. With `elitist_pool`, the non-surviving parents compete
/// with the children for the replaced slots.
pub fn replace_generation<F: Scalar>(
    subpop: &SubPopulation<F>,
    children: Vec<Genome<F>>,
    fraction: f64,
    elitist_pool: bool,
) -> Result<SubPopulation<F>> {
    let capacity = subpop.capacity;
    let replaced = replaced_count(capacity, fraction);
    if children.len() < replaced {
        return Err(Error::UnderfilledGeneration { needed: replaced, got: children.len() });
    }
    let w = subpop.weight();
    let score = |g: &Genome<F>| g.fitness(w).unwrap_or_else(F::infinity);
    let parent_order = rank_order(&subpop.agents.iter().map(score).collect::<Vec<_>>());
    let keep = capacity - replaced;
    let mut agents: Vec<Genome<F>> = parent_order[..keep.min(parent_order.len())]
        .iter()
        .map(|&i| subpop.agents[i].clone())
        .collect();

    let mut pool = children;
    if elitist_pool {
        pool.extend(parent_order[keep.min(parent_order.len())..].iter().map(|&i| subpop.agents[i].clone()));
    }
    let pool_order = rank_order(&pool.iter().map(score).collect::<Vec<_>>());
    let mut taken: Vec<Option<Genome<F>>> = pool.into_iter().map(Some).collect();
    for &i in pool_order.iter().take(capacity - agents.len()) {
        agents.push(taken[i].take().expect("each pool index taken once"));
    }
    Ok(SubPopulation { level: subpop.level, agents, capacity, penalty: subpop.penalty.clone() })
}

/// Stop when the last `window` entries fail to improve on everything before
/// them, or when `current_gen` reaches `max_generations`.
pub fn check_stop<F: Scalar>(best_history: &[F], window: usize, max_generations: usize, current_gen: usize) -> bool {
    if current_gen >= max_generations {
        return true;
    }
    if best_history.len() < window + 1 {
        return false;
    }
    let split = best_history.len() - window;
    let min = |xs: &[F]| xs.iter().copied().fold(F::infinity(), F::min);
    min(&best_history[split..]) >= min(&best_history[..split])
}
