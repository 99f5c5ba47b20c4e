//! Dynamic constraint penalty weight, one per sub-population.
//!
//! The weight grows while the best agent is infeasible (or no feasible agent
//! exists) and shrinks while the best agent is feasible, always clamped to
//! `[w_min, w_max]`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tunables used to derive a [`PenaltyState`] from a problem's objective scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    pub beta: f64,
    /// Initial weight as a multiple of the problem's objective scale.
    pub w0_scale: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self { beta: 1.1, w0_scale: 1.0, min_ratio: 1e-3, max_ratio: 1e6 }
    }
}

const HISTORY: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyState<F> {
    w: F,
    w_min: F,
    w_max: F,
    beta: F,
    /// Recent `best_feasible - best` gaps, `None` while nothing was feasible.
    history: VecDeque<Option<F>>,
}

impl<F: Scalar> PenaltyState<F> {
    pub fn new(w: F, w_min: F, w_max: F, beta: F) -> Result<Self> {
        if !(w_min > F::zero() && w_min <= w_max && w >= w_min && w <= w_max) {
            return Err(Error::Config(format!("penalty weight {w} outside [{w_min}, {w_max}]")));
        }
        if !(beta > F::one()) {
            return Err(Error::Config(format!("penalty step {beta} must exceed 1")));
        }
        Ok(Self { w, w_min, w_max, beta, history: VecDeque::with_capacity(HISTORY) })
    }

    /// `w0 = w0_scale * scale`, bounds at `min_ratio * w0` and `max_ratio * w0`.
    pub fn for_scale(scale: F, config: &PenaltyConfig) -> Result<Self> {
        let scale = if scale > F::zero() { scale } else { F::one() };
        let w0 = scale * F::of(config.w0_scale);
        Self::new(w0, w0 * F::of(config.min_ratio), w0 * F::of(config.max_ratio), F::of(config.beta))
    }

    pub fn weight(&self) -> F {
        self.w
    }

    pub fn bounds(&self) -> (F, F) {
        (self.w_min, self.w_max)
    }

    pub fn beta(&self) -> F {
        self.beta
    }

    pub fn history(&self) -> impl Iterator<Item = Option<F>> + '_ {
        self.history.iter().copied()
    }

    /// Adapts the weight from this generation's best and best-feasible penalised fitness.
    pub fn update(&mut self, best: F, best_feasible: Option<F>) {
        let gap = best_feasible.map(|bf| bf - best);
        if self.history.len() == HISTORY {
            self.history.pop_front();
        }
        self.history.push_back(gap);
        match gap {
            None => self.w = (self.w * self.beta).min(self.w_max),
            Some(g) if g > F::zero() => self.w = (self.w * self.beta).min(self.w_max),
            Some(g) if g == F::zero() => self.w = (self.w / self.beta).max(self.w_min),
            Some(_) => {}
        }
    }

    pub fn updated(mut self, best: F, best_feasible: Option<F>) -> Self {
        self.update(best, best_feasible);
        self
    }
}

/// `raw + w * violation`.
pub fn penalised<F: Scalar>(raw: F, violation: F, state: &PenaltyState<F>) -> Result<F> {
    if violation < F::zero() {
        return Err(Error::NegativeViolation(violation.as_f64()));
    }
    Ok(raw + state.w * violation)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(w: f64) -> PenaltyState<f64> {
        PenaltyState::new(w, 1e-3, 1e6, 1.5).unwrap()
    }

    #[test]
    fn grows_without_feasible_agent() {
        let mut s = state(10.0);
        s.update(3.0, None);
        assert_eq!(s.weight(), 15.0);
    }

    #[test]
    fn shrinks_when_best_is_feasible() {
        let mut s = state(15.0);
        s.update(3.0, Some(3.0));
        assert_eq!(s.weight(), 10.0);
    }

    #[test]
    fn grows_when_best_feasible_lags() {
        let mut s = state(10.0);
        s.update(3.0, Some(4.0));
        assert_eq!(s.weight(), 15.0);
    }

    #[test]
    fn clamps_at_bounds() {
        let mut s = PenaltyState::new(1e6, 1e-3, 1e6, 1.5).unwrap();
        s.update(0.0, None);
        assert_eq!(s.weight(), 1e6);
        let mut s = PenaltyState::new(1e-3, 1e-3, 1e6, 1.5).unwrap();
        s.update(0.0, Some(0.0));
        assert_eq!(s.weight(), 1e-3);
    }

    #[test]
    fn penalised_is_linear_in_weight() {
        let a = state(2.0);
        let b = state(4.0);
        assert_eq!(penalised(5.0, 0.0, &a).unwrap(), 5.0);
        let ta = penalised(5.0, 3.0, &a).unwrap() - 5.0;
        let tb = penalised(5.0, 3.0, &b).unwrap() - 5.0;
        assert_eq!(tb, 2.0 * ta);
        assert!(matches!(penalised(5.0, -1.0, &a), Err(Error::NegativeViolation(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let mut s = PenaltyState::<f32>::for_scale(20.0, &PenaltyConfig::default()).unwrap();
        s.update(1.0, None);
        assert!((s.weight() - 22.0).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PenaltyState::new(1.0, 2.0, 3.0, 1.5).is_err());
        assert!(PenaltyState::new(2.0, 1.0, 3.0, 1.0).is_err());
    }
}
