use crate::error::{Error, Result};

/// Empirical cost means with Hoeffding lower confidence bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct CostEstimator {
    counts: Vec<usize>,
    sums: Vec<f64>,
    horizon: usize,
}

impl CostEstimator {
    /// `horizon` is the `T̂` inside the bonus `√(2 log T̂ / T_i)`.
    pub fn new(sets: usize, horizon: usize) -> Result<Self> {
        if sets == 0 {
            return Err(Error::config("cost estimator needs at least one control set"));
        }
        if horizon == 0 {
            return Err(Error::config("cost-bonus horizon must be at least 1"));
        }
        Ok(CostEstimator {
            counts: vec![0; sets],
            sums: vec![0.0; sets],
            horizon,
        })
    }

    /// `T̂ = ⌈C / c_floor⌉`.
    pub fn budget_horizon(budget: f64, cost_floor: f64) -> Result<usize> {
        if !(budget > 0.0 && budget.is_finite()) || !(cost_floor > 0.0) {
            return Err(Error::config(format!(
                "horizon needs positive budget and cost floor, got {budget} and {cost_floor}"
            )));
        }
        Ok(((budget / cost_floor).ceil() as usize).max(1))
    }

    pub fn record(&mut self, i: usize, cost: f64) {
        self.counts[i] += 1;
        self.sums[i] += cost;
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn count(&self, i: usize) -> usize {
        self.counts[i]
    }

    pub fn total_plays(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `ĉ_i`, zero before the first play.
    pub fn mean(&self, i: usize) -> f64 {
        match self.counts[i] {
            0 => 0.0,
            n => self.sums[i] / n as f64,
        }
    }

    /// `β_i`, infinite before the first play.
    pub fn bonus(&self, i: usize) -> f64 {
        match self.counts[i] {
            0 => f64::INFINITY,
            n => (2.0 * (self.horizon as f64).ln() / n as f64).sqrt(),
        }
    }

    /// `c_i^LCB = max(ĉ_i − β_i, 0)`.
    pub fn lcb(&self, i: usize) -> f64 {
        if self.counts[i] == 0 {
            return 0.0;
        }
        (self.mean(i) - self.bonus(i)).max(0.0)
    }

    pub fn lcbs(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|i| self.lcb(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unplayed_sets_are_optimistic() {
        let c = CostEstimator::new(2, 100).unwrap();
        assert_eq!(c.lcb(0), 0.0);
        assert!(c.bonus(1).is_infinite());
    }

    #[test]
    fn horizon_from_budget() {
        assert_eq!(CostEstimator::budget_horizon(100.0, 0.01).unwrap(), 10_000);
        assert_eq!(CostEstimator::budget_horizon(1.0, 0.3).unwrap(), 4);
        assert!(CostEstimator::budget_horizon(0.0, 0.01).is_err());
    }

    proptest! {
        #[test]
        fn lcb_within_mean_and_counts_add_up(plays in proptest::collection::vec((0usize..3, 0.0f64..1.0), 1..200)) {
            let mut c = CostEstimator::new(3, 1000).unwrap();
            let mut last_bonus = [f64::INFINITY; 3];
            for (i, cost) in &plays {
                c.record(*i, *cost);
                prop_assert!(c.bonus(*i) < last_bonus[*i]);
                last_bonus[*i] = c.bonus(*i);
            }
            prop_assert_eq!(c.total_plays(), plays.len());
            for i in 0..3 {
                prop_assert!(c.lcb(i) >= 0.0 && c.lcb(i) <= c.mean(i) + 1e-15);
            }
        }
    }
}
