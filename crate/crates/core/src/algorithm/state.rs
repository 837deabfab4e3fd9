use crate::error::{Error, Result};

/// Bound values produced by one acquisition round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundBounds {
    /// `max_{x^i} E[ucb]` for every set.
    pub ucb: Vec<f64>,
    /// `max_{i, x^i} E[lcb]`.
    pub lcb_max: f64,
    /// Set attaining `lcb_max`, smallest index on ties.
    pub lcb_argmax: usize,
}

impl RoundBounds {
    pub fn new(ucb: Vec<f64>, lcb: &[f64]) -> Result<Self> {
        if ucb.is_empty() || ucb.len() != lcb.len() {
            return Err(Error::config("round bounds need one ucb and one lcb per set"));
        }
        let mut arg = 0;
        for (i, v) in lcb.iter().enumerate() {
            if *v > lcb[arg] {
                arg = i;
            }
        }
        Ok(RoundBounds {
            ucb,
            lcb_max: lcb[arg],
            lcb_argmax: arg,
        })
    }
}

/// One exploration play: the played set's expected-ucb maximum and the
/// round's best expected lcb over all sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplorationRound {
    pub set: usize,
    pub ucb: f64,
    pub lcb_max: f64,
}

/// Intersected bounds `l̄cb`, `ūcb_i` and the filtered sets `S₁ ⊇ S₃`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExploitState {
    lower: f64,
    upper: Vec<f64>,
    alpha: f64,
    feasible: Vec<usize>,
    cheapest: Vec<usize>,
    resets: usize,
}

/// `l̄cb` = max of the per-round lcb maxima; `ūcb_i` = min over the rounds
/// that played set `i`. Sets never played start at `+∞`.
pub fn seed_intersected_bounds(rounds: &[ExplorationRound], sets: usize) -> ExploitState {
    let mut upper = vec![f64::INFINITY; sets];
    let mut lower = f64::NEG_INFINITY;
    for r in rounds {
        upper[r.set] = upper[r.set].min(r.ucb);
        lower = lower.max(r.lcb_max);
    }
    ExploitState::new(lower, upper)
}

impl ExploitState {
    pub fn new(lower: f64, upper: Vec<f64>) -> Self {
        let feasible = (0..upper.len()).collect();
        ExploitState {
            lower,
            upper,
            alpha: 0.0,
            feasible,
            cheapest: Vec::new(),
            resets: 0,
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `S₁` from the last update.
    pub fn feasible(&self) -> &[usize] {
        &self.feasible
    }

    /// `S₃` from the last update.
    pub fn cheapest(&self) -> &[usize] {
        &self.cheapest
    }

    pub fn resets(&self) -> usize {
        self.resets
    }

    /// `{i : ūcb_i > (1−α)·l̄cb}`.
    pub fn feasible_under(&self, alpha: f64) -> Vec<usize> {
        let threshold = (1.0 - alpha) * self.lower;
        (0..self.upper.len()).filter(|&i| self.upper[i] > threshold).collect()
    }

    pub fn tighten(&mut self, round: &RoundBounds) {
        self.lower = self.lower.max(round.lcb_max);
        for (u, v) in self.upper.iter_mut().zip(&round.ucb) {
            *u = u.min(*v);
        }
    }

    /// Tightens with `round`, rebuilds `S₁` under `alpha` (resetting to the
    /// round values when it empties) and `S₃` from the cost lower bounds.
    /// Returns whether a reset happened.
    pub fn step(&mut self, round: &RoundBounds, alpha: f64, cost_lcb: &[f64]) -> Result<bool> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::config(format!("alpha {alpha} must lie in [0, 1]")));
        }
        if round.ucb.len() != self.upper.len() || cost_lcb.len() != self.upper.len() {
            return Err(Error::config("bounds and cost estimates disagree on the number of sets"));
        }
        self.alpha = alpha;
        self.tighten(round);
        let mut feasible = self.feasible_under(alpha);
        let reset = feasible.is_empty();
        if reset {
            self.lower = round.lcb_max;
            self.upper.clone_from(&round.ucb);
            self.resets += 1;
            feasible = self.feasible_under(alpha);
            if feasible.is_empty() {
                feasible.push(round.lcb_argmax);
            }
        }
        self.cheapest = cheapest_sets(&feasible, cost_lcb);
        self.feasible = feasible;
        Ok(reset)
    }
}

/// Members of `sets` whose cost LCB equals the minimum, ties all kept.
pub fn cheapest_sets(sets: &[usize], cost_lcb: &[f64]) -> Vec<usize> {
    let min = sets.iter().map(|&i| cost_lcb[i]).fold(f64::INFINITY, f64::min);
    sets.iter().copied().filter(|&i| cost_lcb[i] == min).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seeding_takes_min_and_max() {
        let rounds = [
            ExplorationRound { set: 0, ucb: 3.0, lcb_max: 0.1 },
            ExplorationRound { set: 1, ucb: 5.0, lcb_max: 0.4 },
            ExplorationRound { set: 0, ucb: 2.5, lcb_max: 0.2 },
            ExplorationRound { set: 1, ucb: 6.0, lcb_max: 0.3 },
            ExplorationRound { set: 0, ucb: 2.8, lcb_max: 0.0 },
        ];
        let s = seed_intersected_bounds(&rounds, 3);
        assert_eq!(s.upper(), &[2.5, 5.0, f64::INFINITY]);
        assert_eq!(s.lower(), 0.4);
    }

    #[test]
    fn reset_restores_round_values() {
        let mut s = ExploitState::new(5.0, vec![1.0, 2.0]);
        let round = RoundBounds::new(vec![3.0, 4.0], &[0.5, 2.5]).unwrap();
        assert!(s.step(&round, 0.1, &[0.0, 0.0]).unwrap());
        assert_eq!(s.lower(), 2.5);
        assert_eq!(s.upper(), &[3.0, 4.0]);
        assert_eq!(s.feasible(), &[0, 1]);
        assert_eq!(s.resets(), 1);
    }

    #[test]
    fn zero_tolerance_keeps_lcb_argmax() {
        let mut s = ExploitState::new(1.0, vec![0.5, 0.5]);
        let round = RoundBounds::new(vec![0.2, 0.3], &[0.1, 0.3]).unwrap();
        s.step(&round, 0.0, &[0.0, 0.0]).unwrap();
        assert_eq!(s.feasible(), &[1]);
        assert!(s.step(&round, 1.5, &[0.0, 0.0]).is_err());
    }

    proptest! {
        #[test]
        fn monotone_between_resets(
            rounds in proptest::collection::vec(proptest::collection::vec(-1.0f64..3.0, 8), 1..30),
            costs in proptest::collection::vec(0.0f64..1.0, 4),
            alpha in 0.0f64..1.0,
        ) {
            let mut s = ExploitState::new(f64::NEG_INFINITY, vec![f64::INFINITY; 4]);
            for r in rounds {
                let (ucb, lcb) = r.split_at(4);
                let ucb: Vec<f64> = ucb.iter().zip(lcb).map(|(u, l)| u.max(*l)).collect();
                let round = RoundBounds::new(ucb, lcb).unwrap();
                let before = s.clone();
                let reset = s.step(&round, alpha, &costs).unwrap();
                if !reset {
                    prop_assert!(s.lower() >= before.lower());
                    for i in 0..4 {
                        prop_assert!(s.upper()[i] <= before.upper()[i]);
                    }
                }
                prop_assert!(!s.feasible().is_empty());
                prop_assert!(s.cheapest().iter().all(|i| s.feasible().contains(i)));
                let threshold = (1.0 - alpha) * s.lower();
                for i in 0..4 {
                    let inside = s.upper()[i] > threshold;
                    prop_assert!(inside == s.feasible().contains(&i) || s.feasible() == [round.lcb_argmax]);
                }
            }
        }
    }
}
