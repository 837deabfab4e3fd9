use crate::error::{Error, Result};

/// Slack for floating-point sums of cost draws when comparing against `u_c`.
const BUDGET_TOLERANCE: f64 = 1e-12;

/// Running spend against a budget `C`.
///
/// A play is allowed while the remaining budget is at least the cost support
/// bound `u_c`, so the total can exceed `C` by less than one draw only when a
/// draw itself exceeds `u_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetMeter {
    budget: f64,
    spent: f64,
    cost_upper: f64,
}

impl BudgetMeter {
    pub fn new(budget: f64, cost_upper: f64) -> Result<Self> {
        if !(budget.is_finite() && budget > 0.0) {
            return Err(Error::config(format!("budget {budget} must be positive")));
        }
        if !(cost_upper.is_finite() && cost_upper > 0.0) {
            return Err(Error::config(format!("cost upper bound {cost_upper} must be positive")));
        }
        Ok(BudgetMeter {
            budget,
            spent: 0.0,
            cost_upper,
        })
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn spent(&self) -> f64 {
        self.spent
    }

    pub fn cost_upper(&self) -> f64 {
        self.cost_upper
    }

    pub fn remaining(&self) -> f64 {
        self.budget - self.spent
    }

    pub fn can_play(&self) -> bool {
        self.remaining() + BUDGET_TOLERANCE >= self.cost_upper
    }

    /// Whether a worst-case draw still fits under `cap` after `spent_so_far`.
    pub fn fits_under(&self, cap: f64, spent_so_far: f64) -> bool {
        cap - spent_so_far + BUDGET_TOLERANCE >= self.cost_upper
    }

    pub fn charge(&mut self, cost: f64) {
        debug_assert!(cost >= 0.0);
        self.spent += cost;
    }
}
