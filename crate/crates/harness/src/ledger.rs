//! Per-step quality and cost regret of a finished run, measured against an
//! oracle with a high-sample bank, plus budget-indexed summary curves.

use std::fmt::Write as _;

use bocvs::algorithm::RunTrace;
use bocvs::benchmarks::{CostModel, ObjectiveEnvironment, OracleSolution};
use bocvs::query::{expected_value, ControlSetFamily, McSampleBank, PartialQuery};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    pub t: usize,
    pub set: usize,
    /// `E[f([x^{i_t}, X^{-i_t}])]` of the played partial query.
    pub expected: f64,
    pub quality_alpha0: f64,
    pub quality_alpha_t: f64,
    pub cost: f64,
    pub cum_quality_alpha0: f64,
    pub cum_quality_alpha_t: f64,
    pub cum_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretLedger {
    pub v_plus: f64,
    pub alpha0: f64,
    pub cheapest_mean: f64,
    pub rows: Vec<LedgerRow>,
    /// Cumulative spend after each play, copied from the trace.
    pub cum_spend: Vec<f64>,
}

pub const LEDGER_HEADER: [&str; 9] = [
    "t",
    "set_index",
    "expected_value",
    "quality_regret_alpha0",
    "quality_regret_alpha_t",
    "cost_regret",
    "cum_quality_alpha0",
    "cum_quality_alpha_t",
    "cum_cost_regret",
];

/// One point of the budget-indexed curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub budget: f64,
    pub simple_regret: f64,
    pub evaluations: usize,
}

impl RegretLedger {
    /// `oracle` fixes `v⁺` and `i*` under `α₀ = oracle.alpha`; `bank` is the
    /// high-sample bank used for every expectation.
    pub fn build(
        trace: &RunTrace,
        oracle: &OracleSolution,
        costs: &CostModel,
        env: &ObjectiveEnvironment,
        family: &ControlSetFamily,
        bank: &McSampleBank,
    ) -> Result<Self> {
        if costs.len() != family.len() || oracle.values.len() != family.len() {
            return Err(HarnessError::config(format!(
                "oracle has {} sets, costs {}, family {}",
                oracle.values.len(),
                costs.len(),
                family.len()
            )));
        }
        let v_plus = oracle.best_value;
        let alpha0 = oracle.alpha;
        let cheapest_mean = costs.mean(oracle.cheapest_tolerated);
        let mut rows = Vec::with_capacity(trace.len());
        let (mut q0, mut qt, mut qc) = (0.0, 0.0, 0.0);
        for r in &trace.records {
            let pq = PartialQuery {
                set: r.set,
                values: r.pq.clone(),
            };
            let expected = expected_value(|x: &[f64]| env.value(x), family, &pq, bank)?;
            let quality_alpha0 = (1.0 - alpha0) * v_plus - expected;
            let quality_alpha_t = (1.0 - r.alpha) * v_plus - expected;
            let cost = (costs.mean(r.set) - cheapest_mean).max(0.0);
            q0 += quality_alpha0;
            qt += quality_alpha_t;
            qc += cost;
            rows.push(LedgerRow {
                t: r.t,
                set: r.set,
                expected,
                quality_alpha0,
                quality_alpha_t,
                cost,
                cum_quality_alpha0: q0,
                cum_quality_alpha_t: qt,
                cum_cost: qc,
            });
        }
        Ok(RegretLedger {
            v_plus,
            alpha0,
            cheapest_mean,
            rows,
            cum_spend: trace.records.iter().map(|r| r.cum_cost).collect(),
        })
    }

    /// Plays whose cumulative spend is within `budget`.
    pub fn evaluations_within(&self, budget: f64) -> usize {
        self.cum_spend.partition_point(|&c| c <= budget)
    }

    /// `v⁺ − max_{t ≤ T(b)} E_t`, or `v⁺` before the first play.
    pub fn simple_regret_within(&self, budget: f64) -> f64 {
        let n = self.evaluations_within(budget);
        let best = self.rows[..n].iter().map(|r| r.expected).fold(f64::NEG_INFINITY, f64::max);
        if n == 0 {
            self.v_plus
        } else {
            self.v_plus - best
        }
    }

    pub fn curve(&self, grid: &[f64]) -> Vec<CurvePoint> {
        grid.iter()
            .map(|&b| CurvePoint {
                budget: b,
                simple_regret: self.simple_regret_within(b),
                evaluations: self.evaluations_within(b),
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(LEDGER_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.t.to_string(),
                (r.set + 1).to_string(),
                r.expected.to_string(),
                r.quality_alpha0.to_string(),
                r.quality_alpha_t.to_string(),
                r.cost.to_string(),
                r.cum_quality_alpha0.to_string(),
                r.cum_quality_alpha_t.to_string(),
                r.cum_cost.to_string(),
            ])?;
        }
        into_string(w)
    }
}

/// Reads a ledger written by [`RegretLedger::to_csv`]; `trace` supplies
/// the cumulative spend and must have the same plays.
pub fn parse_ledger(text: &str, source_name: &str, trace: &RunTrace, oracle: &OracleSolution, costs: &CostModel) -> Result<RegretLedger> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    if reader.headers()?.iter().ne(LEDGER_HEADER) {
        return Err(HarnessError::parse(source_name, 1, "unexpected ledger header"));
    }
    let mut rows = Vec::new();
    for (k, row) in reader.records().enumerate() {
        let line = k + 2;
        let row = row.map_err(|e| HarnessError::parse(source_name, line, e.to_string()))?;
        let err = |m: String| HarnessError::parse(source_name, line, m);
        let num = |col: usize| -> Result<f64> {
            row[col].parse().map_err(|_| err(format!("{}: `{}` is not a number", LEDGER_HEADER[col], &row[col])))
        };
        let t = row[0].parse::<usize>().map_err(|_| err(format!("t: `{}` is not an index", &row[0])))?;
        let set = row[1].parse::<usize>().ok().filter(|&s| s >= 1).ok_or_else(|| err(format!("set_index: `{}` is not a 1-based index", &row[1])))?;
        match trace.records.get(k) {
            Some(r) if r.t == t && r.set + 1 == set => {}
            _ => return Err(err(format!("play t = {t} does not match the trace"))),
        }
        rows.push(LedgerRow {
            t,
            set: set - 1,
            expected: num(2)?,
            quality_alpha0: num(3)?,
            quality_alpha_t: num(4)?,
            cost: num(5)?,
            cum_quality_alpha0: num(6)?,
            cum_quality_alpha_t: num(7)?,
            cum_cost: num(8)?,
        });
    }
    if rows.len() != trace.len() {
        return Err(HarnessError::parse(source_name, rows.len() + 1, format!("ledger has {} rows, trace {}", rows.len(), trace.len())));
    }
    Ok(RegretLedger {
        v_plus: oracle.best_value,
        alpha0: oracle.alpha,
        cheapest_mean: costs.mean(oracle.cheapest_tolerated),
        rows,
        cum_spend: trace.records.iter().map(|r| r.cum_cost).collect(),
    })
}

pub(crate) fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `0, step, 2·step, …` up to and including `budget`.
pub fn budget_grid(budget: f64, step: f64) -> Vec<f64> {
    let n = (budget / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
    if (budget - grid[n]).abs() > 1e-9 {
        grid.push(budget);
    }
    grid
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from("budget,simple_regret,evaluations\n");
    for p in points {
        let _ = writeln!(s, "{},{},{}", p.budget, p.simple_regret, p.evaluations);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_endpoints() {
        let g = budget_grid(100.0, 5.0);
        assert_eq!(g.len(), 21);
        assert_eq!(g[20], 100.0);
        assert_eq!(budget_grid(12.0, 5.0), vec![0.0, 5.0, 10.0, 12.0]);
    }
}
