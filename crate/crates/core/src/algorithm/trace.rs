use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Explore,
    Exploit,
    Commit,
    Play,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Explore => "explore",
            Phase::Exploit => "exploit",
            Phase::Commit => "commit",
            Phase::Play => "play",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "explore" => Ok(Phase::Explore),
            "exploit" => Ok(Phase::Exploit),
            "commit" => Ok(Phase::Commit),
            "play" => Ok(Phase::Play),
            other => Err(Error::config(format!("unknown phase `{other}`"))),
        }
    }
}

/// One play. `set` is 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub t: usize,
    pub phase: Phase,
    pub set: usize,
    pub pq: Vec<f64>,
    pub complement: Vec<f64>,
    pub y: f64,
    pub cost: f64,
    pub cum_cost: f64,
    pub alpha: f64,
    pub feasible: Vec<usize>,
}

impl TraceRecord {
    /// Fields fixed by the decision and the environment, ignoring the
    /// algorithm's internal bookkeeping (phase, α, `S₁`).
    pub fn same_play(&self, other: &TraceRecord) -> bool {
        self.t == other.t
            && self.set == other.set
            && self.pq == other.pq
            && self.complement == other.complement
            && self.y.to_bits() == other.y.to_bits()
            && self.cost.to_bits() == other.cost.to_bits()
            && self.cum_cost.to_bits() == other.cum_cost.to_bits()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn spent(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.cum_cost)
    }

    pub fn count_phase(&self, phase: Phase) -> usize {
        self.records.iter().filter(|r| r.phase == phase).count()
    }

    /// Plays whose cumulative cost stays within `budget`.
    pub fn evaluations_within(&self, budget: f64) -> usize {
        self.records.partition_point(|r| r.cum_cost <= budget)
    }
}
