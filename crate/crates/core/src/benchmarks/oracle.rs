//! Offline ground truth: best expected value per control set on the true
//! objective, the tolerated sets `C_*` and the cheapest tolerated set.

use super::costs::CostModel;
use super::environment::ObjectiveEnvironment;
use crate::error::{Error, Result};
use crate::lowdisc::shifted_halton;
use crate::query::{expected_value, index_key, ControlSetFamily, McSampleBank, PartialQuery};
use crate::rng::{derive_seed, stream_rng, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpec {
    /// Samples per set while searching.
    pub search_samples: usize,
    /// Fresh samples used to report `v_i*` at the found maximizer.
    pub eval_samples: usize,
    pub candidates: usize,
    pub restarts: usize,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_moves: usize,
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec {
            search_samples: 256,
            eval_samples: 4096,
            candidates: 512,
            restarts: 4,
            initial_step: 0.25,
            min_step: 1e-4,
            max_moves: 400,
        }
    }
}

impl OracleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.search_samples == 0 || self.eval_samples == 0 {
            return Err(Error::config("oracle sample counts must be at least 1"));
        }
        if self.candidates == 0 || self.restarts == 0 {
            return Err(Error::config("oracle needs at least one candidate and one restart"));
        }
        if !(self.min_step > 0.0 && self.min_step <= self.initial_step) {
            return Err(Error::config("oracle step sizes must satisfy 0 < min_step <= initial_step"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub alpha: f64,
    /// `v_i*` per set.
    pub values: Vec<f64>,
    /// Maximizing partial query per set.
    pub maximizers: Vec<PartialQuery>,
    pub best_value: f64,
    /// `i⁺`, ties to the smallest index.
    pub best_set: usize,
    /// `C_*`, ascending.
    pub tolerated: Vec<usize>,
    /// `i*`: cheapest member of `C_*` by mean cost, ties to the smallest index.
    pub cheapest_tolerated: usize,
}

impl OracleSolution {
    pub fn from_values(values: Vec<f64>, maximizers: Vec<PartialQuery>, alpha: f64, costs: &CostModel) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::config(format!("alpha {alpha} must lie in [0, 1]")));
        }
        if values.is_empty() || values.len() != costs.len() || maximizers.len() != values.len() {
            return Err(Error::config(format!(
                "oracle has {} values and {} maximizers for {} cost entries",
                values.len(),
                maximizers.len(),
                costs.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(*v));
        }
        let mut best_set = 0;
        for (i, v) in values.iter().enumerate() {
            if *v > values[best_set] {
                best_set = i;
            }
        }
        let best_value = values[best_set];
        let threshold = (1.0 - alpha) * best_value;
        let tolerated: Vec<usize> = (0..values.len()).filter(|&i| values[i] >= threshold).collect();
        let mut cheapest_tolerated = tolerated[0];
        for &i in &tolerated {
            if costs.mean(i) < costs.mean(cheapest_tolerated) {
                cheapest_tolerated = i;
            }
        }
        Ok(OracleSolution {
            alpha,
            values,
            maximizers,
            best_value,
            best_set,
            tolerated,
            cheapest_tolerated,
        })
    }

    /// Same per-set values under a different tolerance.
    pub fn with_alpha(&self, alpha: f64, costs: &CostModel) -> Result<Self> {
        Self::from_values(self.values.clone(), self.maximizers.clone(), alpha, costs)
    }

    pub fn is_tolerated(&self, i: usize) -> bool {
        self.tolerated.binary_search(&i).is_ok()
    }
}

/// Compass search at a fixed step until no neighbour improves, then halve.
fn polish<F>(mut x: Vec<f64>, mut value: f64, spec: &OracleSpec, score: &F) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let mut step = spec.initial_step;
    let mut moves = 0;
    while step >= spec.min_step && moves < spec.max_moves && !x.is_empty() {
        let mut improved = false;
        for j in 0..x.len() {
            for dir in [-1.0, 1.0] {
                let v = (x[j] + dir * step).clamp(0.0, 1.0);
                if v == x[j] {
                    continue;
                }
                let old = x[j];
                x[j] = v;
                let s = score(&x);
                if s > value {
                    value = s;
                    improved = true;
                    moves += 1;
                } else {
                    x[j] = old;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, value)
}

/// Best expected value of set `i` under `env`, by multi-start compass
/// search on one bank and re-evaluation on a fresh one.
pub fn solve_set_oracle(
    env: &ObjectiveEnvironment,
    family: &ControlSetFamily,
    i: usize,
    spec: &OracleSpec,
    seed: u64,
) -> Result<(PartialQuery, f64)> {
    let set = family.set(i)?;
    let search = McSampleBank::draw(family, spec.search_samples, derive_seed(seed, Stream::Oracle, 0))?;
    let eval = McSampleBank::draw(family, spec.eval_samples, derive_seed(seed, Stream::Oracle, 1))?;
    let g = |x: &[f64]| env.value(x);
    let score = |values: &[f64]| {
        expected_value(g, family, &PartialQuery { set: i, values: values.to_vec() }, &search)
            .expect("candidate has the set width")
    };
    let width = set.size();
    let pool = if width == 0 {
        vec![Vec::new()]
    } else {
        let mut rng = stream_rng(seed, Stream::Oracle, index_key(set.controlled()));
        shifted_halton(spec.candidates, width, &mut rng)
    };
    let scores: Vec<f64> = pool.iter().map(|c| score(c)).collect();
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut best: Option<(Vec<f64>, f64)> = None;
    for &k in order.iter().take(spec.restarts) {
        let (x, v) = polish(pool[k].clone(), scores[k], spec, &score);
        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
            best = Some((x, v));
        }
    }
    let (values, _) = best.expect("pool is never empty");
    let pq = PartialQuery { set: i, values };
    let value = expected_value(g, family, &pq, &eval)?;
    Ok((pq, value))
}

pub fn compute_oracle(
    env: &ObjectiveEnvironment,
    family: &ControlSetFamily,
    alpha: f64,
    costs: &CostModel,
    spec: &OracleSpec,
    seed: u64,
) -> Result<OracleSolution> {
    spec.validate()?;
    if env.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            got: env.dim(),
        });
    }
    costs.check_against(family)?;
    let mut values = Vec::with_capacity(family.len());
    let mut maximizers = Vec::with_capacity(family.len());
    for i in 0..family.len() {
        let (pq, v) = solve_set_oracle(env, family, i, spec, seed)?;
        maximizers.push(pq);
        values.push(v);
    }
    OracleSolution::from_values(values, maximizers, alpha, costs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::environment::make_hartmann_env;
    use crate::benchmarks::families::synthetic_family;
    use crate::benchmarks::functions::HARTMANN6_MIN;
    use crate::query::InputDistribution;

    fn costs() -> CostModel {
        CostModel::new(vec![1.0, 0.5, 0.5], 0.0).unwrap()
    }

    fn pqs(n: usize) -> Vec<PartialQuery> {
        (0..n).map(|set| PartialQuery { set, values: Vec::new() }).collect()
    }

    #[test]
    fn tolerated_sets_follow_alpha() {
        let o = OracleSolution::from_values(vec![2.0, 1.9, 1.0], pqs(3), 0.1, &costs()).unwrap();
        assert_eq!(o.best_set, 0);
        assert_eq!(o.tolerated, vec![0, 1]);
        assert_eq!(o.cheapest_tolerated, 1);
        let all = o.with_alpha(1.0, &costs()).unwrap();
        assert_eq!(all.tolerated, vec![0, 1, 2]);
        assert_eq!(all.cheapest_tolerated, 1);
        let none = o.with_alpha(0.0, &costs()).unwrap();
        assert_eq!(none.tolerated, vec![0]);
        assert!(OracleSolution::from_values(vec![1.0], pqs(1), 0.1, &costs()).is_err());
    }

    #[test]
    fn hartmann_full_set_reaches_global_max() {
        let env = make_hartmann_env();
        let family = synthetic_family(InputDistribution::truncated_normal(0.5, 0.02).unwrap()).unwrap();
        let spec = OracleSpec {
            search_samples: 8,
            eval_samples: 8,
            candidates: 256,
            ..OracleSpec::default()
        };
        let (_, v) = solve_set_oracle(&env, &family, 6, &spec, 3).unwrap();
        let max = -HARTMANN6_MIN + env.shift();
        assert!((v - max).abs() < 1e-3, "{v} vs {max}");
    }
}
