//! Oracle cache: `[oracle]` blocks of `key = value` lines, one block per
//! (environment, family, α, oracle settings) combination.

use std::fmt::Write as _;

use bocvs::benchmarks::{CostModel, OracleSolution};
use bocvs::query::PartialQuery;

use crate::error::{HarnessError, Result};

/// Settings that identify one oracle computation.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleKey {
    pub env: String,
    pub env_param: f64,
    pub cost_model: String,
    pub variance: f64,
    pub alpha: f64,
    pub samples: usize,
    pub search_samples: usize,
    pub candidates: usize,
    pub restarts: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRecord {
    pub key: OracleKey,
    pub solution: OracleSolution,
}

fn floats(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn sets(v: &[usize]) -> String {
    v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(";")
}

pub fn write_records(records: &[OracleRecord]) -> String {
    let mut s = String::new();
    for (n, r) in records.iter().enumerate() {
        if n > 0 {
            s.push('\n');
        }
        let k = &r.key;
        let o = &r.solution;
        let _ = writeln!(s, "[oracle]");
        let _ = writeln!(s, "env = {}", k.env);
        let _ = writeln!(s, "env_param = {}", k.env_param);
        let _ = writeln!(s, "cost_model = {}", k.cost_model);
        let _ = writeln!(s, "variance = {}", k.variance);
        let _ = writeln!(s, "alpha = {}", k.alpha);
        let _ = writeln!(s, "samples = {}", k.samples);
        let _ = writeln!(s, "search_samples = {}", k.search_samples);
        let _ = writeln!(s, "candidates = {}", k.candidates);
        let _ = writeln!(s, "restarts = {}", k.restarts);
        let _ = writeln!(s, "seed = {}", k.seed);
        let _ = writeln!(s, "values = {}", floats(&o.values));
        let maximizers: Vec<String> = o.maximizers.iter().map(|pq| floats(&pq.values)).collect();
        let _ = writeln!(s, "maximizers = {}", maximizers.join("|"));
        let _ = writeln!(s, "best_value = {}", o.best_value);
        let _ = writeln!(s, "best_set = {}", o.best_set + 1);
        let _ = writeln!(s, "tolerated = {}", sets(&o.tolerated));
        let _ = writeln!(s, "cheapest = {}", o.cheapest_tolerated + 1);
    }
    s
}

const KEYS: [&str; 17] = [
    "env",
    "env_param",
    "cost_model",
    "variance",
    "alpha",
    "samples",
    "search_samples",
    "candidates",
    "restarts",
    "seed",
    "values",
    "maximizers",
    "best_value",
    "best_set",
    "tolerated",
    "cheapest",
    "",
];

struct Block {
    start: usize,
    fields: Vec<(String, String, usize)>,
}

impl Block {
    fn get(&self, key: &str, source: &str) -> Result<(&str, usize)> {
        self.fields
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
            .ok_or_else(|| HarnessError::parse(source, self.start, format!("oracle block lacks `{key}`")))
    }
}

fn parse_num<T: std::str::FromStr>(raw: &str, line: usize, source: &str, what: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| HarnessError::parse(source, line, format!("{what}: cannot parse `{raw}`")))
}

fn parse_floats(raw: &str, line: usize, source: &str, what: &str) -> Result<Vec<f64>> {
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    raw.split(';').map(|s| parse_num(s, line, source, what)).collect()
}

fn parse_sets(raw: &str, line: usize, source: &str, what: &str) -> Result<Vec<usize>> {
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    raw.split(';')
        .map(|s| match parse_num::<usize>(s, line, source, what)? {
            0 => Err(HarnessError::parse(source, line, format!("{what}: set indices are 1-based"))),
            i => Ok(i - 1),
        })
        .collect()
}

/// Parses every block. Derived fields (`best_*`, `tolerated`, `cheapest`)
/// are checked against the values under the record's own cost model.
pub fn parse_records(text: &str, source: &str) -> Result<Vec<OracleRecord>> {
    let mut blocks: Vec<Block> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if content == "[oracle]" {
            blocks.push(Block {
                start: line,
                fields: Vec::new(),
            });
            continue;
        }
        let block = blocks
            .last_mut()
            .ok_or_else(|| HarnessError::parse(source, line, "field outside an [oracle] block"))?;
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| HarnessError::parse(source, line, format!("expected `key = value`, found `{content}`")))?;
        let key = key.trim();
        if !KEYS[..16].contains(&key) {
            return Err(HarnessError::parse(source, line, format!("unknown oracle key `{key}`")));
        }
        if block.fields.iter().any(|(k, _, _)| k == key) {
            return Err(HarnessError::parse(source, line, format!("duplicate key `{key}`")));
        }
        block.fields.push((key.to_string(), value.trim().to_string(), line));
    }
    blocks.iter().map(|b| parse_block(b, source)).collect()
}

fn parse_block(b: &Block, source: &str) -> Result<OracleRecord> {
    let num_field = |key: &str| -> Result<(String, usize)> {
        let (v, l) = b.get(key, source)?;
        Ok((v.to_string(), l))
    };
    macro_rules! field {
        ($key:literal) => {{
            let (v, l) = num_field($key)?;
            parse_num(&v, l, source, $key)?
        }};
    }
    let key = OracleKey {
        env: b.get("env", source)?.0.to_string(),
        env_param: field!("env_param"),
        cost_model: b.get("cost_model", source)?.0.to_string(),
        variance: field!("variance"),
        alpha: field!("alpha"),
        samples: field!("samples"),
        search_samples: field!("search_samples"),
        candidates: field!("candidates"),
        restarts: field!("restarts"),
        seed: field!("seed"),
    };
    let (v, l) = b.get("values", source)?;
    let values = parse_floats(v, l, source, "values")?;
    let (v, l) = b.get("maximizers", source)?;
    let maximizers = v
        .split('|')
        .enumerate()
        .map(|(set, part)| {
            Ok(PartialQuery {
                set,
                values: parse_floats(part, l, source, "maximizers")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let costs = CostModel::by_name(&key.cost_model)
        .map_err(|e| HarnessError::parse(source, b.get("cost_model", source).map_or(b.start, |x| x.1), e.to_string()))?;
    let solution = OracleSolution::from_values(values, maximizers, key.alpha, &costs)
        .map_err(|e| HarnessError::parse(source, b.start, e.to_string()))?;
    let (v, l) = b.get("best_value", source)?;
    let best_value: f64 = parse_num(v, l, source, "best_value")?;
    let (v, l) = b.get("best_set", source)?;
    let best_set = parse_sets(v, l, source, "best_set")?;
    let (v, l) = b.get("tolerated", source)?;
    let tolerated = parse_sets(v, l, source, "tolerated")?;
    let (v, l) = b.get("cheapest", source)?;
    let cheapest = parse_sets(v, l, source, "cheapest")?;
    let consistent = best_value.to_bits() == solution.best_value.to_bits()
        && best_set == [solution.best_set]
        && tolerated == solution.tolerated
        && cheapest == [solution.cheapest_tolerated];
    if !consistent {
        return Err(HarnessError::parse(source, b.start, "derived oracle fields disagree with the stored values"));
    }
    Ok(OracleRecord { key, solution })
}

/// Loads a cache file; a missing file is an empty cache.
pub fn load(path: &std::path::Path) -> Result<Vec<OracleRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    parse_records(&crate::error::read_file(path)?, &path.display().to_string())
}

pub fn store(path: &std::path::Path, records: &[OracleRecord]) -> Result<()> {
    crate::error::write_file(path, &write_records(records))
}
