//! Trace CSV: `t, phase, set_index, pq, complement, y, cost_draw, cum_cost,
//! alpha_t, S1`. Lists are semicolon-joined, set indices are 1-based and
//! floats use shortest round-trip formatting, so a trace survives a write
//! and read bit for bit.

use bocvs::algorithm::{Phase, RunTrace, TraceRecord};

use crate::error::{HarnessError, Result};

pub const TRACE_HEADER: [&str; 10] = [
    "t",
    "phase",
    "set_index",
    "pq",
    "complement",
    "y",
    "cost_draw",
    "cum_cost",
    "alpha_t",
    "S1",
];

fn join_f64(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn join_sets(v: &[usize]) -> String {
    v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(";")
}

pub fn trace_to_csv(trace: &RunTrace) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRACE_HEADER)?;
    for r in &trace.records {
        w.write_record([
            r.t.to_string(),
            r.phase.as_str().to_string(),
            (r.set + 1).to_string(),
            join_f64(&r.pq),
            join_f64(&r.complement),
            r.y.to_string(),
            r.cost.to_string(),
            r.cum_cost.to_string(),
            r.alpha.to_string(),
            join_sets(&r.feasible),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

pub fn parse_trace(text: &str, source_name: &str) -> Result<RunTrace> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(HarnessError::parse(source_name, 1, "unexpected trace header"));
    }
    let mut records = Vec::new();
    for (k, row) in reader.records().enumerate() {
        let line = k + 2;
        let row = row.map_err(|e| HarnessError::parse(source_name, line, e.to_string()))?;
        let err = |m: String| HarnessError::parse(source_name, line, m);
        if row.len() != TRACE_HEADER.len() {
            return Err(err(format!("expected {} fields, found {}", TRACE_HEADER.len(), row.len())));
        }
        let float = |col: usize| -> Result<f64> {
            let raw = &row[col];
            raw.parse().map_err(|_| err(format!("{}: `{raw}` is not a number", TRACE_HEADER[col])))
        };
        let floats = |col: usize| -> Result<Vec<f64>> {
            let raw = &row[col];
            if raw.is_empty() {
                return Ok(Vec::new());
            }
            raw.split(';')
                .map(|s| s.parse().map_err(|_| err(format!("{}: `{s}` is not a number", TRACE_HEADER[col]))))
                .collect()
        };
        let index = |s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i - 1),
                _ => Err(err(format!("`{s}` is not a 1-based set index"))),
            }
        };
        let t = row[0].parse().map_err(|_| err(format!("t: `{}` is not an integer", &row[0])))?;
        let feasible = if row[9].is_empty() {
            Vec::new()
        } else {
            row[9].split(';').map(index).collect::<Result<_>>()?
        };
        records.push(TraceRecord {
            t,
            phase: Phase::parse(&row[1]).map_err(|e| err(e.to_string()))?,
            set: index(&row[2])?,
            pq: floats(3)?,
            complement: floats(4)?,
            y: float(5)?,
            cost: float(6)?,
            cum_cost: float(7)?,
            alpha: float(8)?,
            feasible,
        });
    }
    Ok(RunTrace { records })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunTrace {
        RunTrace {
            records: vec![
                TraceRecord {
                    t: 1,
                    phase: Phase::Explore,
                    set: 0,
                    pq: vec![0.1, 1.0 / 3.0],
                    complement: vec![0.5],
                    y: -0.25,
                    cost: 0.01,
                    cum_cost: 0.01,
                    alpha: 0.1,
                    feasible: vec![],
                },
                TraceRecord {
                    t: 2,
                    phase: Phase::Exploit,
                    set: 2,
                    pq: vec![0.7, 0.2, 0.9],
                    complement: vec![],
                    y: 1.5e-7,
                    cost: 1.0,
                    cum_cost: 1.01,
                    alpha: 0.05,
                    feasible: vec![1, 2],
                },
            ],
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let csv = trace_to_csv(&sample()).unwrap();
        assert!(csv.starts_with("t,phase,set_index,pq,complement,y,cost_draw,cum_cost,alpha_t,S1\n"));
        assert!(csv.contains(",2;3\n"));
        assert_eq!(parse_trace(&csv, "t").unwrap(), sample());
    }

    #[test]
    fn malformed_rows_report_line() {
        let mut csv = trace_to_csv(&sample()).unwrap();
        csv = csv.replace("0.05", "zero");
        match parse_trace(&csv, "t") {
            Err(HarnessError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_trace("a,b\n", "t").is_err());
        assert!(parse_trace(&trace_to_csv(&sample()).unwrap().replace(",3,", ",0,"), "t").is_err());
    }
}
