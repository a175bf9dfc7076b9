//! CSV tables for aggregated samples and CDF traces.

use std::collections::BTreeMap;

use super::{AggregatedSamples, CdfTrace, FilterKind, KAggregate};
use crate::error::{Error, Result};
use crate::fourier::{fmt_f64, ImportanceDistribution};

pub const GK_HEADER: [&str; 7] = ["k", "n_k", "lambda", "r_mean", "r_stderr", "s_mean", "s_stderr"];

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse { line, msg: e.to_string() }
}

fn fmt_count(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{}", n as i64)
    } else {
        fmt_f64(n)
    }
}

/// One row per (k, slot); the extrapolated slot is written as lambda = 0.
pub fn gk_table_csv(agg: &AggregatedSamples) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(GK_HEADER).map_err(csv_err)?;
    for e in &agg.entries {
        for (slot, lambda) in agg.lambdas.iter().enumerate() {
            w.write_record([
                e.k.to_string(),
                fmt_count(e.n_k),
                lambda.to_string(),
                fmt_f64(e.r[slot]),
                fmt_f64(e.r_stderr[slot]),
                fmt_f64(e.s[slot]),
                fmt_f64(e.s_stderr[slot]),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Reads a table written by [`gk_table_csv`]. N_S is taken as Σ n_k.
pub fn parse_gk_table(
    text: &str,
    dist: &ImportanceDistribution,
    filter: FilterKind,
    tau: f64,
) -> Result<AggregatedSamples> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != GK_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header {}", GK_HEADER.join(",")),
        });
    }
    let mut by_k: BTreeMap<u64, (f64, Vec<(usize, [f64; 4])>)> = BTreeMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let line = i + 2;
        let num = |j: usize| -> Result<f64> {
            row[j].trim().parse::<f64>().map_err(|e| Error::Parse {
                line,
                msg: format!("column {}: {e}", GK_HEADER[j]),
            })
        };
        let k: u64 = row[0].trim().parse().map_err(|e| Error::Parse {
            line,
            msg: format!("k: {e}"),
        })?;
        let lambda: usize = row[2].trim().parse().map_err(|e| Error::Parse {
            line,
            msg: format!("lambda: {e}"),
        })?;
        let n_k = num(1)?;
        let vals = [num(3)?, num(4)?, num(5)?, num(6)?];
        let entry = by_k.entry(k).or_insert((n_k, Vec::new()));
        entry.1.push((lambda, vals));
    }
    if by_k.is_empty() {
        return Err(Error::InsufficientData("g_k table has no rows".into()));
    }
    let lambdas: Vec<usize> = by_k.values().next().unwrap().1.iter().map(|p| p.0).collect();
    let mut entries = Vec::with_capacity(by_k.len());
    for (k, (n_k, rows)) in by_k {
        if rows.iter().map(|p| p.0).collect::<Vec<_>>() != lambdas {
            return Err(Error::InvalidArgument(format!("k = {k} has a different set of lambda rows")));
        }
        let idx = dist
            .index_of(k)
            .ok_or_else(|| Error::InvalidArgument(format!("k = {k} is outside the filter support")))?;
        entries.push(KAggregate {
            k,
            n_k,
            sign: dist.signs[idx],
            r: rows.iter().map(|p| p.1[0]).collect(),
            r_stderr: rows.iter().map(|p| p.1[1]).collect(),
            s: rows.iter().map(|p| p.1[2]).collect(),
            s_stderr: rows.iter().map(|p| p.1[3]).collect(),
        });
    }
    if lambdas.iter().filter(|&&l| l == 0).count() > 0 && lambdas.last() != Some(&0) {
        return Err(Error::InvalidArgument("the lambda = 0 row must come last for each k".into()));
    }
    let n_samples = entries.iter().map(|e| e.n_k).sum();
    Ok(AggregatedSamples {
        filter,
        tau,
        normalization: dist.normalization,
        n_samples,
        lambdas,
        entries,
        zne_fallbacks: 0,
    })
}

pub fn cdf_trace_csv(trace: &CdfTrace) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "value", "derivative"]).map_err(csv_err)?;
    for (i, x) in trace.x.iter().enumerate() {
        let d = trace.derivative.as_ref().map_or(String::new(), |d| fmt_f64(d[i]));
        w.write_record([fmt_f64(*x), fmt_f64(trace.values[i]), d]).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::{Filter, SampleRecord};
    use crate::fourier::{cdf_importance, wan_coefficients};
    use crate::mitigation::zne::ZneOptions;

    #[test]
    fn round_trip() {
        let spec = wan_coefficients(50.0, 30).unwrap();
        let dist = cdf_importance(&spec);
        let kind = Filter::Cdf(spec).kind();
        let recs: Vec<SampleRecord> = [1u64, 3, 3, 9]
            .iter()
            .enumerate()
            .map(|(i, &k)| SampleRecord {
                k,
                twirl_seed: None,
                r: vec![0.9 - 0.1 * i as f64, 0.7 - 0.1 * i as f64, 0.6 - 0.1 * i as f64],
                s: vec![0.1 / 3.0, 0.05, 0.04],
                shots_per_basis: 100,
            })
            .collect();
        let agg = AggregatedSamples::from_records(&recs, &dist, kind, 2.5, &[1, 3, 5], &ZneOptions::default()).unwrap();
        let text = gk_table_csv(&agg).unwrap();
        assert!(text.starts_with("k,n_k,lambda,r_mean,r_stderr,s_mean,s_stderr\n"));
        assert_eq!(text.lines().count(), 1 + 3 * 4);
        let back = parse_gk_table(&text, &dist, kind, 2.5).unwrap();
        assert_eq!(back.entries, agg.entries);
        assert_eq!(back.lambdas, agg.lambdas);
        assert_eq!(back.n_samples, 4.0);
    }

    #[test]
    fn empty_and_bad_tables() {
        let spec = wan_coefficients(50.0, 30).unwrap();
        let dist = cdf_importance(&spec);
        let kind = Filter::Cdf(spec).kind();
        let empty = GK_HEADER.join(",") + "\n";
        assert!(matches!(parse_gk_table(&empty, &dist, kind, 1.0), Err(Error::InsufficientData(_))));
        let bad = empty.clone() + "1,2,1,abc,0,0,0\n";
        assert!(matches!(parse_gk_table(&bad, &dist, kind, 1.0), Err(Error::Parse { line: 2, .. })));
        assert!(parse_gk_table("a,b\n", &dist, kind, 1.0).is_err());
    }

    #[test]
    fn trace_csv() {
        let t = CdfTrace {
            x: vec![0.0, 0.5],
            values: vec![0.25, 0.75],
            derivative: None,
        };
        let s = cdf_trace_csv(&t).unwrap();
        assert_eq!(s.lines().nth(1).unwrap(), "0.0000000000000000e0,2.5000000000000000e-1,");
    }
}
