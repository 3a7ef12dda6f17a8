//! Benchmark harness: timings and multiplication counts per engine, as CSV.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{PrimeField, DEFAULT_PRIME};
use crate::opcount;
use crate::oracle::{random_instance_in, Engine, ProblemInstance, QMode};

/// One CSV row. Column order is fixed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub algo: &'static str,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "N")]
    pub n_prec: usize,
    pub q_is_one: bool,
    pub p: u64,
    pub seed: u64,
    pub ms: f64,
    pub mul_count: u64,
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub ns: Vec<usize>,
    pub precisions: Vec<usize>,
    pub k: usize,
    pub q_mode: QMode,
    pub algos: Vec<Engine>,
    pub seed: u64,
    pub reps: usize,
    pub p: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            ns: vec![1],
            precisions: vec![64],
            k: 1,
            q_mode: QMode::Random,
            algos: Engine::ALL.to_vec(),
            seed: 0,
            reps: 1,
            p: DEFAULT_PRIME,
        }
    }
}

/// Solves `inst` with `algo` `reps` times; returns the median wall time in
/// milliseconds and the multiplication count of the first run.
pub fn time_solve(algo: Engine, inst: &ProblemInstance, reps: usize) -> Result<(f64, u64)> {
    let mut times = Vec::with_capacity(reps.max(1));
    let mut muls = 0;
    for r in 0..reps.max(1) {
        let start = Instant::now();
        let (out, m) = opcount::measure(|| algo.solve(inst));
        times.push(start.elapsed().as_secs_f64() * 1e3);
        out?;
        if r == 0 {
            muls = m;
        }
    }
    Ok((median(&mut times), muls))
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// One record per `(algo, n, N)`, all engines on the same good-spectrum
/// instance for a given `(n, N)`.
pub fn run(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    let field = PrimeField::new(cfg.p)?;
    let mut out = Vec::new();
    for &n in &cfg.ns {
        for &big_n in &cfg.precisions {
            let inst = random_instance_in(field, cfg.seed, n, big_n, cfg.k, cfg.q_mode, true)?;
            for &algo in &cfg.algos {
                let (ms, mul_count) = time_solve(algo, &inst, cfg.reps)?;
                out.push(BenchRecord {
                    algo: algo.name(),
                    n,
                    k: inst.k(),
                    n_prec: inst.n_prec(),
                    q_is_one: inst.ctx().q_is_one(),
                    p: cfg.p,
                    seed: cfg.seed,
                    ms,
                    mul_count,
                });
            }
        }
    }
    Ok(out)
}

pub fn write_csv<W: Write>(records: &[BenchRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    if records.is_empty() {
        wr.write_record(["algo", "n", "k", "N", "q_is_one", "p", "seed", "ms", "mul_count"]).map_err(io_err)?;
    }
    for r in records {
        wr.serialize(r).map_err(io_err)?;
    }
    wr.flush().map_err(|e| Error::Io(e.to_string()))
}

fn io_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoke_csv() {
        let cfg = BenchConfig { ns: vec![2], precisions: vec![8], ..Default::default() };
        let recs = run(&cfg).unwrap();
        assert_eq!(recs.len(), 3);
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "algo,n,k,N,q_is_one,p,seed,ms,mul_count");
        assert_eq!(lines.len(), 4);
        for (l, algo) in lines[1..].iter().zip(["dense", "dac", "newton"]) {
            let cols: Vec<&str> = l.split(',').collect();
            assert_eq!(cols.len(), 9);
            assert_eq!(cols[0], algo);
            assert_eq!(&cols[1..7], &["2", "1", "8", "false", "268435399", "0"]);
            assert!(cols[7].parse::<f64>().unwrap() >= 0.0);
            assert!(cols[8].parse::<u64>().unwrap() > 0);
        }
    }

    #[test]
    fn median_of_reps() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0]), 2.5);
    }

    #[test]
    fn slope_of_power_laws() {
        let pts: Vec<(f64, f64)> = (4..10).map(|e| (f64::from(1 << e), 3.0 * f64::from(1 << e).powi(2))).collect();
        assert!((loglog_slope(&pts) - 2.0).abs() < 1e-12);
    }
}
