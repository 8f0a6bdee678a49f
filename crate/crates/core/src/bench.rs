//! Single-threaded timing of full tree generation.

use std::io::{BufRead, Write};
use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::prng::derive_trial_seed;
use crate::tree::{internal_count, random_tree_with, GenOptions, PrimitiveSet};
use crate::Real;

/// Nodes per second reported for the original C++ generator on one core
/// of a 3.60 GHz i7-4790.
pub const REFERENCE_NODES_PER_SEC: f64 = 18.0e6;
/// Below this rate a run is probably hitting a performance regression.
pub const REGRESSION_NODES_PER_SEC: f64 = 5.0e6;
/// Largest size timed unless the caller raises the ceiling.
pub const DEFAULT_MAX_SIZE: u64 = 200_000_001;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRecord<F> {
    pub size: u64,
    pub reps: u32,
    /// Median wall time of one generation.
    pub seconds: F,
    pub nodes_per_sec: F,
}

impl<F: Real> BenchRecord<F> {
    pub fn new(size: u64, reps: u32, seconds: F) -> Self {
        BenchRecord {
            size,
            reps,
            seconds,
            nodes_per_sec: F::from_u64(size).unwrap() / seconds,
        }
    }
}

fn median<F: Real>(mut xs: Vec<F>) -> F {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        (xs[mid - 1] + xs[mid]) / F::from_f64(2.0).unwrap()
    }
}

/// Times `random_tree` at each size: one untimed warm-up, then `reps`
/// timed runs with derived seeds. Well-formedness checks are off.
pub fn time_generation<F: Real>(
    sizes: &[u64],
    reps: u32,
    prims: &Arc<PrimitiveSet>,
    base_seed: u64,
) -> Result<Vec<BenchRecord<F>>> {
    if reps == 0 {
        return Err(Error::domain("at least one repetition is required"));
    }
    for &size in sizes {
        internal_count(size)?;
    }
    let opts = GenOptions::bench();
    let mut records = Vec::with_capacity(sizes.len());
    let mut trial = 0u64;
    for &size in sizes {
        let warm = random_tree_with(size, prims, derive_trial_seed(base_seed, trial)?, opts)?;
        drop(warm);
        trial += 1;
        let mut times = Vec::with_capacity(reps as usize);
        for _ in 0..reps {
            let seed = derive_trial_seed(base_seed, trial)?;
            trial += 1;
            let start = Instant::now();
            let tree = random_tree_with(size, prims, seed, opts)?;
            let elapsed = start.elapsed();
            std::hint::black_box(tree.depth());
            drop(tree);
            let secs = elapsed.as_secs_f64();
            if secs <= 0.0 {
                return Err(Error::Clock(format!(
                    "timer reported {secs} s for size {size}; clock resolution too coarse"
                )));
            }
            times.push(F::from_f64(secs).unwrap());
        }
        records.push(BenchRecord::new(size, reps, median(times)));
    }
    Ok(records)
}

/// Least-squares slope of `ln(seconds)` against `ln(size)`.
pub fn loglog_slope<F: Real>(records: &[BenchRecord<F>]) -> Result<F> {
    let mut sizes: Vec<u64> = records.iter().map(|r| r.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::TooFewPoints(sizes.len()));
    }
    let pts: Vec<(F, F)> = records
        .iter()
        .map(|r| (F::from_u64(r.size).unwrap().ln(), r.seconds.ln()))
        .collect();
    let n = F::from_usize(pts.len()).unwrap();
    let mx = pts.iter().fold(F::zero(), |a, p| a + p.0) / n;
    let my = pts.iter().fold(F::zero(), |a, p| a + p.1) / n;
    let (sxy, sxx) = pts
        .iter()
        .fold((F::zero(), F::zero()), |(sxy, sxx), &(x, y)| {
            (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
        });
    Ok(sxy / sxx)
}

pub const CSV_HEADER: &str = "size,reps,seconds,nodes_per_sec";

pub fn write_bench_csv<F: Real, W: Write>(records: &[BenchRecord<F>], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{}",
            r.size, r.reps, r.seconds, r.nodes_per_sec
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_bench_csv<F: Real, R: BufRead>(input: R) -> Result<Vec<BenchRecord<F>>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != CSV_HEADER {
        return Err(Error::Format(format!("expected header `{CSV_HEADER}`")));
    }
    let bad = |l: &str| Error::Format(format!("malformed bench row `{l}`"));
    let mut records = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad(&line));
        }
        records.push(BenchRecord {
            size: f[0].parse().map_err(|_| bad(&line))?,
            reps: f[1].parse().map_err(|_| bad(&line))?,
            seconds: f[2].parse().map_err(|_| bad(&line))?,
            nodes_per_sec: f[3].parse().map_err(|_| bad(&line))?,
        });
    }
    Ok(records)
}
