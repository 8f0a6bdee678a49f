use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use randtree::bench::{
    loglog_slope, time_generation, write_bench_csv, REFERENCE_NODES_PER_SEC,
    REGRESSION_NODES_PER_SEC,
};
use randtree::oracle::{enumerate_shapes, verify_cycle_lemma, MAX_CYCLE_LEMMA_N, MAX_ENUMERATE_N};
use randtree::prng::TrialSeeds;
use randtree::stats::{chi_square_uniform_with, sample_depth_values, Alpha, DepthSummary, Sampler};
use randtree::tree::{internal_count, write_opcodes};
use randtree::{random_tree_with, to_dot, to_sexpr, Error, GenOptions, PrimitiveSet};

use crate::args::*;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_FAIL: u8 = 2;
pub const EXIT_IO: u8 = 3;

/// Slope window for `bench --check-slope`.
pub const SLOPE_RANGE: (f64, f64) = (0.85, 1.2);

const DEFAULT_MAX_BYTES: u64 = 2 << 30;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    /// Request refused before allocating, over `RBT_MAX_BYTES`.
    Limit(String),
    Run(Error),
    Io(io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Run(Error::Io(_)) | Failure::Io(_) => EXIT_IO,
            Failure::Run(_) | Failure::Limit(_) => EXIT_FAIL,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Limit(m) => write!(f, "{m}"),
            Failure::Run(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "IoError: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<u8, Failure>;

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Gen(a) => run_gen(a),
        Command::Enumerate(a) => run_enumerate(a),
        Command::Validate(a) => run_validate(a),
        Command::StatsDepth(a) => run_stats_depth(a),
        Command::StatsUniform(a) => run_stats_uniform(a),
        Command::Bench(a) => run_bench(a),
    }
}

/// Allocation ceiling from `RBT_MAX_BYTES`, default 2 GiB.
fn max_bytes() -> Result<u64, Failure> {
    match std::env::var("RBT_MAX_BYTES") {
        Ok(v) => {
            crate::args::parse_count(&v).map_err(|e| Failure::Usage(format!("RBT_MAX_BYTES: {e}")))
        }
        Err(_) => Ok(DEFAULT_MAX_BYTES),
    }
}

fn check_size(size: u64) -> Result<(), Failure> {
    internal_count(size).map_err(|e| Failure::Usage(e.to_string()))?;
    let cap = max_bytes()?;
    if size > cap {
        return Err(Failure::Limit(format!(
            "AllocationError: a {size}-node tree needs {size} bytes, above RBT_MAX_BYTES = {cap}"
        )));
    }
    Ok(())
}

fn load_prims(a: &PrimArgs) -> Result<Arc<PrimitiveSet>, Failure> {
    let set = match (&a.prims, &a.terminals, &a.functions) {
        (Some(path), _, _) => {
            let text = std::fs::read_to_string(path)?;
            PrimitiveSet::parse(&text)
        }
        (None, Some(t), Some(f)) => PrimitiveSet::new(t.clone(), f.clone()),
        _ => Ok(PrimitiveSet::default_set()),
    };
    set.map(Arc::new).map_err(|e| Failure::Usage(e.to_string()))
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn run_gen(a: GenArgs) -> Outcome {
    let size = match (a.size, a.internal) {
        (Some(s), None) => s,
        (None, Some(n)) => n
            .checked_mul(2)
            .and_then(|v| v.checked_add(1))
            .ok_or_else(|| Failure::Usage(format!("--internal {n} is too large")))?,
        _ => {
            return Err(Failure::Usage(
                "give exactly one of --size / --internal".into(),
            ))
        }
    };
    check_size(size)?;
    let prims = load_prims(&a.prims)?;
    let opts = GenOptions {
        check_wellformed: !a.no_check,
        fuse_passes: a.fuse,
    };
    let tree = random_tree_with(size, &prims, a.seed, opts)?;
    let mut out = open_out(a.out.as_deref())?;
    match a.format {
        Format::Sexpr => writeln!(out, "{}", to_sexpr(&tree))?,
        Format::Dot => write!(out, "{}", to_dot(&tree, a.dot_limit)?)?,
        Format::Summary => writeln!(out, "{} {} {}", tree.size(), tree.depth(), tree.seed())?,
        Format::Opcodes => write_opcodes(&tree, &mut out)?,
    }
    out.flush()?;
    Ok(EXIT_OK)
}

pub fn run_enumerate(a: EnumerateArgs) -> Outcome {
    if a.n > MAX_ENUMERATE_N {
        return Err(Failure::Usage(format!(
            "--n {} out of range, enumeration supports n <= {MAX_ENUMERATE_N}",
            a.n
        )));
    }
    let shapes = enumerate_shapes(a.n)?;
    let mut out = open_out(None)?;
    for s in &shapes {
        writeln!(out, "{s}")?;
    }
    writeln!(out, "count {}", shapes.len())?;
    out.flush()?;
    Ok(EXIT_OK)
}

pub fn run_validate(a: ValidateArgs) -> Outcome {
    if a.max_n > MAX_CYCLE_LEMMA_N {
        return Err(Failure::Usage(format!(
            "--max-n {} out of range, exhaustive check supports n <= {MAX_CYCLE_LEMMA_N}",
            a.max_n
        )));
    }
    let mut out = open_out(None)?;
    writeln!(
        out,
        "{:>2} {:>12} {:>7} {:>6}  result",
        "n", "arrangements", "shapes", "fiber"
    )?;
    let mut all_pass = true;
    for n in 1..=a.max_n {
        let r = verify_cycle_lemma(n)?;
        let fiber = r.fiber_size.map_or("-".to_string(), |f| f.to_string());
        writeln!(
            out,
            "{:>2} {:>12} {:>7} {:>6}  {}",
            n,
            r.arrangements,
            r.shapes,
            fiber,
            if r.pass { "PASS" } else { "FAIL" }
        )?;
        for d in &r.diagnostics {
            writeln!(out, "   {d}")?;
        }
        all_pass &= r.pass;
    }
    out.flush()?;
    Ok(if all_pass { EXIT_OK } else { EXIT_FAIL })
}

pub fn run_stats_depth(a: StatsDepthArgs) -> Outcome {
    check_size(a.size)?;
    if a.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let depths = sample_depth_values(a.size, a.trials, a.seed)?;
    if let Some(path) = &a.csv {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "trial,size,depth")?;
        for (i, d) in depths.iter().enumerate() {
            writeln!(w, "{i},{},{d}", a.size)?;
        }
        w.flush()?;
    }
    let s = DepthSummary::<f64>::from_depths(a.size, &depths)?;
    let mut out = open_out(None)?;
    writeln!(out, "size,trials,mean,std,predicted,rel_err")?;
    writeln!(
        out,
        "{},{},{:.4},{:.4},{:.4},{:.6}",
        s.size, s.trials, s.mean, s.std, s.predicted, s.rel_err
    )?;
    out.flush()?;
    match a.tolerance {
        Some(tol) if s.rel_err > tol => {
            eprintln!("relative error {:.4} exceeds tolerance {tol}", s.rel_err);
            Ok(EXIT_FAIL)
        }
        _ => Ok(EXIT_OK),
    }
}

pub fn run_stats_uniform(a: StatsUniformArgs) -> Outcome {
    let alpha = Alpha::try_from(a.alpha).map_err(|e| Failure::Usage(e.to_string()))?;
    let sampler = if a.control {
        Sampler::NoRotation
    } else {
        Sampler::CycleLemma
    };
    let seeds: Vec<u64> = match a.sweep {
        None => vec![a.seed],
        Some(0) => return Err(Failure::Usage("--sweep must be at least 1".into())),
        Some(k) => {
            let plan = TrialSeeds::new(a.seed, k).map_err(|e| Failure::Usage(e.to_string()))?;
            (0..k).map(|i| plan.seed(i)).collect::<Result<_, _>>()?
        }
    };
    let mut out = open_out(None)?;
    let mut failures = 0;
    for seed in &seeds {
        let r =
            chi_square_uniform_with::<f64>(a.n, a.trials, *seed, alpha, sampler).map_err(|e| {
                match e {
                    Error::Domain(_) | Error::TooFewTrials { .. } => Failure::Usage(e.to_string()),
                    other => Failure::Run(other),
                }
            })?;
        writeln!(
            out,
            "n={} trials={} seed={} statistic={:.3} dof={} critical={:.3} alpha={} invalid={} {}",
            r.n,
            r.trials,
            seed,
            r.statistic,
            r.dof,
            r.critical,
            alpha.value(),
            r.invalid,
            if r.pass { "PASS" } else { "FAIL" }
        )?;
        if !r.pass {
            failures += 1;
        }
    }
    if seeds.len() > 1 {
        writeln!(
            out,
            "sweep: {failures} of {} failed (about {:.2} expected by chance)",
            seeds.len(),
            seeds.len() as f64 * alpha.value()
        )?;
    }
    out.flush()?;
    Ok(if failures == 0 { EXIT_OK } else { EXIT_FAIL })
}

pub fn run_bench(a: BenchArgs) -> Outcome {
    for &s in &a.sizes {
        check_size(s)?;
        if s > a.max_size {
            return Err(Failure::Usage(format!(
                "size {s} exceeds --max-size {}",
                a.max_size
            )));
        }
    }
    if a.reps == 0 {
        return Err(Failure::Usage("--reps must be at least 1".into()));
    }
    let prims = load_prims(&a.prims)?;
    let records = time_generation::<f64>(&a.sizes, a.reps, &prims, a.seed)?;
    if let Some(path) = &a.csv {
        write_bench_csv(&records, BufWriter::new(File::create(path)?))?;
    }
    let mut out = open_out(None)?;
    writeln!(
        out,
        "{:>12} {:>5} {:>12} {:>14}",
        "size", "reps", "seconds", "nodes/sec"
    )?;
    for r in &records {
        writeln!(
            out,
            "{:>12} {:>5} {:>12.6} {:>14.0}",
            r.size, r.reps, r.seconds, r.nodes_per_sec
        )?;
    }
    if let Some(top) = records.iter().max_by_key(|r| r.size) {
        writeln!(
            out,
            "throughput at size {}: {:.2}M nodes/sec (reference: {:.0}M nodes/sec on a 3.60 GHz i7-4790)",
            top.size,
            top.nodes_per_sec / 1e6,
            REFERENCE_NODES_PER_SEC / 1e6
        )?;
        if top.nodes_per_sec < REGRESSION_NODES_PER_SEC {
            writeln!(
                out,
                "warning: below {:.0}M nodes/sec, likely a performance regression",
                REGRESSION_NODES_PER_SEC / 1e6
            )?;
        }
    }
    let mut code = EXIT_OK;
    match loglog_slope(&records) {
        Ok(slope) => {
            writeln!(out, "log-log slope: {slope:.4}")?;
            if a.check_slope && !(SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&slope) {
                writeln!(out, "slope outside [{}, {}]", SLOPE_RANGE.0, SLOPE_RANGE.1)?;
                code = EXIT_FAIL;
            }
        }
        Err(Error::TooFewPoints(k)) => {
            writeln!(out, "log-log slope: n/a ({k} distinct sizes, need 3)")?;
            if a.check_slope {
                code = EXIT_FAIL;
            }
        }
        Err(e) => return Err(e.into()),
    }
    out.flush()?;
    Ok(code)
}
