use std::io::Write;
use std::time::Instant;

use super::{fmt_f64, run_ordered, CsvOut, RunConfig, Summary};
use crate::certify::{build_instance, delta_sdp_with};
use crate::error::{Error, Result};
use crate::sampling::{normal_matrix, rng_from_seed};
use crate::sdp::{SdpStatus, SolverOptions};

#[derive(Debug, Clone)]
pub struct SampleOptions {
    pub n: usize,
    pub r: usize,
    pub kappa: f64,
    pub samples: usize,
    pub seed: u64,
    pub jobs: usize,
    pub solver: SolverOptions,
}

impl SampleOptions {
    pub fn config(&self) -> RunConfig {
        RunConfig::new("sample")
            .with("n", self.n)
            .with("r", self.r)
            .with("kappa", self.kappa)
            .with("samples", self.samples)
            .with("seed", self.seed)
            .with("jobs", self.jobs)
            .with("feas_tol", self.solver.feas_tol)
            .with("gap_tol", self.solver.gap_tol)
            .with("max_iter", self.solver.max_iter)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub r: usize,
    pub kappa: f64,
    /// None when the sample failed before a solve
    pub delta: Option<f64>,
    pub lower_bound: Option<f64>,
    pub status: String,
    pub iterations: usize,
    pub wall_ms: f64,
}

impl SampleRecord {
    pub fn optimal(&self) -> bool {
        self.status == SdpStatus::Optimal.as_str() && self.delta.is_some()
    }
}

pub const SAMPLE_COLUMNS: [&str; 10] = [
    "index",
    "seed",
    "n",
    "r",
    "kappa",
    "delta",
    "lower_bound",
    "status",
    "iterations",
    "wall_ms",
];

/// One δ(X, Z; κ) solve with X, Z drawn i.i.d. standard normal from the
/// generator seeded with `seed`.
pub fn sample_row(index: usize, seed: u64, n: usize, r: usize, kappa: f64, solver: &SolverOptions) -> SampleRecord {
    let t0 = Instant::now();
    let mut rng = rng_from_seed(seed);
    let x = normal_matrix(&mut rng, n, r);
    let z = normal_matrix(&mut rng, n, r);
    let outcome = build_instance(&x, &z, kappa).and_then(|inst| delta_sdp_with(&inst, solver));
    let (delta, lower_bound, status, iterations) = match outcome {
        Ok(res) => (Some(res.delta), res.analytic_lower_bound, res.status.as_str().to_string(), res.iterations),
        Err(e) => (None, None, format!("error: {}", e.to_string().replace(',', ";")), 0),
    };
    SampleRecord {
        index,
        seed,
        n,
        r,
        kappa,
        delta,
        lower_bound,
        status,
        iterations,
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
    }
}

fn fields(rec: &SampleRecord) -> Vec<String> {
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    vec![
        rec.index.to_string(),
        rec.seed.to_string(),
        rec.n.to_string(),
        rec.r.to_string(),
        fmt_f64(rec.kappa),
        opt(rec.delta),
        opt(rec.lower_bound),
        rec.status.clone(),
        rec.iterations.to_string(),
        format!("{:.3}", rec.wall_ms),
    ]
}

/// Writes one row per sample in index order, then summary comment lines over
/// the optimal samples. Non-optimal samples stay in the body but are
/// excluded from the summary and counted.
pub fn run_sample<W: Write>(opts: &SampleOptions, out: W) -> Result<(Vec<SampleRecord>, Summary)> {
    if opts.n == 0 || opts.r == 0 {
        return Err(Error::Range("n and r must be positive".into()));
    }
    if !(opts.kappa >= 0.0) {
        return Err(Error::Range(format!("kappa must be nonnegative, got {}", opts.kappa)));
    }
    let mut csv = CsvOut::new(out, &opts.config(), &SAMPLE_COLUMNS)?;
    let mut records = Vec::with_capacity(opts.samples);
    run_ordered(
        opts.samples,
        opts.jobs,
        |i| sample_row(i, opts.seed.wrapping_add(i as u64), opts.n, opts.r, opts.kappa, &opts.solver),
        |_, rec| {
            csv.row(&fields(&rec))?;
            records.push(rec);
            Ok(())
        },
    )?;
    let good: Vec<f64> = records.iter().filter(|r| r.optimal()).filter_map(|r| r.delta).collect();
    let summary = Summary::of(&good, records.len() - good.len());
    for line in summary.lines("delta") {
        csv.comment(&line)?;
    }
    Ok((records, summary))
}
