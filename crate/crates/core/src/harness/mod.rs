//! Experiment plumbing shared by the CLI commands: run configuration
//! headers, ordered parallel execution, CSV rows and summary statistics.

mod certify;
mod example;
mod radius;
mod sample;

pub use certify::{certify_pair, CertifyOptions, CertifyReport, Verdict, VERDICT_MARGIN};
pub use example::{run_example, ExampleOptions, ExampleReport};
pub use radius::{radius_row, run_radius, RadiusOptions, RadiusRecord, RADIUS_COLUMNS};
pub use sample::{run_sample, sample_row, SampleOptions, SampleRecord, SAMPLE_COLUMNS};

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sampling::RNG_NAME;

/// Command name plus its parameters in a fixed order, echoed as `# key=value`
/// lines at the top of every output file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub params: Vec<(String, String)>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            params: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn header_lines(&self) -> Vec<String> {
        let mut out = vec![format!("# command={}", self.command)];
        out.extend(self.params.iter().map(|(k, v)| format!("# {k}={v}")));
        out.push(format!("# rng={RNG_NAME}"));
        out.push(format!("# version={}", env!("CARGO_PKG_VERSION")));
        out
    }
}

/// Runs `task(i)` for i in 0..count on `jobs` threads and hands the results
/// to `sink` strictly in index order, one chunk at a time.
pub fn run_ordered<T, F, S>(count: usize, jobs: usize, task: F, mut sink: S) -> Result<()>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
    S: FnMut(usize, T) -> Result<()>,
{
    let jobs = jobs.max(1);
    if jobs == 1 {
        for i in 0..count {
            sink(i, task(i))?;
        }
        return Ok(());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    let chunk = 4 * jobs;
    let mut start = 0;
    while start < count {
        let end = (start + chunk).min(count);
        let results: Vec<T> = pool.install(|| (start..end).into_par_iter().map(&task).collect());
        for (off, r) in results.into_iter().enumerate() {
            sink(start + off, r)?;
        }
        start = end;
    }
    Ok(())
}

/// A CSV writer that flushes after every row so an interrupted run leaves a
/// parseable prefix.
pub struct CsvOut<W: Write> {
    inner: W,
}

impl<W: Write> CsvOut<W> {
    pub fn new(mut inner: W, config: &RunConfig, columns: &[&str]) -> Result<Self> {
        for line in config.header_lines() {
            writeln!(inner, "{line}")?;
        }
        writeln!(inner, "{}", columns.join(","))?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        writeln!(self.inner, "{}", fields.join(","))?;
        self.inner.flush()?;
        Ok(())
    }

    pub fn comment(&mut self, text: &str) -> Result<()> {
        writeln!(self.inner, "# {text}")?;
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.inner
    }
}

/// Formats a float with enough digits to round-trip.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:e}")
    }
}

pub const SUMMARY_QUANTILES: [f64; 7] = [0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub excluded: usize,
    pub min: f64,
    pub mean: f64,
    /// (p, value) pairs of the empirical distribution
    pub quantiles: Vec<(f64, f64)>,
}

impl Summary {
    /// Statistics of `values`; `excluded` counts samples left out upstream.
    pub fn of(values: &[f64], excluded: usize) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let count = v.len();
        let quantiles = SUMMARY_QUANTILES
            .iter()
            .map(|&p| (p, ecdf_quantile(&v, p)))
            .collect();
        Self {
            count,
            excluded,
            min: v.first().copied().unwrap_or(f64::NAN),
            mean: if count == 0 { f64::NAN } else { v.iter().sum::<f64>() / count as f64 },
            quantiles,
        }
    }

    pub fn lines(&self, what: &str) -> Vec<String> {
        let mut out = vec![
            format!("summary.{what}.count={}", self.count),
            format!("summary.{what}.excluded={}", self.excluded),
            format!("summary.{what}.min={}", fmt_f64(self.min)),
            format!("summary.{what}.mean={}", fmt_f64(self.mean)),
        ];
        for (p, q) in &self.quantiles {
            out.push(format!("summary.{what}.q{:02}={}", (p * 100.0).round() as u32, fmt_f64(*q)));
        }
        out
    }
}

/// The smallest sample value v with ECDF(v) ≥ p (the minimum for p = 0).
fn ecdf_quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let k = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[k - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_results_independent_of_jobs() {
        let collect = |jobs| {
            let mut out = Vec::new();
            run_ordered(37, jobs, |i| i * i, |i, v| {
                out.push((i, v));
                Ok(())
            })
            .unwrap();
            out
        };
        let a = collect(1);
        assert_eq!(a, collect(3));
        assert!(a.iter().enumerate().all(|(k, (i, _))| k == *i));
    }

    #[test]
    fn summary_quantiles() {
        let s = Summary::of(&[3.0, 1.0, 2.0, 4.0], 1);
        assert_eq!(s.min, 1.0);
        assert_eq!(s.mean, 2.5);
        assert_eq!(s.quantiles[3], (0.5, 2.0));
        assert_eq!(s.quantiles[6], (1.0, 4.0));
        assert_eq!(s.excluded, 1);
    }

    #[test]
    fn header_has_key_values() {
        let c = RunConfig::new("sample").with("n", 5).with("seed", 7);
        let h = c.header_lines();
        assert_eq!(h[0], "# command=sample");
        assert!(h.contains(&"# n=5".to_string()));
        assert!(h.iter().any(|l| l.starts_with("# rng=")));
    }
}
