use std::io::Write;

use super::{fmt_f64, run_ordered, CsvOut, RunConfig, Summary};
use crate::certify::EPSILON_MAX;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::onebit::{certified_radius, lambda_r, local_constants};
use crate::sampling::{normal_matrix_sd, rng_from_seed};

#[derive(Debug, Clone)]
pub struct RadiusOptions {
    pub n: usize,
    pub r: usize,
    pub samples: usize,
    pub seed: u64,
    pub sigma: f64,
    pub jobs: usize,
    /// a fixed ground truth; replaces sampling with a single row
    pub mstar: Option<DenseMatrix>,
}

impl RadiusOptions {
    pub fn config(&self) -> RunConfig {
        let c = RunConfig::new("radius")
            .with("n", self.n)
            .with("r", self.r)
            .with("samples", self.samples)
            .with("seed", self.seed)
            .with("sigma", self.sigma)
            .with("jobs", self.jobs);
        match &self.mstar {
            Some(m) => c.with("mstar", format!("fixed {}x{}", m.rows(), m.cols())),
            None => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusRecord {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub r: usize,
    pub lambda_r: f64,
    pub radius: f64,
    pub delta: f64,
    /// "ok", or "rank-deficient" when λ_r vanishes (radius recorded as 0)
    pub flag: String,
}

pub const RADIUS_COLUMNS: [&str; 8] = ["index", "seed", "n", "r", "lambda_r", "radius", "delta", "flag"];

/// The certified radius for one ground truth.
pub fn radius_row(index: usize, seed: u64, r: usize, mstar: &DenseMatrix) -> Result<RadiusRecord> {
    let lr = lambda_r(mstar, r);
    let (radius, delta, flag) = match certified_radius(mstar, r) {
        Ok(c) => (c.radius, c.delta, "ok".to_string()),
        Err(Error::RankDeficient(_)) => (0.0, local_constants(mstar, 0.0, r)?.delta, "rank-deficient".to_string()),
        Err(e) => return Err(e),
    };
    debug_assert!(radius <= EPSILON_MAX * lr + 1e-12);
    Ok(RadiusRecord {
        index,
        seed,
        n: mstar.rows(),
        r,
        lambda_r: lr,
        radius,
        delta,
        flag,
    })
}

fn sampled_mstar(seed: u64, n: usize, r: usize, sigma: f64) -> DenseMatrix {
    let mut rng = rng_from_seed(seed);
    let z = normal_matrix_sd(&mut rng, n, r, sigma);
    z.matmul(&z.transpose())
}

fn fields(rec: &RadiusRecord) -> Vec<String> {
    vec![
        rec.index.to_string(),
        rec.seed.to_string(),
        rec.n.to_string(),
        rec.r.to_string(),
        fmt_f64(rec.lambda_r),
        fmt_f64(rec.radius),
        fmt_f64(rec.delta),
        rec.flag.clone(),
    ]
}

/// M* = ZZᵀ with Z entries i.i.d. N(0, σ²), one row per sample; or a single
/// row for a fixed M*.
pub fn run_radius<W: Write>(opts: &RadiusOptions, out: W) -> Result<(Vec<RadiusRecord>, Summary)> {
    if opts.r == 0 {
        return Err(Error::Range("r must be positive".into()));
    }
    if !(opts.sigma > 0.0 && opts.sigma.is_finite()) {
        return Err(Error::Range(format!("sigma must be positive, got {}", opts.sigma)));
    }
    let mut csv = CsvOut::new(out, &opts.config(), &RADIUS_COLUMNS)?;
    let mut records = Vec::new();
    if let Some(m) = &opts.mstar {
        let rec = radius_row(0, opts.seed, opts.r, m)?;
        csv.row(&fields(&rec))?;
        records.push(rec);
    } else {
        if opts.n == 0 {
            return Err(Error::Range("n must be positive".into()));
        }
        run_ordered(
            opts.samples,
            opts.jobs,
            |i| {
                let seed = opts.seed.wrapping_add(i as u64);
                radius_row(i, seed, opts.r, &sampled_mstar(seed, opts.n, opts.r, opts.sigma))
            },
            |_, rec| {
                let rec = rec?;
                csv.row(&fields(&rec))?;
                records.push(rec);
                Ok(())
            },
        )?;
    }
    let good: Vec<f64> = records.iter().filter(|r| r.flag == "ok").map(|r| r.radius).collect();
    let summary = Summary::of(&good, records.len() - good.len());
    for line in summary.lines("radius") {
        csv.comment(&line)?;
    }
    Ok((records, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_mstar_single_row() {
        let opts = RadiusOptions {
            n: 4,
            r: 2,
            samples: 10,
            seed: 0,
            sigma: 0.1,
            jobs: 1,
            mstar: Some(DenseMatrix::from_diag(&[2.0, 2.0, 0.0, 0.0])),
        };
        let (recs, _) = run_radius(&opts, Vec::new()).unwrap();
        assert_eq!(recs.len(), 1);
        assert!((1.13..=1.15).contains(&recs[0].radius));
    }

    #[test]
    fn sampled_body_is_reproducible() {
        let opts = RadiusOptions {
            n: 6,
            r: 2,
            samples: 5,
            seed: 3,
            sigma: 0.1,
            jobs: 1,
            mstar: None,
        };
        let body = |o: &RadiusOptions| {
            let mut buf = Vec::new();
            let (recs, _) = run_radius(o, &mut buf).unwrap();
            let text = String::from_utf8(buf).unwrap();
            let rows: Vec<String> = text.lines().filter(|l| !l.starts_with('#')).map(String::from).collect();
            (recs, rows)
        };
        let (recs, a) = body(&opts);
        let (_, b) = body(&RadiusOptions { jobs: 2, ..opts.clone() });
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
        for r in &recs {
            assert!(r.radius >= 0.0 && r.radius <= EPSILON_MAX * r.lambda_r + 1e-12);
        }
    }
}
