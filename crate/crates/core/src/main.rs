use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rankcert::harness::{
    certify_pair, run_example, run_radius, run_sample, CertifyOptions, ExampleOptions, RadiusOptions, SampleOptions,
};
use rankcert::matrix::read_matrix;
use rankcert::sdp::SolverOptions;

#[derive(Parser)]
#[command(name = "rankcert", version, about = "Certify spurious-minimum-free landscapes for low-rank matrix recovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// primal/dual feasibility tolerance of the SDP solver
    #[arg(long, default_value_t = 1e-8)]
    feas_tol: f64,
    /// relative duality gap tolerance of the SDP solver
    #[arg(long, default_value_t = 1e-8)]
    gap_tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            feas_tol: self.feas_tol,
            gap_tol: self.gap_tol,
            max_iter: self.max_iter,
            ..SolverOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve δ(X, Z; κ) for one pair and compare it with the thresholds
    Certify {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        z: PathBuf,
        #[arg(long)]
        kappa: f64,
        /// radius ε of the local region (relative to λ_r(ZZᵀ))
        #[arg(long)]
        epsilon: Option<f64>,
        /// RIP constant of the function under test (default: the SDP values)
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Monte-Carlo distribution of δ(X, Z; κ) over Gaussian pairs
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        kappa: f64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Certified radius around random 1-bit completion ground truths
    Radius {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        #[arg(long)]
        out: PathBuf,
        /// fixed ground truth M* instead of sampling
        #[arg(long)]
        mstar: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Build the tight counterexample and measure its RIP and BDP constants
    Example {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> rankcert::Result<u8> {
    match cli.command {
        Command::Certify {
            x,
            z,
            kappa,
            epsilon,
            delta,
            solver,
        } => {
            let x = read_matrix(&x)?;
            let z = read_matrix(&z)?;
            let opts = CertifyOptions {
                kappa,
                epsilon,
                delta,
                solver: solver.options(),
            };
            let rep = certify_pair(&x, &z, &opts)?;
            println!("{rep}");
            Ok(rep.verdict.exit_code() as u8)
        }
        Command::Sample {
            n,
            r,
            kappa,
            samples,
            seed,
            out,
            jobs,
            solver,
        } => {
            let opts = SampleOptions {
                n,
                r,
                kappa,
                samples,
                seed,
                jobs,
                solver: solver.options(),
            };
            let (_, summary) = run_sample(&opts, BufWriter::new(File::create(&out)?))?;
            for line in summary.lines("delta") {
                println!("{line}");
            }
            Ok(0)
        }
        Command::Radius {
            n,
            r,
            samples,
            seed,
            sigma,
            out,
            mstar,
            jobs,
        } => {
            let mstar = mstar.map(read_matrix).transpose()?;
            let opts = RadiusOptions {
                n,
                r,
                samples,
                seed,
                sigma,
                jobs,
                mstar,
            };
            let (_, summary) = run_radius(&opts, BufWriter::new(File::create(&out)?))?;
            for line in summary.lines("radius") {
                println!("{line}");
            }
            Ok(0)
        }
        Command::Example {
            n,
            r,
            mu,
            lambda,
            samples,
            seed,
        } => {
            let rep = run_example(&ExampleOptions {
                n,
                r,
                mu,
                lambda,
                samples,
                seed,
            })?;
            print!("{rep}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
