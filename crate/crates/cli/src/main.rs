use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use geopath_cli::commands::{
    cmd_batch, cmd_scaling, cmd_solve, cmd_verify, default_workers, routing_side, RunOptions, RunReport, Side,
};
use geopath_cli::manifest::{parse_dims, RawManifest, RunManifest};
use geopath_cli::output::RowOrder;
use geopath_core::oracle::{Suite, VerifyTarget};

/// Minimal-time paths on the graph of a function, solved per query point
/// without a spatial grid.
#[derive(Parser, Debug)]
#[command(name = "geopath", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one path per `start` line of the manifest.
    Solve(RunArgs),
    /// Solve `count` paths from random starts in the manifest box.
    Batch(RunArgs),
    /// Time the Gaussian-bump problem across dimensions.
    Scaling {
        #[command(flatten)]
        run: RunArgs,
        /// Dimensions, e.g. `10,20,30` or `10..30` or `10..30:5`.
        #[arg(long)]
        dims: Option<String>,
        /// Trials per dimension.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Check the closed-form formulas against brute-force oracles.
    Verify {
        /// Run only these suites (sphere, prox, gradients, identity, bound).
        #[arg(long = "suite")]
        suites: Vec<Suite>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Manifest file of `key = value` lines.
    manifest: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory (default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write trajectories in solver order (goal first).
    #[arg(long)]
    raw: bool,
}

impl RunArgs {
    fn load(&self) -> Result<(RunManifest, RunOptions)> {
        let mut raw = match &self.manifest {
            Some(path) => RawManifest::read(path)?,
            None => RawManifest::default(),
        };
        let overrides: [(&str, Option<String>); 8] = [
            ("dim", self.dim.map(|v| v.to_string())),
            ("dt", self.dt.map(|v| v.to_string())),
            ("horizon", self.horizon.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("tol", self.tol.map(|v| v.to_string())),
            ("max_iters", self.max_iters.map(|v| v.to_string())),
            ("tau", self.tau.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                raw.set(key, v);
            }
        }
        let manifest = RunManifest::from_raw(&raw)?;
        let opts = RunOptions {
            workers: self.workers.unwrap_or_else(default_workers),
            out: manifest.out.clone().unwrap_or_else(|| PathBuf::from("out")),
            order: if self.raw { RowOrder::Raw } else { RowOrder::Forward },
        };
        Ok((manifest, opts))
    }
}

fn print_run(report: &RunReport) {
    println!("path_id           u  iterations  converged   seconds");
    for p in &report.paths {
        let s = &p.solution;
        println!("{:>7} {:>11.6} {:>11} {:>10} {:>9.3}", p.id, s.value, s.iterations, s.converged, s.wall_time);
    }
    let converged = report.paths.iter().filter(|p| p.solution.converged).count();
    println!(
        "{converged}/{} converged; mean {:.0} iterations, mean {:.3} s per path",
        report.paths.len(),
        report.mean_iterations(),
        report.mean_seconds()
    );
    if report.paths.first().is_some_and(|p| p.spec.dim() == 2) {
        let left = report
            .paths
            .iter()
            .filter(|p| routing_side(&p.spec.start, &p.spec.goal, &p.solution.forward_states()) == Side::Left)
            .count();
        println!("routing: {left} left of the straight segment, {} right", report.paths.len() - left);
    }
    println!("summary written to {}", report.summary_file.display());
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve(args) => {
            let (manifest, opts) = args.load()?;
            let report = cmd_solve(&manifest, &opts)?;
            print_run(&report);
            Ok(report.all_converged())
        }
        Command::Batch(args) => {
            let (manifest, opts) = args.load()?;
            let report = cmd_batch(&manifest, &opts)?;
            print_run(&report);
            Ok(report.all_converged())
        }
        Command::Scaling { run, dims, trials } => {
            let (manifest, opts) = run.load()?;
            let dims = match dims {
                Some(s) => parse_dims(&s).map_err(anyhow::Error::msg)?,
                None => manifest.dims.clone().unwrap_or_else(|| (10..=30).collect()),
            };
            let trials = trials.or(manifest.trials).unwrap_or(10);
            let points = cmd_scaling(&manifest, &dims, trials, &opts)?;
            println!("dim    mean_s     std_s    mean_u  converged");
            for p in &points {
                println!(
                    "{:>3} {:>9.3} {:>9.3} {:>9.4} {:>6}/{}",
                    p.row.dim, p.row.mean_s, p.row.std_s, p.mean_value, p.converged, p.trials
                );
            }
            println!("table written to {}", opts.out.join("scaling.csv").display());
            Ok(points.iter().all(|p| p.converged == p.trials))
        }
        Command::Verify { suites, seed } => {
            let reports = cmd_verify(&suites, seed, &VerifyTarget::default());
            for r in &reports {
                println!("{r}");
            }
            Ok(reports.iter().all(|r| r.passed))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
