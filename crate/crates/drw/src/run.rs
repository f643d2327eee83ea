//! Timed solves and parallel batches.

use std::time::Instant;

use drw_core::solver::{replication_configs, BatchSummary, RunResult, Solver, SolverConfig};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const THREADS_ENV: &str = "DRW_THREADS";

/// `solve` with wall time filled in. With `log_every = Some(k)` the step
/// norm is written to stderr every `k` iterations.
pub fn timed_solve(config: &SolverConfig, log_every: Option<u64>) -> Result<RunResult> {
    let start = Instant::now();
    let solver = Solver::new(config.clone())?;
    let x0 = solver.initialize_seeded(config.seed);
    let mut run = match log_every {
        Some(k) if k > 0 => solver.solve_with(x0, |it, step| {
            if it % k == 0 {
                eprintln!("seed {} iteration {it}: step {step:.3e}", config.seed);
            }
            true
        })?,
        _ => solver.solve_from(x0)?,
    };
    run.wall_time = start.elapsed().as_secs_f64();
    Ok(run)
}

/// Worker count from `DRW_THREADS`, `None` when unset (all logical cores).
pub fn thread_count() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(Error::Usage(format!(
                "{THREADS_ENV} must be a positive integer (got {v:?})"
            ))),
        },
    }
}

/// Replications with seeds `seed, seed + 1, ..` run in parallel; results
/// keep seed order.
pub fn parallel_batch(
    config: &SolverConfig,
    replications: usize,
    threads: Option<usize>,
    log_every: Option<u64>,
) -> Result<BatchSummary> {
    if replications == 0 {
        return Err(Error::Usage("replications must be at least 1".into()));
    }
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Usage(e.to_string()))?;
    let configs = replication_configs(config, replications);
    let runs = pool.install(|| {
        configs
            .par_iter()
            .map(|c| timed_solve(c, log_every))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(BatchSummary::from_runs(runs))
}
