//! Replicated runs over an (alpha, beta) grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::engine::{run_simulation, RunReport};
use crate::error::{Error, Result};

/// Grid indices and replication numbers must each fit in 20 bits so that
/// the packed index fed to [`derive_seed`] is unique.
pub const MAX_INDEX: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub replications: usize,
    /// Every run uses this config with `alpha`, `beta` and `seed` replaced.
    pub base: SimConfig,
    pub master_seed: u64,
    /// Worker threads; 0 lets rayon decide. Has no effect on results.
    #[serde(skip)]
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub alpha: f64,
    pub beta: f64,
    pub replications: usize,
    pub win_rate: f64,
    pub degenerate_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub spec: SweepSpec,
    /// Alpha-major, in grid order.
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    pub fn cell(&self, alpha: f64, beta: f64) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.alpha == alpha && c.beta == beta)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one replication.
///
/// The indices are packed into 60 bits, xored with a scrambled master seed
/// and passed through the splitmix64 finalizer. Both steps are bijections on
/// `u64`, so distinct `(alpha_idx, beta_idx, rep)` never collide under one
/// master seed.
pub fn derive_seed(master_seed: u64, alpha_idx: usize, beta_idx: usize, rep: usize) -> u64 {
    debug_assert!(alpha_idx < MAX_INDEX && beta_idx < MAX_INDEX && rep < MAX_INDEX);
    let packed = ((alpha_idx as u64) << 40) | ((beta_idx as u64) << 20) | rep as u64;
    splitmix64(packed ^ splitmix64(master_seed))
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(Error::config("alphas", "grid is empty"));
        }
        if self.betas.is_empty() {
            return Err(Error::config("betas", "grid is empty"));
        }
        if self.replications == 0 {
            return Err(Error::config("replications", "need at least one"));
        }
        if self.alphas.len() >= MAX_INDEX || self.betas.len() >= MAX_INDEX || self.replications >= MAX_INDEX {
            return Err(Error::InvalidArgument(format!(
                "grid dimensions and replications must each be below {MAX_INDEX}"
            )));
        }
        for &a in &self.alphas {
            self.base_for(a, 0.0, 0).validate()?;
        }
        for &b in &self.betas {
            self.base_for(0.0, b, 0).validate()?;
        }
        Ok(())
    }

    fn base_for(&self, alpha: f64, beta: f64, seed: u64) -> SimConfig {
        SimConfig {
            alpha,
            beta,
            seed,
            ..self.base.clone()
        }
    }

    /// Config of replication `rep` in cell `(ai, bi)`.
    pub fn run_config(&self, ai: usize, bi: usize, rep: usize) -> SimConfig {
        self.base_for(
            self.alphas[ai],
            self.betas[bi],
            derive_seed(self.master_seed, ai, bi, rep),
        )
    }
}

/// Executes every replication of every cell. Work is spread over `spec.jobs`
/// threads but results are folded in index order, so the report does not
/// depend on the degree of parallelism.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    run_sweep_with(spec, |_, _, _, r| r)
}

/// Like [`run_sweep`], calling `inspect(ai, bi, rep, report)` on each
/// finished run (from worker threads) before it is tallied.
pub fn run_sweep_with<F>(spec: &SweepSpec, inspect: F) -> Result<SweepReport>
where
    F: Fn(usize, usize, usize, RunReport) -> RunReport + Sync,
{
    spec.validate()?;
    let (na, nb, reps) = (spec.alphas.len(), spec.betas.len(), spec.replications);
    let tasks: Vec<(usize, usize, usize)> = (0..na)
        .flat_map(|a| (0..nb).flat_map(move |b| (0..reps).map(move |r| (a, b, r))))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;

    // (complement won, degenerate) per task, in task order
    let outcomes: Vec<Result<(bool, bool)>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(a, b, r)| {
                let cfg = spec.run_config(a, b, r);
                let seed = cfg.seed;
                run_simulation(cfg)
                    .map(|report| {
                        let report = inspect(a, b, r, report);
                        (report.complement_wins(), report.is_degenerate())
                    })
                    .map_err(|e| Error::SweepRun {
                        alpha: spec.alphas[a],
                        beta: spec.betas[b],
                        replication: r,
                        seed,
                        source: Box::new(e),
                    })
            })
            .collect()
    });

    let mut cells = Vec::with_capacity(na * nb);
    let mut iter = outcomes.into_iter();
    for &alpha in &spec.alphas {
        for &beta in &spec.betas {
            let (mut wins, mut degenerate) = (0usize, 0usize);
            for outcome in iter.by_ref().take(reps) {
                let (won, degen) = outcome?;
                wins += won as usize;
                degenerate += degen as usize;
            }
            cells.push(SweepCell {
                alpha,
                beta,
                replications: reps,
                win_rate: wins as f64 / reps as f64,
                degenerate_runs: degenerate,
            });
        }
    }
    Ok(SweepReport {
        spec: spec.clone(),
        cells,
    })
}
