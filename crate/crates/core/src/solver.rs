//! Douglas–Rachford iteration on the product space of the `2^n + 1`
//! constraint sets, with the diagonal as the second set.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ensemble::{expand, ConsistentEnsemble, MatrixEnsemble};
use crate::error::{Error, Result};
use crate::filters::FilterBank;
use crate::fourier::idft;
use crate::projections::{constraint_sets, mean, project_c1_0, structure_residual, ConstraintSet};
use crate::verify::{self, VerificationReport, VerifyOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub eps_stop: f64,
    pub max_iter: u64,
    pub seed: u64,
    pub bownik_min: f64,
    pub bownik_grid: usize,
    /// Whether the flatness constraint includes the `α = 0` moment.
    pub include_zero_moment: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 1,
            m: 4,
            d: 1,
            eps_stop: 1e-3,
            max_iter: 1_000_000,
            seed: 0,
            bownik_min: verify::DEFAULT_BOWNIK_MIN,
            bownik_grid: verify::DEFAULT_BOWNIK_GRID,
            include_zero_moment: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 4 || !self.m.is_multiple_of(2) {
            return Err(Error::InvalidGridSize(self.m));
        }
        if !(1..=2).contains(&self.n) {
            return Err(Error::UnsupportedDimension(self.n));
        }
        if self.eps_stop.is_nan() || self.eps_stop <= 0.0 {
            return Err(Error::InvalidConfig(alloc::format!(
                "eps_stop must be positive (got {})",
                self.eps_stop
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if self.bownik_min.is_nan() || self.bownik_min <= 0.0 {
            return Err(Error::InvalidConfig("bownik_min must be positive".into()));
        }
        Ok(())
    }

    fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            d: self.d,
            grid_points: None,
            bownik_grid: self.bownik_grid,
            bownik_min: self.bownik_min,
        }
    }
}

/// A point `(x_1, .., x_m)` of the product space, one component per constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductPoint {
    pub components: Vec<ConsistentEnsemble>,
}

impl ProductPoint {
    pub fn replicate(x: ConsistentEnsemble, count: usize) -> Self {
        Self {
            components: alloc::vec![x; count],
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Real product-space distance.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch("product points of different length".into()));
        }
        let mut acc = 0.0;
        for (a, b) in self.components.iter().zip(&other.components) {
            let d = a.distance(b)?;
            acc += d * d;
        }
        Ok(libm::sqrt(acc))
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| {
            c.block()
                .data()
                .iter()
                .all(|z| z.re.is_finite() && z.im.is_finite())
        })
    }
}

/// Random block with entries uniform on `(−1, 1)`, drawn in the order block
/// index, row, column, real part, imaginary part.
pub fn random_block<R: RngCore>(n: usize, m: usize, rng: &mut R) -> Result<ConsistentEnsemble> {
    let block = MatrixEnsemble::from_fn(n, m / 2, |_, out| {
        for z in out {
            let re = rng.random_range(-1.0..1.0);
            let im = rng.random_range(-1.0..1.0);
            *z = Complex64::new(re, im);
        }
    });
    ConsistentEnsemble::new(m, block)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residuals {
    /// Largest `‖U^*U − I‖_F` over the full and half-shifted sample grids.
    pub unitarity: f64,
    /// Largest deviation of the coefficients from the `w_k` row structure.
    pub consistency: f64,
    /// Largest `|Σ_k k^α g^ε_k|` over the constrained moments.
    pub regularity: f64,
    /// Largest `‖U^*U − I‖_F` on the dense `4M` grid.
    pub qmf_grid: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub config: SolverConfig,
    pub converged: bool,
    pub iterations: u64,
    /// Seconds; filled in by callers that can read a clock.
    pub wall_time: f64,
    pub final_step_norm: f64,
    pub filters: FilterBank,
    pub solution: ConsistentEnsemble,
    pub residuals: Residuals,
    pub report: VerificationReport,
    pub bownik_pass: bool,
    pub bownik_min_abs: f64,
    pub separability: Option<f64>,
    pub seed: u64,
}

pub struct Solver {
    config: SolverConfig,
    sets: Vec<ConstraintSet>,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let sets = constraint_sets(config.n, config.m, config.d, config.include_zero_moment)?;
        Ok(Self { config, sets })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn constraints(&self) -> &[ConstraintSet] {
        &self.sets
    }

    /// Seeded random start: one block projected onto `C_1^(0)` and replicated.
    pub fn initialize<R: RngCore>(&self, rng: &mut R) -> ProductPoint {
        let raw = random_block(self.config.n, self.config.m, rng).expect("validated config");
        ProductPoint::replicate(project_c1_0(&raw), self.sets.len())
    }

    pub fn initialize_seeded(&self, seed: u64) -> ProductPoint {
        self.initialize(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// `x_i' = x_i + P_i(2p − x_i) − p` and `p' = mean(x')`; also returns
    /// `‖x' − x‖`.
    pub fn dr_step(
        &self,
        x: &ProductPoint,
        p: &ConsistentEnsemble,
    ) -> Result<(ProductPoint, ConsistentEnsemble, f64)> {
        if x.len() != self.sets.len() {
            return Err(Error::ShapeMismatch(alloc::format!(
                "product point has {} components, expected {}",
                x.len(),
                self.sets.len()
            )));
        }
        let mut next = Vec::with_capacity(x.len());
        let mut step = 0.0;
        for (xi, set) in x.components.iter().zip(&self.sets) {
            let reflected = p.lin_comb(2.0, xi, -1.0)?;
            let projected = set.project(&reflected)?;
            let new = xi.lin_comb(1.0, &projected.lin_comb(1.0, p, -1.0)?, 1.0)?;
            let d = new.distance(xi)?;
            step += d * d;
            next.push(new);
        }
        let p_next = mean(&next)?;
        Ok((ProductPoint { components: next }, p_next, libm::sqrt(step)))
    }

    pub fn solve(&self) -> Result<RunResult> {
        self.solve_from(self.initialize_seeded(self.config.seed))
    }

    /// Iterate from `x0` until `‖x_{k+1} − x_k‖ < eps_stop` or `max_iter`.
    pub fn solve_from(&self, x0: ProductPoint) -> Result<RunResult> {
        self.solve_with(x0, |_, _| true)
    }

    /// As [`Solver::solve_from`]; `observe(iteration, step_norm)` runs after
    /// every step and stops the iteration early by returning `false`.
    pub fn solve_with(
        &self,
        x0: ProductPoint,
        mut observe: impl FnMut(u64, f64) -> bool,
    ) -> Result<RunResult> {
        let mut x = x0;
        let mut p = mean(&x.components)?;
        let mut iterations = 0;
        let mut step = f64::INFINITY;
        let mut converged = false;
        while iterations < self.config.max_iter {
            let (xn, pn, s) = self.dr_step(&x, &p)?;
            x = xn;
            p = pn;
            step = s;
            iterations += 1;
            if !step.is_finite() {
                break;
            }
            if step < self.config.eps_stop {
                converged = true;
                break;
            }
            if !observe(iterations, step) {
                break;
            }
        }
        self.finish(p, converged, iterations, step)
    }

    fn finish(
        &self,
        p: ConsistentEnsemble,
        converged: bool,
        iterations: u64,
        step: f64,
    ) -> Result<RunResult> {
        let filters = FilterBank::from_consistent(&p)?;
        let report = verify::verify(&filters, &self.config.verify_options());
        let regularity = match self.sets.last().and_then(|s| s.gram()) {
            Some(g) => verify::regularity_residual(&filters, self.config.d)
                .into_iter()
                .filter(|(alpha, _)| g.index_set().contains(alpha))
                .map(|(_, r)| r)
                .fold(0.0, f64::max),
            None => 0.0,
        };
        let residuals = Residuals {
            unitarity: verify::qmf_residual(&filters, 2 * self.config.m),
            consistency: structure_residual(&idft(&expand(&p))),
            regularity,
            qmf_grid: report.qmf_residual,
        };
        Ok(RunResult {
            config: self.config.clone(),
            converged,
            iterations,
            wall_time: 0.0,
            final_step_norm: step,
            bownik_pass: report.bownik_pass,
            bownik_min_abs: report.bownik_min_abs,
            separability: report.separability,
            filters,
            solution: p,
            residuals,
            report,
            seed: self.config.seed,
        })
    }
}

pub fn solve(config: &SolverConfig) -> Result<RunResult> {
    Solver::new(config.clone())?.solve()
}

/// Seeds for a batch: `seed, seed + 1, ..`.
pub fn replication_configs(config: &SolverConfig, replications: usize) -> Vec<SolverConfig> {
    (0..replications as u64)
        .map(|i| SolverConfig {
            seed: config.seed.wrapping_add(i),
            ..config.clone()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanMax {
    pub mean: f64,
    pub max: f64,
}

impl MeanMax {
    fn of(values: impl Iterator<Item = f64>) -> Option<Self> {
        let (mut sum, mut max, mut count) = (0.0, f64::NEG_INFINITY, 0usize);
        for v in values {
            sum += v;
            max = max.max(v);
            count += 1;
        }
        (count > 0).then(|| Self {
            mean: sum / count as f64,
            max,
        })
    }
}

/// Aggregates over the converged runs of a batch.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchSummary {
    pub replications: usize,
    /// Runs meeting the stopping criterion.
    pub solved: usize,
    /// Converged runs that also pass Bownik's test.
    pub solved_bownik: usize,
    pub iterations: Option<MeanMax>,
    pub wall_time: Option<MeanMax>,
    pub separability: Option<MeanMax>,
    pub runs: Vec<RunResult>,
}

impl BatchSummary {
    pub fn from_runs(runs: Vec<RunResult>) -> Self {
        let solved: Vec<&RunResult> = runs.iter().filter(|r| r.converged).collect();
        Self {
            replications: runs.len(),
            solved: solved.len(),
            solved_bownik: solved.iter().filter(|r| r.bownik_pass).count(),
            iterations: MeanMax::of(solved.iter().map(|r| r.iterations as f64)),
            wall_time: MeanMax::of(solved.iter().map(|r| r.wall_time)),
            separability: MeanMax::of(solved.iter().filter_map(|r| r.separability)),
            runs,
        }
    }
}

/// Sequential batch; the `drw` crate runs replications in parallel.
pub fn batch(config: &SolverConfig, replications: usize) -> Result<BatchSummary> {
    if replications == 0 {
        return Err(Error::InvalidArgument("replications must be at least 1".into()));
    }
    let runs = replication_configs(config, replications)
        .iter()
        .map(solve)
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchSummary::from_runs(runs))
}
