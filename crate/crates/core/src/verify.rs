//! Post-hoc checks of a filter bank: paraunitarity on a dense grid,
//! completeness, vanishing moments, Bownik's orthogonality test and the 2D
//! separability measure.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::ensemble::unitarity_residual;
use crate::error::{Error, Result};
use crate::filters::{FilterBank, SymbolEvaluator};
use crate::grid::{monomial, multi_indices, vertex_of, Grid, MultiIndex};

pub const DEFAULT_BOWNIK_GRID: usize = 257;
pub const DEFAULT_BOWNIK_MIN: f64 = 1e-6;

/// Residual grid density per axis when none is given: `4M`.
pub fn default_grid_points(m: usize) -> usize {
    4 * m
}

fn uniform(points: usize, lo: f64, hi: f64, closed: bool) -> Vec<f64> {
    let steps = if closed {
        points.saturating_sub(1).max(1)
    } else {
        points
    };
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
        .collect()
}

/// `U_F(ξ)` on the grid `ξ = j / grid_points`, `j ∈ Q_{grid_points}^n`.
fn symbol_matrices(f: &FilterBank, grid_points: usize) -> Vec<Vec<Complex64>> {
    let n = f.n();
    let dim = f.dim();
    let eval = SymbolEvaluator::new(f);
    let grid = Grid::new(n, grid_points);
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim * dim]; grid.len()];
    for j in 0..dim {
        let v = vertex_of(j, n).expect("in range");
        let xs: Vec<Vec<f64>> = (0..n)
            .map(|axis| {
                (0..grid_points)
                    .map(|p| p as f64 / grid_points as f64 + v.bit(axis) as f64 / 2.0)
                    .collect()
            })
            .collect();
        for eps in 0..dim {
            let vals = eval.on_grid(eps, &xs);
            for (mat, val) in out.iter_mut().zip(vals) {
                mat[j * dim + eps] = val;
            }
        }
    }
    out
}

/// `max_ξ ‖U_F(ξ)^* U_F(ξ) − I‖_F` over `ξ ∈ Q_{grid_points}^n / grid_points`.
pub fn qmf_residual(f: &FilterBank, grid_points: usize) -> f64 {
    let dim = f.dim();
    symbol_matrices(f, grid_points)
        .iter()
        .map(|u| unitarity_residual(u, dim))
        .fold(0.0, f64::max)
}

/// Largest off-diagonal `|Σ_j conj(m_ε(ξ+v_j/2)) m_η(ξ+v_j/2)|`, `ε ≠ η`.
pub fn cross_qmf_residual(f: &FilterBank, grid_points: usize) -> f64 {
    let dim = f.dim();
    let mut worst = 0.0f64;
    for u in symbol_matrices(f, grid_points) {
        for a in 0..dim {
            for b in 0..dim {
                if a == b {
                    continue;
                }
                let s: Complex64 = (0..dim).map(|r| u[r * dim + a].conj() * u[r * dim + b]).sum();
                worst = worst.max(s.norm());
            }
        }
    }
    worst
}

/// `max(|m_0(v_j/2) − δ_{j0}|, |m_ε(0)|)` over vertices `j` and `ε ≥ 1`.
pub fn completeness_residual(f: &FilterBank) -> f64 {
    let n = f.n();
    let mut worst = 0.0f64;
    for j in 0..f.dim() {
        let v = vertex_of(j, n).expect("in range");
        let xi: Vec<f64> = (0..n).map(|axis| v.bit(axis) as f64 / 2.0).collect();
        let target = if j == 0 { 1.0 } else { 0.0 };
        worst = worst.max((f.symbol(0, &xi) - target).norm());
    }
    let zero = vec![0.0; n];
    for eps in 1..f.dim() {
        worst = worst.max(f.symbol(eps, &zero).norm());
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BownikOutcome {
    pub pass: bool,
    pub min_abs: f64,
}

/// `min |m_0|` over `[−1/4, 1/4]^n` sampled with `grid_points` per axis,
/// endpoints included; passes iff the minimum exceeds `threshold`.
pub fn bownik_check(f: &FilterBank, grid_points: usize, threshold: f64) -> BownikOutcome {
    let axis = uniform(grid_points.max(2), -0.25, 0.25, true);
    let xs = vec![axis; f.n()];
    let min_abs = SymbolEvaluator::new(f)
        .on_grid(0, &xs)
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    BownikOutcome {
        pass: min_abs > threshold,
        min_abs,
    }
}

/// `max_{ε≥1} |Σ_k k^α g^ε_k|` for each `|α| ≤ d`.
pub fn regularity_residual(f: &FilterBank, d: usize) -> Vec<(MultiIndex, f64)> {
    let grid = f.grid();
    let coords: Vec<Vec<usize>> = grid.iter().collect();
    multi_indices(f.n(), d, true)
        .into_iter()
        .map(|alpha| {
            let worst = (1..f.dim())
                .map(|eps| {
                    f.filter(eps)
                        .iter()
                        .zip(&coords)
                        .map(|(g, k)| g * monomial(k, &alpha))
                        .sum::<Complex64>()
                        .norm()
                })
                .fold(0.0, f64::max);
            (alpha, worst)
        })
        .collect()
}

/// `‖G − (G·1)(G^T·1)^T‖_F` with `G[k_0][k_1] = g^0_{(k_0,k_1)}`.
pub fn separability_measure(f: &FilterBank) -> Result<f64> {
    if f.n() != 2 {
        return Err(Error::UnsupportedDimension(f.n()));
    }
    let m = f.m();
    let g = |a: usize, b: usize| f.coeff(0, &[a, b]);
    separability_of_matrix(m, g)
}

/// Separability of an arbitrary square complex matrix given entrywise.
pub fn separability_of_matrix(m: usize, g: impl Fn(usize, usize) -> Complex64) -> Result<f64> {
    let rows: Vec<Complex64> = (0..m).map(|a| (0..m).map(|b| g(a, b)).sum()).collect();
    let cols: Vec<Complex64> = (0..m).map(|b| (0..m).map(|a| g(a, b)).sum()).collect();
    let mut acc = 0.0;
    for (a, ra) in rows.iter().enumerate() {
        for (b, cb) in cols.iter().enumerate() {
            acc += (g(a, b) - ra * cb).norm_sqr();
        }
    }
    Ok(libm::sqrt(acc))
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub d: usize,
    /// Points per axis for the paraunitarity grid; `None` means `4M`.
    pub grid_points: Option<usize>,
    pub bownik_grid: usize,
    pub bownik_min: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            d: 1,
            grid_points: None,
            bownik_grid: DEFAULT_BOWNIK_GRID,
            bownik_min: DEFAULT_BOWNIK_MIN,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub qmf_residual: f64,
    pub cross_qmf_residual: f64,
    pub completeness_residual: f64,
    pub regularity_residuals: Vec<(MultiIndex, f64)>,
    pub bownik_min_abs: f64,
    pub bownik_pass: bool,
    pub separability: Option<f64>,
    pub grid_resolution: usize,
}

impl VerificationReport {
    pub fn max_regularity_residual(&self) -> f64 {
        self.regularity_residuals
            .iter()
            .map(|(_, r)| *r)
            .fold(0.0, f64::max)
    }

    /// Every residual at most `tol` and Bownik's test passed.
    pub fn passes(&self, tol: f64) -> bool {
        self.bownik_pass
            && self.qmf_residual <= tol
            && self.cross_qmf_residual <= tol
            && self.completeness_residual <= tol
            && self.max_regularity_residual() <= tol
    }
}

pub fn verify(f: &FilterBank, opts: &VerifyOptions) -> VerificationReport {
    let grid_points = opts.grid_points.unwrap_or_else(|| default_grid_points(f.m()));
    let bownik = bownik_check(f, opts.bownik_grid, opts.bownik_min);
    VerificationReport {
        qmf_residual: qmf_residual(f, grid_points),
        cross_qmf_residual: cross_qmf_residual(f, grid_points),
        completeness_residual: completeness_residual(f),
        regularity_residuals: regularity_residual(f, opts.d),
        bownik_min_abs: bownik.min_abs,
        bownik_pass: bownik.pass,
        separability: separability_measure(f).ok(),
        grid_resolution: grid_points,
    }
}

pub fn verify_ensemble(
    u: &crate::ensemble::ConsistentEnsemble,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    Ok(verify(&FilterBank::from_consistent(u)?, opts))
}
