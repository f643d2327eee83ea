//! Matrix ensembles: maps from a grid `Q_M^n` to complex `2^n × 2^n` matrices.
//!
//! All ensembles live in a flat buffer, entry `j` (linear index) occupying
//! `dim²` consecutive values in row-major order. The Hilbert structure is the
//! real inner product `⟨U,V⟩_R = Σ_j ⟨Re U_j, Re V_j⟩_F + ⟨Im U_j, Im V_j⟩_F`,
//! whose norm coincides with the complex Frobenius-sum norm.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{permutation_matrix, Grid, GridIndex};

/// Absolute tolerance (scaled by `max(1, max_j ‖U_j‖_F)`) for `restrict`.
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixEnsemble {
    n: usize,
    side: usize,
    data: Vec<Complex64>,
}

/// Coefficients `A_k` of `U(ξ) = Σ_k A_k e^{-2πi⟨k,ξ⟩}`.
///
/// Same storage as a sample ensemble; the newtype keeps the two sides of the
/// Fourier pair apart.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolyCoefficients(pub MatrixEnsemble);

impl MatrixEnsemble {
    pub fn zeros(n: usize, side: usize) -> Self {
        let dim = 1 << n;
        Self {
            n,
            side,
            data: vec![Complex64::new(0.0, 0.0); Grid::new(n, side).len() * dim * dim],
        }
    }

    pub fn from_data(n: usize, side: usize, data: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << n;
        let expected = Grid::new(n, side).len() * dim * dim;
        if data.len() != expected {
            return Err(Error::ShapeMismatch(alloc::format!(
                "expected {expected} values, got {}",
                data.len()
            )));
        }
        Ok(Self { n, side, data })
    }

    /// Every entry set to the same row-major matrix `x`.
    pub fn constant(n: usize, side: usize, x: &[Complex64]) -> Self {
        let mut out = Self::zeros(n, side);
        for j in 0..out.len() {
            out.entry_mut(j).copy_from_slice(x);
        }
        out
    }

    pub fn from_fn(n: usize, side: usize, mut f: impl FnMut(&[usize], &mut [Complex64])) -> Self {
        let mut out = Self::zeros(n, side);
        let grid = out.grid();
        let mut coords = vec![0; n];
        for j in 0..out.len() {
            grid.coords_into(j, &mut coords);
            f(&coords, out.entry_mut(j));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Matrix size `2^n`.
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.n, self.side)
    }

    /// Number of grid entries.
    pub fn len(&self) -> usize {
        self.data.len() / (self.dim() * self.dim())
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn entry(&self, j: usize) -> &[Complex64] {
        let sz = self.dim() * self.dim();
        &self.data[j * sz..(j + 1) * sz]
    }

    pub fn entry_mut(&mut self, j: usize) -> &mut [Complex64] {
        let sz = self.dim() * self.dim();
        &mut self.data[j * sz..(j + 1) * sz]
    }

    pub fn entry_at(&self, index: &GridIndex) -> &[Complex64] {
        self.entry(self.grid().linear(index.coords()))
    }

    pub fn matrix(&self, j: usize) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim(), self.dim(), self.entry(j))
    }

    pub fn set_matrix(&mut self, j: usize, m: &DMatrix<Complex64>) {
        let dim = self.dim();
        let e = self.entry_mut(j);
        for r in 0..dim {
            for c in 0..dim {
                e[r * dim + c] = m[(r, c)];
            }
        }
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.n == other.n && self.side == other.side
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(alloc::format!(
                "(n={}, side={}) vs (n={}, side={})",
                self.n,
                self.side,
                other.n,
                other.side
            )))
        }
    }

    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(libm::sqrt(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum(),
        ))
    }

    /// Largest Frobenius norm of an entry difference.
    pub fn max_entry_distance(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok((0..self.len())
            .map(|j| frobenius_distance(self.entry(j), other.entry(j)))
            .fold(0.0, f64::max))
    }

    pub fn max_entry_norm(&self) -> f64 {
        (0..self.len())
            .map(|j| frobenius_norm(self.entry(j)))
            .fold(0.0, f64::max)
    }

    /// `a·self + b·other`, elementwise.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x * a + y * b)
            .collect();
        Ok(Self {
            n: self.n,
            side: self.side,
            data,
        })
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            n: self.n,
            side: self.side,
            data: self.data.iter().map(|x| x * a).collect(),
        }
    }

    /// `(τ_k V)_j = V_{j+k}` with indices taken modulo the grid side.
    pub fn translate(&self, k: &[isize]) -> Self {
        let grid = self.grid();
        let mut shifted = vec![0isize; self.n];
        let mut coords = vec![0usize; self.n];
        let mut out = Self::zeros(self.n, self.side);
        for j in 0..self.len() {
            grid.coords_into(j, &mut coords);
            for ((s, &c), &kk) in shifted.iter_mut().zip(&coords).zip(k) {
                *s = c as isize + kk;
            }
            let src = grid.linear_wrapped(&shifted);
            out.entry_mut(j).copy_from_slice(self.entry(src));
        }
        out
    }
}

impl TrigPolyCoefficients {
    pub fn inner(&self) -> &MatrixEnsemble {
        &self.0
    }

    pub fn into_inner(self) -> MatrixEnsemble {
        self.0
    }
}

/// An ensemble on `Q_M^n` satisfying `U_{j + M v_{2^ℓ}/2} = σ_{2^ℓ} U_j`,
/// stored by its independent block on `Q_{M/2}^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConsistentEnsemble {
    m: usize,
    block: MatrixEnsemble,
}

impl ConsistentEnsemble {
    pub fn new(m: usize, block: MatrixEnsemble) -> Result<Self> {
        if m < 4 || !m.is_multiple_of(2) {
            return Err(Error::InvalidGridSize(m));
        }
        if block.side() != m / 2 {
            return Err(Error::ShapeMismatch(alloc::format!(
                "block side {} does not match M/2 = {}",
                block.side(),
                m / 2
            )));
        }
        Ok(Self { m, block })
    }

    pub fn zeros(n: usize, m: usize) -> Result<Self> {
        Self::new(m, MatrixEnsemble::zeros(n, m / 2))
    }

    pub fn n(&self) -> usize {
        self.block.n()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.block.dim()
    }

    pub fn block(&self) -> &MatrixEnsemble {
        &self.block
    }

    pub fn block_mut(&mut self) -> &mut MatrixEnsemble {
        &mut self.block
    }

    pub fn into_block(self) -> MatrixEnsemble {
        self.block
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.m == other.m && self.block.same_shape(&other.block)
    }

    /// Norm of the full ensemble on `Q_M^n`: every block entry appears `2^n`
    /// times up to a norm-preserving permutation.
    pub fn norm_sqr(&self) -> f64 {
        self.block.norm_sqr() * self.dim() as f64
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        Ok(self.block.inner_product(&other.block)? * self.dim() as f64)
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.block.distance(&other.block)? * libm::sqrt(self.dim() as f64))
    }

    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        Ok(Self {
            m: self.m,
            block: self.block.lin_comb(a, &other.block, b)?,
        })
    }
}

/// Fill `Q_M^n` from the `Q_{M/2}^n` block by repeated application of `σ_{2^ℓ}`.
pub fn expand(c: &ConsistentEnsemble) -> MatrixEnsemble {
    let n = c.n();
    let m = c.m();
    let half = m / 2;
    let block_grid = c.block.grid();
    let full_grid = Grid::new(n, m);
    let mut out = MatrixEnsemble::zeros(n, m);
    let mut coords = vec![0usize; n];
    let mut full = vec![0usize; n];
    for j in 0..full_grid.len() {
        full_grid.coords_into(j, &mut full);
        // which half-period offsets are present: vertex index Σ 2^ℓ
        let mut shift = 0usize;
        for (axis, (c, &f)) in coords.iter_mut().zip(&full).enumerate() {
            *c = f % half;
            if f >= half {
                shift |= 1 << axis;
            }
        }
        let src = c.block.entry(block_grid.linear(&coords));
        if shift == 0 {
            out.entry_mut(j).copy_from_slice(src);
        } else {
            // σ_shift = Π σ_{2^ℓ} over the set bits
            let sigma = permutation_matrix(shift, n).expect("shift < 2^n");
            sigma.apply_rows(src, out.entry_mut(j));
        }
    }
    out
}

/// Largest `‖U_{j + M v_{2^ℓ}/2} − σ_{2^ℓ} U_j‖_F` over `j ∈ Q_{M/2}^n`, `0 ≤ ℓ < n`.
pub fn consistency_residual(u: &MatrixEnsemble) -> f64 {
    let n = u.n();
    let m = u.side();
    let half = m / 2;
    let grid = u.grid();
    let block = Grid::new(n, half);
    let dim = u.dim();
    let mut permuted = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut coords = vec![0usize; n];
    let mut worst = 0.0f64;
    for b in 0..block.len() {
        block.coords_into(b, &mut coords);
        let j = grid.linear(&coords);
        for l in 0..n {
            let sigma = permutation_matrix(1 << l, n).expect("valid");
            sigma.apply_rows(u.entry(j), &mut permuted);
            coords[l] += half;
            let target = grid.linear(&coords);
            coords[l] -= half;
            worst = worst.max(frobenius_distance(u.entry(target), &permuted));
        }
    }
    worst
}

/// Keep the `Q_{M/2}^n` block after checking the consistency relations.
pub fn restrict(u: &MatrixEnsemble) -> Result<ConsistentEnsemble> {
    let m = u.side();
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::InvalidGridSize(m));
    }
    let residual = consistency_residual(u);
    if residual > CONSISTENCY_TOL * u.max_entry_norm().max(1.0) {
        return Err(Error::ConsistencyViolation { residual });
    }
    Ok(restrict_unchecked(u))
}

/// Block extraction without the consistency check.
pub fn restrict_unchecked(u: &MatrixEnsemble) -> ConsistentEnsemble {
    let n = u.n();
    let m = u.side();
    let grid = u.grid();
    let block = MatrixEnsemble::from_fn(n, m / 2, |coords, out| {
        out.copy_from_slice(u.entry(grid.linear(coords)));
    });
    ConsistentEnsemble { m, block }
}

pub fn frobenius_norm(x: &[Complex64]) -> f64 {
    libm::sqrt(x.iter().map(|z| z.norm_sqr()).sum())
}

pub fn frobenius_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum())
}

/// `‖X^* X − I‖_F` for a row-major square matrix.
pub fn unitarity_residual(x: &[Complex64], dim: usize) -> f64 {
    let mut acc = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            let mut s = Complex64::new(0.0, 0.0);
            for r in 0..dim {
                s += x[r * dim + a].conj() * x[r * dim + b];
            }
            if a == b {
                s -= 1.0;
            }
            acc += s.norm_sqr();
        }
    }
    libm::sqrt(acc)
}
