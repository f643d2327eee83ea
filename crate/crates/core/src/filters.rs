//! Filter banks `g^ε_k` and their symbols `m_ε(ξ) = Σ_k g^ε_k e^{−2πi⟨k,ξ⟩}`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::ensemble::{expand, restrict, ConsistentEnsemble, MatrixEnsemble};
use crate::error::{Error, Result};
use crate::fourier::{dft, idft};
use crate::grid::{vertex_of, Grid};
use crate::projections::{rebuild_from_rows, reduced_rows};

/// Coefficients `g^ε_k` for `ε < 2^n` and `k ∈ Q_M^n` (linear order).
#[derive(Clone, Debug, PartialEq)]
pub struct FilterBank {
    n: usize,
    m: usize,
    filters: Vec<Vec<Complex64>>,
}

impl FilterBank {
    pub fn new(n: usize, m: usize, filters: Vec<Vec<Complex64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedDimension(n));
        }
        let dim = 1usize << n;
        if filters.len() != dim {
            return Err(Error::ShapeMismatch(alloc::format!(
                "expected {dim} filters, got {}",
                filters.len()
            )));
        }
        let len = Grid::new(n, m).len();
        if let Some(f) = filters.iter().find(|f| f.len() != len) {
            return Err(Error::ShapeMismatch(alloc::format!(
                "filter has {} coefficients, expected {len}",
                f.len()
            )));
        }
        Ok(Self { n, m, filters })
    }

    /// Haar filters zero padded to `Q_M^n`; for `n > 1` the tensor products
    /// of `(1/2, 1/2)` and `(1/2, −1/2)`, axis `i` picking bit `i` of `ε`.
    pub fn haar(n: usize, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidGridSize(m));
        }
        let grid = Grid::new(n, m);
        let filters = (0..1usize << n)
            .map(|eps| {
                grid.iter()
                    .map(|k| {
                        let mut v = 1.0;
                        for (axis, &ki) in k.iter().enumerate() {
                            v *= match (ki, (eps >> axis) & 1) {
                                (0, _) => 0.5,
                                (1, 0) => 0.5,
                                (1, _) => -0.5,
                                _ => 0.0,
                            };
                        }
                        Complex64::new(v, 0.0)
                    })
                    .collect()
            })
            .collect();
        Self::new(n, m, filters)
    }

    /// Complete a 1D scaling filter with `g^1_k = (−1)^k conj(g^0_{M−1−k})`.
    pub fn complete_1d(g0: &[Complex64]) -> Result<Self> {
        let m = g0.len();
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::InvalidGridSize(m));
        }
        let g1 = (0..m)
            .map(|k| {
                let v = g0[m - 1 - k].conj();
                if k % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        Self::new(1, m, vec![g0.to_vec(), g1])
    }

    /// `g^ε_k = (A_k)_{0,ε}` with `A = idft(expand(U))`.
    pub fn from_consistent(u: &ConsistentEnsemble) -> Result<Self> {
        let rows = reduced_rows(&idft(&expand(u)))?;
        let filters = (0..u.dim())
            .map(|eps| rows.column(eps).iter().copied().collect())
            .collect();
        Self::new(u.n(), u.m(), filters)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.n, self.m)
    }

    pub fn filter(&self, eps: usize) -> &[Complex64] {
        &self.filters[eps]
    }

    pub fn filters(&self) -> &[Vec<Complex64>] {
        &self.filters
    }

    pub fn coeff(&self, eps: usize, k: &[usize]) -> Complex64 {
        self.filters[eps][self.grid().linear(k)]
    }

    /// `m_ε(ξ)`.
    pub fn symbol(&self, eps: usize, xi: &[f64]) -> Complex64 {
        let grid = self.grid();
        let mut coords = vec![0usize; self.n];
        let mut acc = Complex64::new(0.0, 0.0);
        for (lin, g) in self.filters[eps].iter().enumerate() {
            grid.coords_into(lin, &mut coords);
            let dot: f64 = coords.iter().zip(xi).map(|(&c, &x)| c as f64 * x).sum();
            acc += g * Complex64::from_polar(1.0, -2.0 * PI * dot);
        }
        acc
    }

    /// `U(ξ)_{j,ε} = m_ε(ξ + v_j/2)`, row-major.
    pub fn symbol_matrix(&self, xi: &[f64]) -> Vec<Complex64> {
        let dim = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut shifted = vec![0.0; self.n];
        for j in 0..dim {
            let v = vertex_of(j, self.n).expect("in range");
            for (axis, s) in shifted.iter_mut().enumerate() {
                *s = xi[axis] + v.bit(axis) as f64 / 2.0;
            }
            for eps in 0..dim {
                out[j * dim + eps] = self.symbol(eps, &shifted);
            }
        }
        out
    }

    /// Sample ensemble `U_j = U(j/M)` on `Q_M^n`.
    pub fn to_ensemble(&self) -> MatrixEnsemble {
        let rows = DMatrix::from_fn(self.grid().len(), self.dim(), |k, eps| self.filters[eps][k]);
        dft(&rebuild_from_rows(self.n, self.m, &rows))
    }

    pub fn to_consistent(&self) -> Result<ConsistentEnsemble> {
        restrict(&self.to_ensemble())
    }
}

pub fn extract_filters(u: &ConsistentEnsemble) -> Result<FilterBank> {
    FilterBank::from_consistent(u)
}

/// Tabulates `m_ε(ξ)` at one point for every `ε` using per-axis phase tables.
pub(crate) struct SymbolEvaluator<'a> {
    bank: &'a FilterBank,
}

impl<'a> SymbolEvaluator<'a> {
    pub(crate) fn new(bank: &'a FilterBank) -> Self {
        Self { bank }
    }

    /// `m_ε` on the tensor grid `xs[axis][i]`, output in linear order with
    /// axis 0 fastest.
    pub(crate) fn on_grid(&self, eps: usize, xs: &[Vec<f64>]) -> Vec<Complex64> {
        let n = self.bank.n;
        let m = self.bank.m;
        let phases: Vec<Vec<Complex64>> = xs
            .iter()
            .map(|axis| {
                axis.iter()
                    .flat_map(|&x| (0..m).map(move |k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 * x)))
                    .collect()
            })
            .collect();
        // contract one axis at a time, starting from the last
        let mut cur: Vec<Complex64> = self.bank.filters[eps].clone();
        let mut shape: Vec<usize> = vec![m; n];
        for axis in (0..n).rev() {
            let points = xs[axis].len();
            let inner: usize = shape[..axis].iter().product();
            let outer: usize = shape[axis + 1..].iter().product();
            let mut next = vec![Complex64::new(0.0, 0.0); inner * points * outer];
            for o in 0..outer {
                for p in 0..points {
                    let ph = &phases[axis][p * m..(p + 1) * m];
                    for i in 0..inner {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (k, w) in ph.iter().enumerate() {
                            acc += cur[(o * m + k) * inner + i] * w;
                        }
                        next[(o * points + p) * inner + i] = acc;
                    }
                }
            }
            cur = next;
            shape[axis] = points;
        }
        cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{frobenius_distance, unitarity_residual};
    use crate::testutil::random_consistent;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn haar_extraction() {
        let haar = FilterBank::haar(1, 4).unwrap();
        let u = haar.to_consistent().unwrap();
        let back = FilterBank::from_consistent(&u).unwrap();
        let expect0 = [c(0.5), c(0.5), c(0.0), c(0.0)];
        let expect1 = [c(0.5), c(-0.5), c(0.0), c(0.0)];
        assert!(frobenius_distance(back.filter(0), &expect0) < 1e-15);
        assert!(frobenius_distance(back.filter(1), &expect1) < 1e-15);
        // U(0) = I for Haar
        let u0 = u.block().entry(0);
        assert!(frobenius_distance(u0, &[c(1.0), c(0.0), c(0.0), c(1.0)]) < 1e-15);
    }

    #[test]
    fn random_roundtrip() {
        for (n, m) in [(1, 4), (1, 8), (2, 4), (2, 6)] {
            let u = random_consistent(n, m, 12);
            let bank = FilterBank::from_consistent(&u).unwrap();
            let rebuilt = bank.to_ensemble();
            assert!(rebuilt.max_entry_distance(&expand(&u)).unwrap() < 1e-8);
        }
    }

    #[test]
    fn symbol_matrix_matches_samples() {
        let u = random_consistent(2, 4, 6);
        let bank = FilterBank::from_consistent(&u).unwrap();
        let full = expand(&u);
        for (j, coords) in full.grid().iter().enumerate() {
            let xi: Vec<f64> = coords.iter().map(|&x| x as f64 / 4.0).collect();
            assert!(frobenius_distance(&bank.symbol_matrix(&xi), full.entry(j)) < 1e-10);
        }
    }

    #[test]
    fn symbol_consistency_relation() {
        let u = random_consistent(2, 6, 8);
        let bank = FilterBank::from_consistent(&u).unwrap();
        for xi in [[0.13, 0.71], [-0.4, 0.05], [0.9, 0.33]] {
            let base = bank.symbol_matrix(&xi);
            for j in 0..4 {
                let v = vertex_of(j, 2).unwrap();
                let moved = [xi[0] + v.bit(0) as f64 / 2.0, xi[1] + v.bit(1) as f64 / 2.0];
                let sigma = crate::grid::permutation_matrix(j, 2).unwrap();
                let mut expect = base.clone();
                sigma.apply_rows(&base, &mut expect);
                assert!(frobenius_distance(&bank.symbol_matrix(&moved), &expect) < 1e-10);
            }
        }
    }

    #[test]
    fn haar_2d_is_unitary_everywhere() {
        let bank = FilterBank::haar(2, 4).unwrap();
        for xi in [[0.0, 0.0], [0.21, 0.8], [0.5, 0.25]] {
            assert!(unitarity_residual(&bank.symbol_matrix(&xi), 4) < 1e-14);
        }
        assert_eq!(bank.coeff(3, &[1, 1]), c(0.25));
        assert_eq!(bank.coeff(1, &[1, 0]), c(-0.25));
    }

    #[test]
    fn grid_evaluator_matches_pointwise() {
        let u = random_consistent(2, 6, 2);
        let bank = FilterBank::from_consistent(&u).unwrap();
        let xs = vec![vec![0.0, 0.1, 0.37], vec![-0.25, 0.5]];
        let vals = SymbolEvaluator::new(&bank).on_grid(1, &xs);
        for (i1, &x1) in xs[1].iter().enumerate() {
            for (i0, &x0) in xs[0].iter().enumerate() {
                let direct = bank.symbol(1, &[x0, x1]);
                assert!((vals[i1 * 3 + i0] - direct).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn completion_rejects_odd_length() {
        assert!(FilterBank::complete_1d(&[c(1.0); 5]).is_err());
        assert!(FilterBank::new(1, 4, vec![vec![c(0.0); 4]]).is_err());
    }
}
