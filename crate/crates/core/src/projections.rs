//! Metric projectors onto the constraint sets of the wavelet feasibility
//! problem, and onto the diagonal of the product space.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex64;

use crate::ensemble::{expand, restrict, ConsistentEnsemble, MatrixEnsemble, TrigPolyCoefficients};
use crate::error::{Error, Result};
use crate::fourier::{dft, idft, shift_half};
use crate::grid::{multi_indices, vertex_of, Grid, MultiIndex};
use crate::unitary::{nearest_unitary_in_place, project_one_tensor_unitary_in_place};

/// Largest acceptable eigenvalue ratio of the rescaled Gram matrix.
const MAX_CONDITION: f64 = 1e13;

/// Tolerance on the `w_k` row structure of `idft(expand(U))`.
const STRUCTURE_TOL: f64 = 1e-9;

/// `G_{βα} = Σ_{k∈Q_M^n} k^{α+β}` over the multi-indices `|α| ≤ d`.
///
/// Entries are summed in integers. The factorisation is of the rescaled
/// matrix `D G D`, `D = diag((M−1)^{−|α|})`, which has the same solution set
/// after undoing the scaling and is far better conditioned.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    n: usize,
    m: usize,
    d: usize,
    index_set: Vec<MultiIndex>,
    entries: DMatrix<f64>,
    // orthonormal basis of span{k ↦ k^α}, rows indexed by k ∈ Q_M^n
    basis: DMatrix<f64>,
    factor: Cholesky<f64, Dyn>,
    condition: f64,
}

fn exact_power_sum(grid: Grid, exponent: &[usize]) -> Result<u128> {
    let overflow = || Error::InvalidConfig(alloc::format!("Gram entry overflows for exponent {exponent:?}"));
    let mut total: u128 = 0;
    for k in grid.iter() {
        let mut term: u128 = 1;
        for (&ki, &e) in k.iter().zip(exponent) {
            term = term
                .checked_mul((ki as u128).checked_pow(e as u32).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
        }
        total = total.checked_add(term).ok_or_else(overflow)?;
    }
    Ok(total)
}

pub fn gram_matrix(n: usize, m: usize, d: usize) -> Result<GramMatrix> {
    GramMatrix::new(n, m, d, true)
}

impl GramMatrix {
    /// `include_zero = false` drops `α = 0` from the index set.
    pub fn new(n: usize, m: usize, d: usize, include_zero: bool) -> Result<Self> {
        if m < 4 || !m.is_multiple_of(2) {
            return Err(Error::InvalidGridSize(m));
        }
        let index_set = multi_indices(n, d, include_zero);
        if index_set.is_empty() {
            return Err(Error::InvalidConfig("empty moment index set".into()));
        }
        let size = index_set.len();
        let grid = Grid::new(n, m);
        let mut entries = DMatrix::zeros(size, size);
        for (b, beta) in index_set.iter().enumerate() {
            for (a, alpha) in index_set.iter().enumerate().skip(b) {
                let exponent: Vec<usize> = alpha.iter().zip(beta).map(|(x, y)| x + y).collect();
                let v = exact_power_sum(grid, &exponent)? as f64;
                entries[(b, a)] = v;
                entries[(a, b)] = v;
            }
        }

        let h = (m - 1) as f64;
        let vandermonde = DMatrix::from_fn(grid.len(), size, |k, a| {
            grid.coords(k)
                .iter()
                .zip(&index_set[a])
                .map(|(&ki, &e)| libm::pow(ki as f64 / h, e as f64))
                .product()
        });
        let scaled = vandermonde.transpose() * &vandermonde;
        let eig = scaled.clone().symmetric_eigenvalues();
        let (lo, hi) = eig
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if condition > MAX_CONDITION {
            return Err(Error::IllConditioned { condition });
        }
        let factor = Cholesky::new(scaled).ok_or(Error::IllConditioned { condition })?;
        let basis = vandermonde.qr().q();
        Ok(Self {
            n,
            m,
            d,
            index_set,
            entries,
            basis,
            factor,
            condition,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn index_set(&self) -> &[MultiIndex] {
        &self.index_set
    }

    pub fn size(&self) -> usize {
        self.index_set.len()
    }

    /// Unscaled entries, exactly as summed.
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Eigenvalue ratio of the rescaled matrix that is actually factorised.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Solve `G c = r` for real `r` indexed like the index set.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let h = (self.m - 1) as f64;
        let scale: Vec<f64> = self
            .index_set
            .iter()
            .map(|a| libm::pow(h, -(a.iter().sum::<usize>() as f64)))
            .collect();
        let v = nalgebra::DVector::from_iterator(rhs.len(), rhs.iter().zip(&scale).map(|(r, s)| r * s));
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&scale));
        let scaled = &d * &self.entries * &d;
        let mut y = self.factor.solve(&v);
        // one step of iterative refinement against the exact entries
        let r = &v - &scaled * &y;
        y += self.factor.solve(&r);
        y.iter().zip(&scale).map(|(y, s)| y * s).collect()
    }

    /// Orthogonal projection of the columns of `b` (rows indexed by `k`) onto
    /// `{Σ_k k^α b_k = 0 for every α in the index set}`.
    pub fn project_moments(&self, b: &mut DMatrix<Complex64>) {
        let q = self.basis.map(|x| Complex64::new(x, 0.0));
        // a second pass removes what rounding left behind
        for _ in 0..2 {
            let coeffs = q.tr_mul(b);
            *b -= &q * coeffs;
        }
    }
}

/// Largest `|Σ_k k^α b_k|` over the index set and the columns of `b`.
pub fn moment_residual(gram: &GramMatrix, b: &DMatrix<Complex64>) -> f64 {
    let grid = Grid::new(gram.n, gram.m);
    let mut worst = 0.0f64;
    for alpha in &gram.index_set {
        for col in b.column_iter() {
            let s: Complex64 = grid
                .iter()
                .zip(col.iter())
                .map(|(k, z)| z * crate::grid::monomial(&k, alpha))
                .sum();
            worst = worst.max(s.norm());
        }
    }
    worst
}

/// `(w_k)_j = (−1)^{⟨k,v_j⟩}`.
pub fn w_sign(k: &[usize], j: usize, n: usize) -> f64 {
    let v = vertex_of(j, n).expect("vertex in range");
    if v.dot(k).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn row_structure(a: &TrigPolyCoefficients) -> (DMatrix<Complex64>, f64, Vec<usize>) {
    let inner = &a.0;
    let n = inner.n();
    let dim = inner.dim();
    let grid = inner.grid();
    let mut rows = DMatrix::zeros(inner.len(), dim);
    let mut coords = vec![0usize; n];
    let mut worst = (0.0f64, vec![0usize; n]);
    for k in 0..inner.len() {
        grid.coords_into(k, &mut coords);
        let e = inner.entry(k);
        for c in 0..dim {
            let row0 = e[c];
            for j in 1..dim {
                let r = (e[j * dim + c] - row0 * w_sign(&coords, j, n)).norm();
                if r > worst.0 {
                    worst = (r, coords.clone());
                }
            }
            rows[(k, c)] = row0;
        }
    }
    (rows, worst.0, worst.1)
}

/// Largest `|(A_k)_{j,ε} − (w_k)_j (A_k)_{0,ε}|`.
pub fn structure_residual(a: &TrigPolyCoefficients) -> f64 {
    row_structure(a).1
}

/// Row 0 of every `A_k` of a consistent coefficient ensemble, as an
/// `M^n × 2^n` matrix, after checking `A_k = w_k · row_0`.
pub fn reduced_rows(a: &TrigPolyCoefficients) -> Result<DMatrix<Complex64>> {
    let scale = a.0.max_entry_norm().max(1.0);
    let (rows, residual, index) = row_structure(a);
    if residual > STRUCTURE_TOL * scale {
        return Err(Error::StructureViolation { index, residual });
    }
    Ok(rows)
}

/// Inverse of [`reduced_rows`]: `A_k = w_k · rows[k]`.
pub fn rebuild_from_rows(n: usize, m: usize, rows: &DMatrix<Complex64>) -> TrigPolyCoefficients {
    let dim = 1 << n;
    TrigPolyCoefficients(MatrixEnsemble::from_fn(n, m, |k, out| {
        let lin = Grid::new(n, m).linear(k);
        for j in 0..dim {
            let w = w_sign(k, j, n);
            for c in 0..dim {
                out[j * dim + c] = rows[(lin, c)] * w;
            }
        }
    }))
}

pub fn project_c1_0(u: &ConsistentEnsemble) -> ConsistentEnsemble {
    let mut out = u.clone();
    let dim = out.dim();
    let block = out.block_mut();
    project_one_tensor_unitary_in_place(block.entry_mut(0), dim);
    for j in 1..block.len() {
        nearest_unitary_in_place(block.entry_mut(j), dim);
    }
    out
}

/// `S_{−ℓ} ∘ P_unitary ∘ S_ℓ`.
///
/// `S_ℓ` maps consistent ensembles to consistent ones and nearest-unitary
/// commutes with the permutations `σ_j`, so the unitary step only touches the
/// `Q_{M/2}^n` block.
pub fn project_c1_ell(l: usize, u: &ConsistentEnsemble) -> Result<ConsistentEnsemble> {
    let count = 1usize << u.n();
    if l == 0 || l >= count {
        return Err(Error::IndexOutOfRange {
            index: l,
            limit: count,
        });
    }
    let shifted = shift_half(l, &expand(u), 1)?;
    let mut block = restrict(&shifted)?;
    let dim = block.dim();
    let b = block.block_mut();
    for j in 0..b.len() {
        nearest_unitary_in_place(b.entry_mut(j), dim);
    }
    restrict(&shift_half(l, &expand(&block), -1)?)
}

/// Projection onto the flatness set `C_2'` with a prepared Gram matrix.
pub fn project_c2_with(u: &ConsistentEnsemble, gram: &GramMatrix) -> Result<ConsistentEnsemble> {
    if gram.n != u.n() || gram.m != u.m() {
        return Err(Error::ShapeMismatch(alloc::format!(
            "Gram matrix for (n={}, M={}) applied to (n={}, M={})",
            gram.n,
            gram.m,
            u.n(),
            u.m()
        )));
    }
    let a = idft(&expand(u));
    let mut rows = reduced_rows(&a)?;
    let dim = u.dim();
    let mut b = rows.columns(1, dim - 1).into_owned();
    gram.project_moments(&mut b);
    rows.columns_mut(1, dim - 1).copy_from(&b);
    restrict(&dft(&rebuild_from_rows(u.n(), u.m(), &rows)))
}

pub fn project_c2(u: &ConsistentEnsemble, d: usize) -> Result<ConsistentEnsemble> {
    project_c2_with(u, &gram_matrix(u.n(), u.m(), d)?)
}

/// Replace every component by the componentwise mean.
pub fn project_diagonal(x: &[ConsistentEnsemble]) -> Result<Vec<ConsistentEnsemble>> {
    Ok(vec![mean(x)?; x.len()])
}

pub fn mean(x: &[ConsistentEnsemble]) -> Result<ConsistentEnsemble> {
    let first = x
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty tuple".into()))?;
    let mut acc = first.clone();
    for other in &x[1..] {
        if !other.same_shape(first) {
            return Err(Error::ShapeMismatch("tuple components differ in shape".into()));
        }
        acc = acc.lin_comb(1.0, other, 1.0)?;
    }
    let inv = 1.0 / x.len() as f64;
    let block = acc.block().scale(inv);
    ConsistentEnsemble::new(first.m(), block)
}

/// Which constraint a projector enforces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Unitary samples with `U_0 ∈ 1 ⊗ U(2^n − 1)`.
    C1Zero,
    /// Unitary samples at the grid shifted by `v_ℓ/(2M)`.
    C1Ell(usize),
    /// Vanishing moments `Σ_k k^α b_k = 0`.
    C2Prime,
}

#[derive(Clone, Debug)]
pub struct ConstraintSet {
    kind: ConstraintKind,
    n: usize,
    m: usize,
    gram: Option<GramMatrix>,
}

impl ConstraintSet {
    pub fn new(kind: ConstraintKind, n: usize, m: usize, d: usize, include_zero: bool) -> Result<Self> {
        if m < 4 || !m.is_multiple_of(2) {
            return Err(Error::InvalidGridSize(m));
        }
        let gram = match kind {
            ConstraintKind::C1Ell(l) => {
                let count = 1usize << n;
                if l == 0 || l >= count {
                    return Err(Error::IndexOutOfRange {
                        index: l,
                        limit: count,
                    });
                }
                None
            }
            ConstraintKind::C1Zero => None,
            ConstraintKind::C2Prime => Some(GramMatrix::new(n, m, d, include_zero)?),
        };
        Ok(Self { kind, n, m, gram })
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn gram(&self) -> Option<&GramMatrix> {
        self.gram.as_ref()
    }

    pub fn project(&self, u: &ConsistentEnsemble) -> Result<ConsistentEnsemble> {
        if u.n() != self.n || u.m() != self.m {
            return Err(Error::ShapeMismatch(alloc::format!(
                "constraint for (n={}, M={}) applied to (n={}, M={})",
                self.n,
                self.m,
                u.n(),
                u.m()
            )));
        }
        match self.kind {
            ConstraintKind::C1Zero => Ok(project_c1_0(u)),
            ConstraintKind::C1Ell(l) => project_c1_ell(l, u),
            ConstraintKind::C2Prime => project_c2_with(u, self.gram.as_ref().expect("built with Gram")),
        }
    }

    /// `‖u − P(u)‖` in the full-ensemble norm.
    pub fn distance(&self, u: &ConsistentEnsemble) -> Result<f64> {
        self.project(u)?.distance(u)
    }
}

/// The constraint tuple `(C_1^(0), C_1^(1), .., C_1^(2^n−1), C_2')`.
pub fn constraint_sets(n: usize, m: usize, d: usize, include_zero: bool) -> Result<Vec<ConstraintSet>> {
    let mut out = Vec::with_capacity((1 << n) + 1);
    out.push(ConstraintSet::new(ConstraintKind::C1Zero, n, m, d, include_zero)?);
    for l in 1..(1 << n) {
        out.push(ConstraintSet::new(
            ConstraintKind::C1Ell(l),
            n,
            m,
            d,
            include_zero,
        )?);
    }
    out.push(ConstraintSet::new(
        ConstraintKind::C2Prime,
        n,
        m,
        d,
        include_zero,
    )?);
    Ok(out)
}
