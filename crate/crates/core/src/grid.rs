//! Index grids `Q_M^n`, cube vertices `V^n` and the permutation family `σ_j`.
//!
//! Grid points are stored in linear order with axis 0 varying fastest, so the
//! linear index of `(c_0, .., c_{n-1})` is `Σ c_i M^i`. Vertex indices use the
//! binary expansion `j = Σ a_k 2^k`, least significant digit first.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

/// A point of `Q_M^n = {0, .., M-1}^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridIndex {
    coords: Vec<usize>,
}

impl GridIndex {
    pub fn new(coords: Vec<usize>, side: usize) -> Result<Self> {
        if let Some(&c) = coords.iter().find(|&&c| c >= side) {
            return Err(Error::InvalidArgument(alloc::format!(
                "grid coordinate {c} out of range 0..{side}"
            )));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn into_coords(self) -> Vec<usize> {
        self.coords
    }
}

/// Ordered by linear position: the last axis is most significant.
impl Ord for GridIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coords
            .len()
            .cmp(&other.coords.len())
            .then_with(|| self.coords.iter().rev().cmp(other.coords.iter().rev()))
    }
}

impl PartialOrd for GridIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The grid `Q_side^n` with its linear enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub n: usize,
    pub side: usize,
}

impl Grid {
    pub fn new(n: usize, side: usize) -> Self {
        Self { n, side }
    }

    pub fn len(&self) -> usize {
        self.side.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stride of `axis` in the linear order.
    pub fn stride(&self, axis: usize) -> usize {
        self.side.pow(axis as u32)
    }

    pub fn linear(&self, coords: &[usize]) -> usize {
        coords.iter().rev().fold(0, |acc, &c| acc * self.side + c)
    }

    /// Linear index of `coords` reduced modulo `side` on every axis.
    pub fn linear_wrapped(&self, coords: &[isize]) -> usize {
        let m = self.side as isize;
        coords
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * self.side + c.rem_euclid(m) as usize)
    }

    pub fn coords_into(&self, mut lin: usize, out: &mut [usize]) {
        for c in out.iter_mut().take(self.n) {
            *c = lin % self.side;
            lin /= self.side;
        }
    }

    pub fn coords(&self, lin: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        self.coords_into(lin, &mut out);
        out
    }

    pub fn index(&self, lin: usize) -> GridIndex {
        GridIndex {
            coords: self.coords(lin),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(move |lin| self.coords(lin))
    }
}

/// A vertex `v_j` of the unit cube `[0,1]^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    index: usize,
    n: usize,
}

impl Vertex {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bit(&self, axis: usize) -> usize {
        (self.index >> axis) & 1
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.n).map(|k| self.bit(k) as u8).collect()
    }

    /// Group law of `(Z_2)^n`.
    pub fn xor(&self, other: &Vertex) -> Vertex {
        debug_assert_eq!(self.n, other.n);
        Vertex {
            index: self.index ^ other.index,
            n: self.n,
        }
    }

    /// `<k, v_j>` for an integer point `k`.
    pub fn dot(&self, k: &[usize]) -> usize {
        k.iter()
            .enumerate()
            .take(self.n)
            .map(|(axis, &c)| c * self.bit(axis))
            .sum()
    }
}

pub fn vertex_of(j: usize, n: usize) -> Result<Vertex> {
    let count = 1usize << n;
    if j >= count {
        return Err(Error::IndexOutOfRange {
            index: j,
            limit: count,
        });
    }
    Ok(Vertex { index: j, n })
}

/// `σ_j`: the permutation matrix with `(σ_j)_{kℓ} = 1` iff `v_j ⊕ v_k = v_ℓ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationMatrix {
    j: usize,
    n: usize,
}

impl PermutationMatrix {
    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn index(&self) -> usize {
        self.j
    }

    /// Column holding the single 1 of row `k`.
    pub fn image(&self, k: usize) -> usize {
        self.j ^ k
    }

    pub fn entry(&self, k: usize, l: usize) -> u8 {
        u8::from(self.image(k) == l)
    }

    /// Dense row-major entries.
    pub fn dense(&self) -> Vec<u8> {
        let size = self.size();
        let mut out = vec![0u8; size * size];
        for k in 0..size {
            out[k * size + self.image(k)] = 1;
        }
        out
    }

    /// Row permutation `σ X` applied to a row-major `size × size` matrix.
    pub fn apply_rows<T: Copy>(&self, x: &[T], out: &mut [T]) {
        let size = self.size();
        for k in 0..size {
            let src = self.image(k);
            out[k * size..(k + 1) * size].copy_from_slice(&x[src * size..(src + 1) * size]);
        }
    }
}

pub fn permutation_matrix(j: usize, n: usize) -> Result<PermutationMatrix> {
    vertex_of(j, n)?;
    Ok(PermutationMatrix { j, n })
}

/// Integer matrix product of two dense `size × size` 0/1 matrices.
pub fn dense_product(a: &[u8], b: &[u8], size: usize) -> Vec<u8> {
    let mut out = vec![0u8; size * size];
    for r in 0..size {
        for c in 0..size {
            out[r * size + c] = (0..size).map(|t| a[r * size + t] * b[t * size + c]).sum();
        }
    }
    out
}

/// Multi-index `α` with `|α| = Σ α_i`.
pub type MultiIndex = Vec<usize>;

/// All `α ∈ N^n` with `|α| ≤ d`, ordered by total degree, then by linear
/// position (axis 0 fastest) within a degree.
pub fn multi_indices(n: usize, d: usize, include_zero: bool) -> Vec<MultiIndex> {
    let grid = Grid::new(n, d + 1);
    let mut out = Vec::new();
    let start = usize::from(!include_zero);
    for degree in start..=d {
        for lin in 0..grid.len() {
            let alpha = grid.coords(lin);
            if alpha.iter().sum::<usize>() == degree {
                out.push(alpha);
            }
        }
    }
    out
}

/// `k^α` with the convention `0^0 = 1`.
pub fn monomial(k: &[usize], alpha: &[usize]) -> f64 {
    k.iter()
        .zip(alpha)
        .map(|(&ki, &ai)| libm::pow(ki as f64, ai as f64))
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_examples() {
        assert_eq!(vertex_of(0, 2).unwrap().bits(), vec![0, 0]);
        assert_eq!(vertex_of(3, 2).unwrap().bits(), vec![1, 1]);
        assert_eq!(vertex_of(1, 2).unwrap().bits(), vec![1, 0]);
        assert_eq!(vertex_of(1, 1).unwrap().bits(), vec![1]);
        assert!(matches!(
            vertex_of(4, 2),
            Err(Error::IndexOutOfRange { index: 4, limit: 4 })
        ));
    }

    #[test]
    fn permutation_examples() {
        assert_eq!(permutation_matrix(0, 2).unwrap().dense(), {
            let mut id = vec![0u8; 16];
            for i in 0..4 {
                id[i * 4 + i] = 1;
            }
            id
        });
        assert_eq!(permutation_matrix(1, 1).unwrap().dense(), vec![0, 1, 1, 0]);
        // brute force v_3 ⊕ v_k over k = 0..3
        let sigma3 = permutation_matrix(3, 2).unwrap();
        for k in 0..4 {
            let vk = vertex_of(k, 2).unwrap().bits();
            let target: Vec<u8> = vk.iter().map(|b| b ^ 1).collect();
            let l = (0..4)
                .find(|&l| vertex_of(l, 2).unwrap().bits() == target)
                .unwrap();
            assert_eq!(sigma3.image(k), l);
        }
        assert_eq!(
            sigma3.dense(),
            vec![0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0]
        );
        assert!(permutation_matrix(2, 1).is_err());
    }

    #[test]
    fn permutation_family_identities() {
        for n in 1..=3 {
            let size = 1 << n;
            let id = permutation_matrix(0, n).unwrap().dense();
            for j in 0..size {
                let sj = permutation_matrix(j, n).unwrap().dense();
                // symmetric, involutive, one 1 per row and column
                for r in 0..size {
                    assert_eq!((0..size).map(|c| sj[r * size + c]).sum::<u8>(), 1);
                    assert_eq!((0..size).map(|c| sj[c * size + r]).sum::<u8>(), 1);
                    for c in 0..size {
                        assert_eq!(sj[r * size + c], sj[c * size + r]);
                    }
                }
                assert_eq!(dense_product(&sj, &sj, size), id);
                for k in 0..size {
                    let sk = permutation_matrix(k, n).unwrap().dense();
                    assert_eq!(dense_product(&sj, &sk, size), dense_product(&sk, &sj, size));
                }
                // σ_j = Π_k (σ_{2^k})^{a_k}
                let mut prod = id.clone();
                for k in 0..n {
                    if (j >> k) & 1 == 1 {
                        let f = permutation_matrix(1 << k, n).unwrap().dense();
                        prod = dense_product(&prod, &f, size);
                    }
                }
                assert_eq!(prod, sj);
            }
        }
    }

    #[test]
    fn grid_linear_roundtrip_and_order() {
        let g = Grid::new(2, 4);
        assert_eq!(g.len(), 16);
        for lin in 0..16 {
            assert_eq!(g.linear(&g.coords(lin)), lin);
        }
        assert_eq!(g.coords(1), vec![1, 0]);
        assert_eq!(g.linear_wrapped(&[-1, 5]), g.linear(&[3, 1]));
        let a = g.index(5);
        let b = g.index(6);
        assert!(a < b);
        assert!(GridIndex::new(vec![4, 0], 4).is_err());
    }

    #[test]
    fn multi_index_counts() {
        for d in 0..6 {
            assert_eq!(multi_indices(1, d, true).len(), d + 1);
            assert_eq!(multi_indices(2, d, true).len(), (d + 1) * (d + 2) / 2);
            assert_eq!(multi_indices(2, d, false).len(), (d + 1) * (d + 2) / 2 - 1);
        }
        assert_eq!(
            multi_indices(2, 1, true),
            vec![vec![0, 0], vec![1, 0], vec![0, 1]]
        );
        assert_eq!(monomial(&[0, 3], &[0, 2]), 9.0);
    }
}
