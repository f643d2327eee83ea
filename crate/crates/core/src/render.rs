//! Scaling functions and wavelets on dyadic grids by the cascade iteration.
//!
//! Values are cell averages: sample `p` stands for the cube
//! `[p, p + 1)·2^{−J}`. The refinement step
//! `φ'(p) = 2^n Σ_k g_k avg_{e∈{0,1}^n} φ(2p + e − k·2^J)`
//! is the dilation equation on those cells and keeps `Σ φ·2^{−Jn}` fixed
//! whenever `Σ g_k = 1`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filters::FilterBank;
use crate::grid::Grid;

#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    n: usize,
    resolution: u32,
    extent: usize,
    values: Vec<Complex64>,
    /// `‖φ_i − φ_{i−1}‖_{L²}` of the last cascade step, when produced by one.
    pub step_change: Option<f64>,
}

impl SampledFunction {
    /// Zero function on `[0, extent]^n` at spacing `2^{−J}`.
    pub fn zeros(n: usize, resolution: u32, extent: usize) -> Self {
        let side = extent * (1usize << resolution) + 1;
        Self {
            n,
            resolution,
            extent,
            values: vec![Complex64::new(0.0, 0.0); Grid::new(n, side).len()],
            step_change: None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Support is `[0, extent]^n`, `extent = M − 1`.
    pub fn extent(&self) -> usize {
        self.extent
    }

    /// Samples per axis.
    pub fn side(&self) -> usize {
        self.extent * (1usize << self.resolution) + 1
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.n, self.side())
    }

    pub fn spacing(&self) -> f64 {
        libm::ldexp(1.0, -(self.resolution as i32))
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, p: &[usize]) -> Complex64 {
        self.values[self.grid().linear(p)]
    }

    /// Cell volume `2^{−Jn}`.
    fn cell(&self) -> f64 {
        libm::ldexp(1.0, -((self.resolution as usize * self.n) as i32))
    }

    /// `Σ φ · 2^{−Jn}`.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.cell()
    }

    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell())
    }

    pub fn l2_distance(&self, other: &Self) -> f64 {
        libm::sqrt(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                * self.cell(),
        )
    }

    /// `Σ_x f(x) conj(g(x − k)) 2^{−Jn}` for an integer shift `k`.
    pub fn shifted_inner_product(&self, other: &Self, k: &[isize]) -> Complex64 {
        let grid = self.grid();
        let side = grid.side as isize;
        let step = 1isize << self.resolution;
        let mut coords = vec![0usize; self.n];
        let mut acc = Complex64::new(0.0, 0.0);
        'outer: for (lin, v) in self.values.iter().enumerate() {
            grid.coords_into(lin, &mut coords);
            let mut src = 0usize;
            for axis in (0..self.n).rev() {
                let q = coords[axis] as isize - k[axis] * step;
                if q < 0 || q >= side {
                    continue 'outer;
                }
                src = src * grid.side + q as usize;
            }
            acc += v * other.values[src].conj();
        }
        acc * self.cell()
    }

    /// Sample coordinates `x = p · 2^{−J}`.
    pub fn point(&self, lin: usize) -> Vec<f64> {
        let h = self.spacing();
        self.grid().coords(lin).iter().map(|&p| p as f64 * h).collect()
    }
}

fn check_bank(f: &FilterBank, resolution: u32) -> Result<()> {
    if resolution < 1 {
        return Err(Error::InvalidArgument("resolution J must be at least 1".into()));
    }
    if f.m() < 2 {
        return Err(Error::InvalidGridSize(f.m()));
    }
    Ok(())
}

/// One refinement step with filter `g`: `2^n Σ_k g_k avg_e φ(2p + e − k·2^J)`.
fn refine(g: &[Complex64], m: usize, phi: &SampledFunction) -> SampledFunction {
    let n = phi.n;
    let grid = phi.grid();
    let side = grid.side;
    let half = 1usize << (phi.resolution - 1);
    // pooled(r) = avg_e φ(2r + e); then φ'(p) = 2^n Σ_k g_k pooled(p − k 2^{J−1})
    let corners = 1usize << n;
    let mut pooled = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut coords = vec![0usize; n];
    for (lin, out) in pooled.iter_mut().enumerate() {
        grid.coords_into(lin, &mut coords);
        let mut acc = Complex64::new(0.0, 0.0);
        'corner: for e in 0..corners {
            let mut src = 0usize;
            for axis in (0..n).rev() {
                let q = 2 * coords[axis] + ((e >> axis) & 1);
                if q >= side {
                    continue 'corner;
                }
                src = src * side + q;
            }
            acc += phi.values[src];
        }
        *out = acc / corners as f64;
    }

    let taps = Grid::new(n, m);
    let weight = corners as f64;
    let mut out = SampledFunction::zeros(n, phi.resolution, phi.extent);
    let mut kc = vec![0usize; n];
    for (k, gk) in g.iter().enumerate() {
        if *gk == Complex64::new(0.0, 0.0) {
            continue;
        }
        taps.coords_into(k, &mut kc);
        let w = gk * weight;
        'point: for (lin, v) in out.values.iter_mut().enumerate() {
            grid.coords_into(lin, &mut coords);
            let mut src = 0usize;
            for axis in (0..n).rev() {
                let shift = kc[axis] * half;
                if coords[axis] < shift {
                    continue 'point;
                }
                src = src * side + (coords[axis] - shift);
            }
            *v += w * pooled[src];
        }
    }
    out
}

/// `iters` refinement steps from the indicator of `[0,1)^n`.
pub fn cascade(f: &FilterBank, resolution: u32, iters: usize) -> Result<SampledFunction> {
    check_bank(f, resolution)?;
    if iters < 1 {
        return Err(Error::InvalidArgument(
            "cascade needs at least one iteration".into(),
        ));
    }
    let mut phi = SampledFunction::zeros(f.n(), resolution, f.m() - 1);
    let unit = 1usize << resolution;
    let grid = phi.grid();
    let mut coords = vec![0usize; f.n()];
    for (lin, v) in phi.values.iter_mut().enumerate() {
        grid.coords_into(lin, &mut coords);
        if coords.iter().all(|&c| c < unit) {
            *v = Complex64::new(1.0, 0.0);
        }
    }
    let mut change = 0.0;
    for _ in 0..iters {
        let next = refine(f.filter(0), f.m(), &phi);
        change = next.l2_distance(&phi);
        phi = next;
    }
    phi.step_change = Some(change);
    Ok(phi)
}

/// `ψ^ε(x) = 2^n Σ_k g^ε_k φ(2x − k)` on the grid of `φ`.
pub fn wavelet_from_scaling(f: &FilterBank, eps: usize, phi: &SampledFunction) -> Result<SampledFunction> {
    check_bank(f, phi.resolution)?;
    if eps == 0 || eps >= f.dim() {
        return Err(Error::IndexOutOfRange {
            index: eps,
            limit: f.dim(),
        });
    }
    if phi.n != f.n() || phi.extent != f.m() - 1 {
        return Err(Error::ShapeMismatch(
            "scaling function does not match the filter bank".into(),
        ));
    }
    Ok(refine(f.filter(eps), f.m(), phi))
}

/// `m_ε` on the closed uniform grid over `[0,1]^n`, `grid_points` per axis.
pub fn sample_symbol(f: &FilterBank, eps: usize, grid_points: usize) -> Result<Vec<(Vec<f64>, Complex64)>> {
    if grid_points < 2 {
        return Err(Error::InvalidArgument(
            "symbol grid needs at least 2 points".into(),
        ));
    }
    if eps >= f.dim() {
        return Err(Error::IndexOutOfRange {
            index: eps,
            limit: f.dim(),
        });
    }
    let axis: Vec<f64> = (0..grid_points)
        .map(|i| i as f64 / (grid_points - 1) as f64)
        .collect();
    let xs = vec![axis.clone(); f.n()];
    let vals = crate::filters::SymbolEvaluator::new(f).on_grid(eps, &xs);
    let grid = Grid::new(f.n(), grid_points);
    Ok(vals
        .into_iter()
        .enumerate()
        .map(|(lin, v)| (grid.coords(lin).iter().map(|&i| axis[i]).collect(), v))
        .collect())
}
