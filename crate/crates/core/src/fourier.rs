//! The finite Fourier pair between samples `U_j = U(j/M)` and coefficients
//! `A_k`, plus the half-shift machinery used by the unitarity constraints.
//!
//! The transforms are direct sums, applied one axis at a time, which is exact
//! and cheap at the grid sizes this crate targets (`M ≤ 16`).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::ensemble::{MatrixEnsemble, TrigPolyCoefficients};
use crate::error::{Error, Result};
use crate::grid::{vertex_of, Grid};

fn cis(theta: f64) -> Complex64 {
    Complex64::new(libm::cos(theta), libm::sin(theta))
}

/// Apply `out_j = scale · Σ_k w^{jk} in_k` along every axis, `w = e^{sign·2πi/M}`.
fn transform(data: &mut [Complex64], n: usize, side: usize, mat: usize, sign: f64, scale: f64) {
    let twiddle: Vec<Complex64> = (0..side)
        .map(|t| cis(sign * 2.0 * PI * t as f64 / side as f64))
        .collect();
    let grid = Grid::new(n, side);
    let total = grid.len();
    let mut line = vec![Complex64::new(0.0, 0.0); side * mat];
    for axis in 0..n {
        let stride = grid.stride(axis);
        for base in 0..total {
            // `base` must have coordinate 0 on `axis`
            if !(base / stride).is_multiple_of(side) {
                continue;
            }
            for t in 0..side {
                let src = (base + t * stride) * mat;
                line[t * mat..(t + 1) * mat].copy_from_slice(&data[src..src + mat]);
            }
            for j in 0..side {
                let dst = (base + j * stride) * mat;
                let out = &mut data[dst..dst + mat];
                out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                for k in 0..side {
                    let w = twiddle[(j * k) % side];
                    for (o, x) in out.iter_mut().zip(&line[k * mat..(k + 1) * mat]) {
                        *o += w * x;
                    }
                }
            }
        }
    }
    if scale != 1.0 {
        data.iter_mut().for_each(|z| *z *= scale);
    }
}

/// `U_j = Σ_k A_k e^{−2πi⟨k,j⟩/M}`.
pub fn dft(a: &TrigPolyCoefficients) -> MatrixEnsemble {
    let mut out = a.0.clone();
    let (n, side, dim) = (out.n(), out.side(), out.dim());
    transform(out.data_mut(), n, side, dim * dim, -1.0, 1.0);
    out
}

/// `A_k = M^{−n} Σ_j U_j e^{2πi⟨j,k⟩/M}`.
pub fn idft(u: &MatrixEnsemble) -> TrigPolyCoefficients {
    let mut out = u.clone();
    let (n, side, dim) = (out.n(), out.side(), out.dim());
    let scale = 1.0 / Grid::new(n, side).len() as f64;
    transform(out.data_mut(), n, side, dim * dim, 1.0, scale);
    TrigPolyCoefficients(out)
}

/// `(χ_ℓ A)_k = e^{∓πi⟨k,v_ℓ⟩/M} A_k`; `sign = +1` gives `χ_ℓ`, `−1` its inverse.
pub fn chi(l: usize, a: &TrigPolyCoefficients, sign: i32) -> Result<TrigPolyCoefficients> {
    let inner = &a.0;
    let v = vertex_of(l, inner.n())?;
    let side = inner.side() as f64;
    let s = if sign >= 0 { -1.0 } else { 1.0 };
    let mut out = inner.clone();
    let grid = out.grid();
    let mut coords = vec![0usize; inner.n()];
    for k in 0..out.len() {
        grid.coords_into(k, &mut coords);
        let phase = cis(s * PI * v.dot(&coords) as f64 / side);
        out.entry_mut(k).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(TrigPolyCoefficients(out))
}

/// `S_ℓ U = F_M χ_ℓ F_M^{−1} U` (`sign = +1`) or `S_{−ℓ} U` (`sign = −1`).
///
/// Entry `j` of `S_ℓ U` is the underlying trigonometric polynomial evaluated at
/// `(j + v_ℓ/2)/M`.
pub fn shift_half(l: usize, u: &MatrixEnsemble, sign: i32) -> Result<MatrixEnsemble> {
    vertex_of(l, u.n())?;
    if l == 0 {
        return Ok(u.clone());
    }
    Ok(dft(&chi(l, &idft(u), sign)?))
}

/// One-axis convolution `T_{2^r}`:
///
/// `(T V)_j = (2/M) Σ_{m_r} V_{(.., m_r, ..)} / (1 − e^{2πi(m_r − j_r − 1/2)/M})`,
///
/// which equals `S_{2^r}` applied to the samples of a degree `< M` polynomial.
pub fn t_shift_direct(r: usize, v: &MatrixEnsemble) -> Result<MatrixEnsemble> {
    let n = v.n();
    if r >= n {
        return Err(Error::IndexOutOfRange { index: r, limit: n });
    }
    let side = v.side();
    let grid = v.grid();
    let stride = grid.stride(r);
    // kernel depends on m_r − j_r modulo M only
    let kernel: Vec<Complex64> = (0..side)
        .map(|diff| {
            let theta = 2.0 * PI * (diff as f64 - 0.5) / side as f64;
            (Complex64::new(1.0, 0.0) - cis(theta)).inv() * (2.0 / side as f64)
        })
        .collect();
    let mut out = MatrixEnsemble::zeros(n, side);
    let mat = v.dim() * v.dim();
    for j in 0..grid.len() {
        let jr = (j / stride) % side;
        let base = j - jr * stride;
        let dst = &mut out.data_mut()[j * mat..(j + 1) * mat];
        for mr in 0..side {
            let w = kernel[(mr + side - jr) % side];
            let src = v.entry(base + mr * stride);
            for (o, x) in dst.iter_mut().zip(src) {
                *o += w * x;
            }
        }
    }
    Ok(out)
}

/// `U(ξ) = Σ_k A_k e^{−2πi⟨k,ξ⟩}` as a row-major matrix.
pub fn evaluate_symbol(a: &TrigPolyCoefficients, xi: &[f64]) -> Vec<Complex64> {
    let inner = &a.0;
    let grid = inner.grid();
    let mat = inner.dim() * inner.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); mat];
    let mut coords = vec![0usize; inner.n()];
    for k in 0..inner.len() {
        grid.coords_into(k, &mut coords);
        let dot: f64 = coords.iter().zip(xi).map(|(&c, &x)| c as f64 * x).sum();
        let w = cis(-2.0 * PI * dot);
        for (o, x) in out.iter_mut().zip(inner.entry(k)) {
            *o += w * x;
        }
    }
    out
}
