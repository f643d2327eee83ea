//! Nearest unitary matrices in the Frobenius norm.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

/// `U V^*` from the SVD `X = U Σ V^*`.
///
/// Minimises `‖X − Y‖_F` over unitary `Y`. When `X` is singular the minimiser
/// is not unique and whichever one the decomposition yields is returned.
pub fn nearest_unitary(x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    assert!(x.is_square(), "nearest_unitary needs a square matrix");
    let svd = x.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^*");
    u * v_t
}

/// Row-major variant of [`nearest_unitary`], overwriting `x` in place.
pub fn nearest_unitary_in_place(x: &mut [Complex64], dim: usize) {
    let m = DMatrix::from_row_slice(dim, dim, x);
    let p = nearest_unitary(&m);
    for r in 0..dim {
        for c in 0..dim {
            x[r * dim + c] = p[(r, c)];
        }
    }
}

/// Closest matrix of the form `diag(1, W)` with `W` unitary of size `dim − 1`.
pub fn project_one_tensor_unitary(x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    assert!(x.is_square() && x.nrows() >= 1);
    let dim = x.nrows();
    let mut out = DMatrix::zeros(dim, dim);
    out[(0, 0)] = Complex64::new(1.0, 0.0);
    if dim > 1 {
        let w = nearest_unitary(&x.view((1, 1), (dim - 1, dim - 1)).into_owned());
        out.view_mut((1, 1), (dim - 1, dim - 1)).copy_from(&w);
    }
    out
}

pub fn project_one_tensor_unitary_in_place(x: &mut [Complex64], dim: usize) {
    let m = DMatrix::from_row_slice(dim, dim, x);
    let p = project_one_tensor_unitary(&m);
    let flat: Vec<Complex64> = (0..dim * dim).map(|i| p[(i / dim, i % dim)]).collect();
    x.copy_from_slice(&flat);
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fro(m: &DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn is_unitary(m: &DMatrix<Complex64>, tol: f64) -> bool {
        let id = DMatrix::<Complex64>::identity(m.nrows(), m.ncols());
        fro(&(m.adjoint() * m - id)) < tol
    }

    /// Every 2×2 unitary: `e^{iφ} [[a, b], [−b̄, ā]]`, `|a|²+|b|²=1`.
    fn su2(phi: f64, theta: f64, alpha: f64, beta: f64) -> DMatrix<Complex64> {
        let a = Complex64::from_polar(theta.cos(), alpha);
        let b = Complex64::from_polar(theta.sin(), beta);
        let g = Complex64::from_polar(1.0, phi);
        DMatrix::from_row_slice(2, 2, &[g * a, g * b, -g * b.conj(), g * a.conj()])
    }

    #[test]
    fn identity_and_scaled_unitary_fixed() {
        let id = DMatrix::<Complex64>::identity(2, 2);
        assert!(fro(&(nearest_unitary(&id) - &id)) < 1e-14);
        let x = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(fro(&(nearest_unitary(&x) - &id)) < 1e-14);
        let u = su2(0.3, 0.7, 1.1, -0.4);
        assert!(fro(&(nearest_unitary(&u.scale(3.0)) - &u)) < 1e-13);
    }

    #[test]
    fn one_tensor_fixes_corner() {
        let x = DMatrix::from_row_slice(2, 2, &[c(5.0, 1.0), c(3.0, 0.0), c(-2.0, 0.0), c(0.0, 2.0)]);
        let p = project_one_tensor_unitary(&x);
        assert_eq!(p[(0, 0)], c(1.0, 0.0));
        assert_eq!(p[(0, 1)], c(0.0, 0.0));
        assert_eq!(p[(1, 0)], c(0.0, 0.0));
        assert!((p[(1, 1)] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn brute_force_oracle_2x2() {
        let samples = [
            [c(0.3, -1.2), c(0.8, 0.1), c(-0.5, 0.5), c(1.4, 0.2)],
            [c(2.0, 0.0), c(1.0, 1.0), c(0.0, -1.0), c(-0.7, 0.3)],
        ];
        for s in samples {
            let x = DMatrix::from_row_slice(2, 2, &s);
            let p = nearest_unitary(&x);
            let best = fro(&(&x - &p));
            let steps = 24;
            let mut brute = f64::INFINITY;
            for i in 0..steps {
                for t in 0..=steps / 2 {
                    for a in 0..steps {
                        for b in 0..steps {
                            let u = su2(
                                2.0 * PI * i as f64 / steps as f64,
                                PI * t as f64 / steps as f64,
                                2.0 * PI * a as f64 / steps as f64,
                                2.0 * PI * b as f64 / steps as f64,
                            );
                            brute = brute.min(fro(&(&x - u)));
                        }
                    }
                }
            }
            assert!(best <= brute + 1e-12, "svd {best} vs grid {brute}");
            // grid spacing bounds how far the brute search can lag behind
            assert!(brute - best < 0.5);
        }
    }

    fn complex_matrix(dim: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
        proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), dim * dim).prop_map(move |v| {
            let data: Vec<Complex64> = v.into_iter().map(|(r, i)| c(r, i)).collect();
            DMatrix::from_row_slice(dim, dim, &data)
        })
    }

    proptest! {
        #[test]
        fn projection_is_unitary_idempotent_and_closest(
            x in (1usize..5).prop_flat_map(complex_matrix),
            params in proptest::collection::vec((0.0f64..6.3, 0.0f64..1.6, 0.0f64..6.3, 0.0f64..6.3), 8),
        ) {
            let p = nearest_unitary(&x);
            prop_assert!(is_unitary(&p, 1e-10));
            let pp = nearest_unitary(&p);
            prop_assert!(fro(&(&pp - &p)) < 1e-10);
            let d = fro(&(&x - &p));
            if x.nrows() == 2 {
                for (phi, theta, a, b) in params {
                    prop_assert!(d <= fro(&(&x - su2(phi, theta, a, b))) + 1e-10);
                }
            }
            let id = DMatrix::<Complex64>::identity(x.nrows(), x.nrows());
            prop_assert!(d <= fro(&(&x - id)) + 1e-10);
        }

        #[test]
        fn one_tensor_projection_shape(x in (2usize..5).prop_flat_map(complex_matrix)) {
            let p = project_one_tensor_unitary(&x);
            prop_assert!(is_unitary(&p, 1e-10));
            prop_assert_eq!(p[(0, 0)], c(1.0, 0.0));
            for i in 1..x.nrows() {
                prop_assert_eq!(p[(0, i)], c(0.0, 0.0));
                prop_assert_eq!(p[(i, 0)], c(0.0, 0.0));
            }
            let q = project_one_tensor_unitary(&p);
            prop_assert!(fro(&(&q - &p)) < 1e-10);
        }
    }
}
