//! Small complex linear-algebra helpers over `nalgebra` dense matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;

/// Draws one circularly-symmetric complex Gaussian sample with the given variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * scale, im * scale)
}

pub fn frobenius_sq(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn is_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Eigenvalues of the Hermitian PSD matrix `A·Aᴴ`, sorted in descending order
/// and clamped at zero.
pub fn gram_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let gram = a * a.adjoint();
    let eig = gram.symmetric_eigen();
    let mut values: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0)).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

/// Singular values and right singular vectors of `h`, sorted by descending
/// singular value with ties kept in index order.
///
/// Returns `(sigma, v)` where `v` is `ncols × min(nrows, ncols)` and column `i`
/// is the right singular vector paired with `sigma[i]`.
pub fn sorted_svd(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let svd = h.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v = CMatrix::from_fn(h.ncols(), order.len(), |r, c| v_t[(order[c], r)].conj());
    (sigma, v)
}

pub fn singular_values(h: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = h.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}
