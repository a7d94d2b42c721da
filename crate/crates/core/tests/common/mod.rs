#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn gaussian_ish(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

pub fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian_ish(r))
}

/// Unitary from the QR factorization of a random matrix.
pub fn random_unitary(r: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    random_matrix(r, n, n).qr().q()
}

/// Random point of the open ball of `C^d` with norm at most `max_norm`.
pub fn random_ball_point(r: &mut ChaCha8Rng, d: usize, max_norm: f64) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| gaussian_ish(r)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = max_norm * r.gen_range(0.05f64..1.0).sqrt();
    v.into_iter().map(|z| z * (target / n)).collect()
}

/// Number of eigenvalues of the Hermitian `a` below `t`, from the signs of
/// the pivots of an unpivoted `LDL^H` of `a - t I` (Sylvester inertia). The
/// pivots are ratios of consecutive leading principal minors.
pub fn count_below(a: &DMatrix<Complex64>, t: f64) -> usize {
    let n = a.nrows();
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] -= t;
    }
    let mut negatives = 0;
    for k in 0..n {
        let mut p = m[(k, k)].re;
        if p == 0.0 {
            p = -1e-300;
        }
        if p < 0.0 {
            negatives += 1;
        }
        for i in (k + 1)..n {
            let l = m[(i, k)] / p;
            for j in (k + 1)..n {
                let v = l * m[(k, j)];
                m[(i, j)] -= v;
            }
        }
    }
    negatives
}

/// Smallest eigenvalue by bisection on the inertia count.
pub fn min_eig_oracle(a: &DMatrix<Complex64>) -> f64 {
    let bound: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(a, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
