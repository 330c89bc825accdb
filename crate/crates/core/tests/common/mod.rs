#![allow(dead_code)]

use fama_core::{CMatrix, HermitianMatrix, SignalMatrixPair, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cgauss(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(rand_distr::StandardNormal);
    let im: f64 = rng.sample(rand_distr::StandardNormal);
    C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

pub fn cvec(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| cgauss(rng)).collect()
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| cgauss(rng))
}

/// GUE-like Hermitian matrix: simple spectrum with probability one.
pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
    let g = gaussian_matrix(rng, n, n);
    HermitianMatrix::new(g.add(&g.adjoint()).scale(C64::new(0.5, 0.0))).unwrap()
}

/// `G G^H + shift I`, positive definite.
pub fn random_pd(rng: &mut impl Rng, n: usize, shift: f64) -> HermitianMatrix {
    let g = gaussian_matrix(rng, n, n);
    HermitianMatrix::new(g.matmul(&g.adjoint())).unwrap().add_identity(shift)
}

/// Full-rank PSD numerator.
pub fn random_psd(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
    let g = gaussian_matrix(rng, n, n);
    HermitianMatrix::new(g.matmul(&g.adjoint())).unwrap()
}

/// FAMA-style pair: rank-one desired signal over `interferers` columns plus noise.
pub fn fama_pair(rng: &mut impl Rng, n: usize, interferers: usize, snr: f64) -> SignalMatrixPair {
    let a = cvec(rng, n);
    let g: Vec<Vec<C64>> = (0..interferers).map(|_| cvec(rng, n)).collect();
    SignalMatrixPair::from_columns(a, &g, snr).unwrap()
}

pub fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1e-300)
}

/// Gauss-Jordan inverse with partial pivoting, independent of the library solvers.
pub fn gauss_jordan_inverse(m: &CMatrix) -> CMatrix {
    let n = m.rows();
    let mut a: Vec<Vec<C64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut inv: Vec<Vec<C64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).unwrap();
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                for j in 0..n {
                    let (ac, ic) = (a[col][j], inv[col][j]);
                    a[i][j] -= f * ac;
                    inv[i][j] -= f * ic;
                }
            }
        }
    }
    CMatrix::from_fn(n, n, |i, j| inv[i][j])
}

pub fn quad(m: &CMatrix, x: &[C64]) -> C64 {
    let mx = m.matvec(x);
    x.iter().zip(&mx).map(|(a, b)| a.conj() * b).sum()
}
