//! Hermitian eigensolvers and generalized eigenproblems for (PSD, PD) pairs.
//!
//! The full decomposition is a cyclic complex Jacobi sweep. The dominant
//! generalized eigenpair comes from power iteration on `B^{-1} A`, with the
//! eigenvalue read off as the Rayleigh quotient `t^H A t / t^H B t`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::FamaError;
use crate::linalg::{canonical_phase, dot, norm2, normalized, CMatrix, HermitianMatrix, C64, ZERO};

/// Ascending eigenvalues with matching orthonormal eigenvectors stored as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.eigenvectors.column(i)
    }

    /// `V diag(f(lambda)) V^H`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let v = &self.eigenvectors;
        let n = self.dim();
        let scaled: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let m = CMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(ZERO, |acc, k| acc + v[(i, k)] * scaled[k] * v[(j, k)].conj())
        });
        HermitianMatrix::symmetrized(m)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map_spectrum(|l| l)
    }

    pub fn largest(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty decomposition")
    }
}

/// Dominant generalized eigenpair of `(A, B)` in both vector conventions.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedEigenPair {
    pub eigenvalue: f64,
    /// Unit eigenvector of `B^{-1/2} A B^{-1/2}`.
    pub eigenvector_c: Vec<C64>,
    /// Unit-norm `u` with `A u = lambda B u`.
    pub eigenvector_gen: Vec<C64>,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            seed: 0x5eed,
        }
    }
}

/// Iteration cap multiplier: at most `ROTATION_CAP * dim^2` rotations.
const ROTATION_CAP: usize = 100;

pub fn hermitian_eig(c: &HermitianMatrix) -> Result<EigenDecomposition, FamaError> {
    let n = c.dim();
    let mut a = c.as_matrix().clone();
    let mut v = CMatrix::identity(n);
    let cap = ROTATION_CAP * n * n;
    let fro = a.frobenius_norm();
    let mut rotations = 0usize;
    let mut sweep = 0usize;

    loop {
        let off = off_diagonal_norm(&a);
        if off <= f64::EPSILON * fro || off == 0.0 {
            break;
        }
        if rotations >= cap {
            return Err(FamaError::EigenNotConverged {
                rotations,
                off_diagonal: off,
            });
        }
        // Early sweeps only rotate the larger entries.
        let thresh = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = libm::sqrt(apq.norm_sqr());
                if g == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if sweep > 3 && app.abs() + 100.0 * g == app.abs() && aqq.abs() + 100.0 * g == aqq.abs() {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                if g <= thresh {
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, g, app, aqq);
                rotations += 1;
            }
        }
        sweep += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        canonical_phase(&mut col);
        for (i, z) in col.into_iter().enumerate() {
            eigenvectors[(i, dst)] = z;
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigendecomposition of a Hermitian matrix with no imaginary part, by Householder
/// tridiagonalization followed by implicit QL (the EISPACK `tred2`/`tql2` pair).
///
/// Far cheaper than Jacobi for large real matrices such as port correlations.
/// Returns `None` if any entry has a nonzero imaginary part.
pub fn real_symmetric_eig(c: &HermitianMatrix) -> Option<Result<EigenDecomposition, FamaError>> {
    let m = c.as_matrix();
    if m.as_slice().iter().any(|z| z.im != 0.0) {
        return None;
    }
    let n = c.dim();
    let mut v: Vec<f64> = m.as_slice().iter().map(|z| z.re).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n > 0 {
        tridiagonalize(n, &mut v, &mut d, &mut e);
        if let Err(err) = tridiagonal_ql(n, &mut v, &mut d, &mut e) {
            return Some(Err(err));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col: Vec<C64> = (0..n).map(|i| C64::new(v[i * n + src], 0.0)).collect();
        canonical_phase(&mut col);
        for (i, z) in col.into_iter().enumerate() {
            eigenvectors[(i, dst)] = z;
        }
    }
    Some(Ok(EigenDecomposition {
        eigenvalues: order.iter().map(|&i| d[i]).collect(),
        eigenvectors,
    }))
}

/// Householder reduction of the row-major symmetric `v` to tridiagonal form.
/// On return `v` holds the accumulated orthogonal transform, `d` the diagonal and
/// `e[1..]` the subdiagonal.
fn tridiagonalize(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate the transformations.
    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal `(d, e)`, rotating the columns of `v`.
fn tridiagonal_ql(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<(), FamaError> {
    let at = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    let mut sweeps = 0usize;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        let m = m.min(n - 1);
        if m > l {
            loop {
                sweeps += 1;
                if sweeps > ROTATION_CAP * n {
                    return Err(FamaError::EigenNotConverged {
                        rotations: sweeps,
                        off_diagonal: e[l].abs(),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[at(k, i + 1)];
                        v[at(k, i + 1)] = s * v[at(k, i)] + c * h;
                        v[at(k, i)] = c * v[at(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    libm::sqrt(s)
}

/// One unitary Jacobi rotation annihilating `a[p][q]`.
///
/// `U = diag(1, conj(e)) * R` on the (p, q) plane, where `e = a_pq / |a_pq|`
/// makes the pivot real and `R` is the classical real rotation.
#[allow(clippy::too_many_arguments)]
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, apq: C64, g: f64, app: f64, aqq: f64) {
    let n = a.rows();
    let e = apq / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0))
    };
    let c = 1.0 / libm::sqrt(1.0 + t * t);
    let s = t * c;
    let se_conj = e.conj() * s;
    let ce_conj = e.conj() * c;
    let se = e * s;
    let ce = e * c;

    for i in 0..n {
        let x = a[(i, p)];
        let y = a[(i, q)];
        a[(i, p)] = x * c - se_conj * y;
        a[(i, q)] = x * s + ce_conj * y;
    }
    for j in 0..n {
        let x = a[(p, j)];
        let y = a[(q, j)];
        a[(p, j)] = x * c - se * y;
        a[(q, j)] = x * s + ce * y;
    }
    for i in 0..n {
        let x = v[(i, p)];
        let y = v[(i, q)];
        v[(i, p)] = x * c - se_conj * y;
        v[(i, q)] = x * s + ce_conj * y;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(app - t * g, 0.0);
    a[(q, q)] = C64::new(aqq + t * g, 0.0);
}

/// Lower-triangular Cholesky factor `L` with `L L^H = B`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cholesky {
    l: CMatrix,
}

pub fn cholesky_pd(b: &HermitianMatrix) -> Result<Cholesky, FamaError> {
    let n = b.dim();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = b[(j, j)].re;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(FamaError::NotPositiveDefinite {
                index: j,
                value: pivot,
            });
        }
        let d = libm::sqrt(pivot);
        l[(j, j)] = C64::new(d, 0.0);
        for i in (j + 1)..n {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(Cholesky { l })
}

impl Cholesky {
    pub fn factor(&self) -> &CMatrix {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Solves `L y = x`.
    pub fn solve_lower(&self, x: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let mut y = x.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)].re;
        }
        y
    }

    /// Solves `L^H y = x`.
    pub fn solve_upper(&self, x: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let mut y = x.to_vec();
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)].conj() * y[k];
            }
            y[i] = s / self.l[(i, i)].re;
        }
        y
    }

    /// Solves `B y = x`.
    pub fn solve(&self, x: &[C64]) -> Vec<C64> {
        self.solve_upper(&self.solve_lower(x))
    }

    /// `L^{-1}`, lower triangular.
    pub fn inverse_lower(&self) -> CMatrix {
        let n = self.dim();
        let mut inv = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![ZERO; n];
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve_lower(&e);
            for (i, z) in col.into_iter().enumerate() {
                inv[(i, j)] = z;
            }
        }
        inv
    }

    /// `B^{-1} = L^{-H} L^{-1}`.
    pub fn inverse(&self) -> HermitianMatrix {
        let li = self.inverse_lower();
        HermitianMatrix::symmetrized(li.adjoint().matmul(&li))
    }

    /// Diagonal of `B^{-1}`: squared column norms of `L^{-1}`.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let li = self.inverse_lower();
        let n = self.dim();
        (0..n)
            .map(|j| (j..n).map(|i| li[(i, j)].norm_sqr()).sum())
            .collect()
    }

    /// `L^{-1} A L^{-H}`, a Hermitian matrix sharing the generalized spectrum of `(A, B)`.
    pub fn whiten(&self, a: &HermitianMatrix) -> HermitianMatrix {
        let li = self.inverse_lower();
        a.congruence(&li.adjoint())
    }
}

fn positive_spectrum(b: &HermitianMatrix) -> Result<EigenDecomposition, FamaError> {
    let eig = hermitian_eig(b)?;
    if let Some((index, &value)) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .find(|(_, &l)| !(l > 0.0))
    {
        return Err(FamaError::NotPositiveDefinite { index, value });
    }
    Ok(eig)
}

pub fn inv_sqrt_pd(b: &HermitianMatrix) -> Result<HermitianMatrix, FamaError> {
    Ok(positive_spectrum(b)?.map_spectrum(|l| 1.0 / libm::sqrt(l)))
}

pub fn sqrt_pd(b: &HermitianMatrix) -> Result<HermitianMatrix, FamaError> {
    Ok(positive_spectrum(b)?.map_spectrum(libm::sqrt))
}

/// Ascending generalized eigenvalues of the pair `(A, B)` (B positive definite).
pub fn generalized_spectrum(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<Vec<f64>, FamaError> {
    check_same_dim(a, b)?;
    let chol = cholesky_pd(b)?;
    Ok(hermitian_eig(&chol.whiten(a))?.eigenvalues)
}

pub fn dominant_generalized_eigenvalue(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64, FamaError> {
    Ok(*generalized_spectrum(a, b)?.last().expect("non-empty"))
}

fn check_same_dim(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<(), FamaError> {
    if a.dim() != b.dim() {
        return Err(FamaError::Dimension {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Deterministic pseudo-random complex start vector.
pub fn seeded_start(dim: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Outcome of a raw power iteration: unit-norm iterate and its Rayleigh quotient.
#[derive(Clone, Debug)]
pub(crate) struct PowerIterate {
    pub vector: Vec<C64>,
    pub eigenvalue: f64,
    pub iterations: usize,
}

/// Power iteration `t <- B^{-1} A t`.
///
/// Stops once successive Rayleigh quotients agree to `tol * max(lambda, 1)` and
/// the generalized residual `||A t - lambda B t||` is below `1e-9 ||A||_F`
/// (the iterate is unit norm).
pub(crate) fn power_iterate(
    apply_a: impl Fn(&[C64]) -> Vec<C64>,
    apply_b: impl Fn(&[C64]) -> Vec<C64>,
    solve_b: impl Fn(&[C64]) -> Vec<C64>,
    a_norm: f64,
    start: Vec<C64>,
    opts: &PowerOptions,
) -> Result<PowerIterate, FamaError> {
    if a_norm == 0.0 {
        return Err(FamaError::ZeroDominantEigenvalue);
    }
    let mut t = normalized(&start).ok_or(FamaError::ZeroDominantEigenvalue)?;
    let mut prev = f64::NAN;
    let mut change = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let at = apply_a(&t);
        if norm2(&at) == 0.0 {
            return Err(FamaError::ZeroDominantEigenvalue);
        }
        t = normalized(&solve_b(&at)).ok_or(FamaError::ZeroDominantEigenvalue)?;
        let at = apply_a(&t);
        let bt = apply_b(&t);
        let num = dot(&t, &at).re;
        let den = dot(&t, &bt).re;
        if !(num > 0.0) {
            return Err(FamaError::ZeroDominantEigenvalue);
        }
        let lambda = num / den;
        change = (lambda - prev).abs();
        if change <= opts.tol * lambda.max(1.0) {
            let residual = norm2(
                &at.iter()
                    .zip(&bt)
                    .map(|(x, y)| x - y * lambda)
                    .collect::<Vec<_>>(),
            );
            if residual <= 1e-9 * a_norm {
                return Ok(PowerIterate {
                    vector: t,
                    eigenvalue: lambda,
                    iterations: it,
                });
            }
        }
        prev = lambda;
    }
    Err(FamaError::PowerNotConverged {
        iterations: opts.max_iter,
        residual: change,
    })
}

pub fn power_method_gen(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    opts: &PowerOptions,
) -> Result<GeneralizedEigenPair, FamaError> {
    check_same_dim(a, b)?;
    let chol = cholesky_pd(b)?;
    let a_norm = a.as_matrix().frobenius_norm();
    let it = power_iterate(
        |x| a.matvec(x),
        |x| b.matvec(x),
        |x| chol.solve(x),
        a_norm,
        seeded_start(a.dim(), opts.seed),
        opts,
    )?;
    let mut gen = it.vector;
    canonical_phase(&mut gen);
    let mut c = normalized(&sqrt_pd(b)?.matvec(&gen)).ok_or(FamaError::ZeroDominantEigenvalue)?;
    canonical_phase(&mut c);
    Ok(GeneralizedEigenPair {
        eigenvalue: it.eigenvalue,
        eigenvector_c: c,
        eigenvector_gen: gen,
        iterations: it.iterations,
    })
}

/// Squared eigenvector weight of port `l` in the whitening that pivots `l` last.
///
/// For each `l` this is `|u_l|^2 / ((B^{-1})_{ll} u^H B u)`. It equals the squared
/// `l`-th entry of the unit eigenvector of `L^{-1} A L^{-H}` for a Cholesky
/// factor `L` ordered with `l` last, whose `l`-deleted principal minor has exactly
/// the generalized spectrum of the reduced pair. It is invariant to the scale of `u`.
pub fn pivoted_weights(u: &[C64], b_inv_diag: &[f64], u_b_u: f64) -> Vec<f64> {
    u.iter()
        .zip(b_inv_diag)
        .map(|(z, &d)| z.norm_sqr() / (d * u_b_u))
        .collect()
}

/// Both sides of the eigenvector-eigenvalue identity for a Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Some eigenvalue gap is at most `1e-9 * spread`.
    pub degenerate: bool,
}

/// `lhs = |v_{i,l}|^2 prod_{n != i} (lambda_i - lambda_n)`,
/// `rhs = prod_n (lambda_i - alpha_{l,n})` with `alpha` the spectrum of the `l`-deleted minor.
pub fn eigenvector_eigenvalue_identity_check(
    c: &HermitianMatrix,
    i: usize,
    l: usize,
) -> Result<IdentityCheck, FamaError> {
    let n = c.dim();
    for idx in [i, l] {
        if idx >= n {
            return Err(FamaError::Index { index: idx, dim: n });
        }
    }
    if n < 2 {
        return Err(FamaError::Dimension { expected: 2, found: n });
    }
    let full = hermitian_eig(c)?;
    let minor = hermitian_eig(&c.remove_index(l))?;
    let lam = &full.eigenvalues;
    let li = lam[i];
    let weight = full.eigenvectors[(l, i)].norm_sqr();
    let lhs = weight
        * lam
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, &x)| li - x)
            .product::<f64>();
    let rhs = minor.eigenvalues.iter().map(|&a| li - a).product::<f64>();
    Ok(IdentityCheck {
        lhs,
        rhs,
        degenerate: has_degenerate_gap(lam),
    })
}

/// True when two ascending eigenvalues sit within `1e-9 * spread` of each other.
pub fn has_degenerate_gap(ascending: &[f64]) -> bool {
    let spread = spread(ascending);
    ascending.windows(2).any(|w| w[1] - w[0] <= 1e-9 * spread)
}

pub fn spread(ascending: &[f64]) -> f64 {
    match (ascending.first(), ascending.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0.0,
    }
}

/// Cauchy interlacing `full[i] <= minor[i] <= full[i+1]` with absolute `slack`.
pub fn interlaces(full: &[f64], minor: &[f64], slack: f64) -> bool {
    minor.len() + 1 == full.len()
        && minor
            .iter()
            .enumerate()
            .all(|(i, &a)| full[i] - slack <= a && a <= full[i + 1] + slack)
}

pub fn interlacing_check(c: &HermitianMatrix, l: usize) -> Result<bool, FamaError> {
    let n = c.dim();
    if l >= n {
        return Err(FamaError::Index { index: l, dim: n });
    }
    if n < 2 {
        return Err(FamaError::Dimension { expected: 2, found: n });
    }
    let full = hermitian_eig(c)?.eigenvalues;
    let minor = hermitian_eig(&c.remove_index(l))?.eigenvalues;
    Ok(interlaces(&full, &minor, 1e-10 * spread(&full)))
}
