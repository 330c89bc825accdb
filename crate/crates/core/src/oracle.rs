//! Brute-force references for the fast receiver paths.
//!
//! Nothing here is meant to be quick. The exhaustive search enumerates every
//! port subset, and the Lemma-1 recomputation rebuilds full generalized spectra
//! for the pair and for each port-deleted minor.

use alloc::vec::Vec;

use crate::eig::{cholesky_pd, generalized_spectrum, hermitian_eig, interlaces, spread};
use crate::error::FamaError;
use crate::linalg::HermitianMatrix;
use crate::receivers::{solve_combiner, SignalMatrixPair};

pub const SUBSET_LIMIT: u128 = 1_000_000;
pub const LEMMA_MAX_DIM: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub best_ports: Vec<usize>,
    pub best_sinr: f64,
    pub evaluated_subsets: u128,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Next lexicographic `l`-combination of `0..n`, in place.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let l = idx.len();
    let Some(i) = (0..l).rev().find(|&i| idx[i] < n - l + i) else {
        return false;
    };
    idx[i] += 1;
    for j in (i + 1)..l {
        idx[j] = idx[j - 1] + 1;
    }
    true
}

/// Best `l`-port subset by exhaustive enumeration; ties keep the lexicographically first.
pub fn exhaustive_best_subset(pair: &SignalMatrixPair, l: usize) -> Result<OracleResult, FamaError> {
    let n = pair.dim();
    if l == 0 || l > n {
        return Err(FamaError::Config("active ports must satisfy 1 <= L <= N"));
    }
    let count = binomial(n, l);
    if count > SUBSET_LIMIT {
        return Err(FamaError::SubsetLimit {
            n,
            l,
            count,
            limit: SUBSET_LIMIT,
        });
    }
    let mut idx: Vec<usize> = (0..l).collect();
    let mut best_ports = idx.clone();
    let mut best_sinr = f64::NEG_INFINITY;
    let mut evaluated = 0u128;
    loop {
        let sinr = solve_combiner(pair, &idx)?.sinr;
        evaluated += 1;
        if sinr > best_sinr {
            best_sinr = sinr;
            best_ports.copy_from_slice(&idx);
        }
        if !next_combination(&mut idx, n) {
            break;
        }
    }
    Ok(OracleResult {
        best_ports,
        best_sinr,
        evaluated_subsets: evaluated,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma1Sides {
    /// `|v_{N,l}|^2 (lambda_N - lambda_{N-1}) prod_{t<N-1} (lambda_N - lambda_t) / (lambda_N - alpha_{l,t})`.
    pub product_form: f64,
    /// `lambda_N - alpha_{l,N-1}`.
    pub direct_form: f64,
    pub lambda_top: f64,
    /// The top gap `lambda_N - lambda_{N-1}` is below `1e-9 * spread`.
    pub ill_conditioned: bool,
}

/// Squared weight of port `l` in the dominant eigenvector of the pair whitened by a
/// Cholesky factor ordered with `l` last. Deleting the last row and column of that
/// whitened matrix leaves exactly the whitened `l`-deleted pair.
fn last_pivot_weight(pair: &SignalMatrixPair, l: usize) -> Result<f64, FamaError> {
    let n = pair.dim();
    let order: Vec<usize> = (0..n).filter(|&i| i != l).chain(core::iter::once(l)).collect();
    let a = pair.a().principal(&order);
    let b = pair.b().principal(&order);
    let whitened = cholesky_pd(&b)?.whiten(&a);
    let eig = hermitian_eig(&whitened)?;
    Ok(eig.eigenvectors[(n - 1, n - 1)].norm_sqr())
}

/// Both sides of the port-removal SINR identity from dense spectra.
pub fn lemma1_both_sides(pair: &SignalMatrixPair, l: usize) -> Result<Lemma1Sides, FamaError> {
    let n = pair.dim();
    if n < 2 {
        return Err(FamaError::Dimension { expected: 2, found: n });
    }
    if n > LEMMA_MAX_DIM {
        return Err(FamaError::Dimension {
            expected: LEMMA_MAX_DIM,
            found: n,
        });
    }
    if l >= n {
        return Err(FamaError::Index { index: l, dim: n });
    }
    let lambda = generalized_spectrum(pair.a(), pair.b())?;
    let reduced = pair.remove(l);
    let alpha = generalized_spectrum(reduced.a(), reduced.b())?;
    let top = lambda[n - 1];
    let weight = last_pivot_weight(pair, l)?;
    let ratio: f64 = (0..n - 2).map(|t| (top - lambda[t]) / (top - alpha[t])).product();
    let product_form = weight * (top - lambda[n - 2]) * ratio;
    let direct_form = top - alpha[n - 2];
    Ok(Lemma1Sides {
        product_form,
        direct_form,
        lambda_top: top,
        ill_conditioned: top - lambda[n - 2] < 1e-9 * spread(&lambda),
    })
}

/// Interlacing of the generalized spectra of a pair and its `l`-deleted minor.
pub fn pair_interlacing_check(pair: &SignalMatrixPair, l: usize) -> Result<bool, FamaError> {
    let full = generalized_spectrum(pair.a(), pair.b())?;
    let reduced = pair.remove(l);
    let minor = generalized_spectrum(reduced.a(), reduced.b())?;
    Ok(interlaces(&full, &minor, 1e-10 * spread(&full)))
}

/// Interlacing for every single-index principal minor of `c`.
pub fn all_minors_interlace(c: &HermitianMatrix) -> Result<bool, FamaError> {
    let full = hermitian_eig(c)?.eigenvalues;
    let slack = 1e-10 * spread(&full);
    for l in 0..c.dim() {
        let minor = hermitian_eig(&c.remove_index(l))?.eigenvalues;
        if !interlaces(&full, &minor, slack) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMatrix, C64};
    use alloc::vec;

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(12, 2), 66);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(100, 50), 100891344545564193334812497256);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut idx = vec![0, 1];
        let mut seen = vec![idx.clone()];
        while next_combination(&mut idx, 4) {
            seen.push(idx.clone());
        }
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
    }

    #[test]
    fn subset_guard() {
        let a: Vec<C64> = (0..40).map(|i| C64::new(i as f64, 0.0)).collect();
        let pair = SignalMatrixPair::rank_one(a, HermitianMatrix::identity(40)).unwrap();
        assert!(matches!(
            exhaustive_best_subset(&pair, 20),
            Err(FamaError::SubsetLimit { .. })
        ));
    }

    #[test]
    fn two_by_two_lemma_by_hand() {
        // A = [[2,1],[1,2]], B = I: lambda = (1, 3); deleting port 0 leaves alpha = 2.
        let a = CMatrix::from_row_major(
            2,
            2,
            vec![C64::new(2.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
        );
        let pair = SignalMatrixPair::new(HermitianMatrix::new(a).unwrap(), HermitianMatrix::identity(2)).unwrap();
        let s = lemma1_both_sides(&pair, 0).unwrap();
        assert!((s.product_form - 1.0).abs() < 1e-14);
        assert!((s.direct_form - 1.0).abs() < 1e-14);
    }
}
