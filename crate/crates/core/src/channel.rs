//! Fluid-antenna port geometry, Bessel spatial correlation and correlated
//! Rayleigh channel draws.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::eig::{hermitian_eig, real_symmetric_eig};
use crate::error::FamaError;
use crate::linalg::{CMatrix, HermitianMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TopologyKind {
    /// Uniform linear array.
    Line,
    /// Uniform planar grid, flattened row-major.
    Grid,
    /// Arbitrary positions supplied by the caller.
    Custom,
}

/// Port layout in wavelength units.
#[derive(Clone, Debug, PartialEq)]
pub struct PortTopology {
    kind: TopologyKind,
    counts: (usize, usize),
    extent: (f64, f64),
    positions: Vec<(f64, f64)>,
}

fn axis(count: usize, extent: f64) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| {
        if count < 2 {
            0.0
        } else {
            i as f64 * extent / (count - 1) as f64
        }
    })
}

fn check_axis(count: usize, extent: f64) -> Result<(), FamaError> {
    if count == 0 {
        return Err(FamaError::Topology("port count must be at least 1"));
    }
    if !(extent >= 0.0) || !extent.is_finite() {
        return Err(FamaError::Topology("extent must be a finite non-negative length"));
    }
    if count >= 2 && extent == 0.0 {
        return Err(FamaError::Topology("two or more ports need a positive extent"));
    }
    Ok(())
}

impl PortTopology {
    /// `n` ports equally spaced over `w` wavelengths.
    pub fn line(n: usize, w: f64) -> Result<Self, FamaError> {
        check_axis(n, w)?;
        Ok(Self {
            kind: TopologyKind::Line,
            counts: (n, 1),
            extent: (w, 0.0),
            positions: axis(n, w).map(|x| (x, 0.0)).collect(),
        })
    }

    /// `n1 x n2` grid over `w1 x w2` wavelengths; port `(i, j)` maps to `i * n2 + j`.
    pub fn grid(n1: usize, n2: usize, w1: f64, w2: f64) -> Result<Self, FamaError> {
        check_axis(n1, w1)?;
        check_axis(n2, w2)?;
        n1.checked_mul(n2)
            .ok_or(FamaError::Topology("N1 * N2 overflows"))?;
        let ys: Vec<f64> = axis(n2, w2).collect();
        let positions = axis(n1, w1)
            .flat_map(|x| ys.iter().map(move |&y| (x, y)))
            .collect();
        Ok(Self {
            kind: TopologyKind::Grid,
            counts: (n1, n2),
            extent: (w1, w2),
            positions,
        })
    }

    /// Arbitrary port positions; coincident ports are allowed.
    pub fn from_positions(positions: Vec<(f64, f64)>) -> Result<Self, FamaError> {
        if positions.is_empty() {
            return Err(FamaError::Topology("port count must be at least 1"));
        }
        if positions.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(FamaError::Topology("positions must be finite"));
        }
        Ok(Self {
            kind: TopologyKind::Custom,
            counts: (positions.len(), 1),
            extent: (0.0, 0.0),
            positions,
        })
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn counts(&self) -> (usize, usize) {
        self.counts
    }

    pub fn extent(&self) -> (f64, f64) {
        self.extent
    }

    pub fn num_ports(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    /// Euclidean distance in wavelengths. Uniform layouts use index offsets times
    /// the spacing, so equal offsets give bit-identical distances.
    pub fn distance(&self, r: usize, s: usize) -> f64 {
        match self.kind {
            TopologyKind::Line | TopologyKind::Grid => {
                let (n1, n2) = self.counts;
                let step = |count: usize, extent: f64| {
                    if count < 2 {
                        0.0
                    } else {
                        extent / (count - 1) as f64
                    }
                };
                let di = (r / n2).abs_diff(s / n2) as f64 * step(n1, self.extent.0);
                let dj = (r % n2).abs_diff(s % n2) as f64 * step(n2, self.extent.1);
                libm::hypot(di, dj)
            }
            TopologyKind::Custom => {
                let (xr, yr) = self.positions[r];
                let (xs, ys) = self.positions[s];
                libm::hypot(xr - xs, yr - ys)
            }
        }
    }
}

/// Zeroth-order Bessel function of the first kind.
pub fn bessel_j0(x: f64) -> f64 {
    libm::j0(x)
}

/// Spatial correlation `J0(2 pi d)` together with its PSD square root.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    sigma: HermitianMatrix,
    sqrt: CMatrix,
    min_eigenvalue: f64,
    max_eigenvalue: f64,
}

/// Negative eigenvalues down to `-PSD_CLAMP_TOL * lambda_max` are zeroed.
pub const PSD_CLAMP_TOL: f64 = 1e-10;

impl CorrelationMatrix {
    pub fn sigma(&self) -> &HermitianMatrix {
        &self.sigma
    }

    /// `V diag(sqrt(max(lambda, 0))) V^H`.
    pub fn sqrt_factor(&self) -> &CMatrix {
        &self.sqrt
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    /// Smallest eigenvalue before clamping.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.max_eigenvalue
    }

    /// Wraps an explicit correlation matrix, running the same PSD repair.
    pub fn from_sigma(sigma: HermitianMatrix) -> Result<Self, FamaError> {
        let eig = match real_symmetric_eig(&sigma) {
            Some(eig) => eig?,
            None => hermitian_eig(&sigma)?,
        };
        let max = eig.largest();
        let min = eig.eigenvalues[0];
        let tolerance = -PSD_CLAMP_TOL * max.abs();
        if min < tolerance {
            return Err(FamaError::CorrelationNotPsd {
                eigenvalue: min,
                tolerance,
            });
        }
        let sqrt = eig
            .map_spectrum(|l| libm::sqrt(l.max(0.0)))
            .into_matrix();
        Ok(Self {
            sigma,
            sqrt,
            min_eigenvalue: min,
            max_eigenvalue: max,
        })
    }
}

pub fn correlation_matrix(topology: &PortTopology) -> Result<CorrelationMatrix, FamaError> {
    let n = topology.num_ports();
    let mut m = CMatrix::identity(n);
    for r in 0..n {
        for s in (r + 1)..n {
            let v = C64::new(bessel_j0(2.0 * PI * topology.distance(r, s)), 0.0);
            m[(r, s)] = v;
            m[(s, r)] = v;
        }
    }
    CorrelationMatrix::from_sigma(HermitianMatrix::new(m)?)
}

/// Per-user `N x M` channel matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    users: Vec<CMatrix>,
}

impl ChannelRealization {
    pub fn new(users: Vec<CMatrix>) -> Result<Self, FamaError> {
        let first = users.first().ok_or(FamaError::Empty)?;
        let (n, m) = (first.rows(), first.cols());
        for h in &users {
            if h.rows() != n {
                return Err(FamaError::Dimension {
                    expected: n,
                    found: h.rows(),
                });
            }
            if h.cols() != m {
                return Err(FamaError::Dimension {
                    expected: m,
                    found: h.cols(),
                });
            }
        }
        Ok(Self { users })
    }

    pub fn user(&self, k: usize) -> &CMatrix {
        &self.users[k]
    }

    pub fn users(&self) -> &[CMatrix] {
        &self.users
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn num_ports(&self) -> usize {
        self.users[0].rows()
    }

    pub fn num_antennas(&self) -> usize {
        self.users[0].cols()
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for `(master_seed, trial, user)`.
///
/// The ChaCha key depends on `(master_seed, trial)`; the user index selects the
/// ChaCha stream, so streams never overlap and need no ordering between workers.
pub fn trial_stream(master_seed: u64, trial: u64, user: u64) -> ChaCha8Rng {
    let mut state = master_seed;
    let _ = splitmix64(&mut state);
    state ^= trial.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(user);
    rng
}

/// Unit-power circular complex Gaussian: real and imaginary parts `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// One user's `N x M` matrix with i.i.d. `CN(0, Sigma)` columns.
pub fn sample_user_channel<R: Rng + ?Sized>(corr: &CorrelationMatrix, m: usize, rng: &mut R) -> CMatrix {
    let n = corr.dim();
    let mut h = CMatrix::zeros(n, m);
    for col in 0..m {
        let z: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        for (r, v) in corr.sqrt_factor().matvec(&z).into_iter().enumerate() {
            h[(r, col)] = v;
        }
    }
    h
}

/// Draws all `k` users of one trial, user `u` from `trial_stream(master_seed, trial, u)`.
pub fn sample_channels(
    corr: &CorrelationMatrix,
    m: usize,
    k: usize,
    master_seed: u64,
    trial: u64,
) -> Result<ChannelRealization, FamaError> {
    if m == 0 || k == 0 {
        return Err(FamaError::Config("M and K must be at least 1"));
    }
    let users = (0..k)
        .map(|u| sample_user_channel(corr, m, &mut trial_stream(master_seed, trial, u as u64)))
        .collect();
    ChannelRealization::new(users)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn line_positions() {
        let t = PortTopology::line(2, 1.0).unwrap();
        assert_eq!(t.positions(), &[(0.0, 0.0), (1.0, 0.0)]);
        let t = PortTopology::line(100, 4.0).unwrap();
        assert!((t.positions()[1].0 - 4.0 / 99.0).abs() < 1e-15);
        assert_eq!(t.positions()[99].0, 4.0);
        let t = PortTopology::line(1, 0.0).unwrap();
        assert_eq!(t.positions(), &[(0.0, 0.0)]);
    }

    #[test]
    fn grid_positions_row_major() {
        let t = PortTopology::grid(60, 15, 4.0, 1.0).unwrap();
        assert_eq!(t.num_ports(), 900);
        assert!((t.positions()[15].0 - 4.0 / 59.0).abs() < 1e-15);
        assert!((t.positions()[1].1 - 1.0 / 14.0).abs() < 1e-15);
        assert_eq!(t.positions()[2 * 15 + 3], (2.0 * 4.0 / 59.0, 3.0 / 14.0));
    }

    #[test]
    fn topology_validation() {
        assert!(PortTopology::line(0, 1.0).is_err());
        assert!(PortTopology::line(3, 0.0).is_err());
        assert!(PortTopology::line(3, -1.0).is_err());
        assert!(PortTopology::grid(usize::MAX, 2, 1.0, 1.0).is_err());
        assert!(PortTopology::grid(2, 0, 1.0, 1.0).is_err());
    }

    #[test]
    fn correlation_unit_diagonal_and_toeplitz() {
        let t = PortTopology::line(7, 2.0).unwrap();
        let c = correlation_matrix(&t).unwrap();
        let s = c.sigma();
        for r in 0..7 {
            assert_eq!(s[(r, r)].re, 1.0);
            for q in 0..7 {
                assert_eq!(s[(r, q)].im, 0.0);
                assert_eq!(s[(r, q)], s[(q, r)]);
            }
        }
        for r in 1..7 {
            for q in 1..7 {
                assert_eq!(s[(r, q)], s[(r - 1, q - 1)]);
            }
        }
    }

    #[test]
    fn colocated_ports_are_singular_but_repaired() {
        let t = PortTopology::from_positions(vec![(0.0, 0.0), (0.0, 0.0), (0.3, 0.0)]).unwrap();
        let c = correlation_matrix(&t).unwrap();
        assert_eq!(c.sigma()[(0, 1)].re, 1.0);
        assert!(c.min_eigenvalue().abs() < 1e-12);
        let mut rng = trial_stream(7, 0, 0);
        for _ in 0..50 {
            let h = sample_user_channel(&c, 2, &mut rng);
            for col in 0..2 {
                assert!((h[(0, col)] - h[(1, col)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn non_psd_sigma_rejected() {
        let s = HermitianMatrix::from_real_diagonal(&[1.0, -0.5]);
        assert!(matches!(
            CorrelationMatrix::from_sigma(s),
            Err(FamaError::CorrelationNotPsd { .. })
        ));
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let c = correlation_matrix(&PortTopology::line(4, 1.0).unwrap()).unwrap();
        let a = sample_channels(&c, 3, 3, 42, 5).unwrap();
        let b = sample_channels(&c, 3, 3, 42, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.user(0), a.user(1));
        let d = sample_channels(&c, 3, 3, 42, 6).unwrap();
        assert_ne!(a.user(0), d.user(0));
    }
}
