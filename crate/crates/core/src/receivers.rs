//! Receiver-side designs for multiport slow-FAMA users.
//!
//! Each user `k` sees the pair `(A, B)` with `A = h_k h_k^H` (the desired column
//! of its channel matrix) and `B = sum_{j != k} h_j h_j^H + I / snr`. A design is a
//! set of active ports plus a unit-norm combiner over them. Port indices are
//! zero-based throughout the library.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;
use core::fmt;
use core::str::FromStr;

use crate::channel::{ChannelRealization, PortTopology};
use crate::eig::{
    cholesky_pd, generalized_spectrum, hermitian_eig, pivoted_weights, power_iterate, power_method_gen,
    seeded_start, sqrt_pd, Cholesky, PowerIterate, PowerOptions,
};
use crate::error::FamaError;
use crate::linalg::{canonical_phase, dot, norm2, normalized, CMatrix, HermitianMatrix, C64, ONE, ZERO};

/// System parameters shared by every user. `M = K = users`; `snr` is linear.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig {
    pub users: usize,
    pub active_ports: usize,
    pub snr: f64,
    pub topology: PortTopology,
}

impl SystemConfig {
    pub fn new(users: usize, active_ports: usize, snr: f64, topology: PortTopology) -> Result<Self, FamaError> {
        let cfg = Self {
            users,
            active_ports,
            snr,
            topology,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), FamaError> {
        if self.users == 0 {
            return Err(FamaError::Config("at least one user is required"));
        }
        if self.active_ports == 0 || self.active_ports > self.topology.num_ports() {
            return Err(FamaError::Config("active ports must satisfy 1 <= L <= N"));
        }
        if !(self.snr > 0.0) || !self.snr.is_finite() {
            return Err(FamaError::Config("snr must be positive and finite"));
        }
        Ok(())
    }

    pub fn num_ports(&self) -> usize {
        self.topology.num_ports()
    }
}

/// `B = G G^H + noise * I`, kept in factored form for the structured fast paths.
#[derive(Clone, Debug, PartialEq)]
pub struct LowRankInterference {
    /// `N x r` interfering columns.
    pub columns: CMatrix,
    pub noise: f64,
}

impl LowRankInterference {
    fn restrict(&self, ports: &[usize]) -> Self {
        Self {
            columns: self.columns.select_rows(ports),
            noise: self.noise,
        }
    }

    fn dense(&self) -> HermitianMatrix {
        let g = &self.columns;
        HermitianMatrix::symmetrized(g.matmul(&g.adjoint())).add_identity(self.noise)
    }
}

/// The Hermitian pair `(A, B)` of one user.
///
/// FAMA pairs keep `A` as its generating vector and `B` in low-rank-plus-noise
/// form; the dense matrices are only materialized when a caller asks for them.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalMatrixPair {
    a: OnceCell<HermitianMatrix>,
    b: OnceCell<HermitianMatrix>,
    desired: Option<Vec<C64>>,
    interference: Option<LowRankInterference>,
}

impl SignalMatrixPair {
    /// General Hermitian pair; `b` must be positive definite for the solvers.
    pub fn new(a: HermitianMatrix, b: HermitianMatrix) -> Result<Self, FamaError> {
        if a.dim() != b.dim() {
            return Err(FamaError::Dimension {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        Ok(Self {
            a: OnceCell::from(a),
            b: OnceCell::from(b),
            desired: None,
            interference: None,
        })
    }

    /// Rank-one numerator `a a^H`.
    pub fn rank_one(a_vec: Vec<C64>, b: HermitianMatrix) -> Result<Self, FamaError> {
        if a_vec.len() != b.dim() {
            return Err(FamaError::Dimension {
                expected: b.dim(),
                found: a_vec.len(),
            });
        }
        Ok(Self {
            a: OnceCell::new(),
            b: OnceCell::from(b),
            desired: Some(a_vec),
            interference: None,
        })
    }

    /// FAMA pair from the desired column and the interfering columns.
    pub fn from_columns(a_vec: Vec<C64>, interferers: &[Vec<C64>], snr: f64) -> Result<Self, FamaError> {
        let n = a_vec.len();
        if n == 0 {
            return Err(FamaError::Empty);
        }
        if let Some(bad) = interferers.iter().find(|c| c.len() != n) {
            return Err(FamaError::Dimension {
                expected: n,
                found: bad.len(),
            });
        }
        let columns = if interferers.is_empty() {
            CMatrix::zeros(n, 0)
        } else {
            CMatrix::from_columns(interferers)
        };
        Ok(Self {
            a: OnceCell::new(),
            b: OnceCell::new(),
            desired: Some(a_vec),
            interference: Some(LowRankInterference {
                columns,
                noise: 1.0 / snr,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        match &self.desired {
            Some(d) => d.len(),
            None => self.b().dim(),
        }
    }

    pub fn a(&self) -> &HermitianMatrix {
        self.a.get_or_init(|| {
            HermitianMatrix::outer(self.desired.as_deref().expect("rank-one pair keeps its vector"))
        })
    }

    pub fn b(&self) -> &HermitianMatrix {
        self.b.get_or_init(|| {
            self.interference
                .as_ref()
                .expect("structured pair keeps its interference")
                .dense()
        })
    }

    /// `B` restricted to `ports`, built from the low-rank form when available.
    pub fn b_principal(&self, ports: &[usize]) -> HermitianMatrix {
        match (&self.interference, self.b.get()) {
            (Some(i), None) => i.restrict(ports).dense(),
            _ => self.b().principal(ports),
        }
    }

    /// Desired-signal vector when `A` is rank one.
    pub fn desired(&self) -> Option<&[C64]> {
        self.desired.as_deref()
    }

    pub fn interference(&self) -> Option<&LowRankInterference> {
        self.interference.as_ref()
    }

    /// Pair restricted to `ports` (selected rows and columns of both matrices).
    pub fn restrict(&self, ports: &[usize]) -> Self {
        let lazy = |cell: &OnceCell<HermitianMatrix>, structured: bool| match cell.get() {
            Some(m) if !structured => OnceCell::from(m.principal(ports)),
            _ => OnceCell::new(),
        };
        Self {
            a: lazy(&self.a, self.desired.is_some()),
            b: lazy(&self.b, self.interference.is_some()),
            desired: self
                .desired
                .as_ref()
                .map(|d| ports.iter().map(|&p| d[p]).collect()),
            interference: self.interference.as_ref().map(|i| i.restrict(ports)),
        }
    }

    pub fn remove(&self, l: usize) -> Self {
        let keep: Vec<usize> = (0..self.dim()).filter(|&i| i != l).collect();
        self.restrict(&keep)
    }

    /// `w^H A w / w^H B w`.
    pub fn rayleigh_quotient(&self, w: &[C64]) -> f64 {
        let num = match &self.desired {
            Some(d) => dot(d, w).norm_sqr(),
            None => self.a().quad_form(w),
        };
        let den = match &self.interference {
            Some(i) => {
                let gw = i.columns.adjoint_matvec(w);
                gw.iter().map(|z| z.norm_sqr()).sum::<f64>() + i.noise * w.iter().map(|z| z.norm_sqr()).sum::<f64>()
            }
            None => self.b().quad_form(w),
        };
        num / den
    }

    fn check_ports(&self, ports: &[usize]) -> Result<(), FamaError> {
        check_port_set(ports, self.dim())
    }
}

fn check_port_set(ports: &[usize], n: usize) -> Result<(), FamaError> {
    if ports.is_empty() {
        return Err(FamaError::Empty);
    }
    for (i, &p) in ports.iter().enumerate() {
        if p >= n {
            return Err(FamaError::Index { index: p, dim: n });
        }
        if ports[..i].contains(&p) {
            return Err(FamaError::Config("port indices must be distinct"));
        }
    }
    Ok(())
}

fn check_user(channels: &ChannelRealization, k: usize) -> Result<(), FamaError> {
    if k >= channels.num_users() || k >= channels.num_antennas() {
        return Err(FamaError::Index {
            index: k,
            dim: channels.num_users().min(channels.num_antennas()),
        });
    }
    Ok(())
}

/// Pair for user `k` under canonical precoders `p_j = e_j`.
pub fn build_pair(channels: &ChannelRealization, k: usize, snr: f64) -> Result<SignalMatrixPair, FamaError> {
    check_user(channels, k)?;
    let h = channels.user(k);
    let interferers: Vec<Vec<C64>> = (0..h.cols()).filter(|&j| j != k).map(|j| h.column(j)).collect();
    SignalMatrixPair::from_columns(h.column(k), &interferers, snr)
}

/// Single-port SINR of port `r` for user `k`.
pub fn per_port_sinr(channels: &ChannelRealization, k: usize, r: usize, snr: f64) -> f64 {
    let row = channels.user(k).row(r);
    let desired = row[k].norm_sqr();
    let total: f64 = row.iter().map(|z| z.norm_sqr()).sum();
    desired / ((total - desired).max(0.0) + 1.0 / snr)
}

pub fn spectral_efficiency(sinr: f64) -> f64 {
    libm::log2(1.0 + sinr)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReceiverDesign {
    pub ports: Vec<usize>,
    pub w: Vec<C64>,
    pub achieved_sinr: f64,
    /// Zero desired signal on the selected ports.
    pub degenerate: bool,
}

impl ReceiverDesign {
    fn degenerate(ports: Vec<usize>) -> Self {
        let mut w = vec![ZERO; ports.len()];
        w[0] = ONE;
        Self {
            ports,
            w,
            achieved_sinr: 0.0,
            degenerate: true,
        }
    }

    pub fn spectral_efficiency(&self) -> f64 {
        spectral_efficiency(self.achieved_sinr)
    }
}

/// SINR of user `k` for an arbitrary selection/combiner.
///
/// The noise term is `||w||^2 / snr`, which is the textbook `1/snr` for the unit
/// combiners stored in designs and keeps the ratio invariant to rescaling `w`.
pub fn sinr_of_design(channels: &ChannelRealization, k: usize, design: &ReceiverDesign, snr: f64) -> f64 {
    let h = channels.user(k);
    let mut signal = 0.0;
    let mut interference = 0.0;
    for j in 0..h.cols() {
        let g = design
            .ports
            .iter()
            .zip(&design.w)
            .fold(ZERO, |acc, (&p, w)| acc + w.conj() * h[(p, j)]);
        if j == k {
            signal = g.norm_sqr();
        } else {
            interference += g.norm_sqr();
        }
    }
    let w_energy: f64 = design.w.iter().map(|z| z.norm_sqr()).sum();
    signal / (interference + w_energy / snr)
}

/// Optimal combiner on a fixed port set.
#[derive(Clone, Debug, PartialEq)]
pub struct Combiner {
    pub w: Vec<C64>,
    pub sinr: f64,
    pub degenerate: bool,
}

/// Maximizes the Rayleigh quotient of the restricted pair over `w`.
///
/// Rank-one pairs use the closed form `w ~ B^{-1} a`, `sinr = a^H B^{-1} a`;
/// general pairs go through a Cholesky-whitened dense eigendecomposition.
pub fn solve_combiner(pair: &SignalMatrixPair, ports: &[usize]) -> Result<Combiner, FamaError> {
    pair.check_ports(ports)?;
    let sub_b = pair.b_principal(ports);
    let chol = cholesky_pd(&sub_b)?;
    if let Some(d) = pair.desired() {
        let a: Vec<C64> = ports.iter().map(|&p| d[p]).collect();
        return Ok(rank_one_combiner(&a, &chol));
    }
    let sub_a = pair.a().principal(ports);
    let eig = hermitian_eig(&chol.whiten(&sub_a))?;
    let lambda = eig.largest();
    if !(lambda > 0.0) {
        return Ok(degenerate_combiner(ports.len()));
    }
    let u = chol.solve_upper(&eig.vector(ports.len() - 1));
    let mut w = normalized(&u).ok_or(FamaError::ZeroDominantEigenvalue)?;
    canonical_phase(&mut w);
    Ok(Combiner {
        w,
        sinr: lambda,
        degenerate: false,
    })
}

fn degenerate_combiner(len: usize) -> Combiner {
    let mut w = vec![ZERO; len];
    w[0] = ONE;
    Combiner {
        w,
        sinr: 0.0,
        degenerate: true,
    }
}

fn rank_one_combiner(a: &[C64], chol: &Cholesky) -> Combiner {
    if norm2(a) == 0.0 {
        return degenerate_combiner(a.len());
    }
    let x = chol.solve(a);
    let sinr = dot(a, &x).re.max(0.0);
    match normalized(&x) {
        Some(mut w) => {
            canonical_phase(&mut w);
            Combiner {
                w,
                sinr,
                degenerate: false,
            }
        }
        None => degenerate_combiner(a.len()),
    }
}

/// Indices of the `count` largest scores, ties to the lower index, returned ascending.
fn top_indices(scores: &[f64], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]));
    let mut top = order[..count].to_vec();
    top.sort_unstable();
    top
}

fn check_active(l: usize, n: usize) -> Result<(), FamaError> {
    if l == 0 || l > n {
        return Err(FamaError::Config("active ports must satisfy 1 <= L <= N"));
    }
    Ok(())
}

/// Single-RF-chain slow-FAMA: the best per-port SINR, `w = (1)`.
pub fn design_slow_fama(channels: &ChannelRealization, k: usize, snr: f64) -> Result<ReceiverDesign, FamaError> {
    check_user(channels, k)?;
    let scores: Vec<f64> = (0..channels.num_ports())
        .map(|r| per_port_sinr(channels, k, r, snr))
        .collect();
    let port = top_indices(&scores, 1)[0];
    Ok(ReceiverDesign {
        ports: vec![port],
        w: vec![ONE],
        achieved_sinr: scores[port],
        degenerate: scores[port] == 0.0,
    })
}

/// Digital combining: the `l` best per-port SINRs, then the optimal combiner.
pub fn design_dc(
    pair: &SignalMatrixPair,
    channels: &ChannelRealization,
    k: usize,
    snr: f64,
    l: usize,
) -> Result<ReceiverDesign, FamaError> {
    check_user(channels, k)?;
    check_active(l, channels.num_ports())?;
    let scores: Vec<f64> = (0..channels.num_ports())
        .map(|r| per_port_sinr(channels, k, r, snr))
        .collect();
    let ports = top_indices(&scores, l);
    let c = solve_combiner(pair, &ports)?;
    Ok(ReceiverDesign {
        ports,
        w: c.w,
        achieved_sinr: c.sinr,
        degenerate: c.degenerate,
    })
}

/// Maximum-ratio combining on the `l` strongest desired-signal ports.
pub fn design_mrc(pair: &SignalMatrixPair, l: usize) -> Result<ReceiverDesign, FamaError> {
    let d = pair
        .desired()
        .ok_or(FamaError::Config("MRC needs a rank-one desired signal"))?;
    check_active(l, d.len())?;
    let mags: Vec<f64> = d.iter().map(|z| z.norm_sqr()).collect();
    let ports = top_indices(&mags, l);
    let a: Vec<C64> = ports.iter().map(|&p| d[p]).collect();
    let Some(mut w) = normalized(&a) else {
        return Ok(ReceiverDesign::degenerate(ports));
    };
    canonical_phase(&mut w);
    let sinr = pair.restrict(&ports).rayleigh_quotient(&w);
    Ok(ReceiverDesign {
        ports,
        w,
        achieved_sinr: sinr,
        degenerate: false,
    })
}

fn dominant_value(pair: &SignalMatrixPair) -> Result<f64, FamaError> {
    match pair.desired() {
        Some(d) => {
            let chol = cholesky_pd(pair.b())?;
            Ok(dot(d, &chol.solve(d)).re.max(0.0))
        }
        None => Ok(*generalized_spectrum(pair.a(), pair.b())?.last().expect("non-empty")),
    }
}

/// `lambda_N - alpha_{l,N-1}`: loss of the optimal SINR when port `l` is switched off.
pub fn sinr_drop_exact(pair: &SignalMatrixPair, l: usize) -> Result<f64, FamaError> {
    check_removal(pair, l)?;
    Ok(dominant_value(pair)? - dominant_value(&pair.remove(l))?)
}

fn check_removal(pair: &SignalMatrixPair, l: usize) -> Result<(), FamaError> {
    let n = pair.dim();
    if n < 2 {
        return Err(FamaError::Dimension { expected: 2, found: n });
    }
    if l >= n {
        return Err(FamaError::Index { index: l, dim: n });
    }
    Ok(())
}

/// Dominant generalized eigenvector, `(B^{-1})` diagonal and the two top eigenvalues.
struct SpectralSummary {
    u: Vec<C64>,
    b_inv_diag: Vec<f64>,
    lambda_top: f64,
    lambda_second: f64,
}

fn spectral_summary(pair: &SignalMatrixPair) -> Result<SpectralSummary, FamaError> {
    let chol = cholesky_pd(pair.b())?;
    let b_inv_diag = chol.inverse_diagonal();
    match pair.desired() {
        Some(d) => {
            let u = chol.solve(d);
            Ok(SpectralSummary {
                lambda_top: dot(d, &u).re.max(0.0),
                u,
                b_inv_diag,
                lambda_second: 0.0,
            })
        }
        None => {
            let eig = hermitian_eig(&chol.whiten(pair.a()))?;
            let n = eig.dim();
            Ok(SpectralSummary {
                u: chol.solve_upper(&eig.vector(n - 1)),
                b_inv_diag,
                lambda_top: eig.eigenvalues[n - 1],
                lambda_second: eig.eigenvalues[n - 2],
            })
        }
    }
}

/// Squared dominant-eigenvector weight of every port in the whitening that pivots
/// that port last. These are the weights for which the SINR-drop identity is exact.
pub fn lemma_weights(pair: &SignalMatrixPair) -> Result<Vec<f64>, FamaError> {
    let s = spectral_summary(pair)?;
    let ubu = pair.b().quad_form(&s.u);
    Ok(pivoted_weights(&s.u, &s.b_inv_diag, ubu))
}

/// `|v_{N,l}|^2 (lambda_N - lambda_{N-1})`, a lower bound on the exact drop.
pub fn sinr_drop_bound(pair: &SignalMatrixPair, l: usize) -> Result<f64, FamaError> {
    check_removal(pair, l)?;
    let s = spectral_summary(pair)?;
    let ubu = pair.b().quad_form(&s.u);
    let weight = s.u[l].norm_sqr() / (s.b_inv_diag[l] * ubu);
    Ok(weight * (s.lambda_top - s.lambda_second))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DropReport {
    pub port: usize,
    pub exact_drop: f64,
    pub lower_bound: f64,
}

pub fn drop_report(pair: &SignalMatrixPair, l: usize) -> Result<DropReport, FamaError> {
    Ok(DropReport {
        port: l,
        exact_drop: sinr_drop_exact(pair, l)?,
        lower_bound: sinr_drop_bound(pair, l)?,
    })
}

/// Which dominant-eigenvector entries GEPort ranks ports by.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum VectorConvention {
    /// Per-port pivoted whitening: the weight is the exact SINR drop for rank-one `A`.
    #[default]
    Pivoted,
    /// Symmetric whitening `B^{1/2} u`, normalized.
    Whitened,
    /// The power-method iterate `u` itself.
    Raw,
}

impl VectorConvention {
    pub const ALL: [VectorConvention; 3] = [Self::Pivoted, Self::Whitened, Self::Raw];

    pub fn name(self) -> &'static str {
        match self {
            Self::Pivoted => "pivoted",
            Self::Whitened => "whitened",
            Self::Raw => "raw",
        }
    }
}

impl FromStr for VectorConvention {
    type Err = FamaError;
    fn from_str(s: &str) -> Result<Self, FamaError> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or(FamaError::Config("unknown vector convention"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeportOptions {
    pub convention: VectorConvention,
    /// Stop removing ports once the accumulated loss exceeds this value.
    pub stop_loss: Option<f64>,
    pub power: PowerOptions,
}

impl Default for GeportOptions {
    fn default() -> Self {
        Self {
            convention: VectorConvention::Pivoted,
            stop_loss: None,
            power: PowerOptions::default(),
        }
    }
}

/// Removal telemetry. Entry `n` describes iteration `n` of the elimination loop.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GeportTrace {
    /// Original index of the port removed at each iteration.
    pub removed: Vec<usize>,
    /// Dominant eigenvalue of the reduced pair before each removal.
    pub eigenvalues: Vec<f64>,
    /// `lambda_N - lambda_{N-n}` before each removal.
    pub accumulated_loss: Vec<f64>,
    /// `lambda_N - achieved_sinr` after the final removal.
    pub final_loss: f64,
}

/// Working copy of the reduced pair.
enum ReducedPair {
    /// Rank-one numerator and `G G^H + noise I` denominator, inverted by Woodbury.
    Structured {
        a: Vec<C64>,
        g: CMatrix,
        noise: f64,
    },
    /// Dense matrices with an explicitly maintained inverse of `B`.
    Dense {
        a: HermitianMatrix,
        b: HermitianMatrix,
        b_inv: CMatrix,
    },
}

impl ReducedPair {
    fn new(pair: &SignalMatrixPair, convention: VectorConvention) -> Result<Self, FamaError> {
        if convention != VectorConvention::Whitened {
            if let (Some(a), Some(i)) = (pair.desired(), pair.interference()) {
                return Ok(Self::Structured {
                    a: a.to_vec(),
                    g: i.columns.clone(),
                    noise: i.noise,
                });
            }
        }
        let b_inv = cholesky_pd(pair.b())?.inverse().into_matrix();
        Ok(Self::Dense {
            a: pair.a().clone(),
            b: pair.b().clone(),
            b_inv,
        })
    }

    fn dim(&self) -> usize {
        match self {
            Self::Structured { a, .. } => a.len(),
            Self::Dense { a, .. } => a.dim(),
        }
    }

    /// Cholesky factor of the Woodbury core `noise I + G^H G`, if `G` has columns.
    fn woodbury_core(g: &CMatrix, noise: f64) -> Result<Option<Cholesky>, FamaError> {
        if g.cols() == 0 {
            return Ok(None);
        }
        let core = HermitianMatrix::symmetrized(g.adjoint().matmul(g)).add_identity(noise);
        cholesky_pd(&core).map(Some)
    }

    /// Dominant generalized eigenpair by power iteration, plus the ranking weights.
    fn dominant(
        &self,
        start: Vec<C64>,
        opts: &GeportOptions,
    ) -> Result<(Vec<C64>, f64, Vec<f64>), FamaError> {
        match self {
            Self::Structured { a, g, noise } => {
                let core = Self::woodbury_core(g, *noise)?;
                let solve = |x: &[C64]| -> Vec<C64> {
                    let mut y: Vec<C64> = x.to_vec();
                    if let Some(core) = &core {
                        let coeff = core.solve(&g.adjoint_matvec(x));
                        for (yi, gi) in y.iter_mut().zip(g.matvec(&coeff)) {
                            *yi -= gi;
                        }
                    }
                    y.iter().map(|z| z / *noise).collect()
                };
                let apply_b = |x: &[C64]| -> Vec<C64> {
                    let gx = g.matvec(&g.adjoint_matvec(x));
                    x.iter().zip(gx).map(|(xi, gi)| xi * *noise + gi).collect()
                };
                // With A = a a^H every power step lands on B^{-1} a, so the iteration
                // is replaced by its fixed point.
                let u = solve(a);
                let lambda = dot(a, &u).re;
                if !(lambda > 0.0) {
                    return Err(FamaError::ZeroDominantEigenvalue);
                }
                let it = PowerIterate {
                    vector: normalized(&u).ok_or(FamaError::ZeroDominantEigenvalue)?,
                    eigenvalue: lambda,
                    iterations: 1,
                };
                let weights = match opts.convention {
                    VectorConvention::Raw => it.vector.iter().map(|z| z.norm_sqr()).collect(),
                    _ => {
                        // (B^{-1})_ll = (1 - ||g_l L^{-H}||^2) / noise with L L^H the Woodbury core.
                        let diag: Vec<f64> = match &core {
                            Some(core) => {
                                let z = g.matmul(&core.inverse_lower().adjoint());
                                (0..a.len())
                                    .map(|l| (1.0 - z.row(l).iter().map(|x| x.norm_sqr()).sum::<f64>()) / *noise)
                                    .collect()
                            }
                            None => vec![1.0 / *noise; a.len()],
                        };
                        let ubu = dot(&it.vector, &apply_b(&it.vector)).re;
                        pivoted_weights(&it.vector, &diag, ubu)
                    }
                };
                Ok((it.vector, it.eigenvalue, weights))
            }
            Self::Dense { a, b, b_inv } => {
                let a_norm = a.as_matrix().frobenius_norm();
                let it = power_iterate(
                    |x| a.matvec(x),
                    |x| b.matvec(x),
                    |x| b_inv.matvec(x),
                    a_norm,
                    start,
                    &opts.power,
                )?;
                let weights = match opts.convention {
                    VectorConvention::Raw => it.vector.iter().map(|z| z.norm_sqr()).collect(),
                    VectorConvention::Pivoted => {
                        let diag: Vec<f64> = (0..b_inv.rows()).map(|i| b_inv[(i, i)].re).collect();
                        pivoted_weights(&it.vector, &diag, b.quad_form(&it.vector))
                    }
                    VectorConvention::Whitened => {
                        let v = normalized(&sqrt_pd(b)?.matvec(&it.vector))
                            .ok_or(FamaError::ZeroDominantEigenvalue)?;
                        v.iter().map(|z| z.norm_sqr()).collect()
                    }
                };
                Ok((it.vector, it.eigenvalue, weights))
            }
        }
    }

    fn remove(&mut self, l: usize) {
        let n = self.dim();
        let keep: Vec<usize> = (0..n).filter(|&i| i != l).collect();
        match self {
            Self::Structured { a, g, .. } => {
                a.remove(l);
                *g = g.select_rows(&keep);
            }
            Self::Dense { a, b, b_inv } => {
                // Inverse of the principal minor via the Schur complement of b_inv[l][l].
                let pivot = b_inv[(l, l)].re;
                let col: Vec<C64> = keep.iter().map(|&i| b_inv[(i, l)]).collect();
                let mut next = b_inv.select(&keep, &keep);
                for i in 0..keep.len() {
                    for j in 0..keep.len() {
                        next[(i, j)] -= col[i] * col[j].conj() / pivot;
                    }
                }
                *b_inv = next;
                *a = a.remove_index(l);
                *b = b.remove_index(l);
            }
        }
    }
}

/// Index of the smallest weight; the first (lowest original index) wins ties.
fn argmin(weights: &[f64]) -> usize {
    let mut best = 0;
    for (i, &w) in weights.iter().enumerate().skip(1) {
        if w < weights[best] {
            best = i;
        }
    }
    best
}

/// Generalized-eigenvector port selection: greedily switch off the port with the
/// smallest dominant-eigenvector weight until `l` ports remain.
pub fn design_geport(pair: &SignalMatrixPair, l: usize, opts: &GeportOptions) -> Result<ReceiverDesign, FamaError> {
    design_geport_traced(pair, l, opts).map(|(d, _)| d)
}

pub fn design_geport_traced(
    pair: &SignalMatrixPair,
    l: usize,
    opts: &GeportOptions,
) -> Result<(ReceiverDesign, GeportTrace), FamaError> {
    let n = pair.dim();
    check_active(l, n)?;
    let mut trace = GeportTrace::default();
    if pair.desired().is_some_and(|d| norm2(d) == 0.0) {
        return Ok((ReceiverDesign::degenerate((0..l).collect()), trace));
    }

    let mut active: Vec<usize> = (0..n).collect();
    let mut reduced = ReducedPair::new(pair, opts.convention)?;
    let mut start = seeded_start(n, opts.power.seed);
    let mut lambda_full = None;
    let mut step = 0;
    while active.len() > l {
        let (vector, lambda, weights) = reduced
            .dominant(start, opts)
            .map_err(|e| FamaError::Geport {
                step,
                source: Box::new(e),
            })?;
        let top = *lambda_full.get_or_insert(lambda);
        let loss = top - lambda;
        if opts.stop_loss.is_some_and(|limit| loss > limit) {
            break;
        }
        let pos = argmin(&weights);
        trace.removed.push(active[pos]);
        trace.eigenvalues.push(lambda);
        trace.accumulated_loss.push(loss);
        active.remove(pos);
        reduced.remove(pos);
        start = vector;
        start.remove(pos);
        if norm2(&start) == 0.0 {
            start = seeded_start(active.len(), opts.power.seed);
        }
        step += 1;
    }

    let finale = pair.restrict(&active);
    let (w, sinr) = if finale.desired().is_some() {
        let c = solve_combiner(&finale, &(0..active.len()).collect::<Vec<_>>())?;
        (c.w, c.sinr)
    } else {
        let p = power_method_gen(finale.a(), finale.b(), &opts.power).map_err(|e| FamaError::Geport {
            step,
            source: Box::new(e),
        })?;
        (p.eigenvector_gen, p.eigenvalue)
    };
    trace.final_loss = lambda_full.map_or(0.0, |top| top - sinr);
    Ok((
        ReceiverDesign {
            ports: active,
            w,
            achieved_sinr: sinr,
            degenerate: false,
        },
        trace,
    ))
}

/// Receiver strategies compared by the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    SlowFama,
    Mrc,
    Dc,
    Geport,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Self::SlowFama, Self::Mrc, Self::Dc, Self::Geport];

    pub fn name(self) -> &'static str {
        match self {
            Self::SlowFama => "slow_fama",
            Self::Mrc => "mrc",
            Self::Dc => "dc",
            Self::Geport => "geport",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = FamaError;
    fn from_str(s: &str) -> Result<Self, FamaError> {
        Self::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or(FamaError::Config("unknown strategy"))
    }
}

/// Runs one strategy for user `k`. Slow-FAMA ignores `l`.
pub fn design_strategy(
    strategy: Strategy,
    pair: &SignalMatrixPair,
    channels: &ChannelRealization,
    k: usize,
    snr: f64,
    l: usize,
    geport: &GeportOptions,
) -> Result<ReceiverDesign, FamaError> {
    match strategy {
        Strategy::SlowFama => design_slow_fama(channels, k, snr),
        Strategy::Mrc => design_mrc(pair, l),
        Strategy::Dc => design_dc(pair, channels, k, snr, l),
        Strategy::Geport => design_geport(pair, l, geport),
    }
}
