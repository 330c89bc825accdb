//! Multiport fluid-antenna receivers for slow-FAMA downlinks.
//!
//! The crate is `no_std` (with `alloc`) and purely computational:
//!
//! - [`linalg`] and [`eig`]: dense complex Hermitian algebra, Jacobi
//!   eigendecomposition, Cholesky, power iteration for `(A, B)` pairs.
//! - [`channel`]: port topologies, Bessel spatial correlation and seeded
//!   correlated Rayleigh channel draws.
//! - [`receivers`]: per-user signal pairs, SINR evaluation and the slow-FAMA,
//!   MRC, DC and GEPort designs.
//! - [`oracle`]: exhaustive subset search and dense recomputation of the
//!   port-removal identities, used to validate the fast paths.
#![no_std]

extern crate alloc;

pub mod channel;
pub mod eig;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod receivers;

pub use channel::{
    correlation_matrix, sample_channels, trial_stream, ChannelRealization, CorrelationMatrix, PortTopology,
    TopologyKind,
};
pub use eig::{
    cholesky_pd, eigenvector_eigenvalue_identity_check, hermitian_eig, interlacing_check, inv_sqrt_pd, real_symmetric_eig,
    power_method_gen, EigenDecomposition, GeneralizedEigenPair, PowerOptions,
};
pub use error::FamaError;
pub use linalg::{CMatrix, HermitianMatrix, C64};
pub use oracle::{exhaustive_best_subset, lemma1_both_sides, Lemma1Sides, OracleResult};
pub use receivers::{
    build_pair, design_dc, design_geport, design_geport_traced, design_mrc, design_slow_fama, design_strategy,
    per_port_sinr, sinr_drop_bound, sinr_drop_exact, sinr_of_design, solve_combiner, spectral_efficiency,
    DropReport, GeportOptions, GeportTrace, ReceiverDesign, SignalMatrixPair, Strategy, SystemConfig,
    VectorConvention,
};
