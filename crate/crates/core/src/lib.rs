//! Simulation and numerical-verification toolkit for elephant random walks
//! and self-similar Gaussian processes.
//!
//! The crate is organized around six subsystems:
//!
//! * [`rng`]: deterministic, counter-based random streams; every simulation
//!   is reproducible bit-for-bit given `(seed, replica, stream)`.
//! * [`erw`]: single elephant random walks. O(1)-memory sampling, the exact
//!   finite-`n` law by dynamic programming, moment recursions, and the
//!   diffusive / critical / superdiffusive regime classification.
//! * [`duo`]: pairs of independent walks. Collision detection, distance
//!   statistics under law-of-the-iterated-logarithm normalizers, and the
//!   theoretical limsup constants.
//! * [`sgp`]: self-similar Gaussian process kernels (fractional Brownian
//!   motion, generalized Riemann-Liouville fBm, the walk-difference kernel,
//!   and a spectral family), exact grid simulation, and the Lamperti
//!   transform to stationarity.
//! * [`lil`]: geometric-grid block machinery. Increment variances, block
//!   correlations, the block-event ratio behind the Borel-Cantelli argument,
//!   the Gaussian supremum tail bound, and empirical LIL statistics.
//! * [`bvn`]: bivariate standard normal quadrant probabilities via the 1-D
//!   integral identity for the correlation derivative.
//!
//! Supporting modules: [`quad`] (adaptive Gauss-Kronrod and tanh-sinh
//! quadrature), [`stats`] (tail functions and goodness-of-fit tests).

pub mod bvn;
pub mod duo;
pub mod erw;
pub mod error;
pub mod lil;
pub mod quad;
pub mod rng;
pub mod sgp;
pub mod stats;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
