//! Monotonicity-method reconstruction of a compactly supported defect in an
//! open waveguide (upper half-plane with a Dirichlet wall) from near-field
//! data.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense complex matrices, LU solves, Hermitian eigenvalues.
//! * [`specfun`]: Bessel and Hankel functions of order 0 and 1.
//! * [`greens`]: free-space fundamental solution and the half-plane
//!   Dirichlet Green's function.
//! * [`forward`]: Lippmann–Schwinger solver and near-field matrix synthesis.
//! * [`mono`]: probe operators and the inside/outside monotonicity tests.
//! * [`recon`]: configuration, sampling-grid sweep and indicator map output.
//! * [`theory`]: finite-dimensional checks of the factorization-method
//!   range identity and the coercivity lemma behind it.

pub mod error;
pub mod forward;
pub mod greens;
pub mod linalg;
pub mod mono;
pub mod recon;
pub mod specfun;
pub mod theory;

pub use error::{Error, Result};
pub use forward::{
    assemble_near_field, rasterize, ContrastSpec, ForwardSolver, IncidentField, MeasurementLine,
    NearFieldMatrix, QGrid, Shape,
};
pub use greens::{green_halfplane, phi_k, Point2, WaveConfig};
pub use linalg::{hermitian_eigenvalues, hermitian_part, lu_solve, ComplexMatrix, HermitianSpectrum};
pub use mono::{
    assemble_probe, inside_test, outside_test, ContrastSign, Direction, MonotonicityVerdict,
    ProbeMatrix, SpectralTolerance, TestSquare,
};
pub use num_complex::Complex64;
pub use recon::{run_reconstruction, IndicatorMap, ReconConfig};
