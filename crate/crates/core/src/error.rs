use thiserror::Error;

use crate::forward::ForwardError;
use crate::greens::GreensError;
use crate::linalg::LinalgError;
use crate::mono::MonoError;
use crate::recon::ReconError;
use crate::specfun::SpecfunError;
use crate::theory::TheoryError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-level error wrapping the per-module error types.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Greens(#[from] GreensError),
    #[error(transparent)]
    Forward(#[from] ForwardError),
    #[error(transparent)]
    Mono(#[from] MonoError),
    #[error(transparent)]
    Recon(#[from] ReconError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}
