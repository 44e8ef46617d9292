//! Fundamental solution of the Helmholtz equation and the Dirichlet Green's
//! function of the upper half-plane (method of images).
//!
//! With a homogeneous background (refractive index 1) the half-plane Green's
//! function is available in closed form, so no periodic-medium machinery is
//! needed.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun::{self, hankel1_1, SpecfunError};

/// Points closer than this (length units) are treated as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GreensError {
    #[error("source and field point coincide ({0:?})")]
    CoincidentPoints(Point2),
    #[error("self-cell too large for the small-disk rule: k·ρ = {0} ≥ 1")]
    CellTooLarge(f64),
    #[error("invalid wave configuration: {0}")]
    InvalidConfig(String),
    #[error("source point {0:?} is not inside the upper half-plane")]
    SourceOffDomain(Point2),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    /// Mirror image across the wall x₂ = 0.
    pub fn reflected(self) -> Self {
        Self::new(self.x1, -self.x2)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }
}

/// Wavenumber and (constant) background refractive index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveConfig {
    k: f64,
    n_const: f64,
}

impl WaveConfig {
    pub fn new(k: f64) -> Result<Self, GreensError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(GreensError::InvalidConfig(format!(
                "wavenumber must be positive and finite, got {k}"
            )));
        }
        Ok(Self { k, n_const: 1.0 })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn n_const(&self) -> f64 {
        self.n_const
    }
}

/// Φ_k(x, y) = (i/4)·H₀⁽¹⁾(k|x − y|).
pub fn phi_k(cfg: &WaveConfig, x: Point2, y: Point2) -> Result<Complex64, GreensError> {
    let r = x.dist(y);
    if r < COINCIDENCE_TOL {
        return Err(GreensError::CoincidentPoints(x));
    }
    Ok(phi_at_distance(cfg.k, r))
}

/// G(x, y) = Φ_k(x, y) − Φ_k(x, y*), y* = (y₁, −y₂).
pub fn green_halfplane(cfg: &WaveConfig, x: Point2, y: Point2) -> Result<Complex64, GreensError> {
    if !(y.x2 > 0.0) {
        return Err(GreensError::SourceOffDomain(y));
    }
    let r = x.dist(y);
    if r < COINCIDENCE_TOL {
        return Err(GreensError::CoincidentPoints(x));
    }
    Ok(green_unchecked(cfg.k, x, y))
}

#[inline]
pub(crate) fn phi_at_distance(k: f64, r: f64) -> Complex64 {
    specfun::h0_unchecked(k * r) * Complex64::new(0.0, 0.25)
}

/// Half-plane Green's function for points known to be distinct with y₂ > 0.
#[inline]
pub(crate) fn green_unchecked(k: f64, x: Point2, y: Point2) -> Complex64 {
    let direct = phi_at_distance(k, x.dist(y));
    let image = phi_at_distance(k, x.dist(y.reflected()));
    direct - image
}

/// Integral of Φ_k(x, ·) over the disk of the given area centred at x.
///
/// Closed form `(iπρ/(2k))·H₁⁽¹⁾(kρ) − 1/k²` with ρ the disk radius, from
/// d/dr[r·H₁⁽¹⁾(kr)] = kr·H₀⁽¹⁾(kr) and r·H₁⁽¹⁾(kr) → −2i/(πk) as r → 0.
pub fn self_cell_integral(cfg: &WaveConfig, cell_area: f64) -> Result<Complex64, GreensError> {
    if !(cell_area > 0.0 && cell_area.is_finite()) {
        return Err(GreensError::InvalidConfig(format!(
            "cell area must be positive, got {cell_area}"
        )));
    }
    let k = cfg.k;
    let rho = (cell_area / PI).sqrt();
    if k * rho >= 1.0 {
        return Err(GreensError::CellTooLarge(k * rho));
    }
    let h1 = hankel1_1(k * rho)?.value;
    Ok(Complex64::new(0.0, PI * rho / (2.0 * k)) * h1 - 1.0 / (k * k))
}
