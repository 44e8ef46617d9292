//! Monotonicity tests: compare the Hermitian part of the near-field matrix
//! with a multiple of the probe Gram matrix of a test square and count the
//! negative eigenvalues of the difference.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forward::{MeasurementLine, NearFieldMatrix};
use crate::greens::{green_unchecked, Point2, WaveConfig};
use crate::linalg::{hermitian_eigenvalues, hermitian_part, ComplexMatrix, HermitianSpectrum, LinalgError};

/// Quadrature nodes per side of a test square unless configured otherwise.
pub const DEFAULT_QUAD_POINTS: usize = 3;

#[derive(Debug, Error)]
pub enum MonoError {
    #[error("degenerate test square: {0}")]
    DegenerateSquare(String),
    #[error("test square reaches the measurement line (top {top} ≥ line {line})")]
    SquareMeetsLine { top: f64, line: f64 },
    #[error("dimension mismatch: near field is {near}x{near}, probe is {probe}x{probe}")]
    DimensionMismatch { near: usize, probe: usize },
    #[error("probe matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("alpha must be finite and non-negative, got {0}")]
    InvalidAlpha(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Axis-aligned square `center + [−h, h]²` with a midpoint rule of
/// `quad_points_per_side²` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestSquare {
    pub center: Point2,
    pub half_width: f64,
    pub quad_points_per_side: usize,
}

impl TestSquare {
    pub fn new(center: Point2, half_width: f64, quad_points_per_side: usize) -> Result<Self, MonoError> {
        let s = Self {
            center,
            half_width,
            quad_points_per_side,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), MonoError> {
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(MonoError::DegenerateSquare(format!(
                "half width must be positive, got {}",
                self.half_width
            )));
        }
        if self.quad_points_per_side == 0 {
            return Err(MonoError::DegenerateSquare("no quadrature points".into()));
        }
        if !(self.center.x2 - self.half_width > 0.0) {
            return Err(MonoError::DegenerateSquare(format!(
                "square must lie in the open upper half-plane (bottom at {})",
                self.center.x2 - self.half_width
            )));
        }
        Ok(())
    }

    /// Midpoint nodes and their weights.
    pub fn quadrature(&self) -> (Vec<Point2>, Vec<f64>) {
        let q = self.quad_points_per_side;
        let h = 2.0 * self.half_width / q as f64;
        let lo = Point2::new(self.center.x1 - self.half_width, self.center.x2 - self.half_width);
        let mut nodes = Vec::with_capacity(q * q);
        for j in 0..q {
            for i in 0..q {
                nodes.push(Point2::new(lo.x1 + (i as f64 + 0.5) * h, lo.x2 + (j as f64 + 0.5) * h));
            }
        }
        (nodes, vec![h * h; q * q])
    }
}

/// Discrete H*_B H_B on the measurement line, Hermitian entry by entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeMatrix {
    entries: ComplexMatrix,
}

impl ProbeMatrix {
    /// Wraps a matrix that must already be Hermitian to 1e−12 relative.
    pub fn from_hermitian(entries: ComplexMatrix) -> Result<Self, MonoError> {
        if !entries.is_square() {
            return Err(LinalgError::NotSquare {
                rows: entries.rows(),
                cols: entries.cols(),
            }
            .into());
        }
        let defect = entries.hermitian_defect();
        if defect > 1e-12 * entries.max_abs() {
            return Err(MonoError::NotHermitian(defect));
        }
        Ok(Self {
            entries: hermitian_part(&entries)?,
        })
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn d(&self) -> usize {
        self.entries.rows()
    }
}

/// Probe Gram matrix of the square `b` seen from `line`.
pub fn assemble_probe(cfg: &WaveConfig, b: &TestSquare, line: &MeasurementLine) -> Result<ProbeMatrix, MonoError> {
    b.validate()?;
    let top = b.center.x2 + b.half_width;
    if top >= line.height {
        return Err(MonoError::SquareMeetsLine {
            top,
            line: line.height,
        });
    }
    let (nodes, weights) = b.quadrature();
    Ok(probe_from_nodes(cfg, &nodes, &weights, line))
}

/// w_M·Σ_c w_c·G(y_c, x_l)·conj(G(y_c, x_p)) for arbitrary nodes `y_c`
/// strictly between the wall and the line.
pub fn probe_from_nodes(cfg: &WaveConfig, nodes: &[Point2], weights: &[f64], line: &MeasurementLine) -> ProbeMatrix {
    assert_eq!(nodes.len(), weights.len(), "one weight per node");
    let k = cfg.k();
    let d = line.d;
    let xs = line.points();
    // g[c][l] = G(y_c, x_l)
    let g: Vec<Vec<Complex64>> = nodes
        .iter()
        .map(|&y| xs.iter().map(|&x| green_unchecked(k, y, x)).collect())
        .collect();
    let w_m = line.weight();
    let mut entries = ComplexMatrix::zeros(d, d);
    for l in 0..d {
        for p in l..d {
            let s: Complex64 = g
                .iter()
                .zip(weights)
                .map(|(row, &w)| row[l] * row[p].conj() * w)
                .sum::<Complex64>()
                * w_m;
            if l == p {
                entries[(l, l)] = Complex64::new(s.re, 0.0);
            } else {
                entries[(l, p)] = s;
                entries[(p, l)] = s.conj();
            }
        }
    }
    ProbeMatrix { entries }
}

/// Relative spectral floor: eigenvalues below −max(abs, rel·max|λ|) count
/// as negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralTolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for SpectralTolerance {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-10 }
    }
}

impl SpectralTolerance {
    pub fn threshold(&self, spectrum: &HermitianSpectrum) -> f64 {
        self.abs.max(self.rel * spectrum.max_abs())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Eigenvalues of Re N − α·probe.
    #[default]
    Inside,
    /// Eigenvalues of α·probe − Re N.
    Outside,
}

/// Sign of the contrast; a negative contrast replaces Re N by −Re N.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContrastSign {
    #[default]
    Positive,
    Negative,
}

impl ContrastSign {
    pub fn flipped(self) -> Self {
        match self {
            ContrastSign::Positive => ContrastSign::Negative,
            ContrastSign::Negative => ContrastSign::Positive,
        }
    }

    fn factor(self) -> f64 {
        match self {
            ContrastSign::Positive => 1.0,
            ContrastSign::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityVerdict {
    pub negative_count: usize,
    pub eigenvalues: HermitianSpectrum,
    pub direction: Direction,
    pub sign: ContrastSign,
    pub alpha: f64,
    pub threshold: f64,
}

/// A monotonicity test with the near-field side precomputed, to be applied to
/// many probe matrices.
#[derive(Debug, Clone)]
pub struct MonotonicityTest {
    re_n: ComplexMatrix,
    alpha: f64,
    direction: Direction,
    sign: ContrastSign,
    tol: SpectralTolerance,
}

impl MonotonicityTest {
    pub fn new(
        n: &ComplexMatrix,
        alpha: f64,
        direction: Direction,
        sign: ContrastSign,
        tol: SpectralTolerance,
    ) -> Result<Self, MonoError> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(MonoError::InvalidAlpha(alpha));
        }
        Ok(Self {
            re_n: hermitian_part(n)?,
            alpha,
            direction,
            sign,
            tol,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn sign(&self) -> ContrastSign {
        self.sign
    }

    /// Same test with Re N replaced by −Re N.
    pub fn sign_flipped(mut self) -> Self {
        self.sign = self.sign.flipped();
        self
    }

    /// The Hermitian matrix whose negative eigenvalues are counted.
    pub fn operator(&self, probe: &ProbeMatrix) -> Result<ComplexMatrix, MonoError> {
        let d = self.re_n.rows();
        if probe.d() != d {
            return Err(MonoError::DimensionMismatch { near: d, probe: probe.d() });
        }
        let s = self.sign.factor();
        let (a, b) = match self.direction {
            Direction::Inside => (s, -self.alpha),
            Direction::Outside => (-s, self.alpha),
        };
        let re_n = self.re_n.as_slice();
        let p = probe.entries().as_slice();
        let data = re_n.iter().zip(p).map(|(x, y)| x * a + y * b).collect();
        Ok(ComplexMatrix::from_vec(d, d, data)?)
    }

    pub fn evaluate(&self, probe: &ProbeMatrix) -> Result<MonotonicityVerdict, MonoError> {
        let spectrum = hermitian_eigenvalues(&self.operator(probe)?)?;
        let threshold = self.tol.threshold(&spectrum);
        Ok(MonotonicityVerdict {
            negative_count: spectrum.count_below(threshold),
            eigenvalues: spectrum,
            direction: self.direction,
            sign: self.sign,
            alpha: self.alpha,
            threshold,
        })
    }
}

/// Negative eigenvalues of Re N − α·probe.
pub fn inside_test(
    n: &NearFieldMatrix,
    probe: &ProbeMatrix,
    alpha: f64,
    tol: SpectralTolerance,
) -> Result<MonotonicityVerdict, MonoError> {
    MonotonicityTest::new(n.entries(), alpha, Direction::Inside, ContrastSign::Positive, tol)?.evaluate(probe)
}

/// Negative eigenvalues of α·probe − Re N.
pub fn outside_test(
    n: &NearFieldMatrix,
    probe: &ProbeMatrix,
    alpha: f64,
    tol: SpectralTolerance,
) -> Result<MonotonicityVerdict, MonoError> {
    MonotonicityTest::new(n.entries(), alpha, Direction::Outside, ContrastSign::Positive, tol)?.evaluate(probe)
}

/// Either test for a negative contrast (Re N replaced by −Re N).
pub fn sign_flipped(
    n: &NearFieldMatrix,
    probe: &ProbeMatrix,
    alpha: f64,
    direction: Direction,
    tol: SpectralTolerance,
) -> Result<MonotonicityVerdict, MonoError> {
    MonotonicityTest::new(n.entries(), alpha, direction, ContrastSign::Negative, tol)?.evaluate(probe)
}
