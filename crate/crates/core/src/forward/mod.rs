//! Forward problem: rasterize the defect, solve the volume integral equation
//! for the scattered field and assemble the near-field matrix on the
//! measurement line.

mod io;
mod solver;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::greens::{GreensError, Point2, WaveConfig};
use crate::linalg::{ComplexMatrix, LinalgError};

pub use io::{load_near_field, read_near_field, save_near_field, write_near_field};
pub use solver::{
    assemble_near_field, assemble_near_field_with, scattered_field_at, solve_scattered_on_q,
    ForwardSolver, IncidentField,
};

/// Default forward resolution used for data synthesis in the forward API.
pub const DEFAULT_CELLS_PER_SIDE: usize = 32;

#[derive(Debug, Error)]
pub enum ForwardError {
    #[error("no cell centre falls inside the contrast shape")]
    EmptyGrid,
    #[error("need at least 4 cells per side, got {0}")]
    TooFewCells(usize),
    #[error("invalid contrast: {0}")]
    InvalidContrast(String),
    #[error("invalid measurement line: {0}")]
    InvalidLine(String),
    #[error("point {0:?} lies inside the discretized defect")]
    PointInsideQ(Point2),
    #[error("measurement line at height {line} is not above the defect top {top}")]
    LineTooLow { line: f64, top: f64 },
    #[error("forward system is singular (resonant discretization): {0}")]
    SingularSystem(LinalgError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Linalg(LinalgError),
    #[error(transparent)]
    Greens(#[from] GreensError),
    #[error("near-field file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<LinalgError> for ForwardError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::SingularMatrix { .. } => ForwardError::SingularSystem(e),
            other => ForwardError::Linalg(other),
        }
    }
}

/// Geometry of the defect support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Circle { center: Point2, radius: f64 },
    Ellipse { center: Point2, semi_axes: [f64; 2] },
    Union(Vec<Shape>),
}

impl Shape {
    /// Disk of radius 0.2 centred at (0.5, 0.5).
    pub fn benchmark_disk() -> Self {
        Shape::Circle {
            center: Point2::new(0.5, 0.5),
            radius: 0.2,
        }
    }

    /// Ellipse with semi-axes (0.15, 0.3) centred at (0.5, 0.6).
    pub fn benchmark_ellipse() -> Self {
        Shape::Ellipse {
            center: Point2::new(0.5, 0.6),
            semi_axes: [0.15, 0.3],
        }
    }

    /// Open-set membership.
    pub fn contains(&self, p: Point2) -> bool {
        match self {
            Shape::Circle { center, radius } => {
                let (dx, dy) = (p.x1 - center.x1, p.x2 - center.x2);
                dx * dx + dy * dy < radius * radius
            }
            Shape::Ellipse { center, semi_axes } => {
                let u = (p.x1 - center.x1) / semi_axes[0];
                let v = (p.x2 - center.x2) / semi_axes[1];
                u * u + v * v < 1.0
            }
            Shape::Union(parts) => parts.iter().any(|s| s.contains(p)),
        }
    }

    /// Axis-aligned bounding box as (lower-left, upper-right).
    pub fn bounding_box(&self) -> (Point2, Point2) {
        match self {
            Shape::Circle { center, radius } => (
                Point2::new(center.x1 - radius, center.x2 - radius),
                Point2::new(center.x1 + radius, center.x2 + radius),
            ),
            Shape::Ellipse { center, semi_axes } => (
                Point2::new(center.x1 - semi_axes[0], center.x2 - semi_axes[1]),
                Point2::new(center.x1 + semi_axes[0], center.x2 + semi_axes[1]),
            ),
            Shape::Union(parts) => parts.iter().map(Shape::bounding_box).fold(
                (
                    Point2::new(f64::INFINITY, f64::INFINITY),
                    Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
                ),
                |(lo, hi), (l, h)| {
                    (
                        Point2::new(lo.x1.min(l.x1), lo.x2.min(l.x2)),
                        Point2::new(hi.x1.max(h.x1), hi.x2.max(h.x2)),
                    )
                },
            ),
        }
    }

    fn validate(&self) -> Result<(), ForwardError> {
        match self {
            Shape::Circle { radius, .. } if !(*radius > 0.0 && radius.is_finite()) => Err(
                ForwardError::InvalidContrast(format!("circle radius must be positive, got {radius}")),
            ),
            Shape::Ellipse { semi_axes, .. }
                if !semi_axes.iter().all(|a| *a > 0.0 && a.is_finite()) =>
            {
                Err(ForwardError::InvalidContrast(format!(
                    "ellipse semi-axes must be positive, got {semi_axes:?}"
                )))
            }
            Shape::Union(parts) if parts.is_empty() => {
                Err(ForwardError::InvalidContrast("empty union".into()))
            }
            Shape::Union(parts) => parts.iter().try_for_each(Shape::validate),
            _ => Ok(()),
        }
    }
}

/// Defect shape together with its constant contrast amplitude.
///
/// An amplitude of zero is accepted and describes the homogeneous
/// background (no defect); it is the natural control case for the solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastSpec {
    pub shape: Shape,
    pub amplitude: f64,
}

impl ContrastSpec {
    pub fn new(shape: Shape, amplitude: f64) -> Result<Self, ForwardError> {
        let spec = Self { shape, amplitude };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ForwardError> {
        if !self.amplitude.is_finite() {
            return Err(ForwardError::InvalidContrast(format!(
                "amplitude must be finite, got {}",
                self.amplitude
            )));
        }
        self.shape.validate()?;
        let (lo, _) = self.shape.bounding_box();
        if !(lo.x2 > 0.0) {
            return Err(ForwardError::InvalidContrast(format!(
                "shape must lie in the open upper half-plane (lowest point x2 = {})",
                lo.x2
            )));
        }
        Ok(())
    }
}

/// Cell-centred quadrature of the defect.
#[derive(Debug, Clone, PartialEq)]
pub struct QGrid {
    pub cell_centers: Vec<Point2>,
    pub cell_weights: Vec<f64>,
    pub q_values: Vec<f64>,
    pub cells_per_side: usize,
    /// Cell edge lengths (along x₁, along x₂).
    pub cell_size: (f64, f64),
}

impl QGrid {
    pub fn len(&self) -> usize {
        self.cell_centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cell_centers.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.cell_weights.iter().sum()
    }

    /// Highest x₂ reached by any cell.
    pub fn top(&self) -> f64 {
        self.cell_centers
            .iter()
            .map(|c| c.x2 + 0.5 * self.cell_size.1)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether `p` lies in the closure of some cell.
    pub fn covers(&self, p: Point2) -> bool {
        let (hx, hy) = (0.5 * self.cell_size.0, 0.5 * self.cell_size.1);
        self.cell_centers
            .iter()
            .any(|c| (p.x1 - c.x1).abs() <= hx && (p.x2 - c.x2).abs() <= hy)
    }
}

/// Uniform grid on the shape's bounding box, keeping cells whose centre lies
/// inside the shape.
pub fn rasterize(contrast: &ContrastSpec, cells_per_side: usize) -> Result<QGrid, ForwardError> {
    if cells_per_side < 4 {
        return Err(ForwardError::TooFewCells(cells_per_side));
    }
    contrast.validate()?;
    let (lo, hi) = contrast.shape.bounding_box();
    let h1 = (hi.x1 - lo.x1) / cells_per_side as f64;
    let h2 = (hi.x2 - lo.x2) / cells_per_side as f64;
    let area = h1 * h2;
    let mut grid = QGrid {
        cell_centers: Vec::new(),
        cell_weights: Vec::new(),
        q_values: Vec::new(),
        cells_per_side,
        cell_size: (h1, h2),
    };
    for j in 0..cells_per_side {
        for i in 0..cells_per_side {
            let c = Point2::new(
                lo.x1 + (i as f64 + 0.5) * h1,
                lo.x2 + (j as f64 + 0.5) * h2,
            );
            if contrast.shape.contains(c) {
                grid.cell_centers.push(c);
                grid.cell_weights.push(area);
                grid.q_values.push(contrast.amplitude);
            }
        }
    }
    if grid.is_empty() {
        return Err(ForwardError::EmptyGrid);
    }
    Ok(grid)
}

/// Horizontal measurement segment {(x₁, m): a < x₁ < b} sampled at
/// x_l = (a + (b − a)·l/d, m), l = 1..d, each with weight (b − a)/d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementLine {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "m")]
    pub height: f64,
    pub d: usize,
}

impl MeasurementLine {
    pub fn new(a: f64, b: f64, height: f64, d: usize) -> Result<Self, ForwardError> {
        let line = Self { a, b, height, d };
        line.validate()?;
        Ok(line)
    }

    /// The line used for the benchmark reconstructions: a = −25, b = 25, m = 20, d = 30.
    pub fn benchmark() -> Self {
        Self {
            a: -25.0,
            b: 25.0,
            height: 20.0,
            d: 30,
        }
    }

    pub fn validate(&self) -> Result<(), ForwardError> {
        if !(self.a < self.b) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(ForwardError::InvalidLine(format!(
                "need a < b, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        if !(self.height > 0.0 && self.height.is_finite()) {
            return Err(ForwardError::InvalidLine(format!(
                "height must be positive, got {}",
                self.height
            )));
        }
        if self.d == 0 {
            return Err(ForwardError::InvalidLine("need at least one sample".into()));
        }
        Ok(())
    }

    pub fn weight(&self) -> f64 {
        (self.b - self.a) / self.d as f64
    }

    pub fn points(&self) -> Vec<Point2> {
        (1..=self.d)
            .map(|l| Point2::new(self.a + (self.b - self.a) * l as f64 / self.d as f64, self.height))
            .collect()
    }
}

/// Discrete near-field operator: entry (l, p) is w_M·u^s(x_l, x_p).
#[derive(Debug, Clone, PartialEq)]
pub struct NearFieldMatrix {
    entries: ComplexMatrix,
    wave: WaveConfig,
    line: MeasurementLine,
}

impl NearFieldMatrix {
    pub fn new(entries: ComplexMatrix, wave: WaveConfig, line: MeasurementLine) -> Result<Self, ForwardError> {
        if entries.rows() != line.d || entries.cols() != line.d {
            return Err(ForwardError::DimensionMismatch(format!(
                "near-field matrix is {}x{} but the line has d = {}",
                entries.rows(),
                entries.cols(),
                line.d
            )));
        }
        if !entries.is_finite() {
            return Err(ForwardError::Linalg(LinalgError::NonFinite));
        }
        Ok(Self { entries, wave, line })
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn wave(&self) -> &WaveConfig {
        &self.wave
    }

    pub fn line(&self) -> &MeasurementLine {
        &self.line
    }

    pub fn d(&self) -> usize {
        self.line.d
    }
}
