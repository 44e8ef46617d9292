use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ForwardError, MeasurementLine, NearFieldMatrix, QGrid};
use crate::greens::{green_unchecked, phi_at_distance, self_cell_integral, GreensError, Point2, WaveConfig};
use crate::linalg::{lu_factor, ComplexMatrix, LuFactors, DEFAULT_PIVOT_TOL};

/// Choice of incident field generated by a point source at z.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IncidentField {
    /// uⁱ(x, z) = conj(G(x, z)).
    #[default]
    Conjugate,
    /// uⁱ(x, z) = G(x, z), the outgoing point source.
    Direct,
}

/// The discretized volume integral operator on a fixed grid, with `I − A`
/// factorized once and reused for every source.
#[derive(Debug, Clone)]
pub struct ForwardSolver {
    wave: WaveConfig,
    grid: QGrid,
    incident: IncidentField,
    coupling: ComplexMatrix,
    lu: LuFactors,
    // k²·w_c·q_c
    density_weights: Vec<f64>,
}

impl ForwardSolver {
    pub fn new(wave: &WaveConfig, grid: &QGrid, incident: IncidentField) -> Result<Self, ForwardError> {
        if grid.is_empty() {
            return Err(ForwardError::EmptyGrid);
        }
        let n = grid.len();
        if grid.cell_weights.len() != n || grid.q_values.len() != n {
            return Err(ForwardError::DimensionMismatch(format!(
                "{n} cells but {} weights and {} q-values",
                grid.cell_weights.len(),
                grid.q_values.len()
            )));
        }
        let k = wave.k();
        let density_weights: Vec<f64> = grid
            .cell_weights
            .iter()
            .zip(&grid.q_values)
            .map(|(w, q)| k * k * w * q)
            .collect();

        let mut self_terms = Vec::with_capacity(n);
        for (c, &w) in grid.cell_centers.iter().zip(&grid.cell_weights) {
            let image = phi_at_distance(k, 2.0 * c.x2) * w;
            self_terms.push(self_cell_integral(wave, w)? - image);
        }

        let mut coupling = ComplexMatrix::zeros(n, n);
        coupling
            .as_mut_slice()
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, row)| {
                let yi = grid.cell_centers[i];
                for (j, entry) in row.iter_mut().enumerate() {
                    *entry = if i == j {
                        self_terms[i] * (k * k * grid.q_values[i])
                    } else {
                        green_unchecked(k, yi, grid.cell_centers[j]) * density_weights[j]
                    };
                }
            });

        let mut system = coupling.scale(-1.0);
        for i in 0..n {
            system[(i, i)] += 1.0;
        }
        let lu = lu_factor(&system, DEFAULT_PIVOT_TOL)?;
        Ok(Self {
            wave: *wave,
            grid: grid.clone(),
            incident,
            coupling,
            lu,
            density_weights,
        })
    }

    pub fn wave(&self) -> &WaveConfig {
        &self.wave
    }

    pub fn grid(&self) -> &QGrid {
        &self.grid
    }

    pub fn incident(&self) -> IncidentField {
        self.incident
    }

    /// The matrix A of the discrete system `(I − A)u = A·uⁱ`.
    pub fn coupling(&self) -> &ComplexMatrix {
        &self.coupling
    }

    /// uⁱ(y_c, source) on every cell centre.
    pub fn incident_on_q(&self, source: Point2) -> Result<Vec<Complex64>, ForwardError> {
        check_source(&self.grid, source)?;
        Ok(incident_values(self.wave.k(), &self.grid, source, self.incident))
    }

    /// First Born approximation A·uⁱ.
    pub fn born(&self, source: Point2) -> Result<Vec<Complex64>, ForwardError> {
        Ok(self.coupling.matvec(&self.incident_on_q(source)?))
    }

    /// Scattered field on the cell centres for a point source at `source`.
    pub fn solve(&self, source: Point2) -> Result<Vec<Complex64>, ForwardError> {
        let u = self.lu.solve_vec(&self.born(source)?);
        if u.iter().any(|z| !z.is_finite()) {
            return Err(ForwardError::Linalg(crate::linalg::LinalgError::NonFinite));
        }
        Ok(u)
    }

    /// Re-evaluates u^s(x, source) from the solution `u` on the cells.
    pub fn field_at(&self, u: &[Complex64], source: Point2, x: Point2) -> Result<Complex64, ForwardError> {
        field_at(&self.wave, &self.grid, &self.density_weights, u, source, x, self.incident)
    }

    /// Near-field matrix on `line`, one back-substitution per column.
    pub fn near_field(&self, line: &MeasurementLine) -> Result<NearFieldMatrix, ForwardError> {
        line.validate()?;
        let top = self.grid.top();
        if !(line.height > top) {
            return Err(ForwardError::LineTooLow {
                line: line.height,
                top,
            });
        }
        let k = self.wave.k();
        let points = line.points();
        let w_m = line.weight();
        let columns: Vec<Vec<Complex64>> = points
            .par_iter()
            .map(|&z| {
                let u = self.solve(z)?;
                let ui = incident_values(k, &self.grid, z, self.incident);
                let total: Vec<Complex64> = u.iter().zip(&ui).map(|(a, b)| a + b).collect();
                Ok(points
                    .iter()
                    .map(|&x| weighted_field(k, &self.grid, &self.density_weights, &total, x) * w_m)
                    .collect())
            })
            .collect::<Result<_, ForwardError>>()?;
        let d = line.d;
        let entries = ComplexMatrix::from_fn(d, d, |l, p| columns[p][l]);
        NearFieldMatrix::new(entries, self.wave, *line)
    }
}

fn check_source(grid: &QGrid, source: Point2) -> Result<(), ForwardError> {
    if !(source.x2 > 0.0) {
        return Err(GreensError::SourceOffDomain(source).into());
    }
    if grid.covers(source) {
        return Err(ForwardError::PointInsideQ(source));
    }
    Ok(())
}

fn incident_values(k: f64, grid: &QGrid, source: Point2, kind: IncidentField) -> Vec<Complex64> {
    grid.cell_centers
        .iter()
        .map(|&y| {
            let g = green_unchecked(k, y, source);
            match kind {
                IncidentField::Conjugate => g.conj(),
                IncidentField::Direct => g,
            }
        })
        .collect()
}

// Σ_c k²·w_c·q_c·G(x, y_c)·v_c
fn weighted_field(k: f64, grid: &QGrid, density_weights: &[f64], v: &[Complex64], x: Point2) -> Complex64 {
    grid.cell_centers
        .iter()
        .zip(density_weights)
        .zip(v)
        .map(|((&y, &w), vc)| green_unchecked(k, x, y) * w * vc)
        .sum()
}

fn field_at(
    wave: &WaveConfig,
    grid: &QGrid,
    density_weights: &[f64],
    u: &[Complex64],
    source: Point2,
    x: Point2,
    kind: IncidentField,
) -> Result<Complex64, ForwardError> {
    if u.len() != grid.len() {
        return Err(ForwardError::DimensionMismatch(format!(
            "{} cells but {} field values",
            grid.len(),
            u.len()
        )));
    }
    check_source(grid, source)?;
    if grid.covers(x) {
        return Err(ForwardError::PointInsideQ(x));
    }
    let k = wave.k();
    let ui = incident_values(k, grid, source, kind);
    let total: Vec<Complex64> = u.iter().zip(&ui).map(|(a, b)| a + b).collect();
    Ok(weighted_field(k, grid, density_weights, &total, x))
}

/// Scattered field on the cells of `grid` for the default incident field.
pub fn solve_scattered_on_q(cfg: &WaveConfig, grid: &QGrid, source: Point2) -> Result<Vec<Complex64>, ForwardError> {
    check_source(grid, source)?;
    ForwardSolver::new(cfg, grid, IncidentField::default())?.solve(source)
}

/// u^s(x, source) = k²·Σ_c w_c·q_c·G(x, y_c)·(u_c + uⁱ_c).
pub fn scattered_field_at(
    cfg: &WaveConfig,
    grid: &QGrid,
    u_on_q: &[Complex64],
    source: Point2,
    x: Point2,
) -> Result<Complex64, ForwardError> {
    let k = cfg.k();
    let weights: Vec<f64> = grid
        .cell_weights
        .iter()
        .zip(&grid.q_values)
        .map(|(w, q)| k * k * w * q)
        .collect();
    field_at(cfg, grid, &weights, u_on_q, source, x, IncidentField::default())
}

pub fn assemble_near_field(cfg: &WaveConfig, grid: &QGrid, line: &MeasurementLine) -> Result<NearFieldMatrix, ForwardError> {
    assemble_near_field_with(cfg, grid, line, IncidentField::default())
}

pub fn assemble_near_field_with(
    cfg: &WaveConfig,
    grid: &QGrid,
    line: &MeasurementLine,
    incident: IncidentField,
) -> Result<NearFieldMatrix, ForwardError> {
    ForwardSolver::new(cfg, grid, incident)?.near_field(line)
}
