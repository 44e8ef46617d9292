//! Finite-dimensional checks of the abstract factorization theory: the
//! counterexample to the range identity when Im T is not coercive, and the
//! coercivity inequality ‖u‖² ≤ C(‖Tu‖² + ‖Ku‖²).

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{
    anti_hermitian_part, hermitian_eigen, hermitian_part, numerical_rank, singular_values, ComplexMatrix,
    EigenOptions, LinalgError,
};

/// Relative singular-value floor for ranks and injectivity.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// F = G·T·Gᴴ.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationTriple {
    pub g: ComplexMatrix,
    pub t: ComplexMatrix,
    pub f: ComplexMatrix,
}

impl FactorizationTriple {
    pub fn new(g: ComplexMatrix, t: ComplexMatrix) -> Result<Self, TheoryError> {
        if !t.is_square() || t.rows() != g.cols() {
            return Err(TheoryError::DimensionMismatch(format!(
                "g is {}x{}, t is {}x{}",
                g.rows(),
                g.cols(),
                t.rows(),
                t.cols()
            )));
        }
        let f = g.matmul(&t)?.matmul(&g.conj_transpose())?;
        Ok(Self { g, t, f })
    }
}

/// 2×4 selector G, 4×4 anti-diagonal permutation T; G·T·Gᴴ vanishes.
pub fn build_counterexample() -> FactorizationTriple {
    let g = ComplexMatrix::from_fn(2, 4, |i, j| if i == j { one() } else { zero() });
    let t = ComplexMatrix::from_fn(4, 4, |i, j| if i + j == 3 { one() } else { zero() });
    FactorizationTriple::new(g, t).expect("fixed dimensions compose")
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// |Re(e^{iθ}F)| + Im F, with Re/Im the Hermitian and skew-Hermitian parts.
pub fn f_sharp(f: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix, TheoryError> {
    let rotated = f.scale_complex(Complex64::from_polar(1.0, theta));
    let re = hermitian_part(&rotated)?;
    let abs_re = if re.max_abs() == 0.0 {
        re
    } else {
        hermitian_eigen(&re, &EigenOptions::default())?.reassemble(f64::abs)
    };
    Ok(&abs_re + &anti_hermitian_part(f)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RangeReport {
    pub rank_g: usize,
    pub rank_fsharp_sqrt: usize,
    pub identity_holds: bool,
}

/// Compares Ran G with Ran F_#^{1/2} (θ = 0). Both live in the same space, so
/// they coincide exactly when rank G = rank F_# = rank [G | F_#].
pub fn verify_range_identity_failure(triple: &FactorizationTriple) -> Result<RangeReport, TheoryError> {
    let fs = f_sharp(&triple.f, 0.0)?;
    let rank_g = numerical_rank(&triple.g, RANK_TOL)?;
    // F_# is PSD here, so its square root has the same range
    let rank_fs = numerical_rank(&fs, RANK_TOL)?;
    let joint = numerical_rank(&triple.g.hstack(&fs)?, RANK_TOL)?;
    Ok(RangeReport {
        rank_g,
        rank_fsharp_sqrt: rank_fs,
        identity_holds: rank_g == rank_fs && rank_fs == joint,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoercivityReport {
    /// Smallest admissible C; infinite when the inequality fails.
    pub c_best: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub holds: bool,
}

/// Best constant in ‖u‖² ≤ C(‖t·u‖² + ‖k·u‖²), i.e. 1/σ_min² of [t; k].
pub fn lemma33_coercivity(t: &ComplexMatrix, k: &ComplexMatrix) -> Result<CoercivityReport, TheoryError> {
    if t.cols() != k.cols() {
        return Err(TheoryError::DimensionMismatch(format!(
            "t has {} columns, k has {}",
            t.cols(),
            k.cols()
        )));
    }
    let stacked = t.vstack(k)?;
    let sv = singular_values(&stacked)?;
    let n = stacked.cols();
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    // fewer rows than columns leaves a kernel
    let sigma_min = if sv.len() < n { 0.0 } else { sv[n - 1] };
    let holds = sigma_max > 0.0 && sigma_min > RANK_TOL * sigma_max;
    Ok(CoercivityReport {
        c_best: if holds { 1.0 / (sigma_min * sigma_min) } else { f64::INFINITY },
        sigma_min,
        sigma_max,
        holds,
    })
}

/// Everything `theory-check` reports.
#[derive(Debug, Clone, Serialize)]
pub struct TheoryReport {
    pub counterexample_f_is_zero: bool,
    pub counterexample: RangeReport,
    pub identity_control: RangeReport,
    pub coercivity_example: CoercivityReport,
    pub coercivity_degenerate: CoercivityReport,
}

pub fn theory_report() -> Result<TheoryReport, TheoryError> {
    let triple = build_counterexample();
    let control = FactorizationTriple::new(triple.g.clone(), ComplexMatrix::identity(4))?;
    Ok(TheoryReport {
        counterexample_f_is_zero: triple.f.as_slice().iter().all(|z| *z == zero()),
        counterexample: verify_range_identity_failure(&triple)?,
        identity_control: verify_range_identity_failure(&control)?,
        coercivity_example: lemma33_coercivity(&ComplexMatrix::diag_real(&[1.0, 0.0]), &ComplexMatrix::identity(2))?,
        coercivity_degenerate: lemma33_coercivity(&ComplexMatrix::zeros(2, 2), &ComplexMatrix::zeros(2, 2))?,
    })
}
