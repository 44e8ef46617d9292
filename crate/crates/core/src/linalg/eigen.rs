//! Hermitian eigenvalues via the real symmetric embedding.
//!
//! A Hermitian `A = X + iY` (n×n) is mapped to the real symmetric
//! `[[X, −Y], [Y, X]]` (2n×2n). Its spectrum is that of `A` with every
//! eigenvalue repeated twice, and an eigenvector `[u; w]` corresponds to the
//! complex eigenvector `u + i·w`. The real problem is diagonalised with
//! cyclic Jacobi rotations.

use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Allowed |a_ij − conj(a_ji)| relative to ‖a‖_max.
    pub hermitian_tol: f64,
    /// Stop once the off-diagonal Frobenius norm falls below this times the initial norm.
    pub jacobi_tol: f64,
    pub max_sweeps: usize,
    /// Allowed gap inside an embedded eigenvalue pair, relative to ‖a‖_max.
    pub pair_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            hermitian_tol: 1e-12,
            jacobi_tol: 1e-13,
            max_sweeps: 100,
            pair_tol: 1e-8,
        }
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSpectrum {
    eigenvalues: Vec<f64>,
}

impl HermitianSpectrum {
    /// Wraps values, sorting them ascending.
    pub fn new(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Number of eigenvalues strictly below `-threshold`.
    pub fn count_below(&self, threshold: f64) -> usize {
        self.eigenvalues.partition_point(|&v| v < -threshold)
    }
}

/// Eigenpairs of a Hermitian matrix; `vectors` holds unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: HermitianSpectrum,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Rebuilds `V·diag(f(λ))·Vᴴ`.
    pub fn reassemble(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.rows();
        let fl: Vec<f64> = self.values.eigenvalues().iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..fl.len())
                .map(|k| self.vectors[(i, k)] * self.vectors[(j, k)].conj() * fl[k])
                .sum()
        })
    }
}

pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<HermitianSpectrum, LinalgError> {
    hermitian_eigenvalues_with(a, &EigenOptions::default())
}

pub fn hermitian_eigenvalues_with(
    a: &ComplexMatrix,
    opts: &EigenOptions,
) -> Result<HermitianSpectrum, LinalgError> {
    let scale = check_hermitian(a, opts)?;
    let mut emb = embed(a);
    jacobi(&mut emb, None, opts)?;
    let diag = emb.diagonal();
    let (values, _) = collapse_pairs(&diag, scale, opts)?;
    Ok(HermitianSpectrum { eigenvalues: values })
}

/// Eigenvalues and orthonormal eigenvectors.
pub fn hermitian_eigen(a: &ComplexMatrix, opts: &EigenOptions) -> Result<HermitianEigen, LinalgError> {
    let scale = check_hermitian(a, opts)?;
    let n = a.rows();
    let mut emb = embed(a);
    let mut v = SymMatrix::identity(2 * n);
    jacobi(&mut emb, Some(&mut v), opts)?;
    let diag = emb.diagonal();
    let (values, order) = collapse_pairs(&diag, scale, opts)?;

    // Each pair contributes candidates u + i·w from both real eigenvectors.
    // Within a degenerate cluster they may coincide up to a phase, so pick
    // whichever survives Gram-Schmidt against the vectors already accepted.
    let mut accepted: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for pair in order.chunks(2) {
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for &col in pair {
            let mut cand: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new(v.get(i, col), v.get(i + n, col)))
                .collect();
            for q in &accepted {
                let proj: Complex64 = q.iter().zip(&cand).map(|(a, b)| a.conj() * b).sum();
                for (c, qi) in cand.iter_mut().zip(q) {
                    *c -= proj * qi;
                }
            }
            let nrm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
                best = Some((nrm, cand));
            }
        }
        let (nrm, mut cand) = best.expect("pairs are non-empty");
        if nrm <= 1e-8 {
            return Err(LinalgError::NoConvergence {
                sweeps: opts.max_sweeps,
                off: nrm,
            });
        }
        cand.iter_mut().for_each(|z| *z /= nrm);
        accepted.push(cand);
    }
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| accepted[k][i]);
    Ok(HermitianEigen {
        values: HermitianSpectrum { eigenvalues: values },
        vectors,
    })
}

/// Singular values in descending order.
///
/// Taken from the nonnegative half of the spectrum of the Hermitian dilation
/// `[[0, a], [aᴴ, 0]]`, whose eigenvalues are ±σ_i plus |rows − cols| zeros.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    let (m, n) = (a.rows(), a.cols());
    let dil = ComplexMatrix::from_fn(m + n, m + n, |i, j| {
        if i < m && j >= m {
            a[(i, j - m)]
        } else if i >= m && j < m {
            a[(j, i - m)].conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let spec = hermitian_eigenvalues(&dil)?;
    let ev = spec.eigenvalues();
    let r = m.min(n);
    Ok(ev[ev.len() - r..].iter().rev().map(|s| s.max(0.0)).collect())
}

/// Number of singular values above `rel_tol` times the largest one.
pub fn numerical_rank(a: &ComplexMatrix, rel_tol: f64) -> Result<usize, LinalgError> {
    let sv = singular_values(a)?;
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > rel_tol * smax).count())
}

fn check_hermitian(a: &ComplexMatrix, opts: &EigenOptions) -> Result<f64, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let scale = a.max_abs();
    let allowed = opts.hermitian_tol * scale;
    let asym = a.hermitian_defect();
    if asym > allowed {
        return Err(LinalgError::NotHermitian {
            asymmetry: asym,
            allowed,
        });
    }
    Ok(scale)
}

fn collapse_pairs(
    diag: &[f64],
    scale: f64,
    opts: &EigenOptions,
) -> Result<(Vec<f64>, Vec<usize>), LinalgError> {
    let mut order: Vec<usize> = (0..diag.len()).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let allowed = opts.pair_tol * scale;
    let values = order
        .chunks(2)
        .map(|p| {
            let (lo, hi) = (diag[p[0]], diag[p[1]]);
            if hi - lo > allowed {
                Err(LinalgError::UnpairedSpectrum {
                    lower: lo,
                    upper: hi,
                    allowed,
                })
            } else {
                Ok(0.5 * (lo + hi))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((values, order))
}

/// Square real matrix, row-major; symmetric in use.
struct SymMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SymMatrix {
    fn identity(n: usize) -> Self {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
        }
        Self { n, a }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    fn off_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j).powi(2);
                }
            }
        }
        s.sqrt()
    }

    fn frobenius(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn embed(a: &ComplexMatrix) -> SymMatrix {
    let n = a.rows();
    let m = 2 * n;
    let mut e = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            e[i * m + j] = z.re;
            e[(i + n) * m + (j + n)] = z.re;
            e[i * m + (j + n)] = -z.im;
            e[(i + n) * m + j] = z.im;
        }
    }
    SymMatrix { n: m, a: e }
}

/// Cyclic Jacobi on a real symmetric matrix, optionally accumulating the
/// rotations into `v` (columns become eigenvectors).
fn jacobi(s: &mut SymMatrix, mut v: Option<&mut SymMatrix>, opts: &EigenOptions) -> Result<(), LinalgError> {
    let n = s.n;
    let target = opts.jacobi_tol * s.frobenius();
    let mut off = s.off_norm();
    let mut sweeps = 0;
    while off > target {
        if sweeps == opts.max_sweeps {
            return Err(LinalgError::NoConvergence { sweeps, off });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = s.a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = s.a[p * n + p];
                let aqq = s.a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                rotate(&mut s.a, n, p, q, c, sn);
                s.a[p * n + p] = app - t * apq;
                s.a[q * n + q] = aqq + t * apq;
                s.a[p * n + q] = 0.0;
                s.a[q * n + p] = 0.0;
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v.a[k * n + p];
                        let vkq = v.a[k * n + q];
                        v.a[k * n + p] = c * vkp - sn * vkq;
                        v.a[k * n + q] = sn * vkp + c * vkq;
                    }
                }
            }
        }
        sweeps += 1;
        off = s.off_norm();
    }
    Ok(())
}

// Applies Jᵀ·A·J for the (p, q) plane rotation to every entry outside the
// 2×2 (p, q) block; the block itself is set by the caller.
#[inline]
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[k * n + p] = new_kp;
        a[p * n + k] = new_kp;
        a[k * n + q] = new_kq;
        a[q * n + k] = new_kq;
    }
}
