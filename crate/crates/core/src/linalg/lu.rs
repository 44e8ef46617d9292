use num_complex::Complex64;
use rayon::prelude::*;

use super::{ComplexMatrix, LinalgError};

/// Relative pivot floor: a pivot smaller than this times ‖a‖_∞ is singular.
pub const DEFAULT_PIVOT_TOL: f64 = 1e-14;

// Trailing-row updates below this many rows stay on the calling thread.
const PAR_ROWS: usize = 64;

/// LU factors of a square matrix with row pivoting, `P·a = L·U`.
///
/// `L` (unit lower) and `U` share storage; `perm[i]` is the original row
/// that ended up in position `i`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

pub fn lu_factor(a: &ComplexMatrix, pivot_tol: f64) -> Result<LuFactors, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = a.rows();
    let threshold = pivot_tol * a.inf_norm();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let (p, pmag) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag < threshold || pmag == 0.0 {
            return Err(LinalgError::SingularMatrix {
                column: k,
                pivot: pmag,
                threshold,
            });
        }
        if p != k {
            let data = lu.as_mut_slice();
            for j in 0..n {
                data.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }

        let (head, tail) = lu.as_mut_slice().split_at_mut((k + 1) * n);
        let pivot_row = &head[k * n..(k + 1) * n];
        let inv_pivot = pivot_row[k].inv();
        let update = |row: &mut [Complex64]| {
            let l = row[k] * inv_pivot;
            row[k] = l;
            if l != Complex64::new(0.0, 0.0) {
                for (x, u) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                    *x -= l * u;
                }
            }
        };
        if n - k > PAR_ROWS {
            tail.par_chunks_mut(n).for_each(update);
        } else {
            tail.chunks_mut(n).for_each(update);
        }
    }
    Ok(LuFactors { lu, perm })
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `a·x = b` for every column of `b`.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        let n = self.dim();
        if b.rows() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: format!("{n} rows"),
                got: format!("{} rows", b.rows()),
            });
        }
        let cols: Vec<Vec<Complex64>> = (0..b.cols())
            .into_par_iter()
            .map(|j| self.solve_vec(&b.column(j)))
            .collect();
        let x = ComplexMatrix::from_fn(n, b.cols(), |i, j| cols[j][i]);
        if !x.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        Ok(x)
    }

    /// Solves `a·x = b` for a single right-hand side.
    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "right-hand side length mismatch");
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: Complex64 = row[..i].iter().zip(&y[..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: Complex64 = row[i + 1..].iter().zip(&y[i + 1..]).map(|(u, v)| u * v).sum();
            y[i] = (y[i] - s) / row[i];
        }
        y
    }
}

/// Solves `a·x = b` by LU with partial pivoting.
pub fn lu_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    lu_factor(a, DEFAULT_PIVOT_TOL)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn identity_returns_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = random_matrix(&mut rng, 3, 2);
        let x = lu_solve(&ComplexMatrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_system() {
        let a = ComplexMatrix::diag_real(&[2.0, 4.0]);
        let b = ComplexMatrix::from_real(2, 1, &[2.0, 4.0]).unwrap();
        let x = lu_solve(&a, &b).unwrap();
        assert_eq!(x.as_slice(), &[c(1.0), c(1.0)]);
    }

    #[test]
    fn recovers_planted_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 20;
        // diagonally shifted to keep the condition number modest
        let mut a = random_matrix(&mut rng, n, n);
        for i in 0..n {
            a[(i, i)] += c(n as f64);
        }
        let x_true = random_matrix(&mut rng, n, 3);
        let b = &a * &x_true;
        let x = lu_solve(&a, &b).unwrap();
        assert!((&x - &x_true).max_abs() < 1e-10);
        let resid = (&(&a * &x) - &b).max_abs();
        assert!(resid <= 1e-12 * b.max_abs());
    }

    #[test]
    fn needs_pivoting() {
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let b = ComplexMatrix::from_real(2, 1, &[3.0, 5.0]).unwrap();
        let x = lu_solve(&a, &b).unwrap();
        assert_eq!(x.as_slice(), &[c(5.0), c(3.0)]);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        let b = ComplexMatrix::from_real(2, 1, &[1.0, 1.0]).unwrap();
        assert!(matches!(lu_solve(&a, &b), Err(LinalgError::SingularMatrix { .. })));
        assert!(matches!(
            lu_solve(&ComplexMatrix::zeros(3, 3), &ComplexMatrix::zeros(3, 1)),
            Err(LinalgError::SingularMatrix { column: 0, .. })
        ));
    }

    #[test]
    fn shape_errors() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(lu_factor(&a, DEFAULT_PIVOT_TOL), Err(LinalgError::NotSquare { .. })));
        let f = lu_factor(&ComplexMatrix::identity(2), DEFAULT_PIVOT_TOL).unwrap();
        assert!(f.solve(&ComplexMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn parallel_path_matches_small_path() {
        // n above PAR_ROWS exercises the rayon branch
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100;
        let mut a = random_matrix(&mut rng, n, n);
        for i in 0..n {
            a[(i, i)] += c(10.0);
        }
        let x_true = random_matrix(&mut rng, n, 1);
        let x = lu_solve(&a, &(&a * &x_true)).unwrap();
        assert!((&x - &x_true).max_abs() < 1e-10);
    }
}
