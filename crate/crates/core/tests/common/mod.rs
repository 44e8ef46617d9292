//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::f64::consts::PI;

use monowave::{ComplexMatrix, Complex64};
use rand::Rng;

const GAMMA: f64 = 0.577_215_664_901_532_9;

/// J₀, J₁, Y₀, Y₁ from their ascending series (accurate for x ≲ 5).
pub fn bessel_series(x: f64) -> (f64, f64, f64, f64) {
    let q = x * x / 4.0;
    let (mut j0, mut j1, mut y0_sum, mut y1_sum) = (0.0, 0.0, 0.0, 0.0);
    let mut harmonic = 0.0; // H_m
    let mut fact_m = 1.0; // m!
    let mut pow = 1.0; // q^m
    for m in 0..60 {
        if m > 0 {
            harmonic += 1.0 / m as f64;
            fact_m *= m as f64;
            pow *= q;
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let t0 = sign * pow / (fact_m * fact_m);
        let t1 = sign * pow * (x / 2.0) / (fact_m * fact_m * (m + 1) as f64);
        j0 += t0;
        j1 += t1;
        y0_sum += -t0 * harmonic;
        // ψ(m+1) + ψ(m+2) = 2H_m + 1/(m+1) − 2γ
        y1_sum += t1 * (2.0 * harmonic + 1.0 / (m + 1) as f64 - 2.0 * GAMMA);
    }
    let log = (x / 2.0).ln();
    let y0 = 2.0 / PI * ((log + GAMMA) * j0 + y0_sum);
    let y1 = 2.0 / PI * log * j1 - 2.0 / (PI * x) - y1_sum / PI;
    (j0, j1, y0, y1)
}

/// Adaptive Simpson quadrature of a complex integrand on [a, b].
pub fn adaptive_simpson(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    fn step(
        f: &dyn Fn(f64) -> Complex64,
        a: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
        let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// ∫ over the disk of the given area of (i/4)·H₀⁽¹⁾(k|x − y|) dy, centred at x,
/// by radial adaptive quadrature with the series Bessel oracle.
pub fn self_cell_oracle(k: f64, area: f64) -> Complex64 {
    let rho = (area / PI).sqrt();
    // r = ρ s² removes the r·log r kink at the origin
    let integrand = |s: f64| {
        if s == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let r = rho * s * s;
        let (j0, _, y0, _) = bessel_series(k * r);
        let phi = Complex64::new(0.0, 0.25) * Complex64::new(j0, y0);
        phi * (2.0 * PI * r * 2.0 * rho * s)
    };
    adaptive_simpson(&integrand, 0.0, 1.0, 1e-16)
}

pub fn random_complex(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let a = random_complex(rng, n, n);
    monowave::hermitian_part(&a).unwrap()
}

/// Unitary factor of a random matrix by modified Gram–Schmidt on columns.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let a = random_complex(rng, n, n);
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    for j in 0..n {
        for i in 0..j {
            let proj: Complex64 = cols[i].iter().zip(&cols[j]).map(|(q, v)| q.conj() * v).sum();
            let qi = cols[i].clone();
            for (v, q) in cols[j].iter_mut().zip(&qi) {
                *v -= proj * q;
            }
        }
        let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Relative max-norm distance ‖a − b‖_max / ‖b‖_max.
pub fn rel_max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).max_abs() / b.max_abs()
}

/// Parses a plain PGM (P2) file: magic, width, height, maxval, then
/// width·height decimal samples, with `#` comments allowed between tokens.
pub fn parse_plain_pgm(text: &str) -> Result<(usize, usize, u32, Vec<u32>), String> {
    let mut tokens = Vec::new();
    for line in text.lines() {
        let content = line.split('#').next().unwrap_or("");
        tokens.extend(content.split_ascii_whitespace());
    }
    let mut it = tokens.into_iter();
    if it.next() != Some("P2") {
        return Err("magic is not P2".into());
    }
    let mut num = |what: &str| -> Result<u64, String> {
        it.next()
            .ok_or(format!("missing {what}"))?
            .parse::<u64>()
            .map_err(|e| format!("bad {what}: {e}"))
    };
    let width = num("width")? as usize;
    let height = num("height")? as usize;
    let maxval = num("maxval")?;
    if maxval == 0 || maxval >= 65536 {
        return Err(format!("maxval {maxval} out of range"));
    }
    let mut pixels = Vec::with_capacity(width * height);
    for _ in 0..width * height {
        let v = num("pixel")?;
        if v > maxval {
            return Err(format!("pixel {v} exceeds maxval {maxval}"));
        }
        pixels.push(v as u32);
    }
    if num("trailing").is_ok() {
        return Err("trailing data".into());
    }
    Ok((width, height, maxval as u32, pixels))
}

/// Distance from `p` to the boundary of the axis-aligned ellipse, by dense
/// sampling of the boundary.
pub fn ellipse_boundary_distance(center: (f64, f64), semi: (f64, f64), p: (f64, f64)) -> f64 {
    let n = 20_000;
    (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            let (bx, by) = (center.0 + semi.0 * t.cos(), center.1 + semi.1 * t.sin());
            (p.0 - bx).hypot(p.1 - by)
        })
        .fold(f64::INFINITY, f64::min)
}
