mod common;

use common::{random_hermitian, random_unitary};
use monowave::forward::MeasurementLine;
use monowave::greens::{green_halfplane, Point2, WaveConfig};
use monowave::mono::{
    assemble_probe, probe_from_nodes, ContrastSign, Direction, MonotonicityTest, ProbeMatrix, SpectralTolerance,
    TestSquare,
};
use monowave::{hermitian_eigenvalues, hermitian_part, Complex64, ComplexMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn wave() -> WaveConfig {
    WaveConfig::new(5.0).unwrap()
}

fn line() -> MeasurementLine {
    MeasurementLine::new(-25.0, 25.0, 20.0, 16).unwrap()
}

fn square() -> impl Strategy<Value = TestSquare> {
    (0.0f64..1.0, 0.005f64..0.1, 0.0f64..1.0, 1usize..5).prop_map(|(x1, h, t, q)| {
        TestSquare::new(Point2::new(x1, h + 0.01 + t), h, q).unwrap()
    })
}

fn psd_random(seed: u64, d: usize) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_hermitian(&mut rng, d);
    hermitian_part(&(&a * &a)).unwrap()
}

fn count(n: &ComplexMatrix, p: &ProbeMatrix, alpha: f64, dir: Direction) -> usize {
    MonotonicityTest::new(n, alpha, dir, ContrastSign::Positive, SpectralTolerance::default())
        .unwrap()
        .evaluate(p)
        .unwrap()
        .negative_count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn probe_is_psd(sq in square()) {
        let p = assemble_probe(&wave(), &sq, &line()).unwrap();
        let spec = hermitian_eigenvalues(p.entries()).unwrap();
        prop_assert!(spec.eigenvalues()[0] >= -1e-10 * spec.max_abs());
    }

    #[test]
    fn probe_equals_direct_double_sum(sq in square()) {
        let p = assemble_probe(&wave(), &sq, &line()).unwrap();
        let (nodes, weights) = sq.quadrature();
        let xs = line().points();
        for l in 0..xs.len() {
            for q in 0..xs.len() {
                let mut s = Complex64::new(0.0, 0.0);
                for (y, w) in nodes.iter().zip(&weights) {
                    s += green_halfplane(&wave(), xs[l], *y).unwrap()
                        * green_halfplane(&wave(), xs[q], *y).unwrap().conj()
                        * *w;
                }
                s *= line().weight();
                prop_assert!((p.entries()[(l, q)] - s).norm() <= 1e-12 * p.entries().max_abs());
            }
        }
    }

    #[test]
    fn nested_nodes_give_larger_probe(sq in square(), extra in 1usize..6) {
        // the larger node set is a superset of the smaller one
        let (nodes, weights) = sq.quadrature();
        let mut more_nodes = nodes.clone();
        let mut more_weights = weights.clone();
        for i in 0..extra {
            more_nodes.push(Point2::new(sq.center.x1 + 0.3 + 0.05 * i as f64, sq.center.x2));
            more_weights.push(weights[0]);
        }
        let small = probe_from_nodes(&wave(), &nodes, &weights, &line());
        let big = probe_from_nodes(&wave(), &more_nodes, &more_weights, &line());
        let diff = big.entries() - small.entries();
        let spec = hermitian_eigenvalues(&hermitian_part(&diff).unwrap()).unwrap();
        prop_assert!(spec.eigenvalues()[0] >= -1e-10 * big.entries().max_abs());
    }

    #[test]
    fn counts_invariant_under_unitary_conjugation(seed in any::<u64>(), alpha in 0.1f64..10.0, outside in any::<bool>()) {
        let d = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = random_hermitian(&mut rng, d);
        let p = ProbeMatrix::from_hermitian(psd_random(seed.wrapping_add(1), d)).unwrap();
        let u = random_unitary(&mut rng, d);
        let rot = |m: &ComplexMatrix| hermitian_part(&(&(&u * m) * &u.conj_transpose())).unwrap();
        let pr = ProbeMatrix::from_hermitian(rot(p.entries())).unwrap();
        let dir = if outside { Direction::Outside } else { Direction::Inside };
        prop_assert_eq!(count(&n, &p, alpha, dir), count(&rot(&n), &pr, alpha, dir));
    }

    #[test]
    fn counts_monotone_in_alpha(seed in any::<u64>(), a1 in 0.0f64..20.0, a2 in 0.0f64..20.0) {
        let d = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = random_hermitian(&mut rng, d);
        let p = ProbeMatrix::from_hermitian(psd_random(seed.wrapping_add(7), d)).unwrap();
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        prop_assert!(count(&n, &p, lo, Direction::Inside) <= count(&n, &p, hi, Direction::Inside));
        prop_assert!(count(&n, &p, lo, Direction::Outside) >= count(&n, &p, hi, Direction::Outside));
    }

    #[test]
    fn sign_flip_twice_is_identity(seed in any::<u64>(), alpha in 0.0f64..5.0) {
        let d = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = random_hermitian(&mut rng, d);
        let p = ProbeMatrix::from_hermitian(psd_random(seed ^ 3, d)).unwrap();
        let t = MonotonicityTest::new(&n, alpha, Direction::Inside, ContrastSign::Positive, SpectralTolerance::default()).unwrap();
        prop_assert_eq!(t.evaluate(&p).unwrap(), t.clone().sign_flipped().sign_flipped().evaluate(&p).unwrap());
    }
}

#[test]
fn mirrored_squares_reverse_indices() {
    // symmetric line (a = −b): x₁ ↦ −x₁ maps sample l to d − l, up to the
    // one-sample offset of the right-endpoint rule
    let line = MeasurementLine::new(-25.0, 25.0, 20.0, 50).unwrap();
    let left = TestSquare::new(Point2::new(-0.7, 0.5), 0.05, 3).unwrap();
    let right = TestSquare::new(Point2::new(0.7, 0.5), 0.05, 3).unwrap();
    let pl = assemble_probe(&wave(), &left, &line).unwrap();
    let pr = assemble_probe(&wave(), &right, &line).unwrap();
    let d = line.d;
    let mut worst = 0.0f64;
    for l in 0..d - 1 {
        for p in 0..d - 1 {
            // x_{l+1} = −x_{d−1−l} in 1-based terms: index l ↔ d − 2 − l
            let diff = pl.entries()[(l, p)] - pr.entries()[(d - 2 - l, d - 2 - p)];
            worst = worst.max(diff.norm());
        }
    }
    assert!(worst < 1e-12 * pl.entries().max_abs(), "{worst}");
}

#[test]
fn refined_probe_quadrature_agrees() {
    let sq = TestSquare::new(Point2::new(0.4, 0.6), 0.0125, 3).unwrap();
    let fine = TestSquare { quad_points_per_side: 5, ..sq };
    let a = assemble_probe(&wave(), &sq, &line()).unwrap();
    let b = assemble_probe(&wave(), &fine, &line()).unwrap();
    assert!((a.entries() - b.entries()).max_abs() < 1e-3 * b.entries().max_abs());
}
