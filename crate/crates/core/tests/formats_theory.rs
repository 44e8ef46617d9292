mod common;

use common::{parse_plain_pgm, random_complex};
use monowave::recon::IndicatorMap;
use monowave::theory::{build_counterexample, lemma33_coercivity, verify_range_identity_failure, FactorizationTriple};
use monowave::{Complex64, ComplexMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn map_strategy() -> impl Strategy<Value = (usize, usize, Vec<u32>)> {
    (1usize..12, 1usize..40).prop_flat_map(|(m, d)| {
        (Just(m), Just(d), proptest::collection::vec(0..=d as u32, m * m))
    })
}

proptest! {
    #[test]
    fn csv_round_trip((m, d, values) in map_strategy()) {
        let map = IndicatorMap::new(m, d, values).unwrap();
        let csv = map.to_csv();
        prop_assert!(csv.ends_with('\n') && !csv.contains(",\n") && !csv.contains('\r'));
        prop_assert_eq!(IndicatorMap::read_csv(csv.as_bytes(), d).unwrap(), map);
    }

    #[test]
    fn pgm_is_valid_and_flipped((m, d, values) in map_strategy()) {
        let map = IndicatorMap::new(m, d, values).unwrap();
        let (w, h, maxval, pixels) = parse_plain_pgm(&map.to_pgm()).unwrap();
        prop_assert_eq!((w, h, maxval as usize), (m, m, d));
        for row in 0..m {
            for col in 0..m {
                prop_assert_eq!(pixels[(m - 1 - row) * m + col], map.get(row, col));
            }
        }
    }

    #[test]
    fn zero_product_triples_fail_range_identity(seed in any::<u64>()) {
        // g = [A | 0] and t with vanishing top-left block give g·t·gᴴ = 0
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_complex(&mut rng, 2, 2);
        let g = ComplexMatrix::from_fn(2, 4, |i, j| if j < 2 { a[(i, j)] } else { Complex64::new(0.0, 0.0) });
        let r = random_complex(&mut rng, 4, 4);
        let t = ComplexMatrix::from_fn(4, 4, |i, j| if i < 2 && j < 2 { Complex64::new(0.0, 0.0) } else { r[(i, j)] });
        let triple = FactorizationTriple::new(g, t).unwrap();
        prop_assert!(triple.f.max_abs() == 0.0);
        let report = verify_range_identity_failure(&triple).unwrap();
        prop_assert_eq!(report.rank_g, 2);
        prop_assert!(!report.identity_holds);
    }

    #[test]
    fn coercivity_inequality_holds_pointwise(seed in any::<u64>(), rank in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = if rank == 0 {
            ComplexMatrix::zeros(6, 4)
        } else {
            &random_complex(&mut rng, 6, rank) * &random_complex(&mut rng, rank, 4)
        };
        let k = random_complex(&mut rng, 4, 4);
        let report = lemma33_coercivity(&t, &k).unwrap();
        prop_assert!(report.holds);
        let norm2 = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        for _ in 0..20 {
            let u: Vec<Complex64> = (0..4)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let rhs = report.c_best * (norm2(&t.matvec(&u)) + norm2(&k.matvec(&u)));
            prop_assert!(norm2(&u) <= rhs * (1.0 + 1e-9) + 1e-9);
        }
    }
}

#[test]
fn coercivity_constant_is_sharp() {
    // equality is attained on the bottom right singular vector: for diagonal
    // inputs that is a coordinate vector
    let t = ComplexMatrix::diag_real(&[3.0, 0.0]);
    let k = ComplexMatrix::diag_real(&[0.0, 0.5]);
    let r = lemma33_coercivity(&t, &k).unwrap();
    assert!((r.c_best - 4.0).abs() < 1e-12);
}

#[test]
fn counterexample_report_matches_printed_instance() {
    let c = build_counterexample();
    #[rustfmt::skip]
    let g = ComplexMatrix::from_real(2, 4, &[
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
    ]).unwrap();
    #[rustfmt::skip]
    let t = ComplexMatrix::from_real(4, 4, &[
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, 1.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        1.0, 0.0, 0.0, 0.0,
    ]).unwrap();
    assert_eq!(c.g, g);
    assert_eq!(c.t, t);
    assert_eq!(c.f, ComplexMatrix::zeros(2, 2));
}
