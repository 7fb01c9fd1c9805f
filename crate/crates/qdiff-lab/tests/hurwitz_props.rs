use proptest::prelude::*;
use qdiff_lab::corpus;
use qdiff_lab::hurwitz::{cyclic_action, fitted_exponent, make_qdiff, recover_cover, zero_count_check, CoverFile, Flavor, SingularityKind};
use qdiff_lab::suites::{random_cover, random_type_a};
use qdiff_lab::C64;
use rand::SeedableRng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(110))]

    #[test]
    fn zero_count_on_random_covers(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let cover = random_cover(&mut rng);
        let n = cover.poles.len();
        let mut l = vec![1i64; n];
        l[0] = 4 - (n as i64 - 1);
        let q = make_qdiff(cover.clone(), l, C64::new(3.5, 0.25), Flavor::CyS).unwrap();
        let r = zero_count_check(&q).unwrap();
        prop_assert!(r.ok, "{r:?}");
        prop_assert_eq!(r.expected, cover.k_vector().iter().map(|&k| k as i64).sum::<i64>());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn recover_inverts_make(seed in any::<u64>(), n in 2usize..5, sr in 2.5f64..6.0, si in -0.5f64..0.5) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let cover = random_type_a(&mut rng, n);
        let s = C64::new(sr, si);
        let q = make_qdiff(cover.clone(), vec![4], s, Flavor::CyS).unwrap();
        let rec = recover_cover(|z| q.coefficient(z), &cover.poles, &[4], s, None).unwrap();
        let best = (0..=n as i64)
            .map(|m| {
                let moved = cyclic_action(&cover, m).unwrap();
                moved.num.coef.iter().zip(&rec.cover.num.coef).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        prop_assert!(best < 1e-8, "{best}");
    }
}

#[test]
fn local_exponents_match_declared() {
    let s = C64::new(3.5, 0.0);
    for n in 2..=4 {
        let q = corpus::type_a_qdiff(n, s, Flavor::CyS);
        for sing in q.singularities.iter().filter(|x| x.kind == SingularityKind::Zero) {
            let at = sing.at.finite().unwrap();
            for dir in [0.3, 2.0, -1.9] {
                let e = fitted_exponent(&q, at, dir);
                assert!((e - sing.exponent.re).abs() < 1e-3, "n={n}: {e} vs {}", sing.exponent);
            }
        }
    }
    let q = corpus::annulus_qdiff(2, 1);
    for sing in &q.singularities {
        if let Some(at) = sing.at.finite() {
            let e = fitted_exponent(&q, at, 0.7);
            assert!((e - sing.exponent.re).abs() < 1e-2, "{sing:?}: {e}");
        }
    }
}

#[test]
fn cover_file_roundtrip() {
    let q = corpus::type_a_qdiff(3, C64::new(3.2, 0.1), Flavor::CyS);
    let file = CoverFile::from_qdiff(&q);
    let text = serde_json::to_string(&file).unwrap();
    let back: CoverFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back.qdiff().unwrap().cover, q.cover);
    // omitted den and poles mean a polynomial
    let poly: CoverFile = serde_json::from_str(r#"{"num": [[0,0],[-3,0],[0,0],[1,0]], "l": [4], "s": [3,0], "flavor": "plain"}"#).unwrap();
    assert_eq!(poly.qdiff().unwrap().zeros().len(), 3);
}
