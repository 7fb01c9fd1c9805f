use proptest::prelude::*;
use qdiff_lab::corpus;
use qdiff_lab::hurwitz::Flavor;
use qdiff_lab::winding::{angle_change, winding_number, wind_at_pole, wind_at_zero, Coefficient, LoopSpec};
use qdiff_lab::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn doubling_samples_is_converged() {
    for n in 2..=4 {
        let q = corpus::type_a_qdiff(n, c(3.3, 0.2), Flavor::CyS);
        let f = Coefficient::of(&q);
        for lp in [
            LoopSpec::circle(c(0.0, 0.0), 3.0),
            LoopSpec::circle(c(0.2, 0.1), 0.4),
            LoopSpec::polygon(vec![c(-3.0, -3.0), c(3.0, -3.0), c(3.0, 3.0), c(-3.0, 3.0)]),
        ] {
            let a = angle_change(&f, &lp).unwrap();
            let b = angle_change(&f, &lp.refined()).unwrap();
            assert!((a - b).abs() < 1e-8, "{a} {b}");
        }
    }
}

#[test]
fn homotopic_loops_agree() {
    let q = corpus::type_a_qdiff(3, c(4.1, -0.3), Flavor::CyS);
    let f = Coefficient::of(&q);
    let big = winding_number(&f, &LoopSpec::circle(c(0.0, 0.0), 2.5)).unwrap();
    let shifted = winding_number(&f, &LoopSpec::circle(c(0.3, -0.2), 3.4)).unwrap();
    let square = winding_number(&f, &LoopSpec::polygon(vec![c(-2.6, -2.6), c(2.6, -2.6), c(2.6, 2.6), c(-2.6, 2.6)])).unwrap();
    assert!((big - shifted).abs() < 1e-6);
    assert!((big - square).abs() < 1e-6);
    // all four zeros inside: 4 Re(s) + 2 - 4 (each zero adds s - 2)
    assert!((big - (4.0 * (4.1 - 2.0) + 2.0)).abs() < 1e-6, "{big}");
}

#[test]
fn orientation_flips_sign() {
    let f = Coefficient::power_product(vec![(c(0.0, 0.0), c(1.5, 0.0))]);
    let ccw = LoopSpec::polygon(vec![c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)]);
    let cw = LoopSpec::polygon(vec![c(-1.0, 1.0), c(1.0, 1.0), c(1.0, -1.0), c(-1.0, -1.0)]);
    assert!(ccw.is_counterclockwise() && !cw.is_counterclockwise());
    let (a, b) = (winding_number(&f, &ccw).unwrap(), winding_number(&f, &cw).unwrap());
    assert!((a + b).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_forms_on_random_data(k in 1u32..=4, l in -3i64..=6, sr in 2.01f64..10.0, si in -1.0f64..1.0, cx in -0.3f64..0.3, cy in -0.3f64..0.3) {
        let s = c(sr, si);
        let center = c(cx, cy);
        let lp = LoopSpec::circle(center, 0.5);
        let zero = Coefficient::power_product(vec![(center + 0.1, s - 2.0), (c(2.0, 2.0), s - 2.0)]);
        prop_assert!((winding_number(&zero, &lp).unwrap() - wind_at_zero(s)).abs() < 1e-6);
        let e = -(s - 2.0) * k as f64 - l as f64;
        let pole = Coefficient::power_product(vec![(center - 0.1, e)]);
        prop_assert!((winding_number(&pole, &lp).unwrap() - wind_at_pole(k, l, s)).abs() < 1e-6);
    }
}
