use qdiff_lab::corpus;
use qdiff_lab::flatgeo::{sqrt_continuation, strip_decomposition, Termination, TraceOptions};
use qdiff_lab::hurwitz::{hurwitz_dimension, Flavor};
use qdiff_lab::surface::hat_rank;
use qdiff_lab::C64;

#[test]
fn separatrices_are_horizontal() {
    for (name, pd, theta) in corpus::foliation_corpus() {
        let dec = strip_decomposition(&pd, theta, TraceOptions::default()).unwrap();
        let rot = C64::from_polar(1.0, -theta);
        for (i, t) in dec.separatrices.iter().enumerate() {
            // drop the start at the zero and keep to points with clearance
            let pts: Vec<C64> = t.points[1..].iter().copied().take_while(|z| pd.clearance(*z) > 1e-4).collect();
            if pts.len() < 2 {
                continue;
            }
            let samples = sqrt_continuation(&pd, &pts, 1.0, 1e-5).unwrap();
            let w0 = samples[0].w;
            let drift = samples.iter().map(|s| (rot * (s.w - w0)).im.abs()).fold(0.0, f64::max);
            let length = (samples.last().unwrap().w - w0).norm().max(1.0);
            assert!(drift < 1e-7 * length, "{name} separatrix {i}: drift {drift:.2e} over {length:.2}");
        }
    }
}

#[test]
fn counts_stable_under_halved_tolerance() {
    let fine = TraceOptions {
        tol: 5e-11,
        capture: 5e-6,
        ..TraceOptions::default()
    };
    for (name, pd, theta) in corpus::foliation_corpus() {
        let a = strip_decomposition(&pd, theta, TraceOptions::default()).unwrap();
        let b = strip_decomposition(&pd, theta, fine).unwrap();
        assert_eq!(a.strips.len() + a.half_planes.len(), b.strips.len() + b.half_planes.len(), "{name}");
        assert_eq!(a.signature(), b.signature(), "{name}");
        for (x, y) in a.strips.iter().zip(&b.strips) {
            assert!((x.period - y.period).norm() < 1e-7 * x.period.norm(), "{name}");
        }
    }
}

#[test]
fn type_a_strips_match_rank() {
    for n in 2..=4 {
        let q = corpus::type_a_qdiff(n, C64::new(3.0, 0.0), Flavor::Plain);
        let pd = qdiff_lab::flatgeo::PlainDifferential::from_qdiff(&q).unwrap();
        let k = q.cover.k_vector();
        for theta in [0.0, 0.1, 0.2] {
            let dec = strip_decomposition(&pd, theta, TraceOptions::default()).unwrap();
            assert!(dec.saddle_free);
            assert_eq!(dec.strips.len() as u32, hat_rank(0, &k));
            assert_eq!(dec.strips.len() as i64, hurwitz_dimension(0, &k));
            assert!(dec.strips.iter().all(|s| s.connected));
            // every separatrix escapes to the pole at infinity
            assert!(dec.signature().iter().all(|t| matches!(t, Termination::EscapesToPole(_))));
        }
    }
}

#[test]
fn threads_do_not_change_results() {
    let (_, pd, theta) = corpus::foliation_corpus().remove(2);
    let one = strip_decomposition(&pd, theta, TraceOptions::default()).unwrap();
    let four = strip_decomposition(
        &pd,
        theta,
        TraceOptions {
            threads: 4,
            ..TraceOptions::default()
        },
    )
    .unwrap();
    assert_eq!(one, four);
}
