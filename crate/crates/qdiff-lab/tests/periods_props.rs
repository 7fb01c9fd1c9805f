use qdiff_lab::corpus;
use qdiff_lab::flatgeo::{sqrt_continuation, PlainDifferential};
use qdiff_lab::hurwitz::Flavor;
use qdiff_lab::periods::{end_branch, equivariance_residual, period, period_from, SheetPath};
use qdiff_lab::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn equivariant_on_corpus_paths() {
    for (name, q) in corpus::period_corpus() {
        for (i, p) in corpus::sheet_paths(&q).iter().enumerate() {
            for m in [1, -1, 3] {
                let r = equivariance_residual(&q, p, m).unwrap();
                assert!(r < 1e-8, "{name} path {i} m={m}: {r}");
            }
        }
    }
}

#[test]
fn concatenation_adds_periods() {
    for (name, q) in corpus::period_corpus() {
        let zeros = q.zeros();
        let (a, b) = (zeros[0], zeros[0] * 0.3 + c(0.4, 1.9));
        let mid = (a + b) / 2.0 + c(0.3, -0.1);
        let mut whole = SheetPath::segment(a, mid);
        whole.vertices.push(b);
        whole.sheets.push(0);
        whole.start_at_zero = true;
        let mut first = SheetPath::segment(a, mid);
        first.start_at_zero = true;
        let second = SheetPath::segment(mid, b);
        let join = end_branch(&q, &first).unwrap();
        let (p, p1) = (period(&q, &whole).unwrap(), period(&q, &first).unwrap());
        let p2 = period_from(&q, &second, &join).unwrap();
        assert!((p - p1 - p2).norm() < 1e-8 * p.norm().max(1.0), "{name}: {p} vs {}", p1 + p2);
    }
}

#[test]
fn plain_periods_match_flat_coordinates() {
    // at s = 3 the plain differential is single valued; its periods between
    // regular points are flat-coordinate differences
    for n in 2..=4 {
        let q = corpus::type_a_qdiff(n, c(3.0, 0.0), Flavor::Plain);
        let pd = PlainDifferential::from_qdiff(&q).unwrap();
        let path = vec![c(-2.1, 0.35), c(0.05, 1.9), c(2.2, -0.4)];
        let flat = sqrt_continuation(&pd, &path, 1.0, 1e-3).unwrap();
        let w = flat.last().unwrap().w - flat[0].w;
        let mut sp = SheetPath::segment(path[0], path[1]);
        sp.vertices.push(path[2]);
        sp.sheets.push(0);
        let p = period(&q, &sp).unwrap();
        let err = (p - w).norm().min((p + w).norm());
        assert!(err < 1e-8 * w.norm(), "n={n}: {p} vs {w}");
    }
}
