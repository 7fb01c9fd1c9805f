use qdiff_lab::corpus;
use qdiff_lab::quiver::{collapse_only, dga_from_arcs, n_reduce, ArrowKind, Grading};
use qdiff_lab::surface::ArcSystem;

fn systems() -> Vec<(String, ArcSystem)> {
    let mut v: Vec<(String, ArcSystem)> = corpus::arc_systems().into_iter().map(|(n, s)| (n.to_string(), s)).collect();
    for d in -1..=1 {
        v.push((format!("annulus-2-1 d={d}"), corpus::annulus(2, 1, d)));
    }
    v
}

#[test]
fn bidegree_bookkeeping() {
    for (name, sys) in systems() {
        let dga = dga_from_arcs(&sys, 6).unwrap();
        let q = &dga.quiver;
        for a in q.originals() {
            let d = q.pairing[a].unwrap();
            let (x, y) = (q.arrows[a].bidegree, q.arrows[d].bidegree);
            assert_eq!((x.0 + y.0, x.1 + y.1), (2, -1), "{name}");
        }
        for w in dga.potential.terms.keys() {
            let t = w.iter().fold((0, 0), |a, &x| (a.0 + q.arrows[x].bidegree.0, a.1 + q.arrows[x].bidegree.1));
            assert_eq!(t, (3, -1), "{name}");
        }
        assert!(q.arrows.iter().filter(|a| a.kind == ArrowKind::Loop).all(|a| a.bidegree == (1, -1)));
    }
}

#[test]
fn differential_shifts_bidegree_and_squares_to_zero() {
    for (name, sys) in systems() {
        let dga = dga_from_arcs(&sys, 6).unwrap();
        dga.check_degree_shift().unwrap();
        for (x, img) in dga.differential.iter().enumerate() {
            let want = dga.quiver.arrows[x].bidegree;
            for w in img.keys() {
                let got = w.iter().fold((0, 0), |a, &y| {
                    let b = dga.quiver.arrows[y].bidegree;
                    (a.0 + b.0, a.1 + b.1)
                });
                assert_eq!(got, (want.0 + 1, want.1), "{name}");
            }
        }
        assert!(dga.verify_d_squared().unwrap().is_empty(), "{name}");
    }
}

#[test]
fn reduction_commutes_with_collapse() {
    for (name, sys) in systems() {
        let dga = dga_from_arcs(&sys, 6).unwrap();
        for n in 2..=6 {
            let reduced = n_reduce(&dga, n).unwrap();
            let collapsed = collapse_only(&dga, n);
            assert_eq!(reduced.grading, Grading::Collapsed(n));
            assert!(reduced.verify_d_squared().unwrap().is_empty(), "{name} N={n}");
            for x in 0..dga.quiver.arrows.len() {
                assert_eq!(reduced.degree(x), collapsed.degree(x));
                let (a, b) = (&reduced.differential[x], &collapsed.differential[x]);
                assert_eq!(a.keys().collect::<Vec<_>>(), b.keys().collect::<Vec<_>>(), "{name} N={n}");
                for (w, c) in a {
                    // the signs follow the collapsed parity, which agrees with
                    // the first-degree parity when N is even
                    if n % 2 == 0 {
                        assert_eq!(c, &b[w], "{name} N={n}");
                    } else {
                        assert_eq!(c.abs(), b[w].abs(), "{name} N={n}");
                    }
                }
            }
        }
    }
}
