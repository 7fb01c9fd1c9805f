//! Built-in examples shared by tests, the acceptance suite and the CLI.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::flatgeo::PlainDifferential;
use crate::hurwitz::{make_qdiff, Flavor, HurwitzCover, Pole, PoleLoc, QDifferential};
use crate::periods::SheetPath;
use crate::poly::Poly;
use crate::surface::{ArcSystem, RibbonGraph};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Disk with three marked points and two arcs from the first.
pub fn a2_fan() -> ArcSystem {
    RibbonGraph::disk(3, &[(0, 1), (0, 2)])
        .arc_system(0, |_, _| 0)
        .expect("valid fan")
}

pub fn a3_fan() -> ArcSystem {
    RibbonGraph::disk(4, &[(0, 1), (0, 2), (0, 3)])
        .arc_system(0, |_, _| 0)
        .expect("valid fan")
}

/// Seven marked points with the arc tree 5-4, 5-3, 5-2, 5-1, 1-0, 0-6.
pub fn qr_system() -> ArcSystem {
    RibbonGraph::disk(7, &[(5, 4), (5, 3), (5, 2), (5, 1), (1, 0), (0, 6)])
        .arc_system(0, |y, k| if y == 5 { k as i64 % 2 } else { 0 })
        .expect("valid tree")
}

/// Annulus with `p` outer and `q` inner marked points; all corner degrees
/// equal `d`.
pub fn annulus(p: usize, q: usize, d: i64) -> ArcSystem {
    let mut steps = vec![true; p];
    steps.extend(std::iter::repeat_n(false, q));
    RibbonGraph::annulus(p, q, &steps)
        .arc_system(0, |_, _| d)
        .expect("valid annulus")
}

pub fn arc_systems() -> Vec<(&'static str, ArcSystem)> {
    vec![("a2-fan", a2_fan()), ("a3-fan", a3_fan()), ("qr", qr_system())]
}

/// Centered roots used for the type-A covers, chosen so that phase 0 is
/// saddle free.
fn type_a_roots(n: usize) -> Vec<C64> {
    match n {
        2 => vec![c(1.2, 0.3), c(-0.5, 0.9), c(-0.7, -1.2)],
        3 => vec![c(1.1, 0.2), c(-0.3, 1.0), c(-1.2, -0.1), c(0.4, -1.1)],
        4 => vec![c(1.3, 0.1), c(0.3, 1.2), c(-1.0, 0.6), c(-0.9, -0.8), c(0.3, -1.1)],
        _ => {
            // points on a perturbed circle, re-centered
            let m = n + 1;
            let mut r: Vec<C64> = (0..m)
                .map(|k| C64::from_polar(1.0 + 0.13 * (k % 3) as f64, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / m as f64))
                .collect();
            let mean = r.iter().sum::<C64>() / m as f64;
            for z in &mut r {
                *z -= mean;
            }
            r
        }
    }
}

/// Monic centered polynomial of degree `n + 1` with simple roots.
pub fn type_a_cover(n: usize) -> HurwitzCover {
    let mut p = Poly::from_roots(&type_a_roots(n));
    // the roots are centered up to rounding
    let top = p.coef.len() - 2;
    p.coef[top] = c(0.0, 0.0);
    HurwitzCover::polynomial(p.coef).expect("type-A cover")
}

/// `(z^3 - 3z) dz^2` at `s = 3`: simple zeros at `0, ±√3`, pole of order 7.
pub fn a2_symmetric() -> QDifferential {
    let f = HurwitzCover::polynomial(vec![c(0.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).expect("cover");
    make_qdiff(f, vec![4], c(3.0, 0.0), Flavor::Plain).expect("differential")
}

pub fn type_a_qdiff(n: usize, s: C64, flavor: Flavor) -> QDifferential {
    make_qdiff(type_a_cover(n), vec![4], s, flavor).expect("type-A differential")
}

/// Cover with poles of order `p` at 0 and `q` at infinity.
pub fn annulus_cover(p: usize, q: usize) -> HurwitzCover {
    let m = p + q;
    let roots: Vec<C64> = (0..m)
        .map(|k| C64::from_polar(0.8 + 0.35 * (k % 2) as f64, 0.3 + 2.0 * std::f64::consts::PI * k as f64 / m as f64))
        .collect();
    let num = Poly::from_roots(&roots);
    let mut den = vec![c(0.0, 0.0); p + 1];
    den[p] = c(1.0, 0.0);
    HurwitzCover::new(
        num,
        Poly::new(den),
        vec![
            Pole {
                at: PoleLoc::Finite(c(0.0, 0.0)),
                k: p as u32,
            },
            Pole { at: PoleLoc::INF, k: q as u32 },
        ],
    )
    .expect("annulus cover")
}

/// The annulus cover at `s = 3` with `l = (2, 2)`.
pub fn annulus_qdiff(p: usize, q: usize) -> QDifferential {
    make_qdiff(annulus_cover(p, q), vec![2, 2], c(3.0, 0.0), Flavor::Plain).expect("annulus differential")
}

/// Plain differentials with a saddle-free reference phase.
pub fn foliation_corpus() -> Vec<(String, PlainDifferential, f64)> {
    let mut out = Vec::new();
    for n in 2..=4 {
        let q = type_a_qdiff(n, c(3.0, 0.0), Flavor::Plain);
        out.push((format!("type-a-{n}"), PlainDifferential::from_qdiff(&q).expect("plain"), 0.0));
    }
    for (p, q) in [(1, 1), (1, 2), (2, 1)] {
        let qd = annulus_qdiff(p, q);
        out.push((format!("annulus-{p}-{q}"), PlainDifferential::from_qdiff(&qd).expect("plain"), 0.0));
    }
    out
}

/// Reproducible generator for every randomized suite.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Differentials whose periods are checked for equivariance.
pub fn period_corpus() -> Vec<(String, QDifferential)> {
    let mut out = Vec::new();
    for n in 2..=4 {
        for s in [c(3.4, 0.6), c(5.0, 0.0), c(2.7, -0.3)] {
            out.push((format!("type-a-{n} s={s}"), type_a_qdiff(n, s, Flavor::CyS)));
        }
    }
    for (p, q) in [(1, 1), (1, 2)] {
        let qd = make_qdiff(annulus_cover(p, q), vec![2, 2], c(3.6, 0.4), Flavor::CyS).expect("annulus differential");
        out.push((format!("annulus-{p}-{q}"), qd));
    }
    out
}

/// Paths between angularly consecutive zeros, bent away from finite poles,
/// and one segment from a zero out to a regular point.
pub fn sheet_paths(q: &QDifferential) -> Vec<SheetPath> {
    let mut zeros = q.zeros();
    zeros.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
    let poles: Vec<C64> = q.cover.poles.iter().filter_map(|p| p.at.finite()).collect();
    let mut out: Vec<SheetPath> = zeros
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let d = b - a;
            let near = poles.iter().any(|&p| {
                let t = ((p - a) / d).re.clamp(0.0, 1.0);
                (a + d * t - p).norm() < 0.2 * d.norm()
            });
            if near {
                SheetPath::between_zeros(vec![a, (a + b) / 2.0 + d * c(0.0, 0.5), b])
            } else {
                SheetPath::between_zeros(vec![a, b])
            }
        })
        .collect();
    if let Some(&z) = zeros.first() {
        let mut p = SheetPath::segment(z, z * 1.6 + c(0.0, 0.2));
        p.start_at_zero = true;
        out.push(p);
    }
    out
}
