//! Corpus checks with known answers, one runner per acceptance criterion.
//!
//! Every runner is deterministic for a given [`SuiteConfig`]. Reports carry
//! no timings so their JSON is reproducible byte for byte.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::corpus;
use crate::cuts::{self, CutGraph, MatchingOutcome};
use crate::flatgeo::{strip_decomposition, PlainDifferential, TraceOptions};
use crate::hurwitz::{self, make_qdiff, Flavor, HurwitzCover, Pole, PoleLoc};
use crate::periods::{self, shift_vector, specialize_charge, Laurent, SheetPath};
use crate::poly::Poly;
use crate::qstab::{self, HomEntry, Mode, StabilityDatum};
use crate::quiver::{dga_from_arcs, n_reduce, ArrowKind};
use crate::surface::hat_rank;
use crate::winding::{winding_number, wind_at_pole, wind_at_zero, wind_exp_type, Coefficient, LoopSpec};
use crate::C64;

pub const SUITES: [&str; 9] = [
    "winding",
    "degrees",
    "reduction",
    "ranks",
    "equivariance",
    "foliation",
    "matching",
    "induce",
    "roundtrip",
];

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    pub threads: usize,
    pub trace: TraceOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 20240611,
            threads: 1,
            trace: TraceOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub case: String,
    pub value: f64,
    pub expected: f64,
    pub residual: f64,
    pub pass: bool,
}

impl Row {
    fn close(case: String, value: f64, expected: f64, tol: f64) -> Row {
        let residual = (value - expected).abs();
        Row {
            case,
            value,
            expected,
            residual,
            pass: residual <= tol,
        }
    }

    fn exact(case: String, value: i64, expected: i64) -> Row {
        Row {
            case,
            value: value as f64,
            expected: expected as f64,
            residual: (value - expected).abs() as f64,
            pass: value == expected,
        }
    }

    fn flag(case: String, ok: bool) -> Row {
        Row {
            case,
            value: ok as i64 as f64,
            expected: 1.0,
            residual: if ok { 0.0 } else { 1.0 },
            pass: ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub summary: String,
    pub rows: Vec<Row>,
}

impl Report {
    fn new(id: usize, rows: Vec<Row>, summary: String) -> Report {
        Report {
            id,
            name: SUITES[id - 1],
            pass: !rows.is_empty() && rows.iter().all(|r| r.pass),
            summary,
            rows,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// Order-preserving parallel map over at most `threads` workers.
pub fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.max(1).min(items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items.chunks(chunk).map(|part| scope.spawn(|| part.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

pub fn run(name: &str, cfg: &SuiteConfig) -> Option<Report> {
    Some(match name {
        "winding" => winding(cfg),
        "degrees" => degrees(cfg),
        "reduction" => reduction(cfg),
        "ranks" => ranks(cfg),
        "equivariance" => equivariance(cfg),
        "foliation" => foliation(cfg),
        "matching" => matching(cfg),
        "induce" => induce(cfg),
        "roundtrip" => roundtrip(cfg),
        _ => return None,
    })
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Closed-form winding numbers over `k in 1..=4`, `l in -3..=6` and a grid
/// of `Re(s)` in `(2, 10]`.
pub fn winding(_cfg: &SuiteConfig) -> Report {
    let s_grid = [c(2.25, 0.0), c(3.0, 0.4), c(3.7, 0.0), c(5.0, -0.6), c(7.25, 0.0), c(10.0, 0.3)];
    let circle = LoopSpec::circle(c(0.0, 0.0), 1.0);
    let tol = 1e-6;
    let mut rows = Vec::new();
    // a singularity far outside the loop must not matter
    let far = (c(3.0, 1.0), c(1.3, 0.2));
    for &s in &s_grid {
        let f = Coefficient::power_product(vec![(c(0.1, -0.2), s - 2.0), far]);
        let w = winding_number(&f, &circle).unwrap_or(f64::NAN);
        rows.push(Row::close(format!("zero s={s}"), w, wind_at_zero(s), tol));
        for k in 1..=4u32 {
            for l in -3..=6i64 {
                let e = -(s - 2.0) * k as f64 - l as f64;
                let f = Coefficient::power_product(vec![(c(-0.1, 0.05), e), far]);
                let w = winding_number(&f, &circle).unwrap_or(f64::NAN);
                rows.push(Row::close(format!("pole k={k} l={l} s={s}"), w, wind_at_pole(k, l, s), tol));

                // k zeros on a small circle around the pole
                let mut factors: Vec<(C64, C64)> = (0..k)
                    .map(|j| (C64::from_polar(0.4, 0.3 + 2.0 * PI * j as f64 / k as f64), s - 2.0))
                    .collect();
                factors.push((c(0.0, 0.0), e));
                factors.push(far);
                let w = winding_number(&Coefficient::power_product(factors), &circle).unwrap_or(f64::NAN);
                rows.push(Row::close(format!("mixed k={k} l={l} s={s}"), w, 2.0 - l as f64, tol));
            }
        }
    }
    for k in 1..=4i32 {
        for l in -3..=6i64 {
            // e^{z^{-k}} z^{-l}
            let f = Coefficient::from_log_derivative(move |z: C64| -(k as f64) / z.powi(k + 1) - l as f64 / z);
            let lp = LoopSpec::Circle {
                center: c(0.0, 0.0),
                radius: 0.7,
                samples: 16384,
            };
            let w = winding_number(&f, &lp).unwrap_or(f64::NAN);
            rows.push(Row::close(format!("exp-type k={k} l={l}"), w, wind_exp_type(l), tol));
        }
    }
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Report::new(1, rows.clone(), format!("{} loops, worst residual {worst:.2e}", rows.len()))
}

/// Bidegrees of potential terms and dual pairs, and `d^2 = 0` at truncation 6.
pub fn degrees(_cfg: &SuiteConfig) -> Report {
    let mut rows = Vec::new();
    for (name, sys) in corpus::arc_systems() {
        let dga = match dga_from_arcs(&sys, 6) {
            Ok(d) => d,
            Err(e) => {
                rows.push(Row::flag(format!("{name}: build failed: {e}"), false));
                continue;
            }
        };
        let q = &dga.quiver;
        let bad_terms = dga
            .potential
            .terms
            .keys()
            .filter(|w| w.iter().fold((0, 0), |a, &x| (a.0 + q.arrows[x].bidegree.0, a.1 + q.arrows[x].bidegree.1)) != (3, -1))
            .count();
        rows.push(Row::exact(format!("{name}: potential terms off (3,-1)"), bad_terms as i64, 0));
        let bad_pairs = q
            .originals()
            .filter(|&a| {
                let d = q.pairing[a].expect("dual");
                let (x, y) = (q.arrows[a].bidegree, q.arrows[d].bidegree);
                (x.0 + y.0, x.1 + y.1) != (2, -1)
            })
            .count();
        rows.push(Row::exact(format!("{name}: dual pairs off (2,-1)"), bad_pairs as i64, 0));
        let residues = dga.verify_d_squared().map(|r| r.len() as i64).unwrap_or(-1);
        rows.push(Row::exact(format!("{name}: d^2 residues"), residues, 0));
    }
    Report::new(2, rows, "A2 fan, A3 fan, QR system".into())
}

/// Collapsed degrees at `N = 3` against the classical CY-3 Ginzburg degrees.
pub fn reduction(_cfg: &SuiteConfig) -> Report {
    let mut rows = Vec::new();
    for (name, sys) in corpus::arc_systems() {
        let Ok(dga) = dga_from_arcs(&sys, 6) else {
            rows.push(Row::flag(format!("{name}: build failed"), false));
            continue;
        };
        let red = match n_reduce(&dga, 3) {
            Ok(r) => r,
            Err(e) => {
                rows.push(Row::flag(format!("{name}: reduction failed: {e}"), false));
                continue;
            }
        };
        let q = &red.quiver;
        let mut mismatches = 0;
        for (x, arrow) in q.arrows.iter().enumerate() {
            let classical = match arrow.kind {
                ArrowKind::Original => arrow.bidegree.0,
                ArrowKind::Dual => {
                    let a = q.pairing[x].expect("paired");
                    -1 - q.arrows[a].bidegree.0
                }
                ArrowKind::Loop => -2,
            };
            if red.degree(x) != classical {
                mismatches += 1;
            }
        }
        rows.push(Row::exact(format!("{name}: N=3 degree mismatches"), mismatches, 0));
    }
    Report::new(3, rows, "collapsed (a, b) -> a + 3b".into())
}

/// A random cover with simple zeros: a pole at infinity plus up to two
/// finite poles.
pub fn random_cover<R: Rng>(rng: &mut R) -> HurwitzCover {
    loop {
        let finite = rng.gen_range(0..=2usize);
        let mut poles = vec![Pole {
            at: PoleLoc::INF,
            k: rng.gen_range(1..=4),
        }];
        let mut den = Poly::constant(c(1.0, 0.0));
        for _ in 0..finite {
            let at = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let k = rng.gen_range(1..=2u32);
            for _ in 0..k {
                den = den.mul(&Poly::new(vec![-at, c(1.0, 0.0)]));
            }
            poles.push(Pole { at: PoleLoc::Finite(at), k });
        }
        let aleph: u32 = poles.iter().map(|p| p.k).sum();
        let roots: Vec<C64> = (0..aleph).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        if let Ok(cover) = HurwitzCover::new(Poly::from_roots(&roots), den, poles) {
            let clear = cover.zeros.iter().all(|z| cover.poles.iter().all(|p| p.at.finite().is_none_or(|a| (z - a).norm() > 0.05)));
            if cover.regular && clear {
                return cover;
            }
        }
    }
}

/// Zero counts by the argument principle on random covers, and rank
/// agreement on the type-A corpus.
pub fn ranks(cfg: &SuiteConfig) -> Report {
    let mut rng = corpus::rng(cfg.seed);
    let covers: Vec<HurwitzCover> = (0..120).map(|_| random_cover(&mut rng)).collect();
    let counted = par_map(&covers, cfg.threads, |cover| {
        let n = cover.poles.len();
        // l = 1 at finite poles keeps every pole of higher order
        let mut l = vec![1i64; n];
        l[0] = 4 - (n as i64 - 1);
        let q = make_qdiff(cover.clone(), l, c(3.5, 0.25), Flavor::CyS).ok()?;
        hurwitz::zero_count_check(&q).ok()
    });
    let mut rows = Vec::new();
    for (i, (cover, r)) in covers.iter().zip(&counted).enumerate() {
        let aleph: i64 = cover.k_vector().iter().map(|&k| k as i64).sum();
        let got = r.as_ref().map_or(-1, |r| if r.simple_roots as i64 == r.argument_principle { r.argument_principle } else { -1 });
        rows.push(Row::exact(format!("cover {i} k={:?}", cover.k_vector()), got, aleph));
    }
    for n in 2..=4usize {
        let q = corpus::type_a_qdiff(n, c(3.0, 0.0), Flavor::Plain);
        let k = q.cover.k_vector();
        let dim = hurwitz::hurwitz_dimension(0, &k);
        rows.push(Row::exact(format!("type-a-{n}: hat rank vs dimension"), hat_rank(0, &k) as i64, dim));
        let strips = PlainDifferential::from_qdiff(&q)
            .ok()
            .and_then(|pd| strip_decomposition(&pd, 0.0, cfg.trace).ok())
            .filter(|d| d.saddle_free)
            .map_or(-1, |d| d.strips.len() as i64);
        rows.push(Row::exact(format!("type-a-{n}: strips vs dimension"), strips, dim));
    }
    Report::new(4, rows, "120 random covers, type A n = 2..4".into())
}

/// Relative equivariance residuals on corpus sheet paths and q-linearity of
/// charge specialization.
pub fn equivariance(cfg: &SuiteConfig) -> Report {
    let tol = 1e-8;
    let cases: Vec<(String, SheetPath, hurwitz::QDifferential)> = corpus::period_corpus()
        .into_iter()
        .flat_map(|(name, q)| {
            corpus::sheet_paths(&q)
                .into_iter()
                .enumerate()
                .map(move |(i, p)| (format!("{name} path {i}"), p, q.clone()))
                .collect::<Vec<_>>()
        })
        .collect();
    let rows_nested = par_map(&cases, cfg.threads, |(name, path, q)| {
        [1i64, -1, 2]
            .iter()
            .map(|&m| {
                let r = periods::equivariance_residual(q, path, m).unwrap_or(f64::NAN);
                Row::close(format!("{name} m={m}"), r, 0.0, tol)
            })
            .collect::<Vec<_>>()
    });
    let mut rows: Vec<Row> = rows_nested.into_iter().flatten().collect();

    let mut rng = corpus::rng(cfg.seed ^ 0x5eed);
    for t in 0..40 {
        let rank = rng.gen_range(1..=4usize);
        let base: Vec<C64> = (0..rank).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        let v: Vec<Laurent> = (0..rank)
            .map(|_| {
                let mut l = Laurent::default();
                for _ in 0..3 {
                    l.add_term(rng.gen_range(-3..=3), rng.gen_range(-4..=4));
                }
                l
            })
            .collect();
        let s = c(rng.gen_range(2.1..8.0), rng.gen_range(-0.5..0.5));
        let z = specialize_charge(&v, &base, s);
        let zq = specialize_charge(&shift_vector(&v, 1), &base, s);
        let scale = z.norm().max(1.0);
        rows.push(Row::close(format!("specialize q-linearity {t}"), (zq - periods::q_power(s, 1) * z).norm() / scale, 0.0, 1e-12));
        let sum: Vec<Laurent> = v.iter().map(|x| x.add(x)).collect();
        let z2 = specialize_charge(&sum, &base, s);
        rows.push(Row::close(format!("specialize additivity {t}"), (z2 - 2.0 * z).norm() / scale, 0.0, 1e-12));
    }
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Report::new(5, rows, format!("{} sheet paths, worst residual {worst:.2e}", cases.len()))
}

fn a2_generic<R: Rng>(rng: &mut R) -> (C64, C64) {
    (c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)), c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
}

fn a2_profile(a: C64, b: C64) -> Option<PlainDifferential> {
    let roots = Poly::new(vec![b, a, c(0.0, 0.0), c(1.0, 0.0)]).roots();
    PlainDifferential::new(c(1.0, 0.0), roots.into_iter().map(|r| (r, 1)).collect()).ok()
}

/// Strips and half-planes of generic cubic profiles, stable when the trace
/// tolerances are halved.
pub fn foliation(cfg: &SuiteConfig) -> Report {
    let mut rng = corpus::rng(cfg.seed ^ 0xf011);
    let mut params = vec![(c(-1.3, 0.4), c(0.6, -0.2))];
    while params.len() < 6 {
        params.push(a2_generic(&mut rng));
    }
    let fine = TraceOptions {
        tol: cfg.trace.tol / 2.0,
        capture: cfg.trace.capture / 2.0,
        ..cfg.trace
    };
    let mut rows = Vec::new();
    let mut used = 0;
    for (a, b) in params {
        let Some(pd) = a2_profile(a, b) else { continue };
        // a generic phase: skip walls by nudging
        let mut theta = 0.0;
        let mut dec = strip_decomposition(&pd, theta, cfg.trace);
        for j in 1..8 {
            if matches!(&dec, Ok(d) if d.saddle_free) {
                break;
            }
            theta = 0.013 * j as f64;
            dec = strip_decomposition(&pd, theta, cfg.trace);
        }
        let case = format!("a={a} b={b} theta={theta}");
        let Ok(dec) = dec else {
            rows.push(Row::flag(format!("{case}: decomposition failed"), false));
            continue;
        };
        used += 1;
        rows.push(Row::flag(format!("{case}: saddle free"), dec.saddle_free));
        rows.push(Row::exact(format!("{case}: strips"), dec.strips.len() as i64, 2));
        rows.push(Row::exact(format!("{case}: half-planes"), dec.half_planes.len() as i64, 5));
        let again = strip_decomposition(&pd, theta, fine);
        let stable = matches!(&again, Ok(d) if d.signature() == dec.signature() && d.strips.len() == dec.strips.len() && d.half_planes.len() == dec.half_planes.len());
        rows.push(Row::flag(format!("{case}: stable under halved tolerance"), stable));
    }
    Report::new(6, rows, format!("{used} cubic profiles"))
}

/// The peeling induction against max flow on random graphs obeying the
/// valence conditions, and against brute force on the small ones.
pub fn matching(cfg: &SuiteConfig) -> Report {
    let mut rng = corpus::rng(cfg.seed ^ 0xc075);
    let graphs: Vec<CutGraph> = (0..600).map(|_| cuts::random_graph(&mut rng, 9, 4)).collect();
    let results = par_map(&graphs, cfg.threads, |g| {
        let induction = cuts::induction_matching(g);
        let flow = cuts::flow_matching(g);
        let full = cuts::find_matching(g).expect("valid graph");
        let small = g.whites + g.blacks() <= 12;
        let brute = small.then(|| cuts::exhaustive_matching(g).is_some());
        (induction, flow, full, brute)
    });
    let (mut ok_induction, mut agree_flow, mut small, mut agree_brute, mut valid_output) = (0, 0, 0, 0, 0);
    let mut first_failure = None;
    for (i, (g, (induction, flow, full, brute))) in graphs.iter().zip(&results).enumerate() {
        if induction.is_some() {
            ok_induction += 1;
        } else if first_failure.is_none() {
            first_failure = Some(i);
        }
        if induction.is_some() == flow.is_matched() {
            agree_flow += 1;
        }
        if let Some(b) = brute {
            small += 1;
            if *b == full.is_matched() {
                agree_brute += 1;
            }
        }
        match full {
            MatchingOutcome::Matched { edges, .. } if g.is_matching(edges) => valid_output += 1,
            MatchingOutcome::Infeasible { .. } => valid_output += 1,
            _ => {}
        }
    }
    let n = graphs.len() as i64;
    let rows = vec![
        Row::exact("induction succeeds".into(), ok_induction, n),
        Row::exact("induction agrees with max flow".into(), agree_flow, n),
        Row::exact("outputs satisfy the degree constraints".into(), valid_output, n),
        Row::exact("agrees with brute force (<= 12 vertices)".into(), agree_brute, small),
    ];
    let summary = match first_failure {
        Some(i) => format!("{n} graphs; first induction failure: {}", serde_json::to_string(&graphs[i]).unwrap_or_default()),
        None => format!("{n} graphs"),
    };
    Report::new(7, rows, summary)
}

/// A two-object datum with `gldim` exactly `g`; phases are dyadic so the
/// gate comparisons are exact.
pub fn datum_with_gldim(g: f64) -> StabilityDatum {
    let shift = g.floor();
    let (pa, pb) = (0.25, 0.25 + (g - shift));
    StabilityDatum {
        objects: vec!["A".into(), "B".into()],
        charges: vec![C64::from_polar(1.0, PI * pa), C64::from_polar(1.5, PI * pb)],
        phases: vec![pa, pb],
        hom_degrees: vec![HomEntry {
            source: 0,
            target: 1,
            shift: shift as i64,
            x: 0,
        }],
    }
}

/// Accept/reject decisions across a grid and the translate structure of the
/// induced phases.
pub fn induce(_cfg: &SuiteConfig) -> Report {
    let gs = [-0.5, 0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 2.75];
    let ss = [1.0, 1.5, 2.0, 2.25, 2.5, 3.0, 3.5, 3.75, 4.0];
    let mut rows = Vec::new();
    for &g in &gs {
        let d = datum_with_gldim(g);
        rows.push(Row::close(format!("gldim {g}"), d.gldim(), g, 0.0));
        for &sr in &ss {
            let s = c(sr, 0.3);
            for mode in [Mode::Open, Mode::Closed] {
                let want = match mode {
                    Mode::Open => g + 1.0 < sr,
                    Mode::Closed => g + 1.0 <= sr,
                };
                let res = qstab::induce(&d, s, mode, (-2, 2));
                rows.push(Row::flag(format!("gldim {g} Re s {sr} {mode:?}"), res.is_ok() == want));
                if let Ok(q) = res {
                    let mut got: Vec<f64> = q.induced_phases.iter().map(|p| p.phase).collect();
                    let mut explicit: Vec<f64> = (-2..=2).flat_map(|k| d.phases.iter().map(move |p| p + k as f64 * sr)).collect();
                    got.sort_by(f64::total_cmp);
                    explicit.sort_by(f64::total_cmp);
                    rows.push(Row::flag(format!("gldim {g} Re s {sr} {mode:?} translates"), got == explicit && q.support_holds));
                }
            }
        }
    }
    Report::new(8, rows, format!("{} gldim values x {} values of Re s", gs.len(), ss.len()))
}

/// Centered monic polynomial of degree `n + 1` with random coefficients.
pub fn random_type_a<R: Rng>(rng: &mut R, n: usize) -> HurwitzCover {
    loop {
        let mut coef: Vec<C64> = (0..=n + 1).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        coef[n] = c(0.0, 0.0);
        coef[n + 1] = c(1.0, 0.0);
        if let Ok(cover) = HurwitzCover::polynomial(coef) {
            if cover.regular {
                return cover;
            }
        }
    }
}

/// `recover_cover` after `make_qdiff` returns the cover up to the cyclic
/// action.
pub fn roundtrip(cfg: &SuiteConfig) -> Report {
    let mut rng = corpus::rng(cfg.seed ^ 0x7a1e);
    let cases: Vec<(HurwitzCover, C64)> = (0..60)
        .map(|i| {
            let n = 2 + i % 3;
            let cover = random_type_a(&mut rng, n);
            let s = c(rng.gen_range(2.5..6.0), rng.gen_range(-0.5..0.5));
            (cover, s)
        })
        .collect();
    let errs = par_map(&cases, cfg.threads, |(cover, s)| {
        let q = make_qdiff(cover.clone(), vec![4], *s, Flavor::CyS).ok()?;
        let rec = hurwitz::recover_cover(|z| q.coefficient(z), &cover.poles, &[4], *s, None).ok()?;
        let n1 = cover.num.degree() as i64;
        (0..n1)
            .filter_map(|m| {
                let moved = hurwitz::cyclic_action(cover, m).ok()?;
                let e = moved
                    .num
                    .coef
                    .iter()
                    .zip(&rec.cover.num.coef)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                (rec.cover.num.coef.len() == moved.num.coef.len()).then_some(e)
            })
            .min_by(f64::total_cmp)
    });
    let rows: Vec<Row> = cases
        .iter()
        .zip(errs)
        .enumerate()
        .map(|(i, ((cover, s), e))| Row::close(format!("cover {i} degree {} s={s}", cover.num.degree()), e.unwrap_or(f64::NAN), 0.0, 1e-8))
        .collect();
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Report::new(9, rows, format!("60 random type-A covers, worst coefficient error {worst:.2e}"))
}
