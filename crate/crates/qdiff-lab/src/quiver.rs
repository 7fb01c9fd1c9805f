//! Graded quivers with superpotential and their Ginzburg algebras.
//!
//! Arrows carry a bidegree `(a, b)`; the second entry counts powers of the
//! formal parameter. Paths are words of arrow indices composed left to right.
//!
//! Sign conventions: the cyclic derivative of a word `w` at an occurrence of
//! `y` is the rotated remainder `w[p+1..] w[..p]`, multiplied by
//! `(-1)^{|first letter|}`; the loop at `v` maps to
//! `sum (-1)^{|a|} a a* + sum (-1)^{|a*|} a* a` over the original arrows at
//! `v`. Degrees are first degrees (or collapsed degrees after reduction).
//! This is the convention under which `d^2 = 0` holds, both before and after
//! collapsing for every `N`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::surface::ArcSystem;

#[derive(Debug, Error, PartialEq)]
pub enum QuiverError {
    #[error("quiver is already extended")]
    AlreadyExtended,
    #[error("quiver must be extended first")]
    NotExtended,
    #[error("superpotential term {term:?} has bidegree {got:?}, expected (3, -1)")]
    Inhomogeneous { term: Vec<usize>, got: (i64, i64) },
    #[error("d({arrow}) contains {word:?} of degree {got}, expected {expected}")]
    DegreeShift {
        arrow: String,
        word: Vec<String>,
        got: i64,
        expected: i64,
    },
    #[error("truncation length {have} is below the required {need}")]
    Truncation { have: usize, need: usize },
    #[error("N must be at least 2, got {0}")]
    BadN(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrowKind {
    Original,
    Dual,
    Loop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub bidegree: (i64, i64),
    pub kind: ArrowKind,
    /// `(polygon, i, j)` for an original arrow `a_ij` (0-based `i < j`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<(usize, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradedQuiver {
    pub n_vertices: usize,
    pub arrows: Vec<Arrow>,
    /// `pairing[a]` is the dual of an original arrow and vice versa.
    pub pairing: Vec<Option<usize>>,
    /// Composable pairs of primitive arrows from different polygons.
    pub relations: Vec<(usize, usize)>,
    pub extended: bool,
}

impl GradedQuiver {
    pub fn originals(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(|&i| self.arrows[i].kind == ArrowKind::Original)
    }

    /// Primitive arrows `a_{i,i+1}`.
    pub fn primitive(&self) -> Vec<usize> {
        self.originals()
            .filter(|&i| matches!(self.arrows[i].origin, Some((_, a, b)) if b == a + 1))
            .collect()
    }

    fn find_original(&self, polygon: usize, i: usize, j: usize) -> Option<usize> {
        self.arrows.iter().position(|a| a.origin == Some((polygon, i, j)))
    }
}

fn d_between(degrees: &[i64], i: usize, j: usize) -> i64 {
    degrees[i..j].iter().sum()
}

/// Originals `a_ij : gamma_i -> gamma_j` for `i < j` in every polygon.
pub fn build_quiver(sys: &ArcSystem) -> GradedQuiver {
    let mut arrows = Vec::new();
    let mut per_polygon: Vec<Vec<(usize, usize, usize)>> = Vec::new();
    for (p, poly) in sys.polygons.iter().enumerate() {
        let verts = poly.arc_sides();
        let m = verts.len();
        let mut mine = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let deg = 1 - d_between(&poly.degrees, i, j);
                mine.push((i, j, arrows.len()));
                arrows.push(Arrow {
                    name: format!("a{}_{}{}", p, i + 1, j + 1),
                    source: verts[i],
                    target: verts[j],
                    bidegree: (deg, 0),
                    kind: ArrowKind::Original,
                    origin: Some((p, i, j)),
                });
            }
        }
        per_polygon.push(mine);
    }
    let primitive: Vec<usize> = per_polygon
        .iter()
        .flat_map(|v| v.iter().filter(|(i, j, _)| *j == i + 1).map(|t| t.2))
        .collect();
    let mut relations = Vec::new();
    for &x in &primitive {
        for &y in &primitive {
            let (ax, ay) = (&arrows[x], &arrows[y]);
            let (px, py) = (ax.origin.unwrap().0, ay.origin.unwrap().0);
            if ax.target == ay.source && px != py {
                relations.push((x, y));
            }
        }
    }
    let n = arrows.len();
    GradedQuiver {
        n_vertices: sys.n_arcs(),
        arrows,
        pairing: vec![None; n],
        relations,
        extended: false,
    }
}

/// Adds a dual `a*` of bidegree `(2, -1) - DEG a` per original and one loop of
/// bidegree `(1, -1)` per vertex.
pub fn extend_quiver(q: &GradedQuiver) -> Result<GradedQuiver, QuiverError> {
    if q.extended {
        return Err(QuiverError::AlreadyExtended);
    }
    let mut out = q.clone();
    let originals: Vec<usize> = q.originals().collect();
    for a in originals {
        let src = &q.arrows[a];
        let idx = out.arrows.len();
        out.arrows.push(Arrow {
            name: format!("{}*", src.name),
            source: src.target,
            target: src.source,
            bidegree: (2 - src.bidegree.0, -1 - src.bidegree.1),
            kind: ArrowKind::Dual,
            origin: None,
        });
        out.pairing.push(Some(a));
        out.pairing[a] = Some(idx);
    }
    for v in 0..q.n_vertices {
        out.arrows.push(Arrow {
            name: format!("t{}", v + 1),
            source: v,
            target: v,
            bidegree: (1, -1),
            kind: ArrowKind::Loop,
            origin: None,
        });
        out.pairing.push(None);
    }
    out.extended = true;
    Ok(out)
}

/// Noncommutative polynomial: words of arrow indices with integer coefficients.
pub type PathSum = BTreeMap<Vec<usize>, i64>;

fn add_term(acc: &mut PathSum, w: Vec<usize>, c: i64) {
    if c == 0 {
        return;
    }
    let e = acc.entry(w.clone()).or_insert(0);
    *e += c;
    if *e == 0 {
        acc.remove(&w);
    }
}

fn sign(parity: i64) -> i64 {
    if parity.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Cyclic words up to rotation, stored at their lexicographically minimal
/// rotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Superpotential {
    pub terms: BTreeMap<Vec<usize>, i64>,
}

impl Superpotential {
    /// Koszul sign of moving the first `k` letters to the back.
    fn rotation_sign(word: &[usize], k: usize, deg: &dyn Fn(usize) -> i64) -> i64 {
        let front: i64 = word[..k].iter().map(|&x| deg(x)).sum();
        let back: i64 = word[k..].iter().map(|&x| deg(x)).sum();
        sign(front * back)
    }

    pub fn normal_form(word: &[usize], deg: &dyn Fn(usize) -> i64) -> (Vec<usize>, i64) {
        let mut best = word.to_vec();
        let mut best_k = 0;
        for k in 1..word.len() {
            let mut r = word[k..].to_vec();
            r.extend_from_slice(&word[..k]);
            if r < best {
                best = r;
                best_k = k;
            }
        }
        (best, Self::rotation_sign(word, best_k, deg))
    }

    pub fn add(&mut self, word: &[usize], coef: i64, deg: &dyn Fn(usize) -> i64) {
        let (w, s) = Self::normal_form(word, deg);
        add_term(&mut self.terms, w, s * coef);
    }
}

/// `W = sum_D sum_{i<j<k} a_ij a_jk a_ik*`.
pub fn superpotential(q: &GradedQuiver, sys: &ArcSystem) -> Result<Superpotential, QuiverError> {
    if !q.extended {
        return Err(QuiverError::NotExtended);
    }
    let first = |x: usize| q.arrows[x].bidegree.0;
    let mut w = Superpotential { terms: BTreeMap::new() };
    for (p, poly) in sys.polygons.iter().enumerate() {
        let m = poly.arc_sides().len();
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let aij = q.find_original(p, i, j).expect("quiver built from this system");
                    let ajk = q.find_original(p, j, k).expect("quiver built from this system");
                    let aik = q.find_original(p, i, k).expect("quiver built from this system");
                    let dual = q.pairing[aik].expect("extended quiver");
                    let word = [aij, ajk, dual];
                    let bd = word.iter().fold((0, 0), |acc, &x| {
                        (acc.0 + q.arrows[x].bidegree.0, acc.1 + q.arrows[x].bidegree.1)
                    });
                    if bd != (3, -1) {
                        return Err(QuiverError::Inhomogeneous {
                            term: word.to_vec(),
                            got: bd,
                        });
                    }
                    w.add(&word, 1, &first);
                }
            }
        }
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grading {
    Bigraded,
    Collapsed(i64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GinzburgDga {
    pub quiver: GradedQuiver,
    pub potential: Superpotential,
    /// Image of every arrow, indexed like `quiver.arrows`.
    pub differential: Vec<PathSum>,
    pub truncation_length: usize,
    pub grading: Grading,
}

impl GinzburgDga {
    pub fn degree(&self, x: usize) -> i64 {
        degree_in(&self.quiver, self.grading, x)
    }

    fn word_degree(&self, w: &[usize]) -> i64 {
        w.iter().map(|&x| self.degree(x)).sum()
    }

    fn bidegree_sum(&self, w: &[usize]) -> (i64, i64) {
        w.iter().fold((0, 0), |acc, &x| {
            let b = self.quiver.arrows[x].bidegree;
            (acc.0 + b.0, acc.1 + b.1)
        })
    }

    /// Leibniz extension of the differential, dropping words longer than the
    /// truncation length. Returns the image and the number of dropped terms.
    pub fn apply(&self, p: &PathSum) -> (PathSum, usize) {
        let mut out = PathSum::new();
        let mut dropped = 0;
        for (w, &c) in p {
            let mut prefix_deg = 0;
            for (pos, &x) in w.iter().enumerate() {
                for (img, &ci) in &self.differential[x] {
                    let mut nw = Vec::with_capacity(w.len() - 1 + img.len());
                    nw.extend_from_slice(&w[..pos]);
                    nw.extend_from_slice(img);
                    nw.extend_from_slice(&w[pos + 1..]);
                    if nw.len() > self.truncation_length {
                        dropped += 1;
                        continue;
                    }
                    add_term(&mut out, nw, c * ci * sign(prefix_deg));
                }
                prefix_deg += self.degree(x);
            }
        }
        (out, dropped)
    }

    pub fn longest_image(&self) -> usize {
        self.differential
            .iter()
            .flat_map(|p| p.keys().map(|w| w.len()))
            .max()
            .unwrap_or(0)
    }

    /// `d` raises the (first or collapsed) degree by one and keeps the second.
    pub fn check_degree_shift(&self) -> Result<(), QuiverError> {
        for (x, img) in self.differential.iter().enumerate() {
            for w in img.keys() {
                let bad = match self.grading {
                    Grading::Bigraded => {
                        let want = self.quiver.arrows[x].bidegree;
                        let got = self.bidegree_sum(w);
                        (got != (want.0 + 1, want.1)).then_some((got.0, want.0 + 1))
                    }
                    Grading::Collapsed(_) => {
                        let got = self.word_degree(w);
                        let want = self.degree(x) + 1;
                        (got != want).then_some((got, want))
                    }
                };
                if let Some((got, expected)) = bad {
                    return Err(QuiverError::DegreeShift {
                        arrow: self.quiver.arrows[x].name.clone(),
                        word: w.iter().map(|&y| self.quiver.arrows[y].name.clone()).collect(),
                        got,
                        expected,
                    });
                }
            }
        }
        Ok(())
    }

    /// `(generator, nonzero d^2 residue)` pairs.
    pub fn verify_d_squared(&self) -> Result<Vec<(usize, PathSum)>, QuiverError> {
        let need = 2 * self.longest_image();
        if self.truncation_length < need {
            return Err(QuiverError::Truncation {
                have: self.truncation_length,
                need,
            });
        }
        let mut residues = Vec::new();
        for x in 0..self.quiver.arrows.len() {
            let (dd, _) = self.apply(&self.differential[x]);
            if !dd.is_empty() {
                residues.push((x, dd));
            }
        }
        Ok(residues)
    }

    pub fn render(&self, p: &PathSum) -> Vec<(i64, Vec<String>)> {
        p.iter()
            .map(|(w, &c)| (c, w.iter().map(|&x| self.quiver.arrows[x].name.clone()).collect()))
            .collect()
    }
}

fn degree_in(q: &GradedQuiver, grading: Grading, x: usize) -> i64 {
    let (a, b) = q.arrows[x].bidegree;
    match grading {
        Grading::Bigraded => a,
        Grading::Collapsed(n) => a + b * n,
    }
}

fn cyclic_derivative(w: &Superpotential, y: usize, deg: &dyn Fn(usize) -> i64) -> PathSum {
    let mut out = PathSum::new();
    for (word, &c) in &w.terms {
        for (p, &x) in word.iter().enumerate() {
            if x != y {
                continue;
            }
            let mut rem = word[p + 1..].to_vec();
            rem.extend_from_slice(&word[..p]);
            let s = rem.first().map_or(1, |&f| sign(deg(f)));
            add_term(&mut out, rem, c * s);
        }
    }
    out
}

fn derive(q: &GradedQuiver, w: &Superpotential, grading: Grading) -> Vec<PathSum> {
    let deg = |x: usize| degree_in(q, grading, x);
    let mut d = vec![PathSum::new(); q.arrows.len()];
    for a in q.originals() {
        let dual = q.pairing[a].expect("extended quiver");
        d[a] = cyclic_derivative(w, dual, &deg);
        d[dual] = cyclic_derivative(w, a, &deg);
    }
    for (t, arrow) in q.arrows.iter().enumerate() {
        if arrow.kind != ArrowKind::Loop {
            continue;
        }
        let v = arrow.source;
        let mut img = PathSum::new();
        for a in q.originals() {
            let dual = q.pairing[a].unwrap();
            if q.arrows[a].source == v {
                add_term(&mut img, vec![a, dual], sign(deg(a)));
            }
            if q.arrows[a].target == v {
                add_term(&mut img, vec![dual, a], sign(deg(dual)));
            }
        }
        d[t] = img;
    }
    d
}

/// `d a = cyclic derivative of W at a*`, `d a* = ... at a`, and loops map to
/// the vertex components of `sum [a, a*]`.
pub fn ginzburg_differential(
    q: &GradedQuiver,
    w: &Superpotential,
    truncation_length: usize,
) -> Result<GinzburgDga, QuiverError> {
    if !q.extended {
        return Err(QuiverError::NotExtended);
    }
    let dga = GinzburgDga {
        quiver: q.clone(),
        potential: w.clone(),
        differential: derive(q, w, Grading::Bigraded),
        truncation_length,
        grading: Grading::Bigraded,
    };
    dga.check_degree_shift()?;
    Ok(dga)
}

/// Collapse `(a, b)` to `a + bN` and rederive the differential with the
/// collapsed parities.
pub fn n_reduce(dga: &GinzburgDga, n: i64) -> Result<GinzburgDga, QuiverError> {
    if n < 2 {
        return Err(QuiverError::BadN(n));
    }
    let grading = Grading::Collapsed(n);
    let out = GinzburgDga {
        quiver: dga.quiver.clone(),
        potential: dga.potential.clone(),
        differential: derive(&dga.quiver, &dga.potential, grading),
        truncation_length: dga.truncation_length,
        grading,
    };
    out.check_degree_shift()?;
    Ok(out)
}

/// Same differential as `dga`, read in the collapsed grading.
pub fn collapse_only(dga: &GinzburgDga, n: i64) -> GinzburgDga {
    GinzburgDga {
        grading: Grading::Collapsed(n),
        ..dga.clone()
    }
}

/// Everything from an arc system in one go.
pub fn dga_from_arcs(sys: &ArcSystem, truncation_length: usize) -> Result<GinzburgDga, QuiverError> {
    let q = extend_quiver(&build_quiver(sys))?;
    let w = superpotential(&q, sys)?;
    ginzburg_differential(&q, &w, truncation_length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::RibbonGraph;

    fn fan(m: usize, degree: i64) -> ArcSystem {
        let chords: Vec<(usize, usize)> = (1..=m).map(|j| (0, j)).collect();
        RibbonGraph::disk(m + 1, &chords).arc_system(0, |_, _| degree).unwrap()
    }

    #[test]
    fn a2_single_arrow() {
        for d in -2..=2 {
            let q = build_quiver(&fan(2, d));
            assert_eq!(q.arrows.len(), 1);
            assert_eq!(q.arrows[0].bidegree, (1 - d, 0));
        }
    }

    #[test]
    fn m3_degrees() {
        let q = build_quiver(&fan(3, 0));
        let degs: Vec<i64> = q.arrows.iter().map(|a| a.bidegree.0).collect();
        assert_eq!(degs, vec![1, 1, 1]);
    }

    #[test]
    fn extension_counts() {
        let q = build_quiver(&fan(2, 1));
        let e = extend_quiver(&q).unwrap();
        assert_eq!(e.arrows.len(), 1 + 1 + 2);
        assert_eq!(e.arrows[1].bidegree, (2, -1));
        assert!(e.arrows[2..].iter().all(|a| a.bidegree == (1, -1)));
        assert_eq!(extend_quiver(&e), Err(QuiverError::AlreadyExtended));
    }

    #[test]
    fn a2_differential() {
        let dga = dga_from_arcs(&fan(2, 1), 6).unwrap();
        assert!(dga.potential.terms.is_empty());
        assert!(dga.differential[0].is_empty() && dga.differential[1].is_empty());
        let loops: PathSum = dga.differential[2]
            .iter()
            .chain(dga.differential[3].iter())
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        // degree 0 arrow, dual of degree 2: [a, a*] = a a* + a* a
        assert_eq!(loops.get(&vec![0, 1]), Some(&1));
        assert_eq!(loops.get(&vec![1, 0]), Some(&1));
        assert!(dga.verify_d_squared().unwrap().is_empty());
    }

    #[test]
    fn m3_potential_and_signs() {
        let sys = fan(3, 0);
        let dga = dga_from_arcs(&sys, 6).unwrap();
        assert_eq!(dga.potential.terms.len(), 1);
        let q = &dga.quiver;
        let a12 = q.find_original(0, 0, 1).unwrap();
        let a23 = q.find_original(0, 1, 2).unwrap();
        let a13 = q.find_original(0, 0, 2).unwrap();
        let d12 = &dga.differential[q.pairing[a12].unwrap()];
        // cyclic derivative at a12 leaves a23 a13*, and |a23| = 1
        assert_eq!(d12.len(), 1);
        assert_eq!(d12.get(&vec![a23, q.pairing[a13].unwrap()]), Some(&-1));
        assert!(dga.verify_d_squared().unwrap().is_empty());
    }

    #[test]
    fn flipped_sign_is_detected() {
        let mut dga = dga_from_arcs(&fan(4, 1), 6).unwrap();
        let x = dga.differential.iter().position(|p| p.len() >= 2).unwrap();
        let key = dga.differential[x].keys().next().unwrap().clone();
        *dga.differential[x].get_mut(&key).unwrap() *= -1;
        assert!(!dga.verify_d_squared().unwrap().is_empty());
    }

    #[test]
    fn truncation_guard() {
        let dga = dga_from_arcs(&fan(3, 0), 3).unwrap();
        assert!(matches!(dga.verify_d_squared(), Err(QuiverError::Truncation { .. })));
    }

    #[test]
    fn n3_degrees() {
        let dga = dga_from_arcs(&fan(3, 1), 6).unwrap();
        let r = n_reduce(&dga, 3).unwrap();
        for (x, a) in r.quiver.arrows.iter().enumerate() {
            let want = match a.kind {
                ArrowKind::Original => a.bidegree.0,
                ArrowKind::Dual => a.bidegree.0 - 3,
                ArrowKind::Loop => -2,
            };
            assert_eq!(r.degree(x), want);
        }
    }

    #[test]
    fn n2_degrees() {
        let dga = dga_from_arcs(&fan(2, 1), 6).unwrap();
        let r = n_reduce(&dga, 2).unwrap();
        assert_eq!(r.degree(0), 0);
        assert_eq!(r.degree(1), 0);
        assert_eq!(r.degree(2), -1);
    }

    #[test]
    fn relations_cross_polygons() {
        // zigzag disk: arcs Y0Y1, Y1Y2, Y2Y3 give two 2-gons with one arrow each
        let sys = RibbonGraph::disk(4, &[(0, 1), (1, 2), (2, 3)]).arc_system(0, |_, _| 0).unwrap();
        let q = build_quiver(&sys);
        assert_eq!(q.primitive().len(), 2);
        for &(x, y) in &q.relations {
            assert_eq!(q.arrows[x].target, q.arrows[y].source);
            assert_ne!(q.arrows[x].origin.unwrap().0, q.arrows[y].origin.unwrap().0);
        }
    }
}
