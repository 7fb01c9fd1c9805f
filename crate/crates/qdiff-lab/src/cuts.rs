//! Bipartite b-matchings between zeros (white vertices) and boundary
//! components with demands (black vertices).
//!
//! `find_matching` first runs the peeling induction: assign the edge of a
//! valence-1 white, otherwise delete a surplus edge at an over-saturated
//! black. The valence conditions alone do not make the peeling succeed, so a
//! failed run falls back to max flow and the outcome records which method
//! produced the answer. A Hall violator is returned when no matching exists.

use std::collections::{BTreeSet, VecDeque};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CutError {
    #[error("edge ({0}, {1}) refers to a missing vertex")]
    BadEdge(usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("white vertex {0} has no edges")]
    IsolatedWhite(usize),
    #[error("black vertex {0} has valence {1} below its demand {2}")]
    Undersupplied(usize, usize, u32),
    #[error("number of lengths does not match the number of poles")]
    LengthMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutGraph {
    pub whites: usize,
    /// Demand `k_i` of each black vertex.
    pub demands: Vec<u32>,
    /// `(white, black)` pairs.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Induction,
    FlowFallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Certificate {
    /// Total demand differs from the number of whites.
    DemandMismatch { whites: usize, demand: u32 },
    /// These whites only see the listed blacks, whose demands add up to less.
    Hall { whites: Vec<usize>, blacks: Vec<usize>, capacity: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum MatchingOutcome {
    Matched {
        method: Method,
        /// Indices into `CutGraph::edges`, sorted.
        edges: Vec<usize>,
    },
    Infeasible { certificate: Certificate },
}

impl MatchingOutcome {
    pub fn is_matched(&self) -> bool {
        matches!(self, MatchingOutcome::Matched { .. })
    }

    pub fn edges(&self) -> Option<&[usize]> {
        match self {
            MatchingOutcome::Matched { edges, .. } => Some(edges),
            MatchingOutcome::Infeasible { .. } => None,
        }
    }
}

impl CutGraph {
    pub fn new(whites: usize, demands: Vec<u32>, edges: Vec<(usize, usize)>) -> Result<Self, CutError> {
        let g = CutGraph { whites, demands, edges };
        g.validate()?;
        Ok(g)
    }

    pub fn blacks(&self) -> usize {
        self.demands.len()
    }

    /// Checks indices, simplicity and the two valence conditions.
    pub fn validate(&self) -> Result<(), CutError> {
        let mut seen = BTreeSet::new();
        for &(w, b) in &self.edges {
            if w >= self.whites || b >= self.blacks() {
                return Err(CutError::BadEdge(w, b));
            }
            if !seen.insert((w, b)) {
                return Err(CutError::DuplicateEdge(w, b));
            }
        }
        let (wv, bv) = self.valences();
        if let Some(w) = wv.iter().position(|&v| v == 0) {
            return Err(CutError::IsolatedWhite(w));
        }
        for (b, (&v, &k)) in bv.iter().zip(&self.demands).enumerate() {
            if v < k as usize {
                return Err(CutError::Undersupplied(b, v, k));
            }
        }
        Ok(())
    }

    pub fn valences(&self) -> (Vec<usize>, Vec<usize>) {
        let mut wv = vec![0; self.whites];
        let mut bv = vec![0; self.blacks()];
        for &(w, b) in &self.edges {
            wv[w] += 1;
            bv[b] += 1;
        }
        (wv, bv)
    }

    pub fn total_demand(&self) -> u32 {
        self.demands.iter().sum()
    }

    /// Each white on exactly one chosen edge, each black on exactly `k_i`.
    pub fn is_matching(&self, chosen: &[usize]) -> bool {
        let mut wv = vec![0u32; self.whites];
        let mut bv = vec![0u32; self.blacks()];
        let mut seen = BTreeSet::new();
        for &e in chosen {
            if e >= self.edges.len() || !seen.insert(e) {
                return false;
            }
            let (w, b) = self.edges[e];
            wv[w] += 1;
            bv[b] += 1;
        }
        wv.iter().all(|&v| v == 1) && bv == self.demands
    }
}

/// `Re(s) >= max_i (k_i + 3 - l_i)`.
pub fn gate_condition(s: C64, k: &[u32], l: &[i64]) -> Result<bool, CutError> {
    if k.len() != l.len() {
        return Err(CutError::LengthMismatch);
    }
    Ok(k.iter().zip(l).all(|(&ki, &li)| s.re >= (ki as i64 + 3 - li) as f64))
}

/// The peeling induction alone; `None` when it gets stuck.
pub fn induction_matching(g: &CutGraph) -> Option<Vec<usize>> {
    if g.total_demand() as usize != g.whites {
        return None;
    }
    let mut alive = vec![true; g.edges.len()];
    let mut white_done = vec![false; g.whites];
    let mut demand = g.demands.clone();
    let mut chosen = Vec::new();
    loop {
        let mut wv = vec![0usize; g.whites];
        let mut bv = vec![0usize; g.blacks()];
        for (e, &(w, b)) in g.edges.iter().enumerate() {
            if alive[e] {
                wv[w] += 1;
                bv[b] += 1;
            }
        }
        let open: Vec<usize> = (0..g.whites).filter(|&w| !white_done[w]).collect();
        if open.is_empty() {
            break;
        }
        if open.iter().any(|&w| wv[w] == 0) {
            return None;
        }
        if let Some(&w) = open.iter().find(|&&w| wv[w] == 1) {
            let e = (0..g.edges.len()).find(|&e| alive[e] && g.edges[e].0 == w)?;
            let b = g.edges[e].1;
            if demand[b] == 0 {
                return None;
            }
            chosen.push(e);
            alive[e] = false;
            white_done[w] = true;
            demand[b] -= 1;
            if demand[b] == 0 {
                for (f, &(_, bb)) in g.edges.iter().enumerate() {
                    if bb == b {
                        alive[f] = false;
                    }
                }
            }
            continue;
        }
        // every open white has valence >= 2: drop a surplus edge
        let b = (0..g.blacks()).find(|&b| bv[b] > demand[b] as usize)?;
        let e = (0..g.edges.len()).find(|&e| alive[e] && g.edges[e].1 == b)?;
        alive[e] = false;
    }
    if demand.iter().any(|&d| d != 0) {
        return None;
    }
    chosen.sort_unstable();
    Some(chosen)
}

/// Maximum b-matching by augmenting paths. Returns the chosen edges and, for
/// each white, whether it is matched.
fn max_b_matching(g: &CutGraph) -> (Vec<usize>, Vec<Option<usize>>) {
    let mut adj = vec![Vec::new(); g.whites];
    for (e, &(w, _)) in g.edges.iter().enumerate() {
        adj[w].push(e);
    }
    let mut matched: Vec<Option<usize>> = vec![None; g.whites];
    let mut load = vec![0u32; g.blacks()];
    // whites currently matched to each black
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); g.blacks()];
    for start in 0..g.whites {
        // BFS over whites; parent edge per visited white
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; g.whites];
        let mut visited = vec![false; g.whites];
        let mut seen_black = vec![false; g.blacks()];
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut end = None;
        'bfs: while let Some(w) = queue.pop_front() {
            for &e in &adj[w] {
                let b = g.edges[e].1;
                if matched[w] == Some(e) || seen_black[b] {
                    continue;
                }
                seen_black[b] = true;
                if load[b] < g.demands[b] {
                    end = Some((w, e));
                    break 'bfs;
                }
                for &w2 in &holders[b] {
                    if !visited[w2] {
                        visited[w2] = true;
                        parent[w2] = Some((w, e));
                        queue.push_back(w2);
                    }
                }
            }
        }
        let Some((mut w, mut e)) = end else { continue };
        load[g.edges[e].1] += 1;
        loop {
            let old = matched[w].replace(e);
            holders[g.edges[e].1].push(w);
            if let Some(o) = old {
                let ob = g.edges[o].1;
                holders[ob].retain(|&x| x != w);
            }
            match parent[w] {
                Some((pw, pe)) => {
                    // w gave up its old edge to pe's black; pw takes pe
                    w = pw;
                    e = pe;
                }
                None => break,
            }
        }
    }
    let mut edges: Vec<usize> = matched.iter().flatten().copied().collect();
    edges.sort_unstable();
    (edges, matched)
}

fn hall_certificate(g: &CutGraph, matched: &[Option<usize>]) -> Certificate {
    // alternating reachability from an unmatched white
    let start = matched.iter().position(|m| m.is_none()).expect("an unmatched white");
    let mut adj = vec![Vec::new(); g.whites];
    for (e, &(w, b)) in g.edges.iter().enumerate() {
        adj[w].push((e, b));
    }
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); g.blacks()];
    for (w, m) in matched.iter().enumerate() {
        if let Some(e) = m {
            holders[g.edges[*e].1].push(w);
        }
    }
    let mut whites = BTreeSet::from([start]);
    let mut blacks = BTreeSet::new();
    let mut queue = VecDeque::from([start]);
    while let Some(w) = queue.pop_front() {
        for &(_, b) in &adj[w] {
            if blacks.insert(b) {
                for &w2 in &holders[b] {
                    if whites.insert(w2) {
                        queue.push_back(w2);
                    }
                }
            }
        }
    }
    let capacity = blacks.iter().map(|&b| g.demands[b]).sum();
    Certificate::Hall {
        whites: whites.into_iter().collect(),
        blacks: blacks.into_iter().collect(),
        capacity,
    }
}

/// Max-flow answer on its own, used as the oracle for the induction.
pub fn flow_matching(g: &CutGraph) -> MatchingOutcome {
    let demand = g.total_demand();
    if demand as usize != g.whites {
        return MatchingOutcome::Infeasible {
            certificate: Certificate::DemandMismatch { whites: g.whites, demand },
        };
    }
    let (edges, matched) = max_b_matching(g);
    if edges.len() == g.whites {
        MatchingOutcome::Matched {
            method: Method::FlowFallback,
            edges,
        }
    } else {
        MatchingOutcome::Infeasible {
            certificate: hall_certificate(g, &matched),
        }
    }
}

pub fn find_matching(g: &CutGraph) -> Result<MatchingOutcome, CutError> {
    g.validate()?;
    if let Some(edges) = induction_matching(g) {
        return Ok(MatchingOutcome::Matched {
            method: Method::Induction,
            edges,
        });
    }
    Ok(flow_matching(g))
}

/// Brute force over the neighbour choice of every white.
pub fn exhaustive_matching(g: &CutGraph) -> Option<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.whites];
    for (e, &(w, _)) in g.edges.iter().enumerate() {
        adj[w].push(e);
    }
    fn go(w: usize, g: &CutGraph, adj: &[Vec<usize>], load: &mut [u32], pick: &mut Vec<usize>) -> bool {
        if w == g.whites {
            return load.iter().zip(&g.demands).all(|(a, b)| a == b);
        }
        for &e in &adj[w] {
            let b = g.edges[e].1;
            if load[b] < g.demands[b] {
                load[b] += 1;
                pick.push(e);
                if go(w + 1, g, adj, load, pick) {
                    return true;
                }
                pick.pop();
                load[b] -= 1;
            }
        }
        false
    }
    let mut load = vec![0; g.blacks()];
    let mut pick = Vec::new();
    if go(0, g, &adj, &mut load, &mut pick) {
        pick.sort_unstable();
        Some(pick)
    } else {
        None
    }
}

/// Random graph obeying the valence conditions with total demand equal to the
/// number of whites.
pub fn random_graph<R: rand::Rng>(rng: &mut R, max_whites: usize, max_blacks: usize) -> CutGraph {
    loop {
        let nb = rng.gen_range(1..=max_blacks);
        let nw = rng.gen_range(nb..=max_whites.max(nb));
        // split nw into nb positive demands
        let mut cuts: Vec<usize> = (1..nw).collect();
        let mut demands = vec![0u32; nb];
        for i in (1..cuts.len()).rev() {
            cuts.swap(i, rng.gen_range(0..=i));
        }
        let mut bars: Vec<usize> = cuts.into_iter().take(nb - 1).collect();
        bars.sort_unstable();
        let mut prev = 0;
        for (i, &c) in bars.iter().chain(std::iter::once(&nw)).enumerate() {
            demands[i] = (c - prev) as u32;
            prev = c;
        }
        let p = rng.gen_range(0.15..0.6);
        let mut edges = Vec::new();
        for w in 0..nw {
            for b in 0..nb {
                if rng.gen_bool(p) {
                    edges.push((w, b));
                }
            }
        }
        let g = CutGraph {
            whites: nw,
            demands,
            edges,
        };
        if g.validate().is_ok() {
            return g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_takes_every_edge() {
        let g = CutGraph::new(3, vec![3], vec![(0, 0), (1, 0), (2, 0)]).unwrap();
        let out = find_matching(&g).unwrap();
        assert_eq!(
            out,
            MatchingOutcome::Matched {
                method: Method::Induction,
                edges: vec![0, 1, 2]
            }
        );
    }

    #[test]
    fn complete_two_by_two() {
        let g = CutGraph::new(2, vec![1, 1], vec![(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        let out = find_matching(&g).unwrap();
        assert!(g.is_matching(out.edges().unwrap()));
        assert!(flow_matching(&g).is_matched());
        assert!(exhaustive_matching(&g).is_some());
    }

    #[test]
    fn valence_conditions_do_not_force_a_matching() {
        // two blacks of demand 2 share three whites
        let g = CutGraph::new(
            5,
            vec![2, 2, 1],
            vec![(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1), (3, 2), (4, 2)],
        )
        .unwrap();
        assert!(induction_matching(&g).is_none());
        assert!(exhaustive_matching(&g).is_none());
        match find_matching(&g).unwrap() {
            MatchingOutcome::Infeasible {
                certificate: Certificate::Hall { whites, blacks, capacity },
            } => {
                assert!(whites.len() > capacity as usize);
                let nb: BTreeSet<usize> = g.edges.iter().filter(|e| whites.contains(&e.0)).map(|e| e.1).collect();
                assert_eq!(nb.into_iter().collect::<Vec<_>>(), blacks);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_invalid_graphs() {
        assert_eq!(CutGraph::new(2, vec![1], vec![(0, 0)]), Err(CutError::IsolatedWhite(1)));
        assert_eq!(CutGraph::new(1, vec![2], vec![(0, 0)]), Err(CutError::Undersupplied(0, 1, 2)));
        assert_eq!(CutGraph::new(1, vec![1], vec![(0, 0), (0, 0)]), Err(CutError::DuplicateEdge(0, 0)));
    }

    #[test]
    fn demand_mismatch_certificate() {
        let g = CutGraph::new(2, vec![1], vec![(0, 0), (1, 0)]).unwrap();
        assert_eq!(
            find_matching(&g).unwrap(),
            MatchingOutcome::Infeasible {
                certificate: Certificate::DemandMismatch { whites: 2, demand: 1 }
            }
        );
    }

    #[test]
    fn gate_examples() {
        assert!(gate_condition(C64::new(5.0, 0.0), &[3], &[4]).unwrap());
        assert!(!gate_condition(C64::new(2.5, 0.0), &[2], &[2]).unwrap());
        // type A threshold is n
        for n in 2..6u32 {
            assert!(gate_condition(C64::new(n as f64, 0.0), &[n + 1], &[4]).unwrap());
            assert!(!gate_condition(C64::new(n as f64 - 1e-9, 0.0), &[n + 1], &[4]).unwrap());
        }
    }
}
