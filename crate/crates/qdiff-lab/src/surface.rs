//! Graded marked surfaces presented by full formal arc systems.
//!
//! An arc system is stored through its dual polygons: one polygon per marked
//! point `Y`, bounded by the boundary segment through `Y` and one side per
//! arc ending at `Y`. Polygons are listed counterclockwise. Corners of the
//! polygons sit on the boundary, between consecutive marked points, and are
//! identified by gluing the two sides that carry the same arc.
//!
//! `degrees[k]` of a polygon is the intersection index at `Y` between the
//! arcs on sides `k + 1` and `k + 2` when sides are counted from the boundary
//! segment (which is side 0).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SurfaceError {
    #[error("genus {genus} with {b} boundary components and orders {orders:?} is not admissible: {reason}")]
    Inadmissible {
        genus: u32,
        b: usize,
        orders: Vec<u32>,
        reason: String,
    },
    #[error("unknown arc name(s): {0:?}")]
    UnknownArcs(Vec<String>),
    #[error("malformed side token {0:?}")]
    BadSide(String),
    #[error("arc system is invalid ({} violation(s)); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
    #[error("indices sum to {got}, expected 4 - 4g = {expected}")]
    IndexSum { got: i64, expected: i64 },
}

/// Numerical data `(g, b; k, l; LP)` of a graded marked surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkedSurfaceData {
    pub genus: u32,
    pub boundary_orders: Vec<u32>,
    pub boundary_indices: Vec<i64>,
    /// Lekili–Polishchuk data, carried along untouched.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp_data: Option<serde_json::Value>,
}

impl MarkedSurfaceData {
    pub fn new(genus: u32, boundary_orders: Vec<u32>, boundary_indices: Vec<i64>) -> Result<Self, SurfaceError> {
        let data = MarkedSurfaceData {
            genus,
            boundary_orders,
            boundary_indices,
            lp_data: None,
        };
        data.check()?;
        Ok(data)
    }

    pub fn check(&self) -> Result<(), SurfaceError> {
        let inadmissible = |reason: &str| SurfaceError::Inadmissible {
            genus: self.genus,
            b: self.boundary_orders.len(),
            orders: self.boundary_orders.clone(),
            reason: reason.to_string(),
        };
        if self.boundary_orders.is_empty() {
            return Err(inadmissible("at least one boundary component is required"));
        }
        if self.boundary_orders.len() != self.boundary_indices.len() {
            return Err(inadmissible("orders and indices have different lengths"));
        }
        if self.boundary_orders.contains(&0) {
            return Err(inadmissible("every boundary component needs a marked point"));
        }
        if is_excluded(self.genus, &self.boundary_orders) {
            return Err(inadmissible("disk with two marked points"));
        }
        let got: i64 = self.boundary_indices.iter().sum();
        let expected = 4 - 4 * self.genus as i64;
        if got != expected {
            return Err(SurfaceError::IndexSum { got, expected });
        }
        Ok(())
    }

    pub fn b(&self) -> usize {
        self.boundary_orders.len()
    }

    /// Total number of marked points.
    pub fn aleph(&self) -> u32 {
        self.boundary_orders.iter().sum()
    }

    pub fn hat_rank(&self) -> u32 {
        hat_rank(self.genus, &self.boundary_orders)
    }
}

/// `2g - 2 + b + sum k`.
pub fn hat_rank(genus: u32, orders: &[u32]) -> u32 {
    let n = 2 * genus as i64 - 2 + orders.len() as i64 + orders.iter().map(|&k| k as i64).sum::<i64>();
    n.max(0) as u32
}

fn is_excluded(genus: u32, orders: &[u32]) -> bool {
    genus == 0 && orders == [2]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Boundary,
    Arc { arc: usize, reversed: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polygon {
    pub sides: Vec<Side>,
    pub degrees: Vec<i64>,
}

impl Polygon {
    /// Sides rotated so that the first boundary segment comes first.
    fn normalized_sides(&self) -> Vec<Side> {
        let start = self.sides.iter().position(|s| *s == Side::Boundary).unwrap_or(0);
        let mut v = self.sides[start..].to_vec();
        v.extend_from_slice(&self.sides[..start]);
        v
    }

    /// Arc indices in order `gamma_1 .. gamma_m`.
    pub fn arc_sides(&self) -> Vec<usize> {
        self.normalized_sides()
            .iter()
            .filter_map(|s| match s {
                Side::Arc { arc, .. } => Some(*arc),
                Side::Boundary => None,
            })
            .collect()
    }

    fn boundary_count(&self) -> usize {
        self.sides.iter().filter(|s| **s == Side::Boundary).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcSystem {
    pub genus: u32,
    pub arc_names: Vec<String>,
    pub polygons: Vec<Polygon>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NotFullFormal,
    NoArcSides,
    DegreeCount,
    UnknownArc,
    ArcIncidence,
    Orientation,
    BoundaryChain,
    InteriorCorner,
    Euler,
    Orders,
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polygon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arc: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if let Some(p) = self.polygon {
            write!(f, " polygon {p}")?;
        }
        if let Some(a) = self.arc {
            write!(f, " arc {a}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

fn violation(kind: ViolationKind, polygon: Option<usize>, arc: Option<usize>, detail: impl Into<String>) -> Violation {
    Violation {
        kind,
        polygon,
        arc,
        detail: detail.into(),
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Result of gluing the polygons along their arc sides.
#[derive(Debug, Clone)]
pub struct Gluing {
    /// Corner class of corner `j` of polygon `p` (sides normalized so that the
    /// boundary segment is side 0, corner `j` is where side `j` starts).
    pub corner_class: Vec<Vec<usize>>,
    pub n_classes: usize,
    /// Boundary components as lists of polygons (marked points), in walk order.
    pub components: Vec<Vec<usize>>,
    pub violations: Vec<Violation>,
}

impl ArcSystem {
    pub fn n_arcs(&self) -> usize {
        self.arc_names.len()
    }

    fn structural_violations(&self) -> Vec<Violation> {
        use ViolationKind::*;
        let mut out = Vec::new();
        for (p, poly) in self.polygons.iter().enumerate() {
            let nb = poly.boundary_count();
            if nb != 1 {
                out.push(violation(NotFullFormal, Some(p), None, format!("{nb} boundary segments")));
            }
            let m = poly.sides.len() - nb;
            if m == 0 {
                out.push(violation(NoArcSides, Some(p), None, "polygon has no arc sides"));
            }
            if poly.degrees.len() + 1 != m.max(1) {
                out.push(violation(
                    DegreeCount,
                    Some(p),
                    None,
                    format!("{} arc sides need {} degrees, got {}", m, m.saturating_sub(1), poly.degrees.len()),
                ));
            }
            for s in &poly.sides {
                if let Side::Arc { arc, .. } = s {
                    if *arc >= self.n_arcs() {
                        out.push(violation(UnknownArc, Some(p), Some(*arc), "arc index out of range"));
                    }
                }
            }
        }
        let mut uses: Vec<Vec<bool>> = vec![Vec::new(); self.n_arcs()];
        for poly in &self.polygons {
            for s in &poly.sides {
                if let Side::Arc { arc, reversed } = s {
                    if *arc < self.n_arcs() {
                        uses[*arc].push(*reversed);
                    }
                }
            }
        }
        for (a, u) in uses.iter().enumerate() {
            if u.len() != 2 {
                out.push(violation(ArcIncidence, None, Some(a), format!("appears on {} sides", u.len())));
            } else if u[0] == u[1] {
                out.push(violation(Orientation, None, Some(a), "both sides carry the same orientation"));
            }
        }
        out
    }

    /// Glue corners and walk the boundary. Only meaningful when the
    /// structural checks pass; otherwise the violations are returned.
    pub fn glue(&self) -> Gluing {
        use ViolationKind::*;
        let mut violations = self.structural_violations();
        let mut offsets = Vec::with_capacity(self.polygons.len());
        let mut total = 0;
        for poly in &self.polygons {
            offsets.push(total);
            total += poly.sides.len();
        }
        let mut uf = UnionFind::new(total);
        let mut ends: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.n_arcs()];
        let normalized: Vec<Vec<Side>> = self.polygons.iter().map(|p| p.normalized_sides()).collect();
        for (p, sides) in normalized.iter().enumerate() {
            let len = sides.len();
            for (j, s) in sides.iter().enumerate() {
                if let Side::Arc { arc, reversed } = s {
                    if *arc >= self.n_arcs() {
                        continue;
                    }
                    let a = offsets[p] + j;
                    let b = offsets[p] + (j + 1) % len;
                    let (tail, head) = if *reversed { (b, a) } else { (a, b) };
                    ends[*arc].push((tail, head));
                }
            }
        }
        for e in &ends {
            if e.len() == 2 {
                uf.union(e[0].0, e[1].0);
                uf.union(e[0].1, e[1].1);
            }
        }
        let mut class_id = BTreeMap::new();
        let mut corner_class = Vec::new();
        for (p, sides) in normalized.iter().enumerate() {
            let mut row = Vec::new();
            for j in 0..sides.len() {
                let r = uf.find(offsets[p] + j);
                let next = class_id.len();
                row.push(*class_id.entry(r).or_insert(next));
            }
            corner_class.push(row);
        }
        let n_classes = class_id.len();

        // boundary segments: polygon p runs from corner 0 to corner 1
        let mut from_tail: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
        let mut into_head: Vec<usize> = vec![0; n_classes];
        let mut seg = Vec::new();
        for (p, sides) in normalized.iter().enumerate() {
            if sides.first() != Some(&Side::Boundary) || sides.len() < 2 {
                seg.push(None);
                continue;
            }
            let (t, h) = (corner_class[p][0], corner_class[p][1]);
            from_tail[t].push(p);
            into_head[h] += 1;
            seg.push(Some((t, h)));
        }
        let mut components = Vec::new();
        let structural_ok = violations.is_empty();
        if structural_ok {
            for c in 0..n_classes {
                if from_tail[c].len() != 1 || into_head[c] != 1 {
                    violations.push(violation(
                        if from_tail[c].is_empty() && into_head[c] == 0 { InteriorCorner } else { BoundaryChain },
                        None,
                        None,
                        format!(
                            "corner class {c} starts {} and ends {} boundary segments",
                            from_tail[c].len(),
                            into_head[c]
                        ),
                    ));
                }
            }
            if violations.is_empty() {
                let mut seen = vec![false; self.polygons.len()];
                for start in 0..self.polygons.len() {
                    if seen[start] {
                        continue;
                    }
                    let mut comp = Vec::new();
                    let mut p = start;
                    while !seen[p] {
                        seen[p] = true;
                        comp.push(p);
                        let (_, h) = seg[p].expect("checked above");
                        p = from_tail[h][0];
                    }
                    components.push(comp);
                }
            }
        }
        Gluing {
            corner_class,
            n_classes,
            components,
            violations,
        }
    }

    /// Every violation against the declared surface data.
    pub fn validate(&self, surf: &MarkedSurfaceData) -> Vec<Violation> {
        use ViolationKind::*;
        let gl = self.glue();
        let mut out = gl.violations;
        if out.is_empty() {
            let b = gl.components.len();
            let chi = self.polygons.len() as i64 - self.n_arcs() as i64;
            let expected = 2 - 2 * surf.genus as i64 - surf.b() as i64;
            if chi != expected {
                out.push(violation(
                    Euler,
                    None,
                    None,
                    format!("#polygons - #arcs = {chi}, but 2 - 2g - b = {expected}"),
                ));
            }
            let mut got: Vec<u32> = gl.components.iter().map(|c| c.len() as u32).collect();
            let mut want = surf.boundary_orders.clone();
            got.sort_unstable();
            want.sort_unstable();
            if b != surf.b() || got != want {
                out.push(violation(
                    Orders,
                    None,
                    None,
                    format!("boundary orders {got:?} from the gluing, declared {want:?}"),
                ));
            }
            if self.genus != surf.genus {
                out.push(violation(
                    Euler,
                    None,
                    None,
                    format!("arc system genus {} differs from declared genus {}", self.genus, surf.genus),
                ));
            }
        }
        if is_excluded(surf.genus, &surf.boundary_orders) {
            out.push(violation(Excluded, None, None, "disk with two marked points"));
        }
        out
    }

    /// Structural validation against the genus recorded in the system, with
    /// boundary data read off the gluing.
    pub fn self_check(&self) -> Vec<Violation> {
        use ViolationKind::*;
        let gl = self.glue();
        let mut out = gl.violations;
        if out.is_empty() {
            let chi = self.polygons.len() as i64 - self.n_arcs() as i64;
            let expected = 2 - 2 * self.genus as i64 - gl.components.len() as i64;
            if chi != expected {
                out.push(violation(
                    Euler,
                    None,
                    None,
                    format!("#polygons - #arcs = {chi}, but 2 - 2g - b = {expected}"),
                ));
            }
            let orders: Vec<u32> = gl.components.iter().map(|c| c.len() as u32).collect();
            if is_excluded(self.genus, &orders) {
                out.push(violation(Excluded, None, None, "disk with two marked points"));
            }
        }
        out
    }

    /// Numerical data of the surface, with `l_i` read off the degrees.
    pub fn numerical_data(&self) -> Result<MarkedSurfaceData, SurfaceError> {
        let problems = self.self_check();
        if !problems.is_empty() {
            return Err(SurfaceError::Invalid(problems));
        }
        let gl = self.glue();
        let normalized: Vec<Vec<Side>> = self.polygons.iter().map(|p| p.normalized_sides()).collect();

        let mut ncorners = vec![0i64; gl.n_classes];
        let mut degree_at = vec![0i64; gl.n_classes];
        for (p, poly) in self.polygons.iter().enumerate() {
            for (j, &c) in gl.corner_class[p].iter().enumerate() {
                ncorners[c] += 1;
                // corner j >= 2 sits between arc sides j-1 and j
                if j >= 2 {
                    degree_at[c] += poly.degrees[j - 2];
                }
            }
            debug_assert_eq!(normalized[p].len(), gl.corner_class[p].len());
        }

        let mut orders = Vec::new();
        let mut indices = Vec::new();
        for comp in &gl.components {
            let mut two_minus_l = 0i64;
            for &p in comp {
                let d_total: i64 = self.polygons[p].degrees.iter().sum();
                two_minus_l += d_total - 1;
                // the corner class at the head of this boundary segment
                let c = gl.corner_class[p][1];
                two_minus_l += ncorners[c] - 2 - degree_at[c];
            }
            orders.push(comp.len() as u32);
            indices.push(2 - two_minus_l);
        }
        let got: i64 = indices.iter().sum();
        let expected = 4 - 4 * self.genus as i64;
        if got != expected {
            return Err(SurfaceError::IndexSum { got, expected });
        }
        Ok(MarkedSurfaceData {
            genus: self.genus,
            boundary_orders: orders,
            boundary_indices: indices,
            lp_data: None,
        })
    }
}

// ---------------------------------------------------------------------------
// JSON form

/// On-disk form. Sides are `"B"` for the boundary segment, an arc name for an
/// arc traversed along its orientation and `"-name"` for the reverse.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcSystemFile {
    pub genus: u32,
    pub arcs: Vec<String>,
    pub polygons: Vec<PolygonFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp_data: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonFile {
    pub sides: Vec<String>,
    #[serde(default)]
    pub degrees: Vec<i64>,
}

impl TryFrom<&ArcSystemFile> for ArcSystem {
    type Error = SurfaceError;

    fn try_from(f: &ArcSystemFile) -> Result<Self, SurfaceError> {
        let index: BTreeMap<&str, usize> = f.arcs.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut unknown = Vec::new();
        let mut polygons = Vec::new();
        for pf in &f.polygons {
            let mut sides = Vec::new();
            for tok in &pf.sides {
                if tok == "B" {
                    sides.push(Side::Boundary);
                    continue;
                }
                let (name, reversed) = match tok.strip_prefix('-') {
                    Some(rest) => (rest, true),
                    None => (tok.as_str(), false),
                };
                if name.is_empty() {
                    return Err(SurfaceError::BadSide(tok.clone()));
                }
                match index.get(name) {
                    Some(&arc) => sides.push(Side::Arc { arc, reversed }),
                    None => unknown.push(name.to_string()),
                }
            }
            polygons.push(Polygon {
                sides,
                degrees: pf.degrees.clone(),
            });
        }
        if !unknown.is_empty() {
            return Err(SurfaceError::UnknownArcs(unknown));
        }
        Ok(ArcSystem {
            genus: f.genus,
            arc_names: f.arcs.clone(),
            polygons,
        })
    }
}

impl From<&ArcSystem> for ArcSystemFile {
    fn from(sys: &ArcSystem) -> Self {
        let polygons = sys
            .polygons
            .iter()
            .map(|p| PolygonFile {
                sides: p
                    .sides
                    .iter()
                    .map(|s| match s {
                        Side::Boundary => "B".to_string(),
                        Side::Arc { arc, reversed } => {
                            let name = sys.arc_names.get(*arc).cloned().unwrap_or_else(|| format!("#{arc}"));
                            if *reversed {
                                format!("-{name}")
                            } else {
                                name
                            }
                        }
                    })
                    .collect(),
                degrees: p.degrees.clone(),
            })
            .collect();
        ArcSystemFile {
            genus: sys.genus,
            arcs: sys.arc_names.clone(),
            polygons,
            lp_data: None,
        }
    }
}

// ---------------------------------------------------------------------------
// Builders from ribbon graphs

/// Half-edge at a marked point of the closed-arc graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfEdge {
    /// Boundary arc leaving the point in the boundary orientation.
    Out,
    /// Boundary arc arriving at the point.
    In,
    Arc(usize),
}

/// Counterclockwise order of half-edges at each marked point, starting with
/// `Out` and ending with `In`. `next_point[y]` is the marked point that the
/// `Out` half-edge of `y` reaches.
#[derive(Debug, Clone)]
pub struct RibbonGraph {
    pub rotation: Vec<Vec<HalfEdge>>,
    pub next_point: Vec<usize>,
    pub n_arcs: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum RibbonError {
    #[error("marked point {0} must list Out first and In last")]
    Rotation(usize),
    #[error("arc {0} must have exactly two ends")]
    ArcEnds(usize),
    #[error("face {0} contains {1} boundary arcs; the system is not full formal")]
    NotFullFormal(usize, usize),
}

impl RibbonGraph {
    /// Dual polygons of the closed-arc graph. The degree of the corner between
    /// the `k`-th and `(k+1)`-th arc at point `y` is `degree(y, k)`.
    pub fn arc_system(&self, genus: u32, degree: impl Fn(usize, usize) -> i64) -> Result<ArcSystem, RibbonError> {
        let n = self.rotation.len();
        for (y, rot) in self.rotation.iter().enumerate() {
            if rot.first() != Some(&HalfEdge::Out) || rot.last() != Some(&HalfEdge::In) || rot.len() < 2 {
                return Err(RibbonError::Rotation(y));
            }
        }
        // where each arc end sits
        let mut arc_ends: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.n_arcs];
        for (y, rot) in self.rotation.iter().enumerate() {
            for (i, h) in rot.iter().enumerate() {
                if let HalfEdge::Arc(a) = h {
                    arc_ends[*a].push((y, i));
                }
            }
        }
        if let Some(a) = arc_ends.iter().position(|e| e.len() != 2) {
            return Err(RibbonError::ArcEnds(a));
        }
        let mut prev_point = vec![0; n];
        for (y, &z) in self.next_point.iter().enumerate() {
            prev_point[z] = y;
        }
        let opposite = |y: usize, i: usize| -> (usize, usize) {
            match self.rotation[y][i] {
                HalfEdge::Out => {
                    let z = self.next_point[y];
                    (z, self.rotation[z].len() - 1)
                }
                HalfEdge::In => (prev_point[y], 0),
                HalfEdge::Arc(a) => {
                    let e = &arc_ends[a];
                    if e[0] == (y, i) {
                        e[1]
                    } else {
                        e[0]
                    }
                }
            }
        };
        // sectors (y, i) between half-edges i and i + 1 at y
        let mut face = vec![Vec::new(); n];
        for (y, rot) in self.rotation.iter().enumerate() {
            face[y] = vec![usize::MAX; rot.len() - 1];
        }
        let mut n_faces = 0;
        for y in 0..n {
            for i in 0..self.rotation[y].len() - 1 {
                if face[y][i] != usize::MAX {
                    continue;
                }
                let mut boundary_edges = 0;
                let (mut cy, mut ci) = (y, i);
                while face[cy][ci] == usize::MAX {
                    face[cy][ci] = n_faces;
                    let h = ci + 1;
                    if matches!(self.rotation[cy][h], HalfEdge::In) {
                        boundary_edges += 1;
                    }
                    let (oy, oi) = opposite(cy, h);
                    if matches!(self.rotation[oy][oi], HalfEdge::In) {
                        boundary_edges += 1;
                    }
                    cy = oy;
                    ci = oi;
                    if ci + 1 >= self.rotation[cy].len() {
                        // walked onto the outside of the boundary
                        return Err(RibbonError::NotFullFormal(n_faces, 0));
                    }
                }
                if boundary_edges != 1 {
                    return Err(RibbonError::NotFullFormal(n_faces, boundary_edges));
                }
                n_faces += 1;
            }
        }
        let _ = n_faces;
        let mut first_seen = vec![None; self.n_arcs];
        let mut polygons = Vec::with_capacity(n);
        for (y, rot) in self.rotation.iter().enumerate() {
            let mut sides = vec![Side::Boundary];
            let arcs: Vec<usize> = rot
                .iter()
                .filter_map(|h| if let HalfEdge::Arc(a) = h { Some(*a) } else { None })
                .collect();
            for &a in &arcs {
                let reversed = match first_seen[a] {
                    None => {
                        first_seen[a] = Some(y);
                        false
                    }
                    Some(_) => true,
                };
                sides.push(Side::Arc { arc: a, reversed });
            }
            let degrees = (0..arcs.len().saturating_sub(1)).map(|k| degree(y, k)).collect();
            polygons.push(Polygon { sides, degrees });
        }
        Ok(ArcSystem {
            genus,
            arc_names: (0..self.n_arcs).map(|a| format!("eta{}", a + 1)).collect(),
            polygons,
        })
    }

    /// Disk with `n` marked points on a counterclockwise circle and arcs
    /// given as pairs of marked points.
    pub fn disk(n: usize, chords: &[(usize, usize)]) -> RibbonGraph {
        let mut rotation = Vec::with_capacity(n);
        for y in 0..n {
            let mut here: Vec<(usize, usize)> = Vec::new();
            for (a, &(u, v)) in chords.iter().enumerate() {
                if u == y {
                    here.push(((v + n - y) % n, a));
                }
                if v == y {
                    here.push(((u + n - y) % n, a));
                }
            }
            here.sort_unstable();
            let mut rot = vec![HalfEdge::Out];
            rot.extend(here.into_iter().map(|(_, a)| HalfEdge::Arc(a)));
            rot.push(HalfEdge::In);
            rotation.push(rot);
        }
        RibbonGraph {
            rotation,
            next_point: (0..n).map(|y| (y + 1) % n).collect(),
            n_arcs: chords.len(),
        }
    }

    /// Annulus with `p` points on the outer and `q` on the inner boundary,
    /// triangulated by bridging arcs. `steps[t]` says whether arc `t + 1`
    /// advances along the outer (`true`) or inner boundary from arc `t`;
    /// it needs exactly `p` outer and `q` inner steps.
    pub fn annulus(p: usize, q: usize, steps: &[bool]) -> RibbonGraph {
        assert_eq!(steps.len(), p + q);
        assert_eq!(steps.iter().filter(|s| **s).count(), p);
        let total = p + q;
        let mut ends = Vec::with_capacity(total);
        let (mut o, mut i) = (0usize, 0usize);
        for &outer in steps {
            ends.push((o % p, i % q));
            if outer {
                o += 1;
            } else {
                i += 1;
            }
        }
        // runs of consecutive arcs at each point, in cyclic order
        let run_at = |point: usize, outer: bool| -> Vec<usize> {
            let owns = |t: usize| if outer { ends[t].0 == point } else { ends[t].1 == point };
            // a run starts right after a step along this boundary
            let start = (0..total)
                .find(|&t| owns(t) && steps[(t + total - 1) % total] == outer)
                .unwrap_or(0);
            (0..total).map(|k| (start + k) % total).take_while(|&t| owns(t)).collect()
        };
        let mut rotation = Vec::with_capacity(total);
        let mut next_point = Vec::with_capacity(total);
        for j in 0..p {
            let mut rot = vec![HalfEdge::Out];
            rot.extend(run_at(j, true).into_iter().rev().map(HalfEdge::Arc));
            rot.push(HalfEdge::In);
            rotation.push(rot);
            next_point.push((j + 1) % p);
        }
        for j in 0..q {
            let mut rot = vec![HalfEdge::Out];
            rot.extend(run_at(j, false).into_iter().map(HalfEdge::Arc));
            rot.push(HalfEdge::In);
            rotation.push(rot);
            next_point.push(p + (j + q - 1) % q);
        }
        RibbonGraph {
            rotation,
            next_point,
            n_arcs: total,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2_fan() -> ArcSystem {
        RibbonGraph::disk(3, &[(0, 1), (0, 2)]).arc_system(0, |_, _| 0).unwrap()
    }

    #[test]
    fn a2_fan_shape() {
        let sys = a2_fan();
        let mut ms: Vec<usize> = sys.polygons.iter().map(|p| p.arc_sides().len()).collect();
        ms.sort_unstable();
        assert_eq!(ms, vec![1, 1, 2]);
        assert!(sys.self_check().is_empty());
        let data = sys.numerical_data().unwrap();
        assert_eq!(data.boundary_orders, vec![3]);
        assert_eq!(data.boundary_indices, vec![4]);
    }

    #[test]
    fn two_boundary_segments_is_not_full_formal() {
        let mut sys = a2_fan();
        sys.polygons[0].sides.push(Side::Boundary);
        let v = sys.self_check();
        assert!(v.iter().any(|v| v.kind == ViolationKind::NotFullFormal && v.polygon == Some(0)));
    }

    #[test]
    fn violations_are_collected_not_short_circuited() {
        let mut sys = a2_fan();
        sys.polygons[0].sides.push(Side::Boundary);
        sys.polygons[1].degrees.push(7);
        let v = sys.self_check();
        assert!(v.len() >= 2);
    }

    #[test]
    fn hat_rank_examples() {
        assert_eq!(hat_rank(0, &[5]), 4);
        assert_eq!(hat_rank(0, &[2, 3]), 5);
        assert_eq!(hat_rank(1, &[3]), 4);
    }

    #[test]
    fn excluded_disk() {
        assert!(MarkedSurfaceData::new(0, vec![2], vec![4]).is_err());
        assert!(MarkedSurfaceData::new(0, vec![3], vec![4]).is_ok());
        assert!(MarkedSurfaceData::new(0, vec![3], vec![3]).is_err());
    }

    #[test]
    fn annulus_one_one_indices_follow_degrees() {
        for (d0, d1) in [(0, 0), (1, 1), (2, -1), (-3, 1)] {
            let sys = RibbonGraph::annulus(1, 1, &[true, false])
                .arc_system(0, |y, _| if y == 0 { d0 } else { d1 })
                .unwrap();
            let data = sys.numerical_data().unwrap();
            assert_eq!(data.boundary_orders, vec![1, 1]);
            let mut l = data.boundary_indices.clone();
            l.sort_unstable();
            let mut want = vec![2 + d1 - d0, 2 - d1 + d0];
            want.sort_unstable();
            assert_eq!(l, want);
        }
    }

    #[test]
    fn json_roundtrip() {
        let sys = a2_fan();
        let file = ArcSystemFile::from(&sys);
        let text = serde_json::to_string(&file).unwrap();
        let back: ArcSystemFile = serde_json::from_str(&text).unwrap();
        assert_eq!(ArcSystem::try_from(&back).unwrap(), sys);
    }

    #[test]
    fn unknown_arc_name_rejected() {
        let f = ArcSystemFile {
            genus: 0,
            arcs: vec!["x".into()],
            polygons: vec![PolygonFile {
                sides: vec!["B".into(), "y".into()],
                degrees: vec![],
            }],
            lp_data: None,
        };
        assert_eq!(ArcSystem::try_from(&f), Err(SurfaceError::UnknownArcs(vec!["y".into()])));
    }
}
