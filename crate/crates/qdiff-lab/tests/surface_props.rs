use proptest::prelude::*;
use qdiff_lab::corpus;
use qdiff_lab::hurwitz::hurwitz_dimension;
use qdiff_lab::surface::{hat_rank, ArcSystem, ArcSystemFile, MarkedSurfaceData, RibbonGraph, Side};

/// Noncrossing spanning tree on `n` points of a circle, grown along the
/// visible right spine.
fn noncrossing_tree(n: usize, picks: &[usize]) -> Vec<(usize, usize)> {
    let mut spine = vec![0usize];
    let mut edges = Vec::new();
    for i in 1..n {
        let j = picks[i - 1] % spine.len();
        let parent = spine[j];
        spine.truncate(j + 1);
        spine.push(i);
        edges.push((parent, i));
    }
    edges
}

/// Rotates the polygon list by `rp` and renames arc `a` to `a + ra`.
fn relabel(sys: &ArcSystem, rp: usize, ra: usize) -> ArcSystem {
    let n = sys.arc_names.len();
    let mut polygons = sys.polygons.clone();
    let np = polygons.len();
    polygons.rotate_left(rp % np);
    for p in &mut polygons {
        for s in &mut p.sides {
            if let Side::Arc { arc, .. } = s {
                *arc = (*arc + ra) % n;
            }
        }
    }
    let mut arc_names = vec![String::new(); n];
    for (a, name) in sys.arc_names.iter().enumerate() {
        arc_names[(a + ra) % n] = name.clone();
    }
    ArcSystem {
        genus: sys.genus,
        arc_names,
        polygons,
    }
}

fn sorted_data(d: &MarkedSurfaceData) -> Vec<(u32, i64)> {
    let mut v: Vec<(u32, i64)> = d.boundary_orders.iter().copied().zip(d.boundary_indices.iter().copied()).collect();
    v.sort_unstable();
    v
}

fn all_systems() -> Vec<ArcSystem> {
    let mut v: Vec<ArcSystem> = corpus::arc_systems().into_iter().map(|(_, s)| s).collect();
    for (p, q) in [(1, 1), (2, 1), (2, 3)] {
        for d in -1..=1 {
            v.push(corpus::annulus(p, q, d));
        }
    }
    v
}

#[test]
fn corpus_index_sums() {
    for sys in all_systems() {
        let d = sys.numerical_data().unwrap();
        assert_eq!(d.boundary_indices.iter().sum::<i64>(), 4 - 4 * d.genus as i64);
        d.check().unwrap();
    }
}

#[test]
fn corpus_json_roundtrip() {
    for sys in all_systems() {
        let file = ArcSystemFile::from(&sys);
        let text = serde_json::to_string(&file).unwrap();
        let back: ArcSystemFile = serde_json::from_str(&text).unwrap();
        assert_eq!(ArcSystem::try_from(&back).unwrap(), sys);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn numerical_data_survives_relabeling(
        n in 3usize..9,
        picks in proptest::collection::vec(0usize..8, 8),
        degrees in proptest::collection::vec(-2i64..=2, 32),
        rp in 0usize..8,
        ra in 0usize..8,
    ) {
        let chords = noncrossing_tree(n, &picks);
        let sys = RibbonGraph::disk(n, &chords)
            .arc_system(0, |y, k| degrees[(3 * y + k) % degrees.len()])
            .unwrap();
        let base = sys.numerical_data().unwrap();
        prop_assert_eq!(base.boundary_indices.iter().sum::<i64>(), 4);
        let moved = relabel(&sys, rp, ra).numerical_data().unwrap();
        prop_assert_eq!(sorted_data(&base), sorted_data(&moved));
    }

    #[test]
    fn hat_rank_matches_hurwitz_dimension(orders in proptest::collection::vec(1u32..7, 1..5)) {
        prop_assert_eq!(hat_rank(0, &orders) as i64, hurwitz_dimension(0, &orders));
    }
}
