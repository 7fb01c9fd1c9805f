use std::collections::BTreeSet;

use proptest::prelude::*;
use qdiff_lab::cuts::{exhaustive_matching, find_matching, flow_matching, induction_matching, random_graph, Certificate, CutGraph, MatchingOutcome};
use rand::SeedableRng;

fn certificate_is_sound(g: &CutGraph, c: &Certificate) -> bool {
    match c {
        Certificate::DemandMismatch { whites, demand } => *whites == g.whites && *demand == g.total_demand() && *whites != *demand as usize,
        Certificate::Hall { whites, blacks, capacity } => {
            let seen: BTreeSet<usize> = g.edges.iter().filter(|e| whites.contains(&e.0)).map(|e| e.1).collect();
            let cap: u32 = blacks.iter().map(|&b| g.demands[b]).sum();
            seen.into_iter().collect::<Vec<_>>() == *blacks && cap == *capacity && whites.len() > cap as usize
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn outputs_are_matchings_or_certified(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 8, 4);
        match find_matching(&g).unwrap() {
            MatchingOutcome::Matched { edges, .. } => prop_assert!(g.is_matching(&edges)),
            MatchingOutcome::Infeasible { certificate } => prop_assert!(certificate_is_sound(&g, &certificate)),
        }
        // brute force decides feasibility for these sizes
        prop_assert_eq!(find_matching(&g).unwrap().is_matched(), exhaustive_matching(&g).is_some());
        prop_assert_eq!(flow_matching(&g).is_matched(), exhaustive_matching(&g).is_some());
        if let Some(e) = induction_matching(&g) {
            prop_assert!(g.is_matching(&e));
        }
    }

    #[test]
    fn deterministic(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 10, 5);
        prop_assert_eq!(find_matching(&g).unwrap(), find_matching(&g.clone()).unwrap());
    }
}

#[test]
fn graph_json_roundtrip() {
    let text = r#"{"whites": 3, "demands": [2, 1], "edges": [[0, 0], [1, 0], [2, 1], [1, 1]]}"#;
    let g: CutGraph = serde_json::from_str(text).unwrap();
    g.validate().unwrap();
    let out = find_matching(&g).unwrap();
    assert_eq!(out.edges().unwrap(), &[0, 1, 2]);
    let again: MatchingOutcome = serde_json::from_str(&serde_json::to_string(&out).unwrap()).unwrap();
    assert_eq!(again, out);
}
