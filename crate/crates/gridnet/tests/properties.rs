//! Randomized invariants.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use gridnet::bridge::{decode_frame, encode_frame, WirePacket};
use gridnet::metrics::{
    closeness, eigenvector_centrality, rank_from_scores, spectral_gap, RankVector,
    UndirectedGraph,
};
use gridnet::rank::{alpha_sweep, max_deviation, solve_t, RankingInputs, Weights};
use gridnet::sim::{run_simulation, LoadModel, SimParams, SizeModel};
use gridnet::topology::{build_radial, build_star, Entity, GeoPoint, Role};

fn arb_packet() -> impl Strategy<Value = WirePacket> {
    (
        any::<u64>(),
        any::<u64>(),
        1u64..=u64::MAX / 2,
        "[a-z0-9-]{1,24}",
        "[a-z0-9-]{1,24}",
    )
        .prop_map(|(seq, created_at_us, size, src, dst)| WirePacket {
            seq,
            created_at_us,
            size,
            src,
            dst,
        })
}

proptest! {
    #[test]
    fn frame_roundtrip_is_identity(pkt in arb_packet()) {
        let bytes = encode_frame(&pkt);
        let (back, consumed) = decode_frame(&bytes).unwrap();
        prop_assert_eq!(back, pkt);
        prop_assert_eq!(consumed, bytes.len());
    }

    #[test]
    fn truncated_prefixes_never_decode(pkt in arb_packet(), cut in 0usize..32) {
        let bytes = encode_frame(&pkt);
        if cut < bytes.len() {
            let r = decode_frame(&bytes[..bytes.len() - cut - 1]);
            if cut + 1 < bytes.len() {
                prop_assert!(r.is_err());
            }
        }
    }

    #[test]
    fn rank_from_scores_is_bijection(scores in proptest::collection::btree_map("[a-h]", -1e3f64..1e3, 2..8)) {
        let scores: BTreeMap<String, f64> = scores;
        let restrict: BTreeSet<String> = scores.keys().cloned().collect();
        let rv = rank_from_scores(&scores, &restrict).unwrap();
        let mut seen: Vec<u32> = rv.as_map().values().copied().collect();
        seen.sort_unstable();
        let want: Vec<u32> = (0..scores.len() as u32).collect();
        prop_assert_eq!(seen, want);
    }

    #[test]
    fn spectral_gap_within_laplacian_bounds(seed in 0u64..500, n in 2usize..40, extra in 0usize..20) {
        let g = common::random_connected_graph(seed, n, extra);
        let gap = spectral_gap(&g).unwrap();
        prop_assert!((0.0..=2.0 + 1e-9).contains(&gap));
    }

    #[test]
    fn eigenvector_satisfies_eigen_equation(seed in 0u64..300, n in 2usize..24, extra in 0usize..10) {
        let g = common::random_connected_graph(seed, n, extra);
        let x = eigenvector_centrality(&g).unwrap();
        let v: Vec<f64> = g.labels().iter().map(|l| x[l]).collect();
        let ax: Vec<f64> = (0..g.node_count())
            .map(|i| g.neighbors(i).iter().map(|&w| v[w as usize]).sum::<f64>())
            .collect();
        let lambda: f64 = v.iter().zip(&ax).map(|(a, b)| a * b).sum();
        for i in 0..g.node_count() {
            prop_assert!((ax[i] - lambda * v[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn closeness_relabeling_invariance(seed in 0u64..200, n in 3usize..16) {
        let g1 = common::random_connected_graph(seed, n, 2);
        let relabeled: Vec<String> = (0..n).map(|i| format!("z{i:03}")).collect();
        let mut edges = Vec::new();
        for v in 0..n {
            for &w in g1.neighbors(v) {
                if (w as usize) > v {
                    edges.push((v as u32, w));
                }
            }
        }
        let g2 = UndirectedGraph::from_edges(relabeled, &edges);
        let c1 = closeness(&g1).unwrap();
        let c2 = closeness(&g2).unwrap();
        for v in 0..n {
            prop_assert_eq!(c1[&format!("n{v}")], c2[&format!("z{v:03}")]);
        }
    }
}

fn random_rank_vector(rng: &mut common::SplitMix, k: usize) -> RankVector {
    let mut perm: Vec<u32> = (0..k as u32).collect();
    for i in (1..k).rev() {
        let j = rng.below(i + 1);
        perm.swap(i, j);
    }
    RankVector::new((0..k).map(|i| (format!("u{i}"), perm[i])).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn sweep_thresholds_are_ordered_and_exact(seed in 0u64..5000) {
        let mut rng = common::SplitMix(seed);
        let k = 3 + rng.below(5);
        let inputs = RankingInputs::new(
            random_rank_vector(&mut rng, k),
            random_rank_vector(&mut rng, k),
            random_rank_vector(&mut rng, k),
            random_rank_vector(&mut rng, k),
        )
        .unwrap();
        let w = Weights::default();
        let pair = alpha_sweep(&inputs, &w, 0.05).unwrap();
        prop_assert!(pair.alpha1 <= pair.alpha0);
        // at alpha0 the solution equals the simulation ranking exactly,
        // at alpha1 it deviates by at most one rank per utility
        let t0 = solve_t(&inputs, &w, pair.alpha0).unwrap();
        prop_assert_eq!(max_deviation(&t0, &inputs.sim), 0);
        let t1 = solve_t(&inputs, &w, pair.alpha1).unwrap();
        prop_assert!(max_deviation(&t1, &inputs.sim) <= 1);
    }

    #[test]
    fn grid_deviation_nonincreasing(seed in 0u64..5000) {
        let mut rng = common::SplitMix(seed ^ 0xBEE);
        let k = 3 + rng.below(5);
        let inputs = RankingInputs::new(
            random_rank_vector(&mut rng, k),
            random_rank_vector(&mut rng, k),
            random_rank_vector(&mut rng, k),
            random_rank_vector(&mut rng, k),
        )
        .unwrap();
        let w = Weights::default();
        let mut prev = u32::MAX;
        for i in 0..=60 {
            let t = solve_t(&inputs, &w, 0.05 * i as f64).unwrap();
            let dev = max_deviation(&t, &inputs.sim);
            prop_assert!(dev <= prev, "deviation rose from {} to {} at grid point {}", prev, dev, i);
            prev = dev;
            if dev == 0 {
                break;
            }
        }
    }
}

/// Tiny random cases for end-to-end engine invariants.
fn random_case(rng: &mut common::SplitMix) -> Vec<Entity> {
    let utilities = 1 + rng.below(3);
    let mut entities = Vec::new();
    entities.push(Entity {
        id: "regulatory-0".into(),
        role: Role::Regulatory,
        utility_label: None,
        regulatory_label: None,
        coord: GeoPoint { lat_deg: 30.0, lon_deg: -100.0 },
    });
    for u in 0..utilities {
        let uid = format!("utility-{u}");
        entities.push(Entity {
            id: uid.clone(),
            role: Role::Utility,
            utility_label: None,
            regulatory_label: None,
            coord: GeoPoint { lat_deg: 30.0 + 3.0 * u as f64, lon_deg: -104.0 },
        });
        let subs = 1 + rng.below(4);
        for s in 0..subs {
            let role = if s == 0 || rng.below(2) == 0 {
                Role::TransmissionSubstation
            } else {
                Role::GenerationSubstation
            };
            entities.push(Entity {
                id: format!("sub-{u}-{s}"),
                role,
                utility_label: Some(uid.clone()),
                regulatory_label: None,
                coord: GeoPoint {
                    lat_deg: 30.0 + 3.0 * u as f64 + 0.01 * s as f64,
                    lon_deg: -104.2,
                },
            });
        }
    }
    entities
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn conservation_on_random_topologies(seed in 0u64..10_000) {
        let mut rng = common::SplitMix(seed);
        let entities = random_case(&mut rng);
        let topo = if rng.below(2) == 0 {
            build_star(&entities).unwrap()
        } else {
            build_radial(&entities).unwrap()
        };
        let params = SimParams {
            seed,
            port_rate: 1.0 + rng.unit() * 20.0,
            interarrival_cap: 0.05 + rng.unit() * 0.3,
            queue_capacity: if rng.below(2) == 0 { None } else { Some(5_000_000) },
            ..Default::default()
        };
        let stats = run_simulation(&topo, &params, 6.0).unwrap();
        let mut generated = 0u64;
        let mut absorbed = stats.total_delivered();
        for (id, c) in &stats.nodes {
            if id.starts_with("rt:") {
                prop_assert_eq!(
                    c.packets_in,
                    c.packets_out + c.packets_dropped + c.residual,
                    "conservation at {}", id
                );
                absorbed += c.packets_dropped + c.residual;
            }
            if id.starts_with("pg:") {
                generated += c.packets_out;
            }
        }
        prop_assert_eq!(generated, absorbed);
        for sink in stats.sinks.values() {
            for &d in &sink.delays {
                prop_assert!(d >= 0.0);
            }
        }
    }

    #[test]
    fn fixed_loads_drain_completely(seed in 0u64..10_000, total in 1u64..400) {
        let mut rng = common::SplitMix(seed ^ 0xF00D);
        let entities = random_case(&mut rng);
        let topo = build_star(&entities).unwrap();
        let params = SimParams {
            seed,
            load: LoadModel::FixedCount { total, interval: 0.02 },
            size_model: SizeModel::Fixed(200),
            ..Default::default()
        };
        let stats = run_simulation(&topo, &params, f64::INFINITY).unwrap();
        prop_assert_eq!(stats.total_generated(), total);
        prop_assert_eq!(stats.total_delivered(), total);
    }
}
