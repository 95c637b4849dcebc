//! Built-in synthetic cases sized like the three reference systems, plus the
//! small validation fixtures.
//!
//! Entity counts per case and the per-utility substation assignment sizes are
//! fixed constants; coordinates are laid out deterministically (utilities
//! clustered around their regulatory unit, substations in a tight disc around
//! their utility) so that geographic nearest-utility assignment reproduces the
//! intended grouping. Disc offsets are seeded from an id hash, so regenerating
//! a case always yields identical coordinates.

use crate::topology::{
    element_id, ElementKind, Entity, GeoPoint, Node, Role, Topology, TopologyKind,
};

/// The three built-in case sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinCase {
    Act500,
    Act2000,
    Act10k,
}

impl BuiltinCase {
    pub fn name(self) -> &'static str {
        match self {
            BuiltinCase::Act500 => "ACTIVSg500",
            BuiltinCase::Act2000 => "ACTIVSg2000",
            BuiltinCase::Act10k => "ACTIVSg10k",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "500" | "ACTIVSg500" => Some(BuiltinCase::Act500),
            "2000" | "2k" | "ACTIVSg2000" => Some(BuiltinCase::Act2000),
            "10k" | "10000" | "ACTIVSg10k" => Some(BuiltinCase::Act10k),
            _ => None,
        }
    }

    /// (generation, transmission, utility, regulatory) entity counts.
    pub fn counts(self) -> (usize, usize, usize, usize) {
        match self {
            BuiltinCase::Act500 => (31, 177, 4, 1),
            BuiltinCase::Act2000 => (188, 1062, 20, 1),
            BuiltinCase::Act10k => (851, 3921, 80, 20),
        }
    }
}

/// Substations assigned to each of the four utilities in the 500-bus case.
const SUBS_PER_UTILITY_500: [u64; 4] = [67, 50, 39, 52];

/// Substations assigned to each of the twenty utilities in the 2000-bus case.
const SUBS_PER_UTILITY_2000: [u64; 20] = [
    98, 104, 199, 57, 34, 60, 45, 13, 45, 163, 103, 40, 48, 22, 47, 20, 40, 41, 65, 6,
];

/// (assigned substations, regulatory index) per utility in the 10k-bus case.
/// The published per-utility totals sum to 4762 while the case holds 4772
/// substations; `scaled_totals` stretches them proportionally to fit.
const SUBS_PER_UTILITY_10K: [(u64, usize); 80] = [
    (232, 14), (73, 3), (15, 15), (43, 19), (107, 10), (66, 12), (87, 13), (298, 6),
    (21, 4), (29, 2), (80, 9), (19, 5), (67, 14), (25, 0), (57, 3), (135, 13),
    (84, 8), (16, 17), (66, 7), (50, 15), (130, 0), (22, 2), (48, 18), (32, 5),
    (137, 14), (142, 12), (42, 10), (18, 7), (49, 12), (19, 5), (141, 19), (74, 5),
    (24, 17), (30, 0), (8, 15), (35, 8), (151, 6), (32, 13), (135, 13), (44, 1),
    (7, 11), (33, 3), (63, 6), (17, 11), (29, 3), (35, 15), (19, 9), (90, 14),
    (136, 8), (48, 18), (181, 3), (23, 19), (226, 6), (35, 10), (10, 17), (48, 10),
    (25, 2), (39, 18), (14, 0), (23, 12), (46, 14), (25, 3), (26, 13), (14, 1),
    (100, 4), (26, 10), (13, 17), (18, 5), (33, 8), (35, 19), (11, 16), (143, 4),
    (60, 6), (21, 7), (57, 6), (28, 5), (40, 14), (30, 4), (13, 2), (39, 4),
];

fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Two unit floats derived from an id hash.
fn hash_pair(id: &str) -> (f64, f64) {
    let a = mix64(fnv1a64(id));
    let b = mix64(a);
    let unit = |x: u64| (x >> 11) as f64 / (1u64 << 53) as f64;
    (unit(a), unit(b))
}

/// Largest-remainder apportionment of `total` across weighted buckets.
fn apportion(total: u64, weights: &[u64]) -> Vec<u64> {
    let grand: u64 = weights.iter().sum();
    assert!(grand > 0);
    let mut floors: Vec<u64> = Vec::with_capacity(weights.len());
    let mut rems: Vec<(u64, usize)> = Vec::with_capacity(weights.len());
    let mut assigned = 0u64;
    for (i, &w) in weights.iter().enumerate() {
        let num = (w as u128) * (total as u128);
        let q = (num / grand as u128) as u64;
        let r = (num % grand as u128) as u64;
        floors.push(q);
        rems.push((r, i));
        assigned += q;
    }
    rems.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut left = total - assigned;
    for (_, i) in rems {
        if left == 0 {
            break;
        }
        floors[i] += 1;
        left -= 1;
    }
    floors
}

/// Split per-utility substation totals into generation counts, keeping at
/// least one transmission substation per utility.
fn gen_split(gen_total: u64, totals: &[u64]) -> Vec<u64> {
    let mut gens = apportion(gen_total, totals);
    for i in 0..gens.len() {
        if gens[i] >= totals[i] && totals[i] > 0 {
            let spill = gens[i] - (totals[i] - 1);
            gens[i] = totals[i] - 1;
            // push spill onto the largest remaining region
            let j = (0..gens.len())
                .filter(|&j| j != i)
                .max_by_key(|&j| totals[j] - gens[j])
                .expect("more than one region");
            gens[j] += spill;
        }
    }
    gens
}

struct Layout {
    utility_pos: Vec<GeoPoint>,
    regulatory_pos: Vec<GeoPoint>,
    regulatory_of_utility: Vec<usize>,
}

fn layout(case: BuiltinCase) -> Layout {
    match case {
        BuiltinCase::Act500 | BuiltinCase::Act2000 => {
            let k = if case == BuiltinCase::Act500 { 4 } else { 20 };
            let reg = GeoPoint { lat_deg: 35.0, lon_deg: -97.0 };
            let utility_pos = (0..k)
                .map(|i| {
                    let theta = std::f64::consts::TAU * i as f64 / k as f64;
                    GeoPoint {
                        lat_deg: reg.lat_deg + 4.0 * theta.cos(),
                        lon_deg: reg.lon_deg + 5.0 * theta.sin(),
                    }
                })
                .collect();
            Layout {
                utility_pos,
                regulatory_pos: vec![reg],
                regulatory_of_utility: vec![0; k],
            }
        }
        BuiltinCase::Act10k => {
            let regulatory_pos: Vec<GeoPoint> = (0..20)
                .map(|g| GeoPoint {
                    lat_deg: 28.0 + 7.0 * (g / 5) as f64,
                    lon_deg: -122.0 + 9.0 * (g % 5) as f64,
                })
                .collect();
            let regulatory_of_utility: Vec<usize> =
                SUBS_PER_UTILITY_10K.iter().map(|&(_, r)| r).collect();
            // position utilities on a ring around their regulatory unit
            let mut per_reg_count = vec![0usize; 20];
            for &r in &regulatory_of_utility {
                per_reg_count[r] += 1;
            }
            let mut per_reg_seen = vec![0usize; 20];
            let utility_pos = regulatory_of_utility
                .iter()
                .map(|&r| {
                    let j = per_reg_seen[r];
                    per_reg_seen[r] += 1;
                    let theta = std::f64::consts::TAU * j as f64 / per_reg_count[r] as f64;
                    GeoPoint {
                        lat_deg: regulatory_pos[r].lat_deg + 2.2 * theta.cos(),
                        lon_deg: regulatory_pos[r].lon_deg + 2.2 * theta.sin(),
                    }
                })
                .collect();
            Layout {
                utility_pos,
                regulatory_pos,
                regulatory_of_utility,
            }
        }
    }
}

fn disc_offset(id: &str) -> (f64, f64) {
    let (h1, h2) = hash_pair(id);
    let r = 0.05 + 0.25 * h1;
    let theta = std::f64::consts::TAU * h2;
    (r * theta.cos(), r * theta.sin())
}

fn utility_totals(case: BuiltinCase) -> Vec<u64> {
    match case {
        BuiltinCase::Act500 => SUBS_PER_UTILITY_500.to_vec(),
        BuiltinCase::Act2000 => SUBS_PER_UTILITY_2000.to_vec(),
        BuiltinCase::Act10k => {
            let raw: Vec<u64> = SUBS_PER_UTILITY_10K.iter().map(|&(n, _)| n).collect();
            let (g, t, _, _) = case.counts();
            apportion((g + t) as u64, &raw)
        }
    }
}

/// Builds the entity list for a built-in case.
pub fn synth_case(case: BuiltinCase) -> Vec<Entity> {
    let (gen_total, _, utility_count, regulatory_count) = case.counts();
    let totals = utility_totals(case);
    let gens = gen_split(gen_total as u64, &totals);
    let lay = layout(case);

    let multi_reg = regulatory_count > 1;
    let mut entities = Vec::new();
    for g in 0..regulatory_count {
        entities.push(Entity {
            id: format!("regulatory-{g}"),
            role: Role::Regulatory,
            utility_label: None,
            regulatory_label: None,
            coord: lay.regulatory_pos[g],
        });
    }
    let mut gen_seq = 0usize;
    let mut trans_seq = 0usize;
    for u in 0..utility_count {
        let uid = format!("utility-{u:02}");
        entities.push(Entity {
            id: uid.clone(),
            role: Role::Utility,
            utility_label: None,
            regulatory_label: if multi_reg {
                Some(format!("regulatory-{}", lay.regulatory_of_utility[u]))
            } else {
                None
            },
            coord: lay.utility_pos[u],
        });
        for j in 0..totals[u] {
            let (id, role) = if j < gens[u] {
                let id = format!("gen-sub-{gen_seq:04}");
                gen_seq += 1;
                (id, Role::GenerationSubstation)
            } else {
                let id = format!("trans-sub-{trans_seq:04}");
                trans_seq += 1;
                (id, Role::TransmissionSubstation)
            };
            let (dlat, dlon) = disc_offset(&id);
            entities.push(Entity {
                id,
                role,
                utility_label: Some(uid.clone()),
                regulatory_label: None,
                coord: GeoPoint {
                    lat_deg: lay.utility_pos[u].lat_deg + dlat,
                    lon_deg: lay.utility_pos[u].lon_deg + dlon,
                },
            });
        }
    }
    entities.sort_by(|a, b| a.id.cmp(&b.id));
    entities
}

/// Single-cell case: one generation substation, one transmission substation,
/// one utility, one regulatory unit.
pub fn one_cell_case() -> Vec<Entity> {
    let coord = |lat, lon| GeoPoint { lat_deg: lat, lon_deg: lon };
    vec![
        Entity {
            id: "gen-sub-0".into(),
            role: Role::GenerationSubstation,
            utility_label: Some("utility-0".into()),
            regulatory_label: None,
            coord: coord(34.9, -97.1),
        },
        Entity {
            id: "trans-sub-0".into(),
            role: Role::TransmissionSubstation,
            utility_label: Some("utility-0".into()),
            regulatory_label: None,
            coord: coord(35.05, -97.05),
        },
        Entity {
            id: "utility-0".into(),
            role: Role::Utility,
            utility_label: None,
            regulatory_label: None,
            coord: coord(35.1, -97.0),
        },
        Entity {
            id: "regulatory-0".into(),
            role: Role::Regulatory,
            utility_label: None,
            regulatory_label: None,
            coord: coord(35.3, -96.9),
        },
    ]
}

/// Five-router comparison fixture: four generator-fed routers aggregate into
/// one router that feeds the sink. Branch loads are staggered by packet size
/// so the per-router delay ordering is stable across seeds.
pub fn five_router_fixture() -> Topology {
    let mut nodes = Vec::new();
    let mut out_edges: Vec<Vec<u32>> = Vec::new();
    let add = |nodes: &mut Vec<Node>, out_edges: &mut Vec<Vec<u32>>, kind, entity: &str, role| {
        let idx = nodes.len() as u32;
        nodes.push(Node {
            id: element_id(kind, entity),
            entity: entity.to_string(),
            role,
            kind,
        });
        out_edges.push(Vec::new());
        idx
    };
    let r1 = add(&mut nodes, &mut out_edges, ElementKind::Router, "core-r1", Role::Utility);
    let sink = add(&mut nodes, &mut out_edges, ElementKind::Sink, "core-r1", Role::Utility);
    out_edges[r1 as usize].push(sink);
    for i in 2..=5 {
        let entity = format!("core-r{i}");
        let pg = add(&mut nodes, &mut out_edges, ElementKind::Generator, &entity, Role::TransmissionSubstation);
        let rt = add(&mut nodes, &mut out_edges, ElementKind::Router, &entity, Role::TransmissionSubstation);
        out_edges[pg as usize].push(rt);
        out_edges[rt as usize].push(r1);
    }
    let topo = Topology::from_parts(
        TopologyKind::Star,
        nodes,
        out_edges,
        Vec::new(),
        Default::default(),
        Default::default(),
    );
    topo.validate().expect("fixture is valid");
    topo
}

/// Mean packet size per feeder branch of the five-router fixture, in bytes.
pub fn five_router_branch_sizes() -> [(String, f64); 4] {
    [
        ("pg:core-r2".to_string(), 100.0),
        ("pg:core-r3".to_string(), 200.0),
        ("pg:core-r4".to_string(), 400.0),
        ("pg:core-r5".to_string(), 800.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_star, check_manifest, nearest_utility, CaseManifest};

    #[test]
    fn counts_match_manifest() {
        for case in [BuiltinCase::Act500, BuiltinCase::Act2000, BuiltinCase::Act10k] {
            let (g, t, u, r) = case.counts();
            let entities = synth_case(case);
            check_manifest(
                &entities,
                &CaseManifest { generation: g, transmission: t, utility: u, regulatory: r },
            )
            .unwrap();
        }
    }

    #[test]
    fn assignment_sizes_match_tables() {
        let entities = synth_case(BuiltinCase::Act2000);
        let topo = build_star(&entities).unwrap();
        for (u, want) in SUBS_PER_UTILITY_2000.iter().enumerate() {
            let id = format!("utility-{u:02}");
            assert_eq!(topo.substations_of(&id).len() as u64, *want, "{id}");
        }
        let entities = synth_case(BuiltinCase::Act500);
        let topo = build_star(&entities).unwrap();
        for (u, want) in SUBS_PER_UTILITY_500.iter().enumerate() {
            let id = format!("utility-{u:02}");
            assert_eq!(topo.substations_of(&id).len() as u64, *want, "{id}");
        }
    }

    #[test]
    fn nearest_utility_reproduces_assignment() {
        for case in [BuiltinCase::Act500, BuiltinCase::Act2000, BuiltinCase::Act10k] {
            let entities = synth_case(case);
            let utilities: Vec<Entity> = entities
                .iter()
                .filter(|e| e.role == Role::Utility)
                .cloned()
                .collect();
            for e in &entities {
                if e.role.is_substation() {
                    let got = nearest_utility(e, &utilities).unwrap();
                    assert_eq!(Some(got.id.as_str()), e.utility_label.as_deref(), "{}", e.id);
                }
            }
        }
    }

    #[test]
    fn star_substation_routers_feed_one_utility() {
        let topo = build_star(&synth_case(BuiltinCase::Act500)).unwrap();
        let mut sub_routers = 0;
        for (i, n) in topo.nodes().iter().enumerate() {
            if n.kind == ElementKind::Router && n.role.is_substation() {
                sub_routers += 1;
                let outs = topo.out(i as u32);
                assert_eq!(outs.len(), 1, "{}", n.id);
                assert_eq!(topo.node(outs[0]).role, Role::Utility);
            }
        }
        assert_eq!(sub_routers, 208);
    }

    #[test]
    fn ten_k_regulatory_jurisdictions() {
        let entities = synth_case(BuiltinCase::Act10k);
        let topo = build_star(&entities).unwrap();
        assert_eq!(topo.regulatory_of().len(), 80);
        let regs: std::collections::BTreeSet<&String> = topo.regulatory_of().values().collect();
        assert_eq!(regs.len(), 20);
    }

    #[test]
    fn synthesis_is_deterministic() {
        assert_eq!(synth_case(BuiltinCase::Act2000), synth_case(BuiltinCase::Act2000));
    }

    #[test]
    fn five_router_fixture_shape() {
        let topo = five_router_fixture();
        let routers = topo
            .nodes()
            .iter()
            .filter(|n| n.kind == ElementKind::Router)
            .count();
        assert_eq!(routers, 5);
        let generators = topo
            .nodes()
            .iter()
            .filter(|n| n.kind == ElementKind::Generator)
            .count();
        assert_eq!(generators, 4);
    }
}
