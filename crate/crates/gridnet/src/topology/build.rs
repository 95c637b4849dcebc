//! Star, radial, and hybrid wiring of the element graph.
//!
//! Star: every substation router links straight to its utility router.
//! Radial: generation substations feed the nearest transmission substation in
//! the same region, transmission routers feed the utility. In both, the
//! utility router branches with equal probability to the utility sink or the
//! regulatory router of its jurisdiction.

use std::collections::BTreeMap;

use super::{element_id, ElementKind, Entity, GeoPoint, Node, Role, Topology, TopologyError, TopologyKind};

const EARTH_RADIUS_KM: f64 = 6371.0088;

/// Great-circle distance between two coordinates, in kilometres.
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let lat1 = a.lat_deg.to_radians();
    let lat2 = b.lat_deg.to_radians();
    let dlat = (b.lat_deg - a.lat_deg).to_radians();
    let dlon = (b.lon_deg - a.lon_deg).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().asin()
}

/// Utility closest to `sub` by great-circle distance, ties to the lowest id.
pub fn nearest_utility<'a>(
    sub: &Entity,
    utilities: &'a [Entity],
) -> Result<&'a Entity, TopologyError> {
    let mut best: Option<(&Entity, f64)> = None;
    for u in utilities {
        let d = haversine_km(sub.coord, u.coord);
        let better = match best {
            None => true,
            Some((bu, bd)) => d < bd || (d == bd && u.id < bu.id),
        };
        if better {
            best = Some((u, d));
        }
    }
    best.map(|(u, _)| u).ok_or(TopologyError::NoUtilities)
}

/// Eq.-style hybrid decision: star only when the star severity is strictly
/// lower; ties default to radial.
pub fn hybrid_choice(severity_star: u8, severity_radial: u8) -> TopologyKind {
    if severity_star < severity_radial {
        TopologyKind::Star
    } else {
        TopologyKind::Radial
    }
}

struct Builder {
    nodes: Vec<Node>,
    out_edges: Vec<Vec<u32>>,
    monitors: Vec<(u32, u32)>,
    index: BTreeMap<String, u32>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            nodes: Vec::new(),
            out_edges: Vec::new(),
            monitors: Vec::new(),
            index: BTreeMap::new(),
        }
    }

    fn add(&mut self, kind: ElementKind, entity: &Entity) -> u32 {
        let id = element_id(kind, &entity.id);
        debug_assert!(!self.index.contains_key(&id), "duplicate element {id}");
        let idx = self.nodes.len() as u32;
        self.nodes.push(Node {
            id: id.clone(),
            entity: entity.id.clone(),
            role: entity.role,
            kind,
        });
        self.out_edges.push(Vec::new());
        self.index.insert(id, idx);
        idx
    }

    fn connect(&mut self, from: u32, to: u32) {
        debug_assert_ne!(from, to);
        self.out_edges[from as usize].push(to);
    }

    fn finish(
        self,
        kind: TopologyKind,
        utility_of: BTreeMap<String, String>,
        regulatory_of: BTreeMap<String, String>,
    ) -> Result<Topology, TopologyError> {
        let topo = Topology::from_parts(
            kind,
            self.nodes,
            self.out_edges,
            self.monitors,
            utility_of,
            regulatory_of,
        );
        topo.validate()?;
        Ok(topo)
    }
}

struct Grouped<'a> {
    substations: Vec<&'a Entity>,
    utilities: Vec<&'a Entity>,
    regulatories: Vec<&'a Entity>,
    /// substation entity id -> utility entity id
    utility_of: BTreeMap<String, String>,
    /// utility entity id -> regulatory entity id
    regulatory_of: BTreeMap<String, String>,
}

fn group(entities: &[Entity]) -> Result<Grouped<'_>, TopologyError> {
    if entities.is_empty() {
        return Err(TopologyError::EmptyCase);
    }
    let mut sorted: Vec<&Entity> = entities.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));

    let substations: Vec<&Entity> = sorted.iter().copied().filter(|e| e.role.is_substation()).collect();
    let utilities: Vec<&Entity> = sorted.iter().copied().filter(|e| e.role == Role::Utility).collect();
    let regulatories: Vec<&Entity> = sorted.iter().copied().filter(|e| e.role == Role::Regulatory).collect();
    if utilities.is_empty() {
        return Err(TopologyError::NoUtilities);
    }

    let utility_ids: BTreeMap<&str, ()> = utilities.iter().map(|u| (u.id.as_str(), ())).collect();
    let mut utility_of = BTreeMap::new();
    for s in &substations {
        let label = s
            .utility_label
            .as_deref()
            .ok_or_else(|| TopologyError::UnresolvedUtility(s.id.clone()))?;
        if !utility_ids.contains_key(label) {
            return Err(TopologyError::UnresolvedUtility(s.id.clone()));
        }
        utility_of.insert(s.id.clone(), label.to_string());
    }

    let mut regulatory_of = BTreeMap::new();
    for u in &utilities {
        let reg = match (&u.regulatory_label, regulatories.len()) {
            (Some(r), _) => {
                if !regulatories.iter().any(|g| g.id == *r) {
                    return Err(TopologyError::Schema(format!(
                        "utility {} names unknown regulatory {r}",
                        u.id
                    )));
                }
                r.clone()
            }
            (None, 1) => regulatories[0].id.clone(),
            (None, _) => {
                return Err(TopologyError::Schema(format!(
                    "utility {} lacks a regulatory label in a multi-regulatory case",
                    u.id
                )))
            }
        };
        regulatory_of.insert(u.id.clone(), reg);
    }

    Ok(Grouped {
        substations,
        utilities,
        regulatories,
        utility_of,
        regulatory_of,
    })
}

/// Wires the utility and regulatory tier shared by all topology kinds and
/// returns the utility-router index per utility id.
fn wire_control_tier(b: &mut Builder, g: &Grouped<'_>) -> BTreeMap<String, u32> {
    let mut reg_router = BTreeMap::new();
    for r in &g.regulatories {
        let rt = b.add(ElementKind::Router, r);
        let sink = b.add(ElementKind::Sink, r);
        let mon = b.add(ElementKind::Monitor, r);
        b.connect(rt, sink);
        b.monitors.push((mon, rt));
        reg_router.insert(r.id.clone(), rt);
    }
    let mut utility_router = BTreeMap::new();
    for u in &g.utilities {
        let rt = b.add(ElementKind::Router, u);
        let brancher = b.add(ElementKind::Brancher, u);
        let sink = b.add(ElementKind::Sink, u);
        let mon = b.add(ElementKind::Monitor, u);
        b.connect(rt, brancher);
        // Equal-probability split: first branch stores locally, second
        // forwards to the jurisdiction's regulatory router.
        b.connect(brancher, sink);
        let reg = &g.regulatory_of[&u.id];
        b.connect(brancher, reg_router[reg]);
        b.monitors.push((mon, rt));
        utility_router.insert(u.id.clone(), rt);
    }
    utility_router
}

fn wire_substation_star(b: &mut Builder, sub: &Entity, utility_router: u32) {
    let pg = b.add(ElementKind::Generator, sub);
    let rt = b.add(ElementKind::Router, sub);
    b.connect(pg, rt);
    b.connect(rt, utility_router);
}

/// All substation routers link straight to their utility router.
pub fn build_star(entities: &[Entity]) -> Result<Topology, TopologyError> {
    let g = group(entities)?;
    let mut b = Builder::new();
    let utility_router = wire_control_tier(&mut b, &g);
    for sub in &g.substations {
        let util = &g.utility_of[&sub.id];
        wire_substation_star(&mut b, sub, utility_router[util]);
    }
    b.finish(TopologyKind::Star, g.utility_of.clone(), g.regulatory_of.clone())
}

fn wire_region_radial(
    b: &mut Builder,
    utility_id: &str,
    utility_router: u32,
    subs: &[&Entity],
) -> Result<(), TopologyError> {
    let trans: Vec<&Entity> = subs
        .iter()
        .copied()
        .filter(|s| s.role == Role::TransmissionSubstation)
        .collect();
    if trans.is_empty() {
        return Err(TopologyError::NoTransmissionInRegion(utility_id.to_string()));
    }
    // Every transmission substation carries its own generator and feeds the
    // utility router; those without generation neighbours still source
    // traffic this way.
    let mut trans_router = BTreeMap::new();
    for t in &trans {
        let pg = b.add(ElementKind::Generator, t);
        let rt = b.add(ElementKind::Router, t);
        b.connect(pg, rt);
        b.connect(rt, utility_router);
        trans_router.insert(t.id.clone(), rt);
    }
    for s in subs {
        if s.role != Role::GenerationSubstation {
            continue;
        }
        let mut best: Option<(&Entity, f64)> = None;
        for t in &trans {
            let d = haversine_km(s.coord, t.coord);
            let better = match best {
                None => true,
                Some((bt, bd)) => d < bd || (d == bd && t.id < bt.id),
            };
            if better {
                best = Some((t, d));
            }
        }
        let (nearest, _) = best.expect("region has transmission substations");
        let pg = b.add(ElementKind::Generator, s);
        let rt = b.add(ElementKind::Router, s);
        b.connect(pg, rt);
        b.connect(rt, trans_router[&nearest.id]);
    }
    Ok(())
}

/// Generation routers feed the nearest in-region transmission router, which
/// feeds the utility router.
pub fn build_radial(entities: &[Entity]) -> Result<Topology, TopologyError> {
    let g = group(entities)?;
    let mut b = Builder::new();
    let utility_router = wire_control_tier(&mut b, &g);
    for u in &g.utilities {
        let subs: Vec<&Entity> = g
            .substations
            .iter()
            .copied()
            .filter(|s| g.utility_of[&s.id] == u.id)
            .collect();
        if subs.is_empty() {
            continue;
        }
        wire_region_radial(&mut b, &u.id, utility_router[&u.id], &subs)?;
    }
    b.finish(TopologyKind::Radial, g.utility_of.clone(), g.regulatory_of.clone())
}

/// Per-utility wiring choice driven by severity pairs from star and radial
/// sweeps; ties fall back to radial.
pub fn build_hybrid(
    entities: &[Entity],
    severity_star: &BTreeMap<String, u8>,
    severity_radial: &BTreeMap<String, u8>,
) -> Result<Topology, TopologyError> {
    let g = group(entities)?;
    let mut b = Builder::new();
    let utility_router = wire_control_tier(&mut b, &g);
    for u in &g.utilities {
        let r_s = *severity_star
            .get(&u.id)
            .ok_or_else(|| TopologyError::MissingUtilityInReport(u.id.clone()))?;
        let r_r = *severity_radial
            .get(&u.id)
            .ok_or_else(|| TopologyError::MissingUtilityInReport(u.id.clone()))?;
        let subs: Vec<&Entity> = g
            .substations
            .iter()
            .copied()
            .filter(|s| g.utility_of[&s.id] == u.id)
            .collect();
        match hybrid_choice(r_s, r_r) {
            TopologyKind::Star => {
                for sub in &subs {
                    wire_substation_star(&mut b, sub, utility_router[&u.id]);
                }
            }
            _ => {
                if !subs.is_empty() {
                    wire_region_radial(&mut b, &u.id, utility_router[&u.id], &subs)?;
                }
            }
        }
    }
    b.finish(TopologyKind::Hybrid, g.utility_of.clone(), g.regulatory_of.clone())
}
