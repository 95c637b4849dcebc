//! JSON case ingestion.
//!
//! A case file maps case names to entity groups:
//!
//! ```json
//! {
//!   "demo": {
//!     "substations": [{"id": "s1", "type": "gen", "utility": "u1", "lat": 35.0, "lon": -97.0}],
//!     "utilities": [{"id": "u1", "regulatory": "r1", "lat": 35.2, "lon": -97.1}],
//!     "regulatories": [{"id": "r1", "lat": 35.4, "lon": -97.2}]
//!   }
//! }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Entity, GeoPoint, Role, TopologyError};

#[derive(Debug, Serialize, Deserialize)]
struct SubstationRow {
    id: String,
    #[serde(rename = "type")]
    kind: String,
    utility: String,
    lat: f64,
    lon: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct UtilityRow {
    id: String,
    #[serde(default)]
    regulatory: Option<String>,
    lat: f64,
    lon: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RegulatoryRow {
    id: String,
    lat: f64,
    lon: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CaseBody {
    substations: Vec<SubstationRow>,
    utilities: Vec<UtilityRow>,
    regulatories: Vec<RegulatoryRow>,
}

/// Expected entity counts per case, used to sanity-check loads.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseManifest {
    pub generation: usize,
    pub transmission: usize,
    pub utility: usize,
    pub regulatory: usize,
}

fn coord(id: &str, lat: f64, lon: f64) -> Result<GeoPoint, TopologyError> {
    if !lat.is_finite() || !lon.is_finite() {
        return Err(TopologyError::Schema(format!("{id}: non-finite coordinate")));
    }
    Ok(GeoPoint { lat_deg: lat, lon_deg: lon })
}

fn entities_from_body(body: CaseBody) -> Result<Vec<Entity>, TopologyError> {
    let mut out = Vec::new();
    for s in body.substations {
        let role = match s.kind.as_str() {
            "gen" => Role::GenerationSubstation,
            "trans" => Role::TransmissionSubstation,
            other => {
                return Err(TopologyError::Schema(format!(
                    "substation {}: unknown type {other:?}",
                    s.id
                )))
            }
        };
        if s.utility.is_empty() {
            return Err(TopologyError::Schema(format!("substation {}: empty utility", s.id)));
        }
        out.push(Entity {
            coord: coord(&s.id, s.lat, s.lon)?,
            id: s.id,
            role,
            utility_label: Some(s.utility),
            regulatory_label: None,
        });
    }
    let multi_regulatory = body.regulatories.len() > 1;
    for u in body.utilities {
        if multi_regulatory && u.regulatory.is_none() {
            return Err(TopologyError::Schema(format!(
                "utility {}: regulatory label required in multi-regulatory case",
                u.id
            )));
        }
        out.push(Entity {
            coord: coord(&u.id, u.lat, u.lon)?,
            id: u.id,
            role: Role::Utility,
            utility_label: None,
            regulatory_label: u.regulatory,
        });
    }
    for r in body.regulatories {
        out.push(Entity {
            coord: coord(&r.id, r.lat, r.lon)?,
            id: r.id,
            role: Role::Regulatory,
            utility_label: None,
            regulatory_label: None,
        });
    }
    if out.is_empty() {
        return Err(TopologyError::EmptyCase);
    }
    let mut ids: Vec<&str> = out.iter().map(|e| e.id.as_str()).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(TopologyError::Schema("duplicate entity id".to_string()));
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

/// Loads one case from a JSON case file, entities sorted by id.
pub fn load_topology(path: &Path, case_name: &str) -> Result<Vec<Entity>, TopologyError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| TopologyError::Parse(format!("{}: {e}", path.display())))?;
    parse_case(&text, case_name)
}

pub(crate) fn parse_case(text: &str, case_name: &str) -> Result<Vec<Entity>, TopologyError> {
    let mut cases: BTreeMap<String, CaseBody> =
        serde_json::from_str(text).map_err(|e| TopologyError::Parse(e.to_string()))?;
    let body = cases
        .remove(case_name)
        .ok_or_else(|| TopologyError::Schema(format!("case {case_name:?} not present")))?;
    entities_from_body(body)
}

/// Writes entities back out in the case-file schema.
pub fn write_case_json(entities: &[Entity], case_name: &str) -> serde_json::Value {
    let mut substations = Vec::new();
    let mut utilities = Vec::new();
    let mut regulatories = Vec::new();
    for e in entities {
        match e.role {
            Role::GenerationSubstation | Role::TransmissionSubstation => substations.push(serde_json::json!({
                "id": e.id,
                "type": if e.role == Role::GenerationSubstation { "gen" } else { "trans" },
                "utility": e.utility_label.clone().unwrap_or_default(),
                "lat": e.coord.lat_deg,
                "lon": e.coord.lon_deg,
            })),
            Role::Utility => utilities.push(serde_json::json!({
                "id": e.id,
                "regulatory": e.regulatory_label,
                "lat": e.coord.lat_deg,
                "lon": e.coord.lon_deg,
            })),
            Role::Regulatory => regulatories.push(serde_json::json!({
                "id": e.id,
                "lat": e.coord.lat_deg,
                "lon": e.coord.lon_deg,
            })),
        }
    }
    serde_json::json!({
        case_name: {
            "substations": substations,
            "utilities": utilities,
            "regulatories": regulatories,
        }
    })
}

/// Loads the manifest of expected entity counts per case.
pub fn load_manifest(text: &str) -> Result<BTreeMap<String, CaseManifest>, TopologyError> {
    serde_json::from_str(text).map_err(|e| TopologyError::Parse(e.to_string()))
}

/// Checks loaded entities against the manifest row for the case.
pub fn check_manifest(entities: &[Entity], manifest: &CaseManifest) -> Result<(), TopologyError> {
    let count = |role: Role| entities.iter().filter(|e| e.role == role).count();
    let got = (
        count(Role::GenerationSubstation),
        count(Role::TransmissionSubstation),
        count(Role::Utility),
        count(Role::Regulatory),
    );
    let want = (
        manifest.generation,
        manifest.transmission,
        manifest.utility,
        manifest.regulatory,
    );
    if got != want {
        return Err(TopologyError::Schema(format!(
            "entity counts {got:?} do not match manifest {want:?}"
        )));
    }
    Ok(())
}
