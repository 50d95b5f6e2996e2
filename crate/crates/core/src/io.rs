//! JSON and CSV formats for instances and allocations.
//!
//! Instance JSON:
//!
//! ```json
//! {"agents": 2, "items": ["a", "b"],
//!  "utilities": {"type": "additive", "matrix": [[1, "1/2"], [-1, 0]]}}
//! ```
//!
//! General utilities use `{"type": "general", "tables": [[...2^m values...]]}`,
//! indexed by the bundle bitmask over the item order. Allocation JSON is
//! `{"bundles": [["a"], ["b"]]}`.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Allocation, Instance, UtilityModel};
use crate::rational::Rational;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceJson {
    pub agents: usize,
    pub items: Vec<String>,
    pub utilities: UtilityModel,
}

impl From<&Instance> for InstanceJson {
    fn from(inst: &Instance) -> Self {
        InstanceJson {
            agents: inst.agents(),
            items: inst.labels().to_vec(),
            utilities: inst.utilities().clone(),
        }
    }
}

impl TryFrom<InstanceJson> for Instance {
    type Error = Error;

    fn try_from(json: InstanceJson) -> Result<Instance> {
        Instance::new(json.agents, json.items, json.utilities)
    }
}

impl Serialize for Instance {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        InstanceJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = InstanceJson::deserialize(deserializer)?;
        Instance::try_from(json).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationJson {
    pub bundles: Vec<Vec<String>>,
}

impl AllocationJson {
    pub fn new(inst: &Instance, alloc: &Allocation) -> Self {
        AllocationJson {
            bundles: alloc.to_labels(inst),
        }
    }

    pub fn resolve(&self, inst: &Instance) -> Result<Allocation> {
        let bundles = self
            .bundles
            .iter()
            .map(|labels| {
                let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
                let bundle = inst.bundle_of(&refs)?;
                if bundle.len() != labels.len() {
                    return Err(Error::InvalidAllocation(format!(
                        "item listed twice in bundle {labels:?}"
                    )));
                }
                Ok(bundle)
            })
            .collect::<Result<Vec<_>>>()?;
        Allocation::for_instance(inst, bundles)
    }
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(inst).expect("instance serializes")
}

pub fn allocation_from_json(inst: &Instance, text: &str) -> Result<Allocation> {
    let json: AllocationJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    json.resolve(inst)
}

/// Additive instance from CSV: a header row of item labels, then one row
/// of utilities per agent.
pub fn instance_from_csv<R: Read>(reader: R) -> Result<Instance> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let items: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let row = record
            .iter()
            .map(|cell| cell.parse::<Rational>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Instance::additive(items, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Bundle;

    #[test]
    fn additive_json_round_trip() {
        let text = r#"{"agents": 2, "items": ["a", "b"],
            "utilities": {"type": "additive", "matrix": [[1, "1/2"], [-1.5, 0]]}}"#;
        let inst = instance_from_json(text).unwrap();
        assert_eq!(inst.bundle_utility(1, Bundle::full(2)), Rational::new(-3, 2));
        let again = instance_from_json(&instance_to_json(&inst)).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn general_json_requires_full_tables() {
        let ok = r#"{"agents": 2, "items": ["a"],
            "utilities": {"type": "general", "tables": [[0, 1], [0, "2/3"]]}}"#;
        assert!(instance_from_json(ok).is_ok());
        let partial = r#"{"agents": 2, "items": ["a", "b"],
            "utilities": {"type": "general", "tables": [[0, 1, 2], [0, 1, 2, 3]]}}"#;
        assert!(matches!(instance_from_json(partial), Err(Error::Parse(_))));
    }

    #[test]
    fn agent_count_must_match() {
        let text = r#"{"agents": 3, "items": ["a"],
            "utilities": {"type": "additive", "matrix": [[1], [2]]}}"#;
        assert!(instance_from_json(text).is_err());
    }

    #[test]
    fn allocation_json() {
        let inst = Instance::additive_int(["a", "b", "c"], &[&[1, 2, 3], &[1, 2, 3]]).unwrap();
        let alloc = allocation_from_json(&inst, r#"{"bundles": [["a", "c"], ["b"]]}"#).unwrap();
        assert_eq!(alloc.bundle(0), Bundle::from_items([0, 2]));
        let json = serde_json::to_string(&AllocationJson::new(&inst, &alloc)).unwrap();
        assert_eq!(json, r#"{"bundles":[["a","c"],["b"]]}"#);
        assert!(allocation_from_json(&inst, r#"{"bundles": [["a", "a"], ["b", "c"]]}"#).is_err());
        assert!(allocation_from_json(&inst, r#"{"bundles": [["a"], ["b"]]}"#).is_err());
        assert!(allocation_from_json(&inst, r#"{"bundles": [["a", "z"], ["b", "c"]]}"#).is_err());
    }

    #[test]
    fn csv_loader() {
        let csv = "a,b,c\n1,1,-4\n-1,-1/2,0\n";
        let inst = instance_from_csv(csv.as_bytes()).unwrap();
        assert_eq!(inst.agents(), 2);
        assert_eq!(inst.labels(), &["a", "b", "c"]);
        assert_eq!(inst.bundle_utility(1, Bundle::full(3)), Rational::new(-3, 2));
        assert!(instance_from_csv("a,b\n1,x\n2,2\n".as_bytes()).is_err());
    }
}
