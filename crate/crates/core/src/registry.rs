//! Profile registry: builtin chips, JSON ingestion and name-keyed merging.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::soc::{builtin_dimensity_9300, builtin_sd8_gen3, builtin_xr2_gen2, SocProfile};

/// Immutable-after-construction collection of profiles, keyed by name.
/// Iteration order is name-sorted, so every listing derived from a registry
/// is deterministic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SocRegistry {
    profiles: BTreeMap<String, SocProfile>,
}

/// A parsed profile file: the profiles it carries and whether they may
/// replace same-named entries when merged into a registry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub profiles: Vec<SocProfile>,
    #[serde(rename = "override", default)]
    pub override_existing: bool,
}

impl SocRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&SocProfile> {
        self.profiles.get(name)
    }

    /// Lookup that reports the missing name.
    pub fn resolve(&self, name: &str) -> Result<&SocProfile> {
        self.profiles.get(name).ok_or_else(|| Error::UnknownSoc {
            name: name.to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    /// Profiles in name order.
    pub fn iter(&self) -> impl Iterator<Item = &SocProfile> {
        self.profiles.values()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.profiles.keys().map(String::as_str)
    }

    /// Validates and inserts one profile. Without `replace`, a name
    /// collision is a [`Error::DuplicateName`].
    pub fn insert(&mut self, profile: SocProfile, replace: bool) -> Result<()> {
        profile.validate()?;
        if !replace && self.profiles.contains_key(&profile.name) {
            return Err(Error::DuplicateName {
                name: profile.name.clone(),
            });
        }
        self.profiles.insert(profile.name.clone(), profile);
        Ok(())
    }

    /// Merges a parsed document, honoring its override flag.
    pub fn merge_document(&mut self, doc: &ProfileDocument) -> Result<()> {
        for profile in &doc.profiles {
            self.insert(profile.clone(), doc.override_existing)?;
        }
        Ok(())
    }
}

/// The three chips the simulator knows out of the box.
pub fn builtin_profiles() -> SocRegistry {
    let mut registry = SocRegistry::empty();
    for profile in [builtin_xr2_gen2(), builtin_sd8_gen3(), builtin_dimensity_9300()] {
        registry
            .insert(profile, false)
            .expect("builtin profiles satisfy all invariants");
    }
    registry
}

/// Parses a profile document into a registry of exactly its own profiles.
///
/// Strict mode (the default) rejects unknown fields; `lenient` ignores
/// them. Numeric fields may be given either as a number or as
/// `{"low": a, "high": b}`, which loads as the midpoint.
pub fn parse_profiles(text: &str, lenient: bool) -> Result<SocRegistry> {
    let doc = parse_profile_document(text, lenient)?;
    let mut registry = SocRegistry::empty();
    for profile in doc.profiles {
        registry.insert(profile, false)?;
    }
    Ok(registry)
}

/// Parses and validates a profile document without merging it anywhere.
pub fn parse_profile_document(text: &str, lenient: bool) -> Result<ProfileDocument> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        message: e.to_string(),
    })?;
    collapse_ranges(&mut value);
    if !lenient {
        check_document_keys(&value)?;
    }
    let doc: ProfileDocument = serde_json::from_value(value).map_err(|e| Error::Syntax {
        message: e.to_string(),
    })?;
    let mut seen = std::collections::BTreeSet::new();
    for profile in &doc.profiles {
        profile.validate()?;
        if !seen.insert(profile.name.clone()) {
            return Err(Error::DuplicateName {
                name: profile.name.clone(),
            });
        }
    }
    Ok(doc)
}

/// Serializes a registry as a profile document. Parsing the output yields
/// an identical registry.
pub fn serialize_profiles(registry: &SocRegistry) -> String {
    let doc = ProfileDocument {
        profiles: registry.iter().cloned().collect(),
        override_existing: false,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("profiles serialize to JSON");
    out.push('\n');
    out
}

/// Replaces every `{"low": a, "high": b}` object with its midpoint, the
/// default reading of ranged values; sensitivity runs supply explicit
/// endpoints as separate documents.
fn collapse_ranges(value: &mut Value) {
    match value {
        Value::Object(map) => {
            let is_range = map.len() == 2
                && map.get("low").is_some_and(Value::is_number)
                && map.get("high").is_some_and(Value::is_number);
            if is_range {
                let low = map["low"].as_f64().unwrap();
                let high = map["high"].as_f64().unwrap();
                *value = Value::from((low + high) / 2.0);
            } else {
                for v in map.values_mut() {
                    collapse_ranges(v);
                }
            }
        }
        Value::Array(items) => {
            for v in items {
                collapse_ranges(v);
            }
        }
        _ => {}
    }
}

const ROOT_KEYS: &[&str] = &["profiles", "override"];
const PROFILE_KEYS: &[&str] = &[
    "name",
    "process_node",
    "cpu_clusters",
    "gpu",
    "memory_bandwidth_gbps",
    "tdp_sustained_w",
    "tdp_peak_w",
    "total_ram_gb",
    "dev_accessible_ram_gb",
    "benchmarks",
    "thermal",
    "encoder_efficiency",
];
const CLUSTER_KEYS: &[&str] = &["core_name", "count", "clock_ghz"];
const GPU_KEYS: &[&str] = &["name", "clock_mhz", "gflops"];
const BENCHMARK_KEYS: &[&str] = &[
    "geekbench6_single",
    "geekbench6_multi",
    "antutu10",
    "gfxbench_aztec_1080p_fps",
    "estimated",
];
const THERMAL_KEYS: &[&str] = &[
    "thermal_resistance_k_per_w",
    "thermal_capacitance_j_per_k",
    "ambient_c",
    "throttle_temp_c",
    "idle_power_w",
    "cpu_max_power_w",
    "gpu_max_power_w",
];

pub(crate) fn check_object_keys(value: &Value, allowed: &[&str], context: &str) -> Result<()> {
    if let Value::Object(map) = value {
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Validation {
                    context: context.to_string(),
                    field: key.clone(),
                    invariant: "field is part of the schema".to_string(),
                });
            }
        }
    }
    Ok(())
}

fn check_document_keys(value: &Value) -> Result<()> {
    check_object_keys(value, ROOT_KEYS, "profile document")?;
    let Some(profiles) = value.get("profiles").and_then(Value::as_array) else {
        return Ok(());
    };
    for (i, profile) in profiles.iter().enumerate() {
        let ctx = profile
            .get("name")
            .and_then(Value::as_str)
            .map(|n| format!("profile `{n}`"))
            .unwrap_or_else(|| format!("profiles[{i}]"));
        check_object_keys(profile, PROFILE_KEYS, &ctx)?;
        if let Some(clusters) = profile.get("cpu_clusters").and_then(Value::as_array) {
            for cluster in clusters {
                check_object_keys(cluster, CLUSTER_KEYS, &ctx)?;
            }
        }
        if let Some(gpu) = profile.get("gpu") {
            check_object_keys(gpu, GPU_KEYS, &ctx)?;
        }
        if let Some(benchmarks) = profile.get("benchmarks") {
            check_object_keys(benchmarks, BENCHMARK_KEYS, &ctx)?;
        }
        if let Some(thermal) = profile.get("thermal") {
            check_object_keys(thermal, THERMAL_KEYS, &ctx)?;
        }
    }
    Ok(())
}
