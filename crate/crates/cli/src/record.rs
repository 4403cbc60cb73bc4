use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Version string baked in at build time, `git describe` style.
pub const VERSION: &str = env!("VNCERT_VERSION");

/// Top-level JSON document emitted by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub version: String,
    pub config: Value,
    pub duration_s: f64,
    pub result: Value,
}

impl RunRecord {
    pub fn new(command: &str, config: Value, duration_s: f64, result: Value) -> Self {
        RunRecord {
            command: command.to_string(),
            version: VERSION.to_string(),
            config,
            duration_s,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records contain only JSON-safe values")
    }
}

/// Names the top-level keys must have, with their JSON types.
pub const SCHEMA_KEYS: [(&str, &str); 5] = [
    ("command", "string"),
    ("version", "string"),
    ("config", "object"),
    ("duration_s", "number"),
    ("result", "object"),
];

/// Checks a parsed document against the published record schema.
pub fn validate_record(doc: &Value) -> Result<(), String> {
    let obj = doc.as_object().ok_or("record is not a JSON object")?;
    for (key, ty) in SCHEMA_KEYS {
        let v = obj.get(key).ok_or_else(|| format!("missing key {key}"))?;
        let ok = match ty {
            "string" => v.is_string(),
            "object" => v.is_object(),
            "number" => v.as_f64().is_some_and(|x| x >= 0.0),
            _ => false,
        };
        if !ok {
            return Err(format!("key {key} is not a {ty}"));
        }
    }
    if let Some(extra) = obj
        .keys()
        .find(|k| !SCHEMA_KEYS.iter().any(|(n, _)| n == k))
    {
        return Err(format!("unexpected key {extra}"));
    }
    Ok(())
}
