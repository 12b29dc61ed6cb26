pub mod bench;
pub mod eval;
pub mod extract;
pub mod ingest;
pub mod predict;
pub mod query;
pub mod train;

/// Parses a unit enum variant from its serialized name.
pub fn serde_enum<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|e| e.to_string())
}
