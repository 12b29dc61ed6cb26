use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Number, Value};

use super::GraphError;

/// Kind of a scalar property value, used by schema requirements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Text,
    Int,
    Real,
    Bool,
}

impl fmt::Display for ScalarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ScalarKind::Text => "text",
            ScalarKind::Int => "int",
            ScalarKind::Real => "real",
            ScalarKind::Bool => "bool",
        };
        f.write_str(s)
    }
}

/// A property value: a tagged scalar or a non-empty homogeneous list of scalars.
///
/// Reals may carry a unit tag such as `"K"`, `"mL"` or `"h"`.
#[derive(Debug, Clone, PartialEq)]
pub enum PropertyValue {
    Text(String),
    Int(i64),
    Real { value: f64, unit: Option<String> },
    Bool(bool),
    List(Vec<PropertyValue>),
}

impl PropertyValue {
    pub fn real(value: f64) -> Self {
        PropertyValue::Real { value, unit: None }
    }

    pub fn with_unit(value: f64, unit: impl Into<String>) -> Self {
        PropertyValue::Real {
            value,
            unit: Some(unit.into()),
        }
    }

    /// Scalar kind of the value, or of its elements for a list.
    pub fn kind(&self) -> ScalarKind {
        match self {
            PropertyValue::Text(_) => ScalarKind::Text,
            PropertyValue::Int(_) => ScalarKind::Int,
            PropertyValue::Real { .. } => ScalarKind::Real,
            PropertyValue::Bool(_) => ScalarKind::Bool,
            PropertyValue::List(items) => items.first().map(|v| v.kind()).unwrap_or(ScalarKind::Text),
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            PropertyValue::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Checks the unit-tag and list invariants.
    pub fn validate(&self) -> Result<(), GraphError> {
        match self {
            PropertyValue::Real { value, unit } => {
                if !value.is_finite() {
                    return Err(GraphError::InvalidValue("real values must be finite".into()));
                }
                if let Some(u) = unit {
                    if u.trim().is_empty() {
                        return Err(GraphError::InvalidValue("unit tag must be non-empty".into()));
                    }
                }
                Ok(())
            }
            PropertyValue::List(items) => {
                let first = items
                    .first()
                    .ok_or_else(|| GraphError::InvalidValue("lists must be non-empty".into()))?;
                let kind = first.kind();
                for item in items {
                    if matches!(item, PropertyValue::List(_)) {
                        return Err(GraphError::InvalidValue("nested lists are not allowed".into()));
                    }
                    if item.kind() != kind {
                        return Err(GraphError::InvalidValue(format!(
                            "list mixes {} and {}",
                            kind,
                            item.kind()
                        )));
                    }
                    item.validate()?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Canonical JSON form used by the graph export.
    ///
    /// Reals with a unit become `{"value": v, "unit": u}`; reals always keep a
    /// fractional part so they can be told apart from integers on import.
    pub fn to_json(&self) -> Value {
        match self {
            PropertyValue::Text(s) => Value::String(s.clone()),
            PropertyValue::Int(i) => json!(i),
            PropertyValue::Real { value, unit: None } => real_json(*value),
            PropertyValue::Real { value, unit: Some(u) } => {
                let mut m = Map::new();
                m.insert("unit".into(), Value::String(u.clone()));
                m.insert("value".into(), real_json(*value));
                Value::Object(m)
            }
            PropertyValue::Bool(b) => Value::Bool(*b),
            PropertyValue::List(items) => Value::Array(items.iter().map(|v| v.to_json()).collect()),
        }
    }

    pub fn from_json(value: &Value) -> Result<Self, GraphError> {
        let v = match value {
            Value::String(s) => PropertyValue::Text(s.clone()),
            Value::Bool(b) => PropertyValue::Bool(*b),
            Value::Number(n) => number_value(n)?,
            Value::Object(m) => {
                let raw = m
                    .get("value")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| GraphError::InvalidValue("unit-tagged real needs a numeric `value`".into()))?;
                let unit = m.get("unit").and_then(Value::as_str).map(str::to_owned);
                if m.keys().any(|k| k != "value" && k != "unit") {
                    return Err(GraphError::InvalidValue("unexpected key in unit-tagged real".into()));
                }
                PropertyValue::Real { value: raw, unit }
            }
            Value::Array(items) => PropertyValue::List(
                items
                    .iter()
                    .map(PropertyValue::from_json)
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            Value::Null => return Err(GraphError::InvalidValue("null property values are not allowed".into())),
        };
        v.validate()?;
        Ok(v)
    }
}

fn real_json(value: f64) -> Value {
    Number::from_f64(value).map(Value::Number).unwrap_or(Value::Null)
}

fn number_value(n: &Number) -> Result<PropertyValue, GraphError> {
    if let Some(i) = n.as_i64() {
        // serde_json keeps a fractional marker for floats, so an integral
        // token here really was written as an integer.
        if !n.is_f64() {
            return Ok(PropertyValue::Int(i));
        }
    }
    n.as_f64()
        .map(PropertyValue::real)
        .ok_or_else(|| GraphError::InvalidValue(format!("unsupported number {n}")))
}

impl fmt::Display for PropertyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyValue::Text(s) => f.write_str(s),
            PropertyValue::Int(i) => write!(f, "{i}"),
            PropertyValue::Real { value, unit: None } => write!(f, "{value}"),
            PropertyValue::Real { value, unit: Some(u) } => write!(f, "{value} {u}"),
            PropertyValue::Bool(b) => write!(f, "{b}"),
            PropertyValue::List(items) => {
                let parts: Vec<String> = items.iter().map(|v| v.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

impl From<&str> for PropertyValue {
    fn from(s: &str) -> Self {
        PropertyValue::Text(s.to_owned())
    }
}

impl From<String> for PropertyValue {
    fn from(s: String) -> Self {
        PropertyValue::Text(s)
    }
}

impl From<i64> for PropertyValue {
    fn from(i: i64) -> Self {
        PropertyValue::Int(i)
    }
}

impl From<f64> for PropertyValue {
    fn from(v: f64) -> Self {
        PropertyValue::real(v)
    }
}

impl From<bool> for PropertyValue {
    fn from(b: bool) -> Self {
        PropertyValue::Bool(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keeps_int_and_real_apart() {
        let int = PropertyValue::Int(10);
        let real = PropertyValue::real(10.0);
        assert_eq!(int.to_json().to_string(), "10");
        assert_eq!(real.to_json().to_string(), "10.0");
        assert_eq!(PropertyValue::from_json(&real.to_json()).unwrap(), real);
        assert_eq!(PropertyValue::from_json(&int.to_json()).unwrap(), int);
    }

    #[test]
    fn unit_tagged_real_round_trips() {
        let v = PropertyValue::with_unit(393.15, "K");
        assert_eq!(v.to_json().to_string(), r#"{"unit":"K","value":393.15}"#);
        assert_eq!(PropertyValue::from_json(&v.to_json()).unwrap(), v);
    }

    #[test]
    fn rejects_empty_unit_and_bad_lists() {
        assert!(PropertyValue::with_unit(1.0, " ").validate().is_err());
        assert!(PropertyValue::List(vec![]).validate().is_err());
        let mixed = PropertyValue::List(vec![PropertyValue::Int(1), "a".into()]);
        assert!(mixed.validate().is_err());
        let nested = PropertyValue::List(vec![PropertyValue::List(vec![1i64.into()])]);
        assert!(nested.validate().is_err());
        assert!(PropertyValue::List(vec!["a".into(), "b".into()]).validate().is_ok());
    }
}
