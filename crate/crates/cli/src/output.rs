//! Result documents: a manifest plus a command-specific payload, rendered as
//! JSON or as CSV rows under a commented manifest header.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub seed: u64,
    pub shards: usize,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Document {
    pub manifest: Manifest,
    pub results: Value,
}

impl Document {
    pub fn new(manifest: Manifest, mut results: Value) -> Self {
        round_floats(&mut results);
        Self { manifest, results }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("document serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
        }
    }

    fn to_csv(&self) -> String {
        let m = &self.manifest;
        let mut out = String::new();
        out.push_str(&format!("# command: {}\n", m.command));
        out.push_str(&format!(
            "# parameters: {}\n",
            serde_json::to_string(&m.parameters).expect("parameters serialize")
        ));
        out.push_str(&format!("# seed: {}\n", m.seed));
        out.push_str(&format!("# shards: {}\n", m.shards));
        out.push_str(&format!("# tool_version: {}\n", m.tool_version));
        out.push_str("quantity,value\n");
        let mut rows = Vec::new();
        flatten("", &self.results, &mut rows);
        for (k, v) in rows {
            out.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&v)));
        }
        out
    }
}

/// Rounds a float to 9 significant digits.
pub fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = sig9(n.as_f64().expect("f64"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&key(k), child, rows);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), child, rows);
            }
        }
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn doc(results: Value) -> Document {
        let mut parameters = Map::new();
        parameters.insert("trials".into(), json!(10));
        Document::new(
            Manifest {
                command: "test".into(),
                parameters,
                seed: 0,
                shards: 1,
                tool_version: TOOL_VERSION.into(),
            },
            results,
        )
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(2f64.sqrt() * 2.0), 2.82842712);
        assert_eq!(sig9(0.853_553_390_593_273_8), 0.853553391);
        assert_eq!(sig9(1.0), 1.0);
        assert_eq!(sig9(-1.234_567_891_23e-7), -1.23456789e-7);
        assert_eq!(sig9(0.0), 0.0);
    }

    #[test]
    fn floats_are_rounded_and_integers_kept() {
        let d = doc(json!({"b": 2.0 * 2f64.sqrt(), "n": 12345678901u64, "v": [0.1 + 0.2]}));
        assert_eq!(d.results["b"], json!(2.82842712));
        assert_eq!(d.results["n"], json!(12345678901u64));
        assert_eq!(d.results["v"][0], json!(0.3));
    }

    #[test]
    fn csv_layout() {
        let d = doc(json!({"a": {"x": 1.5, "tag": "p,q"}, "list": [1, 2], "none": null}));
        let csv = d.render(Format::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# command: test");
        assert_eq!(lines[1], "# parameters: {\"trials\":10}");
        assert_eq!(lines[5], "quantity,value");
        assert_eq!(
            &lines[6..],
            ["a.x,1.5", "a.tag,\"p,q\"", "list.0,1", "list.1,2", "none,"]
        );
    }

    #[test]
    fn json_round_trips() {
        let d = doc(json!({"value": 1.0}));
        let back: Value = serde_json::from_str(&d.render(Format::Json)).unwrap();
        assert_eq!(back["manifest"]["command"], "test");
        assert_eq!(back["results"]["value"], json!(1.0));
    }
}
