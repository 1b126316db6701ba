//! The output object every subcommand produces, and its text rendering.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub label: String,
    /// The witness word in the caller's own letters.
    pub text: String,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Envelope {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub witnesses: Vec<Witness>,
    pub stats: Map<String, Value>,
}

impl Envelope {
    pub fn new(command: &str) -> Self {
        Envelope {
            command: command.to_string(),
            inputs: Map::new(),
            result: Value::Null,
            witnesses: Vec::new(),
            stats: Map::new(),
        }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        self.inputs.insert(key.to_string(), json(value));
        self
    }

    pub fn result(mut self, value: impl Serialize) -> Self {
        self.result = json(value);
        self
    }

    pub fn witness(mut self, label: &str, text: String, detail: impl Serialize) -> Self {
        self.witnesses.push(Witness { label: label.to_string(), text, detail: json(detail) });
        self
    }

    pub fn stat(mut self, key: &str, value: impl Serialize) -> Self {
        self.stats.insert(key.to_string(), json(value));
        self
    }

    /// A fail verdict anywhere in the result.
    pub fn failed(&self) -> bool {
        let is_fail = |v: &Value| v.get("verdict").and_then(Value::as_str) == Some("fail");
        match &self.result {
            Value::Array(items) => items.iter().any(is_fail),
            other => is_fail(other),
        }
    }

    /// Text form; reads nothing but the envelope itself.
    pub fn render(&self) -> String {
        let r = &self.result;
        let field = |k: &str| r.get(k).map(plain).unwrap_or_default();
        let witnesses = || self.witnesses.iter().map(|w| format!(" {}={}", w.label, w.text)).collect::<String>();
        match self.command.as_str() {
            "exp" => field("exponent"),
            "cexp" | "pexp" => format!("{}{}", field("exponent"), witnesses()),
            "check" | "morphism check" => {
                let mut line = field("verdict");
                for key in ["synchronizing", "strongly_synchronizing"] {
                    if r.get(key).is_some() {
                        line.push_str(&format!(" {key}={}", field(key)));
                    }
                }
                line + &witnesses()
            }
            "morphism apply" => field("image"),
            "morphism fixpoint" => field("prefix"),
            "factors" => {
                let mut out = format!("{} factors of length {}", field("count"), field("length"));
                if let Some(Value::Array(members)) = r.get("members") {
                    for m in members {
                        out.push('\n');
                        out.push_str(&plain(m));
                    }
                }
                out
            }
            "search" => format!(
                "longest_length={} exhausted={} nodes_visited={} wall_time_ms={}{}",
                field("longest_length"),
                field("exhausted"),
                field("nodes_visited"),
                field("wall_time_ms"),
                witnesses()
            ),
            "verify" => serde_json::to_string_pretty(r).expect("value serializes"),
            _ => serde_json::to_string(self).expect("envelope serializes"),
        }
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn json(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("output values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn cexp_line() {
        let env =
            Envelope::new("cexp").result(json!({"exponent": "5/2"})).witness("witness", "ididi".into(), json!({}));
        assert_eq!(env.render(), "5/2 witness=ididi");
    }

    #[test]
    fn fail_in_array() {
        let env = Envelope::new("verify").result(json!([{"verdict": "pass"}, {"verdict": "fail"}]));
        assert!(env.failed());
        assert!(!Envelope::new("exp").result(json!({"exponent": "2"})).failed());
    }
}
