use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Nested objects become dotted column names; arrays are kept as JSON text.
fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn render<T: Serialize>(report: &T, format: Format) -> String {
    let value = serde_json::to_value(report).expect("reports serialize");
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("valid json");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut cells = Vec::new();
            flatten("", &value, &mut cells);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(cells.iter().map(|(k, _)| k))
                .expect("in-memory write");
            w.write_record(cells.iter().map(|(_, v)| v))
                .expect("in-memory write");
            String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
        }
    }
}

pub fn emit<T: Serialize>(report: &T, format: Format) {
    let mut stdout = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = stdout.write_all(render(report, format).as_bytes());
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Inner {
        a: u32,
        b: Option<bool>,
    }

    #[derive(Serialize)]
    struct Outer {
        name: &'static str,
        inner: Inner,
        list: Vec<u32>,
    }

    #[test]
    fn csv_flattens_nested_fields() {
        let r = Outer {
            name: "x,y",
            inner: Inner { a: 3, b: None },
            list: vec![1, 2],
        };
        let csv = render(&r, Format::Csv);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("name,inner.a,inner.b,list"));
        assert_eq!(lines.next(), Some("\"x,y\",3,,\"[1,2]\""));
    }

    #[test]
    fn json_is_pretty_and_newline_terminated() {
        let s = render(
            &Inner {
                a: 1,
                b: Some(true),
            },
            Format::Json,
        );
        assert!(s.ends_with("}\n"));
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["b"], Value::Bool(true));
    }
}
