//! Serialization of reports as JSON, CSV or indented text.
//!
//! Reports are converted to [`serde_json::Value`] first, so object keys come
//! out sorted. Floats carry 17 significant digits; non-finite values become
//! `null`.

use std::io;
use std::str::FromStr;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Pretty,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "pretty" => Ok(OutputFormat::Pretty),
            other => Err(Error::Input(format!("unknown output format `{other}` (json, csv, pretty)"))),
        }
    }
}

/// `{:.16e}`, i.e. 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

fn json_text(value: &Value) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

fn scalar_text(value: &Value) -> Result<String> {
    Ok(match value {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if !(n.is_i64() || n.is_u64()) => format_f64(x),
            _ => n.to_string(),
        },
        other => json_text(other)?,
    })
}

pub fn to_value<T: Serialize>(report: &T) -> Result<Value> {
    Ok(serde_json::to_value(report)?)
}

/// Compact JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    Ok(json_text(&to_value(report)?)? + "\n")
}

/// A header of top-level keys and one row of values; nested values are
/// written as JSON text.
pub fn to_csv<T: Serialize>(report: &T) -> Result<String> {
    let value = to_value(report)?;
    let Value::Object(map) = value else {
        return Err(Error::Input("csv output needs an object report".into()));
    };
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(map.keys())?;
    let row: Vec<String> = map.values().map(scalar_text).collect::<Result<_>>()?;
    wtr.write_record(&row)?;
    let bytes = wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv writes UTF-8"))
}

fn pretty_into(out: &mut String, value: &Value, indent: usize) -> Result<()> {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let inline = match v {
                    Value::Object(m) => m.is_empty(),
                    Value::Array(a) => a.iter().all(|x| !x.is_object() && !x.is_array()),
                    _ => true,
                };
                if inline {
                    out.push_str(&format!("{pad}{k}: {}\n", inline_text(v)?));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    pretty_into(out, v, indent + 1)?;
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if item.is_object() {
                    out.push_str(&format!("{pad}-\n"));
                    pretty_into(out, item, indent + 1)?;
                } else {
                    out.push_str(&format!("{pad}{}\n", inline_text(item)?));
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", inline_text(other)?)),
    }
    Ok(())
}

fn inline_text(value: &Value) -> Result<String> {
    Ok(match value {
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(inline_text).collect::<Result<_>>()?;
            format!("[{}]", parts.join(", "))
        }
        Value::Null => "null".into(),
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => format!("{:.6e}", n.as_f64().unwrap_or(f64::NAN)),
        other => scalar_text(other)?,
    })
}

/// Indented `key: value` lines with six significant digits.
pub fn to_pretty<T: Serialize>(report: &T) -> Result<String> {
    let mut out = String::new();
    pretty_into(&mut out, &to_value(report)?, 0)?;
    Ok(out)
}

pub fn render<T: Serialize>(report: &T, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => to_json(report),
        OutputFormat::Csv => to_csv(report),
        OutputFormat::Pretty => to_pretty(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_report() {
        assert_eq!(to_json(&json!({})).unwrap(), "{}\n");
    }

    #[test]
    fn floats_keep_17_digits_and_round_trip() {
        let x = 0.1 + 0.2;
        let text = to_json(&json!({"x": x, "n": 3, "bad": f64::NAN})).unwrap();
        assert!(text.contains("3.0000000000000004e-1"), "{text}");
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), x);
        assert_eq!(back["n"], 3);
        assert!(back["bad"].is_null());
    }

    #[test]
    fn keys_are_sorted() {
        let text = to_json(&json!({"b": 1, "a": 2})).unwrap();
        assert_eq!(text, "{\"a\":2,\"b\":1}\n");
    }

    #[test]
    fn csv_header_matches_json_keys() {
        let report = json!({"model": "gas", "max": 1.5, "rows": [1.0, 2.0]});
        let text = to_csv(&report).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "max,model,rows");
        let keys: Vec<String> = to_value(&report).unwrap().as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["max", "model", "rows"]);
        assert!(lines.next().unwrap().starts_with("1.5000000000000000e0,gas,"));
    }

    #[test]
    fn pretty_nests() {
        let text = to_pretty(&json!({"a": {"b": [1.0, 2.0]}, "c": "x"})).unwrap();
        assert_eq!(text, "a:\n  b: [1.000000e0, 2.000000e0]\nc: x\n");
    }

    #[test]
    fn unknown_format() {
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
