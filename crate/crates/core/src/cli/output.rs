use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub(crate) struct Meta {
    pub command_line: String,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub config: Vec<(String, String)>,
}

/// Streams one table. CSV gets `#` header lines, the column row, the data
/// rows and `#` summary lines; JSON gets one object with the same content.
pub(crate) struct Emitter<'a> {
    w: &'a mut dyn Write,
    format: Format,
    meta: Meta,
    rows: u64,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn pairs(v: &[(String, String)]) -> Value {
    Value::Object(v.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect::<Map<_, _>>())
}

impl<'a> Emitter<'a> {
    pub fn new(w: &'a mut dyn Write, format: Format, meta: Meta) -> Emitter<'a> {
        Emitter { w, format, meta, rows: 0 }
    }

    pub fn begin(&mut self, columns: &[&str]) -> io::Result<()> {
        let m = &self.meta;
        match self.format {
            Format::Csv => {
                writeln!(self.w, "# command: {}", m.command_line)?;
                writeln!(self.w, "# version: {}", m.version)?;
                if let Some(s) = m.seed {
                    writeln!(self.w, "# seed: {s}")?;
                }
                for (k, v) in &m.config {
                    writeln!(self.w, "# config.{k}: {v}")?;
                }
                writeln!(self.w, "{}", columns.join(","))
            }
            Format::Json => {
                let meta = json!({
                    "command": m.command_line,
                    "version": m.version,
                    "seed": m.seed,
                    "config": pairs(&m.config),
                });
                write!(self.w, "{{\"meta\":{meta},\"columns\":{},\"rows\":[", json!(columns))
            }
        }
    }

    pub fn row(&mut self, fields: &[String]) -> io::Result<()> {
        self.rows += 1;
        match self.format {
            Format::Csv => {
                let line: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
                writeln!(self.w, "{}", line.join(","))
            }
            Format::Json => {
                let sep = if self.rows == 1 { "\n" } else { ",\n" };
                write!(self.w, "{sep}{}", json!(fields))
            }
        }
    }

    pub fn finish(&mut self, summary: &[(String, String)]) -> io::Result<()> {
        match self.format {
            Format::Csv => {
                for (k, v) in summary {
                    writeln!(self.w, "# {k}: {v}")?;
                }
                Ok(())
            }
            Format::Json => writeln!(self.w, "\n],\"summary\":{}}}", pairs(summary)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Meta {
        Meta {
            command_line: "andor x".into(),
            version: "0",
            seed: Some(7),
            config: vec![("n".into(), "2".into())],
        }
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
        assert_eq!(csv_field("plain"), "plain");
    }

    #[test]
    fn json_is_valid_and_complete() {
        let mut buf = Vec::new();
        let mut e = Emitter::new(&mut buf, Format::Json, meta());
        e.begin(&["a", "b"]).unwrap();
        e.row(&["1".into(), "x,y".into()]).unwrap();
        e.row(&["2".into(), "z".into()]).unwrap();
        e.finish(&[("total".into(), "2".into())]).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"], json!([["1", "x,y"], ["2", "z"]]));
        assert_eq!(v["meta"]["seed"], 7);
        assert_eq!(v["summary"]["total"], "2");

        let mut buf = Vec::new();
        let mut e = Emitter::new(&mut buf, Format::Json, meta());
        e.begin(&["a"]).unwrap();
        e.finish(&[]).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"], json!([]));
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        let mut e = Emitter::new(&mut buf, Format::Csv, meta());
        e.begin(&["a"]).unwrap();
        e.row(&["1".into()]).unwrap();
        e.finish(&[("total".into(), "1".into())]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "# command: andor x\n# version: 0\n# seed: 7\n# config.n: 2\na\n1\n# total: 1\n");
    }
}
