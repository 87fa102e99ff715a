use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use crate::Common;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// How `measured` is compared with `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Le,
    Ge,
    Within4Sigma,
    Eq,
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub section: String,
    pub name: String,
    pub params: String,
    pub bound: f64,
    pub measured: f64,
    pub sigma: f64,
    pub samples: usize,
    pub check: Check,
    pub pass: bool,
    pub asserted: bool,
}

impl Row {
    pub fn new(section: &str, name: &str, params: impl Into<String>) -> Self {
        Self {
            section: section.into(),
            name: name.into(),
            params: params.into(),
            bound: 0.0,
            measured: 0.0,
            sigma: 0.0,
            samples: 0,
            check: Check::Info,
            pass: true,
            asserted: false,
        }
    }

    pub fn within(mut self, expected: f64, measured: f64, sigma: f64, samples: usize) -> Self {
        self.bound = expected;
        self.measured = measured;
        self.sigma = sigma;
        self.samples = samples;
        self.check = Check::Within4Sigma;
        self.pass = (measured - expected).abs() <= 4.0 * sigma + 1e-12;
        self.asserted = true;
        self
    }

    pub fn equal(mut self, expected: f64, measured: f64, samples: usize) -> Self {
        self.bound = expected;
        self.measured = measured;
        self.samples = samples;
        self.check = Check::Eq;
        self.pass = measured == expected;
        self.asserted = true;
        self
    }

    pub fn at_most(mut self, bound: f64, measured: f64, samples: usize) -> Self {
        self.bound = bound;
        self.measured = measured;
        self.samples = samples;
        self.check = Check::Le;
        self.pass = measured <= bound;
        self.asserted = true;
        self
    }

    pub fn info(mut self, bound: f64, measured: f64, samples: usize) -> Self {
        self.bound = bound;
        self.measured = measured;
        self.samples = samples;
        self.check = Check::Info;
        self.asserted = false;
        self
    }

    pub fn asserted(mut self, asserted: bool) -> Self {
        self.asserted = asserted;
        self
    }
}

pub fn all_pass(rows: &[Row]) -> bool {
    rows.iter().filter(|r| r.asserted).all(|r| r.pass)
}

fn sink(common: &Common) -> Result<Box<dyn Write>> {
    Ok(match &common.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn csv_header(command: &str) -> String {
    format!("# qrom {command} schema_version={SCHEMA_VERSION}\n")
}

fn write_csv(w: &mut dyn Write, command: &str, rows: &[Row]) -> Result<()> {
    w.write_all(csv_header(command).as_bytes())?;
    let mut c = csv::Writer::from_writer(w);
    for r in rows {
        c.serialize(r)?;
    }
    c.flush()?;
    Ok(())
}

/// One JSON document (or CSV table) holding `rows` plus free-form detail.
pub fn emit(common: &Common, command: &str, params: Value, rows: &[Row], details: Value) -> Result<bool> {
    let mut w = sink(common)?;
    match common.format {
        Format::Csv => write_csv(&mut w, command, rows)?,
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command,
                "seed": common.seed,
                "params": params,
                "pass": all_pass(rows),
                "rows": rows,
                "details": details,
            });
            serde_json::to_writer_pretty(&mut w, &doc)?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()?;
    Ok(all_pass(rows))
}

/// JSON lines: every record gets `schema_version` and `kind`.
pub fn emit_lines(common: &Common, command: &str, rows: &[Row], records: &[(String, Value)]) -> Result<bool> {
    let mut w = sink(common)?;
    match common.format {
        Format::Csv => write_csv(&mut w, command, rows)?,
        Format::Json => {
            for (kind, v) in records {
                let mut obj = serde_json::Map::new();
                obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
                obj.insert("kind".into(), json!(kind));
                match v {
                    Value::Object(m) => obj.extend(m.clone()),
                    other => {
                        obj.insert("value".into(), other.clone());
                    }
                }
                serde_json::to_writer(&mut w, &Value::Object(obj))?;
                w.write_all(b"\n")?;
            }
        }
    }
    w.flush()?;
    Ok(all_pass(rows))
}
