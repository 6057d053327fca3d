use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

/// Common envelope of every numeric JSON result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericRecord {
    pub value_re: f64,
    pub value_im: f64,
    pub err_est: f64,
    pub method: String,
    pub params: BTreeMap<String, Value>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl NumericRecord {
    pub fn new(value: Complex64, err_est: f64, method: &str) -> Self {
        NumericRecord {
            value_re: value.re,
            value_im: value.im,
            err_est,
            method: method.to_string(),
            params: BTreeMap::new(),
            extra: Map::new(),
        }
    }

    pub fn param(mut self, key: &str, v: impl Serialize) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    pub fn complex_param(self, key: &str, z: Complex64) -> Self {
        self.param(&format!("{key}_re"), z.re).param(&format!("{key}_im"), z.im)
    }

    pub fn extra(mut self, key: &str, v: impl Serialize) -> Self {
        self.extra.insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn write_json(value: &impl Serialize, path: Option<&Path>) -> Result<(), CliError> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes a header row and records; `None` cells are left empty.
pub fn write_csv(header: &[&str], rows: &[Vec<Option<String>>], path: Option<&Path>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink(path)?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|c| c.as_deref().unwrap_or("")))?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip decimal form.
pub fn num(v: f64) -> Option<String> {
    Some(format!("{v:?}"))
}
