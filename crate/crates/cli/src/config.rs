//! Run configuration: flat `key = value` files, overridden by flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown output format '{other}' (csv|json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub grid_m: usize,
    pub grid_safety: f64,
    /// When unset, each identity keeps its own default tolerance.
    pub tol_identity: Option<f64>,
    pub tol_hull: f64,
    pub tol_active: f64,
    pub threads: Option<usize>,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub output_format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid_m: 128,
            grid_safety: 0.5,
            tol_identity: None,
            tol_hull: 1e-10,
            tol_active: 1e-9,
            threads: None,
            seed: 42,
            output_path: None,
            output_format: None,
        }
    }
}

/// Ordered `key = value` pairs with their line numbers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvFile {
    entries: BTreeMap<String, (usize, String)>,
}

impl KvFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("line {}: expected key = value, got '{raw}'", i + 1)))?;
            let key = k.trim().to_string();
            if key.is_empty() {
                return Err(CliError::Input(format!("line {}: empty key", i + 1)));
            }
            if entries.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(CliError::Input(format!("line {}: duplicate key '{key}'", i + 1)));
            }
        }
        Ok(KvFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Removes and returns a value.
    pub fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    pub fn ensure_empty(&self) -> Result<(), CliError> {
        match self.entries.iter().next() {
            Some((k, (line, _))) => Err(CliError::Input(format!("line {line}: unknown key '{k}'"))),
            None => Ok(()),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, line: usize, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| CliError::Input(format!("line {line}: bad value for {key}: {e}")))
}

impl RunConfig {
    /// Takes the run keys out of `kv`, leaving the rest for the command.
    pub fn apply_file(&mut self, kv: &mut KvFile) -> Result<(), CliError> {
        if let Some((l, v)) = kv.take("grid.m") {
            self.grid_m = parse_value("grid.m", l, &v)?;
        }
        if let Some((l, v)) = kv.take("grid.safety") {
            self.grid_safety = parse_value("grid.safety", l, &v)?;
        }
        if let Some((l, v)) = kv.take("tol.identity") {
            self.tol_identity = Some(parse_value("tol.identity", l, &v)?);
        }
        if let Some((l, v)) = kv.take("tol.hull") {
            self.tol_hull = parse_value("tol.hull", l, &v)?;
        }
        if let Some((l, v)) = kv.take("tol.active") {
            self.tol_active = parse_value("tol.active", l, &v)?;
        }
        if let Some((l, v)) = kv.take("threads") {
            self.threads = Some(parse_value("threads", l, &v)?);
        }
        if let Some((l, v)) = kv.take("seed") {
            self.seed = parse_value("seed", l, &v)?;
        }
        if let Some((_, v)) = kv.take("output.path") {
            self.output_path = Some(PathBuf::from(v));
        }
        if let Some((l, v)) = kv.take("output.format") {
            self.output_format = Some(parse_value("output.format", l, &v)?);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Input(format!("{name} must be positive, got {v}")))
            }
        };
        if let Some(t) = self.tol_identity {
            positive("tol.identity", t)?;
        }
        positive("tol.hull", self.tol_hull)?;
        positive("tol.active", self.tol_active)?;
        if !(self.grid_safety > 0.0 && self.grid_safety < 1.0) {
            return Err(CliError::Input(format!("grid.safety must lie in (0, 1), got {}", self.grid_safety)));
        }
        if self.threads == Some(0) {
            return Err(CliError::Input("threads must be >= 1".into()));
        }
        Ok(())
    }
}

/// `RE` or `RE,IM`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("'{p}': {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected RE or RE,IM, got '{s}'")),
    }
}

/// `;`-separated list of `RE,IM` entries.
pub fn parse_complex_list(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(';').map(|p| parse_complex(p.trim())).collect()
}

/// A number, or a multiple of `pi` written as `pi`, `pi/L`, `K*pi` or `K*pi/L`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"))?),
        None => (t, 1.0),
    };
    let k = if num == "pi" {
        1.0
    } else if let Some(k) = num.strip_suffix("*pi") {
        k.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"))?
    } else if num == "-pi" {
        -1.0
    } else {
        return Err(format!("cannot parse angle '{t}'"));
    };
    Ok(k * PI / den)
}
