//! Scenario files:
//!
//! ```text
//! # comment
//! label = "demo"
//! omega_a = 50
//!
//! [atom.1]
//! z = 0.1
//! gamma_l = 0.25
//! gamma_r = 0.5
//!
//! [atom.2]          # optional
//! z = 0.2
//! gamma_l = 0.25
//! gamma_r = 0.5
//!
//! [run]             # optional, every key optional
//! t_end = 4
//! dt = 0.0015625
//! k_points = 1001
//! k_halfwidth = 49
//! ```

use std::fmt::Write as _;

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::model::{AtomParams, NetworkConfig};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSettings {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub k_points: Option<usize>,
    pub k_halfwidth: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioFile {
    pub config: NetworkConfig,
    pub run: RunSettings,
}

struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    /// 1-based line of `key = ...` inside `[section]` (top level if `None`).
    fn line_of(&self, section: Option<&str>, key: &str) -> Option<usize> {
        let mut current: Option<String> = None;
        for (i, raw) in self.text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if let Some(rest) = line.strip_prefix('[') {
                current = Some(rest.trim_end_matches(']').trim().to_string());
                continue;
            }
            if current.as_deref() == section {
                if let Some((k, _)) = line.split_once('=') {
                    if k.trim() == key {
                        return Some(i + 1);
                    }
                }
            }
        }
        None
    }

    fn line_of_section(&self, section: &str) -> Option<usize> {
        self.text
            .lines()
            .position(|raw| {
                let line = raw.split('#').next().unwrap_or("").trim();
                line.strip_prefix('[')
                    .map(|r| r.trim_end_matches(']').trim() == section)
                    .unwrap_or(false)
            })
            .map(|i| i + 1)
    }

    fn error(&self, section: Option<&str>, key: &str, message: impl Into<String>) -> Error {
        let field = match section {
            Some(s) => format!("{s}.{key}"),
            None => key.to_string(),
        };
        Error::Parse {
            line: self
                .line_of(section, key)
                .or_else(|| section.and_then(|s| self.line_of_section(s))),
            field: Some(field),
            message: message.into(),
        }
    }

    fn number(&self, table: &Table, section: Option<&str>, key: &str) -> Result<Option<f64>> {
        match table.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(other) => Err(self.error(section, key, format!("expected a number, found {}", other.type_str()))),
        }
    }

    fn required(&self, table: &Table, section: Option<&str>, key: &str) -> Result<f64> {
        self.number(table, section, key)?
            .ok_or_else(|| self.error(section, key, "missing required field"))
    }

    fn reject_unknown(&self, table: &Table, section: Option<&str>, known: &[&str]) -> Result<()> {
        match table.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(self.error(section, k, "unknown field")),
            None => Ok(()),
        }
    }
}

/// Parses and validates a scenario file.
pub fn parse_config(text: &str) -> Result<ScenarioFile> {
    let src = Source { text };
    let root: Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        Error::Parse {
            line,
            field: None,
            message: e.message().to_string(),
        }
    })?;
    src.reject_unknown(&root, None, &["label", "omega_a", "atom", "run"])?;

    let omega_a = src.required(&root, None, "omega_a")?;
    let label = match root.get("label") {
        None => String::from("custom"),
        Some(Value::String(s)) => s.clone(),
        Some(other) => return Err(src.error(None, "label", format!("expected a string, found {}", other.type_str()))),
    };

    let atom_tables = match root.get("atom") {
        Some(Value::Table(t)) => t,
        Some(_) => return Err(src.error(None, "atom", "expected [atom.1] sections")),
        None => return Err(Error::parse("atom.1", "missing required section")),
    };
    if let Some(k) = atom_tables.keys().find(|k| *k != "1" && *k != "2") {
        return Err(Error::Parse {
            line: src.line_of_section(&format!("atom.{k}")),
            field: Some(format!("atom.{k}")),
            message: "only [atom.1] and [atom.2] are allowed".into(),
        });
    }
    let mut atoms = Vec::new();
    for idx in ["1", "2"] {
        let section = format!("atom.{idx}");
        let table = match atom_tables.get(idx) {
            Some(Value::Table(t)) => t,
            Some(_) => return Err(src.error(Some("atom"), idx, "expected a section")),
            None if idx == "1" => return Err(Error::parse(section, "missing required section")),
            None => break,
        };
        let s = Some(section.as_str());
        src.reject_unknown(table, s, &["z", "gamma_l", "gamma_r"])?;
        atoms.push(AtomParams::new(
            src.required(table, s, "z")?,
            src.required(table, s, "gamma_l")?,
            src.required(table, s, "gamma_r")?,
        ));
    }

    let mut run = RunSettings::default();
    match root.get("run") {
        None => {}
        Some(Value::Table(t)) => {
            let s = Some("run");
            src.reject_unknown(t, s, &["t_end", "dt", "k_points", "k_halfwidth"])?;
            run.t_end = src.number(t, s, "t_end")?;
            run.dt = src.number(t, s, "dt")?;
            run.k_halfwidth = src.number(t, s, "k_halfwidth")?;
            run.k_points = match t.get("k_points") {
                None => None,
                Some(Value::Integer(i)) if *i >= 2 => Some(*i as usize),
                Some(_) => return Err(src.error(s, "k_points", "expected an integer >= 2")),
            };
        }
        Some(_) => return Err(src.error(None, "run", "expected a [run] section")),
    }

    let config = NetworkConfig { atoms, omega_a, label };
    config.validate()?;
    Ok(ScenarioFile { config, run })
}

pub fn read_config(path: &std::path::Path) -> Result<ScenarioFile> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Writes a scenario in the format accepted by [`parse_config`]. Numbers use
/// the shortest representation that reads back to the same `f64`.
pub fn write_config(file: &ScenarioFile) -> String {
    let mut out = String::new();
    let c = &file.config;
    let _ = writeln!(out, "label = {}", Value::String(c.label.clone()));
    let _ = writeln!(out, "omega_a = {:?}", c.omega_a);
    for (i, a) in c.atoms.iter().enumerate() {
        let _ = writeln!(out, "\n[atom.{}]", i + 1);
        let _ = writeln!(out, "z = {:?}", a.position);
        let _ = writeln!(out, "gamma_l = {:?}", a.gamma_l);
        let _ = writeln!(out, "gamma_r = {:?}", a.gamma_r);
    }
    let r = &file.run;
    if *r != RunSettings::default() {
        out.push_str("\n[run]\n");
        if let Some(v) = r.t_end {
            let _ = writeln!(out, "t_end = {v:?}");
        }
        if let Some(v) = r.dt {
            let _ = writeln!(out, "dt = {v:?}");
        }
        if let Some(v) = r.k_points {
            let _ = writeln!(out, "k_points = {v}");
        }
        if let Some(v) = r.k_halfwidth {
            let _ = writeln!(out, "k_halfwidth = {v:?}");
        }
    }
    out
}
