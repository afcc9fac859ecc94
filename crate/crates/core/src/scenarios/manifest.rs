use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::freq::SteadyStateClass;
use crate::model::AtomParams;

pub const MANIFEST_FILE: &str = "manifest.toml";

/// Everything needed to reproduce a run, written next to its CSV files.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub name: String,
    pub pipeline: String,
    pub wqsim_version: String,
    pub generated_unix_seconds: u64,
    pub threads: usize,
    pub files: Vec<String>,
    pub solver: SolverRecord,
    pub curves: Vec<CurveRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverRecord {
    pub integrator: String,
    pub t_end: f64,
    pub dt_requested: f64,
    /// Step actually taken, `t_end / steps`.
    pub dt: f64,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<KGridRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_photon_checkpoints: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KGridRecord {
    pub points: usize,
    pub center: f64,
    pub half_width: f64,
    pub dk: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveRecord {
    pub label: String,
    pub omega_a: f64,
    pub atoms: Vec<AtomParams>,
    pub classification: SteadyStateClass,
    /// Scalar summaries such as final populations and norm drift.
    pub results: BTreeMap<String, f64>,
}

impl Manifest {
    pub fn new(name: &str, pipeline: &str, solver: SolverRecord) -> Self {
        let generated_unix_seconds = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            name: name.to_string(),
            pipeline: pipeline.to_string(),
            wqsim_version: env!("CARGO_PKG_VERSION").to_string(),
            generated_unix_seconds,
            threads: rayon::current_num_threads(),
            files: Vec::new(),
            solver,
            curves: Vec::new(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidArgument(format!("manifest serialization: {e}")))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join(MANIFEST_FILE), self.to_toml()?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freq::classify_steady_state;
    use crate::model::NetworkConfig;

    #[test]
    fn serializes_as_a_single_document() {
        let config = NetworkConfig::single_atom("one", 50.0, AtomParams::nonchiral(0.1, 0.2));
        let mut m = Manifest::new(
            "one",
            "spatial",
            SolverRecord {
                integrator: "rk4".into(),
                t_end: 4.0,
                dt_requested: 0.003,
                dt: 0.003125,
                steps: 1280,
                k_grid: None,
                two_photon_checkpoints: None,
            },
        );
        m.files.push("atoms.csv".into());
        m.curves.push(CurveRecord {
            label: config.label.clone(),
            omega_a: config.omega_a,
            atoms: config.atoms.clone(),
            classification: classify_steady_state(&config),
            results: BTreeMap::from([("final_total".to_string(), 0.999)]),
        });
        let text = m.to_toml().unwrap();
        let back: toml::Table = text.parse().unwrap();
        assert_eq!(back["solver"]["steps"].as_integer(), Some(1280));
        assert!(back["solver"].get("k_grid").is_none());
        assert_eq!(back["curves"][0]["atoms"][0]["gamma_l"].as_float(), Some(0.2));
        assert_eq!(back["curves"][0]["classification"]["label"].as_str(), Some("Mixed"));
        assert!(back["generated_unix_seconds"].as_integer().unwrap() > 0);
    }
}
