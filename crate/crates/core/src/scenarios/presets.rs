use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{AtomParams, NetworkConfig};
use crate::scenarios::config::{RunSettings, ScenarioFile};

pub const PRESET_NAMES: [&str; 6] = ["fig2", "fig3", "fig4_solid", "fig4_dashed", "fig5", "fig6"];

/// Which solver family a run uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    /// `c_ee`, the single-photon pairs and `c_kk`.
    TwoExcitation,
    /// One excitation in the position picture.
    Spatial,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Self::TwoExcitation => "two_excitation",
            Self::Spatial => "spatial",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub pipeline: Pipeline,
    /// The first entry is the headline curve; the rest share its axes.
    pub curves: Vec<NetworkConfig>,
    pub run: RunSettings,
}

impl Preset {
    pub fn config(&self) -> &NetworkConfig {
        &self.curves[0]
    }

    /// Curve `i` as a scenario file, with the run plan filled in.
    pub fn scenario(&self, i: usize) -> ScenarioFile {
        ScenarioFile {
            config: self.curves[i].clone(),
            run: self.run.clone(),
        }
    }
}

const OMEGA: f64 = 50.0;
const K_POINTS: usize = 1001;

fn plan(config: &NetworkConfig, k_points: Option<usize>) -> RunSettings {
    RunSettings {
        t_end: Some(config.default_t_end()),
        dt: Some(config.default_dt()),
        k_points,
        k_halfwidth: None,
    }
}

fn two_excitation(name: &'static str, a1: AtomParams, a2: AtomParams) -> Preset {
    let config = NetworkConfig::two_atoms(name, OMEGA, a1, a2);
    Preset {
        name,
        pipeline: Pipeline::TwoExcitation,
        run: plan(&config, Some(K_POINTS)),
        curves: vec![config],
    }
}

pub fn preset(name: &str) -> Result<Preset> {
    let p = match name {
        "fig2" => two_excitation("fig2", AtomParams::new(0.1, 0.25, 0.5), AtomParams::new(0.2, 0.25, 0.5)),
        "fig3" => two_excitation(
            "fig3",
            AtomParams::nonchiral(PI / OMEGA, 0.25),
            AtomParams::new(2.0 * PI / OMEGA, 0.5, 0.0),
        ),
        "fig4_solid" => two_excitation(
            "fig4_solid",
            AtomParams::nonchiral(PI / OMEGA, 0.5),
            AtomParams::nonchiral(2.0 * PI / OMEGA, 0.5),
        ),
        "fig4_dashed" => two_excitation(
            "fig4_dashed",
            AtomParams::nonchiral(PI / (2.0 * OMEGA), 0.5),
            AtomParams::nonchiral(3.0 * PI / (2.0 * OMEGA), 0.5),
        ),
        "fig5" => {
            // same total rate γ_L + γ_R = 0.4, increasingly lopsided
            let z = 2.25 * PI / OMEGA;
            let curves: Vec<NetworkConfig> = [
                ("fig5_nonchiral", 0.2, 0.2),
                ("fig5_r3", 0.1, 0.3),
                ("fig5_r7", 0.05, 0.35),
            ]
            .into_iter()
            .map(|(label, gl, gr)| NetworkConfig::single_atom(label, OMEGA, AtomParams::new(z, gl, gr)))
            .collect();
            Preset {
                name: "fig5",
                pipeline: Pipeline::Spatial,
                run: plan(&curves[0], None),
                curves,
            }
        }
        "fig6" => {
            let a1 = AtomParams::nonchiral(1.0, 0.5);
            let curves = vec![
                NetworkConfig::two_atoms("fig6", OMEGA, a1, AtomParams::new(10.0, 0.1, 0.5)),
                NetworkConfig::two_atoms("fig6_swapped", OMEGA, a1, AtomParams::new(10.0, 0.5, 0.1)),
            ];
            Preset {
                name: "fig6",
                pipeline: Pipeline::Spatial,
                run: plan(&curves[0], None),
                curves,
            }
        }
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(p)
}
