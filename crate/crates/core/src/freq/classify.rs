use serde::Serialize;

use crate::freq::markov::atom_decay_rate;
use crate::model::{is_node_position, NetworkConfig};

/// `|z ω_a / π - n|` below this counts as a node of the standing wave.
pub const NODE_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SteadyStateLabel {
    TwoPhoton,
    OnePhotonTrapped,
    DarkState,
    Mixed,
}

impl std::fmt::Display for SteadyStateLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::TwoPhoton => "TwoPhoton",
            Self::OnePhotonTrapped => "OnePhotonTrapped",
            Self::DarkState => "DarkState",
            Self::Mixed => "Mixed",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SteadyStateClass {
    pub label: SteadyStateLabel,
    /// Long-time `|c_ee|²` in the Markov limit.
    pub predicted_cee_sq: f64,
    /// Long-time excited population of each atom in the Markov limit.
    pub predicted_excited: Vec<f64>,
    /// Set when `ω_a` is small or an atom sits far from the mirror, where
    /// the Markov predictions above lose their footing.
    pub outside_markov_regime: bool,
}

/// Smallest `ω_a` and largest `z_j` treated as Markovian.
pub const MARKOV_MIN_OMEGA: f64 = 10.0;
pub const MARKOV_MAX_POSITION: f64 = 0.5;

pub fn classify_steady_state(config: &NetworkConfig) -> SteadyStateClass {
    let wa = config.omega_a;
    let at_node = |z: f64| is_node_position(z, wa, NODE_TOLERANCE);
    let atoms = &config.atoms;

    let dark = atoms.iter().all(|a| !a.is_chiral() && at_node(a.position));
    let trapped = match atoms.as_slice() {
        [a1, a2] => {
            let one_sided = (a2.gamma_r == 0.0) != (a2.gamma_l == 0.0);
            a1.gamma_r == a1.gamma_l && at_node(a1.position) && one_sided
        }
        _ => false,
    };
    let label = if dark {
        SteadyStateLabel::DarkState
    } else if trapped {
        SteadyStateLabel::OnePhotonTrapped
    } else if atoms.iter().any(|a| a.is_chiral()) {
        SteadyStateLabel::TwoPhoton
    } else {
        SteadyStateLabel::Mixed
    };

    let stays: Vec<bool> = atoms
        .iter()
        .map(|a| {
            let scale = a.half_rate();
            scale == 0.0 || atom_decay_rate(a, wa) <= 1e-9 * scale
        })
        .collect();
    let predicted_excited = stays.iter().map(|&s| if s { 1.0 } else { 0.0 }).collect();
    let predicted_cee_sq = if stays.iter().all(|&s| s) { 1.0 } else { 0.0 };
    let outside_markov_regime = wa < MARKOV_MIN_OMEGA || atoms.iter().any(|a| a.position > MARKOV_MAX_POSITION);

    SteadyStateClass {
        label,
        predicted_cee_sq,
        predicted_excited,
        outside_markov_regime,
    }
}
