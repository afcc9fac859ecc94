use num_complex::Complex64 as C64;

use crate::model::NetworkConfig;

/// Exponent `λ` of the Markov-limit solution `c_ee(t) = e^{λ t}`: every
/// delayed amplitude is replaced by the current one, keeping its phase.
pub fn markov_exponent(config: &NetworkConfig) -> C64 {
    let wa = config.omega_a;
    config.atoms.iter().fold(C64::new(-config.gamma_rl(), 0.0), |acc, a| {
        acc + C64::from_polar(a.gamma_l * a.gamma_r, wa * a.round_trip())
    })
}

pub fn analytic_cee_markov(t: f64, config: &NetworkConfig) -> C64 {
    (markov_exponent(config) * t).exp()
}

/// Markov decay rate of a single atom's amplitude:
/// `(γ_R² + γ_L²)/2 - γ_L γ_R cos(2 ω_a z)`, never negative.
pub fn atom_decay_rate(atom: &crate::model::AtomParams, omega_a: f64) -> f64 {
    atom.half_rate() - atom.gamma_l * atom.gamma_r * (omega_a * atom.round_trip()).cos()
}
