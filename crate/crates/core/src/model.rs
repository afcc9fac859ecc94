//! Physical scenario types and the atom–mode coupling amplitude.
//!
//! Units throughout: ħ = c = v_g = 1, so a position `z` doubles as a
//! propagation time. The mirror sits at `z = 0` and its reflection phase is
//! absorbed into the stored positions.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex probability amplitude. Always stored in Cartesian form.
pub type ComplexAmplitude = C64;

/// One two-level atom side-coupled to the waveguide.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    /// Distance from the mirror.
    pub position: f64,
    /// Coupling to left-propagating modes (square root of a rate).
    pub gamma_l: f64,
    /// Coupling to right-propagating modes (square root of a rate).
    pub gamma_r: f64,
}

impl AtomParams {
    pub fn new(position: f64, gamma_l: f64, gamma_r: f64) -> Self {
        Self {
            position,
            gamma_l,
            gamma_r,
        }
    }

    pub fn nonchiral(position: f64, gamma: f64) -> Self {
        Self::new(position, gamma, gamma)
    }

    pub fn is_chiral(&self) -> bool {
        self.gamma_l != self.gamma_r
    }

    pub fn is_coupled(&self) -> bool {
        self.gamma_l != 0.0 || self.gamma_r != 0.0
    }

    /// Atom→mirror→atom delay `2z`.
    pub fn round_trip(&self) -> f64 {
        2.0 * self.position
    }

    /// `(γ_R² + γ_L²) / 2`, the bare amplitude decay rate.
    pub fn half_rate(&self) -> f64 {
        0.5 * (self.gamma_r * self.gamma_r + self.gamma_l * self.gamma_l)
    }

    /// Same atom with both couplings multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.position, s * self.gamma_l, s * self.gamma_r)
    }

    fn validate(&self, index: usize) -> Result<()> {
        if !self.position.is_finite() || self.position <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "atom {} must sit at z > 0 (got {})",
                index + 1,
                self.position
            )));
        }
        for (name, g) in [("gamma_l", self.gamma_l), ("gamma_r", self.gamma_r)] {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::InvalidCoupling(format!(
                    "atom {} {name} must be finite and >= 0 (got {g})",
                    index + 1
                )));
            }
        }
        Ok(())
    }
}

/// One or two atoms sharing the resonance `omega_a`, ordered by distance from
/// the mirror.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub atoms: Vec<AtomParams>,
    pub omega_a: f64,
    pub label: String,
}

impl NetworkConfig {
    pub fn two_atoms(label: impl Into<String>, omega_a: f64, a1: AtomParams, a2: AtomParams) -> Self {
        Self {
            atoms: vec![a1, a2],
            omega_a,
            label: label.into(),
        }
    }

    pub fn single_atom(label: impl Into<String>, omega_a: f64, atom: AtomParams) -> Self {
        Self {
            atoms: vec![atom],
            omega_a,
            label: label.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_a.is_finite() && self.omega_a > 0.0) {
            return Err(Error::InvalidFrequency(format!(
                "omega_a must be finite and > 0 (got {})",
                self.omega_a
            )));
        }
        match self.atoms.len() {
            1 | 2 => {}
            n => return Err(Error::InvalidGeometry(format!("expected one or two atoms, got {n}"))),
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            atom.validate(i)?;
        }
        if let [a1, a2] = self.atoms.as_slice() {
            if a2.position <= a1.position {
                return Err(Error::InvalidGeometry(format!(
                    "atom 2 must lie beyond atom 1 (z1 = {}, z2 = {})",
                    a1.position, a2.position
                )));
            }
        }
        Ok(())
    }

    pub fn first(&self) -> &AtomParams {
        &self.atoms[0]
    }

    pub fn second(&self) -> Option<&AtomParams> {
        self.atoms.get(1)
    }

    /// Both atoms; a single-atom network is completed by an uncoupled partner
    /// at `2 z1`, which contributes nothing to any equation.
    pub fn atom_pair(&self) -> (AtomParams, AtomParams) {
        let a1 = self.atoms[0];
        let a2 = self
            .atoms
            .get(1)
            .copied()
            .unwrap_or(AtomParams::new(2.0 * a1.position, 0.0, 0.0));
        (a1, a2)
    }

    /// `γ_RL`: half the sum of all squared couplings.
    pub fn gamma_rl(&self) -> f64 {
        self.atoms.iter().map(AtomParams::half_rate).sum()
    }

    /// Inter-atom separation `z2 - z1`, if there is a second atom.
    pub fn separation(&self) -> Option<f64> {
        self.second().map(|a2| a2.position - self.first().position)
    }

    /// `min(2 z1, z2 - z1)`: the shortest physical delay in the network.
    pub fn tau_min(&self) -> f64 {
        let rt = self.first().round_trip();
        match self.separation() {
            Some(sep) => rt.min(sep),
            None => rt,
        }
    }

    /// Default integrator step, `tau_min / 64`.
    pub fn default_dt(&self) -> f64 {
        self.tau_min() / 64.0
    }

    /// Default horizon, `40 z1`.
    pub fn default_t_end(&self) -> f64 {
        40.0 * self.first().position
    }

    /// Copy with every coupling multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            atoms: self.atoms.iter().map(|a| a.scaled(s)).collect(),
            omega_a: self.omega_a,
            label: self.label.clone(),
        }
    }
}

/// Returns the config unchanged when every invariant holds.
pub fn validate_config(config: NetworkConfig) -> Result<NetworkConfig> {
    config.validate()?;
    Ok(config)
}

/// Coupling amplitude of mode `k` to `atom` in the interaction picture:
/// `g = i (γ_R e^{-ikz} - γ_L e^{ikz}) e^{i(k - ω_a) t}`.
pub fn coupling_g(k: f64, t: f64, atom: &AtomParams, omega_a: f64) -> C64 {
    let kz = k * atom.position;
    let spatial = C64::from_polar(atom.gamma_r, -kz) - C64::from_polar(atom.gamma_l, kz);
    C64::i() * spatial * C64::cis((k - omega_a) * t)
}

/// `coupling_g / sqrt(2π)`.
///
/// With this normalization `Σ_k G*(k,t) G(k,u) dk` tends to
/// `γ² δ(t - u)`, so probabilities carried by mode amplitudes are
/// `Σ |c_k|² dk` and the delay equations follow with unit weights.
pub fn mode_coupling(k: f64, t: f64, atom: &AtomParams, omega_a: f64) -> C64 {
    coupling_g(k, t, atom, omega_a) / TAU.sqrt()
}

/// `|z ω_a / π - n| < tol` for an integer `n >= 1`.
pub fn is_node_position(z: f64, omega_a: f64, tol: f64) -> bool {
    let x = z * omega_a / PI;
    let n = x.round();
    n >= 1.0 && (x - n).abs() < tol
}

/// Uniform discretization of the mode continuum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    k_values: Vec<f64>,
    dk: f64,
    center: f64,
}

impl KGrid {
    /// `n` points spanning `[center - half_width, center + half_width]`.
    pub fn uniform(center: f64, half_width: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-width must be positive (got {half_width})"
            )));
        }
        let lo = center - half_width;
        if !(lo > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "all modes must have k > 0 (lowest k = {lo})"
            )));
        }
        let dk = 2.0 * half_width / (n - 1) as f64;
        let k_values = (0..n).map(|i| lo + i as f64 * dk).collect();
        Ok(Self { k_values, dk, center })
    }

    /// Window centred on `ω_a` with half-width `max(25 γ_RL, 80π / t_end)`,
    /// capped at `0.98 ω_a` so every mode stays at positive `k`.
    pub fn default_half_width(config: &NetworkConfig, t_end: f64) -> f64 {
        let hw = (25.0 * config.gamma_rl()).max(80.0 * PI / t_end);
        hw.min(0.98 * config.omega_a)
    }

    pub fn for_config(config: &NetworkConfig, t_end: f64, n: usize) -> Result<Self> {
        Self::uniform(config.omega_a, Self::default_half_width(config, t_end), n)
    }

    pub fn k_values(&self) -> &[f64] {
        &self.k_values
    }

    pub fn dk(&self) -> f64 {
        self.dk
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn len(&self) -> usize {
        self.k_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_values.is_empty()
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.k_values[self.len() - 1] - self.k_values[0])
    }

    /// Same window with the spacing halved (`2n - 1` points).
    pub fn refined(&self) -> Self {
        Self::uniform(self.center, self.half_width(), 2 * self.len() - 1).expect("refining a valid grid stays valid")
    }

    /// Index of the grid point nearest to `k`.
    pub fn nearest_index(&self, k: f64) -> usize {
        let i = ((k - self.k_values[0]) / self.dk).round();
        i.clamp(0.0, (self.len() - 1) as f64) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> NetworkConfig {
        NetworkConfig::two_atoms(
            "fig2",
            50.0,
            AtomParams::new(0.1, 0.25, 0.5),
            AtomParams::new(0.2, 0.25, 0.5),
        )
    }

    #[test]
    fn caption_config_is_valid() {
        assert!(validate_config(fig2()).is_ok());
    }

    #[test]
    fn coincident_atoms_rejected() {
        let mut c = fig2();
        c.atoms[1].position = 0.1;
        assert!(matches!(validate_config(c), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn negative_coupling_rejected() {
        let mut c = fig2();
        c.atoms[0].gamma_l = -0.1;
        assert!(matches!(validate_config(c), Err(Error::InvalidCoupling(_))));
    }

    #[test]
    fn bad_frequency_and_position_rejected() {
        let mut c = fig2();
        c.omega_a = 0.0;
        assert!(matches!(validate_config(c), Err(Error::InvalidFrequency(_))));
        let mut c = fig2();
        c.atoms[0].position = 0.0;
        assert!(matches!(validate_config(c), Err(Error::InvalidGeometry(_))));
        let mut c = fig2();
        c.atoms.push(AtomParams::new(0.3, 0.1, 0.1));
        assert!(matches!(validate_config(c), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn validation_is_idempotent() {
        let once = validate_config(fig2()).unwrap();
        let twice = validate_config(once.clone()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn nonchiral_coupling_is_a_sine() {
        let atom = AtomParams::nonchiral(0.137, 0.4);
        for &k in &[3.0, 49.2, 50.0, 77.7] {
            let g = coupling_g(k, 0.0, &atom, k);
            let expect = 2.0 * 0.4 * (k * 0.137).sin();
            assert!((g.re - expect).abs() < 1e-14, "{g} vs {expect}");
            assert!(g.im.abs() < 1e-14);
        }
    }

    #[test]
    fn coupling_vanishes_at_node() {
        let k = 50.0;
        let atom = AtomParams::nonchiral(3.0 * PI / k, 0.5);
        assert!(coupling_g(k, 1.3, &atom, 50.0).norm() < 1e-14);
    }

    #[test]
    fn chiral_coupling_direct_substitution() {
        // i * 0.5 * e^{-5i}, evaluated independently
        let g = coupling_g(50.0, 0.0, &AtomParams::new(0.1, 0.0, 0.5), 50.0);
        let expect = C64::new(0.5 * (5.0f64).sin(), 0.5 * (5.0f64).cos());
        assert!((g - expect).norm() < 1e-15);
    }

    #[test]
    fn default_grid_is_centred_and_positive() {
        let c = fig2();
        let grid = KGrid::for_config(&c, 4.0, 1001).unwrap();
        assert_eq!(grid.len(), 1001);
        assert!(grid.k_values()[0] > 0.0);
        assert!((grid.k_values()[500] - 50.0).abs() < 1e-12);
        for w in grid.k_values().windows(2) {
            assert!(((w[1] - w[0]) - grid.dk()).abs() < 1e-12 * grid.dk().max(1.0));
        }
        assert_eq!(grid.nearest_index(50.0), 500);
    }

    #[test]
    fn grid_rejects_nonpositive_modes() {
        assert!(KGrid::uniform(1.0, 2.0, 11).is_err());
        assert!(KGrid::uniform(1.0, 0.5, 1).is_err());
    }

    #[test]
    fn node_detection() {
        assert!(is_node_position(PI / 50.0, 50.0, 1e-6));
        assert!(is_node_position(2.0 * PI / 50.0, 50.0, 1e-6));
        assert!(!is_node_position(2.25 * PI / 50.0, 50.0, 1e-6));
        assert!(!is_node_position(0.1, 50.0, 1e-6));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn equal_couplings_reduce_to_sine(
                k in 0.1f64..200.0, t in -5.0f64..5.0, z in 0.01f64..3.0,
                g in 0.0f64..2.0, wa in 1.0f64..100.0,
            ) {
                let v = coupling_g(k, t, &AtomParams::nonchiral(z, g), wa);
                let expect = C64::cis((k - wa) * t) * (2.0 * g * (k * z).sin());
                prop_assert!((v.re - expect.re).abs() < 1e-14);
                prop_assert!((v.im - expect.im).abs() < 1e-14);
            }

            #[test]
            fn time_dependence_is_a_pure_phase(
                k in 0.1f64..200.0, t in -5.0f64..5.0, z in 0.01f64..3.0,
                gl in 0.0f64..2.0, gr in 0.0f64..2.0, wa in 1.0f64..100.0,
            ) {
                let atom = AtomParams::new(z, gl, gr);
                let lhs = coupling_g(k, t, &atom, wa);
                let rhs = coupling_g(k, 0.0, &atom, wa) * C64::cis((k - wa) * t);
                prop_assert!((lhs - rhs).norm() < 1e-13);
                prop_assert!(lhs.norm() <= gl + gr + 1e-14);
            }
        }
    }
}
