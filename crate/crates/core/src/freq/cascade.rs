//! Delay-equation route: `c_ee` first, then the single-photon amplitudes
//! mode by mode, driven by the stored `c_ee`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::dde::{integrate_from, LinearDelaySystem, Trajectory};
use crate::error::Result;
use crate::model::{mode_coupling, AtomParams, KGrid, NetworkConfig};

fn delayed_coef(amp: f64, omega_a: f64, delay: f64) -> C64 {
    C64::from_polar(amp, omega_a * delay)
}

/// The closed equation for `c_ee`.
pub fn cee_system(config: &NetworkConfig) -> LinearDelaySystem {
    let (a1, a2) = config.atom_pair();
    let wa = config.omega_a;
    let mut sys = LinearDelaySystem::new(1);
    sys.add_local(0, 0, C64::new(-config.gamma_rl(), 0.0));
    for a in [a1, a2] {
        let tau = a.round_trip();
        sys.add_delayed(0, 0, tau, delayed_coef(a.gamma_l * a.gamma_r, wa, tau));
    }
    sys
}

/// `c_ee` on `[0, t_end]` from `c_ee(0) = 1` with zero pre-history.
pub fn solve_cee(config: &NetworkConfig, t_end: f64, dt: f64) -> Result<Trajectory> {
    config.validate()?;
    let one = [C64::new(1.0, 0.0)];
    let zero = [C64::new(0.0, 0.0)];
    integrate_from(&cee_system(config), &one, &zero, t_end, dt)
}

/// Adds the homogeneous part of the `(c_egk, c_gek)` pair equations:
/// component 0 is "atom 1 excited", component 1 is "atom 2 excited".
fn add_pair_feedback<D>(sys: &mut LinearDelaySystem<D>, a1: &AtomParams, a2: &AtomParams, wa: f64)
where
    D: Fn(f64, &mut [C64]) + Sync,
{
    let plus = a1.position + a2.position;
    let minus = a2.position - a1.position;
    sys.add_local(0, 0, C64::new(-a1.half_rate(), 0.0));
    sys.add_local(1, 1, C64::new(-a2.half_rate(), 0.0));
    sys.add_delayed(
        0,
        0,
        a1.round_trip(),
        delayed_coef(a1.gamma_l * a1.gamma_r, wa, a1.round_trip()),
    );
    sys.add_delayed(
        1,
        1,
        a2.round_trip(),
        delayed_coef(a2.gamma_l * a2.gamma_r, wa, a2.round_trip()),
    );
    // atom 2 -> atom 1: leftward past atom 1 and back via the mirror, or
    // straight along the left-moving channel
    sys.add_delayed(0, 1, plus, delayed_coef(a1.gamma_r * a2.gamma_l, wa, plus));
    sys.add_delayed(0, 1, minus, -delayed_coef(a1.gamma_l * a2.gamma_l, wa, minus));
    // atom 1 -> atom 2
    sys.add_delayed(1, 0, plus, delayed_coef(a1.gamma_l * a2.gamma_r, wa, plus));
    sys.add_delayed(1, 0, minus, -delayed_coef(a1.gamma_r * a2.gamma_r, wa, minus));
}

/// Delay system shared by the single-excitation problems: the pair equations
/// without drive, or the two-atom spatial model with `c_1, c_2`.
pub fn exchange_system(config: &NetworkConfig) -> LinearDelaySystem {
    let (a1, a2) = config.atom_pair();
    let mut sys = LinearDelaySystem::new(2);
    add_pair_feedback(&mut sys, &a1, &a2, config.omega_a);
    sys
}

/// Per-mode trajectories of `(c_egk, c_gek)`.
#[derive(Clone, Debug)]
pub struct SpectralPairs {
    kgrid: KGrid,
    trajectories: Vec<Trajectory>,
}

impl SpectralPairs {
    pub fn kgrid(&self) -> &KGrid {
        &self.kgrid
    }

    pub fn trajectory(&self, k_index: usize) -> &Trajectory {
        &self.trajectories[k_index]
    }

    pub fn n_nodes(&self) -> usize {
        self.trajectories[0].len()
    }

    pub fn time(&self, node: usize) -> f64 {
        self.trajectories[0].time(node)
    }

    /// `c_egk(t_node, ·)` over the grid.
    pub fn c_egk(&self, node: usize) -> Vec<C64> {
        self.trajectories.iter().map(|tr| tr.node(node)[0]).collect()
    }

    /// `c_gek(t_node, ·)` over the grid.
    pub fn c_gek(&self, node: usize) -> Vec<C64> {
        self.trajectories.iter().map(|tr| tr.node(node)[1]).collect()
    }

    /// `(∫|c_egk|² dk, ∫|c_gek|² dk)` at a node.
    pub fn weights(&self, node: usize) -> (f64, f64) {
        let dk = self.kgrid.dk();
        let (mut w1, mut w2) = (0.0, 0.0);
        for tr in &self.trajectories {
            let s = tr.node(node);
            w1 += s[0].norm_sqr();
            w2 += s[1].norm_sqr();
        }
        (w1 * dk, w2 * dk)
    }
}

/// `c_ee` at every half step of its own grid, so per-mode solves on the same
/// step avoid re-interpolating it.
struct HalfStepTable<'a> {
    traj: &'a Trajectory,
    half: f64,
    values: Vec<C64>,
}

impl<'a> HalfStepTable<'a> {
    fn new(traj: &'a Trajectory) -> Self {
        let half = 0.5 * traj.dt();
        let m = 2 * (traj.len() - 1) + 1;
        let values = (0..m)
            .map(|i| {
                if i % 2 == 0 {
                    traj.node(i / 2)[0]
                } else {
                    traj.sample_component(i as f64 * half, 0).unwrap_or_default()
                }
            })
            .collect();
        Self { traj, half, values }
    }

    fn at(&self, t: f64) -> C64 {
        let x = t / self.half;
        let i = x.round();
        if (x - i).abs() < 1e-9 && i >= 0.0 && (i as usize) < self.values.len() {
            self.values[i as usize]
        } else if t < 0.0 {
            C64::new(0.0, 0.0)
        } else {
            self.traj.sample_component(t, 0).unwrap_or_default()
        }
    }
}

/// Solves the pair equations for every mode of `kgrid`, in parallel over
/// modes (on the current rayon pool).
pub fn solve_spectral_pair(
    config: &NetworkConfig,
    cee: &Trajectory,
    kgrid: &KGrid,
    t_end: f64,
    dt: f64,
) -> Result<SpectralPairs> {
    config.validate()?;
    let (a1, a2) = config.atom_pair();
    let wa = config.omega_a;
    let table = HalfStepTable::new(cee);
    let zero = [C64::new(0.0, 0.0); 2];
    let trajectories = kgrid
        .k_values()
        .par_iter()
        .map(|&k| {
            let g1 = mode_coupling(k, 0.0, &a1, wa);
            let g2 = mode_coupling(k, 0.0, &a2, wa);
            let det = k - wa;
            let drive = |t: f64, out: &mut [C64]| {
                let s = -C64::i() * table.at(t) * C64::cis(det * t);
                out[0] += s * g2;
                out[1] += s * g1;
            };
            let mut sys = LinearDelaySystem::with_drive(2, drive);
            add_pair_feedback(&mut sys, &a1, &a2, wa);
            integrate_from(&sys, &zero, &zero, t_end, dt)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralPairs {
        kgrid: kgrid.clone(),
        trajectories,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fig3() -> NetworkConfig {
        NetworkConfig::two_atoms(
            "fig3",
            50.0,
            AtomParams::new(PI / 50.0, 0.25, 0.25),
            AtomParams::new(2.0 * PI / 50.0, 0.5, 0.0),
        )
    }

    #[test]
    fn decoupled_atoms_stay_excited() {
        let c = NetworkConfig::two_atoms(
            "off",
            50.0,
            AtomParams::new(0.1, 0.0, 0.0),
            AtomParams::new(0.2, 0.0, 0.0),
        );
        let tr = solve_cee(&c, 4.0, c.default_dt()).unwrap();
        for i in 0..tr.len() {
            assert_eq!(tr.node(i)[0], C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn coefficient_free_terms_are_dropped() {
        use crate::dde::DelaySystem;
        let sys = exchange_system(&NetworkConfig::single_atom("one", 50.0, AtomParams::new(0.1, 0.2, 0.3)));
        assert_eq!(sys.delays(), &[0.2]);
        let sys = exchange_system(&fig3());
        // gamma_2R = 0 removes the atom-2 round trip and the atom 1 -> 2 terms
        assert_eq!(sys.delays().len(), 3);
    }

    #[test]
    fn coinciding_delays_share_a_lookup() {
        use crate::dde::DelaySystem;
        let c = NetworkConfig::two_atoms(
            "dashed",
            50.0,
            AtomParams::nonchiral(PI / 100.0, 0.5),
            AtomParams::nonchiral(3.0 * PI / 100.0, 0.5),
        );
        // 2 z1 == z2 - z1
        assert_eq!(exchange_system(&c).delays().len(), 3);
    }

    #[test]
    fn uncoupled_second_atom_leaves_c_gek_purely_driven() {
        let c = NetworkConfig::two_atoms(
            "solo",
            50.0,
            AtomParams::new(0.1, 0.2, 0.4),
            AtomParams::new(0.2, 0.0, 0.0),
        );
        let dt = c.default_dt();
        let cee = solve_cee(&c, 1.0, dt).unwrap();
        let grid = KGrid::uniform(50.0, 5.0, 5).unwrap();
        let pairs = solve_spectral_pair(&c, &cee, &grid, 1.0, dt).unwrap();
        // c_egk has no drive and no source from c_gek
        for i in 0..5 {
            let tr = pairs.trajectory(i);
            assert!(tr.component(0).iter().all(|v| *v == C64::new(0.0, 0.0)));
        }
        // c_gek(t) = -i ∫ c_ee(s) G1(k, s) ds, checked against a trapezoid rule
        let a1 = c.atoms[0];
        let k = grid.k_values()[3];
        let tr = pairs.trajectory(3);
        let mut acc = C64::new(0.0, 0.0);
        for n in 0..tr.len() - 1 {
            let f = |m: usize| cee.node(m)[0] * mode_coupling(k, cee.time(m), &a1, 50.0);
            acc += (f(n) + f(n + 1)) * (0.5 * cee.dt());
        }
        let expect = -C64::i() * acc;
        let got = tr.node(tr.len() - 1)[1];
        assert!(
            (got - expect).norm() < 1e-5 * expect.norm().max(1e-3),
            "{got} vs {expect}"
        );
    }

    #[test]
    fn markov_regime_node_atom_barely_decays() {
        let c = NetworkConfig::single_atom("node", 50.0, AtomParams::nonchiral(PI / 50.0, 0.5));
        let tr = solve_cee(&c, 40.0 * PI / 50.0, c.default_dt()).unwrap();
        let last = tr.node(tr.len() - 1)[0];
        // the non-Markovian plateau 1 / (1 + γ² τ)
        let plateau = 1.0 / (1.0 + 0.25 * 2.0 * PI / 50.0);
        assert!((last.norm() - plateau).abs() < 1e-3, "{last}");
    }
}
