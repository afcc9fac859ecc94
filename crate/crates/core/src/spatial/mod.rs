//! Single-excitation dynamics in the position picture: atomic amplitudes
//! from delay equations, photon packets assembled lazily from them.

pub mod packet;

use num_complex::Complex64 as C64;

use crate::dde::{integrate_from, Trajectory};
use crate::error::Result;
use crate::freq::cascade::{cee_system, exchange_system};
use crate::model::{AtomParams, NetworkConfig};

pub use packet::{check_mirror_boundary, Direction, FieldSnapshot, SegmentedPacket};

/// `c_e` of one atom, excited at `t = 0`.
pub fn solve_single_atom(atom: &AtomParams, omega_a: f64, t_end: f64, dt: f64) -> Result<Trajectory> {
    let config = NetworkConfig::single_atom("single", omega_a, *atom);
    config.validate()?;
    let one = [C64::new(1.0, 0.0)];
    let zero = [C64::new(0.0, 0.0)];
    integrate_from(&cee_system(&config), &one, &zero, t_end, dt)
}

/// `(c_1, c_2)` as components 0 and 1, with only atom 1 excited at `t = 0`.
pub fn solve_two_atom_single_excitation(config: &NetworkConfig, t_end: f64, dt: f64) -> Result<Trajectory> {
    config.validate()?;
    let init = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let zero = [C64::new(0.0, 0.0); 2];
    integrate_from(&exchange_system(config), &init, &zero, t_end, dt)
}

/// Atomic trajectory plus the packets built on it.
#[derive(Clone, Debug)]
pub struct SpatialModel {
    pub config: NetworkConfig,
    pub trajectory: Trajectory,
    pub right: SegmentedPacket,
    pub left: SegmentedPacket,
}

impl SpatialModel {
    /// Wraps a trajectory with one component per atom of `config`, atom 1
    /// holding the excitation at `t = 0`. Atom j cannot be excited before
    /// light covers `z_j - z_1`, and its emission is cut off exactly there.
    pub fn new(config: NetworkConfig, trajectory: Trajectory) -> Self {
        let positions: Vec<f64> = config.atoms.iter().map(|a| a.position).collect();
        let couplings: Vec<(f64, f64)> = config.atoms.iter().map(|a| (a.gamma_l, a.gamma_r)).collect();
        let onsets: Vec<f64> = positions.iter().map(|z| z - positions[0]).collect();
        let right = SegmentedPacket::right(&positions, &couplings).with_onsets(&onsets);
        let left = SegmentedPacket::left(&positions, &couplings).with_onsets(&onsets);
        Self {
            config,
            trajectory,
            right,
            left,
        }
    }

    /// Integrates the single-excitation problem: one atom, or two with atom 1
    /// initially excited.
    pub fn solve(config: &NetworkConfig, t_end: f64, dt: f64) -> Result<Self> {
        let traj = match config.atoms.as_slice() {
            [a] => solve_single_atom(a, config.omega_a, t_end, dt)?,
            _ => solve_two_atom_single_excitation(config, t_end, dt)?,
        };
        Ok(Self::new(config.clone(), traj))
    }

    pub fn omega_a(&self) -> f64 {
        self.config.omega_a
    }

    /// `(Φ_R, Φ_L)` at `(z, t)`.
    pub fn field(&self, z: f64, t: f64) -> Result<(C64, C64)> {
        let wa = self.omega_a();
        Ok((
            self.right.eval(z, t, &self.trajectory, wa)?,
            self.left.eval(z, t, &self.trajectory, wa)?,
        ))
    }

    /// Default snapshot grid: spacing at most `dt`, covering `[0, z_out + t]`.
    pub fn default_z_grid(&self, t: f64) -> Vec<f64> {
        let extent = self.outermost() + t;
        let n = (extent / self.trajectory.dt()).ceil().max(1.0) as usize;
        (0..=n).map(|i| extent * i as f64 / n as f64).collect()
    }

    pub fn snapshot(&self, t: f64, z_values: Vec<f64>) -> Result<FieldSnapshot> {
        FieldSnapshot::capture(&self.right, &self.left, &self.trajectory, self.omega_a(), t, z_values)
    }

    fn outermost(&self) -> f64 {
        self.config.atoms.last().map_or(0.0, |a| a.position)
    }

    /// Atomic populations `|c_j(t)|²`.
    pub fn atom_populations(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.trajectory.sample(t)?.iter().map(C64::norm_sqr).collect())
    }

    /// `∫ (|Φ_R|² + |Φ_L|²) dz` at time `t`, by the trapezoid rule with
    /// spacing at most `dt` on each interval where the packets are smooth.
    /// Interval ends are taken as one-sided limits, so the jumps at atoms and
    /// wave fronts do not leak into neighbouring intervals.
    pub fn photon_probability(&self, t: f64) -> Result<f64> {
        let wa = self.omega_a();
        let h = self.trajectory.dt();
        let extent = self.outermost() + t;
        let mut total = 0.0;
        for packet in [&self.right, &self.left] {
            for (si, seg) in packet.segments.iter().enumerate() {
                let lo = seg.z_lo;
                let hi = seg.z_hi.min(extent);
                if hi <= lo {
                    continue;
                }
                let mut cuts = vec![lo, hi];
                for term in &seg.amplitude.terms {
                    let z = packet.front(term, t);
                    if z > lo && z < hi {
                        cuts.push(z);
                    }
                }
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                for w in cuts.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    let n = ((b - a) / h).ceil().max(1.0) as usize;
                    let dz = (b - a) / n as f64;
                    let nudge = 1e-9 * dz;
                    let mut sum = 0.0;
                    for i in 0..=n {
                        let z = match i {
                            0 => a + nudge,
                            _ if i == n => b - nudge,
                            _ => a + i as f64 * dz,
                        };
                        let v = packet.eval_in_segment(si, z, t, &self.trajectory, wa)?.norm_sqr();
                        sum += if i == 0 || i == n { 0.5 * v } else { v };
                    }
                    total += sum * dz;
                }
            }
        }
        Ok(total)
    }

    /// Atoms plus photon: one for exact dynamics.
    pub fn total_probability(&self, t: f64) -> Result<f64> {
        Ok(self.atom_populations(t)?.iter().sum::<f64>() + self.photon_probability(t)?)
    }

    /// `g_r(t - z_1) - f_r(t - z_1)` against `γ_1R c_1(t) e^{-i ω_a t}`:
    /// the jump of the right-moving packet across atom 1.
    pub fn right_jump_residual(&self, t: f64) -> Result<f64> {
        let wa = self.omega_a();
        let a1 = self.config.atoms[0];
        let z = a1.position;
        let inner = self.right.eval_in_segment(0, z, t, &self.trajectory, wa)?;
        let outer = self.right.eval_in_segment(1, z, t, &self.trajectory, wa)?;
        let c1 = self.trajectory.sample_component(t, 0)?;
        Ok((outer - inner - c1 * C64::from_polar(a1.gamma_r, -wa * t)).norm())
    }

    /// `g_l(t + z_2)` against `γ_2L c_2(t) e^{-i ω_a t}`: the left packet
    /// leaving the outer atom.
    pub fn left_source_residual(&self, t: f64) -> Result<f64> {
        let wa = self.omega_a();
        let last = self.config.atoms.len() - 1;
        let a = self.config.atoms[last];
        let edge = self.left.eval_in_segment(last, a.position, t, &self.trajectory, wa)?;
        let c = self.trajectory.sample_component(t, last)?;
        Ok((edge - c * C64::from_polar(a.gamma_l, -wa * t)).norm())
    }
}

/// `(Φ_R, Φ_L)` of a single atom at `(z, t)`.
pub fn eval_single_atom_field(z: f64, t: f64, ce: &Trajectory, atom: &AtomParams, omega_a: f64) -> Result<(C64, C64)> {
    let config = NetworkConfig::single_atom("single", omega_a, *atom);
    SpatialModel::new(config, ce.clone()).field(z, t)
}

/// `(Φ_g^r, Φ_g^l)` of the two-atom single-excitation problem at `(z, t)`.
pub fn eval_two_atom_field(z: f64, t: f64, trajs: &Trajectory, config: &NetworkConfig) -> Result<(C64, C64)> {
    SpatialModel::new(config.clone(), trajs.clone()).field(z, t)
}
