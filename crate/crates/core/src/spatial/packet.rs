use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::dde::Trajectory;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Right,
    Left,
}

/// `coef · c_atom(s + shift) · e^{-i ω_a (s + shift)}`, where `s` is the
/// retarded (`t - z`) or advanced (`t + z`) time of the packet. The term is
/// exactly zero while `s + shift < onset`, the earliest time the atom can
/// hold any excitation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceTerm {
    pub atom: usize,
    pub coef: f64,
    pub shift: f64,
    pub onset: f64,
}

/// Sum of emitted contributions making up one packet segment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RetardedAmplitude {
    pub terms: Vec<SourceTerm>,
}

impl RetardedAmplitude {
    fn push(&mut self, atom: usize, coef: f64, shift: f64) {
        if coef != 0.0 {
            self.terms.push(SourceTerm {
                atom,
                coef,
                shift,
                onset: 0.0,
            });
        }
    }

    pub fn eval(&self, s: f64, traj: &Trajectory, omega_a: f64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for term in &self.terms {
            let u = s + term.shift;
            if u < term.onset {
                continue;
            }
            let c = traj.sample_component(u, term.atom)?;
            acc += c * C64::from_polar(term.coef, -omega_a * u);
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub z_lo: f64,
    /// `f64::INFINITY` for the outermost right-moving segment.
    pub z_hi: f64,
    pub amplitude: RetardedAmplitude,
}

/// A one-photon wave packet assembled from per-interval formulas. The
/// segments are contiguous and start at the mirror; at a segment boundary
/// (including `z = 0` and the far end of a finite packet) the step function
/// takes the value one half.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentedPacket {
    pub direction: Direction,
    pub segments: Vec<Segment>,
}

impl SegmentedPacket {
    /// Right-moving packet for atoms at `positions` with couplings
    /// `(γ_L, γ_R)`: between atoms m and m+1 it carries everything emitted
    /// to the left (after the mirror) plus the right emission of atoms 1..=m.
    pub fn right(positions: &[f64], couplings: &[(f64, f64)]) -> Self {
        let n = positions.len();
        let mut segments = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut amp = RetardedAmplitude::default();
            for j in 0..n {
                amp.push(j, -couplings[j].0, -positions[j]);
            }
            for j in 0..m {
                amp.push(j, couplings[j].1, positions[j]);
            }
            segments.push(Segment {
                z_lo: if m == 0 { 0.0 } else { positions[m - 1] },
                z_hi: if m == n { f64::INFINITY } else { positions[m] },
                amplitude: amp,
            });
        }
        Self {
            direction: Direction::Right,
            segments,
        }
    }

    /// Left-moving packet: between atoms m and m+1 it carries the left
    /// emission of the atoms further out; nothing lies beyond the last atom.
    pub fn left(positions: &[f64], couplings: &[(f64, f64)]) -> Self {
        let n = positions.len();
        let mut segments = Vec::with_capacity(n);
        for m in 0..n {
            let mut amp = RetardedAmplitude::default();
            for j in m..n {
                amp.push(j, couplings[j].0, -positions[j]);
            }
            segments.push(Segment {
                z_lo: if m == 0 { 0.0 } else { positions[m - 1] },
                z_hi: positions[m],
                amplitude: amp,
            });
        }
        Self {
            direction: Direction::Left,
            segments,
        }
    }

    /// Sets the onset of every term from a per-atom table.
    pub fn with_onsets(mut self, onsets: &[f64]) -> Self {
        for seg in &mut self.segments {
            for term in &mut seg.amplitude.terms {
                term.onset = onsets[term.atom];
            }
        }
        self
    }

    /// Position where the argument of `term` reaches its onset at time `t`.
    pub fn front(&self, term: &SourceTerm, t: f64) -> f64 {
        match self.direction {
            Direction::Right => t + term.shift - term.onset,
            Direction::Left => term.onset - t - term.shift,
        }
    }

    /// `t - z` or `t + z`.
    pub fn argument(&self, z: f64, t: f64) -> f64 {
        match self.direction {
            Direction::Right => t - z,
            Direction::Left => t + z,
        }
    }

    pub fn outer_edge(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.z_hi)
    }

    /// Amplitude at `(z, t)`.
    pub fn eval(&self, z: f64, t: f64, traj: &Trajectory, omega_a: f64) -> Result<C64> {
        let s = self.argument(z, t);
        let mut acc = C64::new(0.0, 0.0);
        for seg in &self.segments {
            let weight = step(z - seg.z_lo) - if seg.z_hi.is_finite() { step(z - seg.z_hi) } else { 0.0 };
            if weight != 0.0 {
                acc += seg.amplitude.eval(s, traj, omega_a)? * weight;
            }
        }
        Ok(acc)
    }

    /// Amplitude of the segment that contains `z`, without boundary
    /// averaging (`z` taken just inside `seg`).
    pub fn eval_in_segment(&self, seg: usize, z: f64, t: f64, traj: &Trajectory, omega_a: f64) -> Result<C64> {
        self.segments[seg].amplitude.eval(self.argument(z, t), traj, omega_a)
    }
}

/// Heaviside step with `Θ(0) = 1/2`.
pub fn step(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Right- and left-moving amplitudes on a z-grid at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSnapshot {
    pub t: f64,
    pub z_values: Vec<f64>,
    pub phi_r: Vec<C64>,
    pub phi_l: Vec<C64>,
}

impl FieldSnapshot {
    pub fn capture(
        right: &SegmentedPacket,
        left: &SegmentedPacket,
        traj: &Trajectory,
        omega_a: f64,
        t: f64,
        z_values: Vec<f64>,
    ) -> Result<Self> {
        let pairs = z_values
            .par_iter()
            .map(|&z| Ok((right.eval(z, t, traj, omega_a)?, left.eval(z, t, traj, omega_a)?)))
            .collect::<Result<Vec<_>>>()?;
        let (phi_r, phi_l) = pairs.into_iter().unzip();
        Ok(Self {
            t,
            z_values,
            phi_r,
            phi_l,
        })
    }
}

/// `|Φ_R(0, t) + Φ_L(0, t)|`: zero for a perfect mirror.
pub fn check_mirror_boundary(snapshot: &FieldSnapshot) -> Result<f64> {
    let i = snapshot
        .z_values
        .iter()
        .position(|&z| z == 0.0)
        .ok_or(Error::MissingOrigin)?;
    Ok((snapshot.phi_r[i] + snapshot.phi_l[i]).norm())
}
