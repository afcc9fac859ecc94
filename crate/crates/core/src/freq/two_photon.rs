use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::freq::cascade::SpectralPairs;
use crate::freq::state::CkkMatrix;
use crate::model::{mode_coupling, NetworkConfig};

/// Two-photon amplitude from the trapezoid rule in time.
#[derive(Clone, Debug)]
pub struct TwoPhotonSolution {
    /// Checkpoint times, ascending; the last one is where `c_kk` was kept.
    pub times: Vec<f64>,
    /// `½ ΣΣ |c_kk|² dk²` at each checkpoint.
    pub norms: Vec<f64>,
    pub c_kk: CkkMatrix,
}

/// Accumulates `X = Σ_n w_n (c_egk(t_n) ⊗ G1(t_n) + c_gek(t_n) ⊗ G2(t_n))`
/// so that `c_kk = -i (X + Xᵀ)`, which is symmetric by construction.
///
/// `checkpoints` are node indices (sorted, deduplicated internally); the
/// norm is reported at each, and the matrix at the largest.
pub fn solve_two_photon(
    config: &NetworkConfig,
    pairs: &SpectralPairs,
    checkpoints: &[usize],
) -> Result<TwoPhotonSolution> {
    let n_nodes = pairs.n_nodes();
    let mut marks: Vec<usize> = checkpoints.to_vec();
    marks.sort_unstable();
    marks.dedup();
    if marks.is_empty() || marks[marks.len() - 1] >= n_nodes {
        return Err(Error::InvalidArgument(format!(
            "checkpoints must be node indices below {n_nodes}"
        )));
    }

    let grid = pairs.kgrid();
    let n = grid.len();
    let dk = grid.dk();
    let h = pairs.trajectory(0).dt();
    let (a1, a2) = config.atom_pair();
    let wa = config.omega_a;
    let g1_0: Vec<C64> = grid
        .k_values()
        .iter()
        .map(|&k| mode_coupling(k, 0.0, &a1, wa))
        .collect();
    let g2_0: Vec<C64> = grid
        .k_values()
        .iter()
        .map(|&k| mode_coupling(k, 0.0, &a2, wa))
        .collect();

    let mut x = vec![C64::new(0.0, 0.0); n * n];
    let mut times = Vec::with_capacity(marks.len());
    let mut norms = Vec::with_capacity(marks.len());
    let mut start = 0usize;

    // Cap the chunk width so the stacked operands stay small.
    const MAX_CHUNK: usize = 256;

    for &mark in &marks {
        let mut lo = start;
        while lo < mark {
            let hi = (lo + MAX_CHUNK).min(mark);
            accumulate_chunk(&mut x, pairs, &g1_0, &g2_0, grid.k_values(), wa, h, lo, hi);
            lo = hi;
        }
        start = mark;
        times.push(pairs.time(mark));
        norms.push(symmetrized_norm(&x, n, dk));
    }

    let mut ckk = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            ckk[i * n + j] = -C64::i() * (x[i * n + j] + x[j * n + i]);
        }
    }
    Ok(TwoPhotonSolution {
        times,
        norms,
        c_kk: CkkMatrix::from_row_major(n, ckk),
    })
}

fn symmetrized_norm(x: &[C64], n: usize, dk: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        s += (x[i * n + i] * 2.0).norm_sqr();
        for j in i + 1..n {
            s += 2.0 * (x[i * n + j] + x[j * n + i]).norm_sqr();
        }
    }
    0.5 * dk * dk * s
}

/// Trapezoid contribution of nodes `lo..=hi`, with half weight at both ends.
#[allow(clippy::too_many_arguments)]
fn accumulate_chunk(
    x: &mut [C64],
    pairs: &SpectralPairs,
    g1_0: &[C64],
    g2_0: &[C64],
    ks: &[f64],
    wa: f64,
    h: f64,
    lo: usize,
    hi: usize,
) {
    let n = ks.len();
    let m = 2 * (hi - lo + 1);
    // lhs[r * n + k] and rhs[r * n + k] for stacked rank-one terms r
    let mut lhs = vec![C64::new(0.0, 0.0); m * n];
    let mut rhs = vec![C64::new(0.0, 0.0); m * n];
    for (k, tr) in (0..n).map(|k| (k, pairs.trajectory(k))) {
        for node in lo..=hi {
            let w = if node == lo || node == hi { 0.5 * h } else { h };
            let s = tr.node(node);
            let r = 2 * (node - lo);
            lhs[r * n + k] = s[0] * w;
            lhs[(r + 1) * n + k] = s[1] * w;
        }
    }
    for node in lo..=hi {
        let t = pairs.time(node);
        let r = 2 * (node - lo);
        for k in 0..n {
            let ph = C64::cis((ks[k] - wa) * t);
            rhs[r * n + k] = g1_0[k] * ph;
            rhs[(r + 1) * n + k] = g2_0[k] * ph;
        }
    }
    let one = [1.0, 0.0];
    // X[i, j] += Σ_r lhs[r, i] rhs[r, j]
    // SAFETY: Complex64 is #[repr(C)] { re, im }, layout-compatible with
    // [f64; 2]; all strides address inside the allocated buffers.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            n,
            m,
            n,
            one,
            lhs.as_ptr() as *const [f64; 2],
            1,
            n as isize,
            rhs.as_ptr() as *const [f64; 2],
            n as isize,
            1,
            one,
            x.as_mut_ptr() as *mut [f64; 2],
            n as isize,
            1,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freq::cascade::{solve_cee, solve_spectral_pair};
    use crate::model::{AtomParams, KGrid};

    fn small_run(c: &NetworkConfig) -> (SpectralPairs, TwoPhotonSolution) {
        let dt = c.default_dt();
        let t_end = 0.8;
        let cee = solve_cee(c, t_end, dt).unwrap();
        let grid = KGrid::uniform(c.omega_a, 8.0, 41).unwrap();
        let pairs = solve_spectral_pair(c, &cee, &grid, t_end, dt).unwrap();
        let last = pairs.n_nodes() - 1;
        let sol = solve_two_photon(c, &pairs, &[last / 3, last]).unwrap();
        (pairs, sol)
    }

    fn chiral() -> NetworkConfig {
        NetworkConfig::two_atoms(
            "c",
            50.0,
            AtomParams::new(0.1, 0.25, 0.5),
            AtomParams::new(0.2, 0.25, 0.5),
        )
    }

    #[test]
    fn exchange_symmetry_is_exact() {
        let (_, sol) = small_run(&chiral());
        assert!(sol.c_kk.max_asymmetry() < 1e-12);
        assert_eq!(sol.norms.len(), 2);
        assert!(sol.norms[1] > sol.norms[0]);
    }

    #[test]
    fn decoupled_network_emits_nothing() {
        let c = NetworkConfig::two_atoms(
            "off",
            50.0,
            AtomParams::new(0.1, 0.0, 0.0),
            AtomParams::new(0.2, 0.0, 0.0),
        );
        let (_, sol) = small_run(&c);
        assert!(sol.c_kk.as_slice().iter().all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn matches_direct_quadrature() {
        let c = chiral();
        let (pairs, sol) = small_run(&c);
        let (a1, a2) = c.atom_pair();
        let grid = pairs.kgrid();
        let h = pairs.trajectory(0).dt();
        let last = pairs.n_nodes() - 1;
        for &(i, j) in &[(3usize, 17usize), (20, 20), (40, 0)] {
            let (ki, kj) = (grid.k_values()[i], grid.k_values()[j]);
            let mut acc = C64::new(0.0, 0.0);
            for node in 0..=last {
                let t = pairs.time(node);
                let si = pairs.trajectory(i).node(node);
                let sj = pairs.trajectory(j).node(node);
                let f = si[0] * mode_coupling(kj, t, &a1, 50.0)
                    + sj[0] * mode_coupling(ki, t, &a1, 50.0)
                    + si[1] * mode_coupling(kj, t, &a2, 50.0)
                    + sj[1] * mode_coupling(ki, t, &a2, 50.0);
                let w = if node == 0 || node == last { 0.5 * h } else { h };
                acc += f * w;
            }
            let expect = -C64::i() * acc;
            assert!((sol.c_kk.get(i, j) - expect).norm() < 1e-12, "({i},{j})");
        }
    }
}
