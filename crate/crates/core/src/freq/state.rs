use num_complex::Complex64 as C64;

use crate::model::KGrid;

/// Dense symmetric two-photon amplitude `c_kk[i][j]`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CkkMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CkkMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_row_major(n: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data has the wrong length");
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// `max |c[i][j] - c[j][i]|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).norm());
            }
        }
        worst
    }

    /// Probability carried by the two-photon sector, `½ ΣΣ |c_kk|² dk²`.
    ///
    /// `c_kk` counts each unordered photon pair twice (its source is the sum
    /// of both emission orders), hence the factor one half.
    pub fn norm(&self, dk: f64) -> f64 {
        0.5 * dk * dk * self.data.iter().map(C64::norm_sqr).sum::<f64>()
    }
}

/// Amplitudes of the two-excitation manifold on a k-grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoExcitationState {
    pub c_ee: C64,
    pub c_egk: Vec<C64>,
    pub c_gek: Vec<C64>,
    pub c_kk: CkkMatrix,
}

impl TwoExcitationState {
    /// Both atoms excited, field empty.
    pub fn initial(n: usize) -> Self {
        Self {
            c_ee: C64::new(1.0, 0.0),
            c_egk: vec![C64::new(0.0, 0.0); n],
            c_gek: vec![C64::new(0.0, 0.0); n],
            c_kk: CkkMatrix::zeros(n),
        }
    }
}

fn sum_sq(v: &[C64]) -> f64 {
    v.iter().map(C64::norm_sqr).sum()
}

/// `(P_e1, P_e2)`: excited population of each atom.
pub fn populations(state: &TwoExcitationState, kgrid: &KGrid) -> (f64, f64) {
    let ee = state.c_ee.norm_sqr();
    let dk = kgrid.dk();
    (ee + dk * sum_sq(&state.c_egk), ee + dk * sum_sq(&state.c_gek))
}

pub fn two_photon_norm(state: &TwoExcitationState, kgrid: &KGrid) -> f64 {
    state.c_kk.norm(kgrid.dk())
}

pub fn total_norm(state: &TwoExcitationState, kgrid: &KGrid) -> f64 {
    let dk = kgrid.dk();
    state.c_ee.norm_sqr() + dk * (sum_sq(&state.c_egk) + sum_sq(&state.c_gek)) + two_photon_norm(state, kgrid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_state_has_unit_norm_and_full_populations() {
        let grid = KGrid::uniform(50.0, 10.0, 21).unwrap();
        let s = TwoExcitationState::initial(21);
        assert_eq!(total_norm(&s, &grid), 1.0);
        assert_eq!(populations(&s, &grid), (1.0, 1.0));
        assert_eq!(s.c_kk.max_asymmetry(), 0.0);
    }

    #[test]
    fn norm_counts_each_sector_once() {
        let grid = KGrid::uniform(5.0, 1.0, 3).unwrap();
        let dk = grid.dk();
        let mut s = TwoExcitationState::initial(3);
        s.c_ee = C64::new(0.0, 0.6);
        s.c_egk[1] = C64::new(0.4 / dk.sqrt(), 0.0);
        s.c_gek[0] = C64::new(0.0, 0.4 / dk.sqrt());
        let mut m = vec![C64::new(0.0, 0.0); 9];
        // photons in modes 0 and 2 carry the remaining 0.32
        let v = 0.32f64.sqrt() / dk;
        m[2] = C64::new(v, 0.0);
        m[6] = C64::new(v, 0.0);
        s.c_kk = CkkMatrix::from_row_major(3, m);
        assert!((total_norm(&s, &grid) - 1.0).abs() < 1e-14);
        let (p1, p2) = populations(&s, &grid);
        assert!((p1 - 0.52).abs() < 1e-14 && (p2 - 0.52).abs() < 1e-14);
    }
}
