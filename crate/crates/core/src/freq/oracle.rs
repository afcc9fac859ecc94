//! Brute-force reference: the untruncated amplitude equations on a k-grid,
//! integrated with classical RK4 and no delay approximation.
//!
//! The state holds `c_ee`, `c_egk`, `c_gek` and the symmetric `c_kk`, the
//! latter packed as an upper triangle. Its right-hand side is a symmetric
//! low-rank source, so each RK4 stage sees `C_n` plus a rank-4 correction,
//! and one pass over the packed matrix per step both applies the update and
//! forms the matrix-vector products needed by the next step.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::freq::state::{CkkMatrix, TwoExcitationState};
use crate::model::{mode_coupling, KGrid, NetworkConfig};

#[derive(Clone, Debug)]
pub struct OracleRun {
    pub times: Vec<f64>,
    pub c_ee: Vec<C64>,
    pub norms: Vec<f64>,
    pub populations: Vec<(f64, f64)>,
    pub final_state: TwoExcitationState,
}

/// Largest detuning on the grid times the step is kept at or below this.
const MAX_PHASE_PER_STEP: f64 = 0.25;

/// A step resolving the fastest coupling phase on `kgrid`.
pub fn default_oracle_dt(kgrid: &KGrid, omega_a: f64, t_end: f64) -> f64 {
    let ks = kgrid.k_values();
    let det = (ks[0] - omega_a).abs().max((ks[ks.len() - 1] - omega_a).abs());
    let steps = (t_end * det / MAX_PHASE_PER_STEP).ceil().max(t_end / 0.01).ceil();
    t_end / steps
}

#[derive(Clone)]
struct Split {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Split {
    fn zeros(n: usize) -> Self {
        Self {
            re: vec![0.0; n],
            im: vec![0.0; n],
        }
    }

    fn from(v: &[C64]) -> Self {
        Self {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    fn to_complex(&self) -> Vec<C64> {
        self.re.iter().zip(&self.im).map(|(&r, &i)| C64::new(r, i)).collect()
    }
}

/// Bilinear `Σ u_j x_j`.
fn dot(u: &[C64], x: &[C64]) -> C64 {
    u.iter().zip(x).map(|(a, b)| a * b).sum()
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Adds `coef · (u vᵀ + v uᵀ) x` to `y`.
fn add_sym_apply(y: &mut [C64], coef: C64, u: &[C64], v: &[C64], x: &[C64]) {
    axpy(y, coef * dot(v, x), u);
    axpy(y, coef * dot(u, x), v);
}

struct Packed {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Packed {
    fn zeros(n: usize) -> Self {
        let len = n * (n + 1) / 2;
        Self {
            n,
            re: vec![0.0; len],
            im: vec![0.0; len],
        }
    }

    fn offset(&self, i: usize) -> usize {
        i * (2 * self.n - i + 1) / 2
    }

    fn unpack(&self) -> CkkMatrix {
        let n = self.n;
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let off = self.offset(i);
            for j in i..n {
                let v = C64::new(self.re[off + j - i], self.im[off + j - i]);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        CkkMatrix::from_row_major(n, data)
    }

    /// Applies `C += Σ_p w_p (u_p v_pᵀ + v_p u_pᵀ)`, then sets
    /// `ys[r] = C xs[r]` for the updated matrix. Returns `ΣΣ |C_ij|²`.
    fn update_and_apply(&mut self, updates: &[(C64, Split, Split)], xs: &[Split], ys: &mut [Split]) -> f64 {
        let n = self.n;
        for y in ys.iter_mut() {
            y.re.fill(0.0);
            y.im.fill(0.0);
        }
        let mut norm_sq = 0.0;
        for i in 0..n {
            let off = self.offset(i);
            let len = n - i;
            let cr = &mut self.re[off..off + len];
            let ci = &mut self.im[off..off + len];

            for (w, u, v) in updates {
                for (s, vec) in [(C64::new(u.re[i], u.im[i]) * w, v), (C64::new(v.re[i], v.im[i]) * w, u)] {
                    let (vr, vi) = (&vec.re[i..], &vec.im[i..]);
                    for j in 0..len {
                        cr[j] += s.re * vr[j] - s.im * vi[j];
                        ci[j] += s.re * vi[j] + s.im * vr[j];
                    }
                }
            }

            for (x, y) in xs.iter().zip(ys.iter_mut()) {
                let (xr, xi) = (&x.re[i..], &x.im[i..]);
                let mut acc_r = [0.0f64; 4];
                let mut acc_i = [0.0f64; 4];
                let body = len / 4 * 4;
                for j0 in (0..body).step_by(4) {
                    for l in 0..4 {
                        let j = j0 + l;
                        acc_r[l] += cr[j] * xr[j] - ci[j] * xi[j];
                        acc_i[l] += cr[j] * xi[j] + ci[j] * xr[j];
                    }
                }
                let mut dr = acc_r.iter().sum::<f64>();
                let mut di = acc_i.iter().sum::<f64>();
                for j in body..len {
                    dr += cr[j] * xr[j] - ci[j] * xi[j];
                    di += cr[j] * xi[j] + ci[j] * xr[j];
                }
                y.re[i] += dr;
                y.im[i] += di;
                // transposed contribution from the strictly upper part
                let (sr, si) = (x.re[i], x.im[i]);
                let (yr, yi) = (&mut y.re[i + 1..], &mut y.im[i + 1..]);
                for j in 1..len {
                    yr[j - 1] += cr[j] * sr - ci[j] * si;
                    yi[j - 1] += cr[j] * si + ci[j] * sr;
                }
            }

            let mut row = 0.0;
            for j in 1..len {
                row += cr[j] * cr[j] + ci[j] * ci[j];
            }
            norm_sq += 2.0 * row + cr[0] * cr[0] + ci[0] * ci[0];
        }
        norm_sq
    }
}

/// Integrates the discretized two-excitation equations on `[0, t_end]` from
/// both atoms excited. The step is shrunk so `t_end` is a node.
pub fn oracle_full_grid(config: &NetworkConfig, kgrid: &KGrid, t_end: f64, dt: f64) -> Result<OracleRun> {
    config.validate()?;
    if !(dt.is_finite() && dt > 0.0 && t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and t_end > 0 (got {dt}, {t_end})"
        )));
    }
    let steps = ((t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let n = kgrid.len();
    let dk = kgrid.dk();
    let wa = config.omega_a;
    let (a1, a2) = config.atom_pair();
    let ks = kgrid.k_values();
    let g1_0: Vec<C64> = ks.iter().map(|&k| mode_coupling(k, 0.0, &a1, wa)).collect();
    let g2_0: Vec<C64> = ks.iter().map(|&k| mode_coupling(k, 0.0, &a2, wa)).collect();

    // G_j(·, t) and dk · conj(G_j(·, t))
    let couplings = |t: f64| -> [Vec<C64>; 4] {
        let ph: Vec<C64> = ks.iter().map(|&k| C64::cis((k - wa) * t)).collect();
        let g1: Vec<C64> = g1_0.iter().zip(&ph).map(|(g, p)| g * p).collect();
        let g2: Vec<C64> = g2_0.iter().zip(&ph).map(|(g, p)| g * p).collect();
        let x1 = g1.iter().map(|g| g.conj() * dk).collect();
        let x2 = g2.iter().map(|g| g.conj() * dk).collect();
        [g1, g2, x1, x2]
    };

    let mi = -C64::i();
    let zero = C64::new(0.0, 0.0);
    let mut e = C64::new(1.0, 0.0);
    let mut a = vec![zero; n];
    let mut c = vec![zero; n];
    let mut ckk = Packed::zeros(n);
    // C_n x for x = x1, x2 at t_n, t_n + h/2, t_n + h
    let mut prod: Vec<Vec<C64>> = vec![vec![zero; n]; 6];

    let mut times = Vec::with_capacity(steps + 1);
    let mut cee = Vec::with_capacity(steps + 1);
    let mut norms = Vec::with_capacity(steps + 1);
    let mut pops = Vec::with_capacity(steps + 1);

    let record = |t: f64,
                  e: C64,
                  a: &[C64],
                  c: &[C64],
                  csq: f64,
                  times: &mut Vec<f64>,
                  cee: &mut Vec<C64>,
                  norms: &mut Vec<f64>,
                  pops: &mut Vec<(f64, f64)>| {
        let sa: f64 = a.iter().map(C64::norm_sqr).sum::<f64>() * dk;
        let sc: f64 = c.iter().map(C64::norm_sqr).sum::<f64>() * dk;
        let ee = e.norm_sqr();
        times.push(t);
        cee.push(e);
        norms.push(ee + sa + sc + 0.5 * dk * dk * csq);
        pops.push((ee + sa, ee + sc));
    };
    record(0.0, e, &a, &c, 0.0, &mut times, &mut cee, &mut norms, &mut pops);

    // derivative of (e, a, c) given the stage's C x products
    let deriv = |e: C64, a: &[C64], c: &[C64], cx1: &[C64], cx2: &[C64], g: &[Vec<C64>; 4]| {
        let de = mi * (dot(a, &g[3]) + dot(c, &g[2]));
        let da: Vec<C64> = (0..n).map(|k| mi * (e * g[1][k] + cx1[k])).collect();
        let dc: Vec<C64> = (0..n).map(|k| mi * (e * g[0][k] + cx2[k])).collect();
        (de, da, dc)
    };
    let shift = |y: &[C64], d: &[C64], s: f64| -> Vec<C64> { y.iter().zip(d).map(|(y, d)| y + d * s).collect() };

    let mut g_now = couplings(0.0);
    for step in 0..steps {
        let t = step as f64 * h;
        let g_mid = couplings(t + 0.5 * h);
        let g_end = couplings((step + 1) as f64 * h);

        let (de1, da1, dc1) = deriv(e, &a, &c, &prod[0], &prod[1], &g_now);

        // C_2 = C_n + (h/2) K_1, K_1 = -i sym(a ⊗ G1 + c ⊗ G2) at t
        let mut cx = [prod[2].clone(), prod[3].clone()];
        for (r, x) in [&g_mid[2], &g_mid[3]].into_iter().enumerate() {
            add_sym_apply(&mut cx[r], mi * (0.5 * h), &a, &g_now[0], x);
            add_sym_apply(&mut cx[r], mi * (0.5 * h), &c, &g_now[1], x);
        }
        let (e2, a2s, c2s) = (e + de1 * (0.5 * h), shift(&a, &da1, 0.5 * h), shift(&c, &dc1, 0.5 * h));
        let (de2, da2, dc2) = deriv(e2, &a2s, &c2s, &cx[0], &cx[1], &g_mid);

        let mut cx = [prod[2].clone(), prod[3].clone()];
        for (r, x) in [&g_mid[2], &g_mid[3]].into_iter().enumerate() {
            add_sym_apply(&mut cx[r], mi * (0.5 * h), &a2s, &g_mid[0], x);
            add_sym_apply(&mut cx[r], mi * (0.5 * h), &c2s, &g_mid[1], x);
        }
        let (e3, a3s, c3s) = (e + de2 * (0.5 * h), shift(&a, &da2, 0.5 * h), shift(&c, &dc2, 0.5 * h));
        let (de3, da3, dc3) = deriv(e3, &a3s, &c3s, &cx[0], &cx[1], &g_mid);

        let mut cx = [prod[4].clone(), prod[5].clone()];
        for (r, x) in [&g_end[2], &g_end[3]].into_iter().enumerate() {
            add_sym_apply(&mut cx[r], mi * h, &a3s, &g_mid[0], x);
            add_sym_apply(&mut cx[r], mi * h, &c3s, &g_mid[1], x);
        }
        let (e4, a4s, c4s) = (e + de3 * h, shift(&a, &da3, h), shift(&c, &dc3, h));
        let (de4, da4, dc4) = deriv(e4, &a4s, &c4s, &cx[0], &cx[1], &g_end);

        let w = h / 6.0;
        let e_next = e + (de1 + (de2 + de3) * 2.0 + de4) * w;
        let combine = |y: &[C64], d1: &[C64], d2: &[C64], d3: &[C64], d4: &[C64]| -> Vec<C64> {
            (0..n)
                .map(|k| y[k] + (d1[k] + (d2[k] + d3[k]) * 2.0 + d4[k]) * w)
                .collect()
        };
        let a_next = combine(&a, &da1, &da2, &da3, &da4);
        let c_next = combine(&c, &dc1, &dc2, &dc3, &dc4);

        let a23: Vec<C64> = a2s.iter().zip(&a3s).map(|(x, y)| x + y).collect();
        let c23: Vec<C64> = c2s.iter().zip(&c3s).map(|(x, y)| x + y).collect();
        let coef = mi * w;
        let updates = [
            (coef, Split::from(&a), Split::from(&g_now[0])),
            (coef, Split::from(&c), Split::from(&g_now[1])),
            (coef * 2.0, Split::from(&a23), Split::from(&g_mid[0])),
            (coef * 2.0, Split::from(&c23), Split::from(&g_mid[1])),
            (coef, Split::from(&a4s), Split::from(&g_end[0])),
            (coef, Split::from(&c4s), Split::from(&g_end[1])),
        ];

        let t_next = (step + 1) as f64 * h;
        let g_next_mid = couplings(t_next + 0.5 * h);
        let g_next_end = couplings(t_next + h);
        let xs = [
            Split::from(&g_end[2]),
            Split::from(&g_end[3]),
            Split::from(&g_next_mid[2]),
            Split::from(&g_next_mid[3]),
            Split::from(&g_next_end[2]),
            Split::from(&g_next_end[3]),
        ];
        let mut ys: Vec<Split> = (0..6).map(|_| Split::zeros(n)).collect();
        let ckk_norm_sq = ckk.update_and_apply(&updates, &xs, &mut ys);
        for (p, y) in prod.iter_mut().zip(&ys) {
            *p = y.to_complex();
        }

        e = e_next;
        a = a_next;
        c = c_next;
        if !(e.re.is_finite() && e.im.is_finite()) || !ckk_norm_sq.is_finite() {
            return Err(Error::NonFiniteState { t: t_next });
        }
        record(
            t_next,
            e,
            &a,
            &c,
            ckk_norm_sq,
            &mut times,
            &mut cee,
            &mut norms,
            &mut pops,
        );
        g_now = g_end;
    }

    let final_state = TwoExcitationState {
        c_ee: e,
        c_egk: a,
        c_gek: c,
        c_kk: ckk.unpack(),
    };
    Ok(OracleRun {
        times,
        c_ee: cee,
        norms,
        populations: pops,
        final_state,
    })
}
