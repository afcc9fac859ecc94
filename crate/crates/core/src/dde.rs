//! Fixed-step RK4 for complex delay differential equations with constant
//! delays, using the method of steps and cubic Hermite dense output.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// A system `x'(t) = f(t, x(t), x(t - τ_1), ..., x(t - τ_d))`.
pub trait DelaySystem: Sync {
    fn dim(&self) -> usize;

    /// Distinct, ascending, non-negative delays.
    fn delays(&self) -> &[f64];

    /// Writes the derivative into `out`. `delayed[d * dim + i]` holds
    /// component `i` of the state evaluated at `t - delays()[d]`.
    fn rhs(&self, t: f64, state: &[C64], delayed: &[C64], out: &mut [C64]);
}

/// A [`DelaySystem`] backed by a closure.
pub struct FnSystem<F> {
    dim: usize,
    delays: Vec<f64>,
    f: F,
}

impl<F> FnSystem<F>
where
    F: Fn(f64, &[C64], &[C64], &mut [C64]) + Sync,
{
    /// Delays are sorted; duplicates are not allowed.
    pub fn new(dim: usize, mut delays: Vec<f64>, f: F) -> Self {
        delays.sort_by(f64::total_cmp);
        debug_assert!(delays.windows(2).all(|w| w[0] < w[1]), "delays must be distinct");
        Self { dim, delays, f }
    }
}

impl<F> DelaySystem for FnSystem<F>
where
    F: Fn(f64, &[C64], &[C64], &mut [C64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn delays(&self) -> &[f64] {
        &self.delays
    }

    fn rhs(&self, t: f64, state: &[C64], delayed: &[C64], out: &mut [C64]) {
        (self.f)(t, state, delayed, out)
    }
}

/// `x_i' = Σ_j A_ij x_j + Σ_terms coef · x_src(t - τ) + drive_i(t)`.
///
/// Terms with a zero coefficient are dropped when added, and delays that
/// coincide share one history lookup.
pub struct LinearDelaySystem<D = fn(f64, &mut [C64])> {
    dim: usize,
    local: Vec<C64>,
    delays: Vec<f64>,
    terms: Vec<(usize, usize, usize, C64)>,
    drive: D,
}

impl LinearDelaySystem {
    pub fn new(dim: usize) -> Self {
        fn no_drive(_: f64, _: &mut [C64]) {}
        Self::with_drive(dim, no_drive)
    }
}

impl<D> LinearDelaySystem<D>
where
    D: Fn(f64, &mut [C64]) + Sync,
{
    /// `drive(t, out)` adds the inhomogeneous part into `out`.
    pub fn with_drive(dim: usize, drive: D) -> Self {
        Self {
            dim,
            local: vec![C64::new(0.0, 0.0); dim * dim],
            delays: Vec::new(),
            terms: Vec::new(),
            drive,
        }
    }

    pub fn add_local(&mut self, target: usize, source: usize, coef: C64) -> &mut Self {
        self.local[target * self.dim + source] += coef;
        self
    }

    pub fn add_delayed(&mut self, target: usize, source: usize, delay: f64, coef: C64) -> &mut Self {
        if coef == C64::new(0.0, 0.0) {
            return self;
        }
        let scale = delay.abs().max(1.0);
        let idx = match self.delays.iter().position(|&d| (d - delay).abs() <= 1e-12 * scale) {
            Some(i) => i,
            None => {
                let i = self.delays.partition_point(|&d| d < delay);
                self.delays.insert(i, delay);
                for term in &mut self.terms {
                    if term.0 >= i {
                        term.0 += 1;
                    }
                }
                i
            }
        };
        self.terms.push((idx, target, source, coef));
        self
    }
}

impl<D> DelaySystem for LinearDelaySystem<D>
where
    D: Fn(f64, &mut [C64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn delays(&self) -> &[f64] {
        &self.delays
    }

    fn rhs(&self, t: f64, state: &[C64], delayed: &[C64], out: &mut [C64]) {
        let n = self.dim;
        for (o, row) in out.iter_mut().zip(self.local.chunks_exact(n)) {
            *o = row.iter().zip(state).map(|(a, x)| a * x).sum();
        }
        for &(d, target, source, coef) in &self.terms {
            out[target] += coef * delayed[d * n + source];
        }
        (self.drive)(t, out);
    }
}

/// Sorts delays and merges those that agree to within a few ulps of the
/// largest one.
pub fn dedup_delays(mut delays: Vec<f64>) -> Vec<f64> {
    delays.sort_by(f64::total_cmp);
    let scale = delays.last().copied().unwrap_or(0.0).abs().max(1.0);
    delays.dedup_by(|b, a| (*b - *a).abs() <= 1e-12 * scale);
    delays
}

/// Uniformly spaced nodes with their derivatives, queried by cubic Hermite
/// interpolation. Times before `t0` answer with the pre-history value.
#[derive(Clone, Debug)]
pub struct HistoryBuffer {
    t0: f64,
    dt: f64,
    dim: usize,
    states: Vec<C64>,
    derivatives: Vec<C64>,
    prehistory: Vec<C64>,
}

impl HistoryBuffer {
    fn new(t0: f64, dt: f64, prehistory: Vec<C64>, capacity: usize) -> Self {
        let dim = prehistory.len();
        Self {
            t0,
            dt,
            dim,
            states: Vec::with_capacity(capacity * dim),
            derivatives: Vec::with_capacity(capacity * dim),
            prehistory,
        }
    }

    fn push(&mut self, state: &[C64], derivative: &[C64]) {
        self.states.extend_from_slice(state);
        self.derivatives.extend_from_slice(derivative);
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_last(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn state(&self, i: usize) -> &[C64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn derivative(&self, i: usize) -> &[C64] {
        &self.derivatives[i * self.dim..(i + 1) * self.dim]
    }

    pub fn prehistory(&self) -> &[C64] {
        &self.prehistory
    }

    /// Value at `t`; callers guarantee `t <= t_last()` up to rounding.
    pub fn eval_into(&self, t: f64, out: &mut [C64]) {
        let dim = self.dim;
        let x = (t - self.t0) / self.dt;
        if x < -1e-9 || self.is_empty() {
            out.copy_from_slice(&self.prehistory);
            return;
        }
        let last = self.len() - 1;
        let nearest = x.round();
        if nearest <= last as f64 {
            let i = nearest as usize;
            // Within rounding of a node: return it verbatim.
            if self.time(i) == t || (x - nearest).abs() < 1e-9 {
                out.copy_from_slice(self.state(i));
                return;
            }
        }
        let x = x.max(0.0);
        let i = (x.floor() as usize).min(last.saturating_sub(1));
        if i == last {
            out.copy_from_slice(self.state(i));
            return;
        }
        let th = x - i as f64;
        let th2 = th * th;
        let om = 1.0 - th;
        let h00 = (1.0 + 2.0 * th) * om * om;
        let h10 = th * om * om * self.dt;
        let h01 = th2 * (3.0 - 2.0 * th);
        let h11 = th2 * (th - 1.0) * self.dt;
        let (y0, y1) = (self.state(i), self.state(i + 1));
        let (d0, d1) = (self.derivative(i), self.derivative(i + 1));
        for c in 0..dim {
            out[c] = y0[c] * h00 + d0[c] * h10 + y1[c] * h01 + d1[c] * h11;
        }
    }
}

/// Immutable record of an integration on `[t0, t_end]`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    buffer: HistoryBuffer,
    t_end: f64,
}

impl Trajectory {
    pub fn buffer(&self) -> &HistoryBuffer {
        &self.buffer
    }

    pub fn dim(&self) -> usize {
        self.buffer.dim
    }

    pub fn t0(&self) -> f64 {
        self.buffer.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dt(&self) -> f64 {
        self.buffer.dt
    }

    /// Number of stored nodes (steps + 1).
    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.buffer.time(i)
    }

    pub fn node(&self, i: usize) -> &[C64] {
        self.buffer.state(i)
    }

    /// Component `c` at every node.
    pub fn component(&self, c: usize) -> Vec<C64> {
        (0..self.len()).map(|i| self.node(i)[c]).collect()
    }

    pub fn sample_into(&self, t: f64, out: &mut [C64]) -> Result<()> {
        if t > self.t_end && t - self.t_end > 1e-9 * self.buffer.dt {
            return Err(Error::OutOfRange { t, t_end: self.t_end });
        }
        self.buffer.eval_into(t.min(self.t_end), out);
        Ok(())
    }

    pub fn sample(&self, t: f64) -> Result<Vec<C64>> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        self.sample_into(t, &mut out)?;
        Ok(out)
    }

    /// Single component of [`Trajectory::sample`].
    pub fn sample_component(&self, t: f64, c: usize) -> Result<C64> {
        if self.dim() == 1 {
            let mut out = [C64::new(0.0, 0.0)];
            self.sample_into(t, &mut out)?;
            Ok(out[0])
        } else {
            Ok(self.sample(t)?[c])
        }
    }
}

/// Value at `t = 0` equals the pre-history.
pub fn integrate<S: DelaySystem + ?Sized>(system: &S, prehistory: &[C64], t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate_from(system, prehistory, prehistory, t_end, dt)
}

/// Integrates on `[0, t_end]` from `initial` at `t = 0`, with the state
/// equal to `prehistory` for `t < 0`.
///
/// If `t_end / dt` is not an integer, the step is shrunk so that the last
/// node lands on `t_end`.
pub fn integrate_from<S: DelaySystem + ?Sized>(
    system: &S,
    initial: &[C64],
    prehistory: &[C64],
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let dim = system.dim();
    if initial.len() != dim || prehistory.len() != dim {
        return Err(Error::InvalidArgument(format!("state vectors must have length {dim}")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be > 0 (got {dt})")));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidArgument(format!("t_end must be > 0 (got {t_end})")));
    }
    let delays = system.delays();
    if let Some(min_pos) = delays.iter().copied().filter(|&d| d > 0.0).reduce(f64::min) {
        let bound = min_pos / 8.0;
        if dt > bound * (1.0 + 1e-12) {
            return Err(Error::StepTooLarge { dt, bound });
        }
    }

    let steps = ((t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let nd = delays.len();

    let mut buf = HistoryBuffer::new(0.0, h, prehistory.to_vec(), steps + 1);
    let zero = C64::new(0.0, 0.0);
    let mut delayed = vec![zero; nd * dim];
    let mut y = initial.to_vec();
    let mut k1 = vec![zero; dim];
    let mut k2 = vec![zero; dim];
    let mut k3 = vec![zero; dim];
    let mut k4 = vec![zero; dim];
    let mut stage = vec![zero; dim];

    let fill_delayed = |buf: &HistoryBuffer, t: f64, current: &[C64], delayed: &mut [C64]| {
        for (d, &tau) in delays.iter().enumerate() {
            let slot = &mut delayed[d * dim..(d + 1) * dim];
            if tau == 0.0 {
                slot.copy_from_slice(current);
            } else {
                buf.eval_into(t - tau, slot);
            }
        }
    };

    // The initial node must be in the buffer before any delayed lookup can
    // reach it, but its derivative needs those lookups; with every positive
    // delay > 0 the lookups at t = 0 only see the pre-history.
    fill_delayed(&buf, 0.0, &y, &mut delayed);
    system.rhs(0.0, &y, &delayed, &mut k1);
    buf.push(&y, &k1);

    for n in 0..steps {
        let t = buf.time(n);
        let th = t + 0.5 * h;
        let t1 = buf.time(n + 1);

        for c in 0..dim {
            stage[c] = y[c] + k1[c] * (0.5 * h);
        }
        fill_delayed(&buf, th, &stage, &mut delayed);
        system.rhs(th, &stage, &delayed, &mut k2);

        for c in 0..dim {
            stage[c] = y[c] + k2[c] * (0.5 * h);
        }
        fill_delayed(&buf, th, &stage, &mut delayed);
        system.rhs(th, &stage, &delayed, &mut k3);

        for c in 0..dim {
            stage[c] = y[c] + k3[c] * h;
        }
        fill_delayed(&buf, t1, &stage, &mut delayed);
        system.rhs(t1, &stage, &delayed, &mut k4);

        for c in 0..dim {
            y[c] += (k1[c] + (k2[c] + k3[c]) * 2.0 + k4[c]) * (h / 6.0);
        }
        if y.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFiniteState { t: t1 });
        }
        fill_delayed(&buf, t1, &y, &mut delayed);
        system.rhs(t1, &y, &delayed, &mut k1);
        buf.push(&y, &k1);
    }

    let t_end = buf.t_last();
    Ok(Trajectory { buffer: buf, t_end })
}

/// [`Trajectory::sample`] as a free function.
pub fn sample(traj: &Trajectory, t: f64) -> Result<Vec<C64>> {
    traj.sample(t)
}
