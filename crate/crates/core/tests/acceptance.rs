//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use wqsim::dde::{integrate, FnSystem};
use wqsim::freq::{default_oracle_dt, oracle_full_grid, solve_cee};
use wqsim::model::{AtomParams, KGrid, NetworkConfig};
use wqsim::scenarios::{preset, Resolved, SpatialRun, TwoExcitationRun};
use wqsim::spatial::solve_single_atom;
use wqsim::{Error, Result};

/// Sub-results of one criterion.
struct Outcome {
    parts: Vec<String>,
    passed: bool,
}

impl Outcome {
    fn new() -> Self {
        Self {
            parts: Vec::new(),
            passed: true,
        }
    }

    fn check(&mut self, what: &str, measured: String, bound: &str, ok: bool) {
        let mark = if ok { "" } else { " !" };
        self.parts.push(format!("{what} = {measured} ({bound}){mark}"));
        self.passed &= ok;
    }

    fn below(&mut self, what: &str, value: f64, limit: f64) {
        let bound = if limit < 1e-3 {
            format!("< {limit:e}")
        } else {
            format!("< {limit}")
        };
        self.check(what, format!("{value:.4e}"), &bound, value < limit);
    }

    fn at_least(&mut self, what: &str, value: f64, limit: f64) {
        self.check(what, format!("{value:.6}"), &format!(">= {limit}"), value >= limit);
    }

    fn within(&mut self, what: &str, took: Duration, limit: Duration) {
        self.check(
            what,
            format!("{:.1}s", took.as_secs_f64()),
            &format!("< {}s", limit.as_secs()),
            took < limit,
        );
    }
}

fn report(n: usize, title: &str, out: Result<Outcome>) -> bool {
    let (passed, detail) = match out {
        Ok(o) => (o.passed, o.parts.join("; ")),
        Err(e) => (false, format!("error: {e}")),
    };
    println!(
        "{} criterion {n} [{title}]: {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    passed
}

/// Borrows a result computed once and shared by several criteria.
fn reuse<T>(r: &Result<T>) -> Result<&T> {
    r.as_ref().map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, Duration)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed()))
}

fn preset_run(name: &str) -> Result<(TwoExcitationRun, Duration)> {
    let p = preset(name)?;
    timed(|| TwoExcitationRun::compute(p.config(), Resolved::new(p.config(), &p.run)?))
}

fn trapping(fig3: &Result<(TwoExcitationRun, Duration)>) -> Result<Outcome> {
    let (run, took) = reuse(fig3)?;
    let mut o = Outcome::new();
    let last = run.last_node();
    let (p1, p2) = run.populations(last);
    o.check(
        "P_e1(T)",
        format!("{p1:.6}"),
        "in [0.83, 0.89]",
        (0.83..=0.89).contains(&p1),
    );
    o.below("P_e2(T)", p2, 0.02);
    o.below("|c_ee(T)|²", run.cee_sq(last), 0.01);
    let k = run.kgrid.k_values()[run.spectral_argmax()];
    let dk = run.kgrid.dk();
    o.check(
        "argmax_k |c_egk(T)|",
        format!("{k:.4}"),
        &format!("50 ± {dk:.4}"),
        (k - run.config.omega_a).abs() <= dk * (1.0 + 1e-9),
    );
    o.below("two-photon norm", run.final_two_photon_norm(), 0.05);
    o.within("runtime", *took, Duration::from_secs(120));
    Ok(o)
}

fn emission(fig2: &Result<(TwoExcitationRun, Duration)>) -> Result<Outcome> {
    let (run, took) = reuse(fig2)?;
    let mut o = Outcome::new();
    let last = run.last_node();
    let (p1, p2) = run.populations(last);
    o.below("|c_ee(T)|²", run.cee_sq(last), 0.01);
    o.below("P_e1(T)", p1, 0.02);
    o.below("P_e2(T)", p2, 0.02);
    o.at_least("two-photon norm", run.final_two_photon_norm(), 0.95);
    o.within("runtime", *took, Duration::from_secs(120));
    Ok(o)
}

fn cee_squares(name: &str) -> Result<Vec<f64>> {
    let p = preset(name)?;
    let r = Resolved::new(p.config(), &p.run)?;
    let cee = solve_cee(p.config(), r.t_end, r.dt)?;
    Ok((0..cee.len()).map(|i| cee.node(i)[0].norm_sqr()).collect())
}

fn dark_state() -> Result<Outcome> {
    let mut o = Outcome::new();
    let solid = cee_squares("fig4_solid")?;
    o.at_least(
        "fig4_solid min_t |c_ee|²",
        solid.iter().copied().fold(f64::INFINITY, f64::min),
        0.9,
    );
    let dashed = cee_squares("fig4_dashed")?;
    o.below("fig4_dashed |c_ee(40τ)|²", dashed[dashed.len() - 1], 0.5);
    Ok(o)
}

fn single_atom(z: f64) -> Result<Vec<(f64, f64)>> {
    let atom = AtomParams::nonchiral(z, 0.2);
    let config = NetworkConfig::single_atom("one", 50.0, atom);
    let ce = solve_single_atom(&atom, 50.0, config.default_t_end(), config.default_dt())?;
    Ok((0..ce.len()).map(|i| (ce.time(i), ce.node(i)[0].norm_sqr())).collect())
}

fn decay_law() -> Result<Outcome> {
    let mut o = Outcome::new();
    let dev = single_atom(2.25 * PI / 50.0)?
        .iter()
        .map(|(t, p)| (p - (-0.08 * t).exp()).abs())
        .fold(0.0, f64::max);
    o.below("max_t | |c_e|² - e^(-0.08t) |", dev, 0.02);
    Ok(o)
}

fn atomic_mirror() -> Result<Outcome> {
    let mut o = Outcome::new();
    let ce = single_atom(PI / 50.0)?;
    o.at_least("|c_e(40τ)|²", ce[ce.len() - 1].1, 0.95);
    Ok(o)
}

fn oracle_deviation(config: &NetworkConfig, kgrid: &KGrid, t_end: f64, dt_cascade: f64, dt_oracle: f64) -> Result<f64> {
    let cee = solve_cee(config, t_end, dt_cascade)?;
    let orc = oracle_full_grid(config, kgrid, t_end, dt_oracle)?;
    let mut dev = 0.0f64;
    for (t, c) in orc.times.iter().zip(&orc.c_ee) {
        dev = dev.max((cee.sample_component(*t, 0)?.norm() - c.norm()).abs());
    }
    Ok(dev)
}

fn oracle_equivalence() -> Result<Outcome> {
    let mut o = Outcome::new();
    let p = preset("fig2")?;
    let config = p.config();
    let run = wqsim::scenarios::RunSettings {
        k_points: Some(2001),
        ..p.run.clone()
    };
    let r = Resolved::new(config, &run)?;
    let fine = r.kgrid(config)?;
    let coarse = KGrid::uniform(fine.center(), fine.half_width(), fine.len().div_ceil(2))?;
    let dt = default_oracle_dt(&fine, config.omega_a, r.t_end);
    let (dev_fine, took) = timed(|| oracle_deviation(config, &fine, r.t_end, r.dt, dt))?;
    o.below("L∞ | |c_ee| cascade - oracle | at N = 2001", dev_fine, 0.02);
    o.within("runtime", took, Duration::from_secs(600));
    let dev_coarse = oracle_deviation(config, &coarse, r.t_end, r.dt, dt)?;
    o.check(
        "difference at N = 1001 then 2001",
        format!("{dev_coarse:.4e} -> {dev_fine:.4e}"),
        "must shrink",
        dev_fine < dev_coarse,
    );
    Ok(o)
}

fn cross_domain() -> Result<Outcome> {
    let mut o = Outcome::new();
    let atom = AtomParams::new(2.25 * PI / 50.0, 0.1, 0.3);
    let lone = NetworkConfig::single_atom("one", 50.0, atom);
    let (t_end, dt) = (lone.default_t_end(), lone.default_dt());
    let spatial = solve_single_atom(&atom, 50.0, t_end, dt)?;
    let partner = AtomParams::new(3.0 * atom.position, 0.0, 0.0);
    for config in [lone.clone(), NetworkConfig::two_atoms("pair", 50.0, atom, partner)] {
        let freq = solve_cee(&config, t_end, dt)?;
        let dev = (0..spatial.len())
            .map(|i| (freq.node(i)[0] - spatial.node(i)[0]).norm())
            .fold(0.0, f64::max);
        o.below(
            &format!("{} atom(s): max_t |c_ee - c_e|", config.atoms.len()),
            dev,
            1e-10,
        );
    }
    Ok(o)
}

fn spatial_runs(name: &str) -> Result<Vec<SpatialRun>> {
    let p = preset(name)?;
    p.curves
        .iter()
        .map(|c| SpatialRun::compute(c, Resolved::new(c, &p.run)?))
        .collect()
}

fn conservation(
    fig2: &Result<(TwoExcitationRun, Duration)>,
    fig3: &Result<(TwoExcitationRun, Duration)>,
    fig6: &Result<Vec<SpatialRun>>,
) -> Result<Outcome> {
    let mut o = Outcome::new();
    for (name, run) in [("fig2", fig2), ("fig3", fig3)] {
        let (run, _) = reuse(run)?;
        o.below(&format!("{name} total-norm drift"), run.max_norm_drift(), 0.01);
    }
    for run in reuse(fig6)? {
        o.below(
            &format!("{} spatial drift", run.model.config.label),
            run.max_norm_drift(),
            0.02,
        );
    }
    Ok(o)
}

fn integrator_order() -> Result<Outcome> {
    let mut o = Outcome::new();
    // x' = i x cos t, exact exp(i sin t)
    let smooth = FnSystem::new(1, vec![], |t, x, _, out: &mut [C64]| out[0] = C64::i() * t.cos() * x[0]);
    let err = |dt: f64| -> Result<f64> {
        let traj = integrate(&smooth, &[C64::new(1.0, 0.0)], 2.0, dt)?;
        Ok((traj.node(traj.len() - 1)[0] - C64::cis(2.0f64.sin())).norm())
    };
    let ratio = err(0.1)? / err(0.05)?;
    o.check(
        "error ratio under dt halving",
        format!("{ratio:.3}"),
        "in [12, 20]",
        (12.0..=20.0).contains(&ratio),
    );

    let delayed = FnSystem::new(1, vec![1.0], |_, _, d, out: &mut [C64]| out[0] = -d[0]);
    let traj = integrate(&delayed, &[C64::new(1.0, 0.0)], 3.0, 1e-3)?;
    // method of steps from x = 1 on [-1, 0]
    let exact = |t: f64| match t {
        t if t <= 1.0 => 1.0 - t,
        t if t <= 2.0 => 1.0 - t + (t - 1.0).powi(2) / 2.0,
        t => 1.0 - t + (t - 1.0).powi(2) / 2.0 - (t - 2.0).powi(3) / 6.0,
    };
    let mut dev = 0.0f64;
    for i in 0..=3000 {
        let t = 3.0 * i as f64 / 3000.0;
        dev = dev.max((traj.sample(t)?[0] - exact(t)).norm());
    }
    o.below("ẋ = -x(t-1) vs polynomial", dev, 1e-6);
    Ok(o)
}

fn boundary_and_causality(runs: &[&Result<Vec<SpatialRun>>]) -> Result<Outcome> {
    let mut o = Outcome::new();
    let mut worst = 0.0f64;
    let mut snapshots = 0;
    let mut lit = Vec::new();
    for runs in runs {
        for run in reuse(runs)? {
            snapshots += run.mirror_residuals.len();
            worst = run.mirror_residuals.iter().copied().fold(worst, f64::max);
            let model = &run.model;
            let z1 = model.config.atoms[0].position;
            let outer = model.config.atoms.last().map_or(z1, |a| a.position);
            let t_end = model.trajectory.t_end();
            for f in [0.05, 0.2, 0.5, 0.8, 1.0] {
                let t = f * t_end;
                for dz in [1e-9, 1e-3, 0.5, 5.0, 50.0] {
                    let (r, l) = model.field(z1 + t + dz, t)?;
                    if r != C64::new(0.0, 0.0) || l != C64::new(0.0, 0.0) {
                        lit.push((model.config.label.clone(), z1 + t + dz, t));
                    }
                    let (_, l) = model.field(outer + dz, t)?;
                    if l != C64::new(0.0, 0.0) {
                        lit.push((model.config.label.clone(), outer + dz, t));
                    }
                }
            }
        }
    }
    o.below(&format!("max mirror residual over {snapshots} snapshots"), worst, 1e-10);
    o.check(
        "nonzero samples outside the light cone",
        match lit.first() {
            None => "0".to_string(),
            Some((label, z, t)) => format!("{} (first: {label} at z = {z}, t = {t})", lit.len()),
        },
        "exactly 0",
        lit.is_empty(),
    );
    Ok(o)
}

fn main() -> ExitCode {
    let fig2 = preset_run("fig2");
    let fig3 = preset_run("fig3");
    let fig5 = spatial_runs("fig5");
    let fig6 = spatial_runs("fig6");

    let results = [
        report(1, "one-photon trapping", trapping(&fig3)),
        report(2, "two-photon emission", emission(&fig2)),
        report(3, "dark state", dark_state()),
        report(4, "antinode decay law", decay_law()),
        report(5, "atomic mirror", atomic_mirror()),
        report(6, "oracle equivalence", oracle_equivalence()),
        report(7, "cross-domain identity", cross_domain()),
        report(8, "conservation", conservation(&fig2, &fig3, &fig6)),
        report(9, "integrator order", integrator_order()),
        report(10, "mirror and causality", boundary_and_causality(&[&fig5, &fig6])),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
