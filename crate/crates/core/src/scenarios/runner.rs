//! Runs a preset or a user scenario and writes its data set.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;

use crate::dde::Trajectory;
use crate::error::{Error, Result};
use crate::freq::{
    analytic_cee_markov, classify_steady_state, solve_cee, solve_spectral_pair, solve_two_photon, SpectralPairs,
    SteadyStateClass, TwoPhotonSolution,
};
use crate::model::{KGrid, NetworkConfig};
use crate::scenarios::config::{RunSettings, ScenarioFile};
use crate::scenarios::csv::{push_complex, CsvWriter, Header};
use crate::scenarios::manifest::{CurveRecord, KGridRecord, Manifest, SolverRecord};
use crate::scenarios::plot::{heatmap, line_chart, Series};
use crate::scenarios::presets::{preset, Pipeline};
use crate::spatial::{check_mirror_boundary, SpatialModel};

const INTEGRATOR: &str = "fixed-step RK4, cubic Hermite history";
const DEFAULT_K_POINTS: usize = 1001;
/// Times at which `c_kk` is normed (the last node is always included).
const CHECKPOINTS: usize = 80;
/// Largest side of the exported two-photon grid.
const TWO_PHOTON_EXPORT: usize = 201;
const NORM_SAMPLES: usize = 200;

/// Run parameters after defaults and overrides are applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Resolved {
    pub t_end: f64,
    pub dt: f64,
    pub k_points: usize,
    pub k_halfwidth: Option<f64>,
}

impl Resolved {
    /// Defaults: `T = 40 z1`, `dt = τ_min / 64`, 1001 modes, automatic window.
    pub fn new(config: &NetworkConfig, run: &RunSettings) -> Result<Self> {
        config.validate()?;
        let r = Self {
            t_end: run.t_end.unwrap_or_else(|| config.default_t_end()),
            dt: run.dt.unwrap_or_else(|| config.default_dt()),
            k_points: run.k_points.unwrap_or(DEFAULT_K_POINTS),
            k_halfwidth: run.k_halfwidth,
        };
        if !(r.t_end.is_finite() && r.t_end > 0.0) {
            return Err(Error::InvalidArgument(format!("t_end must be > 0 (got {})", r.t_end)));
        }
        if !(r.dt.is_finite() && r.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be > 0 (got {})", r.dt)));
        }
        let bound = config.tau_min() / 8.0;
        if r.dt > bound {
            return Err(Error::StepTooLarge { dt: r.dt, bound });
        }
        Ok(r)
    }

    pub fn kgrid(&self, config: &NetworkConfig) -> Result<KGrid> {
        match self.k_halfwidth {
            Some(h) => KGrid::uniform(config.omega_a, h, self.k_points),
            None => KGrid::for_config(config, self.t_end, self.k_points),
        }
    }
}

/// `n` evenly spread node indices ending at the last node.
fn spread_nodes(n_nodes: usize, n: usize) -> Vec<usize> {
    let last = n_nodes - 1;
    let n = n.clamp(1, last.max(1));
    let mut v: Vec<usize> = (1..=n).map(|i| (i * last + n / 2) / n).collect();
    v.dedup();
    v
}

/// The two-excitation problem solved on one k-grid.
pub struct TwoExcitationRun {
    pub config: NetworkConfig,
    pub resolved: Resolved,
    pub kgrid: KGrid,
    pub cee: Trajectory,
    pub pairs: SpectralPairs,
    pub two_photon: TwoPhotonSolution,
    /// Node index of every entry of `two_photon.times`.
    pub checkpoints: Vec<usize>,
}

impl TwoExcitationRun {
    pub fn compute(config: &NetworkConfig, resolved: Resolved) -> Result<Self> {
        let kgrid = resolved.kgrid(config)?;
        let cee = solve_cee(config, resolved.t_end, resolved.dt)?;
        let pairs = solve_spectral_pair(config, &cee, &kgrid, resolved.t_end, resolved.dt)?;
        let mut checkpoints = vec![0];
        checkpoints.extend(spread_nodes(pairs.n_nodes(), CHECKPOINTS));
        let two_photon = solve_two_photon(config, &pairs, &checkpoints)?;
        Ok(Self {
            config: config.clone(),
            resolved,
            kgrid,
            cee,
            pairs,
            two_photon,
            checkpoints,
        })
    }

    pub fn last_node(&self) -> usize {
        self.cee.len() - 1
    }

    pub fn cee_sq(&self, node: usize) -> f64 {
        self.cee.node(node)[0].norm_sqr()
    }

    /// `(P_e1, P_e2)` at a node.
    pub fn populations(&self, node: usize) -> (f64, f64) {
        let ee = self.cee_sq(node);
        let (w1, w2) = self.pairs.weights(node);
        (ee + w1, ee + w2)
    }

    pub fn final_two_photon_norm(&self) -> f64 {
        *self.two_photon.norms.last().expect("at least one checkpoint")
    }

    /// `|c_ee|² + ∫|c_egk|² + ∫|c_gek|² + two-photon norm` at each checkpoint.
    pub fn total_norms(&self) -> Vec<f64> {
        self.checkpoints
            .iter()
            .zip(&self.two_photon.norms)
            .map(|(&node, tp)| {
                let (w1, w2) = self.pairs.weights(node);
                self.cee_sq(node) + w1 + w2 + tp
            })
            .collect()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.total_norms().iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn min_cee_sq(&self) -> f64 {
        (0..self.cee.len())
            .map(|i| self.cee_sq(i))
            .fold(f64::INFINITY, f64::min)
    }

    /// Grid index maximizing `|c_egk(T, k)|`.
    pub fn spectral_argmax(&self) -> usize {
        let spectrum = self.pairs.c_egk(self.last_node());
        (0..spectrum.len())
            .max_by(|&a, &b| spectrum[a].norm().total_cmp(&spectrum[b].norm()))
            .unwrap_or(0)
    }

    pub fn results(&self) -> BTreeMap<String, f64> {
        let last = self.last_node();
        let (p1, p2) = self.populations(last);
        let norms = self.total_norms();
        BTreeMap::from([
            ("final_cee_abs2".to_string(), self.cee_sq(last)),
            ("final_p_e1".to_string(), p1),
            ("final_p_e2".to_string(), p2),
            ("final_two_photon_norm".to_string(), self.final_two_photon_norm()),
            ("final_total_norm".to_string(), *norms.last().unwrap_or(&f64::NAN)),
            ("max_total_norm_drift".to_string(), self.max_norm_drift()),
            ("min_cee_abs2".to_string(), self.min_cee_sq()),
            (
                "spectral_peak_k".to_string(),
                self.kgrid.k_values()[self.spectral_argmax()],
            ),
        ])
    }

    pub fn solver_record(&self) -> SolverRecord {
        SolverRecord {
            integrator: INTEGRATOR.to_string(),
            t_end: self.cee.t_end(),
            dt_requested: self.resolved.dt,
            dt: self.cee.dt(),
            steps: self.cee.len() - 1,
            k_grid: Some(KGridRecord {
                points: self.kgrid.len(),
                center: self.kgrid.center(),
                half_width: self.kgrid.half_width(),
                dk: self.kgrid.dk(),
            }),
            two_photon_checkpoints: Some(self.checkpoints.len()),
        }
    }

    /// Writes the CSV files (and SVGs when `plot`), returning their names.
    pub fn write(&self, dir: &Path, plot: bool) -> Result<Vec<String>> {
        let mut files = Vec::new();

        let header = Header::default()
            .real("t")
            .real("cee_abs2")
            .real("p_e1")
            .real("p_e2")
            .real("two_photon_norm")
            .real("total_norm");
        let mut w = CsvWriter::create(&dir.join("populations.csv"), header.names())?;
        let norms = self.total_norms();
        for (i, &node) in self.checkpoints.iter().enumerate() {
            let (p1, p2) = self.populations(node);
            w.row(&[
                self.cee.time(node),
                self.cee_sq(node),
                p1,
                p2,
                self.two_photon.norms[i],
                norms[i],
            ])?;
        }
        w.finish()?;
        files.push("populations.csv".to_string());

        let header = Header::default()
            .real("t")
            .complex("cee")
            .real("cee_abs2")
            .real("markov_abs2");
        let mut w = CsvWriter::create(&dir.join("cee.csv"), header.names())?;
        let mut row = Vec::with_capacity(5);
        for i in 0..self.cee.len() {
            let t = self.cee.time(i);
            let c = self.cee.node(i)[0];
            row.clear();
            row.push(t);
            push_complex(&mut row, c);
            row.push(c.norm_sqr());
            row.push(analytic_cee_markov(t, &self.config).norm_sqr());
            w.row(&row)?;
        }
        w.finish()?;
        files.push("cee.csv".to_string());

        let last = self.last_node();
        let egk = self.pairs.c_egk(last);
        let gek = self.pairs.c_gek(last);
        let header = Header::default().real("k").complex("c_egk").complex("c_gek");
        let mut w = CsvWriter::create(&dir.join("spectra.csv"), header.names())?;
        for (i, &k) in self.kgrid.k_values().iter().enumerate() {
            row.clear();
            row.push(k);
            push_complex(&mut row, egk[i]);
            push_complex(&mut row, gek[i]);
            w.row(&row)?;
        }
        w.finish()?;
        files.push("spectra.csv".to_string());

        let n = self.kgrid.len();
        let stride = n.div_ceil(TWO_PHOTON_EXPORT);
        let picks: Vec<usize> = (0..n).step_by(stride).collect();
        let ks = self.kgrid.k_values();
        let header = Header::default().real("k1").real("k2").complex("c_kk");
        let mut w = CsvWriter::create(&dir.join("two_photon.csv"), header.names())?;
        for &i in &picks {
            for &j in &picks {
                row.clear();
                row.push(ks[i]);
                row.push(ks[j]);
                push_complex(&mut row, self.two_photon.c_kk.get(i, j));
                w.row(&row)?;
            }
        }
        w.finish()?;
        files.push("two_photon.csv".to_string());

        if plot {
            let ts: Vec<f64> = self.checkpoints.iter().map(|&i| self.cee.time(i)).collect();
            let cee: Vec<f64> = self.checkpoints.iter().map(|&i| self.cee_sq(i)).collect();
            let (p1, p2): (Vec<f64>, Vec<f64>) = self.checkpoints.iter().map(|&i| self.populations(i)).unzip();
            let svg = line_chart(
                &format!("{}: populations", self.config.label),
                "t",
                "probability",
                &[
                    Series {
                        name: "|c_ee|²",
                        x: &ts,
                        y: &cee,
                    },
                    Series {
                        name: "P_e1",
                        x: &ts,
                        y: &p1,
                    },
                    Series {
                        name: "P_e2",
                        x: &ts,
                        y: &p2,
                    },
                    Series {
                        name: "two-photon",
                        x: &ts,
                        y: &self.two_photon.norms,
                    },
                ],
            );
            std::fs::write(dir.join("populations.svg"), svg)?;
            files.push("populations.svg".to_string());

            let a1: Vec<f64> = egk.iter().map(|c| c.norm()).collect();
            let a2: Vec<f64> = gek.iter().map(|c| c.norm()).collect();
            let svg = line_chart(
                &format!(
                    "{}: single-photon spectra at t = {:.3}",
                    self.config.label,
                    self.cee.t_end()
                ),
                "k",
                "amplitude",
                &[
                    Series {
                        name: "|c_egk|",
                        x: ks,
                        y: &a1,
                    },
                    Series {
                        name: "|c_gek|",
                        x: ks,
                        y: &a2,
                    },
                ],
            );
            std::fs::write(dir.join("spectra.svg"), svg)?;
            files.push("spectra.svg".to_string());

            let axis: Vec<f64> = picks.iter().map(|&i| ks[i]).collect();
            let grid: Vec<f64> = picks
                .iter()
                .flat_map(|&j| picks.iter().map(move |&i| (i, j)))
                .map(|(i, j)| self.two_photon.c_kk.get(i, j).norm())
                .collect();
            let svg = heatmap(
                &format!("{}: |c_kk|", self.config.label),
                "k1",
                "k2",
                &axis,
                &axis,
                &grid,
            );
            std::fs::write(dir.join("two_photon.svg"), svg)?;
            files.push("two_photon.svg".to_string());
        }
        Ok(files)
    }
}

/// One single-excitation curve in the position picture.
pub struct SpatialRun {
    pub model: SpatialModel,
    /// Sample times for the probability budget, including 0 and `T`.
    pub times: Vec<f64>,
    pub atom_probability: Vec<f64>,
    pub photon_probability: Vec<f64>,
    pub snapshots: Vec<crate::spatial::FieldSnapshot>,
    pub mirror_residuals: Vec<f64>,
}

impl SpatialRun {
    pub fn compute(config: &NetworkConfig, resolved: Resolved) -> Result<Self> {
        let model = SpatialModel::solve(config, resolved.t_end, resolved.dt)?;
        let traj = &model.trajectory;
        let mut nodes = vec![0];
        nodes.extend(spread_nodes(traj.len(), NORM_SAMPLES));
        let times: Vec<f64> = nodes.iter().map(|&i| traj.time(i)).collect();
        let mut atom_probability = Vec::with_capacity(times.len());
        let mut photon_probability = Vec::with_capacity(times.len());
        for &t in &times {
            atom_probability.push(model.atom_populations(t)?.iter().sum());
            photon_probability.push(model.photon_probability(t)?);
        }
        let t_end = traj.t_end();
        let mut snapshots = Vec::new();
        let mut mirror_residuals = Vec::new();
        for t in [0.25, 0.5, 0.75, 1.0].map(|f| f * t_end) {
            let snap = model.snapshot(t, model.default_z_grid(t))?;
            mirror_residuals.push(check_mirror_boundary(&snap)?);
            snapshots.push(snap);
        }
        Ok(Self {
            model,
            times,
            atom_probability,
            photon_probability,
            snapshots,
            mirror_residuals,
        })
    }

    pub fn total_probability(&self) -> Vec<f64> {
        self.atom_probability
            .iter()
            .zip(&self.photon_probability)
            .map(|(a, p)| a + p)
            .collect()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.total_probability()
            .iter()
            .map(|n| (n - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn results(&self) -> Result<BTreeMap<String, f64>> {
        let t_end = self.model.trajectory.t_end();
        let pops = self.model.atom_populations(t_end)?;
        let mut out = BTreeMap::new();
        for (j, p) in pops.iter().enumerate() {
            out.insert(format!("final_c{}_abs2", j + 1), *p);
        }
        out.insert(
            "final_photon_probability".into(),
            *self.photon_probability.last().unwrap_or(&f64::NAN),
        );
        out.insert("max_total_norm_drift".into(), self.max_norm_drift());
        out.insert(
            "max_mirror_residual".into(),
            self.mirror_residuals.iter().copied().fold(0.0, f64::max),
        );
        out.insert("right_jump_residual".into(), self.model.right_jump_residual(t_end)?);
        out.insert("left_source_residual".into(), self.model.left_source_residual(t_end)?);
        Ok(out)
    }

    pub fn write(&self, dir: &Path, suffix: &str) -> Result<Vec<String>> {
        let mut files = Vec::new();
        let traj = &self.model.trajectory;
        let config = &self.model.config;
        let single = config.atoms.len() == 1;

        let mut header = Header::default().real("t");
        for j in 1..=config.atoms.len() {
            header = header.complex(&format!("c{j}")).real(&format!("c{j}_abs2"));
        }
        if single {
            header = header.real("markov_abs2");
        }
        let name = format!("atoms{suffix}.csv");
        let mut w = CsvWriter::create(&dir.join(&name), header.names())?;
        let mut row = Vec::new();
        for i in 0..traj.len() {
            let t = traj.time(i);
            row.clear();
            row.push(t);
            for &c in traj.node(i) {
                push_complex(&mut row, c);
                row.push(c.norm_sqr());
            }
            if single {
                row.push(analytic_cee_markov(t, config).norm_sqr());
            }
            w.row(&row)?;
        }
        w.finish()?;
        files.push(name);

        let header = Header::default()
            .real("t")
            .real("atom_probability")
            .real("photon_probability")
            .real("total_probability");
        let name = format!("norm{suffix}.csv");
        let mut w = CsvWriter::create(&dir.join(&name), header.names())?;
        for (i, &t) in self.times.iter().enumerate() {
            let (a, p) = (self.atom_probability[i], self.photon_probability[i]);
            w.row(&[t, a, p, a + p])?;
        }
        w.finish()?;
        files.push(name);

        let header = Header::default().real("t").real("z").complex("phi_r").complex("phi_l");
        let name = format!("field{suffix}.csv");
        let mut w = CsvWriter::create(&dir.join(&name), header.names())?;
        for snap in &self.snapshots {
            for (i, &z) in snap.z_values.iter().enumerate() {
                row.clear();
                row.push(snap.t);
                row.push(z);
                push_complex(&mut row, snap.phi_r[i]);
                push_complex(&mut row, snap.phi_l[i]);
                w.row(&row)?;
            }
        }
        w.finish()?;
        files.push(name);
        Ok(files)
    }

    fn solver_record(&self, dt_requested: f64) -> SolverRecord {
        let traj = &self.model.trajectory;
        SolverRecord {
            integrator: INTEGRATOR.to_string(),
            t_end: traj.t_end(),
            dt_requested,
            dt: traj.dt(),
            steps: traj.len() - 1,
            k_grid: None,
            two_photon_checkpoints: None,
        }
    }
}

fn spatial_plots(dir: &Path, name: &str, runs: &[SpatialRun]) -> Result<Vec<String>> {
    let mut files = Vec::new();
    let times: Vec<Vec<f64>> = runs
        .iter()
        .map(|r| {
            (0..r.model.trajectory.len())
                .map(|i| r.model.trajectory.time(i))
                .collect()
        })
        .collect();
    let pops: Vec<Vec<f64>> = runs
        .iter()
        .map(|r| r.model.trajectory.component(0).iter().map(C64::norm_sqr).collect())
        .collect();
    let series: Vec<Series> = runs
        .iter()
        .enumerate()
        .map(|(i, r)| Series {
            name: &r.model.config.label,
            x: &times[i],
            y: &pops[i],
        })
        .collect();
    std::fs::write(
        dir.join("atoms.svg"),
        line_chart(&format!("{name}: |c_1(t)|²"), "t", "population", &series),
    )?;
    files.push("atoms.svg".to_string());

    let snap = runs[0].snapshots.last().expect("snapshots are always taken");
    let r: Vec<f64> = snap.phi_r.iter().map(C64::norm_sqr).collect();
    let l: Vec<f64> = snap.phi_l.iter().map(C64::norm_sqr).collect();
    let svg = line_chart(
        &format!("{}: packets at t = {:.3}", runs[0].model.config.label, snap.t),
        "z",
        "density",
        &[
            Series {
                name: "|Φ_R|²",
                x: &snap.z_values,
                y: &r,
            },
            Series {
                name: "|Φ_L|²",
                x: &snap.z_values,
                y: &l,
            },
        ],
    );
    std::fs::write(dir.join("field.svg"), svg)?;
    files.push("field.svg".to_string());
    Ok(files)
}

/// What a run produced.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub name: String,
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub classifications: Vec<(String, SteadyStateClass)>,
    pub results: Vec<(String, BTreeMap<String, f64>)>,
}

impl RunSummary {
    /// `classification: <label>` for the headline curve.
    pub fn classify_line(&self) -> String {
        let (_, class) = &self.classifications[0];
        let mut line = format!("classification: {}", class.label);
        if class.outside_markov_regime {
            line.push_str(" (outside the Markov regime; prediction is indicative)");
        }
        line
    }
}

fn curve_record(config: &NetworkConfig, results: BTreeMap<String, f64>) -> CurveRecord {
    CurveRecord {
        label: config.label.clone(),
        omega_a: config.omega_a,
        atoms: config.atoms.clone(),
        classification: classify_steady_state(config),
        results,
    }
}

/// Solves every curve with the given pipeline and writes the data set plus
/// `manifest.toml` into `out_dir`.
pub fn run_curves(
    name: &str,
    pipeline: Pipeline,
    curves: &[NetworkConfig],
    run: &RunSettings,
    out_dir: &Path,
    plot: bool,
) -> Result<RunSummary> {
    std::fs::create_dir_all(out_dir)?;
    let resolved: Vec<Resolved> = curves.iter().map(|c| Resolved::new(c, run)).collect::<Result<_>>()?;
    let mut files = Vec::new();
    let mut records = Vec::new();

    let solver = match pipeline {
        Pipeline::TwoExcitation => {
            let mut solver = None;
            let multi = curves.len() > 1;
            for (config, r) in curves.iter().zip(&resolved) {
                let dir = if multi {
                    out_dir.join(&config.label)
                } else {
                    out_dir.to_path_buf()
                };
                std::fs::create_dir_all(&dir)?;
                let result = TwoExcitationRun::compute(config, *r)?;
                let prefix = if multi {
                    format!("{}/", config.label)
                } else {
                    String::new()
                };
                files.extend(result.write(&dir, plot)?.into_iter().map(|f| format!("{prefix}{f}")));
                records.push(curve_record(config, result.results()));
                solver.get_or_insert_with(|| result.solver_record());
            }
            solver
        }
        Pipeline::Spatial => {
            let runs: Vec<SpatialRun> = curves
                .iter()
                .zip(&resolved)
                .map(|(c, r)| SpatialRun::compute(c, *r))
                .collect::<Result<_>>()?;
            for r in &runs {
                let suffix = if runs.len() > 1 {
                    format!("_{}", r.model.config.label)
                } else {
                    String::new()
                };
                files.extend(r.write(out_dir, &suffix)?);
                records.push(curve_record(&r.model.config, r.results()?));
            }
            if plot {
                files.extend(spatial_plots(out_dir, name, &runs)?);
            }
            runs.first().map(|r| r.solver_record(resolved[0].dt))
        }
    }
    .ok_or_else(|| Error::InvalidArgument("no curves to run".into()))?;

    let mut manifest = Manifest::new(name, pipeline.name(), solver);
    manifest.files = files.clone();
    manifest.curves = records;
    manifest.write(out_dir)?;
    files.push(crate::scenarios::manifest::MANIFEST_FILE.to_string());

    Ok(RunSummary {
        name: name.to_string(),
        out_dir: out_dir.to_path_buf(),
        files,
        classifications: manifest
            .curves
            .iter()
            .map(|c| (c.label.clone(), c.classification.clone()))
            .collect(),
        results: manifest
            .curves
            .iter()
            .map(|c| (c.label.clone(), c.results.clone()))
            .collect(),
    })
}

pub fn run_preset(name: &str, out_dir: &Path, plot: bool) -> Result<RunSummary> {
    let p = preset(name)?;
    run_curves(p.name, p.pipeline, &p.curves, &p.run, out_dir, plot)
}

/// Command-line overrides for [`simulate`].
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub k_points: Option<usize>,
}

/// Runs a scenario file: two atoms go through the two-excitation solvers,
/// a single atom through the position-picture solver.
pub fn simulate(file: &ScenarioFile, overrides: &Overrides, out_dir: &Path, plot: bool) -> Result<RunSummary> {
    let mut run = file.run.clone();
    run.t_end = overrides.t_end.or(run.t_end);
    run.dt = overrides.dt.or(run.dt);
    run.k_points = overrides.k_points.or(run.k_points);
    let pipeline = if file.config.atoms.len() == 1 {
        Pipeline::Spatial
    } else {
        Pipeline::TwoExcitation
    };
    run_curves(
        &file.config.label,
        pipeline,
        std::slice::from_ref(&file.config),
        &run,
        out_dir,
        plot,
    )
}
