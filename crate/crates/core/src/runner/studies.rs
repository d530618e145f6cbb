//! Refinement and perturbation harnesses. Member runs advance in segments to
//! a shared set of checkpoint times so that levels and perturbed copies are
//! compared at identical instants.

use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::SimConfig;
use super::output::{fmt_f64, join, CsvWriter};
use crate::diagnostics::{DiagnosticsRecord, DiagnosticsTracker};
use crate::error::{Error, Result};
use crate::integrator::{run, Observer, RunSettings, TerminationReason, TimesOnly};
use crate::models::{clm_exact_solution, ModelKind, ModelState};
use crate::norms::w_distance;
use crate::spectral::{Field, PeriodicGrid};

pub const STUDY_CHECKPOINTS: usize = 20;

/// Relative agreement required between successive refinement levels.
pub const AGREEMENT_RTOL: f64 = 0.01;

const MAX_STUDY_POINTS: usize = 1 << 22;

/// Thread pool sized by `SIM_THREADS`, or by the machine when unset.
pub fn study_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var("SIM_THREADS") {
        Ok(s) => s.trim().parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| Error::Config {
            key: "SIM_THREADS".into(),
            reason: format!("`{s}` is not a positive integer"),
        })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config { key: "SIM_THREADS".into(), reason: e.to_string() })
}

fn checkpoint_times(config: &SimConfig, t0: f64) -> Vec<f64> {
    (0..=STUDY_CHECKPOINTS).map(|i| t0 + config.t_end * i as f64 / STUDY_CHECKPOINTS as f64).collect()
}

/// States (and the observer's record) at every checkpoint the run reaches.
struct Trajectory<R> {
    states: Vec<ModelState>,
    records: Vec<R>,
    termination: TerminationReason,
}

fn trajectory<O: Observer>(config: &SimConfig, initial: ModelState, observer: &mut O) -> Result<Trajectory<O::Record>> {
    let spec = config.model_spec();
    let control = config.step_control();
    let times = checkpoint_times(config, initial.time);
    let mut records = vec![observer.record(&initial)?];
    let mut states = vec![initial];
    for &t in &times[1..] {
        let settings = RunSettings { t_end: t, record_every: usize::MAX };
        let out = run(states.last().unwrap(), &spec, &control, settings, observer)?;
        if out.termination != TerminationReason::TEnd {
            return Ok(Trajectory { states, records, termination: out.termination });
        }
        records.push(out.records.into_iter().last().expect("a completed segment records its end"));
        states.push(out.final_state);
    }
    Ok(Trajectory { states, records, termination: TerminationReason::TEnd })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelCheckpoint {
    pub time: f64,
    pub h1: f64,
    pub h2: f64,
    pub max_abs_omega: f64,
    pub bkm_integral: f64,
    /// Max-norm error against the closed-form solution (CLM only, NaN otherwise).
    pub exact_error: f64,
}

impl LevelCheckpoint {
    fn quantities(&self) -> [f64; 4] {
        [self.h1, self.h2, self.max_abs_omega, self.bkm_integral]
    }
}

#[derive(Debug, Clone)]
pub struct RefinementLevel {
    pub n_points: usize,
    pub termination: TerminationReason,
    pub checkpoints: Vec<LevelCheckpoint>,
}

#[derive(Debug, Clone)]
pub struct RefinementReport {
    pub levels: Vec<RefinementLevel>,
    /// For each pair of successive levels, the last checkpoint time up to
    /// which all compared quantities agree within [`AGREEMENT_RTOL`].
    pub agreement_horizons: Vec<f64>,
}

impl RefinementReport {
    /// `|q_l - q_{l+1}|` for the compared quantities at checkpoint `i`, when both levels reached it.
    pub fn level_difference(&self, level: usize, i: usize) -> Option<[f64; 4]> {
        let a = self.levels.get(level)?.checkpoints.get(i)?.quantities();
        let b = self.levels.get(level + 1)?.checkpoints.get(i)?.quantities();
        Some(std::array::from_fn(|q| (a[q] - b[q]).abs()))
    }
}

fn agree(a: f64, b: f64) -> bool {
    (a.is_nan() && b.is_nan()) || (a - b).abs() <= AGREEMENT_RTOL * a.abs().max(b.abs()) || (a - b).abs() <= 1e-12
}

fn run_level(config: &SimConfig) -> Result<RefinementLevel> {
    let initial = config.initial_state()?;
    let omega0 = initial.omega.clone();
    let t0 = initial.time;
    let mut tracker = DiagnosticsTracker::new(&initial, config.diag_options)?;
    let traj = trajectory(config, initial, &mut tracker)?;
    let checkpoints = traj
        .states
        .iter()
        .zip(&traj.records)
        .map(|(state, rec): (&ModelState, &DiagnosticsRecord)| {
            let exact_error = if config.model == ModelKind::Clm {
                clm_exact_solution(&omega0, state.time - t0)
                    .map(|exact| exact.max_diff(&state.omega))
                    .unwrap_or(f64::NAN)
            } else {
                f64::NAN
            };
            LevelCheckpoint {
                time: state.time,
                h1: rec.h1,
                h2: rec.h2,
                max_abs_omega: rec.max_abs_omega,
                bkm_integral: rec.bkm_integral,
                exact_error,
            }
        })
        .collect();
    Ok(RefinementLevel { n_points: config.grid_n, termination: traj.termination, checkpoints })
}

/// Runs the configuration at `N, 2N, ..., 2^(levels-1) N` and writes
/// `refine_report.csv` into the output directory.
pub fn refinement_study(base: &SimConfig, levels: usize) -> Result<RefinementReport> {
    base.validate()?;
    if levels < 2 {
        return Err(Error::Config { key: "levels".into(), reason: "need at least 2 levels".into() });
    }
    let finest = (levels < 32).then(|| base.grid_n.checked_mul(1 << (levels - 1))).flatten();
    if !finest.is_some_and(|n| n <= MAX_STUDY_POINTS) {
        return Err(Error::Config { key: "levels".into(), reason: format!("finest grid exceeds {MAX_STUDY_POINTS} points") });
    }
    let configs: Vec<SimConfig> = (0..levels).map(|l| base.refined(1 << l)).collect();
    let levels: Vec<RefinementLevel> =
        study_pool()?.install(|| configs.par_iter().map(run_level).collect::<Result<_>>())?;

    let agreement_horizons = levels
        .windows(2)
        .map(|pair| {
            let mut horizon = pair[0].checkpoints[0].time;
            for (a, b) in pair[0].checkpoints.iter().zip(&pair[1].checkpoints) {
                if !a.quantities().iter().zip(b.quantities()).all(|(&x, y)| agree(x, y)) {
                    break;
                }
                horizon = a.time;
            }
            horizon
        })
        .collect();
    let report = RefinementReport { levels, agreement_horizons };
    write_refine_report(base, &report)?;
    Ok(report)
}

fn write_refine_report(config: &SimConfig, report: &RefinementReport) -> Result<()> {
    fs::create_dir_all(&config.output_dir)?;
    let mut w = CsvWriter::create(
        &config.output_dir.join("refine_report.csv"),
        "time,level,n_points,termination,h1,h2,max_abs_omega,bkm_integral,exact_error,\
         diff_h1,diff_h2,diff_max_abs_omega,diff_bkm_integral,agreement_horizon",
    )?;
    for (l, level) in report.levels.iter().enumerate() {
        let horizon = report.agreement_horizons.get(l).copied().unwrap_or(f64::NAN);
        for (i, c) in level.checkpoints.iter().enumerate() {
            let diff = report.level_difference(l, i).unwrap_or([f64::NAN; 4]);
            let values = [c.h1, c.h2, c.max_abs_omega, c.bkm_integral, c.exact_error, diff[0], diff[1], diff[2], diff[3], horizon];
            w.row(&format!("{},{},{},{},{}", fmt_f64(c.time), l, level.n_points, level.termination, join(&values)))?;
        }
    }
    w.finish()
}

/// Fixed band-limited zero-mean profile on modes 1..=4 with unit max norm;
/// cosines for `u`, sines for `omega`.
pub fn perturbation_profile(grid: PeriodicGrid, seed: u64, even: bool) -> Result<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f = Field::from_fn(grid, |z| {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let phase = grid.wavenumber(i + 1) * z;
                c * if even { phase.cos() } else { phase.sin() }
            })
            .sum()
    })
    .project_zero_mean();
    let peak = f.max_abs();
    if peak == 0.0 {
        return Err(Error::InvalidArgument { name: "seed", reason: "degenerate perturbation profile".into() });
    }
    Ok(f.scaled(1.0 / peak))
}

fn perturbed(initial: &ModelState, config: &SimConfig, scale: f64) -> Result<ModelState> {
    let grid = *initial.grid();
    if scale == 0.0 {
        return Ok(initial.clone());
    }
    if config.model_spec().is_scalar() {
        let bump = perturbation_profile(grid, config.seed, false)?;
        let omega = initial.omega.axpy(scale, &bump)?.project_zero_mean();
        ModelState::with_offset(initial.u.clone(), omega, initial.time, initial.u_offset)
    } else {
        let bump = perturbation_profile(grid, config.seed, true)?;
        ModelState::with_offset(initial.u.axpy(scale, &bump)?, initial.omega.clone(), initial.time, initial.u_offset)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationRow {
    pub scale: f64,
    /// Max over common checkpoints of the `W^1` distance to the base run.
    pub max_distance: f64,
    pub final_distance: f64,
    pub checkpoints: usize,
    pub termination: TerminationReason,
}

#[derive(Debug, Clone)]
pub struct PerturbationReport {
    pub base_termination: TerminationReason,
    pub rows: Vec<PerturbationRow>,
}

impl PerturbationReport {
    /// Distances nonincreasing as the scale decreases.
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].max_distance <= w[0].max_distance)
    }
}

/// Perturbs the initial data by `s` times [`perturbation_profile`] for each
/// scale, runs to `t_end` and writes `perturb_report.csv`.
pub fn perturbation_study(base: &SimConfig, scales: &[f64]) -> Result<PerturbationReport> {
    base.validate()?;
    let ordered = scales.windows(2).all(|w| w[1] < w[0]);
    if scales.is_empty() || !ordered || scales.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::Config { key: "scales".into(), reason: "need nonnegative, strictly decreasing values".into() });
    }
    let initial = base.initial_state()?;
    let mut starts = vec![initial.clone()];
    for &s in scales {
        starts.push(perturbed(&initial, base, s)?);
    }
    let runs: Vec<Trajectory<f64>> = study_pool()?.install(|| {
        starts.into_par_iter().map(|start| trajectory(base, start, &mut TimesOnly)).collect::<Result<_>>()
    })?;
    let (reference, members) = runs.split_first().expect("base run present");
    let rows = scales
        .iter()
        .zip(members)
        .map(|(&scale, traj)| {
            let distances: Vec<f64> = reference
                .states
                .iter()
                .zip(&traj.states)
                .map(|(a, b)| w_distance(a, b, 1))
                .collect::<Result<_>>()?;
            Ok(PerturbationRow {
                scale,
                max_distance: distances.iter().copied().fold(0.0, f64::max),
                final_distance: *distances.last().unwrap_or(&0.0),
                checkpoints: distances.len(),
                termination: traj.termination,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = PerturbationReport { base_termination: reference.termination, rows };
    write_perturb_report(base, &report)?;
    Ok(report)
}

fn write_perturb_report(config: &SimConfig, report: &PerturbationReport) -> Result<()> {
    fs::create_dir_all(&config.output_dir)?;
    let mut w = CsvWriter::create(
        &config.output_dir.join("perturb_report.csv"),
        "scale,max_w1_distance,final_w1_distance,checkpoints,termination,base_termination",
    )?;
    for r in &report.rows {
        w.row(&format!(
            "{},{},{},{}",
            join(&[r.scale, r.max_distance, r.final_distance]),
            r.checkpoints,
            r.termination,
            report.base_termination
        ))?;
    }
    w.finish()
}
