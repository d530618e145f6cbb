use std::fs;
use std::path::Path;
use std::time::Instant;

use serde_json::json;

use super::config::SimConfig;
use super::output::{timeseries_header, timeseries_row, write_snapshot, CsvWriter};
use crate::diagnostics::{blowup_horizon, estimate_blowup_time, velocity_of, DiagnosticsRecord, DiagnosticsTracker};
use crate::error::Result;
use crate::integrator::{run, Observer, RunSettings, TerminationReason};
use crate::models::ModelState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotInfo {
    pub index: usize,
    pub time: f64,
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub config: SimConfig,
    pub termination: TerminationReason,
    pub steps: usize,
    pub final_state: ModelState,
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<SnapshotInfo>,
    /// `sqrt(h2(0))`, NaN where `h2` is undefined.
    pub c0: f64,
    /// `pi / c0`.
    pub t_star_bound: f64,
    /// `(t_star_fit, fit_quality)` or the reason no fit is available.
    pub blowup_fit: std::result::Result<(f64, f64), String>,
    pub wall_time_seconds: f64,
}

/// Evenly spaced snapshot times over `[t0, t0 + duration]`.
fn snapshot_targets(t0: f64, duration: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..count).map(|i| t0 + duration * i as f64 / (count - 1) as f64).collect(),
    }
}

/// Streams records to `timeseries.csv` and writes a snapshot at the first
/// record reaching each target time.
struct FileObserver<'a> {
    tracker: DiagnosticsTracker,
    timeseries: CsvWriter,
    dir: &'a Path,
    targets: Vec<f64>,
    next_target: usize,
    slack: f64,
    snapshots: Vec<SnapshotInfo>,
}

impl FileObserver<'_> {
    fn snapshot(&mut self, state: &ModelState) -> Result<()> {
        let index = self.snapshots.len();
        let grid = state.grid();
        write_snapshot(
            &self.dir.join(format!("snapshot_{index}.csv")),
            &grid.points(),
            &state.literal_u(),
            state.omega.values(),
            &velocity_of(state)?,
        )?;
        self.snapshots.push(SnapshotInfo { index, time: state.time });
        Ok(())
    }
}

impl Observer for FileObserver<'_> {
    type Record = DiagnosticsRecord;

    fn on_step(&mut self, state: &ModelState, dt: f64) -> Result<()> {
        self.tracker.on_step(state, dt)
    }

    fn record(&mut self, state: &ModelState) -> Result<DiagnosticsRecord> {
        let rec = self.tracker.record(state)?;
        self.timeseries.row(&timeseries_row(&rec))?;
        let mut due = false;
        while self.next_target < self.targets.len() && self.targets[self.next_target] <= state.time + self.slack {
            self.next_target += 1;
            due = true;
        }
        if due {
            self.snapshot(state)?;
        }
        Ok(rec)
    }
}

/// Runs one configured simulation and writes `timeseries.csv`, the
/// snapshots and `run.json` into `config.output_dir`.
pub fn run_simulation(config: &SimConfig) -> Result<SimulationOutput> {
    config.validate()?;
    let started = Instant::now();
    let dir = config.output_dir.as_path();
    fs::create_dir_all(dir)?;
    let initial = config.initial_state()?;
    let tracker = DiagnosticsTracker::new(&initial, config.diag_options)?;
    let c0 = tracker.c0();
    let mut observer = FileObserver {
        tracker,
        timeseries: CsvWriter::create(&dir.join("timeseries.csv"), &timeseries_header(config.diag_options.k_max))?,
        dir,
        targets: snapshot_targets(initial.time, config.t_end, config.snapshot_count),
        next_target: 0,
        slack: 1e-12 * config.t_end.max(1.0),
        snapshots: Vec::new(),
    };
    let settings = RunSettings { t_end: initial.time + config.t_end, record_every: config.diag_cadence };
    let result = run(&initial, &config.model_spec(), &config.step_control(), settings, &mut observer);
    let FileObserver { timeseries, snapshots, .. } = observer;
    timeseries.finish()?;
    let out = match result {
        Ok(out) => out,
        Err(e) => {
            let summary = json!({ "config": config, "termination_reason": null, "error": e.to_string() });
            fs::write(dir.join("run.json"), serde_json::to_string_pretty(&summary)?)?;
            return Err(e);
        }
    };

    let blowup_fit = estimate_blowup_time(&out.records).map_err(|e| e.to_string());
    let output = SimulationOutput {
        config: config.clone(),
        termination: out.termination,
        steps: out.steps,
        final_state: out.final_state,
        records: out.records,
        snapshots,
        c0,
        t_star_bound: blowup_horizon(c0),
        blowup_fit,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    write_summary(dir, &output)?;
    Ok(output)
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

fn write_summary(dir: &Path, out: &SimulationOutput) -> Result<()> {
    let fit = match &out.blowup_fit {
        Ok((t, q)) => json!({ "t_star_fit": finite_or_null(*t), "fit_quality": finite_or_null(*q) }),
        Err(reason) => json!({ "unavailable": reason }),
    };
    let last = out.records.last();
    let summary = json!({
        "config": out.config,
        "termination_reason": out.termination,
        "steps": out.steps,
        "final_time": out.final_state.time,
        "record_count": out.records.len(),
        "snapshots": out.snapshots.iter().map(|s| json!({
            "file": format!("snapshot_{}.csv", s.index),
            "time": s.time,
        })).collect::<Vec<_>>(),
        "c0": finite_or_null(out.c0),
        "t_star_bound": finite_or_null(out.t_star_bound),
        "blowup_fit": fit,
        "final_max_abs_omega": last.map(|r| finite_or_null(r.max_abs_omega)),
        "final_h1": last.map(|r| finite_or_null(r.h1)),
        "wall_time_seconds": out.wall_time_seconds,
    });
    fs::write(dir.join("run.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(())
}
