//! Running specs and writing their outputs.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use log::info;
use sbc_core::sim::{simulate, Trace};

use crate::config::RunSpec;
use crate::output::{Metrics, Table};
use crate::{plot, LabError};

pub const THREADS_ENV: &str = "SBC_LAB_THREADS";

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub spec: RunSpec,
    pub trace: Trace<f64>,
    pub metrics: Metrics,
}

pub fn execute(spec: &RunSpec) -> Result<RunOutput, LabError> {
    let prepared = spec.prepare()?;
    let start = Instant::now();
    let trace = simulate(&prepared.controller, &prepared.reference, &prepared.sim).map_err(|e| {
        if e.is_numerical() {
            LabError::Numerical(e.to_string())
        } else {
            LabError::Config(e.to_string())
        }
    })?;
    let metrics = Metrics::new(&trace, start.elapsed().as_secs_f64());
    info!("finished {} steps in {:.2} s", prepared.sim.steps(), metrics.runtime_seconds);
    Ok(RunOutput { spec: spec.clone(), trace, metrics })
}

/// Writes `trace.csv`, `metrics.json`, the resolved `spec.json` and, when
/// asked, SVG plots into `dir`.
pub fn write_outputs(out: &RunOutput, dir: &Path, plots: bool) -> Result<Vec<PathBuf>, LabError> {
    std::fs::create_dir_all(dir).map_err(LabError::io(dir))?;
    let table = Table::from_trace(&out.trace);
    let mut files = vec![
        ("trace.csv".to_string(), table.to_csv()),
        ("metrics.json".to_string(), out.metrics.to_json() + "\n"),
        ("spec.json".to_string(), out.spec.to_json() + "\n"),
    ];
    if plots {
        files.extend(plot::render(&table, &out.spec));
    }
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(LabError::io(&path))?;
        written.push(path);
    }
    Ok(written)
}

/// `SBC_LAB_THREADS` if set to a positive number, else the available cores.
pub fn thread_cap() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs each job and writes its outputs into its own directory, at most
/// `threads` at a time. Results come back in job order.
pub fn run_all(jobs: &[(RunSpec, PathBuf, bool)], threads: usize) -> Vec<Result<RunOutput, LabError>> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<RunOutput, LabError>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    let worker = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        let Some((spec, dir, plots)) = jobs.get(i) else { break };
        let r = execute(spec).and_then(|out| write_outputs(&out, dir, *plots).map(|_| out));
        results.lock().expect("no panics while holding the lock")[i] = Some(r);
    };
    std::thread::scope(|s| {
        for _ in 0..threads.clamp(1, jobs.len().max(1)) {
            s.spawn(worker);
        }
    });
    results.into_inner().expect("workers finished").into_iter().map(|r| r.expect("every job ran")).collect()
}
