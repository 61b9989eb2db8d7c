//! Subcommand implementations: run, compare, verify, reference.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use vmprox_core::dataset::Dataset;
use vmprox_core::diagnostics::{compute_reference, ReferenceSolution};
use vmprox_core::model::{CompositeObjective, SmoothPart};
use vmprox_core::solver::{RunTrace, Solver};
use vmprox_core::verify::{run_all, FaultInjection};

use crate::config::RunSpec;
use crate::csvout::{atomic_write, format_float, render_merged, render_trace};
use crate::io::{open_dataset, resolve_dataset_path};
use crate::CliError;

/// Reference solution on disk (JSON).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceFile {
    pub p_star: f64,
    pub residual: f64,
    pub tol: f64,
    pub pg_iterations: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub n: usize,
    pub dim: usize,
    pub w_star: Vec<f64>,
}

fn load_dataset(spec: &RunSpec) -> Result<Dataset, CliError> {
    let path = resolve_dataset_path(&spec.dataset);
    Ok(open_dataset(&path, spec.dim)?)
}

fn reference_for(
    ds: &Dataset,
    spec: &RunSpec,
    reference_file: Option<&Path>,
) -> Result<ReferenceSolution, CliError> {
    if let Some(path) = reference_file {
        let text = std::fs::read_to_string(path)?;
        let file: ReferenceFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad reference file: {e}")))?;
        if file.n != ds.n() || file.dim != ds.dim() {
            return Err(CliError::Config(
                "reference file does not match the dataset shape".to_string(),
            ));
        }
        if file.lambda1 != spec.lambda1 || file.lambda2 != spec.lambda2 {
            return Err(CliError::Config(
                "reference file was computed for different regularization".to_string(),
            ));
        }
        return Ok(ReferenceSolution {
            w_star: file.w_star,
            p_star: file.p_star,
            residual: file.residual,
            tol: file.tol,
            pg_iterations: file.pg_iterations,
        });
    }
    let sp = SmoothPart::new(ds, spec.lambda2);
    compute_reference(&sp, &spec.regularizer(), spec.reference_tol)
        .map_err(|e| CliError::Config(format!("reference computation failed: {e}")))
}

fn run_one(ds: &Dataset, spec: &RunSpec, p_star: f64) -> Result<RunTrace, CliError> {
    let config = spec.to_solver_config(ds.n()).map_err(CliError::Config)?;
    let objective = CompositeObjective::new(SmoothPart::new(ds, spec.lambda2), spec.regularizer());
    let mut solver = Solver::new(config, objective, vec![0.0; ds.dim()], Some(p_star))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let started = Instant::now();
    while !solver.is_finished() {
        solver.step_epoch().map_err(CliError::Divergence)?;
        if spec.timing {
            solver.set_last_seconds(started.elapsed().as_secs_f64());
        }
    }
    Ok(solver.into_trace())
}

/// `vmprox run`: one trace CSV (stdout when no output path is set).
pub fn cmd_run(spec: &RunSpec, reference_file: Option<&Path>) -> Result<(), CliError> {
    let ds = load_dataset(spec)?;
    // Validate the config before paying for the reference.
    spec.to_solver_config(ds.n()).map_err(CliError::Config)?;
    let reference = reference_for(&ds, spec, reference_file)?;
    let trace = run_one(&ds, spec, reference.p_star)?;
    let csv = render_trace(&trace);
    match &spec.output {
        Some(path) => {
            atomic_write(path, &csv)?;
            eprintln!(
                "wrote {} ({} epochs, final gap {})",
                path.display(),
                trace.records.len(),
                format_float(trace.records.last().map(|r| r.gap).unwrap_or(f64::NAN)),
            );
        }
        None => print!("{csv}"),
    }
    Ok(())
}

/// `vmprox reference`: computes and stores a reference solution.
pub fn cmd_reference(spec: &RunSpec, output: &Path) -> Result<(), CliError> {
    let ds = load_dataset(spec)?;
    let sp = SmoothPart::new(&ds, spec.lambda2);
    let reference = compute_reference(&sp, &spec.regularizer(), spec.reference_tol)
        .map_err(|e| CliError::Config(format!("reference computation failed: {e}")))?;
    let file = ReferenceFile {
        p_star: reference.p_star,
        residual: reference.residual,
        tol: reference.tol,
        pg_iterations: reference.pg_iterations,
        lambda1: spec.lambda1,
        lambda2: spec.lambda2,
        n: ds.n(),
        dim: ds.dim(),
        w_star: reference.w_star,
    };
    let json = serde_json::to_string(&file)
        .map_err(|e| CliError::Config(format!("cannot serialize reference: {e}")))?;
    atomic_write(output, &json)?;
    eprintln!(
        "wrote {} (p_star = {}, residual = {})",
        output.display(),
        format_float(file.p_star),
        format_float(file.residual),
    );
    Ok(())
}

/// Gap at the first record reaching the pass budget.
pub fn gap_at_passes(trace: &RunTrace, budget: f64) -> Option<f64> {
    trace
        .records
        .iter()
        .find(|r| r.passes >= budget)
        .map(|r| r.gap)
}

/// Distinct labels for the merged CSV: canonical algorithm names, with a
/// `#index` suffix when a tag appears more than once (stepsize sweeps).
pub fn solver_labels(specs: &[RunSpec]) -> Vec<String> {
    let names: Vec<String> = specs.iter().map(|s| s.algorithm.clone()).collect();
    names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            if names.iter().filter(|n| *n == name).count() > 1 {
                format!("{name}#{i}")
            } else {
                name.clone()
            }
        })
        .collect()
}

/// `vmprox compare`: shared dataset and reference, concurrent runs, merged
/// long-format CSV plus a gap summary at fixed pass budgets.
pub fn cmd_compare(specs: &[RunSpec], jobs: usize, output: &Path) -> Result<(), CliError> {
    if specs.is_empty() {
        return Err(CliError::Config(
            "compare needs at least one spec".to_string(),
        ));
    }
    let first = &specs[0];
    for s in specs.iter().skip(1) {
        if s.dataset != first.dataset
            || s.lambda1 != first.lambda1
            || s.lambda2 != first.lambda2
            || s.dim != first.dim
        {
            return Err(CliError::Config(
                "compare specs must share dataset and regularization".to_string(),
            ));
        }
    }
    let ds = load_dataset(first)?;
    for s in specs {
        s.to_solver_config(ds.n()).map_err(CliError::Config)?;
    }
    // One reference for everyone, at the tightest requested tolerance.
    let mut ref_spec = first.clone();
    ref_spec.reference_tol = specs
        .iter()
        .map(|s| s.reference_tol)
        .fold(f64::INFINITY, f64::min);
    let reference = reference_for(&ds, &ref_spec, None)?;

    let results: Mutex<Vec<Option<Result<RunTrace, CliError>>>> =
        Mutex::new((0..specs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = jobs.max(1).min(specs.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= specs.len() {
                    break;
                }
                let outcome = run_one(&ds, &specs[idx], reference.p_star);
                results.lock().unwrap()[idx] = Some(outcome);
            });
        }
    });

    let results = results.into_inner().unwrap();
    let labels = solver_labels(specs);
    let mut merged: Vec<(String, &RunTrace)> = Vec::new();
    let mut first_error: Option<CliError> = None;
    for (label, outcome) in labels.iter().zip(&results) {
        match outcome.as_ref().expect("worker filled every slot") {
            Ok(trace) => merged.push((label.clone(), trace)),
            Err(e) => {
                if first_error.is_none() {
                    first_error = Some(match e {
                        CliError::Divergence(err) => CliError::Divergence(err.clone()),
                        CliError::Config(msg) => CliError::Config(msg.clone()),
                        other => CliError::Config(other.to_string()),
                    });
                }
            }
        }
    }
    // Flush whatever completed, even when aborting on a failure.
    atomic_write(output, &render_merged(&merged, Some(reference.p_star)))?;

    let budgets = [5.0, 10.0, 20.0, 30.0];
    println!(
        "gap at pass budgets (p_star = {}):",
        format_float(reference.p_star)
    );
    print!("{:<24}", "solver");
    for b in budgets {
        print!(" {b:>12}");
    }
    println!();
    for (label, trace) in &merged {
        print!("{label:<24}");
        for b in budgets {
            match gap_at_passes(trace, b) {
                Some(gap) => print!(" {gap:>12.4e}"),
                None => print!(" {:>12}", "-"),
            }
        }
        println!();
    }
    match first_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// `vmprox verify`: runs the oracle/property suite; nonzero exit naming the
/// first failed invariant.
pub fn cmd_verify(seed: u64, fault: Option<&str>) -> Result<(), CliError> {
    let fault = match fault {
        None => FaultInjection::None,
        Some("prox-shift") => FaultInjection::ProxShift,
        Some(other) => {
            return Err(CliError::Config(format!("unknown fault '{other}'")));
        }
    };
    let results = run_all(seed, fault);
    let mut first_failure: Option<String> = None;
    for r in &results {
        println!(
            "{} {:<36} {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
        if !r.pass && first_failure.is_none() {
            first_failure = Some(r.name.to_string());
        }
    }
    match first_failure {
        Some(name) => Err(CliError::Verify(name)),
        None => Ok(()),
    }
}
