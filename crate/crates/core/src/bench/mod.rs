//! Experiment presets, reference solutions and the sweeps behind the CLI.
//!
//! `f64` only.

pub mod checks;
mod config;
mod preset;
mod reference;

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

pub use checks::{verify, CheckOutcome};
pub use config::RunConfig;
pub use preset::{
    chirp, double_well, preset_double_well_chirp, preset_smooth, resolution_warning, Preset, Problem, PACKET_CENTRE,
    PACKET_VARIANCE,
};
pub use reference::{
    compute_reference, load_cached, make_reference, reference_self_consistency, store, ReferenceSpec,
    REFERENCE_GL_NODES, REFERENCE_REFINEMENT,
};

use crate::error::{Error, Result};
use crate::propagators::{Evolution, Propagator, PropagatorConfig, SchemeId};
use crate::spectral::{energy, l2_error, Wavefunction};

/// One row of a results table.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub scheme: SchemeId,
    pub eps: f64,
    pub n_grid: usize,
    pub n_steps: usize,
    pub h: f64,
    pub gl_nodes: usize,
    pub l2_error: f64,
    pub energy_error: f64,
    pub norm_drift: f64,
    pub wall_seconds: f64,
}

pub const CSV_HEADER: [&str; 10] =
    ["scheme", "eps", "n_grid", "n_steps", "h", "gl_nodes", "l2_error", "energy_error", "norm_drift", "wall_seconds"];

impl ExperimentResult {
    fn record(&self) -> [String; 10] {
        [
            self.scheme.to_string(),
            format!("{:e}", self.eps),
            self.n_grid.to_string(),
            self.n_steps.to_string(),
            format!("{:e}", self.h),
            self.gl_nodes.to_string(),
            format!("{:e}", self.l2_error),
            format!("{:e}", self.energy_error),
            format!("{:e}", self.norm_drift),
            format!("{:.3}", self.wall_seconds),
        ]
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[ExperimentResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| Error::Format(format!("writing CSV: {e}"));
    w.write_record(CSV_HEADER).map_err(fail)?;
    for r in rows {
        w.write_record(r.record()).map_err(fail)?;
    }
    w.flush().map_err(|e| Error::Format(format!("writing CSV: {e}")))
}

/// Writes to `path`, or to stdout without one.
pub fn emit_csv(path: Option<&Path>, rows: &[ExperimentResult]) -> Result<()> {
    match path {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| Error::io(p, e))?;
            write_csv(f, rows)
        }
        None => write_csv(std::io::stdout().lock(), rows),
    }
}

/// Evolves `problem` with `cfg`, timing the stepping loop only.
pub fn evolve_problem(problem: &Problem, cfg: PropagatorConfig<f64>, t0: f64, t_final: f64, n_steps: usize) -> Result<(Evolution<f64>, f64)> {
    let p = Propagator::new(cfg, problem.pot.clone(), &problem.grid)?;
    let start = Instant::now();
    let ev = p.evolve(&problem.u0, t0, t_final, n_steps)?;
    Ok((ev, start.elapsed().as_secs_f64()))
}

/// Error, energy error and cost of one run against `reference`.
pub fn measure(
    problem: &Problem,
    cfg: PropagatorConfig<f64>,
    t0: f64,
    t_final: f64,
    n_steps: usize,
    reference: &Wavefunction<f64>,
) -> Result<ExperimentResult> {
    let (scheme, gl_nodes, eps) = (cfg.scheme, cfg.gl_nodes, cfg.eps);
    let (ev, wall) = evolve_problem(problem, cfg, t0, t_final, n_steps)?;
    let v_final = problem.pot.sample(&problem.grid, t_final, 0);
    let e = |u: &Wavefunction<f64>| energy(u, &v_final, eps);
    let result = ExperimentResult {
        scheme,
        eps,
        n_grid: problem.grid.len(),
        n_steps,
        h: (t_final - t0) / n_steps as f64,
        gl_nodes,
        l2_error: l2_error(&ev.state, reference)?,
        energy_error: (e(&ev.state)? - e(reference)?).abs(),
        norm_drift: ev.max_norm_drift(),
        wall_seconds: wall,
    };
    let finite = [result.l2_error, result.energy_error, result.norm_drift].iter().all(|x| x.is_finite());
    if !finite {
        return Err(Error::Numerical(format!("non-finite result for {scheme} with {n_steps} steps")));
    }
    Ok(result)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

/// Every (scheme, step count) of `cfg` against one shared reference, rows
/// sorted by scheme then step count.
pub fn run_table(cfg: &RunConfig) -> Result<Vec<ExperimentResult>> {
    cfg.validate()?;
    let problem = cfg.preset.build(cfg.eps, cfg.n_grid)?;
    let steps = cfg.step_counts();
    let t_final = cfg.t_final();
    let max_steps = *steps.iter().max().expect("validated");
    let spec = ReferenceSpec::for_sweep(cfg.preset, cfg.eps, cfg.n_grid, cfg.t0, t_final, max_steps);
    let reference = make_reference(&spec, &problem, Some(&cfg.cache_dir))?;
    let points: Vec<(SchemeId, usize)> =
        cfg.schemes.iter().flat_map(|&s| steps.iter().map(move |&n| (s, n))).collect();
    let mut rows = pool(cfg.jobs)?.install(|| {
        points
            .par_iter()
            .map(|&(s, n)| measure(&problem, cfg.propagator_config(s), cfg.t0, t_final, n, &reference))
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by(|a, b| (a.scheme, a.n_steps).cmp(&(b.scheme, b.n_steps)));
    Ok(rows)
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn loglog_slope(hs: &[f64], errs: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .zip(errs)
        .filter(|(h, e)| **h > 0.0 && **e > 0.0 && e.is_finite())
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Numerical(format!("slope fit needs two positive points, got {}", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Numerical("slope fit over a single step size".into()));
    }
    Ok(sxy / sxx)
}

#[derive(Clone, Debug)]
pub struct Convergence {
    pub rows: Vec<ExperimentResult>,
    /// Rows that entered the fit.
    pub used: Vec<usize>,
    pub slope: f64,
}

/// Errors below this are treated as saturated by the self-reference.
pub const SATURATION_FLOOR: f64 = 1e-11;

/// Self-convergence study: each step count against the same scheme run with
/// 100 times the largest count.
pub fn run_convergence(problem: &Problem, cfg: PropagatorConfig<f64>, t0: f64, t_final: f64, steps: &[usize], jobs: usize) -> Result<Convergence> {
    let n_points = steps.len();
    let (&lo, &hi) = (steps.iter().min().unwrap_or(&0), steps.iter().max().unwrap_or(&0));
    if n_points < 5 || lo == 0 || (hi as f64) < 10.0 * lo as f64 {
        return Err(Error::Config("convergence needs at least 5 step counts spanning a decade".into()));
    }
    let (ref_ev, _) = evolve_problem(problem, cfg.clone(), t0, t_final, 100 * hi)?;
    let reference = ref_ev.state;
    let mut rows = pool(jobs)?.install(|| {
        steps
            .par_iter()
            .map(|&n| measure(problem, cfg.clone(), t0, t_final, n, &reference))
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by_key(|r| r.n_steps);
    let used: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].l2_error >= 10.0 * SATURATION_FLOOR).collect();
    if used.len() < 3 {
        return Err(Error::Numerical(format!("degenerate fit: only {} unsaturated points", used.len())));
    }
    let hs: Vec<f64> = used.iter().map(|&i| rows[i].h).collect();
    let errs: Vec<f64> = used.iter().map(|&i| rows[i].l2_error).collect();
    let slope = loglog_slope(&hs, &errs)?;
    Ok(Convergence { rows, used, slope })
}
