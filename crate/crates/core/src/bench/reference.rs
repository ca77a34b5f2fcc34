use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::preset::{Preset, Problem};
use crate::error::{Error, Result};
use crate::propagators::{Propagator, PropagatorConfig, SchemeId};
use crate::spectral::{l2_error, read_dump, write_dump, DumpHeader, Wavefunction};

/// Reference runs take this many times more steps than the finest run.
pub const REFERENCE_REFINEMENT: usize = 50;
pub const REFERENCE_GL_NODES: usize = 21;

/// What a reference solution depends on.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceSpec {
    pub preset: Preset,
    pub eps: f64,
    pub n_grid: usize,
    pub t0: f64,
    pub t_final: f64,
    pub n_steps: usize,
}

impl ReferenceSpec {
    /// Reference for a sweep whose finest run takes `max_steps` steps.
    pub fn for_sweep(preset: Preset, eps: f64, n_grid: usize, t0: f64, t_final: f64, max_steps: usize) -> Self {
        Self { preset, eps, n_grid, t0, t_final, n_steps: REFERENCE_REFINEMENT * max_steps }
    }

    /// Content hash of the spec, used as the cache file stem.
    pub fn key(&self) -> String {
        let canonical = format!(
            "{}|{:016x}|{}|{:016x}|{:016x}|{}|{}",
            self.preset,
            self.eps.to_bits(),
            self.n_grid,
            self.t0.to_bits(),
            self.t_final.to_bits(),
            self.n_steps,
            REFERENCE_GL_NODES
        );
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

/// Runs the order-6 scheme with `n_steps` steps and 21 nodes.
pub fn compute_reference(spec: &ReferenceSpec, problem: &Problem) -> Result<Wavefunction<f64>> {
    let mut cfg = PropagatorConfig::new(SchemeId::Mz6, spec.eps);
    cfg.gl_nodes = REFERENCE_GL_NODES;
    let p = Propagator::new(cfg, problem.pot.clone(), &problem.grid)?;
    Ok(p.evolve(&problem.u0, spec.t0, spec.t_final, spec.n_steps)?.state)
}

fn paths(dir: &Path, key: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("{key}.mzwf")), dir.join(format!("{key}.sha256")))
}

/// Reads a cached reference; `None` when absent or when its hash does not match.
pub fn load_cached(dir: &Path, spec: &ReferenceSpec, problem: &Problem) -> Result<Option<Wavefunction<f64>>> {
    let (data, sum) = paths(dir, &spec.key());
    let (Ok(bytes), Ok(expected)) = (fs::read(&data), fs::read_to_string(&sum)) else {
        return Ok(None);
    };
    if hex::encode(Sha256::digest(&bytes)) != expected.trim() {
        log::warn!("cache entry {} is corrupt; recomputing", data.display());
        return Ok(None);
    }
    let (header, values) = match read_dump(Cursor::new(bytes)) {
        Ok(v) => v,
        Err(e) => {
            log::warn!("cache entry {} unreadable ({e}); recomputing", data.display());
            return Ok(None);
        }
    };
    if header.n_points as usize != spec.n_grid || header.eps != spec.eps || header.t != spec.t_final {
        log::warn!("cache entry {} does not match its key; recomputing", data.display());
        return Ok(None);
    }
    Ok(Some(Wavefunction::new(&problem.grid, values)?))
}

pub fn store(dir: &Path, spec: &ReferenceSpec, u: &Wavefunction<f64>) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let grid = u.grid();
    let header = DumpHeader {
        n_points: u.len() as u64,
        eps: spec.eps,
        t: spec.t_final,
        x_min: grid.x_min(),
        x_max: grid.x_max(),
    };
    let mut bytes = Vec::new();
    write_dump(&mut bytes, &header, u.values()).map_err(|e| Error::io(dir, e))?;
    let (data, sum) = paths(dir, &spec.key());
    fs::write(&data, &bytes).map_err(|e| Error::io(&data, e))?;
    fs::write(&sum, hex::encode(Sha256::digest(&bytes))).map_err(|e| Error::io(&sum, e))?;
    Ok(())
}

/// Cached reference solution, computed on a miss.
pub fn make_reference(spec: &ReferenceSpec, problem: &Problem, cache_dir: Option<&Path>) -> Result<Wavefunction<f64>> {
    if let Some(dir) = cache_dir {
        if let Some(u) = load_cached(dir, spec, problem)? {
            log::info!("reference {} loaded from cache", spec.key());
            return Ok(u);
        }
    }
    log::info!("computing reference with {} steps", spec.n_steps);
    let u = compute_reference(spec, problem)?;
    if let Some(dir) = cache_dir {
        store(dir, spec, &u)?;
    }
    Ok(u)
}

/// L2 distance between the reference and one computed with twice the steps.
pub fn reference_self_consistency(spec: &ReferenceSpec, problem: &Problem, reference: &Wavefunction<f64>) -> Result<f64> {
    let doubled = ReferenceSpec { n_steps: 2 * spec.n_steps, ..spec.clone() };
    l2_error(reference, &compute_reference(&doubled, problem)?)
}
