use std::path::PathBuf;

use super::preset::Preset;
use crate::error::{Error, Result};
use crate::propagators::{LanczosChoice, PropagatorConfig, SchemeId};

/// One experiment, or a sweep when `schemes` or `steps` hold several values.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    pub schemes: Vec<SchemeId>,
    pub eps: f64,
    pub n_grid: usize,
    pub steps: Vec<usize>,
    pub t0: f64,
    pub t_final: Option<f64>,
    pub gl_nodes: usize,
    pub lanczos_w2: LanczosChoice,
    pub lanczos_w3: LanczosChoice,
    /// With `sigma` set, the step is `eps^sigma / sigma_mult` and `steps` is ignored.
    pub sigma: Option<f64>,
    pub sigma_mult: f64,
    pub out: Option<PathBuf>,
    pub cache_dir: PathBuf,
    pub snapshots: usize,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: Preset::DoubleWellChirp,
            schemes: vec![SchemeId::Mz6],
            eps: 1e-2,
            n_grid: 1000,
            steps: vec![100],
            t0: 0.0,
            t_final: None,
            gl_nodes: 11,
            lanczos_w2: LanczosChoice::Auto,
            lanczos_w3: LanczosChoice::Auto,
            sigma: None,
            sigma_mult: 1.0,
            out: None,
            cache_dir: PathBuf::from(".mzsplit-cache"),
            snapshots: 0,
            jobs: 0,
        }
    }
}

fn list<T>(value: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(parse).collect()
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

impl RunConfig {
    /// Parses flat `key = value` lines; `#` starts a comment.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.merge_config_str(text)?;
        Ok(cfg)
    }

    pub fn merge_config_str(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            self.set(key.trim(), value.trim()).map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    /// Sets one key; keys match the long CLI flags with `_` for `-`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.replace('-', "_").as_str() {
            "preset" => self.preset = value.parse()?,
            "scheme" | "schemes" => self.schemes = list(value, str::parse)?,
            "eps" => self.eps = num(key, value)?,
            "grid_points" | "n_grid" => self.n_grid = num(key, value)?,
            "steps" | "n_steps" => self.steps = list(value, |s| num(key, s))?,
            "t0" => self.t0 = num(key, value)?,
            "t_final" => self.t_final = Some(num(key, value)?),
            "gl_nodes" => self.gl_nodes = num(key, value)?,
            "lanczos_w2" => self.lanczos_w2 = value.parse()?,
            "lanczos_w3" => self.lanczos_w3 = value.parse()?,
            "sigma" => self.sigma = Some(num(key, value)?),
            "sigma_mult" => self.sigma_mult = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "cache_dir" => self.cache_dir = PathBuf::from(value),
            "snapshots" => self.snapshots = num(key, value)?,
            "jobs" => self.jobs = num(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn t_final(&self) -> f64 {
        self.t_final.unwrap_or_else(|| self.preset.default_t_final())
    }

    /// Step counts of the sweep; a sigma setting overrides `steps`.
    pub fn step_counts(&self) -> Vec<usize> {
        match self.sigma {
            Some(s) => {
                let h = self.eps.powf(s) / self.sigma_mult;
                vec![((self.t_final() - self.t0) / h).ceil().max(1.0) as usize]
            }
            None => self.steps.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() || self.step_counts().is_empty() {
            return Err(Error::Config("need at least one scheme and one step count".into()));
        }
        if self.step_counts().contains(&0) {
            return Err(Error::Config("step counts must be positive".into()));
        }
        if !(self.t_final() > self.t0) {
            return Err(Error::Config("t_final must exceed t0".into()));
        }
        if !(self.sigma_mult > 0.0) {
            return Err(Error::Config("sigma_mult must be positive".into()));
        }
        if self.n_grid < 4 {
            return Err(Error::Config("need at least 4 grid points".into()));
        }
        for &s in &self.schemes {
            self.propagator_config(s).validate()?;
        }
        Ok(())
    }

    pub fn propagator_config(&self, scheme: SchemeId) -> PropagatorConfig<f64> {
        let mut p = PropagatorConfig::new(scheme, self.eps);
        p.gl_nodes = self.gl_nodes;
        p.lanczos_w2 = self.lanczos_w2;
        p.lanczos_w3 = self.lanczos_w3;
        p.snapshot_every = self.snapshots;
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_config_file() {
        let cfg = RunConfig::from_config_str(
            "# sweep\npreset = double-well-chirp\nscheme = mz2, mz6\nsteps = 60,75,100  # N\neps = 0.01\ngrid-points = 1000\nlanczos_w2 = adaptive:20\n",
        )
        .unwrap();
        assert_eq!(cfg.schemes, vec![SchemeId::Mz2, SchemeId::Mz6]);
        assert_eq!(cfg.steps, vec![60, 75, 100]);
        assert!(matches!(cfg.lanczos_w2, LanczosChoice::Adaptive { max_iters: 20, .. }));
        assert_eq!(cfg.t_final(), 2.5);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::from_config_str("colour = blue").is_err());
        assert!(RunConfig::from_config_str("eps = small").is_err());
        assert!(RunConfig::from_config_str("eps 0.1").is_err());
        let mut c = RunConfig::default();
        c.eps = 2.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn sigma_sets_the_step() {
        let mut c = RunConfig::default();
        c.eps = 0.01;
        c.sigma = Some(0.5);
        c.sigma_mult = 2.0;
        // h = 0.05, T = 2.5
        assert_eq!(c.step_counts(), vec![50]);
    }
}
