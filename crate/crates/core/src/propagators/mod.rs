//! Per-step exponents, the three splittings and the time loop.

mod exponents;
mod steps;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use num_rational::Ratio;

pub use exponents::{
    assemble_mz4_exponents, assemble_mz6_exponents, theta2, theta4o, DiagExponent, KineticExponent, Mz4Exponents,
    Mz6Exponents,
};
pub use steps::{step_mz2, step_mz4, step_mz6};

use crate::error::{Error, Result};
use crate::integrals::{gl_rule, MuLambdaTables, NodeSamples, PotentialModel, MZ2_KEYS, MZ4_KEYS, MZ6_KEYS};
use crate::krylov::{LanczosConfig, LanczosReport};
use crate::scalar::Real;
use crate::spectral::{l2_norm, Grid, Wavefunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    Mz2,
    Mz4,
    Mz6,
}

impl SchemeId {
    pub const ALL: [SchemeId; 3] = [SchemeId::Mz2, SchemeId::Mz4, SchemeId::Mz6];

    pub fn order(self) -> usize {
        match self {
            SchemeId::Mz2 => 2,
            SchemeId::Mz4 => 4,
            SchemeId::Mz6 => 6,
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeId::Mz2 => "mz2",
            SchemeId::Mz4 => "mz4",
            SchemeId::Mz6 => "mz6",
        })
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mz2" => Ok(SchemeId::Mz2),
            "mz4" => Ok(SchemeId::Mz4),
            "mz6" => Ok(SchemeId::Mz6),
            other => Err(Error::Config(format!("unknown scheme `{other}` (expected mz2, mz4 or mz6)"))),
        }
    }
}

/// What to do with exponent terms that are below the splitting error when
/// `h = eps^sigma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SigmaPolicy {
    #[default]
    AlwaysInclude,
    PruneBySigma(Ratio<i64>),
}

/// Lanczos iteration count for one of the central exponentials.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum LanczosChoice {
    /// Scheme-dependent defaults, see [`PropagatorConfig::lanczos_for`].
    #[default]
    Auto,
    Fixed(usize),
    Adaptive { max_iters: usize, tol: f64 },
}

impl FromStr for LanczosChoice {
    type Err = Error;

    /// `auto`, a count such as `5`, or `adaptive` / `adaptive:<max>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "auto" {
            return Ok(LanczosChoice::Auto);
        }
        if let Some(rest) = s.strip_prefix("adaptive") {
            let max_iters = match rest.strip_prefix(':') {
                Some(m) => m.parse().map_err(|_| Error::Config(format!("bad Lanczos count in `{s}`")))?,
                None if rest.is_empty() => 30,
                None => return Err(Error::Config(format!("bad Lanczos setting `{s}`"))),
            };
            return Ok(LanczosChoice::Adaptive { max_iters, tol: 1e-12 });
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(Error::Config(format!("bad Lanczos setting `{s}` (auto, adaptive[:max] or a positive count)"))),
            Ok(m) => Ok(LanczosChoice::Fixed(m)),
        }
    }
}

impl fmt::Display for LanczosChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LanczosChoice::Auto => f.write_str("auto"),
            LanczosChoice::Fixed(m) => write!(f, "{m}"),
            LanczosChoice::Adaptive { max_iters, .. } => write!(f, "adaptive:{max_iters}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PropagatorConfig<T: Real> {
    pub scheme: SchemeId,
    pub eps: T,
    pub gl_nodes: usize,
    pub sigma_policy: SigmaPolicy,
    pub lanczos_w2: LanczosChoice,
    pub lanczos_w3: LanczosChoice,
    /// Steps at least this long count as large for the `Auto` Lanczos
    /// counts. Defaults to `sqrt(eps)`.
    pub large_step_threshold: Option<T>,
    /// Order-2 only: replace `mu_00` by `h V(t + h/2)`.
    pub midpoint: bool,
    /// Use the closed form for separable potentials when available.
    pub separable_fast_path: bool,
    /// Keep every k-th state during [`Propagator::evolve`]; 0 keeps none.
    pub snapshot_every: usize,
}

impl<T: Real> PropagatorConfig<T> {
    pub fn new(scheme: SchemeId, eps: T) -> Self {
        Self {
            scheme,
            eps,
            gl_nodes: 11,
            sigma_policy: SigmaPolicy::AlwaysInclude,
            lanczos_w2: LanczosChoice::Auto,
            lanczos_w3: LanczosChoice::Auto,
            large_step_threshold: None,
            midpoint: false,
            separable_fast_path: true,
            snapshot_every: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > T::zero() && self.eps <= T::one()) {
            return Err(Error::Config(format!("eps must lie in (0, 1], got {}", self.eps)));
        }
        if self.gl_nodes == 0 || self.gl_nodes > crate::integrals::MAX_GL_NODES {
            return Err(Error::Config(format!("gl_nodes = {} out of range", self.gl_nodes)));
        }
        for c in [self.lanczos_w2, self.lanczos_w3] {
            self.resolve(c, 1).validate()?;
        }
        Ok(())
    }

    fn resolve(&self, choice: LanczosChoice, auto: usize) -> LanczosConfig {
        match choice {
            LanczosChoice::Auto => LanczosConfig::fixed(auto),
            LanczosChoice::Fixed(m) => LanczosConfig::fixed(m),
            LanczosChoice::Adaptive { max_iters, tol } => LanczosConfig::adaptive(max_iters, tol),
        }
    }

    /// Lanczos settings for the `W2` and `W3` exponentials at step `h`.
    ///
    /// `Auto` means 4 for the order-4 centre; for order 6, 3 (small steps) or
    /// 5 (large steps) for `W2` and 2 for `W3`.
    pub fn lanczos_for(&self, h: T) -> (LanczosConfig, LanczosConfig) {
        let threshold = self.large_step_threshold.unwrap_or_else(|| self.eps.sqrt());
        let large = num_traits::Float::abs(h) >= threshold;
        let auto_w2 = match self.scheme {
            SchemeId::Mz6 if !large => 3,
            SchemeId::Mz6 => 5,
            _ => 4,
        };
        (self.resolve(self.lanczos_w2, auto_w2), self.resolve(self.lanczos_w3, 2))
    }
}

/// Everything one step needs besides the state.
#[derive(Clone, Debug)]
pub struct StepContext<T: Real> {
    pub eps: T,
    pub t: T,
    pub h: T,
    pub sigma_policy: SigmaPolicy,
    pub tables: MuLambdaTables<T>,
    pub lanczos_w2: LanczosConfig,
    pub lanczos_w3: LanczosConfig,
}

#[derive(Clone, Debug, Default)]
pub struct StepReport {
    pub norm_before: f64,
    pub norm_after: f64,
    pub lanczos: Vec<LanczosReport>,
    pub wall_time: Duration,
}

impl StepReport {
    /// `| ||u_after|| - ||u_before|| | / ||u_before||`.
    pub fn norm_drift(&self) -> f64 {
        if self.norm_before == 0.0 {
            return self.norm_after;
        }
        (self.norm_after - self.norm_before).abs() / self.norm_before
    }
}

#[derive(Clone, Debug)]
pub struct Evolution<T: Real> {
    pub state: Wavefunction<T>,
    pub reports: Vec<StepReport>,
    /// `(t, u(t))`, including the initial state when snapshots are enabled.
    pub snapshots: Vec<(T, Wavefunction<T>)>,
}

impl<T: Real> Evolution<T> {
    pub fn max_norm_drift(&self) -> f64 {
        self.reports.iter().map(StepReport::norm_drift).fold(0.0, f64::max)
    }

    pub fn wall_time(&self) -> Duration {
        self.reports.iter().map(|r| r.wall_time).sum()
    }
}

const DRIFT_WARNING: f64 = 1e-10;

/// A scheme bound to a potential and a grid.
#[derive(Clone)]
pub struct Propagator<T: Real> {
    cfg: PropagatorConfig<T>,
    pot: PotentialModel<T>,
    grid: Arc<Grid<T>>,
}

impl<T: Real> Propagator<T> {
    pub fn new(cfg: PropagatorConfig<T>, pot: PotentialModel<T>, grid: &Arc<Grid<T>>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, pot, grid: grid.clone() })
    }

    pub fn config(&self) -> &PropagatorConfig<T> {
        &self.cfg
    }

    pub fn potential(&self) -> &PotentialModel<T> {
        &self.pot
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    /// Time integrals over `[t, t + h]` for the configured scheme.
    pub fn tables(&self, t: T, h: T) -> Result<MuLambdaTables<T>> {
        let rule = gl_rule(self.cfg.gl_nodes, h)?;
        let samples = NodeSamples::with_path(&self.pot, &self.grid, t, &rule, self.cfg.separable_fast_path);
        let mut tables = match self.cfg.scheme {
            SchemeId::Mz2 if self.cfg.midpoint => MuLambdaTables::empty(t, h),
            SchemeId::Mz2 => MuLambdaTables::build(&samples, MZ2_KEYS)?,
            SchemeId::Mz4 => MuLambdaTables::build(&samples, MZ4_KEYS)?,
            SchemeId::Mz6 => MuLambdaTables::build(&samples, MZ6_KEYS)?,
        };
        if self.cfg.midpoint {
            tables.insert_midpoint(&self.pot, &self.grid);
        }
        Ok(tables)
    }

    pub fn context(&self, t: T, h: T) -> Result<StepContext<T>> {
        let (lanczos_w2, lanczos_w3) = self.cfg.lanczos_for(h);
        Ok(StepContext {
            eps: self.cfg.eps,
            t,
            h,
            sigma_policy: self.cfg.sigma_policy,
            tables: self.tables(t, h)?,
            lanczos_w2,
            lanczos_w3,
        })
    }

    /// One step from `t` to `t + h`; `h` may be negative, `h = 0` is the identity.
    pub fn step(&self, u: &Wavefunction<T>, t: T, h: T) -> Result<(Wavefunction<T>, StepReport)> {
        self.grid.check_same(u.grid(), "step")?;
        if h == T::zero() {
            let n = l2_norm(u).as_f64();
            return Ok((u.clone(), StepReport { norm_before: n, norm_after: n, ..Default::default() }));
        }
        let ctx = self.context(t, h)?;
        match self.cfg.scheme {
            SchemeId::Mz2 => step_mz2(u, &ctx, self.cfg.midpoint),
            SchemeId::Mz4 => step_mz4(u, &ctx),
            SchemeId::Mz6 => step_mz6(u, &ctx),
        }
    }

    /// `n_steps` uniform steps from `t0` to `t_final`.
    pub fn evolve(&self, u0: &Wavefunction<T>, t0: T, t_final: T, n_steps: usize) -> Result<Evolution<T>> {
        if n_steps == 0 {
            return Err(Error::Config("n_steps must be at least 1".into()));
        }
        let h = (t_final - t0) / T::int(n_steps as i64);
        let every = self.cfg.snapshot_every;
        let mut u = u0.clone();
        let mut reports = Vec::with_capacity(n_steps);
        let mut snapshots = Vec::new();
        if every > 0 {
            snapshots.push((t0, u.clone()));
        }
        for n in 0..n_steps {
            // t_n computed from n rather than accumulated
            let t = t0 + T::int(n as i64) * h;
            let (next, report) = self.step(&u, t, h)?;
            if next.has_non_finite() {
                return Err(Error::Numerical(format!("non-finite state after step {} (t = {})", n + 1, t + h)));
            }
            let drift = report.norm_drift();
            if drift > DRIFT_WARNING {
                log::warn!("step {}: norm drift {:.3e}", n + 1, drift);
            }
            u = next;
            reports.push(report);
            if every > 0 && (n + 1) % every == 0 {
                snapshots.push((t + h, u.clone()));
            }
        }
        Ok(Evolution { state: u, reports, snapshots })
    }
}

#[cfg(test)]
mod tests;
