use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrals::PotentialModel;
use crate::spectral::{Grid, Wavefunction};

/// Laser amplitude `10 exp(-10 (t-1)^2) sin(500 (t-1)^4 + 10)`.
pub fn chirp(t: f64) -> f64 {
    let s = t - 1.0;
    10.0 * (-10.0 * s * s).exp() * (500.0 * s.powi(4) + 10.0).sin()
}

/// Derivatives of the double well `x^4/5 - 2x^2`.
pub fn double_well(a: usize, x: f64) -> f64 {
    match a {
        0 => x.powi(4) / 5.0 - 2.0 * x * x,
        1 => 4.0 * x.powi(3) / 5.0 - 4.0 * x,
        2 => 12.0 * x * x / 5.0 - 4.0,
        3 => 24.0 * x / 5.0,
        4 => 24.0 / 5.0,
        _ => 0.0,
    }
}

/// Centre and variance of the initial packet in the double-well presets.
pub const PACKET_CENTRE: f64 = -2.5;
pub const PACKET_VARIANCE: f64 = 1e-2;

/// Heuristic: fewer than `RESOLUTION / eps` points leaves `eps`-wavelengths
/// under-resolved.
const RESOLUTION: f64 = 2.56;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preset {
    /// Packet in the left well, driven by the chirped laser.
    DoubleWellChirp,
    /// Same with the laser off.
    DoubleWell,
    /// Same packet with `V = 0`.
    Free,
    /// `sin(x) (1 + t)` on `[0, 2 pi]`, no fast time scale.
    Smooth,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::DoubleWellChirp, Preset::DoubleWell, Preset::Free, Preset::Smooth];

    pub fn name(self) -> &'static str {
        match self {
            Preset::DoubleWellChirp => "double-well-chirp",
            Preset::DoubleWell => "double-well",
            Preset::Free => "free",
            Preset::Smooth => "smooth",
        }
    }

    pub fn default_t_final(self) -> f64 {
        match self {
            Preset::Smooth => 1.0,
            _ => 2.5,
        }
    }

    pub fn build(self, eps: f64, n_grid: usize) -> Result<Problem> {
        match self {
            Preset::DoubleWellChirp => preset_double_well_chirp(eps, n_grid),
            Preset::DoubleWell => {
                let mut p = preset_double_well_chirp(eps, n_grid)?;
                p.pot = PotentialModel::separable(double_well, |_| 0.0).with_label("V_D");
                p.preset = self;
                Ok(p)
            }
            Preset::Free => {
                let mut p = preset_double_well_chirp(eps, n_grid)?;
                p.pot = PotentialModel::zero();
                p.preset = self;
                Ok(p)
            }
            Preset::Smooth => preset_smooth(eps, n_grid),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset `{s}`")))
    }
}

/// Initial state, potential and grid of an experiment.
#[derive(Clone)]
pub struct Problem {
    pub preset: Preset,
    pub eps: f64,
    pub grid: Arc<Grid<f64>>,
    pub u0: Wavefunction<f64>,
    pub pot: PotentialModel<f64>,
}

/// `None`, or a warning when `n_grid` is too coarse for `eps`.
pub fn resolution_warning(eps: f64, n_grid: usize) -> Option<String> {
    let needed = (RESOLUTION / eps).ceil() as usize;
    (n_grid < needed).then(|| format!("{n_grid} grid points under-resolve eps = {eps}; use at least {needed}"))
}

fn gaussian(grid: &Arc<Grid<f64>>, centre: f64, variance: f64) -> Wavefunction<f64> {
    let c = (variance * PI).powf(-0.25);
    Wavefunction::from_fn(grid, |x| Complex64::new(c * (-(x - centre).powi(2) / (2.0 * variance)).exp(), 0.0)).normalized()
}

/// Gaussian in the left well of `x^4/5 - 2x^2 + f(t) x` on `[-5, 5]`.
pub fn preset_double_well_chirp(eps: f64, n_grid: usize) -> Result<Problem> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Config(format!("eps must lie in (0, 1], got {eps}")));
    }
    if let Some(w) = resolution_warning(eps, n_grid) {
        log::warn!("{w}");
    }
    let grid = Grid::new(-5.0, 5.0, n_grid)?;
    let u0 = gaussian(&grid, PACKET_CENTRE, PACKET_VARIANCE);
    let pot = PotentialModel::separable(double_well, chirp).with_label("V_C");
    Ok(Problem { preset: Preset::DoubleWellChirp, eps, grid, u0, pot })
}

/// `sin(x) (1 + t)` with a Gaussian of variance `eps` at `x = pi`.
pub fn preset_smooth(eps: f64, n_grid: usize) -> Result<Problem> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Config(format!("eps must lie in (0, 1], got {eps}")));
    }
    let grid = Grid::new(0.0, 2.0 * PI, n_grid)?;
    let u0 = gaussian(&grid, PI, eps);
    let pot = PotentialModel::new(|x: f64, t| x.sin() * (1.0 + t))
        .with_derivatives(usize::MAX, |a, x, t| {
            let d = match a % 4 {
                0 => x.sin(),
                1 => x.cos(),
                2 => -x.sin(),
                _ => -x.cos(),
            };
            d * (1.0 + t)
        })
        .with_label("sin(x)(1+t)");
    Ok(Problem { preset: Preset::Smooth, eps, grid, u0, pot })
}
