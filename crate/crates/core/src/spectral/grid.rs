use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Highest derivative order the schemes ever apply.
pub const MAX_ORDER: usize = 6;

/// Periodic uniform grid on `[x_min, x_max)` together with its Fourier
/// machinery.
///
/// Nodes are `x_j = x_min + j dx`, `j = 0..n`. Frequencies are signed,
/// `m = -n/2+1, ..., n/2`, stored in FFT order. The forward transform is
/// unnormalised and the inverse carries `1/n`.
pub struct Grid<T: Real> {
    x_min: T,
    x_max: T,
    n: usize,
    dx: T,
    nodes: Vec<T>,
    wavenumbers: Vec<T>,
    symbols: Vec<Vec<Complex<T>>>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    transforms: AtomicUsize,
}

impl<T: Real> Grid<T> {
    pub fn new(x_min: T, x_max: T, n_points: usize) -> Result<Arc<Self>> {
        if n_points < 4 || n_points % 2 != 0 {
            return Err(Error::contract(format!(
                "grid needs an even number of points >= 4, got {n_points}"
            )));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::contract("grid interval must be finite and non-empty"));
        }
        let length = x_max - x_min;
        let dx = length / T::int(n_points as i64);
        let nodes = (0..n_points).map(|j| x_min + dx * T::int(j as i64)).collect();

        let half = n_points / 2;
        let two_pi_over_l = T::TAU() / length;
        let wavenumbers: Vec<T> = (0..n_points)
            .map(|j| {
                let m = if j <= half { j as i64 } else { j as i64 - n_points as i64 };
                two_pi_over_l * T::int(m)
            })
            .collect();

        let symbols = (0..=MAX_ORDER)
            .map(|k| {
                wavenumbers
                    .iter()
                    .enumerate()
                    .map(|(j, &w)| {
                        if k % 2 == 1 && j == half {
                            // odd orders drop the Nyquist mode
                            Complex::new(T::zero(), T::zero())
                        } else {
                            Complex::new(T::zero(), w).powu(k as u32)
                        }
                    })
                    .collect()
            })
            .collect();

        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n_points);
        let inverse = planner.plan_fft_inverse(n_points);

        Ok(Arc::new(Self {
            x_min,
            x_max,
            n: n_points,
            dx,
            nodes,
            wavenumbers,
            symbols,
            forward,
            inverse,
            transforms: AtomicUsize::new(0),
        }))
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn length(&self) -> T {
        self.x_max - self.x_min
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Angular wavenumbers `2 pi m / L` in FFT order.
    pub fn wavenumbers(&self) -> &[T] {
        &self.wavenumbers
    }

    /// Fourier symbol `c_k` of the `k`-th spectral derivative.
    pub fn symbol(&self, k: usize) -> Result<&[Complex<T>]> {
        self.symbols
            .get(k)
            .map(Vec::as_slice)
            .ok_or(Error::UnsupportedOrder { order: k, max: MAX_ORDER })
    }

    /// Same grid by identity, or by bit-identical geometry.
    pub fn same_as(&self, other: &Grid<T>) -> bool {
        std::ptr::eq(self, other)
            || (self.n == other.n && self.x_min == other.x_min && self.x_max == other.x_max)
    }

    pub(crate) fn check_same(&self, other: &Grid<T>, what: &str) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: grids [{}, {}]/{} and [{}, {}]/{}",
                self.x_min, self.x_max, self.n, other.x_min, other.x_max, other.n
            )))
        }
    }

    pub(crate) fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{what}: length {len}, grid has {}", self.n)))
        }
    }

    /// In-place unnormalised forward DFT.
    pub fn forward(&self, buf: &mut [Complex<T>]) {
        self.transforms.fetch_add(1, Ordering::Relaxed);
        self.forward.process(buf);
    }

    /// In-place inverse DFT including the `1/n` factor.
    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        self.transforms.fetch_add(1, Ordering::Relaxed);
        self.inverse.process(buf);
        let scale = T::one() / T::int(self.n as i64);
        for z in buf.iter_mut() {
            *z = *z * scale;
        }
    }

    /// Number of transforms (forward and inverse) executed on this grid.
    pub fn transform_count(&self) -> usize {
        self.transforms.load(Ordering::Relaxed)
    }

    /// Spectral `k`-th derivative of complex samples.
    pub fn deriv_complex(&self, values: &[Complex<T>], k: usize) -> Result<Vec<Complex<T>>> {
        self.check_len(values.len(), "deriv")?;
        let symbol = self.symbol(k)?;
        if k == 0 {
            return Ok(values.to_vec());
        }
        let mut buf = values.to_vec();
        self.forward(&mut buf);
        for (z, c) in buf.iter_mut().zip(symbol) {
            *z = *z * *c;
        }
        self.inverse(&mut buf);
        Ok(buf)
    }

    /// Spectral `k`-th derivative of real samples; the result is real.
    pub fn deriv_real(&self, values: &[T], k: usize) -> Result<Vec<T>> {
        let buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        Ok(self.deriv_complex(&buf, k)?.into_iter().map(|z| z.re).collect())
    }

    /// Samples `f` on the nodes.
    pub fn sample(&self, f: impl Fn(T) -> T) -> Vec<T> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }
}

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("x_min", &self.x_min)
            .field("x_max", &self.x_max)
            .field("n_points", &self.n)
            .finish()
    }
}
