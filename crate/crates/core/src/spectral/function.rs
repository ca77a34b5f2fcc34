use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::Grid;

/// Real samples of a function on a grid, optionally with exactly known
/// spatial derivatives.
///
/// `jet[a]` holds the samples of `d^a f / dx^a` for every order that was
/// supplied analytically (or obtained from products of such functions by the
/// Leibniz rule). Orders beyond the jet fall back to spectral
/// differentiation of the highest known one, which is only meaningful for
/// x-periodic functions.
#[derive(Clone)]
pub struct GridFunction<T: Real> {
    grid: Arc<Grid<T>>,
    jet: Vec<Arc<[T]>>,
    label: Arc<str>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(grid: &Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        Self::with_derivatives(grid, vec![values])
    }

    /// `jet[a]` are the samples of the `a`-th derivative.
    pub fn with_derivatives(grid: &Arc<Grid<T>>, jet: Vec<Vec<T>>) -> Result<Self> {
        if jet.is_empty() {
            return Err(Error::contract("grid function needs at least its values"));
        }
        for (a, d) in jet.iter().enumerate() {
            grid.check_len(d.len(), "grid function")?;
            if d.iter().any(|v| !v.is_finite()) {
                return Err(Error::contract(format!("non-finite samples in derivative {a}")));
            }
        }
        Ok(Self {
            grid: Arc::clone(grid),
            jet: jet.into_iter().map(Arc::from).collect(),
            label: Arc::from("f"),
        })
    }

    pub fn from_fn(grid: &Arc<Grid<T>>, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: Arc::clone(grid),
            jet: vec![Arc::from(grid.sample(f))],
            label: Arc::from("f"),
        }
    }

    /// Samples `f(order, x)` for orders `0..=max_order`.
    pub fn analytic(grid: &Arc<Grid<T>>, max_order: usize, f: impl Fn(usize, T) -> T) -> Self {
        let jet = (0..=max_order).map(|a| Arc::from(grid.sample(|x| f(a, x)))).collect();
        Self { grid: Arc::clone(grid), jet, label: Arc::from("f") }
    }

    /// A constant; all derivatives are exactly zero.
    pub fn constant(grid: &Arc<Grid<T>>, c: T) -> Self {
        let n = grid.len();
        let mut jet: Vec<Arc<[T]>> = vec![Arc::from(vec![c; n])];
        let zeros: Arc<[T]> = Arc::from(vec![T::zero(); n]);
        jet.extend(std::iter::repeat(zeros).take(2 * super::MAX_ORDER));
        Self { grid: Arc::clone(grid), jet, label: Arc::from(if c == T::one() { "1" } else { "c" }) }
    }

    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        Self::constant(grid, T::zero()).with_label("0")
    }

    pub fn with_label(mut self, label: impl AsRef<str>) -> Self {
        self.label = Arc::from(label.as_ref());
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.jet[0]
    }

    pub fn len(&self) -> usize {
        self.jet[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Highest derivative order known without spectral differentiation.
    pub fn known_order(&self) -> usize {
        self.jet.len() - 1
    }

    /// Samples of the `n`-th derivative.
    pub fn d(&self, n: usize) -> Result<Arc<[T]>> {
        if let Some(d) = self.jet.get(n) {
            return Ok(Arc::clone(d));
        }
        let top = self.known_order();
        Ok(Arc::from(self.grid.deriv_real(&self.jet[top], n - top)?))
    }

    /// The `k`-th derivative as a grid function.
    pub fn deriv(&self, k: usize) -> Result<Self> {
        let jet = if k < self.jet.len() {
            self.jet[k..].to_vec()
        } else {
            vec![self.d(k)?]
        };
        let label = match k {
            0 => self.label.to_string(),
            1 => format!("d({})", self.label),
            _ => format!("d{k}({})", self.label),
        };
        Ok(Self { grid: Arc::clone(&self.grid), jet, label: Arc::from(label) })
    }

    /// Pointwise product; the jet follows from the Leibniz rule.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid, "product")?;
        let order = self.known_order().min(other.known_order());
        let n = self.len();
        let mut jet = Vec::with_capacity(order + 1);
        for m in 0..=order {
            let mut acc = vec![T::zero(); n];
            let mut binom = T::one();
            for j in 0..=m {
                let (a, b) = (&self.jet[j], &other.jet[m - j]);
                for ((s, &x), &y) in acc.iter_mut().zip(a.iter()).zip(b.iter()) {
                    *s = *s + binom * x * y;
                }
                binom = binom * T::int((m - j) as i64) / T::int((j + 1) as i64);
            }
            jet.push(Arc::from(acc));
        }
        Ok(Self {
            grid: Arc::clone(&self.grid),
            jet,
            label: Arc::from(format!("{}*{}", self.label, other.label)),
        })
    }

    pub fn scale(&self, c: T) -> Self {
        let jet = self.jet.iter().map(|d| d.iter().map(|&v| v * c).collect::<Vec<_>>().into()).collect();
        Self { grid: Arc::clone(&self.grid), jet, label: Arc::clone(&self.label) }
    }

    /// `self + c * other`, keeping the common part of the two jets.
    pub fn add_scaled(&self, c: T, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid, "sum")?;
        let order = self.known_order().min(other.known_order());
        let jet = (0..=order)
            .map(|m| {
                self.jet[m]
                    .iter()
                    .zip(other.jet[m].iter())
                    .map(|(&a, &b)| a + c * b)
                    .collect::<Vec<_>>()
                    .into()
            })
            .collect();
        Ok(Self {
            grid: Arc::clone(&self.grid),
            jet,
            label: Arc::from(format!("({} + {}*{})", self.label, c, other.label)),
        })
    }

    /// Bit-identical samples on the same grid.
    pub fn same_samples(&self, other: &Self) -> bool {
        self.grid.same_as(&other.grid)
            && self.values().iter().zip(other.values()).all(|(a, b)| a.to_bits_eq(b))
    }

    pub fn is_zero(&self) -> bool {
        self.values().iter().all(|v| *v == T::zero())
    }

    pub fn max_abs(&self) -> T {
        self.values().iter().fold(T::zero(), |m, &v| m.max(num_traits::Float::abs(v)))
    }
}

trait BitsEq {
    fn to_bits_eq(&self, other: &Self) -> bool;
}

impl<T: Real> BitsEq for T {
    fn to_bits_eq(&self, other: &Self) -> bool {
        // integer_decode is exact for both f32 and f64
        num_traits::Float::integer_decode(*self) == num_traits::Float::integer_decode(*other)
    }
}

impl<T: Real> fmt::Debug for GridFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFunction")
            .field("label", &self.label)
            .field("n", &self.len())
            .field("known_order", &self.known_order())
            .finish()
    }
}

/// Complex state vector on a grid.
#[derive(Clone)]
pub struct Wavefunction<T: Real> {
    grid: Arc<Grid<T>>,
    values: Vec<Complex<T>>,
}

impl<T: Real> Wavefunction<T> {
    pub fn new(grid: &Arc<Grid<T>>, values: Vec<Complex<T>>) -> Result<Self> {
        grid.check_len(values.len(), "wavefunction")?;
        Ok(Self { grid: Arc::clone(grid), values })
    }

    pub fn from_fn(grid: &Arc<Grid<T>>, f: impl Fn(T) -> Complex<T>) -> Self {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self { grid: Arc::clone(grid), values }
    }

    pub fn zeros(grid: &Arc<Grid<T>>) -> Self {
        Self { grid: Arc::clone(grid), values: vec![Complex::new(T::zero(), T::zero()); grid.len()] }
    }

    /// Unit vector `e_j` (not normalised in the grid `L^2` sense).
    pub fn unit(grid: &Arc<Grid<T>>, j: usize) -> Self {
        let mut u = Self::zeros(grid);
        u.values[j] = Complex::new(T::one(), T::zero());
        u
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Rescales to unit grid `L^2` norm. A zero state is left untouched.
    pub fn normalize(&mut self) {
        let n = super::l2_norm(self);
        if n > T::zero() {
            let s = T::one() / n;
            for z in &mut self.values {
                *z = *z * s;
            }
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub fn deriv(&self, k: usize) -> Result<Self> {
        Ok(Self { grid: Arc::clone(&self.grid), values: self.grid.deriv_complex(&self.values, k)? })
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self { grid: Arc::clone(&self.grid), values: self.values.iter().map(|&z| z * c).collect() }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: Complex<T>, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid, "axpy")?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a + c * b).collect();
        Ok(Self { grid: Arc::clone(&self.grid), values })
    }

    /// Hermitian inner product `dx * sum conj(a_j) b_j`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.grid.check_same(&other.grid, "inner product")?;
        let s: Complex<T> = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.dx())
    }

    pub(crate) fn has_non_finite(&self) -> bool {
        self.values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
    }
}

impl<T: Real> fmt::Debug for Wavefunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Wavefunction").field("n", &self.values.len()).finish()
    }
}

impl<T: Real> Add for &Wavefunction<T> {
    type Output = Wavefunction<T>;

    fn add(self, rhs: Self) -> Wavefunction<T> {
        self.axpy(Complex::new(T::one(), T::zero()), rhs).expect("matching grids")
    }
}

impl<T: Real> Sub for &Wavefunction<T> {
    type Output = Wavefunction<T>;

    fn sub(self, rhs: Self) -> Wavefunction<T> {
        self.axpy(Complex::new(-T::one(), T::zero()), rhs).expect("matching grids")
    }
}

impl<T: Real> Mul<Complex<T>> for &Wavefunction<T> {
    type Output = Wavefunction<T>;

    fn mul(self, rhs: Complex<T>) -> Wavefunction<T> {
        self.scaled(rhs)
    }
}
