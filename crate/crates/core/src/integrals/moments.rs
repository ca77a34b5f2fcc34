use std::sync::Arc;

use super::kernels::{interpolation_weights, TriangleKernel};
use super::potential::PotentialModel;
use super::quadrature::{scaled_bernoulli, QuadratureRule};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{Grid, GridFunction};

/// Which part of the integrand, about the step midpoint, enters an integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    None,
    Even,
    Odd,
}

impl Parity {
    fn suffix(self) -> &'static str {
        match self {
            Parity::None => "",
            Parity::Even => "e",
            Parity::Odd => "o",
        }
    }
}

/// Highest analytic derivative order carried by the node samples.
pub const SAMPLE_ORDER: usize = 4;

#[derive(Clone, Debug)]
enum Source<T: Real> {
    /// `V(., t + tau_i)` for every node.
    Slices(Vec<GridFunction<T>>),
    /// `V_D` and `x` on the grid, and `f(t + tau_i)`.
    Separable { vd: GridFunction<T>, x: GridFunction<T>, f: Vec<T> },
}

/// The potential at the quadrature nodes of one step `[t, t + h]`.
#[derive(Clone, Debug)]
pub struct NodeSamples<T: Real> {
    t: T,
    rule: QuadratureRule<T>,
    grid: Arc<Grid<T>>,
    source: Source<T>,
}

impl<T: Real> NodeSamples<T> {
    /// Uses the separable representation when the potential has one.
    pub fn new(pot: &PotentialModel<T>, grid: &Arc<Grid<T>>, t: T, rule: &QuadratureRule<T>) -> Self {
        Self::with_path(pot, grid, t, rule, true)
    }

    pub fn with_path(pot: &PotentialModel<T>, grid: &Arc<Grid<T>>, t: T, rule: &QuadratureRule<T>, separable: bool) -> Self {
        let source = match pot.separable_parts() {
            Some(sep) if separable => {
                let s = Arc::clone(&sep.static_part);
                let vd = GridFunction::analytic(grid, SAMPLE_ORDER, |a, x| s(a, x)).with_label("V_D");
                let x = GridFunction::analytic(grid, SAMPLE_ORDER, |a, x| match a {
                    0 => x,
                    1 => T::one(),
                    _ => T::zero(),
                })
                .with_label("x");
                let f = rule.nodes.iter().map(|&tau| (sep.profile)(t + tau)).collect();
                Source::Separable { vd, x, f }
            }
            _ => Source::Slices(rule.nodes.iter().map(|&tau| pot.sample(grid, t + tau, SAMPLE_ORDER)).collect()),
        };
        Self { t, rule: rule.clone(), grid: Arc::clone(grid), source }
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn h(&self) -> T {
        self.rule.h
    }

    pub fn rule(&self) -> &QuadratureRule<T> {
        &self.rule
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn is_separable(&self) -> bool {
        matches!(self.source, Source::Separable { .. })
    }

    fn check_parity(&self, parity: Parity) -> Result<()> {
        if parity != Parity::None && !self.rule.is_symmetric() {
            return Err(Error::Quadrature("parity splitting needs a rule symmetric about the midpoint".into()));
        }
        Ok(())
    }

    /// `sum_i a_i V(., t + tau_i)`, folding mirrored nodes first so that
    /// antisymmetric weights cancel exactly on time-independent data.
    fn combine(&self, a: &[T], parity: Parity) -> Result<GridFunction<T>> {
        let n = a.len();
        match &self.source {
            Source::Slices(slices) => {
                let mut acc = GridFunction::zeros(&self.grid);
                for i in 0..n.div_ceil(2) {
                    let j = n - 1 - i;
                    let pair = if i == j {
                        slices[i].scale(a[i])
                    } else if parity == Parity::None {
                        slices[i].scale(a[i]).add_scaled(a[j], &slices[j])?
                    } else {
                        // a_j = +-a_i for the parity parts
                        let sign = if parity == Parity::Even { T::one() } else { -T::one() };
                        slices[i].add_scaled(sign, &slices[j])?.scale(a[i])
                    };
                    acc = acc.add_scaled(T::one(), &pair)?;
                }
                Ok(acc)
            }
            Source::Separable { vd, x, f } => {
                let beta: T = a.iter().copied().sum();
                let phi: T = a.iter().zip(f).map(|(&ai, &fi)| ai * fi).sum();
                let static_part = if parity == Parity::Odd { T::zero() } else { beta };
                vd.scale(static_part).add_scaled(phi, x)
            }
        }
    }

    /// `int_0^h (h^j B_j(zeta/h))^k W*(zeta - h/2) dzeta` by quadrature, with
    /// `W(s) = V(t + h/2 + s)`.
    pub fn mu(&self, j: usize, k: usize, parity: Parity) -> Result<GridFunction<T>> {
        if j > 4 || k > 2 {
            return Err(Error::contract(format!("mu_({j},{k}) is outside the supported range")));
        }
        self.check_parity(parity)?;
        let h = self.h();
        let c = self
            .rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .map(|(&tau, &w)| Ok(w * scaled_bernoulli(j, h, tau)?.powi(k as i32)))
            .collect::<Result<Vec<T>>>()?;
        let n = c.len();
        let a: Vec<T> = match parity {
            Parity::None => c,
            Parity::Even => (0..n).map(|i| T::lit(0.5) * (c[i] + c[n - 1 - i])).collect(),
            Parity::Odd => (0..n).map(|i| T::lit(0.5) * (c[i] - c[n - 1 - i])).collect(),
        };
        Ok(self.combine(&a, parity)?.with_label(format!("mu{j}{k}{}", parity.suffix())))
    }

    /// `int int_{0 <= xi <= zeta <= h} f(h, zeta, xi) [d^a W(zeta') d^b W(xi')]* dxi dzeta`
    /// with `zeta' = zeta - h/2`, `xi' = xi - h/2`; the parity part is taken
    /// jointly in `(zeta', xi')`. `W` is replaced by its interpolant through the
    /// nodes. Only values are returned, without a derivative jet.
    pub fn lambda(&self, kernel: &TriangleKernel, a: usize, b: usize, parity: Parity) -> Result<GridFunction<T>> {
        self.check_parity(parity)?;
        let n = self.rule.len();
        let unit = interpolation_weights(kernel, n);
        let scale = self.h().powi(kernel.degree() as i32 + 2);
        let sign = match parity {
            Parity::None => 0.0,
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        };
        // C'_ij = (C_ij +- C_{i'j'}) / 2 with i' = n-1-i
        let c: Vec<T> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let mirror = unit[(n - 1 - i) * n + (n - 1 - j)];
                let v = if parity == Parity::None { unit[idx] } else { 0.5 * (unit[idx] + sign * mirror) };
                T::lit(v) * scale
            })
            .collect();
        let label = format!("L{}[{:?}]^{a}{b}", parity.suffix(), kernel.name);
        match &self.source {
            Source::Slices(slices) => {
                let da: Vec<Arc<[T]>> = slices.iter().map(|s| s.d(a)).collect::<Result<_>>()?;
                let db: Vec<Arc<[T]>> = slices.iter().map(|s| s.d(b)).collect::<Result<_>>()?;
                let len = self.grid.len();
                let mut out = vec![T::zero(); len];
                let mut p = vec![T::zero(); len];
                for i in 0..n {
                    p.iter_mut().for_each(|v| *v = T::zero());
                    for j in 0..n {
                        let cij = c[i * n + j];
                        for (pv, &bv) in p.iter_mut().zip(db[j].iter()) {
                            *pv = *pv + cij * bv;
                        }
                    }
                    for ((o, &av), &pv) in out.iter_mut().zip(da[i].iter()).zip(&p) {
                        *o = *o + av * pv;
                    }
                }
                Ok(GridFunction::new(&self.grid, out)?.with_label(label))
            }
            Source::Separable { vd, x, f } => {
                let (mut s0, mut s1, mut s2, mut s3) = (T::zero(), T::zero(), T::zero(), T::zero());
                for i in 0..n {
                    for j in 0..n {
                        let cij = c[i * n + j];
                        s0 = s0 + cij;
                        s1 = s1 + cij * f[j];
                        s2 = s2 + cij * f[i];
                        s3 = s3 + cij * f[i] * f[j];
                    }
                }
                let (va, vb) = (vd.d(a)?, vd.d(b)?);
                let (xa, xb) = (x.d(a)?, x.d(b)?);
                let out = (0..self.grid.len())
                    .map(|m| s0 * va[m] * vb[m] + s1 * va[m] * xb[m] + s2 * xa[m] * vb[m] + s3 * xa[m] * xb[m])
                    .collect();
                Ok(GridFunction::new(&self.grid, out)?.with_label(label))
            }
        }
    }
}

/// [`NodeSamples::mu`] for a one-off evaluation.
pub fn eval_mu<T: Real>(
    pot: &PotentialModel<T>,
    grid: &Arc<Grid<T>>,
    t: T,
    rule: &QuadratureRule<T>,
    j: usize,
    k: usize,
    parity: Parity,
) -> Result<GridFunction<T>> {
    NodeSamples::new(pot, grid, t, rule).mu(j, k, parity)
}

/// [`NodeSamples::lambda`] for a one-off evaluation.
#[allow(clippy::too_many_arguments)]
pub fn eval_lambda<T: Real>(
    pot: &PotentialModel<T>,
    grid: &Arc<Grid<T>>,
    t: T,
    rule: &QuadratureRule<T>,
    kernel: &TriangleKernel,
    a: usize,
    b: usize,
    parity: Parity,
) -> Result<GridFunction<T>> {
    NodeSamples::new(pot, grid, t, rule).lambda(kernel, a, b, parity)
}
