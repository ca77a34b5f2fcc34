use num_complex::Complex;
use num_rational::Ratio;

use super::{SigmaPolicy, StepContext};
use crate::algebra::{size_of, SizeMeta, SymOpSum, SymTerm};
use crate::error::Result;
use crate::integrals::{KernelName, Parity};
use crate::scalar::Real;
use crate::spectral::GridFunction;

/// `coeff * d^2`, exponentiated by a circulant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KineticExponent<T: Real> {
    pub coeff: Complex<T>,
}

/// `scale * f`, exponentiated pointwise.
#[derive(Clone, Debug)]
pub struct DiagExponent<T: Real> {
    pub f: GridFunction<T>,
    pub scale: Complex<T>,
}

impl<T: Real> KineticExponent<T> {
    pub fn to_symop(&self, one: &GridFunction<T>) -> Result<SymOpSum<T>> {
        Ok(SymTerm::new(self.coeff, one.clone(), 2)?.into())
    }
}

impl<T: Real> DiagExponent<T> {
    pub fn to_symop(&self) -> Result<SymOpSum<T>> {
        Ok(SymTerm::new(self.scale, self.f.clone(), 0)?.into())
    }
}

#[derive(Clone, Debug)]
pub struct Mz4Exponents<T: Real> {
    pub w0: KineticExponent<T>,
    pub w1: DiagExponent<T>,
    pub w2: SymOpSum<T>,
}

#[derive(Clone, Debug)]
pub struct Mz6Exponents<T: Real> {
    pub w0: KineticExponent<T>,
    pub w1: DiagExponent<T>,
    pub w2: SymOpSum<T>,
    pub w3: SymOpSum<T>,
}

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// Collects terms together with their size bookkeeping.
struct Builder<T: Real> {
    sum: SymOpSum<T>,
}

impl<T: Real> Builder<T> {
    fn new() -> Self {
        Self { sum: SymOpSum::new() }
    }

    /// `meta` = (eps power of the coefficient, h power of the coefficient, h power of f).
    fn add(&mut self, coeff: Complex<T>, f: GridFunction<T>, k: usize, meta: (i64, i64, i64)) -> Result<()> {
        let term = SymTerm::new(coeff, f, k)?;
        let size = size_of(&term, SizeMeta::new(meta.0, meta.1, meta.2));
        self.sum.push(term.with_size(size));
        Ok(())
    }

    fn finish(self, policy: SigmaPolicy, error_exponent: (i64, i64)) -> SymOpSum<T> {
        let sum = self.sum.collect();
        match policy {
            SigmaPolicy::AlwaysInclude => sum,
            SigmaPolicy::PruneBySigma(sigma) => {
                // a splitting with error O(eps^(a sigma - b)) has no use for smaller terms
                let threshold = sigma * Ratio::from(error_exponent.0) - Ratio::from(error_exponent.1);
                sum.prune_by_sigma(sigma, threshold)
            }
        }
    }
}

fn sq<T: Real>(f: &GridFunction<T>) -> Result<GridFunction<T>> {
    f.mul(f)
}

/// Shared `W^[2]` form:
/// `(1/6) i h/eps (d mu0)^2 - 2 <d mu1>_1 + (1/6) i h^2 eps <d^2 mu0>_2`
/// (plus `-(1/24) i h^2 eps d^4 mu0` for the order-4 scheme, subject to the
/// sigma policy).
fn w2_terms<T: Real>(
    b: &mut Builder<T>,
    ctx: &StepContext<T>,
    mu0: &GridFunction<T>,
    mu1: &GridFunction<T>,
) -> Result<()> {
    let (h, eps) = (ctx.h, ctx.eps);
    let d1 = mu0.deriv(1)?;
    b.add(c::<T>(0.0, 1.0 / 6.0) * (h / eps), sq(&d1)?.with_label("(d mu00)^2"), 0, (-1, 1, 2))?;
    b.add(c(-2.0, 0.0), mu1.deriv(1)?, 1, (0, 0, 3))?;
    b.add(c::<T>(0.0, 1.0 / 6.0) * (h * h * eps), mu0.deriv(2)?, 2, (1, 2, 1))?;
    Ok(())
}

/// Exponents of the five-factor order-4 splitting.
pub fn assemble_mz4_exponents<T: Real>(ctx: &StepContext<T>) -> Result<Mz4Exponents<T>> {
    let (h, eps) = (ctx.h, ctx.eps);
    let mu00 = ctx.tables.mu(0, 0, Parity::None)?;
    let mu11 = ctx.tables.mu(1, 1, Parity::None)?;
    let mut b = Builder::new();
    w2_terms(&mut b, ctx, mu00, mu11)?;
    b.add(c::<T>(0.0, -1.0 / 24.0) * (h * h * eps), mu00.deriv(4)?, 0, (1, 2, 1))?;
    Ok(Mz4Exponents {
        w0: KineticExponent { coeff: c::<T>(0.0, 1.0) * (h * eps) },
        w1: DiagExponent { f: mu00.clone(), scale: c::<T>(0.0, -1.0) / eps },
        w2: b.finish(ctx.sigma_policy, (5, 1)),
    })
}

/// Exponents of the seven-factor order-6 splitting.
pub fn assemble_mz6_exponents<T: Real>(ctx: &StepContext<T>) -> Result<Mz6Exponents<T>> {
    let (h, eps) = (ctx.h, ctx.eps);
    let t = &ctx.tables;
    let mu00 = t.mu(0, 0, Parity::Even)?;
    let mu11 = t.mu(1, 1, Parity::Odd)?;
    let mu21 = t.mu(2, 1, Parity::Even)?;
    let mu31 = t.mu(3, 1, Parity::Odd)?;
    let l_psi = t.lambda(KernelName::Psi, 1, 1, Parity::Even)?;
    let l_12 = t.lambda(KernelName::Phi1PlusVarphi1, 1, 2, Parity::Odd)?;
    let l_21 = t.lambda(KernelName::Phi2PlusVarphi2, 2, 1, Parity::Odd)?;

    let mut b2 = Builder::new();
    w2_terms(&mut b2, ctx, mu00, mu11)?;
    let w2 = b2.finish(ctx.sigma_policy, (7, 1));

    let d = |f: &GridFunction<T>, k: usize| f.deriv(k);
    let (m1, m2, m3, m4) = (d(mu00, 1)?, d(mu00, 2)?, d(mu00, 3)?, d(mu00, 4)?);
    let (n1, n2) = (d(mu11, 1)?, d(mu11, 2)?);
    let m1sq = sq(&m1)?;
    let i = c::<T>(0.0, 1.0);
    let (h2, h3, h4) = (h * h, h * h * h, h * h * h * h);
    let mut b = Builder::new();
    // multiplication terms
    b.add(i / eps, l_psi.clone(), 0, (-1, 0, 5))?;
    b.add(i * T::lit(-1.0 / 24.0) * (h2 * eps), m4.clone(), 0, (1, 2, 1))?;
    b.add(i * T::lit(-1.0 / 6.0) / eps, m1sq.mul(&d(mu21, 2)?)?, 0, (-1, 0, 7))?;
    b.add(i * T::lit(-7.0 / 120.0) * (h2 / eps), m1sq.mul(&m2)?, 0, (-1, 2, 3))?;
    // first order
    b.add(c(1.0 / 6.0, 0.0), l_12.add_scaled(T::one(), l_21)?, 1, (0, 0, 5))?;
    let mixed = m1.mul(&n2)?.add_scaled(T::lit(-1.0 / 3.0), &m2.mul(&n1)?)?;
    b.add(Complex::new(h, T::zero()), mixed, 1, (0, 1, 4))?;
    // second order
    let curv = sq(&m2)?.add_scaled(T::lit(-2.0), &m1.mul(&m3)?)?;
    b.add(i * T::lit(1.0 / 30.0) * (h3 * eps), curv, 2, (1, 3, 2))?;
    b.add(i * T::lit(2.0) * eps, d(mu21, 2)?, 2, (1, 0, 5))?;
    // third and fourth order
    b.add(c::<T>(4.0 / 3.0, 0.0) * (eps * eps), d(mu31, 3)?, 3, (2, 0, 5))?;
    b.add(c::<T>(1.0 / 3.0, 0.0) * (h2 * eps * eps), d(mu11, 3)?, 3, (2, 2, 3))?;
    b.add(i * T::lit(-1.0 / 120.0) * (h4 * eps * eps * eps), m4, 4, (3, 4, 1))?;

    Ok(Mz6Exponents {
        w0: KineticExponent { coeff: i * (h * eps) },
        w1: DiagExponent { f: mu00.clone(), scale: -i / eps },
        w2,
        w3: b.finish(ctx.sigma_policy, (7, 1)),
    })
}

/// Order-4 Magnus exponent `i h eps d^2 - i mu_00 / eps - 2 <d mu_11>_1`.
pub fn theta2<T: Real>(ctx: &StepContext<T>) -> Result<SymOpSum<T>> {
    let (h, eps) = (ctx.h, ctx.eps);
    let mu00 = ctx.tables.mu(0, 0, Parity::None)?;
    let mu11 = ctx.tables.mu(1, 1, Parity::None)?;
    let one = GridFunction::constant(mu00.grid(), T::one());
    let i = c::<T>(0.0, 1.0);
    Ok([
        SymTerm::new(i * (h * eps), one, 2)?,
        SymTerm::new(-i / eps, mu00.clone(), 0)?,
        SymTerm::new(c(-2.0, 0.0), mu11.deriv(1)?, 1)?,
    ]
    .into_iter()
    .collect())
}

/// Order-6 Magnus exponent in odd powers of `h`, without its `O(h^5 eps)`
/// term `(1/4) i eps d^4 mu_21^e`.
pub fn theta4o<T: Real>(ctx: &StepContext<T>) -> Result<SymOpSum<T>> {
    let (h, eps) = (ctx.h, ctx.eps);
    let t = &ctx.tables;
    let mu00 = t.mu(0, 0, Parity::Even)?;
    let mu11 = t.mu(1, 1, Parity::Odd)?;
    let mu21 = t.mu(2, 1, Parity::Even)?;
    let mu31 = t.mu(3, 1, Parity::Odd)?;
    let l_psi = t.lambda(KernelName::Psi, 1, 1, Parity::Even)?;
    let l_12 = t.lambda(KernelName::Phi1PlusVarphi1, 1, 2, Parity::Odd)?;
    let l_21 = t.lambda(KernelName::Phi2PlusVarphi2, 2, 1, Parity::Odd)?;
    let one = GridFunction::constant(mu00.grid(), T::one());
    let i = c::<T>(0.0, 1.0);
    Ok([
        SymTerm::new(i * (h * eps), one, 2)?,
        SymTerm::new(-i / eps, mu00.clone(), 0)?,
        SymTerm::new(c(-2.0, 0.0), mu11.deriv(1)?, 1)?,
        SymTerm::new(i / eps, l_psi.clone(), 0)?,
        SymTerm::new(i * T::lit(2.0) * eps, mu21.deriv(2)?, 2)?,
        SymTerm::new(c(1.0 / 6.0, 0.0), l_12.add_scaled(T::one(), l_21)?, 1)?,
        SymTerm::new(c::<T>(4.0 / 3.0, 0.0) * (eps * eps), mu31.deriv(3)?, 3)?,
    ]
    .into_iter()
    .collect())
}
